use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule assigning a mode index `n(P)` to each bead count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSchedule {
    Constant {
        n0: usize,
    },
    /// `n = round(sqrt(P))`
    SqrtP,
    /// `n = round(c P)`
    FracP {
        c: f64,
    },
}

impl ModeSchedule {
    pub fn mode(&self, p: usize) -> Result<usize> {
        let n = match *self {
            ModeSchedule::Constant { n0 } => n0,
            ModeSchedule::SqrtP => (p as f64).sqrt().round() as usize,
            ModeSchedule::FracP { c } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::invalid(
                        "schedule.c",
                        format!("must be > 0, got {c}"),
                    ));
                }
                (c * p as f64).round() as usize
            }
        };
        if n < 1 || n > p {
            return Err(Error::invalid(
                "schedule",
                format!("{} gives n = {n} outside 1..={p}", self.label()),
            ));
        }
        Ok(n)
    }

    pub fn label(&self) -> String {
        match *self {
            ModeSchedule::Constant { n0 } => format!("constant({n0})"),
            ModeSchedule::SqrtP => "sqrtP".into(),
            ModeSchedule::FracP { c } => format!("fracP({c})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert_eq!(ModeSchedule::Constant { n0: 1 }.mode(16).unwrap(), 1);
        assert_eq!(ModeSchedule::SqrtP.mode(16).unwrap(), 4);
        assert_eq!(ModeSchedule::SqrtP.mode(2048).unwrap(), 45);
        assert_eq!(ModeSchedule::FracP { c: 0.25 }.mode(16).unwrap(), 4);
        assert!(ModeSchedule::Constant { n0: 17 }.mode(16).is_err());
        assert!(ModeSchedule::FracP { c: 0.01 }.mode(16).is_err());
        assert_eq!(ModeSchedule::FracP { c: 0.25 }.label(), "fracP(0.25)");
    }
}
