use serde::Serialize;
use serde_json::json;

use qtst_core::output::{fmt_sig, CsvTable};
use qtst_core::pathcore::{
    momentum_avg_exact_free, momentum_avg_leading, sinusoidal_path, MomentumSide, RingPath,
    SinusoidalPathSpec, ThermoParams,
};
use qtst_core::rates::{estimate_rates, ratio_sweep, Backend, McBudget, RateProblem};
use qtst_core::scaling::{
    figure1_emit, gp_series, quaddiff_orders, sum_difference_series, tdiff_series, QuadDiffOrders,
    ScalingSeries, ThermalFamily,
};
use qtst_core::surfaces::{equivalence_diagnostics, f_eval, EquivalenceTable, GpForm, SurfaceEval};

use crate::artifact::Artifact;
use crate::config::{BackendKind, Command, PathConfig, Quantity, RunConfig};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub artifacts: Vec<Artifact>,
    pub divergence: bool,
}

impl CommandOutput {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Self {
            artifacts,
            divergence: false,
        }
    }
}

type Out = Result<CommandOutput, CliError>;

fn core(section: &'static str) -> impl Fn(qtst_core::Error) -> CliError {
    move |e| CliError::from_core(section, e)
}

pub fn execute(cfg: &RunConfig) -> Out {
    match cfg.command.expect("command resolved") {
        Command::SurfaceCheck => surface_check(cfg),
        Command::Scaling => scaling(cfg),
        Command::Figure1 => figure1(cfg),
        Command::Rate => rate(cfg),
        Command::RatioSweep => ratio(cfg),
        Command::MomentaCheck => momenta(cfg),
    }
}

fn thermo(cfg: &RunConfig) -> Result<ThermoParams, CliError> {
    let t = cfg.thermo;
    ThermoParams::new(t.beta, t.mass, t.hbar, t.beads).map_err(core("thermo"))
}

fn build_path(cfg: &RunConfig, p: usize) -> Result<RingPath, CliError> {
    match &cfg.path {
        PathConfig::Sinusoidal { .. } => {
            let spec = cfg.path.sinusoidal_spec().expect("sinusoidal");
            sinusoidal_path(&spec, p).map_err(core("path"))
        }
        PathConfig::Beads { values } => {
            if values.len() != p {
                return Err(CliError::Validation(format!(
                    "[path] `values` has {} entries but thermo.beads = {p}",
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Validation(
                    "[path] `values` must be finite".into(),
                ));
            }
            RingPath::new(values.clone()).map_err(core("path"))
        }
    }
}

fn rate_problem(cfg: &RunConfig, params: ThermoParams) -> Result<RateProblem, CliError> {
    let r = &cfg.rate;
    let problem = RateProblem {
        params,
        potential: cfg.potential,
        surface: cfg.surface,
        window: r.window.clone(),
        log_weight_guard: r.log_weight_guard,
        phi_floor: r.phi_floor,
    };
    problem.validate().map_err(core("rate"))?;
    problem.centroid_coefficient().map_err(core("surface"))?;
    Ok(problem)
}

fn budget(cfg: &RunConfig) -> Result<McBudget, CliError> {
    let b = McBudget {
        samples: cfg.rate.samples,
        chains: cfg.rate.chains,
        seed: cfg.seed,
    };
    b.validate().map_err(core("rate"))?;
    Ok(b)
}

#[derive(Serialize)]
struct SurfaceCheck {
    beads: Vec<f64>,
    f_value: f64,
    norm_term: f64,
    singular: bool,
    phi_admissible: bool,
    gradient: Option<Vec<f64>>,
    b_p: Option<f64>,
    t_vec: Option<Vec<f64>>,
    g_p_link: Option<f64>,
    g_p_cyclic: Option<f64>,
    flux_sum: Option<f64>,
    sqrt_b_p: Option<f64>,
    sum_difference: Option<f64>,
    max_t_step: Option<f64>,
    equivalence: Option<EquivalenceTable>,
}

fn surface_check(cfg: &RunConfig) -> Out {
    let params = thermo(cfg)?;
    let p = params.beads();
    let spec = cfg.surface;
    spec.check_structure(p).map_err(core("surface"))?;
    let path = build_path(cfg, p)?;
    let fv = f_eval(&spec, &path).map_err(core("surface"))?;
    let eval = if fv.singular {
        None
    } else {
        Some(SurfaceEval::new(&spec, &path, &params).map_err(core("surface"))?)
    };
    let cyclic = match &eval {
        Some(e) => Some(
            e.g_p_with(&path, &params, GpForm::Cyclic)
                .map_err(core("surface"))?,
        ),
        None => None,
    };

    let equivalence = match &cfg.diagnostics {
        None => None,
        Some(d) => {
            let Some(base) = cfg.path.sinusoidal_spec() else {
                return Err(CliError::Validation(
                    "[diagnostics] needs path.kind = \"sinusoidal\"".into(),
                ));
            };
            if spec.mode().is_none() {
                return Err(CliError::Validation(
                    "[diagnostics] the centroid surface has no mode to schedule".into(),
                ));
            }
            let table = equivalence_diagnostics(
                |pp| {
                    let n = d.schedule.mode(pp)?;
                    let q = sinusoidal_path(
                        &SinusoidalPathSpec::new(base.q0, base.amplitude, n, base.alpha),
                        pp,
                    )?;
                    Ok((spec.with_mode(n), q))
                },
                &d.p_list,
                &params,
            )
            .map_err(core("diagnostics"))?;
            Some(table)
        }
    };

    let mut csv = CsvTable::new(["k", "q_k", "df_dq_k", "T_k"]);
    for k in 0..p {
        let (g, t) = match &eval {
            Some(e) => (fmt_sig(e.gradient[k]), fmt_sig(e.t_vec[k])),
            None => ("nan".into(), "nan".into()),
        };
        csv.push_row(vec![(k + 1).to_string(), fmt_sig(path.beads()[k]), g, t]);
    }
    let mut artifacts = vec![Artifact::csv("surface_check.csv", csv)];
    if let Some(table) = &equivalence {
        let mut t = CsvTable::new(["P", "t_step_scaled", "g_scaled"]);
        for r in &table.rows {
            t.push_row(vec![
                r.p.to_string(),
                fmt_sig(r.t_step_scaled),
                fmt_sig(r.g_scaled),
            ]);
        }
        artifacts.push(Artifact::csv("equivalence.csv", t));
    }
    let body = SurfaceCheck {
        beads: path.beads().to_vec(),
        f_value: fv.value,
        norm_term: fv.norm_term,
        singular: fv.singular,
        phi_admissible: spec.validate(p, cfg.rate.phi_floor).is_ok(),
        gradient: eval.as_ref().map(|e| e.gradient.clone()),
        b_p: eval.as_ref().map(|e| e.b_p),
        t_vec: eval.as_ref().map(|e| e.t_vec.clone()),
        g_p_link: eval.as_ref().map(|e| e.g_p),
        g_p_cyclic: cyclic,
        flux_sum: eval.as_ref().map(|e| e.flux_sum()),
        sqrt_b_p: eval.as_ref().map(|e| e.b_p.sqrt()),
        sum_difference: eval.as_ref().map(|e| e.sum_difference()),
        max_t_step: eval.as_ref().map(|e| e.max_t_step()),
        equivalence,
    };
    artifacts.push(Artifact::json(
        "surface_check.json",
        json!({ "surface": spec, "check": body }),
    ));
    Ok(CommandOutput::ok(artifacts))
}

fn series_summary(s: &ScalingSeries) -> serde_json::Value {
    json!({
        "quantity": s.quantity,
        "schedule": s.schedule.map(|x| x.label()),
        "exponent": s.fitted_exponent,
        "residual": s.fit_residual,
        "prefactor": s.prefactor,
    })
}

fn series_csv(series: &[ScalingSeries]) -> CsvTable {
    let mut t = CsvTable::new([
        "P",
        "schedule",
        "n",
        "value",
        "closed_form",
        "log10P",
        "log10value",
    ]);
    for s in series {
        let label = s.schedule.map(|x| x.label()).unwrap_or_default();
        for pt in &s.points {
            t.push_row(vec![
                pt.p.to_string(),
                label.clone(),
                pt.n.to_string(),
                fmt_sig(pt.value),
                pt.closed_form.map(fmt_sig).unwrap_or_else(|| "nan".into()),
                fmt_sig((pt.p as f64).log10()),
                fmt_sig(pt.value.abs().log10()),
            ]);
        }
    }
    t
}

fn scaling(cfg: &RunConfig) -> Out {
    let s = &cfg.scaling;
    let p_list = s.p_list.clone().expect("resolved p_list");
    let path = s.path.expect("resolved path");
    let params = thermo(cfg)?;
    if s.quantity == Quantity::Quaddiff {
        return quaddiff(cfg, &p_list, &params);
    }
    if s.schedules.is_empty() {
        return Err(CliError::Validation(
            "[scaling] `schedules` is empty".into(),
        ));
    }
    let series = s
        .schedules
        .iter()
        .map(|&sch| match s.quantity {
            Quantity::TDiff => tdiff_series(sch, s.k, path, &p_list),
            Quantity::Gp => gp_series(sch, path, &p_list, &params),
            Quantity::SumDifference => sum_difference_series(sch, path, &p_list),
            Quantity::Quaddiff => unreachable!(),
        })
        .collect::<qtst_core::Result<Vec<_>>>()
        .map_err(core("scaling"))?;
    let summary: Vec<_> = series.iter().map(series_summary).collect();
    Ok(CommandOutput::ok(vec![
        Artifact::csv("scaling.csv", series_csv(&series)),
        Artifact::json("scaling.json", json!({ "path": path, "series": summary })),
    ]))
}

fn quaddiff(cfg: &RunConfig, p_list: &[usize], params: &ThermoParams) -> Out {
    let th = &cfg.scaling.thermal;
    let family = ThermalFamily {
        samples: th.samples,
        seed: cfg.seed,
        phi: th.phi,
        residual_threshold: th.residual_threshold,
    };
    if th.rules.is_empty() {
        return Err(CliError::Validation(
            "[scaling.thermal] `rules` is empty".into(),
        ));
    }
    let orders: Vec<QuadDiffOrders> = th
        .rules
        .iter()
        .map(|&r| quaddiff_orders(r, &family, p_list, params))
        .collect::<qtst_core::Result<_>>()
        .map_err(core("scaling"))?;
    let mut t = CsvTable::new([
        "P",
        "rule",
        "n",
        "b_p",
        "b_p_se",
        "t_diff",
        "t_diff_se",
        "g_p",
        "g_p_se",
    ]);
    let mut summary = Vec::new();
    for o in &orders {
        let rule = serde_json::to_value(o.rule).expect("rule serializes");
        let rule = rule.as_str().unwrap_or_default().to_string();
        for (i, pt) in o.b_p.points.iter().enumerate() {
            let se = o.std_errors[i];
            t.push_row(vec![
                pt.p.to_string(),
                rule.clone(),
                pt.n.to_string(),
                fmt_sig(pt.value),
                fmt_sig(se[0]),
                fmt_sig(o.t_diff.points[i].value),
                fmt_sig(se[1]),
                fmt_sig(o.g_p.points[i].value),
                fmt_sig(se[2]),
            ]);
        }
        summary.push(json!({
            "rule": rule,
            "series": [series_summary(&o.b_p), series_summary(&o.t_diff), series_summary(&o.g_p)],
            "insufficient_sampling": o.insufficient_sampling,
        }));
    }
    Ok(CommandOutput::ok(vec![
        Artifact::csv("quaddiff.csv", t),
        Artifact::json(
            "quaddiff.json",
            json!({ "samples_per_p": th.samples, "phi": th.phi, "orders": summary }),
        ),
    ]))
}

fn figure1(cfg: &RunConfig) -> Out {
    let f = &cfg.figure1;
    let fig = figure1_emit(&f.p_list, f.k, f.alpha).map_err(core("figure1"))?;
    let slopes: Vec<_> = fig.series.iter().map(series_summary).collect();
    Ok(CommandOutput::ok(vec![
        Artifact::csv("figure1.csv", fig.csv_table()),
        Artifact::json(
            "figure1.json",
            json!({ "k": fig.k, "alpha": fig.alpha, "slopes": slopes }),
        ),
    ]))
}

fn rate(cfg: &RunConfig) -> Out {
    let problem = rate_problem(cfg, thermo(cfg)?)?;
    let backend = match cfg.rate.backend {
        BackendKind::MonteCarlo => Backend::MonteCarlo(budget(cfg)?),
        BackendKind::Grid => {
            cfg.rate.grid.validate().map_err(core("rate.grid"))?;
            Backend::Grid(cfg.rate.grid)
        }
    };
    let report = estimate_rates(&problem, &backend, cfg.rate.eta0_mode).map_err(core("rate"))?;
    Ok(CommandOutput {
        divergence: report.divergence_flag,
        artifacts: vec![Artifact::json("rate.json", &report)],
    })
}

fn ratio(cfg: &RunConfig) -> Out {
    let rs = &cfg.ratio_sweep;
    let first = *rs
        .p_list
        .first()
        .ok_or_else(|| CliError::Validation("[ratio_sweep] `p_list` is empty".into()))?;
    let params = thermo(cfg)?
        .with_beads(first)
        .map_err(core("ratio_sweep"))?;
    let n = rs.schedule.mode(first).map_err(core("ratio_sweep"))?;
    let mut cfg_first = cfg.clone();
    cfg_first.surface = cfg.surface.with_mode(n);
    let template = rate_problem(&cfg_first, params)?;
    let b = budget(cfg)?;
    let sweep = ratio_sweep(&template, rs.schedule, &rs.p_list, &b, cfg.rate.eta0_mode)
        .map_err(core("ratio_sweep"))?;
    let divergence = sweep.rows.iter().any(|r| r.divergence_flag);
    Ok(CommandOutput {
        divergence,
        artifacts: vec![
            Artifact::csv("ratio_sweep.csv", sweep.csv_table()),
            Artifact::json("ratio_sweep.json", &sweep),
        ],
    })
}

fn momenta(cfg: &RunConfig) -> Out {
    let params = thermo(cfg)?;
    let p = params.beads();
    let path = build_path(cfg, p)?;
    let eta = vec![0.0; p];
    let eps = params.epsilon();
    let mut t = CsvTable::new([
        "k",
        "leading_plus",
        "exact_free",
        "leading_minus_prev",
        "gap_exact",
        "gap_index",
    ]);
    let (mut gap_exact, mut gap_index) = (0.0f64, 0.0f64);
    for k in 1..=p as i64 {
        let lead = momentum_avg_leading(MomentumSide::Plus, k, &path, &eta, &params)
            .map_err(core("path"))?;
        let prev = momentum_avg_leading(MomentumSide::Minus, k - 1, &path, &eta, &params)
            .map_err(core("path"))?;
        let exact = momentum_avg_exact_free(path.bead(k - 1), path.bead(k), eps, &params)
            .map_err(core("thermo"))?;
        let ge = (lead - exact).norm();
        let gi = (lead - prev).norm();
        gap_exact = gap_exact.max(ge);
        gap_index = gap_index.max(gi);
        t.push_row(vec![
            k.to_string(),
            fmt_sig(lead.im),
            fmt_sig(exact.im),
            fmt_sig(prev.im),
            fmt_sig(ge),
            fmt_sig(gi),
        ]);
    }
    Ok(CommandOutput::ok(vec![
        Artifact::csv("momenta.csv", t),
        Artifact::json(
            "momenta.json",
            json!({
                "epsilon": eps,
                "max_gap_exact_free": gap_exact,
                "max_gap_plus_minus": gap_index,
                "exact_free_agrees": gap_exact == 0.0,
                "index_identity_holds": gap_index == 0.0,
            }),
        ),
    ]))
}
