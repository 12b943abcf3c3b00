use criterion::{criterion_group, criterion_main, Criterion};

use qtst_core::pathcore::{PotentialModel, ThermoParams};
use qtst_core::rates::{estimate_rates, Backend, Eta0Mode, GridSpec, McBudget, RateProblem};
use qtst_core::scaling::{default_deterministic_sweep, figure1_emit};
use qtst_core::surfaces::SurfaceSpec;

fn bench_figure1(c: &mut Criterion) {
    let ps = default_deterministic_sweep();
    c.bench_function("figure1_emit", |b| {
        b.iter(|| figure1_emit(&ps, 2, 0.0).unwrap())
    });
}

fn bench_rates(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_rates");
    g.sample_size(10);
    let harmonic = PotentialModel::harmonic(1.0);
    let mc = RateProblem::new(
        ThermoParams::natural(1.0, 32).unwrap(),
        harmonic,
        SurfaceSpec::fourier_norm(1, 0.5, 0.0),
    );
    let budget = Backend::MonteCarlo(McBudget {
        samples: 20_000,
        chains: 8,
        seed: 1,
    });
    g.bench_function("monte_carlo_p32", |b| {
        b.iter(|| estimate_rates(&mc, &budget, Eta0Mode::GaussianClosedForm).unwrap())
    });
    let grid = RateProblem::new(
        ThermoParams::natural(1.0, 3).unwrap(),
        harmonic,
        SurfaceSpec::fourier_norm(1, 0.5, 0.0),
    );
    let spec = Backend::Grid(GridSpec::default());
    g.bench_function("grid_p3", |b| {
        b.iter(|| estimate_rates(&grid, &spec, Eta0Mode::GaussianClosedForm).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_figure1, bench_rates);
criterion_main!(benches);
