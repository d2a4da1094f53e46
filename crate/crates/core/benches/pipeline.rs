//! Benchmarks for the solver and rigor stages. Group names carry the
//! execution mode, so `cargo bench` (rayon) and
//! `cargo bench --no-default-features` (sequential) produce comparable
//! baselines: criterion stores them side by side under `par` and `seq`.

use bvp_certify::expr::parse;
use bvp_certify::galerkin::{
    jacobian, newton_solve, NewtonParams, ProblemSpec, QuadMode, RigorParams,
};
use bvp_certify::rigor::{certify, eta_bound, interval_jacobian, k_bound, n_bound};
use criterion::{criterion_group, criterion_main, Criterion};

fn mode_tag() -> &'static str {
    if cfg!(feature = "parallel") {
        "par"
    } else {
        "seq"
    }
}

fn cubic_problem() -> ProblemSpec {
    ProblemSpec {
        f: parse("u^3/6 - u - cos(pi*x)").unwrap(),
        m: 5,
        search_radius: 1.0,
        solver_panels: 1024,
        newton: NewtonParams {
            b0_amplitudes: vec![],
            tol: 1e-12,
            max_iter: 50,
        },
        rigor: RigorParams {
            panels: 256,
            subdiv: 256,
            mode: QuadMode::Simpson,
        },
    }
}

/// Hessian depending on both x and u, so the sup bound subdivides two axes.
fn two_axis_problem() -> ProblemSpec {
    ProblemSpec {
        f: parse("cos(x*u) - cos(pi*x)").unwrap(),
        m: 4,
        search_radius: 1.0,
        solver_panels: 512,
        newton: NewtonParams {
            b0_amplitudes: vec![],
            tol: 1e-10,
            max_iter: 50,
        },
        rigor: RigorParams {
            panels: 128,
            subdiv: 64,
            mode: QuadMode::Simpson,
        },
    }
}

fn bench_pipeline(c: &mut Criterion) {
    let spec = cubic_problem();
    let b = newton_solve(&spec).expect("cubic problem converges");
    let tag = mode_tag();

    let mut group = c.benchmark_group(format!("cubic/{tag}"));
    group.sample_size(20);
    group.bench_function("newton_solve", |bch| {
        bch.iter(|| newton_solve(&spec).unwrap())
    });
    group.bench_function("float_jacobian", |bch| {
        bch.iter(|| jacobian(&spec, &b).unwrap())
    });
    group.bench_function("eta_bound", |bch| bch.iter(|| eta_bound(&spec, &b).unwrap()));
    group.bench_function("interval_jacobian", |bch| {
        bch.iter(|| interval_jacobian(&spec, &b).unwrap())
    });
    group.bench_function("n_bound", |bch| {
        bch.iter(|| n_bound(&spec, &b, 256).unwrap())
    });
    group.bench_function("certify_full", |bch| {
        bch.iter(|| certify(&spec, &b).unwrap())
    });
    group.finish();

    let spec2 = two_axis_problem();
    let mut group = c.benchmark_group(format!("two_axis/{tag}"));
    group.sample_size(10);
    group.bench_function("k_bound_2d", |bch| {
        bch.iter(|| k_bound(&spec2, 2.0, 64).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
