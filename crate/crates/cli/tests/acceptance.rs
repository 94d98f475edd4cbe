//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic;
use std::time::Instant;

use common::caputo::implied_source;
use common::{dense, Oracle};
use fkk_core::cq::CqWeights;
use fkk_core::field::nodal_interpolation;
use fkk_core::ldg::{run, LdgSystem};
use fkk_core::problems::{example1, example2, Example1Case};
use fkk_core::projection::{lemma_identity_residuals, Poly2};
use fkk_core::study::{regularity_diagnostic, spatial_study, stability_probe, temporal_study, ConvergenceTable};
use fkk_core::{Basis, Mesh2D, ProblemSpec};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const TAUS: [f64; 5] = [0.1, 0.05, 0.025, 0.0125, 0.00625];
const CELLS: [usize; 5] = [4, 8, 12, 16, 20];

/// Published row: alpha, five errors, four rates.
struct Row(f64, [f64; 5], [f64; 4]);

const TABLE1: [Row; 3] = [
    Row(0.3, [2.726e-4, 1.329e-4, 6.564e-5, 3.262e-5, 1.626e-5], [1.0360, 1.0179, 1.0089, 1.0045]),
    Row(0.5, [4.442e-4, 2.138e-4, 1.049e-4, 5.197e-5, 2.586e-5], [1.0550, 1.0272, 1.0135, 1.0067]),
    Row(0.8, [5.479e-4, 2.487e-4, 1.187e-4, 5.803e-5, 2.869e-5], [1.1395, 1.0668, 1.0326, 1.0161]),
];
const TABLE2: [Row; 3] = [
    Row(0.2, [1.264e-4, 6.192e-5, 3.065e-5, 1.525e-5, 7.603e-6], [1.0294, 1.0147, 1.0073, 1.0037]),
    Row(0.4, [2.531e-4, 1.227e-4, 6.041e-5, 2.997e-5, 1.493e-5], [1.0447, 1.0222, 1.0110, 1.0055]),
    Row(0.6, [3.521e-4, 1.677e-4, 8.184e-5, 4.044e-5, 2.010e-5], [1.0705, 1.0346, 1.0172, 1.0085]),
];
const TABLE3: [Row; 3] = [
    Row(0.2, [6.500e-6, 3.352e-6, 1.705e-6, 8.610e-7, 4.329e-7], [0.9556, 0.9751, 0.9858, 0.9919]),
    Row(0.5, [9.831e-6, 5.076e-6, 2.584e-6, 1.306e-6, 6.567e-7], [0.9537, 0.9740, 0.9850, 0.9913]),
    Row(0.7, [6.149e-6, 3.191e-6, 1.630e-6, 8.253e-7, 4.158e-7], [0.9463, 0.9693, 0.9818, 0.9890]),
];
const TABLE4: [Row; 3] = [
    Row(0.3, [1.032e-1, 2.625e-2, 1.175e-2, 6.635e-3, 4.259e-3], [1.9755, 1.9830, 1.9859, 1.9867]),
    Row(0.5, [1.032e-1, 2.623e-2, 1.174e-2, 6.627e-3, 4.252e-3], [1.9757, 1.9835, 1.9869, 1.9884]),
    Row(0.7, [1.031e-1, 2.622e-2, 1.173e-2, 6.621e-3, 4.247e-3], [1.9758, 1.9839, 1.9876, 1.9896]),
];
const TABLE5: [Row; 3] = [
    Row(0.4, [3.372e-3, 4.285e-4, 1.269e-4, 5.365e-5, 2.779e-5], [2.9763, 3.0014, 2.9927, 2.9477]),
    Row(0.6, [3.371e-3, 4.281e-4, 1.266e-4, 5.331e-5, 2.730e-5], [2.9770, 3.0048, 3.0069, 2.9989]),
    Row(0.8, [3.370e-3, 4.280e-4, 1.265e-4, 5.321e-5, 2.719e-5], [2.9772, 3.0058, 3.0101, 3.0089]),
];

struct Outcome {
    pass: bool,
    detail: String,
}

/// Worst rate deviation and worst relative error deviation against a table.
fn compare(tables: &[ConvergenceTable], rows: &[Row]) -> (f64, f64) {
    let mut rate_dev: f64 = 0.0;
    let mut err_dev: f64 = 0.0;
    for (t, Row(alpha, errs, rates)) in tables.iter().zip(rows) {
        assert!((t.alpha - alpha).abs() < 1e-12);
        for (got, want) in t.rates().iter().zip(rates) {
            rate_dev = rate_dev.max((got - want).abs());
        }
        for (got, want) in t.errors().iter().zip(errs) {
            err_dev = err_dev.max((got / want - 1.0).abs());
        }
    }
    (rate_dev, err_dev)
}

fn temporal(case: Example1Case, rows: &[Row]) -> Vec<ConvergenceTable> {
    rows.iter()
        .map(|r| temporal_study(&example1(case, r.0).unwrap(), 16, 1, &TAUS, 1.0).unwrap())
        .collect()
}

fn spatial(k: usize, tau: f64, rows: &[Row]) -> Vec<ConvergenceTable> {
    rows.iter()
        .map(|r| spatial_study(&example2(r.0).unwrap(), k, tau, &CELLS, 1.0).unwrap())
        .collect()
}

fn c1_table1() -> Outcome {
    let start = Instant::now();
    let tables = temporal(Example1Case::A, &TABLE1);
    let secs = start.elapsed().as_secs_f64();
    let (r, e) = compare(&tables, &TABLE1);
    Outcome {
        pass: r <= 0.05 && e <= 0.25 && secs <= 300.0,
        detail: format!(
            "Table 1 (ex1a): max |rate - printed| {r:.4} (tol 0.05), max rel error {:.2}% (tol 25%), {secs:.1} s (limit 300 s)",
            100.0 * e
        ),
    }
}

fn c2_tables23() -> Outcome {
    let (r2, e2) = compare(&temporal(Example1Case::B, &TABLE2), &TABLE2);
    let (r3, e3) = compare(&temporal(Example1Case::C, &TABLE3), &TABLE3);
    Outcome {
        pass: r2 <= 0.05 && r3 <= 0.05,
        detail: format!(
            "Tables 2-3 (ex1b, ex1c): max |rate - printed| {r2:.4} / {r3:.4} (tol 0.05); \
             max rel error {:.2}% / {:.2}% (not gated)",
            100.0 * e2,
            100.0 * e3
        ),
    }
}

fn c3_table4() -> Outcome {
    let (r, e) = compare(&spatial(1, 0.01, &TABLE4), &TABLE4);
    Outcome {
        pass: r <= 0.05 && e <= 0.10,
        detail: format!("Table 4 (k=1, tau=1/100): max |rate - printed| {r:.4} (tol 0.05), max rel error {:.2}% (tol 10%)", 100.0 * e),
    }
}

fn c4_table5() -> Outcome {
    let start = Instant::now();
    let tables = spatial(2, 0.005, &TABLE5);
    let secs = start.elapsed().as_secs_f64();
    let (r, e) = compare(&tables, &TABLE5);
    Outcome {
        pass: r <= 0.08 && e <= 0.15 && secs <= 600.0,
        detail: format!(
            "Table 5 (k=2, tau=1/200): max |rate - printed| {r:.4} (tol 0.08), max rel error {:.2}% (tol 15%), {secs:.1} s (limit 600 s)",
            100.0 * e
        ),
    }
}

fn c5_cq_signs() -> Outcome {
    let mut bad = Vec::new();
    for tenth in 1..=9 {
        let alpha = tenth as f64 / 10.0;
        let w = CqWeights::new(alpha, 1.0, 10_000).unwrap();
        let s = w.partial_sums();
        let ok = w.get(0) > 0.0
            && w.weights()[1..].iter().all(|&d| d < 0.0)
            && s.iter().all(|&x| x > 0.0)
            && s.windows(2).all(|p| p[1] < p[0]);
        if !ok {
            bad.push(alpha);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("CQ weights, alpha in 0.1..0.9, j <= 10^4: sign/monotonicity violations at {bad:?}"),
    }
}

fn c6_identities() -> Outcome {
    let mesh = Mesh2D::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for k in [1usize, 2] {
        for _ in 0..50 {
            let d = k + 1;
            let u = Poly2::from_fn(d, |p, q| {
                let c: f64 = rng.gen_range(-1.0..1.0);
                if p == d && q == 0 { 1.0 + c.abs() } else { c }
            });
            let nu: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for i in 0..4 {
                for j in 0..4 {
                    let (rx, rv) = lemma_identity_residuals(&u, &nu, &mesh, k, (i, j)).unwrap();
                    worst = worst.max(rx.abs()).max(rv.abs());
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-11,
        detail: format!("projection identities, 50 instances per k in {{1,2}}, all cells of N=4: max residual {worst:.2e} (tol 1e-11)"),
    }
}

fn c7_stability() -> Outcome {
    let mut constant: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.8] {
        constant = constant.max(stability_probe(alpha, 8, 1, 0.02, 50, 1.0, 10, 0).unwrap().max_ratio());
    }
    let mut lam_min = f64::INFINITY;
    for n in [2, 4] {
        for k in [1, 2] {
            for tau in [0.1, 0.02] {
                for alpha in [0.3, 0.5, 0.8] {
                    let d0 = CqWeights::new(alpha, tau, 0).unwrap().get(0);
                    let sys = LdgSystem::new(Mesh2D::new(n).unwrap(), Basis::new(k).unwrap(), 1.0, d0).unwrap();
                    let a = dense(sys.matrix());
                    let sym = (&a + a.transpose()) * 0.5;
                    lam_min = lam_min.min(SymmetricEigen::new(sym).eigenvalues.min());
                }
            }
        }
    }
    Outcome {
        pass: constant <= 5.0 && lam_min > 0.0,
        detail: format!(
            "stability: observed constant {constant:.4} (limit 5); min eigenvalue of sym(A) {lam_min:.3e} (must be > 0)"
        ),
    }
}

fn c8_backward_euler() -> Outcome {
    let (n, k, tau) = (4, 1, 1.0 / 20.0);
    // Example 2 data with alpha = 1: G = (t + 1) sin(pi x) sin(pi v)
    let source = |x: f64, v: f64, t: f64| {
        let (sx, cx, sv, cv) = ((PI * x).sin(), (PI * x).cos(), (PI * v).sin(), (PI * v).cos());
        sx * sv + (t + 1.0) * (PI * PI * sx * sv + v * PI * cx * sv - v * PI * sx * cv - sx * sv)
    };
    let p = ProblemSpec::new(1.0, 1.0, |x, v| (PI * x).sin() * (PI * v).sin(), source).unwrap();
    let traj = run(&p, n, k, tau, 1.0).unwrap();
    let mesh = Mesh2D::new(n).unwrap();
    let basis = Basis::new(k).unwrap();
    let oracle = Oracle::new(n, k, 1.0);
    let lu = (&oracle.mass / tau + oracle.spatial()).lu();
    let mut g = DVector::from_vec(nodal_interpolation(&mesh, &basis, |x, v| p.initial_at(x, v)));
    let mut worst: f64 = 0.0;
    for step in 1..=20 {
        let t = step as f64 * tau;
        let f = DVector::from_vec(nodal_interpolation(&mesh, &basis, |x, v| p.source_at(x, v, t)));
        g = lu.solve(&(&oracle.mass * (&g / tau + f))).unwrap();
        let got = DMatrix::from_column_slice(g.len(), 1, traj.get(step).unwrap().coeffs());
        worst = worst.max((got - &g).abs().max());
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("alpha=1 vs independent backward-Euler LDG (N=4, k=1, tau=1/20): max per-step diff {worst:.2e} (tol 1e-10)"),
    }
}

fn c9_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut other_best = f64::INFINITY;
    for _ in 0..20 {
        let alpha = rng.gen_range(0.1..0.9);
        let (x, v, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.05..1.0));
        let f = example2(alpha).unwrap().source_at(x, v, t);
        let want = implied_source(alpha, |s| s.powf(alpha) + 1.0, |s| alpha * s.powf(alpha - 1.0), x, v, t);
        worst = worst.max((f - want).abs());
        let alt = implied_source(alpha, |s| s.powf(alpha + 1.0), |s| (alpha + 1.0) * s.powf(alpha), x, v, t);
        other_best = other_best.min((f - alt).abs());
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!(
            "ex2 source vs numerical Caputo oracle, 20 samples: max residual {worst:.2e} (tol 1e-8); \
             the t^(alpha+1) reading misses by at least {other_best:.2e}"
        ),
    }
}

fn c10_regularity() -> Outcome {
    let p = example1(Example1Case::B, 0.5).unwrap();
    let fit = regularity_diagnostic(&p, 16, 1, 1.0 / 160.0, 1.0).unwrap();
    match fit.slope {
        Some(s) => Outcome {
            pass: (s + 1.0).abs() <= 0.2,
            detail: format!("regularity slope, ex1b alpha=0.5 N=16 k=1 tau=1/160: {s:.4} (target -1 +/- 0.2)"),
        },
        None => Outcome { pass: false, detail: "regularity fit degenerate".into() },
    }
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, c1_table1),
        (2, c2_tables23),
        (3, c3_table4),
        (4, c4_table5),
        (5, c5_cq_signs),
        (6, c6_identities),
        (7, c7_stability),
        (8, c8_backward_euler),
        (9, c9_residual),
        (10, c10_regularity),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let outcome = panic::catch_unwind(check)
            .unwrap_or_else(|_| Outcome { pass: false, detail: "panicked".into() });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
