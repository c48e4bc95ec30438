//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use bbw_core::linalg::{least_squares, Matrix};
use bbw_core::quadrature::GaussLegendre;
use bbw_core::lifting::scheme_parameters;
use bbw_core::refinement::{refinement_matrix, two_scale_residual};
use bbw_core::{
    BrokenBasis, JumpMatrix, KnotGrid, RefinementMatrix, KnotHierarchy, SmoothFamily, SmoothFunction, TransformPlan,
};
use common::*;
use rand::Rng;

const ROUND_TRIP_TOL: f64 = 1e-9;
const TWO_SCALE_TOL: f64 = 1e-8;
const ROW_SUM_TOL: f64 = 1e-10;
const JUMP_TOL: f64 = 1e-8;
const MASK_TOL: f64 = 1e-9;
const HAT_TOL: f64 = 1e-10;
const FACTOR_TOL: f64 = 1e-10;
const MOMENT_TOL: f64 = 1e-9;
const TRIG_PROJECTION_TOL: f64 = 1e-8;
const SPLINE_PROJECTION_RANGE: (f64, f64) = (1e-3, 1e-1);
const DETAIL_TOL: f64 = 1e-8;
const LINEARITY_TOL: f64 = 0.15;

type Outcome = Result<String, String>;

/// Random nonequispaced 3-level hierarchies, 20 per order, shared by the
/// first three criteria.
struct Fixtures {
    plans: Vec<(usize, TransformPlan)>,
}

impl Fixtures {
    fn new() -> Self {
        let mut rng = rng(20_240_601);
        let mut plans = Vec::new();
        for order in 2..=5 {
            let family = SmoothFamily::powers(order).unwrap();
            for _ in 0..20 {
                let h = random_hierarchy(&mut rng, 7, 3);
                plans.push((order, TransformPlan::new(&family, &h).unwrap()));
            }
        }
        Self { plans }
    }
}

fn perfect_reconstruction(fx: &Fixtures) -> Outcome {
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    for (_, plan) in &fx.plans {
        for _ in 0..10 {
            let s: Vec<f64> = (0..plan.finest().len())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let back = plan.inverse(&plan.forward(&s).unwrap()).unwrap();
            worst = worst.max(max_abs_diff(&s, &back));
        }
    }
    let msg = format!(
        "{} hierarchies x 10 inputs, max round-trip error {worst:.2e} (tol {ROUND_TRIP_TOL:.0e})",
        fx.plans.len()
    );
    if worst < ROUND_TRIP_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn two_scale(fx: &Fixtures) -> Outcome {
    let xs = samples(1000);
    let mut worst = 0.0f64;
    let mut levels = 0;
    for (_, plan) in &fx.plans {
        for j in 0..plan.depth() {
            let r = two_scale_residual(
                plan.basis(j),
                plan.basis(j + 1),
                &plan.level(j).refinement,
                &xs,
            )
            .unwrap();
            worst = worst.max(r);
            levels += 1;
        }
    }
    let msg = format!("{levels} levels, max |Phi_j - Phi_j+1 H_j| {worst:.2e} (tol {TWO_SCALE_TOL:.0e})");
    if worst < TWO_SCALE_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Largest unscaled entry of `Delta H`.
fn absolute_jump_residual(delta: &JumpMatrix, h: &RefinementMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..delta.rows() {
        let row = delta.row(r);
        for k in 0..h.cols() {
            let s: f64 = (row.start..row.end()).map(|l| row.get(l) * h.get(l, k)).sum();
            worst = worst.max(s.abs());
        }
    }
    worst
}

fn refinement_conditions(fx: &Fixtures) -> Outcome {
    let mut row_sum = 0.0f64;
    let mut jumps = 0.0f64;
    let mut absolute = 0.0f64;
    let mut first_row_exact = true;
    for (_, plan) in &fx.plans {
        for j in 0..plan.depth() {
            let h = &plan.level(j).refinement;
            row_sum = row_sum.max(h.row_sum_deviation());
            let delta = JumpMatrix::new(plan.basis(j + 1));
            jumps = jumps.max(delta.annihilation_residual(h));
            absolute = absolute.max(absolute_jump_residual(&delta, h));
            first_row_exact &= h.get(0, 0) == 1.0 && (1..h.cols()).all(|k| h.get(0, k) == 0.0);
        }
    }
    let msg = format!(
        "row-sum deviation {row_sum:.2e} (tol {ROW_SUM_TOL:.0e}), relative jump residual {jumps:.2e} (tol {JUMP_TOL:.0e}, absolute {absolute:.2e}), first row exact: {first_row_exact}"
    );
    if row_sum < ROW_SUM_TOL && jumps < JUMP_TOL && first_row_exact {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Fits every coarse function by the fine basis on dense samples.
fn brute_force_refinement(coarse: &BrokenBasis, fine: &BrokenBasis) -> Matrix {
    let xs = samples(400);
    let design = Matrix::from_fn(xs.len(), fine.len(), |r, c| fine.evaluate(xs[r], 0).unwrap()[c]);
    let mut out = Matrix::zeros(fine.len(), coarse.len());
    for k in 0..coarse.len() {
        let target: Vec<f64> = xs.iter().map(|&x| coarse.evaluate(x, 0).unwrap()[k]).collect();
        let ls = least_squares(&design, &target);
        for (l, v) in ls.solution.iter().enumerate() {
            out[(l, k)] = *v;
        }
    }
    out
}

fn classical_oracles() -> Outcome {
    let cubic = cubic();
    let c = BrokenBasis::build(&cubic, &KnotGrid::uniform(9).unwrap()).unwrap();
    let f = BrokenBasis::build(&cubic, &KnotGrid::uniform(17).unwrap()).unwrap();
    let h = refinement_matrix(&c, &f).unwrap();
    let brute = brute_force_refinement(&c, &f);
    let mask = [0.125, 0.5, 0.75, 0.5, 0.125];
    let mut mask_err = 0.0f64;
    let mut brute_err = 0.0f64;
    for k in 3..=7 {
        for (d, w) in mask.iter().enumerate() {
            mask_err = mask_err.max((h.get(2 * k - 3 + d, k) - w).abs());
        }
    }
    for l in 0..h.rows() {
        for k in 0..h.cols() {
            brute_err = brute_err.max((h.get(l, k) - brute[(l, k)]).abs());
        }
    }

    let hats = SmoothFamily::powers(2).unwrap();
    let hier = KnotHierarchy::midpoint(KnotGrid::uniform(5).unwrap(), 1).unwrap();
    let plan = TransformPlan::new(&hats, &hier).unwrap();
    let lp = plan.level(0);
    let mut hat_err = 0.0f64;
    for k in 1..4 {
        for (d, w) in [0.5, 1.0, 0.5].iter().enumerate() {
            hat_err = hat_err.max((lp.refinement.get(2 * k - 1 + d, k) - w).abs());
        }
    }
    let mut update_err = 0.0f64;
    for m in 1..3 {
        for v in lp.details.final_update.coeffs[m] {
            update_err = update_err.max((v - 0.25).abs());
        }
    }
    let msg = format!(
        "cubic mask error {mask_err:.2e}, brute-force fit error {brute_err:.2e} (tol {MASK_TOL:.0e}); hat mask error {hat_err:.2e}, update [1/4, 1/4] error {update_err:.2e} (tol {HAT_TOL:.0e})"
    );
    if mask_err < MASK_TOL && brute_err < MASK_TOL && hat_err < HAT_TOL && update_err < HAT_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn factorization() -> Outcome {
    let expected = [(2, 0, 1), (3, 1, 0), (4, 1, 0), (5, 1, 1), (6, 1, 1), (7, 2, 0)];
    let mut rng = rng(99);
    let mut worst = 0.0f64;
    let mut params_ok = true;
    for (order, u, r) in expected {
        let (kind, gu, gr) = scheme_parameters(order);
        params_ok &= (gu, gr) == (u, r);
        let family = SmoothFamily::powers(order).unwrap();
        for _ in 0..5 {
            let h = random_hierarchy(&mut rng, order + 3, 2);
            let plan = TransformPlan::new(&family, &h).unwrap();
            for j in 0..plan.depth() {
                let lp = plan.level(j);
                params_ok &= lp.scheme.kind() == kind && lp.scheme.pairs() == u;
                params_ok &= lp.scheme.steps().len() == 2 * u + r;
                worst = worst.max(lp.scheme.reconstruct().max_abs_diff(&lp.split.eo));
            }
        }
    }
    let msg = format!(
        "orders 2..7, reconstruction error {worst:.2e} (tol {FACTOR_TOL:.0e}), (u, r) selection correct: {params_ok}"
    );
    if worst < FACTOR_TOL && params_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn vanishing_moments() -> Outcome {
    let gauss = GaussLegendre::new(12);
    let mut worst = 0.0f64;
    let mut exact = 0.0f64;
    let mut count = 0;
    for family in [cubic(), trig()] {
        let plan = TransformPlan::new(&family, &seven_knot_hierarchy(2)).unwrap();
        for j in 0..plan.depth() {
            let fine = plan.basis(j + 1);
            let table = fine.moments(1);
            let psi = plan.wavelets(j);
            for q in 0..2 {
                let m = psi.coefficients().transpose_mul_vec(&table.totals(q));
                worst = worst.max(m.iter().fold(0.0, |a, v| a.max(v.abs())));
                count += m.len();
            }
            // independent check: Gauss rule on the exact wavelet values
            let grid = fine.grid();
            for q in 0..2 {
                let mut direct = vec![0.0; psi.len()];
                for i in 0..grid.len() - 1 {
                    for (x, w) in gauss.mapped(grid.knot(i), grid.knot(i + 1)) {
                        let v = psi.evaluate(fine, x, 0).unwrap();
                        for (d, p) in direct.iter_mut().zip(&v) {
                            *d += w * p * x.powi(q);
                        }
                    }
                }
                exact = exact.max(direct.iter().fold(0.0, |a, v| a.max(v.abs())));
            }
        }
    }
    let msg = format!(
        "{count} wavelet moments (q = 0, 1; cubic and trig families), max {worst:.2e} on the Hermite surrogate, {exact:.2e} by direct quadrature (tol {MOMENT_TOL:.0e})"
    );
    if worst < MOMENT_TOL && exact < MOMENT_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn seven_knot_projection() -> Outcome {
    let grid = KnotGrid::new(SEVEN_KNOTS.to_vec()).unwrap();
    let target = SmoothFunction::cosine(1.0);
    let xs = samples(1000);
    let t = BrokenBasis::build(&trig(), &grid)
        .unwrap()
        .project(&target, &xs)
        .unwrap()
        .max_error();
    let s = BrokenBasis::build(&cubic(), &grid)
        .unwrap()
        .project(&target, &xs)
        .unwrap()
        .max_error();
    let msg = format!(
        "cos(2 pi x): trig basis max error {t:.2e} (tol {TRIG_PROJECTION_TOL:.0e}), cubic spline max error {s:.2e} (range [{:.0e}, {:.0e}])",
        SPLINE_PROJECTION_RANGE.0, SPLINE_PROJECTION_RANGE.1
    );
    if t < TRIG_PROJECTION_TOL && s >= SPLINE_PROJECTION_RANGE.0 && s <= SPLINE_PROJECTION_RANGE.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn span_annihilation() -> Outcome {
    let mut rng = rng(1234);
    let mut cases: Vec<(SmoothFamily, KnotHierarchy)> = vec![
        (cubic(), seven_knot_hierarchy(3)),
        (trig(), seven_knot_hierarchy(3)),
        (exponential(), seven_knot_hierarchy(3)),
    ];
    for order in 2..=5 {
        cases.push((SmoothFamily::powers(order).unwrap(), random_hierarchy(&mut rng, 7, 3)));
    }
    let mut worst = 0.0f64;
    let mut members = 0;
    for (family, hier) in &cases {
        let plan = TransformPlan::new(family, hier).unwrap();
        for w in family.members() {
            let f = |x: f64| w.derivative(x, 0);
            let p = plan.analyze_function(&f).unwrap();
            worst = worst.max(p.max_detail());
            members += 1;
        }
    }
    let msg = format!("{members} family members over {} hierarchies, max detail {worst:.2e} (tol {DETAIL_TOL:.0e})", cases.len());
    if worst < DETAIL_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn linear_complexity() -> Outcome {
    let mut rng = rng(55);
    let mut report = Vec::new();
    let mut ok = true;
    for order in 2..=5 {
        let family = SmoothFamily::powers(order).unwrap();
        let mut per_knot = Vec::new();
        for fine in [17usize, 33, 65] {
            let coarse = fine.div_ceil(2);
            let h = random_hierarchy(&mut rng, coarse, 1);
            let plan = TransformPlan::new(&family, &h).unwrap();
            let s: Vec<f64> = (0..plan.finest().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (_, _, ops) = plan.level(0).forward_counted(&s).unwrap();
            per_knot.push(ops as f64 / fine as f64);
        }
        let lo = per_knot.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = per_knot.iter().cloned().fold(0.0, f64::max);
        let spread = hi / lo - 1.0;
        ok &= spread <= LINEARITY_TOL;
        report.push(format!("order {order}: {:.2}/{:.2}/{:.2} ops per knot", per_knot[0], per_knot[1], per_knot[2]));
    }
    let msg = format!("{} (spread tol {:.0}%)", report.join(", "), LINEARITY_TOL * 100.0);
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let what = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {what}"))
    });
    match outcome {
        Ok(msg) => {
            println!("{label}: PASS  {msg}");
            true
        }
        Err(msg) => {
            println!("{label}: FAIL  {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    let fx = Fixtures::new();
    let results = [
        run("criterion 1 perfect reconstruction", || perfect_reconstruction(&fx)),
        run("criterion 2 two-scale residual", || two_scale(&fx)),
        run("criterion 3 row sums, jumps, first row", || refinement_conditions(&fx)),
        run("criterion 4 classical oracles", classical_oracles),
        run("criterion 5 lifting factorization", factorization),
        run("criterion 6 vanishing moments", vanishing_moments),
        run("criterion 7 projection of cos(2 pi x)", seven_knot_projection),
        run("criterion 8 span annihilation", span_annihilation),
        run("criterion 9 linear complexity", linear_complexity),
    ];
    if results.iter().all(|r| *r) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
