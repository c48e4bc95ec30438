mod common;

use bbw_core::refinement::{knot_residual, refinement_matrix};
use bbw_core::{BrokenBasis, Error, KnotGrid, KnotHierarchy, SmoothFamily, TransformPlan};
use common::*;
use proptest::prelude::*;

fn grid_strategy(min: usize, max: usize) -> impl Strategy<Value = KnotGrid> {
    prop::collection::vec(0.3f64..1.7, min - 1..max).prop_map(|gaps| {
        let total: f64 = gaps.iter().sum();
        let mut knots = vec![0.0];
        let mut acc = 0.0;
        for g in &gaps[..gaps.len() - 1] {
            acc += g / total;
            knots.push(acc);
        }
        knots.push(1.0);
        KnotGrid::new(knots).unwrap()
    })
}

fn hierarchy_strategy(order: usize) -> impl Strategy<Value = KnotHierarchy> {
    (
        grid_strategy(order + 2, order + 6),
        prop::collection::vec(0.2f64..0.8, 64),
        prop::collection::vec(0.2f64..0.8, 128),
    )
        .prop_map(|(g, r1, r2)| {
            let g1 = g.refine_with(&r1[..g.interval_count()]).unwrap();
            let g2 = g1.refine_with(&r2[..g1.interval_count()]).unwrap();
            KnotHierarchy::new(vec![g, g1, g2]).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_of_unity(order in 2usize..=5, grid in grid_strategy(7, 12), x in 0.0f64..=1.0) {
        let b = BrokenBasis::build(&SmoothFamily::powers(order).unwrap(), &grid).unwrap();
        let sum: f64 = b.evaluate(x, 0).unwrap().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn only_first_function_at_left_end(order in 2usize..=5, grid in grid_strategy(7, 12)) {
        let b = BrokenBasis::build(&SmoothFamily::powers(order).unwrap(), &grid).unwrap();
        let v = b.evaluate(0.0, 0).unwrap();
        prop_assert!((v[0] - 1.0).abs() < 1e-12);
        prop_assert!(v[1..].iter().all(|x| x.abs() < 1e-12));
        let w = b.evaluate(1.0, 0).unwrap();
        prop_assert!((w[w.len() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smoothness_at_interior_knots(order in 2usize..=5, grid in grid_strategy(7, 12)) {
        let b = BrokenBasis::build(&SmoothFamily::powers(order).unwrap(), &grid).unwrap();
        prop_assert!(b.max_continuity_defect() < 1e-9);
        prop_assert!(b.max_boundary_defect() < 1e-9);
    }

    #[test]
    fn expansion_reproduces_family(grid in grid_strategy(7, 10), x in 0.0f64..=1.0) {
        let family = trig();
        let b = BrokenBasis::build(&family, &grid).unwrap();
        let phi = b.evaluate(x, 0).unwrap();
        let a = b.expansion_matrix();
        for (q, w) in family.members().iter().enumerate() {
            let v: f64 = phi.iter().enumerate().map(|(k, p)| p * a[(k, q)]).sum();
            prop_assert!((v - w.derivative(x, 0).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn refinement_satisfies_knot_conditions(order in 2usize..=5, h in hierarchy_strategy(5)) {
        let family = SmoothFamily::powers(order).unwrap();
        let c = BrokenBasis::build(&family, h.level(0)).unwrap();
        let f = BrokenBasis::build(&family, h.level(1)).unwrap();
        let m = refinement_matrix(&c, &f).unwrap();
        let (res, _) = knot_residual(&c, &f, &m).unwrap();
        prop_assert!(res < 1e-8);
        prop_assert!(m.row_sum_deviation() < 1e-10);
    }

    #[test]
    fn round_trip(order in 2usize..=5, h in hierarchy_strategy(5), seed in any::<u64>()) {
        use rand::Rng;
        let plan = TransformPlan::new(&SmoothFamily::powers(order).unwrap(), &h).unwrap();
        let mut r = rng(seed);
        let s: Vec<f64> = (0..plan.finest().len()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let p = plan.forward(&s).unwrap();
        prop_assert_eq!(p.len(), s.len());
        let back = plan.inverse(&p).unwrap();
        prop_assert!(max_abs_diff(&s, &back) < 1e-9);
    }

    #[test]
    fn step_synthesis_is_inverse_of_analysis(order in 2usize..=4, h in hierarchy_strategy(4)) {
        let plan = TransformPlan::new(&SmoothFamily::powers(order).unwrap(), &h).unwrap();
        let lp = plan.level(1);
        let m = lp.synthesis_matrix().unwrap();
        for c in 0..lp.fine_len() {
            let mut e = vec![0.0; lp.fine_len()];
            e[c] = 1.0;
            let (s, d, _) = lp.forward_counted(&e).unwrap();
            let mut col = s;
            col.extend(d);
            let back = m.mul_vec(&col);
            prop_assert!(max_abs_diff(&back, &e) < 1e-10);
        }
    }
}

#[test]
fn plan_rejects_small_coarse_grid() {
    let h = KnotHierarchy::midpoint(KnotGrid::uniform(4).unwrap(), 1).unwrap();
    let err = TransformPlan::new(&cubic(), &h).unwrap_err();
    assert!(matches!(err, Error::GridTooSmall { knots: 4, required: 5 }));
    let hats = KnotHierarchy::midpoint(KnotGrid::uniform(3).unwrap(), 1).unwrap();
    let plan = TransformPlan::new(&SmoothFamily::powers(2).unwrap(), &hats).unwrap();
    assert_eq!(plan.level(0).detail_len(), 2);
}

#[test]
fn plan_rejects_family_without_affine_prefix() {
    let family = SmoothFamily::new(vec![
        bbw_core::SmoothFunction::power(0),
        bbw_core::SmoothFunction::power(2),
    ])
    .unwrap();
    let h = seven_knot_hierarchy(1);
    assert!(matches!(
        TransformPlan::new(&family, &h),
        Err(Error::InvalidFamily(_))
    ));
}

#[test]
fn exponential_family_annihilated() {
    let family = exponential();
    let plan = TransformPlan::new(&family, &seven_knot_hierarchy(2)).unwrap();
    let f = |x: f64| Ok(2.0 - x + 0.5 * (1.5 * x).exp());
    assert!(plan.analyze_function(&f).unwrap().max_detail() < 1e-8);
    let g = |x: f64| Ok((5.0 * x).sin());
    assert!(plan.analyze_function(&g).unwrap().max_detail() > 1e-4);
}

#[test]
fn hat_basis_on_three_knots() {
    let g = KnotGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
    let b = BrokenBasis::build(&SmoothFamily::powers(2).unwrap(), &g).unwrap();
    let v = b.evaluate(0.25, 0).unwrap();
    assert!(max_abs_diff(&v, &[0.5, 0.5, 0.0]) < 1e-14);
}
