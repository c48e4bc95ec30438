#![allow(dead_code)]

use bbw_core::{KnotGrid, KnotHierarchy, SmoothFamily, SmoothFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Seven nonequispaced knots shared by the cubic and trig examples.
pub const SEVEN_KNOTS: [f64; 7] = [0.0, 0.12, 0.3, 0.45, 0.62, 0.8, 1.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random grid with `count` knots whose gaps vary by a factor of at most 3.
pub fn random_grid(rng: &mut ChaCha8Rng, count: usize) -> KnotGrid {
    let gaps: Vec<f64> = (0..count - 1).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = gaps.iter().sum();
    let mut knots = Vec::with_capacity(count);
    let mut acc = 0.0;
    knots.push(0.0);
    for g in &gaps[..count - 2] {
        acc += g / total;
        knots.push(acc);
    }
    knots.push(1.0);
    KnotGrid::new(knots).unwrap()
}

/// Hierarchy starting from `coarse` with `refinements` random insertions,
/// each new knot at a ratio in `[0.25, 0.75]` of its interval.
pub fn random_refinements(rng: &mut ChaCha8Rng, coarse: KnotGrid, refinements: usize) -> KnotHierarchy {
    let mut levels = vec![coarse];
    for _ in 0..refinements {
        let last = levels.last().unwrap();
        let ratios: Vec<f64> = (0..last.interval_count())
            .map(|_| rng.gen_range(0.25..0.75))
            .collect();
        let next = last.refine_with(&ratios).unwrap();
        levels.push(next);
    }
    KnotHierarchy::new(levels).unwrap()
}

pub fn random_hierarchy(rng: &mut ChaCha8Rng, coarse: usize, refinements: usize) -> KnotHierarchy {
    let g = random_grid(rng, coarse);
    random_refinements(rng, g, refinements)
}

pub fn seven_knot_hierarchy(refinements: usize) -> KnotHierarchy {
    KnotHierarchy::midpoint(KnotGrid::new(SEVEN_KNOTS.to_vec()).unwrap(), refinements).unwrap()
}

pub fn cubic() -> SmoothFamily {
    SmoothFamily::powers(4).unwrap()
}

pub fn trig() -> SmoothFamily {
    SmoothFamily::trigonometric(1.0).unwrap()
}

pub fn exponential() -> SmoothFamily {
    SmoothFamily::new(vec![
        SmoothFunction::power(0),
        SmoothFunction::power(1),
        SmoothFunction::exponential(1.5),
    ])
    .unwrap()
}

pub fn samples(count: usize) -> Vec<f64> {
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
