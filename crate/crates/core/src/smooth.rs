//! Smooth building functions and the families they form.
//!
//! A family `[w_0 .. w_{m-1}]` supplies the segments that are welded into a
//! broken basis. Every analytic kind differentiates in closed form; the
//! tabulated kind carries values and derivatives on a fixed grid only.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Lu, Matrix};

/// Slack on the `[0, 1]` domain check, absorbing rounding in mapped points.
const DOMAIN_SLACK: f64 = 1e-12;
/// Grid-point matching tolerance for tabulated functions.
const TABLE_MATCH: f64 = 1e-12;
/// Threshold on the reciprocal condition estimate of collocation blocks.
pub const RCOND_MIN: f64 = 1e-10;

/// Values and derivatives `0..orders` of one function on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    grid: Vec<f64>,
    // derivs[p][r]: r-th derivative at grid[p]
    derivs: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(grid: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        if grid.len() != derivs.len() || grid.is_empty() {
            return Err(Error::InvalidFamily(
                "tabulated grid and data lengths differ".to_string(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFamily(
                "tabulated grid must be strictly increasing".to_string(),
            ));
        }
        let orders = derivs[0].len();
        if orders == 0 || derivs.iter().any(|d| d.len() != orders) {
            return Err(Error::InvalidFamily(
                "tabulated data must hold the same number of derivatives at every point"
                    .to_string(),
            ));
        }
        Ok(Self { grid, derivs })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Number of stored derivative orders (value included).
    pub fn orders(&self) -> usize {
        self.derivs[0].len()
    }

    fn lookup(&self, x: f64) -> Option<usize> {
        let i = self.grid.partition_point(|g| *g < x - TABLE_MATCH);
        (i < self.grid.len() && (self.grid[i] - x).abs() <= TABLE_MATCH).then_some(i)
    }
}

/// One member `w_q` of a building family.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothFunction {
    /// `x^degree`
    Power { degree: u32 },
    /// `(x - center)^degree`
    CenteredPower { degree: u32, center: f64 },
    /// `sin(2 pi freq x)`
    Sine { freq: f64 },
    /// `cos(2 pi freq x)`
    Cosine { freq: f64 },
    /// `exp(rate x)`
    Exponential { rate: f64 },
    /// Grid data only; values between grid points come from Hermite
    /// interpolation in the basis.
    Tabulated(Arc<Table>),
}

impl SmoothFunction {
    pub fn power(degree: u32) -> Self {
        Self::Power { degree }
    }

    pub fn centered_power(degree: u32, center: f64) -> Self {
        Self::CenteredPower { degree, center }
    }

    pub fn sine(freq: f64) -> Self {
        Self::Sine { freq }
    }

    pub fn cosine(freq: f64) -> Self {
        Self::Cosine { freq }
    }

    pub fn exponential(rate: f64) -> Self {
        Self::Exponential { rate }
    }

    pub fn tabulated(table: Table) -> Self {
        Self::Tabulated(Arc::new(table))
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Tabulated(_))
    }

    /// Highest derivative order available, `None` if unbounded.
    pub fn max_derivative(&self) -> Option<usize> {
        match self {
            Self::Tabulated(t) => Some(t.orders() - 1),
            _ => None,
        }
    }

    /// `r`-th derivative at `x`.
    pub fn derivative(&self, x: f64, r: usize) -> Result<f64> {
        if !(x >= -DOMAIN_SLACK && x <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::Domain { x });
        }
        Ok(match self {
            Self::Power { degree } => power_derivative(*degree, x, r),
            Self::CenteredPower { degree, center } => power_derivative(*degree, x - center, r),
            Self::Sine { freq } => {
                let w = 2.0 * PI * freq;
                let (s, c) = (w * x).sin_cos();
                let v = match r % 4 {
                    0 => s,
                    1 => c,
                    2 => -s,
                    _ => -c,
                };
                w.powi(r as i32) * v
            }
            Self::Cosine { freq } => {
                let w = 2.0 * PI * freq;
                let (s, c) = (w * x).sin_cos();
                let v = match r % 4 {
                    0 => c,
                    1 => -s,
                    2 => -c,
                    _ => s,
                };
                w.powi(r as i32) * v
            }
            Self::Exponential { rate } => rate.powi(r as i32) * (rate * x).exp(),
            Self::Tabulated(t) => {
                if r >= t.orders() {
                    return Err(Error::DerivativeOrder {
                        requested: r,
                        available: t.orders() - 1,
                    });
                }
                let p = t.lookup(x).ok_or(Error::UnsupportedPoint { x })?;
                t.derivs[p][r]
            }
        })
    }

    fn is_power(&self, d: u32) -> bool {
        matches!(self, Self::Power { degree } if *degree == d)
    }
}

fn power_derivative(degree: u32, t: f64, r: usize) -> f64 {
    let d = degree as usize;
    if r > d {
        return 0.0;
    }
    let mut coeff = 1.0;
    for k in 0..r {
        coeff *= (d - k) as f64;
    }
    coeff * t.powi((d - r) as i32)
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Ordered building set `[w_0 .. w_{m-1}]` of order `m >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFamily {
    members: Vec<SmoothFunction>,
}

impl SmoothFamily {
    pub fn new(members: Vec<SmoothFunction>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidFamily(
                "order must be at least 2".to_string(),
            ));
        }
        for m in &members {
            match m {
                SmoothFunction::Sine { freq } | SmoothFunction::Cosine { freq }
                    if !(freq.is_finite() && *freq > 0.0) =>
                {
                    return Err(Error::InvalidFamily(
                        "trigonometric frequency must be positive".to_string(),
                    ))
                }
                SmoothFunction::Exponential { rate } if !rate.is_finite() => {
                    return Err(Error::InvalidFamily("exponential rate must be finite".to_string()))
                }
                SmoothFunction::CenteredPower { center, .. }
                    if !(0.0..=1.0).contains(center) =>
                {
                    return Err(Error::InvalidFamily(
                        "power center must lie in [0, 1]".to_string(),
                    ))
                }
                SmoothFunction::Tabulated(t) if t.orders() < members.len() => {
                    return Err(Error::InvalidFamily(
                        "tabulated member must carry derivatives up to order - 1".to_string(),
                    ))
                }
                _ => {}
            }
        }
        Ok(Self { members })
    }

    /// `[1, x, .., x^(order-1)]`, the B-spline building set.
    pub fn powers(order: usize) -> Result<Self> {
        Self::new((0..order as u32).map(SmoothFunction::power).collect())
    }

    /// `[1, x, sin(2 pi f x), cos(2 pi f x)]`.
    pub fn trigonometric(freq: f64) -> Result<Self> {
        Self::new(vec![
            SmoothFunction::power(0),
            SmoothFunction::power(1),
            SmoothFunction::sine(freq),
            SmoothFunction::cosine(freq),
        ])
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[SmoothFunction] {
        &self.members
    }

    pub fn is_analytic(&self) -> bool {
        self.members.iter().all(SmoothFunction::is_analytic)
    }

    /// True when the first two members are `1` and `x`.
    pub fn starts_with_affine(&self) -> bool {
        let one = matches!(
            self.members[0],
            SmoothFunction::Power { degree: 0 } | SmoothFunction::CenteredPower { degree: 0, .. }
        );
        one && self.members[1].is_power(1)
    }

    fn max_allowed_derivative(&self) -> usize {
        let m = self.order();
        self.members
            .iter()
            .filter_map(SmoothFunction::max_derivative)
            .fold(2 * m, usize::min)
    }

    /// Entry `(r, q)` is the `r`-th derivative of `w_q` at `x`.
    pub fn evaluate(&self, x: f64, max_deriv: usize) -> Result<Matrix> {
        let allowed = self.max_allowed_derivative();
        if max_deriv > allowed {
            return Err(Error::DerivativeOrder {
                requested: max_deriv,
                available: allowed,
            });
        }
        let mut out = Matrix::zeros(max_deriv + 1, self.order());
        for (q, f) in self.members.iter().enumerate() {
            for r in 0..=max_deriv {
                out[(r, q)] = f.derivative(x, r)?;
            }
        }
        Ok(out)
    }

    /// Row vector of `r`-th derivatives at `x`.
    pub fn derivative_row(&self, x: f64, r: usize, out: &mut [f64]) -> Result<()> {
        for (o, f) in out.iter_mut().zip(&self.members) {
            *o = f.derivative(x, r)?;
        }
        Ok(())
    }

    /// Re-centers power members at `center`, keeping the span. A power of
    /// degree `d` is only re-centered when all lower powers are members, so
    /// the shift stays inside the family; other kinds are left alone.
    pub fn localize(&self, center: f64) -> SmoothFamily {
        let members = self
            .members
            .iter()
            .map(|f| match f {
                SmoothFunction::Power { degree } if *degree > 0 && self.has_powers_up_to(*degree) => {
                    SmoothFunction::CenteredPower {
                        degree: *degree,
                        center,
                    }
                }
                other => other.clone(),
            })
            .collect();
        SmoothFamily { members }
    }

    fn has_powers_up_to(&self, degree: u32) -> bool {
        (0..=degree).all(|d| self.members.iter().any(|f| f.is_power(d)))
    }

    fn power_index(&self, degree: u32) -> Option<usize> {
        self.members.iter().position(|f| f.is_power(degree))
    }

    /// Matrix `L` with `localize(center) = Omega * L` (columns hold each
    /// local member in the coordinates of this family).
    pub fn localization_matrix(&self, center: f64) -> Matrix {
        let m = self.order();
        let mut l = Matrix::zeros(m, m);
        for (q, f) in self.members.iter().enumerate() {
            match f {
                SmoothFunction::Power { degree } if *degree > 0 && self.has_powers_up_to(*degree) => {
                    for k in 0..=*degree {
                        let idx = self.power_index(k).expect("checked above");
                        l[(idx, q)] +=
                            binomial(*degree, k) * (-center).powi((*degree - k) as i32);
                    }
                }
                _ => l[(q, q)] = 1.0,
            }
        }
        l
    }

    /// Reciprocal condition estimate of the Wronskian-type block of
    /// derivatives `0..order` at `x`.
    pub fn collocation_rcond(&self, x: f64) -> Result<f64> {
        let w = self.evaluate(x, self.order() - 1)?;
        Ok(Lu::new(&w).rcond())
    }

    /// Relative least-squares residual of `Omega(alpha x + beta) ~ Omega(x) A`.
    /// Zero means the family is closed under this affine map.
    pub fn closure_residual(&self, alpha: f64, beta: f64, sample_count: usize) -> Result<f64> {
        let m = self.order();
        if !(alpha > 0.0) {
            return Err(Error::InvalidFamily("dilation must be positive".to_string()));
        }
        if sample_count < 4 * m {
            return Err(Error::InvalidFamily(
                "closure check needs at least 4 * order samples".to_string(),
            ));
        }
        // x in [0,1] with alpha x + beta in [0,1]
        let lo = 0.0f64.max(-beta / alpha);
        let hi = 1.0f64.min((1.0 - beta) / alpha);
        if !(hi > lo) {
            return Err(Error::InvalidFamily(
                "affine image does not intersect [0, 1]".to_string(),
            ));
        }
        let xs: Vec<f64> = (0..sample_count)
            .map(|s| lo + (hi - lo) * s as f64 / (sample_count - 1) as f64)
            .collect();
        let mut design = Matrix::zeros(sample_count, m);
        let mut row = vec![0.0; m];
        for (s, &x) in xs.iter().enumerate() {
            self.derivative_row(x, 0, &mut row)?;
            design.row_mut(s).copy_from_slice(&row);
        }
        let mut total = 0.0;
        let mut resid = 0.0;
        for q in 0..m {
            let target: Vec<f64> = xs
                .iter()
                .map(|x| self.members[q].derivative((alpha * x + beta).clamp(0.0, 1.0), 0))
                .collect::<Result<_>>()?;
            let ls = least_squares(&design, &target);
            if ls.rdiag_ratio < RCOND_MIN {
                return Err(Error::Conditioning {
                    context: "closure design",
                    index: Some(q),
                    rcond: ls.rdiag_ratio,
                });
            }
            resid += ls.residual * ls.residual;
            total += target.iter().map(|v| v * v).sum::<f64>();
        }
        Ok(if total > 0.0 { (resid / total).sqrt() } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig() -> SmoothFamily {
        SmoothFamily::trigonometric(1.0).unwrap()
    }

    #[test]
    fn cubic_powers_at_half() {
        let f = SmoothFamily::powers(4).unwrap();
        let v = f.evaluate(0.5, 0).unwrap();
        assert_eq!(v.row(0), &[1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn sine_slope_at_origin() {
        let s = SmoothFunction::sine(1.0);
        assert!((s.derivative(0.0, 1).unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn centered_power_taylor_coefficients() {
        let f = SmoothFunction::centered_power(2, 0.3);
        assert_eq!(f.derivative(0.3, 0).unwrap(), 0.0);
        assert_eq!(f.derivative(0.3, 1).unwrap(), 0.0);
        assert_eq!(f.derivative(0.3, 2).unwrap(), 2.0);
        assert_eq!(f.derivative(0.3, 3).unwrap(), 0.0);
    }

    #[test]
    fn domain_and_table_errors() {
        let f = SmoothFamily::powers(2).unwrap();
        assert!(matches!(f.evaluate(1.5, 0), Err(Error::Domain { .. })));
        assert!(matches!(f.evaluate(-0.1, 0), Err(Error::Domain { .. })));
        let t = Table::new(vec![0.0, 0.5, 1.0], vec![vec![1.0, 0.0]; 3]).unwrap();
        let tf = SmoothFunction::tabulated(t);
        assert_eq!(tf.derivative(0.5, 1).unwrap(), 0.0);
        assert!(matches!(
            tf.derivative(0.25, 0),
            Err(Error::UnsupportedPoint { .. })
        ));
        assert!(matches!(
            tf.derivative(0.5, 2),
            Err(Error::DerivativeOrder { .. })
        ));
    }

    #[test]
    fn order_one_rejected() {
        assert!(SmoothFamily::powers(1).is_err());
        assert!(SmoothFamily::new(vec![SmoothFunction::sine(0.0), SmoothFunction::power(0)]).is_err());
    }

    #[test]
    fn localize_powers() {
        let f = SmoothFamily::powers(3).unwrap().localize(0.4);
        assert_eq!(
            f.members(),
            &[
                SmoothFunction::power(0),
                SmoothFunction::centered_power(1, 0.4),
                SmoothFunction::centered_power(2, 0.4)
            ]
        );
    }

    #[test]
    fn localize_keeps_trig() {
        let f = trig().localize(0.5);
        assert_eq!(
            f.members(),
            &[
                SmoothFunction::power(0),
                SmoothFunction::centered_power(1, 0.5),
                SmoothFunction::sine(1.0),
                SmoothFunction::cosine(1.0)
            ]
        );
    }

    #[test]
    fn localize_at_zero_is_same_functions() {
        let f = SmoothFamily::powers(4).unwrap();
        let l = f.localize(0.0);
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(f.evaluate(x, 3).unwrap(), l.evaluate(x, 3).unwrap());
        }
        assert_eq!(f.localization_matrix(0.0), Matrix::identity(4));
    }

    #[test]
    fn localization_matrix_reproduces_local_members() {
        let f = SmoothFamily::new(vec![
            SmoothFunction::power(0),
            SmoothFunction::power(1),
            SmoothFunction::power(2),
            SmoothFunction::exponential(0.7),
        ])
        .unwrap();
        let c = 0.35;
        let loc = f.localize(c);
        let l = f.localization_matrix(c);
        for x in [0.0, 0.2, 0.9] {
            let g = f.evaluate(x, 2).unwrap().mul(&l);
            let h = loc.evaluate(x, 2).unwrap();
            for r in 0..3 {
                for q in 0..4 {
                    assert!((g[(r, q)] - h[(r, q)]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn closure_of_polynomials_and_identity() {
        let p = SmoothFamily::powers(4).unwrap();
        assert!(p.closure_residual(0.5, 0.25, 64).unwrap() < 1e-12);
        assert!(trig().closure_residual(1.0, 0.0, 64).unwrap() < 1e-12);
    }

    #[test]
    fn trig_not_closed_under_dilation() {
        let r = trig().closure_residual(0.5, 0.0, 64).unwrap();
        assert!(r > 1e-3, "residual {r}");
    }

    #[test]
    fn collocation_is_well_conditioned() {
        assert!(trig().collocation_rcond(0.3).unwrap() > RCOND_MIN);
        assert!(SmoothFamily::powers(5).unwrap().collocation_rcond(1.0).unwrap() > RCOND_MIN);
    }
}
