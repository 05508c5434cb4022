//! Weights `phi` and scale maps `a` of a Hausdorff operator, with the
//! admissibility checks `int phi = 1` and `phi |a|^{1/2} in L^1`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{HausError, Result};
use crate::quad::{integrate_with, Integrand, QuadOptions, Support};
use crate::scalar::Real;

/// Linearly interpolated weight, supported on the hull of its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeight<T> {
    nodes: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> TabulatedWeight<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(HausError::Parameter(format!(
                "tabulated weight needs >= 2 matching nodes and values (got {} and {})",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HausError::Parameter("tabulated nodes must be strictly increasing".into()));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(HausError::Parameter("tabulated weight has non-finite entries".into()));
        }
        Ok(Self { nodes, values })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lo(&self) -> T {
        self.nodes[0]
    }

    pub fn hi(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    fn interpolate(&self, t: T) -> Option<T> {
        if t < self.lo() || t > self.hi() {
            return None;
        }
        let i = self.nodes.partition_point(|x| *x <= t);
        if i == 0 {
            return Some(self.values[0]);
        }
        if i == self.nodes.len() {
            return Some(self.values[i - 1]);
        }
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        Some(y0 + (t - x0) / (x1 - x0) * (y1 - y0))
    }
}

/// The weight `phi`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec<T> {
    /// `(p-1)/(2|t|^p)` on `|t| > 1`, `p > 1`.
    PowerTail { p: T },
    /// `(1-p)/(2|t|^p)` on `0 < |t| < 1`, `p < 1/2`.
    PowerBump { p: T },
    /// Power bump with `p = 0`: the constant `1/2` on `|t| < 1`.
    AdjointHardy,
    /// `(1+alpha)(1-|t|)^alpha / 2` on `0 < |t| < 1`, `alpha > 0`.
    RiemannLiouville { alpha: T },
    Tabulated(TabulatedWeight<T>),
}

impl<T: Real> WeightSpec<T> {
    pub fn power_tail(p: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return Err(HausError::Parameter(format!("power-tail weight needs p > 1, got p = {p}")));
        }
        Ok(Self::PowerTail { p })
    }

    pub fn power_bump(p: T) -> Result<Self> {
        if !(p < T::lit(0.5)) || !p.is_finite() {
            return Err(HausError::Parameter(format!("power-bump weight needs p < 1/2, got p = {p}")));
        }
        Ok(Self::PowerBump { p })
    }

    pub fn adjoint_hardy() -> Self {
        Self::AdjointHardy
    }

    pub fn riemann_liouville(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(HausError::Parameter(format!(
                "riemann-liouville weight needs alpha > 0, got alpha = {alpha}"
            )));
        }
        Ok(Self::RiemannLiouville { alpha })
    }

    pub fn tabulated(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedWeight::new(nodes, values)?))
    }

    /// Exponent of the power-bump form, with the adjoint Hardy weight as `p = 0`.
    fn bump_exponent(&self) -> Option<T> {
        match self {
            Self::PowerBump { p } => Some(*p),
            Self::AdjointHardy => Some(T::zero()),
            _ => None,
        }
    }

    /// `phi(t)`; tabulated weights fail outside their table.
    pub fn eval(&self, t: T) -> Result<T> {
        match self {
            Self::Tabulated(tab) => tab.interpolate(t).ok_or(HausError::OutOfRange {
                what: t.as_f64(),
                lo: tab.lo().as_f64(),
                hi: tab.hi().as_f64(),
            }),
            _ => Ok(self.density(t)),
        }
    }

    /// `phi(t)` extended by zero outside the support.
    pub fn density(&self, t: T) -> T {
        let at = t.abs();
        let half = T::lit(0.5);
        match self {
            Self::PowerTail { p } => {
                if at > T::one() {
                    (*p - T::one()) * half / at.powf(*p)
                } else {
                    T::zero()
                }
            }
            Self::PowerBump { .. } | Self::AdjointHardy => {
                let p = self.bump_exponent().unwrap_or_default();
                if at > T::zero() && at < T::one() {
                    (T::one() - p) * half / at.powf(p)
                } else {
                    T::zero()
                }
            }
            Self::RiemannLiouville { alpha } => {
                if at > T::zero() && at < T::one() {
                    (T::one() + *alpha) * half * (T::one() - at).powf(*alpha)
                } else {
                    T::zero()
                }
            }
            Self::Tabulated(tab) => tab.interpolate(t).unwrap_or_else(T::zero),
        }
    }

    pub fn support(&self) -> Support<T> {
        match self {
            Self::PowerTail { .. } => Support::Symmetric {
                inner: T::one(),
                outer: T::infinity(),
            },
            Self::PowerBump { .. } | Self::AdjointHardy | Self::RiemannLiouville { .. } => Support::Symmetric {
                inner: T::zero(),
                outer: T::one(),
            },
            Self::Tabulated(tab) => Support::Interval {
                lo: tab.lo(),
                hi: tab.hi(),
            },
        }
    }

    /// Points where `phi` (or `phi` times a power of `|a|`) is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Self::PowerTail { .. } => vec![-T::one(), T::one()],
            Self::Tabulated(tab) => {
                let mut pts = tab.nodes.clone();
                if tab.lo() < T::zero() && tab.hi() > T::zero() {
                    pts.push(T::zero());
                }
                pts
            }
            _ => vec![-T::one(), T::zero(), T::one()],
        }
    }

    /// `|t|`-range `[lo, hi]` of the support (`hi` may be infinite).
    pub fn abs_support(&self) -> (T, T) {
        match self {
            Self::PowerTail { .. } => (T::one(), T::infinity()),
            Self::Tabulated(tab) => {
                let (lo, hi) = (tab.lo(), tab.hi());
                if lo <= T::zero() && hi >= T::zero() {
                    (T::zero(), lo.abs().max(hi.abs()))
                } else {
                    (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()))
                }
            }
            _ => (T::zero(), T::one()),
        }
    }

    /// `lim_{t -> 0+} phi(t)`, `None` when it is infinite.
    pub fn limit_at_zero(&self) -> Option<T> {
        let half = T::lit(0.5);
        match self {
            Self::PowerTail { .. } => Some(T::zero()),
            Self::PowerBump { p } => {
                if *p > T::zero() {
                    None
                } else if *p == T::zero() {
                    Some(half)
                } else {
                    Some(T::zero())
                }
            }
            Self::AdjointHardy => Some(half),
            Self::RiemannLiouville { alpha } => Some((T::one() + *alpha) * half),
            Self::Tabulated(tab) => Some(tab.interpolate(T::zero()).unwrap_or_else(T::zero)),
        }
    }

    /// True for the four analytic families (even, nonnegative by construction).
    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Tabulated(_))
    }

    /// Short family label used in reports and file names.
    pub fn family(&self) -> &'static str {
        match self {
            Self::PowerTail { .. } => "power-tail",
            Self::PowerBump { .. } => "power-bump",
            Self::AdjointHardy => "adjoint-hardy",
            Self::RiemannLiouville { .. } => "riemann-liouville",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

impl<T: Real> fmt::Display for WeightSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerTail { p } => write!(f, "power-tail(p={p})"),
            Self::PowerBump { p } => write!(f, "power-bump(p={p})"),
            Self::AdjointHardy => write!(f, "adjoint-hardy"),
            Self::RiemannLiouville { alpha } => write!(f, "riemann-liouville(alpha={alpha})"),
            Self::Tabulated(tab) => write!(f, "tabulated({} nodes)", tab.nodes.len()),
        }
    }
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// User-supplied odd scale map with `|a|` decreasing on `(0, inf)`.
#[derive(Clone)]
pub struct CustomScale<T> {
    map: ScalarFn<T>,
    inverse_abs: Option<ScalarFn<T>>,
}

impl<T> fmt::Debug for CustomScale<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomScale")
            .field("has_inverse", &self.inverse_abs.is_some())
            .finish()
    }
}

/// The scale map `a`.
#[derive(Debug, Clone)]
pub enum ScaleSpec<T> {
    /// `a(t) = 1/t`, `a(0) = 0`.
    Reciprocal,
    Custom(CustomScale<T>),
}

impl<T: Real> ScaleSpec<T> {
    /// Validates oddness (1e-12 relative) and strict decrease of `|a|` on a
    /// geometric sample of `(0, inf)`.
    pub fn custom<A, B>(map: A, inverse_abs: Option<B>) -> Result<Self>
    where
        A: Fn(T) -> T + Send + Sync + 'static,
        B: Fn(T) -> T + Send + Sync + 'static,
    {
        let mut prev: Option<T> = None;
        for k in -40..=40 {
            let t = T::lit(2f64.powf(k as f64 / 2.0));
            let (ap, an) = (map(t), map(-t));
            if !ap.is_finite() || !(ap.abs() > T::zero()) {
                return Err(HausError::Parameter(format!("|a({t})| must be positive and finite")));
            }
            if (ap + an).abs() > T::lit(1e-12) * ap.abs().max(T::one()) {
                return Err(HausError::Parameter(format!("scale map is not odd at t = {t}")));
            }
            if let Some(q) = prev {
                if !(ap.abs() < q) {
                    return Err(HausError::Parameter(format!(
                        "|a| is not strictly decreasing near t = {t}"
                    )));
                }
            }
            prev = Some(ap.abs());
        }
        Ok(Self::Custom(CustomScale {
            map: Arc::new(map),
            inverse_abs: inverse_abs.map(|b| Arc::new(b) as ScalarFn<T>),
        }))
    }

    pub fn eval(&self, t: T) -> T {
        match self {
            Self::Reciprocal => {
                if t == T::zero() {
                    T::zero()
                } else {
                    t.recip()
                }
            }
            Self::Custom(c) => (c.map)(t),
        }
    }

    pub fn has_inverse(&self) -> bool {
        match self {
            Self::Reciprocal => true,
            Self::Custom(c) => c.inverse_abs.is_some(),
        }
    }

    /// The `t > 0` with `|a(t)| = u`.
    pub fn abs_inverse(&self, u: T) -> Result<T> {
        match self {
            Self::Reciprocal => Ok(u.recip()),
            Self::Custom(c) => c
                .inverse_abs
                .as_ref()
                .map(|b| b(u))
                .ok_or_else(|| HausError::Unsupported("custom scale map has no inverse of |a|".into())),
        }
    }

    /// Derivative of [`Self::abs_inverse`]; central differences for custom maps.
    pub fn abs_inverse_derivative(&self, u: T) -> Result<T> {
        match self {
            Self::Reciprocal => Ok(-(u * u).recip()),
            Self::Custom(_) => {
                let h = u * T::lit(1e-5);
                Ok((self.abs_inverse(u + h)? - self.abs_inverse(u - h)?) / (h + h))
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Reciprocal => "reciprocal",
            Self::Custom(_) => "custom",
        }
    }
}

/// Result of [`check_admissibility`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport<T> {
    pub weight: String,
    pub scale: String,
    pub integral_phi: T,
    pub l1_phi: T,
    /// `int |phi| |a|^{1/2}`, `None` when divergent.
    pub l1_phi_sqrt_a: Option<T>,
    /// `int |phi| |a|`, `None` when divergent.
    pub l1_phi_a: Option<T>,
    pub sqrt_a_divergent: bool,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Tolerance on `|int phi - 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-8;

fn weighted_integral<T: Real, G: Fn(T) -> T>(w: &WeightSpec<T>, g: G) -> Result<T> {
    let mut singular = w.breakpoints();
    singular.push(T::zero());
    let integrand = Integrand {
        evaluator: |t: T| {
            let phi = w.density(t);
            if phi == T::zero() {
                T::zero()
            } else {
                phi * g(t)
            }
        },
        singular_points: singular,
        support: w.support(),
    };
    integrate_with(&integrand, &QuadOptions::admissibility()).map(|r| r.value)
}

/// Checks `int phi = 1` (within 1e-8) and `int |phi| |a|^{1/2} < inf`, and
/// records whether `int |phi| |a|` converges.
pub fn check_admissibility<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>) -> Result<AdmissibilityReport<T>> {
    let integral_phi = weighted_integral(w, |_| T::one())?;
    let l1_phi = if w.is_analytic() {
        integral_phi
    } else {
        integrate_with(
            &Integrand {
                evaluator: |t: T| w.density(t).abs(),
                singular_points: w.breakpoints(),
                support: w.support(),
            },
            &QuadOptions::admissibility(),
        )?
        .value
    };
    let mut notes = Vec::new();
    let sign = |t: T| if w.density(t) < T::zero() { -T::one() } else { T::one() };
    let l1_phi_sqrt_a = match weighted_integral(w, |t| sign(t) * a.eval(t).abs().sqrt()) {
        Ok(v) => Some(v),
        Err(HausError::Divergent { near }) => {
            notes.push(format!("int |phi| |a|^(1/2) diverges near t = {near}"));
            None
        }
        Err(HausError::ConvergenceFailure { estimate, .. }) => {
            notes.push(format!(
                "int |phi| |a|^(1/2) did not converge (last estimate {estimate})"
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let l1_phi_a = match weighted_integral(w, |t| sign(t) * a.eval(t).abs()) {
        Ok(v) => Some(v),
        Err(HausError::Divergent { near }) => {
            notes.push(format!(
                "int |phi| |a| diverges near t = {near}; the kernel has no finite value at s = 0"
            ));
            None
        }
        Err(HausError::ConvergenceFailure { .. }) => {
            notes.push("int |phi| |a| did not converge; treated as divergent".into());
            None
        }
        Err(e) => return Err(e),
    };
    if let (Some(_), None) = (l1_phi_sqrt_a, l1_phi_a) {
        notes.push("int |phi| |a|^(1/2) converges while int |phi| |a| diverges".into());
    }
    let normalized = (integral_phi - T::one()).abs() <= T::lit(NORMALIZATION_TOL);
    if !normalized {
        notes.push(format!("int phi = {integral_phi} differs from 1"));
    }
    let passed = normalized && l1_phi_sqrt_a.is_some_and(|v| v.is_finite());
    Ok(AdmissibilityReport {
        weight: w.to_string(),
        scale: a.label().to_string(),
        integral_phi,
        l1_phi,
        l1_phi_sqrt_a,
        l1_phi_a,
        sqrt_a_divergent: l1_phi_sqrt_a.is_none(),
        passed,
        notes,
    })
}

/// `int_{|a(t)| > |x|} phi(t) dt`, evaluated by quadrature over
/// `|t| < b(|x|)` where `b` inverts `|a|` on `(0, inf)`.
///
/// The boundary set `|a(t)| = |x|` has measure zero and is ignored.
pub fn scale_superlevel_measure<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>, x: T) -> Result<T> {
    let ax = x.abs();
    let radius = if ax == T::zero() {
        T::infinity()
    } else {
        a.abs_inverse(ax)?
    };
    let (lo, hi) = w.abs_support();
    let outer = radius.min(hi);
    if outer <= lo {
        return Ok(T::zero());
    }
    let support = match w {
        WeightSpec::Tabulated(tab) => Support::Interval {
            lo: tab.lo().max(-outer),
            hi: tab.hi().min(outer),
        },
        _ => Support::Symmetric { inner: lo, outer },
    };
    let integrand = Integrand {
        evaluator: |t: T| w.density(t),
        singular_points: w.breakpoints(),
        support,
    };
    Ok(integrate_with(&integrand, &QuadOptions::new(T::lit(1e-12), T::lit(1e-14)))?.value)
}

/// Density of the image of `phi dt` under `t -> |a(t)|`: for `u > 0`,
/// `rho(u) = (phi(b(u)) + phi(-b(u))) |b'(u)|` with `b = |a|^{-1}`, so that
/// `int phi(t) g(|a(t)|) dt = int_0^inf rho(u) g(u) du`.
pub fn pushforward_density<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>, u: T) -> Result<T> {
    if !(u > T::zero()) {
        return Ok(T::zero());
    }
    let t = a.abs_inverse(u)?;
    let mass = w.density(t) + w.density(-t);
    if mass == T::zero() {
        return Ok(T::zero());
    }
    Ok(mass * a.abs_inverse_derivative(u)?.abs())
}

/// `u`-range of [`pushforward_density`] and its interior breakpoints.
pub fn pushforward_support<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>) -> Result<(T, T, Vec<T>)> {
    let (tlo, thi) = w.abs_support();
    let to_u = |t: T| -> T {
        if t == T::zero() {
            T::infinity()
        } else if t.is_infinite() {
            T::zero()
        } else {
            a.eval(t).abs()
        }
    };
    let (ulo, uhi) = (to_u(thi), to_u(tlo));
    let mut breaks: Vec<T> = w
        .breakpoints()
        .into_iter()
        .filter(|t| *t > T::zero())
        .map(to_u)
        .filter(|u| *u > ulo && *u < uhi && u.is_finite())
        .collect();
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    breaks.dedup();
    if !a.has_inverse() {
        return Err(HausError::Unsupported("custom scale map has no inverse of |a|".into()));
    }
    Ok((ulo, uhi, breaks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_values() {
        let pt = WeightSpec::power_tail(2.0f64).unwrap();
        assert_eq!(pt.eval(2.0).unwrap(), 0.125);
        assert_eq!(pt.eval(-2.0).unwrap(), 0.125);
        assert_eq!(pt.eval(0.5).unwrap(), 0.0);
        let rl = WeightSpec::riemann_liouville(1.0f64).unwrap();
        assert_eq!(rl.eval(0.5).unwrap(), 0.5);
        assert_eq!(WeightSpec::<f64>::adjoint_hardy().eval(0.3).unwrap(), 0.5);
        let pb = WeightSpec::power_bump(0.25f64).unwrap();
        assert!((pb.eval(0.0625).unwrap() - 0.375 / 0.5).abs() < 1e-15);
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(WeightSpec::power_tail(1.0).is_err());
        assert!(WeightSpec::power_bump(0.6).is_err());
        assert!(WeightSpec::power_bump(0.5).is_err());
        assert!(WeightSpec::riemann_liouville(0.0).is_err());
        assert!(WeightSpec::power_tail(f64::NAN).is_err());
    }

    #[test]
    fn tabulated_out_of_range() {
        let w = WeightSpec::tabulated(vec![-1.0f64, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.5);
        assert!(matches!(w.eval(1.5), Err(HausError::OutOfRange { .. })));
        assert!(WeightSpec::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn reciprocal_scale() {
        let a = ScaleSpec::<f64>::Reciprocal;
        assert_eq!(a.eval(4.0), 0.25);
        assert_eq!(a.eval(0.0), 0.0);
        assert_eq!(a.abs_inverse(2.0).unwrap(), 0.5);
    }

    #[test]
    fn custom_scale_validation() {
        let ok = ScaleSpec::<f64>::custom(|t| t.signum() / t.abs().sqrt(), Some(|u: f64| 1.0 / (u * u)));
        assert!(ok.is_ok());
        let even = ScaleSpec::<f64>::custom(|t| 1.0 / t.abs(), None::<fn(f64) -> f64>);
        assert!(even.is_err());
        let increasing = ScaleSpec::<f64>::custom(|t| t, None::<fn(f64) -> f64>);
        assert!(increasing.is_err());
        let no_inv = ScaleSpec::<f64>::custom(|t| 1.0 / t, None::<fn(f64) -> f64>).unwrap();
        let w = WeightSpec::power_tail(2.0f64).unwrap();
        assert!(matches!(
            scale_superlevel_measure(&w, &no_inv, 0.5),
            Err(HausError::Unsupported(_))
        ));
    }

    #[test]
    fn custom_inverse_derivative_matches_reciprocal() {
        let c = ScaleSpec::<f64>::custom(|t| 1.0 / t, Some(|u: f64| 1.0 / u)).unwrap();
        let d = c.abs_inverse_derivative(2.0).unwrap();
        assert!((d + 0.25).abs() < 1e-9);
    }

    #[test]
    fn admissibility_power_tail() {
        let w = WeightSpec::power_tail(2.0f64).unwrap();
        let r = check_admissibility(&w, &ScaleSpec::Reciprocal).unwrap();
        assert!(r.passed);
        assert!((r.integral_phi - 1.0).abs() < 1e-10);
        assert!((r.l1_phi_sqrt_a.unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((r.l1_phi_a.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn admissibility_riemann_liouville_flags_divergence() {
        let w = WeightSpec::riemann_liouville(1.0f64).unwrap();
        let r = check_admissibility(&w, &ScaleSpec::Reciprocal).unwrap();
        assert!(r.passed);
        // 2 int_0^1 (1-t) t^{-1/2} dt = 2 B(1/2, 2) = 8/3
        assert!((r.l1_phi_sqrt_a.unwrap() - 8.0 / 3.0).abs() < 1e-8);
        assert!(r.l1_phi_a.is_none());
        assert!(r.notes.iter().any(|n| n.contains("diverges")));
    }

    #[test]
    fn superlevel_examples() {
        let a = ScaleSpec::Reciprocal;
        let pt = WeightSpec::power_tail(2.0f64).unwrap();
        assert!((scale_superlevel_measure(&pt, &a, 0.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((scale_superlevel_measure(&pt, &a, 0.5).unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(scale_superlevel_measure(&pt, &a, 2.0).unwrap(), 0.0);
        let ah = WeightSpec::<f64>::adjoint_hardy();
        assert!((scale_superlevel_measure(&ah, &a, 2.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pushforward_of_power_tail_two_is_flat() {
        let w = WeightSpec::power_tail(2.0f64).unwrap();
        let a = ScaleSpec::Reciprocal;
        for u in [0.1, 0.5, 0.9] {
            assert!((pushforward_density(&w, &a, u).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(pushforward_density(&w, &a, 1.5).unwrap(), 0.0);
        let (lo, hi, _) = pushforward_support(&w, &a).unwrap();
        assert_eq!((lo, hi), (0.0, 1.0));
        let (lo, hi, _) = pushforward_support(&WeightSpec::riemann_liouville(1.0f64).unwrap(), &a).unwrap();
        assert_eq!(lo, 1.0);
        assert!(hi.is_infinite());
    }
}
