//! Hausdorff operators `H f(x) = int phi(t) |a(t)| f(a(t) x) dt` and their
//! partial integrals
//!
//! ```text
//! F_eps(x) = (1/pi) int phi(t) int f(x - eps s) sin(|a(t)| s) / s ds dt = (K_eps * f)(x)
//! ```
//!
//! with `K_eps(s) = K(s/eps)/eps` and multiplier `K^(x) = int_{|a(t)| > |x|} phi(t) dt`.
//!
//! All kernel integrals are taken in `u = |a(t)|` against the pushforward
//! density of `phi` (see [`pushforward_density`]), which turns the
//! oscillation `sin(u s)` into a fixed frequency.

use rayon::prelude::*;

use crate::error::{HausError, Result};
use crate::quad::{integrate_oscillatory_with, integrate_with, Integrand, QuadOptions, Support};
use crate::scalar::Real;
use crate::signal::{forward_fourier, inverse_fourier, lp_norm, spectral_leakage, SampledSignal};
use crate::weights::{
    check_admissibility, pushforward_density, pushforward_support, scale_superlevel_measure, AdmissibilityReport,
    ScaleSpec, WeightSpec,
};

/// Leakage above which spectral results carry a grid warning.
pub const LEAKAGE_WARN: f64 = 1e-6;

/// Largest tolerated gap between a closed-form multiplier and quadrature.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

/// Weight, scale and `eps`, validated for admissibility on construction.
#[derive(Debug, Clone)]
pub struct OperatorConfig<T> {
    weight: WeightSpec<T>,
    scale: ScaleSpec<T>,
    epsilon: T,
    admissibility: AdmissibilityReport<T>,
}

impl<T: Real> OperatorConfig<T> {
    pub fn new(weight: WeightSpec<T>, scale: ScaleSpec<T>, epsilon: T) -> Result<Self> {
        check_epsilon(epsilon)?;
        let admissibility = check_admissibility(&weight, &scale)?;
        if !admissibility.passed {
            return Err(HausError::Parameter(format!(
                "{} with {} scale is not admissible: {}",
                weight,
                scale.label(),
                admissibility.notes.join("; ")
            )));
        }
        Ok(Self {
            weight,
            scale,
            epsilon,
            admissibility,
        })
    }

    /// Same weight and scale at a different `eps`, skipping the admissibility quadrature.
    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            ..self.clone()
        })
    }

    pub fn weight(&self) -> &WeightSpec<T> {
        &self.weight
    }

    pub fn scale(&self) -> &ScaleSpec<T> {
        &self.scale
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn admissibility(&self) -> &AdmissibilityReport<T> {
        &self.admissibility
    }

    /// `||phi||_1`.
    pub fn l1_phi(&self) -> T {
        self.admissibility.l1_phi
    }

    /// True when the reciprocal-scale closed form of `K^` applies.
    pub fn has_closed_form(&self) -> bool {
        self.weight.is_analytic() && matches!(self.scale, ScaleSpec::Reciprocal)
    }
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(HausError::Parameter(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    Ok(())
}

/// Closed form of `K^` for the analytic families under `a(t) = 1/t`.
fn closed_form_multiplier<T: Real>(w: &WeightSpec<T>, x: T) -> Option<T> {
    let ax = x.abs();
    let inside = ax <= T::one();
    Some(match w {
        WeightSpec::PowerTail { p } => {
            if inside {
                T::one() - ax.powf(*p - T::one())
            } else {
                T::zero()
            }
        }
        WeightSpec::PowerBump { p } => {
            if inside {
                T::one()
            } else {
                ax.powf(*p - T::one())
            }
        }
        WeightSpec::AdjointHardy => {
            if inside {
                T::one()
            } else {
                ax.recip()
            }
        }
        WeightSpec::RiemannLiouville { alpha } => {
            if inside {
                T::one()
            } else {
                T::one() - (T::one() - ax.recip()).powf(T::one() + *alpha)
            }
        }
        WeightSpec::Tabulated(_) => return None,
    })
}

/// `K^(x)`, by closed form when available and by quadrature otherwise.
pub fn multiplier_eval<T: Real>(cfg: &OperatorConfig<T>, x: T) -> Result<T> {
    if cfg.has_closed_form() {
        if let Some(v) = closed_form_multiplier(&cfg.weight, x) {
            return Ok(v);
        }
    }
    scale_superlevel_measure(&cfg.weight, &cfg.scale, x)
}

/// Largest gap between the closed-form multiplier and quadrature of the
/// superlevel measure over 200 points of `[-4, 4]`; errors above
/// [`CLOSED_FORM_TOL`].
pub fn closed_form_self_test<T: Real>(w: &WeightSpec<T>) -> Result<T> {
    let a = ScaleSpec::Reciprocal;
    let mut worst = T::zero();
    for i in 0..200 {
        let x = T::lit(-4.0 + 8.0 * (i as f64 + 0.5) / 200.0);
        let Some(closed) = closed_form_multiplier(w, x) else {
            return Err(HausError::Unsupported(format!("{w} has no closed-form multiplier")));
        };
        let quad = scale_superlevel_measure(w, &a, x)?;
        worst = worst.max((closed - quad).abs());
    }
    if worst > T::lit(CLOSED_FORM_TOL) {
        return Err(HausError::InvalidInput(format!(
            "closed-form multiplier of {w} disagrees with quadrature by {worst}"
        )));
    }
    Ok(worst)
}

/// `x -> K^(x)` for one configuration.
#[derive(Debug, Clone, Copy)]
pub struct MultiplierProfile<'a, T> {
    pub config: &'a OperatorConfig<T>,
    pub closed_form: bool,
}

impl<'a, T: Real> MultiplierProfile<'a, T> {
    pub fn new(config: &'a OperatorConfig<T>) -> Self {
        Self {
            config,
            closed_form: config.has_closed_form(),
        }
    }

    pub fn eval(&self, x: T) -> Result<T> {
        multiplier_eval(self.config, x)
    }

    /// `K^(eps x)`, the multiplier of `F_eps`.
    pub fn eval_scaled(&self, x: T) -> Result<T> {
        multiplier_eval(self.config, self.config.epsilon * x)
    }
}

/// `s -> K(s)` and `s -> K_eps(s)` for one configuration.
#[derive(Debug, Clone, Copy)]
pub struct KernelProfile<'a, T> {
    pub config: &'a OperatorConfig<T>,
}

impl<'a, T: Real> KernelProfile<'a, T> {
    pub fn new(config: &'a OperatorConfig<T>) -> Self {
        Self { config }
    }

    pub fn eval(&self, s: T) -> Result<T> {
        kernel_eval(self.config, s, false)
    }

    pub fn eval_scaled(&self, s: T) -> Result<T> {
        kernel_eval(self.config, s, true)
    }
}

/// `K_eps(s)` when `scaled`, else `K(s)`.
///
/// At `s = 0` the limit `(1/pi) int phi |a|` (divided by `eps` when scaled)
/// is returned if that integral converges; otherwise the point is singular.
pub fn kernel_eval<T: Real>(cfg: &OperatorConfig<T>, s: T, scaled: bool) -> Result<T> {
    let eps = if scaled { cfg.epsilon } else { T::one() };
    let s = s / eps;
    if !s.is_finite() {
        return Err(HausError::InvalidInput(format!("kernel argument must be finite, got {s}")));
    }
    if s == T::zero() {
        return match cfg.admissibility.l1_phi_a {
            Some(m) => Ok(m / (T::PI() * eps)),
            None => Err(HausError::Singular(
                "K(0) is infinite because int |phi| |a| diverges".into(),
            )),
        };
    }
    unscaled_kernel(cfg, s).map(|k| k / eps)
}

fn unscaled_kernel<T: Real>(cfg: &OperatorConfig<T>, s: T) -> Result<T> {
    let (w, a) = (&cfg.weight, &cfg.scale);
    let opts = QuadOptions::kernel();
    if a.has_inverse() {
        let (lo, hi, breaks) = pushforward_support(w, a)?;
        if !(hi > lo) {
            return Ok(T::zero());
        }
        let g = Integrand {
            evaluator: |u: T| {
                if u <= T::zero() {
                    return T::zero();
                }
                pushforward_density(w, a, u).unwrap_or_else(|_| T::nan()) * (u * s).sin()
            },
            singular_points: breaks,
            support: Support::Interval { lo, hi },
        };
        let r = integrate_oscillatory_with(&g, s.abs(), &opts)?;
        Ok(r.value / (T::PI() * s))
    } else {
        let g = Integrand {
            evaluator: |t: T| {
                let phi = w.density(t);
                if phi == T::zero() {
                    T::zero()
                } else {
                    phi * (a.eval(t).abs() * s).sin()
                }
            },
            singular_points: w.breakpoints(),
            support: w.support(),
        };
        Ok(integrate_with(&g, &opts)?.value / (T::PI() * s))
    }
}

/// Values of `H_{phi,a} f(x)`.
///
/// `f` is linearly interpolated between samples and taken as zero outside
/// the grid. For `a(t) = 1/t` the integral is evaluated after the change of
/// variables `u = x/t`, i.e. as `int phi(x/u) f(u) / |u| du` over the grid.
/// At `x = 0` the continuous extension
/// `f(0) int phi |a| + phi(0+) int f(u)/|u| du` is returned.
pub fn apply_hausdorff<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>, f: &SampledSignal<T>, x: T) -> Result<T> {
    if !(x >= f.x0() && x <= f.x_end()) {
        return Err(HausError::Domain(format!(
            "x = {x} is outside the grid [{}, {}]",
            f.x0(),
            f.x_end()
        )));
    }
    let Some((first, last)) = f.nonzero_range() else {
        return Ok(T::zero());
    };
    let lo = f.x(first.saturating_sub(1));
    let hi = f.x((last + 1).min(f.len() - 1));
    let nodes: Vec<T> = (first.saturating_sub(1)..=(last + 1).min(f.len() - 1)).map(|i| f.x(i)).collect();
    let opts = QuadOptions::new(T::lit(1e-10), T::lit(1e-13));

    if x == T::zero() {
        return hausdorff_at_origin(w, a, f, lo, hi, nodes, &opts);
    }

    if matches!(a, ScaleSpec::Reciprocal) {
        let mut singular = nodes;
        singular.push(T::zero());
        for tb in w.breakpoints() {
            if tb != T::zero() {
                singular.push(x / tb);
            }
        }
        let g = Integrand {
            evaluator: |u: T| {
                if u == T::zero() {
                    return T::zero();
                }
                let fu = f.interpolate(u);
                if fu == T::zero() {
                    return T::zero();
                }
                w.density(x / u) * fu / u.abs()
            },
            singular_points: singular,
            support: Support::Interval { lo, hi },
        };
        return Ok(integrate_with(&g, &opts)?.value);
    }

    let g = Integrand {
        evaluator: |t: T| {
            let phi = w.density(t);
            if phi == T::zero() {
                return T::zero();
            }
            let at = a.eval(t);
            let fv = f.interpolate(at * x);
            if fv == T::zero() {
                T::zero()
            } else {
                phi * at.abs() * fv
            }
        },
        singular_points: w.breakpoints(),
        support: w.support(),
    };
    Ok(integrate_with(&g, &opts)?.value)
}

fn hausdorff_at_origin<T: Real>(
    w: &WeightSpec<T>,
    a: &ScaleSpec<T>,
    f: &SampledSignal<T>,
    lo: T,
    hi: T,
    mut nodes: Vec<T>,
    opts: &QuadOptions<T>,
) -> Result<T> {
    let f0 = f.interpolate(T::zero());
    let mut value = T::zero();
    if f0 != T::zero() {
        let report = check_admissibility(w, a)?;
        let m = report.l1_phi_a.ok_or_else(|| {
            HausError::Singular("H f(0) is infinite: f(0) != 0 and int phi |a| diverges".into())
        })?;
        value = f0 * m;
    }
    if matches!(a, ScaleSpec::Reciprocal) {
        let phi0 = w.limit_at_zero();
        match phi0 {
            Some(c) if c == T::zero() => {}
            Some(c) => {
                nodes.push(T::zero());
                let g = Integrand {
                    evaluator: |u: T| {
                        if u == T::zero() {
                            T::zero()
                        } else {
                            f.interpolate(u) / u.abs()
                        }
                    },
                    singular_points: nodes,
                    support: Support::Interval { lo, hi },
                };
                value = value + c * integrate_with(&g, opts)?.value;
            }
            None => {
                return Err(HausError::Singular("phi is unbounded at 0, so H f(0) is infinite".into()));
            }
        }
    }
    Ok(value)
}

/// `||H f||_2` on the grid of `f` against `(int |phi| |a|^{1/2}) ||f||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2BoundCheck<T> {
    pub h_norm: T,
    pub f_norm: T,
    pub constant: T,
    /// `h_norm - constant * f_norm`; nonpositive when the bound holds.
    pub excess: T,
}

/// Evaluates `H f` at every grid point and compares L2 norms. A grid point
/// where `H f` is singular (only possible at `x = 0`) takes the mean of its
/// neighbours.
pub fn l2_bound_check<T: Real>(w: &WeightSpec<T>, a: &ScaleSpec<T>, f: &SampledSignal<T>) -> Result<L2BoundCheck<T>> {
    let report = check_admissibility(w, a)?;
    let constant = report
        .l1_phi_sqrt_a
        .ok_or_else(|| HausError::Parameter("int |phi| |a|^(1/2) diverges".into()))?;
    let vals: Vec<Option<T>> = (0..f.len())
        .into_par_iter()
        .map(|i| match apply_hausdorff(w, a, f, f.x(i)) {
            Ok(v) => Ok(Some(v)),
            Err(HausError::Singular(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let filled: Vec<T> = (0..vals.len())
        .map(|i| {
            vals[i].unwrap_or_else(|| {
                let l = if i > 0 { vals[i - 1] } else { None };
                let r = vals.get(i + 1).copied().flatten();
                match (l, r) {
                    (Some(l), Some(r)) => (l + r) * T::lit(0.5),
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => T::zero(),
                }
            })
        })
        .collect();
    let h_norm = lp_norm(&f.with_values(filled)?, T::lit(2.0))?;
    let f_norm = lp_norm(f, T::lit(2.0))?;
    Ok(L2BoundCheck {
        h_norm,
        f_norm,
        constant,
        excess: h_norm - constant * f_norm,
    })
}

/// `F_eps` on the grid of `f` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum<T> {
    pub signal: SampledSignal<T>,
    /// [`spectral_leakage`] of the output.
    pub leakage: T,
    pub warnings: Vec<String>,
}

/// `F_eps` through `F_eps^ = K^(eps xi) f^`; the canonical path.
pub fn partial_hausdorff_spectral<T: Real>(cfg: &OperatorConfig<T>, f: &SampledSignal<T>) -> Result<PartialSum<T>> {
    let spec = forward_fourier(f)?;
    let filtered = spec.try_map_real(|xi| multiplier_eval(cfg, cfg.epsilon * xi))?;
    let out = inverse_fourier(&filtered)?;
    finish(out)
}

fn finish<T: Real>(signal: SampledSignal<T>) -> Result<PartialSum<T>> {
    let leakage = spectral_leakage(&signal)?;
    let mut warnings = Vec::new();
    if leakage > T::lit(LEAKAGE_WARN) {
        warnings.push(format!(
            "grid too small: spectral leakage {:e} exceeds {LEAKAGE_WARN:e}; widen or refine the grid",
            leakage.as_f64()
        ));
    }
    Ok(PartialSum {
        signal,
        leakage,
        warnings,
    })
}

/// Samples `K_eps(j dx)` for `j = 0..=m`. The `j = 0` entry is the limit
/// when it exists and `K_eps(dx/2)` otherwise.
pub fn kernel_samples<T: Real>(cfg: &OperatorConfig<T>, dx: T, m: usize) -> Result<Vec<T>> {
    (0..=m)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                match kernel_eval(cfg, T::zero(), true) {
                    Ok(v) => Ok(v),
                    Err(HausError::Singular(_)) => kernel_eval(cfg, dx * T::lit(0.5), true),
                    Err(e) => Err(e),
                }
            } else {
                kernel_eval(cfg, T::from_usize_lossy(j) * dx, true)
            }
        })
        .collect()
}

/// Relative tail budget for the kernel window of the convolution path.
const WINDOW_TAIL: f64 = 1e-4;

/// `F_eps = K_eps * f` by direct summation of sampled kernel values.
///
/// The window radius `R` is the smaller of the grid extent and the radius at
/// which `||phi||_1 ||f||_1 / (pi R)` drops below 1e-4 of `||f||_2`.
pub fn partial_hausdorff_convolution<T: Real>(
    cfg: &OperatorConfig<T>,
    f: &SampledSignal<T>,
) -> Result<PartialSum<T>> {
    let n = f.len();
    let dx = f.dx();
    let Some((first, last)) = f.nonzero_range() else {
        return finish(SampledSignal::zeros(f.grid()));
    };
    let l1: T = f.values().iter().map(|v| v.abs()).sum::<T>() * dx;
    let l2: T = (f.values().iter().map(|v| *v * *v).sum::<T>() * dx).sqrt();
    let radius = cfg.l1_phi() * l1 / (T::PI() * T::lit(WINDOW_TAIL) * l2);
    let cells = (radius / dx).ceil().to_usize().unwrap_or(usize::MAX).min(n - 1);
    let kernel = kernel_samples(cfg, dx, cells)?;
    let vals = f.values();
    let out: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = first.max(i.saturating_sub(cells));
            let hi = last.min(i + cells);
            let mut acc = T::zero();
            for (j, v) in vals.iter().enumerate().take(hi + 1).skip(lo) {
                acc = acc + kernel[i.abs_diff(j)] * *v;
            }
            acc * dx
        })
        .collect();
    finish(f.with_values(out)?)
}

/// Beyond this `u`, `(1/pi) int f(x - eps s) sin(us)/s ds` is replaced by `f(x)`.
const DIRECT_U_CAP: f64 = 200.0;

/// `F_eps(x)` by nested quadrature of the defining double integral; a slow
/// oracle for a handful of points.
pub fn partial_hausdorff_direct<T: Real>(cfg: &OperatorConfig<T>, f: &SampledSignal<T>, x: T) -> Result<T> {
    let (w, a) = (&cfg.weight, &cfg.scale);
    let eps = cfg.epsilon;
    if !(x >= f.x0() && x <= f.x_end()) {
        return Err(HausError::Domain(format!("x = {x} is outside the grid")));
    }
    let Some((first, last)) = f.nonzero_range() else {
        return Ok(T::zero());
    };
    let first = first.saturating_sub(1);
    let last = (last + 1).min(f.len() - 1);
    // s-range where f(x - eps s) can be nonzero, and the images of grid nodes
    let s_lo = (x - f.x(last)) / eps;
    let s_hi = (x - f.x(first)) / eps;
    let mut s_nodes: Vec<T> = (first..=last).map(|i| (x - f.x(i)) / eps).collect();
    s_nodes.push(T::zero());
    let fx = f.interpolate(x);

    let inner_opts = QuadOptions::new(T::lit(1e-10), T::lit(1e-13));
    let inner = |u: T| -> Result<T> {
        let g = Integrand {
            evaluator: |s: T| {
                let fv = f.interpolate(x - eps * s);
                if fv == T::zero() {
                    T::zero()
                } else if s == T::zero() {
                    fv * u
                } else {
                    fv * (u * s).sin() / s
                }
            },
            singular_points: s_nodes.clone(),
            support: Support::Interval { lo: s_lo, hi: s_hi },
        };
        Ok(integrate_oscillatory_with(&g, u, &inner_opts)?.value / T::PI())
    };

    let (ulo, uhi, breaks) = pushforward_support(w, a)?;
    let cap = T::lit(DIRECT_U_CAP);
    let top = uhi.min(cap);
    let mut value = T::zero();
    if top > ulo {
        let failure = std::cell::RefCell::new(None);
        let g = Integrand {
            evaluator: |u: T| {
                let rho = match pushforward_density(w, a, u) {
                    Ok(r) => r,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        return T::zero();
                    }
                };
                if rho == T::zero() {
                    return T::zero();
                }
                match inner(u) {
                    Ok(v) => rho * v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        T::zero()
                    }
                }
            },
            singular_points: breaks.clone(),
            support: Support::Interval { lo: ulo, hi: top },
        };
        let r = integrate_with(&g, &QuadOptions::new(T::lit(1e-8), T::lit(1e-11)))?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        value = r.value;
    }
    if uhi > cap {
        let lo = ulo.max(cap);
        let g = Integrand {
            evaluator: |u: T| pushforward_density(w, a, u).unwrap_or_else(|_| T::nan()),
            singular_points: breaks.into_iter().filter(|b| *b > lo).collect(),
            support: Support::Interval { lo, hi: uhi },
        };
        value = value + fx * integrate_with(&g, &QuadOptions::kernel())?.value;
    }
    Ok(value)
}
