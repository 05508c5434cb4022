//! Hardy-space numerics: the radial maximal function `M f = sup_s |Phi_s * f|`,
//! the norm `||f||_{H^1} = ||M f||_1`, Riesz derivatives `I^sigma` and an upper
//! bound on the K-functional `K_sigma(f, t)`.
//!
//! The supremum over `s > 0` is taken over a finite geometric scale grid,
//! and `Phi` is the normalized bump `exp(-1/(1-x^2))`, so every estimate
//! here is `Phi`- and grid-dependent up to norm equivalence.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{HausError, Result};
use crate::scalar::Real;
use crate::signal::{apply_multiplier, forward_fourier, inverse_fourier, lp_norm, smooth_cutoff, SampledSignal};

/// `int_{-1}^{1} exp(-1/(1-x^2)) dx`.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// Ratio between consecutive scales of the default grid.
pub const SCALE_RATIO: f64 = 1.189_207_115_002_721; // 2^(1/4)

/// Relative mean above which a signal is reported as outside `H^1`.
pub const MEAN_TOL: f64 = 1e-6;

/// The mollifier `Phi(x) = exp(-1/(1-x^2)) / BUMP_MASS` on `|x| < 1`.
pub fn mollifier<T: Real>(x: T) -> T {
    let r = T::one() - x * x;
    if r <= T::zero() {
        T::zero()
    } else {
        (-r.recip()).exp() / T::lit(BUMP_MASS)
    }
}

/// Scale grid for the maximal function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalConfig<T> {
    scales: Vec<T>,
}

impl<T: Real> MaximalConfig<T> {
    /// `s_min * 2^{k/4}` for every `k` with the result at most `s_max`.
    pub fn new(s_min: T, s_max: T) -> Result<Self> {
        if !(s_min > T::zero()) || !(s_max > s_min) || !s_max.is_finite() {
            return Err(HausError::Config(format!(
                "scale grid needs 0 < s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        let ratio = T::lit(SCALE_RATIO);
        let limit = s_max * (T::one() + T::lit(1e-12));
        let mut scales = vec![s_min];
        let mut k = 1;
        loop {
            let s = s_min * ratio.powi(k);
            if s > limit {
                break;
            }
            scales.push(s);
            k += 1;
        }
        Ok(Self { scales })
    }

    /// `[dx, width/4]` for the grid of `f`.
    pub fn for_signal(f: &SampledSignal<T>) -> Result<Self> {
        let g = f.grid();
        Self::new(g.dx, g.width() / T::lit(4.0))
    }

    /// An explicit list of scales, sorted and deduplicated.
    pub fn from_scales(mut scales: Vec<T>) -> Result<Self> {
        if scales.is_empty() {
            return Err(HausError::Config("scale grid is empty".into()));
        }
        if scales.iter().any(|s| !(*s > T::zero()) || !s.is_finite()) {
            return Err(HausError::Config("scales must be positive and finite".into()));
        }
        scales.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        scales.dedup();
        Ok(Self { scales })
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }

    pub fn s_min(&self) -> T {
        self.scales[0]
    }

    pub fn s_max(&self) -> T {
        self.scales[self.scales.len() - 1]
    }

    /// Every scale multiplied by `c`.
    pub fn dilated(&self, c: T) -> Self {
        Self {
            scales: self.scales.iter().map(|s| *s * c).collect(),
        }
    }
}

/// Samples of `Phi_s` at `j dx`, `|j| <= m`, rescaled so their Riemann sum is 1.
fn mollifier_taps<T: Real>(s: T, dx: T) -> Vec<T> {
    let m = (s / dx).floor().to_usize().unwrap_or(0);
    let mut taps: Vec<T> = (0..=m)
        .map(|j| mollifier(T::from_usize_lossy(j) * dx / s))
        .collect();
    let total = taps[0] + T::lit(2.0) * taps[1..].iter().copied().sum::<T>();
    if total > T::zero() {
        for t in &mut taps {
            *t = *t / (total * dx);
        }
    } else {
        taps = vec![dx.recip()];
    }
    taps
}

/// `Phi_s * f` for every scale of `cfg`, each by FFT convolution with the
/// renormalized discrete mollifier.
pub fn smoothed<T: Real>(f: &SampledSignal<T>, cfg: &MaximalConfig<T>) -> Result<Vec<SampledSignal<T>>> {
    let n = f.len();
    let dx = f.dx();
    let reach = cfg
        .scales
        .iter()
        .map(|s| (*s / dx).floor().to_usize().unwrap_or(usize::MAX).min(n))
        .max()
        .unwrap_or(0);
    let len = (n + reach + 1).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let zero = Complex::new(T::zero(), T::zero());
    let mut fhat: Vec<Complex<T>> = f.values().iter().map(|v| Complex::new(*v, T::zero())).collect();
    fhat.resize(len, zero);
    fwd.process(&mut fhat);
    let norm = dx / T::from_usize_lossy(len);

    cfg.scales
        .par_iter()
        .map(|&s| {
            let taps = mollifier_taps(s, dx);
            let mut k = vec![zero; len];
            for (j, t) in taps.iter().enumerate().take(n + 1) {
                k[j] = Complex::new(*t, T::zero());
                if j > 0 {
                    k[len - j] = Complex::new(*t, T::zero());
                }
            }
            fwd.process(&mut k);
            for (kv, fv) in k.iter_mut().zip(&fhat) {
                *kv = *kv * *fv;
            }
            inv.process(&mut k);
            f.with_values(k[..n].iter().map(|c| c.re * norm).collect())
        })
        .collect()
}

/// `max_s |Phi_s * f|` over the scale grid.
pub fn maximal_function<T: Real>(f: &SampledSignal<T>, cfg: &MaximalConfig<T>) -> Result<SampledSignal<T>> {
    let layers = smoothed(f, cfg)?;
    let mut out = vec![T::zero(); f.len()];
    for layer in &layers {
        for (o, v) in out.iter_mut().zip(layer.values()) {
            *o = o.max(v.abs());
        }
    }
    f.with_values(out)
}

/// `||M f||_1` with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Estimate<T> {
    pub value: T,
    /// `|int f| / ||f||_1`.
    pub relative_mean: T,
    pub warnings: Vec<String>,
}

pub fn h1_norm_estimate<T: Real>(f: &SampledSignal<T>, cfg: &MaximalConfig<T>) -> Result<H1Estimate<T>> {
    let l1 = lp_norm(f, T::one())?;
    if l1 == T::zero() {
        return Ok(H1Estimate {
            value: T::zero(),
            relative_mean: T::zero(),
            warnings: Vec::new(),
        });
    }
    let relative_mean = f.integral().abs() / l1;
    let mut warnings = Vec::new();
    if relative_mean > T::lit(MEAN_TOL) {
        warnings.push(format!(
            "signal is not in H^1: relative mean {relative_mean} exceeds {MEAN_TOL}; the estimate depends on the scale grid"
        ));
    }
    let value = lp_norm(&maximal_function(f, cfg)?, T::one())?;
    Ok(H1Estimate {
        value,
        relative_mean,
        warnings,
    })
}

/// `I^sigma f` with `(I^sigma f)^(xi) = |xi|^sigma f^(xi)`.
pub fn riesz_derivative<T: Real>(f: &SampledSignal<T>, sigma: T) -> Result<SampledSignal<T>> {
    check_sigma(sigma)?;
    apply_multiplier(f, |xi| xi.abs().powf(sigma))
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(HausError::Domain(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Upper bound `||f - g||_{H^1} + t^sigma ||I^sigma g||_{H^1}` at the best witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KFunctionalBound<T> {
    pub sigma: T,
    pub t: T,
    pub value: T,
    /// Low-pass cutoff of the witness; `0` is `g = 0`, infinity is `g = f`.
    pub witness_cutoff: T,
}

/// Per-witness norms, reusable for any `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KFunctionalTable<T> {
    pub sigma: T,
    /// `(lambda, ||f - g_lambda||_{H^1}, ||I^sigma g_lambda||_{H^1})`.
    pub rows: Vec<(T, T, T)>,
}

impl<T: Real> KFunctionalTable<T> {
    /// Witnesses `g = 0`, `g = f` and the smooth low-passes
    /// `g_lambda^ = chi(xi/lambda) f^` for the given cutoffs, where `chi` is 1
    /// on `[-1, 1]` and vanishes outside `[-2, 2]`.
    pub fn new(f: &SampledSignal<T>, sigma: T, cfg: &MaximalConfig<T>, cutoffs: &[T]) -> Result<Self> {
        check_sigma(sigma)?;
        if cutoffs.iter().any(|l| !(*l > T::zero()) || !l.is_finite()) {
            return Err(HausError::Parameter("low-pass cutoffs must be positive and finite".into()));
        }
        let spec = forward_fourier(f)?;
        let norm = |g: &SampledSignal<T>| h1_norm_estimate(g, cfg).map(|e| e.value);
        let f_norm = norm(f)?;
        let df_norm = norm(&riesz_derivative(f, sigma)?)?;
        let mut rows: Vec<(T, T, T)> = cutoffs
            .par_iter()
            .map(|&lambda| {
                let high = inverse_fourier(&spec.map_real(|xi| T::one() - smooth_cutoff(xi / lambda)))?;
                let deriv =
                    inverse_fourier(&spec.map_real(|xi| smooth_cutoff(xi / lambda) * xi.abs().powf(sigma)))?;
                Ok((lambda, norm(&high)?, norm(&deriv)?))
            })
            .collect::<Result<_>>()?;
        rows.push((T::zero(), f_norm, T::zero()));
        rows.push((T::infinity(), T::zero(), df_norm));
        Ok(Self { sigma, rows })
    }

    /// Geometric cutoffs `dxi * 2^{k/2}` up to half the Nyquist frequency.
    pub fn default_cutoffs(f: &SampledSignal<T>) -> Vec<T> {
        let g = f.grid();
        let n = f.len().next_power_of_two();
        let dxi = T::TAU() / (T::from_usize_lossy(n) * g.dx);
        let top = g.nyquist() / T::lit(2.0);
        let mut out = Vec::new();
        let mut lambda = dxi;
        while lambda <= top {
            out.push(lambda);
            lambda = lambda * T::SQRT_2();
        }
        out
    }

    pub fn bound(&self, t: T) -> Result<KFunctionalBound<T>> {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(HausError::Domain(format!("t must be positive, got {t}")));
        }
        let ts = t.powf(self.sigma);
        let mut best = KFunctionalBound {
            sigma: self.sigma,
            t,
            value: T::infinity(),
            witness_cutoff: T::zero(),
        };
        for &(lambda, a, b) in &self.rows {
            let v = a + ts * b;
            if v < best.value {
                best.value = v;
                best.witness_cutoff = lambda;
            }
        }
        Ok(best)
    }
}

/// Upper bound on `K_sigma(f, t)` over the default witness family.
pub fn k_functional_upper<T: Real>(
    f: &SampledSignal<T>,
    sigma: T,
    t: T,
    cfg: &MaximalConfig<T>,
) -> Result<KFunctionalBound<T>> {
    KFunctionalTable::new(f, sigma, cfg, &KFunctionalTable::default_cutoffs(f))?.bound(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Integrand};
    use crate::signal::{gaussian, GridSpec};

    #[test]
    fn mollifier_has_unit_mass() {
        let r = integrate(&Integrand::on(mollifier::<f64>, -1.0, 1.0), 1e-13, 1e-15).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scale_grid_shape() {
        let c = MaximalConfig::new(0.5f64, 8.0).unwrap();
        assert_eq!(c.scales().len(), 17);
        assert!((c.s_max() - 8.0).abs() < 1e-12);
        assert!(MaximalConfig::new(1.0f64, 1.0).is_err());
        assert!(MaximalConfig::<f64>::from_scales(vec![]).is_err());
    }

    #[test]
    fn smallest_scale_reproduces_signal() {
        let grid = GridSpec::centered(0.05f64, 512).unwrap();
        let f = gaussian(grid).unwrap();
        let cfg = MaximalConfig::from_scales(vec![0.05]).unwrap();
        let m = maximal_function(&f, &cfg).unwrap();
        for (a, b) in m.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_matches_direct_sum() {
        let grid = GridSpec::centered(0.1f64, 200).unwrap();
        let f = gaussian(grid).unwrap().map(|v| v * v.sin());
        let cfg = MaximalConfig::from_scales(vec![0.73]).unwrap();
        let fft = &smoothed(&f, &cfg).unwrap()[0];
        let taps = mollifier_taps(0.73, 0.1);
        let m = taps.len() - 1;
        for i in [0usize, 37, 100, 199] {
            let mut acc = 0.0;
            for j in 0..200usize {
                let d = i.abs_diff(j);
                if d <= m {
                    acc += taps[d] * f.values()[j] * 0.1;
                }
            }
            assert!((acc - fft.values()[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn riesz_rejects_nonpositive_order() {
        let f = SampledSignal::zeros(GridSpec::centered(0.1f64, 64).unwrap());
        assert!(matches!(riesz_derivative(&f, 0.0), Err(HausError::Domain(_))));
        assert!(riesz_derivative(&f, 1.0).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn k_functional_table_is_monotone() {
        let grid = GridSpec::centered(0.1f64, 512).unwrap();
        let f = crate::signal::gaussian_derivative(grid).unwrap();
        let cfg = MaximalConfig::for_signal(&f).unwrap();
        let table = KFunctionalTable::new(&f, 1.0, &cfg, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        let mut prev = 0.0;
        for k in (0..12).rev() {
            let b = table.bound(2f64.powi(-k)).unwrap();
            assert!(b.value >= prev - 1e-10);
            prev = b.value;
        }
    }
}
