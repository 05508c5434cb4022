//! Uniform-grid signals, their spectra, norms and canned test inputs.
//!
//! Transforms use the non-unitary pair
//!
//! ```text
//! f^(xi) = int f(x) e^{-i x xi} dx,     f(x) = (1/2pi) int f^(xi) e^{i x xi} dxi
//! ```
//!
//! approximated by a zero-padded, periodized DFT scaled by `dx`. The frequency
//! grid of a length-`n` transform is `xi_k = (k - n/2) * 2pi / (n dx)`, so it
//! covers `[-pi/dx, pi/dx)`.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{HausError, Result};
use crate::scalar::Real;

/// Relative tolerance for the conjugate-symmetry check and for the imaginary
/// residue discarded by [`inverse_fourier`].
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Uniform grid description: `n` points starting at `x0` with spacing `dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub x0: T,
    pub dx: T,
    pub n: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(x0: T, dx: T, n: usize) -> Result<Self> {
        if !(dx > T::zero()) || !dx.is_finite() || !x0.is_finite() {
            return Err(HausError::InvalidInput(format!(
                "grid needs finite x0 and dx > 0 (x0 = {x0}, dx = {dx})"
            )));
        }
        if n < 2 {
            return Err(HausError::InvalidInput(format!("grid needs n >= 2, got {n}")));
        }
        Ok(Self { x0, dx, n })
    }

    /// Grid of `n` points centred on the origin; `x0 = -(n/2) dx`, so that
    /// `x = 0` is the node with index `n/2`.
    pub fn centered(dx: T, n: usize) -> Result<Self> {
        Self::new(-T::from_usize_lossy(n / 2) * dx, dx, n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x0 + T::from_usize_lossy(i) * self.dx
    }

    pub fn x_end(&self) -> T {
        self.x(self.n - 1)
    }

    pub fn width(&self) -> T {
        T::from_usize_lossy(self.n - 1) * self.dx
    }

    pub fn nyquist(&self) -> T {
        T::PI() / self.dx
    }

    /// Samples `g` at every grid point.
    pub fn sample<F: Fn(T) -> T>(&self, g: F) -> Result<SampledSignal<T>> {
        SampledSignal::new(self.x0, self.dx, (0..self.n).map(|i| g(self.x(i))).collect())
    }
}

/// Real-valued function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    x0: T,
    dx: T,
    values: Vec<T>,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(x0: T, dx: T, values: Vec<T>) -> Result<Self> {
        GridSpec::new(x0, dx, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HausError::InvalidInput(format!(
                "non-finite sample {} at index {i}",
                values[i]
            )));
        }
        Ok(Self { x0, dx, values })
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self {
            x0: grid.x0,
            dx: grid.dx,
            values: vec![T::zero(); grid.n],
        }
    }

    pub fn grid(&self) -> GridSpec<T> {
        GridSpec {
            x0: self.x0,
            dx: self.dx,
            n: self.values.len(),
        }
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x0 + T::from_usize_lossy(i) * self.dx
    }

    pub fn x_end(&self) -> T {
        self.x(self.values.len() - 1)
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(HausError::InvalidInput(format!(
                "length mismatch: {} vs {}",
                values.len(),
                self.values.len()
            )));
        }
        Self::new(self.x0, self.dx, values)
    }

    pub fn map<F: Fn(T) -> T>(&self, g: F) -> Self {
        Self {
            x0: self.x0,
            dx: self.dx,
            values: self.values.iter().map(|&v| g(v)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise `self - other`; both signals must share the grid.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            x0: self.x0,
            dx: self.dx,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            x0: self.x0,
            dx: self.dx,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect(),
        })
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.values.len() != other.values.len() || self.x0 != other.x0 || self.dx != other.dx {
            return Err(HausError::InvalidInput("signals live on different grids".into()));
        }
        Ok(())
    }

    /// Values shifted right by `cells` grid cells with zero fill.
    pub fn shift_cells(&self, cells: isize) -> Self {
        let n = self.values.len() as isize;
        let values = (0..n)
            .map(|i| {
                let j = i - cells;
                if (0..n).contains(&j) {
                    self.values[j as usize]
                } else {
                    T::zero()
                }
            })
            .collect();
        Self {
            x0: self.x0,
            dx: self.dx,
            values,
        }
    }

    /// Linear interpolation between nodes; zero outside the grid hull.
    pub fn interpolate(&self, x: T) -> T {
        let pos = (x - self.x0) / self.dx;
        let last = self.values.len() - 1;
        if !(pos >= T::zero()) || pos > T::from_usize_lossy(last) {
            return T::zero();
        }
        let i = pos.floor().to_usize().unwrap_or(0).min(last);
        if i == last {
            return self.values[last];
        }
        let frac = pos - T::from_usize_lossy(i);
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Trapezoid-rule integral.
    pub fn integral(&self) -> T {
        trapezoid(&self.values, self.dx)
    }

    /// Index range `[first, last]` of nonzero samples, or `None` for the zero signal.
    pub fn nonzero_range(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| *v != T::zero())?;
        let last = self.values.iter().rposition(|v| *v != T::zero())?;
        Some((first, last))
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

fn trapezoid<T: Real>(values: &[T], dx: T) -> T {
    let n = values.len();
    if n == 0 {
        return T::zero();
    }
    let interior: T = values.iter().copied().sum();
    (interior - T::lit(0.5) * (values[0] + values[n - 1])) * dx
}

/// Frequency-domain representation under the non-unitary convention.
///
/// Carries the spatial origin and length of the signal it came from so that
/// the inverse transform lands back on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    xi0: T,
    dxi: T,
    values: Vec<Complex<T>>,
    origin: T,
    signal_len: usize,
}

impl<T: Real> Spectrum<T> {
    pub fn new(xi0: T, dxi: T, values: Vec<Complex<T>>, origin: T, signal_len: usize) -> Result<Self> {
        if !(dxi > T::zero()) {
            return Err(HausError::InvalidInput("spectrum needs dxi > 0".into()));
        }
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(HausError::InvalidInput("non-finite spectrum value".into()));
        }
        if signal_len > values.len() {
            return Err(HausError::InvalidInput("signal length exceeds spectrum length".into()));
        }
        Ok(Self {
            xi0,
            dxi,
            values,
            origin,
            signal_len,
        })
    }

    pub fn xi0(&self) -> T {
        self.xi0
    }

    pub fn dxi(&self) -> T {
        self.dxi
    }

    #[inline]
    pub fn xi(&self, k: usize) -> T {
        self.xi0 + T::from_usize_lossy(k) * self.dxi
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spatial origin of the grid the spectrum belongs to.
    pub fn origin(&self) -> T {
        self.origin
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    /// Multiplies every coefficient by `m(xi)`.
    pub fn map_real<F: Fn(T) -> T>(&self, m: F) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, c)| c * m(self.xi(k)))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// Like [`Self::map_real`] for a fallible multiplier.
    pub fn try_map_real<F: FnMut(T) -> Result<T>>(&self, mut m: F) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for (k, c) in self.values.iter().enumerate() {
            values.push(c * m(self.xi(k))?);
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn map_complex<F: Fn(T) -> Complex<T>>(&self, m: F) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, c)| c * m(self.xi(k)))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// `sum |F|^2 dxi`.
    pub fn energy(&self) -> T {
        self.values.iter().map(|c| c.norm_sqr()).sum::<T>() * self.dxi
    }

    /// Relative L2 distance between `F(xi)` and `conj F(-xi)`; the lowest bin
    /// (`-pi/dx`, which has no partner on the grid) is excluded.
    pub fn asymmetry(&self) -> T {
        let n = self.values.len();
        let mut diff = T::zero();
        let mut total = T::zero();
        for k in 1..n {
            let a = self.values[k];
            let b = self.values[n - k].conj();
            diff = diff + (a - b).norm_sqr();
            total = total + a.norm_sqr();
        }
        if total == T::zero() {
            T::zero()
        } else {
            (diff / total).sqrt()
        }
    }
}

fn symmetry_tol<T: Real>() -> T {
    T::lit(SYMMETRY_TOL).max(T::lit(4096.0) * T::eps())
}

/// `f^(xi) = int f(x) e^{-i x xi} dx` on the grid `[-pi/dx, pi/dx)`; the input
/// is zero-padded to the next power of two.
pub fn forward_fourier<T: Real>(f: &SampledSignal<T>) -> Result<Spectrum<T>> {
    if let Some(i) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(HausError::InvalidInput(format!("non-finite sample at index {i}")));
    }
    let n = f.len().next_power_of_two();
    let mut buf: Vec<Complex<T>> = f
        .values
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
        .take(n)
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let dxi = T::TAU() / (T::from_usize_lossy(n) * f.dx);
    let half = n / 2;
    let xi0 = -T::from_usize_lossy(half) * dxi;
    let values = (0..n)
        .map(|k| {
            let xi = xi0 + T::from_usize_lossy(k) * dxi;
            let phase = Complex::from_polar(f.dx, -xi * f.x0);
            buf[(k + half) % n] * phase
        })
        .collect();
    Ok(Spectrum {
        xi0,
        dxi,
        values,
        origin: f.x0,
        signal_len: f.len(),
    })
}

/// Inverse of [`forward_fourier`]: `(1/2pi) int F(xi) e^{i x xi} dxi`, returned
/// on the originating grid (padding trimmed).
///
/// The input must be conjugate-symmetric; an imaginary residue below
/// [`SYMMETRY_TOL`] of the L2 norm is discarded.
pub fn inverse_fourier<T: Real>(spec: &Spectrum<T>) -> Result<SampledSignal<T>> {
    let (re, im) = inverse_complex(spec)?;
    let asym = spec.asymmetry();
    if asym > symmetry_tol() {
        return Err(HausError::SymmetryViolation {
            asymmetry: asym.as_f64(),
        });
    }
    let re_norm: T = re.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let im_norm: T = im.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if im_norm > symmetry_tol::<T>() * re_norm.max(T::min_positive_value()) {
        return Err(HausError::SymmetryViolation {
            asymmetry: (im_norm / re_norm).as_f64(),
        });
    }
    let n = spec.values.len();
    let dx = T::TAU() / (T::from_usize_lossy(n) * spec.dxi);
    let mut values = re;
    values.truncate(spec.signal_len);
    SampledSignal::new(spec.origin, dx, values)
}

/// Real and imaginary parts of the inverse transform on the full (padded) grid.
pub(crate) fn inverse_complex<T: Real>(spec: &Spectrum<T>) -> Result<(Vec<T>, Vec<T>)> {
    let n = spec.values.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(HausError::InvalidInput(format!(
            "spectrum length {n} is not a power of two"
        )));
    }
    let dx = T::TAU() / (T::from_usize_lossy(n) * spec.dxi);
    let half = n / 2;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for (k, c) in spec.values.iter().enumerate() {
        let xi = spec.xi(k);
        buf[(k + half) % n] = c * Complex::from_polar(T::one() / dx, xi * spec.origin);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n);
    let re = buf.iter().map(|c| c.re * scale).collect();
    let im = buf.iter().map(|c| c.im * scale).collect();
    Ok((re, im))
}

/// Applies the real, even Fourier multiplier `m` to `f`.
pub fn apply_multiplier<T: Real, F: Fn(T) -> T>(f: &SampledSignal<T>, m: F) -> Result<SampledSignal<T>> {
    inverse_fourier(&forward_fourier(f)?.map_real(m))
}

/// Trapezoid-rule `(int |f|^p)^{1/p}`.
pub fn lp_norm<T: Real>(f: &SampledSignal<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(HausError::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p == T::one() {
        let abs: Vec<T> = f.values.iter().map(|v| v.abs()).collect();
        return Ok(trapezoid(&abs, f.dx));
    }
    let pow: Vec<T> = f.values.iter().map(|v| v.abs().powf(p)).collect();
    Ok(trapezoid(&pow, f.dx).powf(p.recip()))
}

/// Fourier transform of `sin x / x`: `pi` inside `(-1, 1)`, `pi/2` at `|x| = 1`
/// and zero outside.
pub fn sinc_transform<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < T::one() {
        T::PI()
    } else if ax == T::one() {
        T::FRAC_PI_2()
    } else {
        T::zero()
    }
}

/// Diagnostic for grids that are too narrow or too coarse: the larger of the
/// energy fraction in the outer 1/32 of the grid (both ends) and the spectral
/// energy fraction above 7/8 of the Nyquist frequency.
pub fn spectral_leakage<T: Real>(f: &SampledSignal<T>) -> Result<T> {
    let total: T = f.values.iter().map(|v| *v * *v).sum();
    if total == T::zero() {
        return Ok(T::zero());
    }
    let n = f.len();
    let edge = (n / 32).max(1);
    let edge_energy: T = f.values[..edge]
        .iter()
        .chain(&f.values[n - edge..])
        .map(|v| *v * *v)
        .sum();
    let spec = forward_fourier(f)?;
    let cut = T::lit(0.875) * f.grid().nyquist();
    let spec_total: T = spec.values.iter().map(|c| c.norm_sqr()).sum();
    let spec_high: T = spec
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| spec.xi(*k).abs() > cut)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    Ok((edge_energy / total).max(spec_high / spec_total))
}

/// Compactly supported smooth bump `exp(1 - 1/(1-u^2))` on `|u| < 1`, peak 1 at 0.
pub fn smooth_bump<T: Real>(u: T) -> T {
    let q = T::one() - u * u;
    if q <= T::zero() {
        T::zero()
    } else {
        (T::one() - q.recip()).exp()
    }
}

/// Smooth transition that is 1 on `|u| <= 1`, 0 on `|u| >= 2` and `C^inf` between.
pub fn smooth_cutoff<T: Real>(u: T) -> T {
    let a = u.abs();
    if a <= T::one() {
        T::one()
    } else if a >= T::lit(2.0) {
        T::zero()
    } else {
        let s = a - T::one();
        let g = |v: T| if v > T::zero() { (-v.recip()).exp() } else { T::zero() };
        let num = g(T::one() - s);
        num / (num + g(s))
    }
}

/// Shape of an H^1 atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomShape {
    /// Odd smooth bump `u exp(-1/(1-u^2))`, normalised to peak 1.
    SmoothOddBump,
    /// Positive bump on the right half minus the same bump on the left half.
    DifferenceOfBumps,
}

/// A compactly supported, bounded, mean-zero test input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec<T> {
    pub center: T,
    pub halfwidth: T,
    pub shape: AtomShape,
}

impl<T: Real> AtomSpec<T> {
    pub fn new(center: T, halfwidth: T, shape: AtomShape) -> Result<Self> {
        if !(halfwidth > T::zero()) || !center.is_finite() {
            return Err(HausError::InvalidInput(format!(
                "atom needs finite center and halfwidth > 0 (got {center}, {halfwidth})"
            )));
        }
        Ok(Self {
            center,
            halfwidth,
            shape,
        })
    }

    /// Unscaled profile on `[-1, 1]`, peak magnitude 1.
    fn profile(&self, u: T) -> T {
        match self.shape {
            AtomShape::SmoothOddBump => {
                // maximiser of u exp(-1/(1-u^2)) solves (1-u^2)^2 = 2u^2
                let ustar = (T::lit(6.0).sqrt() - T::SQRT_2()) / T::lit(2.0);
                let peak = ustar * (-(T::one() - ustar * ustar).recip()).exp();
                let q = T::one() - u * u;
                if q <= T::zero() {
                    T::zero()
                } else {
                    u * (-q.recip()).exp() / peak
                }
            }
            AtomShape::DifferenceOfBumps => {
                let two = T::lit(2.0);
                smooth_bump(two * u - T::one()) - smooth_bump(two * u + T::one())
            }
        }
    }
}

/// Samples an atom on `grid`, then removes the residual discrete mean with a
/// bump-shaped correction supported inside the atom.
pub fn make_atom<T: Real>(spec: &AtomSpec<T>, grid: GridSpec<T>) -> Result<SampledSignal<T>> {
    let h = spec.halfwidth;
    let across = (T::lit(2.0) * h / grid.dx).floor();
    if across < T::lit(64.0) {
        return Err(HausError::Resolution(format!(
            "atom of halfwidth {h} spans only {across} cells of size {}",
            grid.dx
        )));
    }
    if spec.center - h < grid.x0 || spec.center + h > grid.x_end() {
        return Err(HausError::Resolution(format!(
            "grid [{}, {}] does not cover the atom support [{}, {}]",
            grid.x0,
            grid.x_end(),
            spec.center - h,
            spec.center + h
        )));
    }
    let amp = (T::lit(2.0) * h).recip();
    let mut values: Vec<T> = (0..grid.n)
        .map(|i| amp * spec.profile((grid.x(i) - spec.center) / h))
        .collect();
    let weights: Vec<T> = (0..grid.n)
        .map(|i| smooth_bump((grid.x(i) - spec.center) / h))
        .collect();
    let wsum = trapezoid(&weights, grid.dx);
    let mean = trapezoid(&values, grid.dx);
    if mean != T::zero() && wsum > T::zero() {
        for (v, w) in values.iter_mut().zip(&weights) {
            *v = *v - mean * *w / wsum;
        }
    }
    SampledSignal::new(grid.x0, grid.dx, values)
}

/// Real signal whose spectrum is `i xi bump(xi/B)` on the grid: supported in
/// `[-B, B]` and vanishing at zero. `grid.n` must be a power of two so that the
/// discrete spectrum is exactly band-limited.
pub fn make_bandlimited<T: Real>(bandwidth: T, grid: GridSpec<T>) -> Result<SampledSignal<T>> {
    let nyq = grid.nyquist();
    if !(bandwidth > T::zero()) {
        return Err(HausError::InvalidInput(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if bandwidth >= nyq {
        return Err(HausError::Aliasing {
            bandwidth: bandwidth.as_f64(),
            nyquist: nyq.as_f64(),
        });
    }
    if !grid.n.is_power_of_two() {
        return Err(HausError::InvalidInput(format!(
            "band-limited construction needs a power-of-two grid, got n = {}",
            grid.n
        )));
    }
    let spec = bandlimited_spectrum(bandwidth, grid)?;
    inverse_fourier(&spec)
}

pub(crate) fn bandlimited_spectrum<T: Real>(bandwidth: T, grid: GridSpec<T>) -> Result<Spectrum<T>> {
    let n = grid.n;
    let dxi = T::TAU() / (T::from_usize_lossy(n) * grid.dx);
    let xi0 = -T::from_usize_lossy(n / 2) * dxi;
    let values = (0..n)
        .map(|k| {
            let xi = xi0 + T::from_usize_lossy(k) * dxi;
            Complex::new(T::zero(), xi * smooth_bump(xi / bandwidth))
        })
        .collect();
    Spectrum::new(xi0, dxi, values, grid.x0, n)
}

/// `exp(-x^2/2)` sampled on `grid`.
pub fn gaussian<T: Real>(grid: GridSpec<T>) -> Result<SampledSignal<T>> {
    grid.sample(|x| (-x * x / T::lit(2.0)).exp())
}

/// `x exp(-x^2/2)`: smooth, mean zero, with transform `-i xi sqrt(2pi) exp(-xi^2/2)`.
pub fn gaussian_derivative<T: Real>(grid: GridSpec<T>) -> Result<SampledSignal<T>> {
    grid.sample(|x| x * (-x * x / T::lit(2.0)).exp())
}

/// `|f^(xi)|^2` of [`gaussian_derivative`].
pub fn gaussian_derivative_power<T: Real>(xi: T) -> T {
    T::TAU() * xi * xi * (-xi * xi).exp()
}
