//! Adaptive Gauss-Kronrod quadrature on the real line.
//!
//! Unbounded pieces are mapped onto a unit interval with `t = a + u/(1-u)`. Declared
//! singular points and support endpoints become panel boundaries, so the rule
//! never evaluates the integrand there, and bisection grades panels toward them.
//! When the panel touching a boundary stops shrinking under refinement the
//! integral is reported as divergent instead of returning a number.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{HausError, Result};
use crate::scalar::Real;

/// Default evaluation budget for one call.
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Number of integrand evaluations per panel.
pub const EVALS_PER_PANEL: usize = 21;

/// Where an integrand lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support<T> {
    /// `[lo, hi]`; either end may be infinite.
    Interval { lo: T, hi: T },
    /// `inner <= |t| <= outer`; `outer` may be infinite.
    Symmetric { inner: T, outer: T },
}

impl<T: Real> Support<T> {
    pub fn whole_line() -> Self {
        Support::Interval {
            lo: T::neg_infinity(),
            hi: T::infinity(),
        }
    }

    /// Ordered list of disjoint intervals covered by the support.
    pub fn intervals(&self) -> Vec<(T, T)> {
        match *self {
            Support::Interval { lo, hi } => {
                if lo < hi {
                    vec![(lo, hi)]
                } else {
                    vec![]
                }
            }
            Support::Symmetric { inner, outer } => {
                let inner = inner.max(T::zero());
                if inner >= outer {
                    vec![]
                } else if inner == T::zero() {
                    vec![(-outer, outer)]
                } else {
                    vec![(-outer, -inner), (inner, outer)]
                }
            }
        }
    }
}

/// A function to integrate, its support and its known trouble spots.
#[derive(Clone)]
pub struct Integrand<T, F> {
    pub evaluator: F,
    pub singular_points: Vec<T>,
    pub support: Support<T>,
}

impl<T: Real, F: Fn(T) -> T> Integrand<T, F> {
    pub fn new(evaluator: F, support: Support<T>) -> Self {
        Self {
            evaluator,
            singular_points: Vec::new(),
            support,
        }
    }

    pub fn on(evaluator: F, lo: T, hi: T) -> Self {
        Self::new(evaluator, Support::Interval { lo, hi })
    }

    pub fn with_singular_points<I: IntoIterator<Item = T>>(mut self, pts: I) -> Self {
        self.singular_points.extend(pts);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    pub panels_used: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_evals: usize,
    /// Upper bound on the width of the initial panels of finite pieces.
    pub max_panel_width: Option<T>,
    /// Disable divergence detection (for integrands known to be regular).
    pub detect_divergence: bool,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_evals: DEFAULT_MAX_EVALS,
            max_panel_width: None,
            detect_divergence: true,
        }
    }

    /// 1e-10 relative / 1e-12 absolute, used for admissibility integrals.
    pub fn admissibility() -> Self {
        Self::new(T::lit(1e-10), T::lit(1e-12))
    }

    /// 1e-8 relative / 1e-10 absolute, used for kernel integrals.
    pub fn kernel() -> Self {
        Self::new(T::lit(1e-8), T::lit(1e-10))
    }

    pub fn with_max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(HausError::InvalidInput(format!(
                "tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        Ok(())
    }
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut e = err.abs();
    if res_asc != T::zero() && e != T::zero() {
        let scale = (T::lit(200.0) * e / res_asc).powf(T::lit(1.5));
        e = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = T::lit(50.0) * T::eps();
    if res_abs > T::min_positive_value() / fifty_eps {
        e = e.max(fifty_eps * res_abs);
    }
    e
}

/// One 21-point Gauss-Kronrod panel: `(value, error estimate)`.
///
/// Returns an error if the integrand produces a non-finite value.
pub fn gauss_kronrod21<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<(T, T)> {
    let center = T::lit(0.5) * (a + b);
    let half = T::lit(0.5) * (b - a);
    let abs_half = half.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    let fc = f(center);
    check_finite(fc, center)?;
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = (res_k).abs();
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        check_finite(f1, x1)?;
        check_finite(f2, x2)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * T::lit(0.5);
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half);
    Ok((value, err))
}

fn check_finite<T: Real>(v: T, at: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(HausError::InvalidInput(format!(
            "integrand is not finite at t = {at} (value {v})"
        )))
    }
}

/// Coordinate map of one piece of the domain.
///
/// Unbounded ends use `t = origin + u/(1-u)` written in `w = 1 - u`, i.e.
/// `t = origin + (1-w)/w` on `w in (0, 1]`, so the point at infinity sits at
/// `w = 0` where floating point keeps full relative resolution.
#[derive(Debug, Clone, Copy)]
enum Piece<T> {
    Finite,
    Right { origin: T },
    Left { origin: T },
}

impl<T: Real> Piece<T> {
    #[inline]
    fn eval<F: Fn(T) -> T>(&self, f: &F, w: T) -> T {
        match *self {
            Piece::Finite => f(w),
            Piece::Right { origin } => {
                let v = f(origin + (T::one() - w) / w);
                if v == T::zero() {
                    v
                } else {
                    v / w / w
                }
            }
            Piece::Left { origin } => {
                let v = f(origin - (T::one() - w) / w);
                if v == T::zero() {
                    v
                } else {
                    v / w / w
                }
            }
        }
    }

    fn to_t(&self, w: T) -> T {
        match *self {
            Piece::Finite => w,
            Piece::Right { origin } => {
                if w <= T::zero() {
                    T::infinity()
                } else {
                    origin + (T::one() - w) / w
                }
            }
            Piece::Left { origin } => {
                if w <= T::zero() {
                    T::neg_infinity()
                } else {
                    origin - (T::one() - w) / w
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor {
    None,
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    piece: usize,
    a: T,
    b: T,
    value: T,
    err: T,
    anchor: Anchor,
    streak: u8,
}

struct ByError<T>(Panel<T>);

impl<T: Real> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for ByError<T> {}
impl<T: Real> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .err
            .partial_cmp(&other.0.err)
            .unwrap_or(Ordering::Equal)
            // deterministic tie-break: leftmost panel first
            .then_with(|| other.0.piece.cmp(&self.0.piece))
            .then_with(|| other.0.a.partial_cmp(&self.0.a).unwrap_or(Ordering::Equal))
    }
}

/// Consecutive non-shrinking refinements next to a boundary that flag divergence.
const DIVERGENCE_STREAK: u8 = 12;
const DIVERGENCE_RATIO: f64 = 0.97;

/// Splits the support at singular points and maps unbounded ends.
fn pieces<T: Real>(support: &Support<T>, singular: &[T]) -> Vec<(Piece<T>, T, T)> {
    let mut out = Vec::new();
    for (lo, hi) in support.intervals() {
        let mut cuts: Vec<T> = singular
            .iter()
            .copied()
            .filter(|p| p.is_finite() && *p > lo && *p < hi)
            .collect();
        if lo == T::neg_infinity() && hi == T::infinity() && !cuts.iter().any(|c| *c == T::zero()) {
            cuts.push(T::zero());
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        cuts.dedup();
        let mut bounds = vec![lo];
        bounds.extend(cuts);
        bounds.push(hi);
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == T::neg_infinity() {
                out.push((Piece::Left { origin: b }, T::zero(), T::one()));
            } else if b == T::infinity() {
                out.push((Piece::Right { origin: a }, T::zero(), T::one()));
            } else {
                out.push((Piece::Finite, a, b));
            }
        }
    }
    out
}

/// Updates the run of refinements in which the panel next to a boundary kept
/// (almost) all of its parent's mass.
fn track_boundary<T: Real>(child: &mut Panel<T>, parent: &Panel<T>, target: T) {
    let ratio = if parent.value != T::zero() {
        (child.value / parent.value).abs()
    } else {
        T::zero()
    };
    child.streak = if ratio >= T::lit(DIVERGENCE_RATIO) && child.err > target {
        parent.streak.saturating_add(1)
    } else {
        0
    };
}

fn splittable<T: Real>(a: T, b: T) -> bool {
    let m = T::lit(0.5) * (a + b);
    m > a && m < b && (b - a) > T::lit(4.0) * T::eps() * a.abs().max(b.abs())
}

/// Adaptive integration with the default evaluation budget.
pub fn integrate<T: Real, F: Fn(T) -> T>(g: &Integrand<T, F>, rel_tol: T, abs_tol: T) -> Result<QuadResult<T>> {
    integrate_with(g, &QuadOptions::new(rel_tol, abs_tol))
}

pub fn integrate_with<T: Real, F: Fn(T) -> T>(g: &Integrand<T, F>, opts: &QuadOptions<T>) -> Result<QuadResult<T>> {
    opts.validate()?;
    let pieces = pieces(&g.support, &g.singular_points);
    run_adaptive(&g.evaluator, &pieces, opts)
}

fn run_adaptive<T: Real, F: Fn(T) -> T>(f: &F, pieces: &[(Piece<T>, T, T)], opts: &QuadOptions<T>) -> Result<QuadResult<T>> {
    let mut heap: BinaryHeap<ByError<T>> = BinaryHeap::new();
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut evals = 0usize;

    for (idx, (piece, a, b)) in pieces.iter().enumerate() {
        let subdivisions = match (piece, opts.max_panel_width) {
            (Piece::Finite, Some(w)) if w > T::zero() => {
                ((*b - *a) / w).ceil().to_usize().unwrap_or(1).clamp(1, 1 << 20)
            }
            _ => 1,
        };
        let step = (*b - *a) / T::from_usize_lossy(subdivisions);
        for k in 0..subdivisions {
            let pa = *a + T::from_usize_lossy(k) * step;
            let pb = if k + 1 == subdivisions { *b } else { pa + step };
            let (value, err) = gauss_kronrod21(|u| piece.eval(f, u), pa, pb)?;
            evals += EVALS_PER_PANEL;
            let anchor = match (k == 0, k + 1 == subdivisions) {
                (true, true) => Anchor::Both,
                (true, false) => Anchor::Left,
                (false, true) => Anchor::Right,
                _ => Anchor::None,
            };
            heap.push(ByError(Panel {
                piece: idx,
                a: pa,
                b: pb,
                value,
                err,
                anchor,
                streak: 0,
            }));
        }
    }

    let totals = |heap: &BinaryHeap<ByError<T>>, done: &[Panel<T>]| -> (T, T) {
        let mut all: Vec<&Panel<T>> = heap.iter().map(|p| &p.0).chain(done.iter()).collect();
        all.sort_by(|x, y| x.piece.cmp(&y.piece).then(x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal)));
        all.iter().fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.err))
    };

    let (mut value, mut err) = totals(&heap, &done);
    loop {
        if err <= opts.target(value) {
            let (v, e) = totals(&heap, &done);
            if e <= opts.target(v) {
                return Ok(QuadResult {
                    value: v,
                    abs_error_estimate: e,
                    panels_used: heap.len() + done.len(),
                    evaluations: evals,
                });
            }
            value = v;
            err = e;
            continue;
        }
        if evals + 2 * EVALS_PER_PANEL > opts.max_evals {
            let (v, e) = totals(&heap, &done);
            return Err(HausError::ConvergenceFailure {
                estimate: v.as_f64(),
                error: e.as_f64(),
                evaluations: evals,
            });
        }
        let Some(ByError(p)) = heap.pop() else {
            let (v, e) = totals(&heap, &done);
            return Err(HausError::ConvergenceFailure {
                estimate: v.as_f64(),
                error: e.as_f64(),
                evaluations: evals,
            });
        };
        if !splittable(p.a, p.b) {
            done.push(p);
            continue;
        }
        let piece = pieces[p.piece].0;
        let m = T::lit(0.5) * (p.a + p.b);
        let (lv, le) = gauss_kronrod21(|u| piece.eval(f, u), p.a, m)?;
        let (rv, re) = gauss_kronrod21(|u| piece.eval(f, u), m, p.b)?;
        evals += 2 * EVALS_PER_PANEL;

        let (mut left, mut right) = (
            Panel {
                a: p.a,
                b: m,
                value: lv,
                err: le,
                anchor: Anchor::None,
                streak: 0,
                ..p
            },
            Panel {
                a: m,
                b: p.b,
                value: rv,
                err: re,
                anchor: Anchor::None,
                streak: 0,
                ..p
            },
        );
        if matches!(p.anchor, Anchor::Left | Anchor::Both) {
            left.anchor = Anchor::Left;
            track_boundary(&mut left, &p, opts.target(value));
            if opts.detect_divergence && left.streak >= DIVERGENCE_STREAK {
                return Err(HausError::Divergent {
                    near: piece.to_t(p.a).as_f64(),
                });
            }
        }
        if matches!(p.anchor, Anchor::Right | Anchor::Both) {
            right.anchor = Anchor::Right;
            track_boundary(&mut right, &p, opts.target(value));
            if opts.detect_divergence && right.streak >= DIVERGENCE_STREAK {
                return Err(HausError::Divergent {
                    near: piece.to_t(p.b).as_f64(),
                });
            }
        }
        value = value - p.value + lv + rv;
        err = err - p.err + le + re;
        heap.push(ByError(left));
        heap.push(ByError(right));
    }
}

/// Like [`integrate`], for integrands oscillating at angular `frequency`.
///
/// Finite pieces start from panels no wider than a half period. Unbounded
/// pieces are summed half period by half period and the partial sums are
/// accelerated with Wynn's epsilon algorithm; if the half-period
/// contributions stop alternating in sign the remaining tail is integrated
/// through the `u/(1-u)` map instead.
pub fn integrate_oscillatory<T: Real, F: Fn(T) -> T>(g: &Integrand<T, F>, frequency: T, rel_tol: T) -> Result<QuadResult<T>> {
    let abs_tol = (rel_tol * T::lit(1e-2)).max(T::lit(1e-14));
    integrate_oscillatory_with(g, frequency, &QuadOptions::new(rel_tol, abs_tol))
}

pub fn integrate_oscillatory_with<T: Real, F: Fn(T) -> T>(
    g: &Integrand<T, F>,
    frequency: T,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    opts.validate()?;
    if !frequency.is_finite() {
        return Err(HausError::InvalidInput(format!("frequency must be finite, got {frequency}")));
    }
    let omega = frequency.abs();
    if omega == T::zero() {
        return integrate_with(g, opts);
    }
    let half_period = T::PI() / omega;
    let finite_opts = QuadOptions {
        max_panel_width: Some(half_period),
        ..*opts
    };

    let mut finite: Vec<(T, T)> = Vec::new();
    let mut right_tails: Vec<T> = Vec::new();
    let mut left_tails: Vec<T> = Vec::new();
    for (lo, hi) in g.support.intervals() {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => finite.push((lo, hi)),
            (true, false) => right_tails.push(lo),
            (false, true) => left_tails.push(hi),
            (false, false) => {
                left_tails.push(T::zero());
                right_tails.push(T::zero());
            }
        }
    }

    let mut total = QuadResult {
        value: T::zero(),
        abs_error_estimate: T::zero(),
        panels_used: 0,
        evaluations: 0,
    };
    let mut absorb = |r: QuadResult<T>| {
        total.value = total.value + r.value;
        total.abs_error_estimate = total.abs_error_estimate + r.abs_error_estimate;
        total.panels_used += r.panels_used;
        total.evaluations += r.evaluations;
    };
    for (lo, hi) in finite {
        let piece = Integrand {
            evaluator: &g.evaluator,
            singular_points: g.singular_points.clone(),
            support: Support::Interval { lo, hi },
        };
        absorb(integrate_with(&piece, &finite_opts)?);
    }
    for lo in right_tails {
        absorb(oscillatory_tail(&g.evaluator, lo, &g.singular_points, half_period, &finite_opts)?);
    }
    for hi in left_tails {
        let mirrored: Vec<T> = g.singular_points.iter().map(|p| -*p).collect();
        let reflected = |t: T| (g.evaluator)(-t);
        absorb(oscillatory_tail(&reflected, -hi, &mirrored, half_period, &finite_opts)?);
    }
    Ok(total)
}

/// `int_lo^inf f` for an oscillating `f`, cycle by cycle with extrapolation.
fn oscillatory_tail<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    singular: &[T],
    half_period: T,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    const MAX_CYCLES: usize = 20_000;
    const WINDOW: usize = 24;
    const SAME_SIGN_SWITCH: usize = 8;

    // align cycle boundaries with the zeros of sin(omega t), after every singular point
    let last_sing = singular
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo)
        .fold(lo, T::max);
    let start = ((last_sing / half_period).floor() + T::one()) * half_period;

    let head_piece = Integrand {
        evaluator: f,
        singular_points: singular.to_vec(),
        support: Support::Interval { lo, hi: start },
    };
    let head = integrate_with(&head_piece, opts)?;
    let mut value = head.value;
    let mut err = head.abs_error_estimate;
    let mut panels = head.panels_used;
    let mut evals = head.evaluations;

    let cycle_opts = QuadOptions {
        max_panel_width: None,
        abs_tol: opts.abs_tol * T::lit(1e-3),
        ..*opts
    };
    let mut partial: Vec<T> = Vec::new();
    let mut terms: Vec<T> = Vec::new();
    let mut running = T::zero();
    let mut estimates: Vec<T> = Vec::new();
    for k in 0..MAX_CYCLES {
        let a = start + T::from_usize_lossy(k) * half_period;
        let b = a + half_period;
        let r = integrate_with(&Integrand::on(f, a, b), &cycle_opts)?;
        evals += r.evaluations;
        panels += r.panels_used;
        err = err + r.abs_error_estimate;
        running = running + r.value;
        terms.push(r.value);
        partial.push(running);

        let n = terms.len();
        if n >= SAME_SIGN_SWITCH {
            let recent = &terms[n - SAME_SIGN_SWITCH..];
            let nonneg = recent.iter().all(|v| *v >= T::zero());
            let nonpos = recent.iter().all(|v| *v <= T::zero());
            if nonneg || nonpos {
                // not oscillating at this scale: integrate the rest directly
                let rest = integrate_with(
                    &Integrand::new(f, Support::Interval { lo: b, hi: T::infinity() }),
                    &QuadOptions {
                        max_panel_width: None,
                        ..*opts
                    },
                )?;
                return Ok(QuadResult {
                    value: value + running + rest.value,
                    abs_error_estimate: err + rest.abs_error_estimate,
                    panels_used: panels + rest.panels_used,
                    evaluations: evals + rest.evaluations,
                });
            }
        }
        if n >= 3 {
            let window = &partial[n.saturating_sub(WINDOW)..];
            let est = wynn_epsilon(window);
            estimates.push(est);
            let m = estimates.len();
            if m >= 3 {
                let target = opts.target(value + est) * T::lit(0.5);
                let d1 = (estimates[m - 1] - estimates[m - 2]).abs();
                let d2 = (estimates[m - 1] - estimates[m - 3]).abs();
                if d1.max(d2) <= target {
                    return Ok(QuadResult {
                        value: value + est,
                        abs_error_estimate: err + d1.max(d2),
                        panels_used: panels,
                        evaluations: evals,
                    });
                }
            }
        }
        if evals > opts.max_evals {
            break;
        }
    }
    value = value + estimates.last().copied().unwrap_or(running);
    Err(HausError::ConvergenceFailure {
        estimate: value.as_f64(),
        error: err.as_f64(),
        evaluations: evals,
    })
}

/// Wynn's epsilon algorithm: best even-column estimate of the limit of `s`.
pub fn wynn_epsilon<T: Real>(s: &[T]) -> T {
    let n = s.len();
    if n == 0 {
        return T::zero();
    }
    if n < 3 {
        return s[n - 1];
    }
    // prev = column k-1, cur = column k
    let mut prev: Vec<T> = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == T::zero() {
                // column has converged exactly
                return if k % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + diff.recip());
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            let candidate = *cur.last().expect("non-empty column");
            if !candidate.is_finite() {
                break;
            }
            best = candidate;
        }
    }
    best
}
