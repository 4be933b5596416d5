//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! The integrand may be real, complex, or a small fixed-size vector of reals
//! (anything implementing [`QuadValue`]); vector integrands share one set of
//! abscissae, which halves the cost of integrating `C_a` and `C_c` together.
//!
//! Interior break points split the initial partition so that kinks, jumps
//! and narrow peaks sit on interval boundaries. GK abscissae never touch the
//! end points, so a break point placed exactly on a pole is never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by the integrator.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        for a in self.iter_mut() {
            *a *= s;
        }
        self
    }
    fn norm(&self) -> f64 {
        self.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-10)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

// 21-point Kronrod abscissae (non-negative half, descending) and weights;
// the odd entries are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
pub fn gauss_kronrod_21<T, F>(f: &mut F, a: f64, b: f64) -> (T, f64)
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center.scale(WGK[10]);
    let mut res_g = T::zero();
    let mut fv = [(T::zero(), T::zero()); 10];
    let mut res_abs = WGK[10] * f_center.norm();

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        let pair = f1.add(f2);
        res_k = res_k.add(pair.scale(WGK[j]));
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g = res_g.add(pair.scale(WG[j / 2]));
        }
    }

    let mean = res_k.scale(0.5);
    let mut res_asc = WGK[10] * f_center.add(mean.scale(-1.0)).norm();
    for j in 0..10 {
        let (f1, f2) = fv[j];
        res_asc += WGK[j]
            * (f1.add(mean.scale(-1.0)).norm() + f2.add(mean.scale(-1.0)).norm());
    }

    let scale = half.abs();
    res_abs *= scale;
    res_asc *= scale;
    let value = res_k.scale(half);
    let mut err = res_k.add(res_g.scale(-1.0)).scale(half).norm();

    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over `[points[0], points[last]]`, using every entry of
/// `points` as an initial break point. `points` must be sorted ascending;
/// repeated entries are ignored.
pub fn integrate<T, F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Integral<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::invalid("points", "need at least two break points"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("points", "break points must be finite"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("points", "break points must be ascending"));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_21(&mut f, w[0], w[1]);
            evaluations += 21;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    if heap.is_empty() {
        return Ok(Integral {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }

    loop {
        let (total, total_err) = heap
            .iter()
            .fold((T::zero(), 0.0), |(v, e), s| (v.add(s.value), e + s.error));
        let target = tol.target(total.norm());
        if total_err <= target {
            return Ok(Integral {
                value: total,
                error: total_err,
                evaluations,
                intervals: heap.len(),
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                estimate: total_err,
                requested: target,
            });
        }

        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; the remaining error
            // budget cannot be spent anywhere useful.
            heap.push(worst);
            let estimate = heap.iter().map(|s| s.error).sum::<f64>();
            return Err(Error::QuadratureNonConvergence {
                estimate,
                requested: target,
            });
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, worst.b);
        evaluations += 42;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates `f` over the whole real line through `x = center + scale·tan θ`.
/// `interior` are break points in `x`; they are mapped into `θ`.
pub fn integrate_real_line<T, F>(
    mut f: F,
    center: f64,
    scale: f64,
    interior: &[f64],
    tol: Tolerance,
) -> Result<Integral<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(scale > 0.0) {
        return Err(Error::invalid("scale", "must be positive"));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut thetas: Vec<f64> = interior
        .iter()
        .map(|x| ((x - center) / scale).atan())
        .collect();
    thetas.push(-half_pi);
    thetas.push(half_pi);
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();

    integrate(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let jac = scale / (c * c);
            f(center + scale * s / c).scale(jac)
        },
        &thetas,
        tol,
    )
}

/// Sorted, de-duplicated break points restricted to `[lo, hi]` (which are
/// always included).
pub fn break_points(lo: f64, hi: f64, candidates: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = candidates
        .into_iter()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Break points on a geometric ladder around a narrow feature at `center`:
/// `center ± width·ratio^k` for `k = 0, 1, …` until the offset exceeds `reach`.
pub fn peak_ladder(center: f64, width: f64, reach: f64) -> Vec<f64> {
    let mut pts = vec![center];
    if !(width > 0.0) || !width.is_finite() {
        return pts;
    }
    let mut offset = width;
    while offset < reach {
        pts.push(center - offset);
        pts.push(center + offset);
        offset *= 8.0;
    }
    pts
}
