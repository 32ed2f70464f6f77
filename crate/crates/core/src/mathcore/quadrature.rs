//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. Semi-infinite supports
//! `[a, ∞)` are mapped onto `[0, 1)` with `x = a + t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Finite {
        lower: f64,
        upper: f64,
    },
    /// `[lower, ∞)`
    SemiInfinite {
        lower: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

/// Quadrature settings. [`integrate`] covers the common case.
#[derive(Debug, Clone)]
pub struct Quadrature {
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
    breakpoints: Vec<f64>,
}

impl Quadrature {
    pub fn new(abs_tol: f64) -> Self {
        Quadrature { abs_tol, rel_tol: 0.0, max_intervals: 2000, breakpoints: Vec::new() }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals.max(1);
        self
    }

    /// Points (in the original variable) where the integrand changes
    /// character. Points outside the support are ignored.
    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, support: Support) -> Result<Integral> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        match support {
            Support::Finite { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite()) {
                    return Err(Error::domain("finite support needs finite bounds"));
                }
                if lower == upper {
                    return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
                }
                if lower > upper {
                    let r = self.integrate(f, Support::Finite { lower: upper, upper: lower })?;
                    return Ok(Integral { value: -r.value, ..r });
                }
                let cuts = self.cuts(lower, upper, |x| x);
                self.adapt(&f, &cuts)
            }
            Support::SemiInfinite { lower } => {
                if !lower.is_finite() {
                    return Err(Error::domain("semi-infinite support needs a finite lower bound"));
                }
                let g = |t: f64| {
                    let s = 1.0 - t;
                    f(lower + t / s) / (s * s)
                };
                let cuts = self.cuts(0.0, 1.0, |x| {
                    let u = x - lower;
                    u / (1.0 + u)
                });
                self.adapt(&g, &cuts)
            }
        }
    }

    fn cuts(&self, a: f64, b: f64, to_t: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut cuts = vec![a, b];
        cuts.extend(self.breakpoints.iter().map(|&x| to_t(x)).filter(|t| t.is_finite() && *t > a && *t < b));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    fn adapt<F: Fn(f64) -> f64>(&self, f: &F, cuts: &[f64]) -> Result<Integral> {
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in cuts.windows(2) {
            heap.push(gauss_kronrod(f, w[0], w[1]));
            evaluations += 15;
        }

        loop {
            let (value, error) = totals(&heap);
            if !value.is_finite() {
                return Err(Error::domain("integrand is not finite on the support"));
            }
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                return Ok(Integral { value, error, evaluations });
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::Quadrature { estimate: value, error_bound: error });
            }
            let worst = heap.pop().expect("nonempty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                heap.push(worst);
                let (value, error) = totals(&heap);
                return Err(Error::Quadrature { estimate: value, error_bound: error });
            }
            heap.push(gauss_kronrod(f, worst.a, mid));
            heap.push(gauss_kronrod(f, mid, worst.b));
            evaluations += 30;
        }
    }
}

/// Integrates `f` over `support` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, support: Support, tol: f64) -> Result<Integral> {
    Quadrature::new(tol).integrate(f, support)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Sums in left-to-right order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = f_center * WG[3];
    let mut res_k = f_center * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    #[allow(clippy::needless_range_loop)]
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let h = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    Segment { a, b, value, error }
}

/// QUADPACK's error heuristic: scale the Gauss/Kronrod difference and floor it
/// at the roundoff level of the integrand.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}
