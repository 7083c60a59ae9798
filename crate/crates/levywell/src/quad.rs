//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands and a
//! ratio-2 Richardson extrapolation table.

use num_complex::Complex64;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 10-21 Gauss-Kronrod pair (QUADPACK nodes, positive half).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// 21-point Gauss-Kronrod rule on `[a, b]`. Returns the Kronrod value and
/// a rescaled error estimate.
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_kronrod = f_center * WGK[10];
    let mut res_gauss = Complex64::new(0.0, 0.0);
    let mut res_abs = res_kronrod.norm();
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    fv[20] = f_center;

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[10 + j] = f2;
        let sum = f1 + f2;
        res_kronrod += sum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_gauss += sum * WG[j / 2];
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j] - mean).norm() + (fv[10 + j] - mean).norm());
    }

    let err = (res_kronrod - res_gauss).norm() * half.abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive quadrature to an absolute tolerance.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuad {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveQuad {
    fn default() -> Self {
        Self { abs_tol: 1e-9, max_intervals: 4096 }
    }
}

impl AdaptiveQuad {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    /// Integrate `f` over `[a, b]`, pre-splitting at the interior
    /// `breakpoints` (useful for known kinks).
    pub fn integrate<F: Fn(f64) -> Complex64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<Complex64> {
        let mut edges: Vec<f64> = vec![a];
        for &p in breakpoints {
            if p > a && p < b {
                edges.push(p);
            }
        }
        edges.push(b);
        edges.sort_by(f64::total_cmp);
        edges.dedup();

        let mut heap = BinaryHeap::new();
        let mut total = Complex64::new(0.0, 0.0);
        let mut total_err = 0.0;
        for w in edges.windows(2) {
            let (v, e) = gk21(f, w[0], w[1]);
            total += v;
            total_err += e;
            heap.push(Interval { a: w[0], b: w[1], value: v, error: e });
        }

        while total_err > self.abs_tol {
            if heap.len() >= self.max_intervals {
                return Err(Error::NumericalFailure {
                    what: "adaptive quadrature".into(),
                    achieved: total_err,
                    requested: self.abs_tol,
                });
            }
            let worst = heap.pop().expect("non-empty heap");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval no longer splittable in f64; accept what we have
                if worst.error > self.abs_tol {
                    return Err(Error::NumericalFailure {
                        what: "adaptive quadrature (interval exhausted)".into(),
                        achieved: total_err,
                        requested: self.abs_tol,
                    });
                }
                heap.push(worst);
                break;
            }
            let (v1, e1) = gk21(f, worst.a, mid);
            let (v2, e2) = gk21(f, mid, worst.b);
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
        }

        // re-sum from the heap for a stable result independent of the
        // update order above
        let mut acc = Complex64::new(0.0, 0.0);
        let mut parts: Vec<Interval> = heap.into_vec();
        parts.sort_by(|p, q| p.a.total_cmp(&q.a));
        for p in &parts {
            acc += p.value;
        }
        let _ = total;
        Ok(acc)
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<f64> {
        self.integrate(&|x| Complex64::new(f(x), 0.0), a, b, breakpoints)
            .map(|v| v.re)
    }
}

/// Result of the ratio-2 Richardson table.
#[derive(Debug, Clone)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Magnitude of the last diagonal increment.
    pub error_estimate: f64,
    /// Diagonal increments, for diagnostics.
    pub increments: Vec<f64>,
}

/// Richardson-extrapolate `f(eta) -> f(0)` from samples at a geometric
/// ladder `eta_0 > eta_0/2 > ... > eta_0/2^k`, assuming a power series
/// in `eta`. `values[j]` must correspond to `eta_0 / 2^j`.
///
/// Fails when the diagonal increments grow while still above `floor`
/// (non-monotone convergence).
pub fn richardson_ratio2(values: &[Complex64], floor: f64) -> Result<Extrapolated> {
    if values.len() < 4 {
        return Err(Error::Usage(format!(
            "richardson ladder needs at least 4 values (got {})",
            values.len()
        )));
    }
    let k = values.len();
    let mut rows: Vec<Vec<Complex64>> = vec![values.to_vec()];
    for m in 1..k {
        let prev = &rows[m - 1];
        let f = 2f64.powi(m as i32);
        let mut row = Vec::with_capacity(k - m);
        for j in 0..k - m {
            // entry j uses eta pair (eta_j, eta_{j+1}) of the previous row
            row.push((prev[j + 1] * f - prev[j]) / (f - 1.0));
        }
        rows.push(row);
    }
    let diag: Vec<Complex64> = (0..k).map(|m| rows[m][0]).collect();
    let increments: Vec<f64> = diag.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    for w in increments.windows(2) {
        if w[1] > w[0] && w[1] > floor {
            return Err(Error::NumericalFailure {
                what: format!(
                    "richardson extrapolation non-monotone (increments {:?})",
                    increments
                ),
                achieved: w[1],
                requested: floor,
            });
        }
    }
    Ok(Extrapolated {
        value: diag[k - 1],
        error_estimate: *increments.last().expect("k >= 4"),
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = AdaptiveQuad::with_tol(1e-12);
        let v = q
            .integrate_real(&|x| 3.0 * x * x, 0.0, 2.0, &[])
            .unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_with_decay() {
        // integral_0^inf cos(5x) e^{-x} dx = 1/26
        let q = AdaptiveQuad::with_tol(1e-12);
        let v = q
            .integrate_real(&|x| (5.0 * x).cos() * (-x).exp(), 0.0, 50.0, &[])
            .unwrap();
        assert!((v - 1.0 / 26.0).abs() < 1e-11, "err {}", (v - 1.0 / 26.0).abs());
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // integral_0^1 x^{-1/2} dx = 2
        let q = AdaptiveQuad { abs_tol: 1e-9, max_intervals: 20000 };
        let v = q.integrate_real(&|x| x.sqrt().recip(), 1e-300, 1.0, &[]).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "err {}", (v - 2.0).abs());
    }

    #[test]
    fn complex_integrand() {
        // integral_0^pi e^{ix} dx = 2i
        let q = AdaptiveQuad::with_tol(1e-12);
        let v = q
            .integrate(&|x| Complex64::new(0.0, x).exp(), 0.0, PI, &[])
            .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn breakpoints_help_kinks() {
        let q = AdaptiveQuad::with_tol(1e-12);
        let f = |x: f64| (x - 0.3).abs();
        let v = q.integrate_real(&f, 0.0, 1.0, &[0.3]).unwrap();
        let exact = 0.3f64.powi(2) / 2.0 + 0.7f64.powi(2) / 2.0;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn failure_reports_achieved_error() {
        let q = AdaptiveQuad { abs_tol: 1e-14, max_intervals: 4 };
        let err = q
            .integrate_real(&|x: f64| (40.0 * x).sin().abs(), 0.0, 10.0, &[])
            .unwrap_err();
        match err {
            Error::NumericalFailure { achieved, requested, .. } => {
                assert!(achieved > requested);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn richardson_recovers_limit() {
        // f(eta) = 1 + 3 eta - 2 eta^2 + eta^3  -> f(0) = 1
        let eta0 = 0.1;
        let vals: Vec<Complex64> = (0..5)
            .map(|j| {
                let e = eta0 / 2f64.powi(j);
                Complex64::new(1.0 + 3.0 * e - 2.0 * e * e + e * e * e, 0.0)
            })
            .collect();
        let out = richardson_ratio2(&vals, 1e-14).unwrap();
        assert!((out.value.re - 1.0).abs() < 1e-12);
        assert!(out.error_estimate < 1e-6);
    }

    #[test]
    fn richardson_rejects_noise() {
        let vals: Vec<Complex64> = [1.3, 1.1, 1.2, 0.9, 1.25]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        assert!(richardson_ratio2(&vals, 1e-12).is_err());
    }
}
