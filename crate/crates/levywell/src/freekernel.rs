//! Free-particle kernel of the Levy flight in momentum representation:
//!
//! ```text
//! K0(x_b t_b | x_a t_a) = (1/2 pi hbar) * integral dp
//!     exp[ i p (x_b - x_a)/hbar - i D_a (t_b - t_a) |p|^a / hbar ]
//! ```
//!
//! Folded onto `[0, inf)` with a cosine, this is evaluated two ways:
//!
//! * imaginary time (`t -> -i tau`): the integrand is a damped cosine and
//!   the kernel is a symmetric alpha-stable density, computed by adaptive
//!   quadrature with an asymptotic tail series for large `|dx|`;
//! * real time: the integral is conditionally convergent, so it is defined
//!   here through multiplicative damping `exp(-eta p^a)` plus a momentum
//!   cutoff, with the `eta -> 0` limit taken by Richardson extrapolation.
//!   The damping prescription is a regularization choice of this library,
//!   not something the momentum representation itself dictates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::FractionalParams;
use crate::quad::{richardson_ratio2, AdaptiveQuad, Extrapolated};

/// Real (oscillatory) or imaginary (Euclidean) elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeType {
    Real,
    Imaginary,
}

/// Scaled distance beyond which the stable-density tail series replaces
/// quadrature. Calibrated so the series' absolute error is below 1e-10.
const TAIL_SERIES_MIN_Z: f64 = 30.0;

/// One kernel evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct KernelQuery {
    pub x_b: f64,
    pub x_a: f64,
    pub t: f64,
    pub time_type: TimeType,
    pub damping_eta: f64,
    pub p_cutoff: f64,
    pub quad_tolerance: f64,
}

impl KernelQuery {
    /// Validated query. For real time with `eta > 0` the momentum cutoff
    /// must satisfy the damped tail bound
    /// `exp(-eta p_cutoff^alpha)/eta <= quad_tolerance`.
    pub fn new(
        x_b: f64,
        x_a: f64,
        t: f64,
        time_type: TimeType,
        damping_eta: f64,
        p_cutoff: f64,
        quad_tolerance: f64,
        params: &FractionalParams,
    ) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::Usage(format!(
                "elapsed time must be >= 0 (got {t}); the ordered-time convention \
                 lives in the well propagators"
            )));
        }
        if !(damping_eta >= 0.0) {
            return Err(Error::Usage(format!("damping_eta = {damping_eta} must be >= 0")));
        }
        if !(p_cutoff > 0.0) {
            return Err(Error::Usage(format!("p_cutoff = {p_cutoff} must be > 0")));
        }
        if !(quad_tolerance > 0.0) {
            return Err(Error::Usage("quad_tolerance must be > 0".into()));
        }
        if damping_eta > 0.0 {
            let bound = (-damping_eta * p_cutoff.powf(params.alpha())).exp() / damping_eta;
            if bound > quad_tolerance {
                return Err(Error::Usage(format!(
                    "p_cutoff too small: damped tail bound {bound:.3e} exceeds \
                     quad_tolerance {quad_tolerance:.3e}"
                )));
            }
        }
        Ok(Self { x_b, x_a, t, time_type, damping_eta, p_cutoff, quad_tolerance })
    }

    /// Imaginary-time query with an automatic cutoff.
    pub fn imaginary(x_b: f64, x_a: f64, tau: f64, params: &FractionalParams) -> Result<Self> {
        let tol = 1e-9;
        let p = auto_cutoff_imaginary(tau, tol, params);
        Self::new(x_b, x_a, tau, TimeType::Imaginary, 0.0, p, tol, params)
    }

    /// Real-time query at a fixed damping with an automatic cutoff.
    pub fn real_damped(
        x_b: f64,
        x_a: f64,
        t: f64,
        eta: f64,
        params: &FractionalParams,
    ) -> Result<Self> {
        let tol = 1e-9;
        let p = cutoff_for_damping(eta, tol, params.alpha());
        Self::new(x_b, x_a, t, TimeType::Real, eta, p, tol, params)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.quad_tolerance = tol;
        self
    }

    pub fn delta_x(&self) -> f64 {
        self.x_b - self.x_a
    }
}

/// Cutoff solving `exp(-eta p^a)/eta = tol/10`.
pub fn cutoff_for_damping(eta: f64, tol: f64, alpha: f64) -> f64 {
    assert!(eta > 0.0 && tol > 0.0);
    ((1.0 / (eta * tol * 0.1)).ln().max(1.0) / eta).powf(1.0 / alpha)
}

fn auto_cutoff_imaginary(tau: f64, tol: f64, params: &FractionalParams) -> f64 {
    // decay coefficient of exp(-D tau p^alpha / hbar) in p
    let c = params.d_alpha() * tau / params.hbar();
    if c <= 0.0 {
        return 1.0;
    }
    (((1.0 / (tol * c.min(1.0))).ln() + 5.0).max(1.0) / c).powf(1.0 / params.alpha())
}

/// Kernel value for one query. Imaginary-time values are real and positive;
/// real time requires `eta > 0` when `t > 0` (use
/// [`free_kernel_extrapolated`] for the `eta -> 0` limit).
pub fn free_kernel(q: &KernelQuery, params: &FractionalParams) -> Result<Complex64> {
    let alpha = params.alpha();
    let hbar = params.hbar();
    let dx = q.delta_x();
    match q.time_type {
        TimeType::Imaginary => {
            if q.t == 0.0 {
                return Err(Error::Usage(
                    "the t = 0 kernel is delta(x_b - x_a); evaluate it is not meaningful \
                     pointwise"
                        .into(),
                ));
            }
            Ok(Complex64::new(imaginary_kernel(dx, q.t, params, q.quad_tolerance)?, 0.0))
        }
        TimeType::Real => {
            if q.t > 0.0 && q.damping_eta == 0.0 {
                return Err(Error::Usage(
                    "real-time kernel with t > 0 needs damping_eta > 0; \
                     use free_kernel_extrapolated for the eta -> 0 limit"
                        .into(),
                ));
            }
            // work in k = p/hbar: phase coefficient i D t hbar^(a-1),
            // damping eta hbar^a
            let phase = params.d_alpha() * q.t * hbar.powf(alpha - 1.0);
            let damp = q.damping_eta * hbar.powf(alpha);
            let k_cut = q.p_cutoff / hbar;
            let coeff = Complex64::new(damp, phase);
            let f = |k: f64| (k * dx).cos() * (-coeff * k.powf(alpha)).exp();
            let quad = AdaptiveQuad {
                abs_tol: q.quad_tolerance,
                max_intervals: 60_000,
            };
            let bps = oscillation_breakpoints(dx, k_cut);
            let v = quad.integrate(&f, 0.0, k_cut, &bps)?;
            Ok(v / std::f64::consts::PI)
        }
    }
}

/// Imaginary-time kernel in k-units: `(1/pi) int_0^inf cos(k dx)
/// exp(-c k^a) dk` with `c = D tau hbar^(a-1)`.
fn imaginary_kernel(dx: f64, tau: f64, params: &FractionalParams, tol: f64) -> Result<f64> {
    let alpha = params.alpha();
    let c = params.d_alpha() * tau * params.hbar().powf(alpha - 1.0);
    let sigma = c.powf(1.0 / alpha);
    let z = dx.abs() / sigma;
    if alpha < 2.0 && z >= TAIL_SERIES_MIN_Z {
        if let Some(v) = stable_tail_series(dx.abs(), c, alpha, tol) {
            return Ok(v);
        }
    }
    let k_cut = (((1.0 / (tol * c.min(1.0))).ln() + 5.0).max(1.0) / c).powf(1.0 / alpha);
    let f = |k: f64| (k * dx).cos() * (-c * k.powf(alpha)).exp();
    let quad = AdaptiveQuad { abs_tol: tol, max_intervals: 60_000 };
    let v = quad.integrate_real(&f, 0.0, k_cut, &oscillation_breakpoints(dx, k_cut))?;
    Ok(v / std::f64::consts::PI)
}

/// Pre-splits an oscillatory range every few cosine periods so the first
/// Gauss-Kronrod pass already resolves the oscillation.
fn oscillation_breakpoints(dx: f64, k_cut: f64) -> Vec<f64> {
    let periods = dx.abs() * k_cut / (2.0 * std::f64::consts::PI);
    if periods < 8.0 {
        return Vec::new();
    }
    let step = 4.0 * 2.0 * std::f64::consts::PI / dx.abs();
    let n = (k_cut / step) as usize;
    (1..=n.min(20_000)).map(|j| j as f64 * step).collect()
}

/// Large-argument series of the symmetric stable density,
/// `(1/pi) sum_m (-1)^(m+1) Gamma(m a + 1)/m! sin(m pi a / 2) c^m x^(-m a - 1)`.
/// Returns `None` when the asymptotic terms fail to drop below `tol/10`.
fn stable_tail_series(x: f64, c: f64, alpha: f64, tol: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut m_fact = 1.0;
    for m in 1..=40 {
        m_fact *= m as f64;
        let term = neg_one_pow(m + 1)
            * libm::tgamma(m as f64 * alpha + 1.0)
            * (m as f64 * std::f64::consts::PI * alpha / 2.0).sin()
            * c.powi(m as i32)
            * x.powf(-(m as f64) * alpha - 1.0)
            / m_fact;
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < tol * 0.01 {
            return Some(sum / std::f64::consts::PI);
        }
    }
    None
}

fn neg_one_pow(m: usize) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Geometric damping ladder `eta0 / 2^j`, `j = 0..=levels`.
#[derive(Debug, Clone, Copy)]
pub struct EtaLadder {
    pub eta0: f64,
    pub levels: usize,
}

impl Default for EtaLadder {
    fn default() -> Self {
        Self { eta0: 0.1, levels: 4 }
    }
}

impl EtaLadder {
    pub fn etas(&self) -> Vec<f64> {
        (0..=self.levels).map(|j| self.eta0 / 2f64.powi(j as i32)).collect()
    }
}

/// Richardson-extrapolated `eta -> 0` limit of the damped real-time kernel.
///
/// All ladder entries share one momentum cutoff, chosen from the smallest
/// damping so that the truncation error is a smooth function of `eta` and
/// the extrapolation only sees the damping.
pub fn free_kernel_extrapolated(
    x_b: f64,
    x_a: f64,
    t: f64,
    ladder: &EtaLadder,
    params: &FractionalParams,
) -> Result<Extrapolated> {
    if t == 0.0 {
        return Err(Error::Usage(
            "t = 0 is the delta-function limit; the damped approximations only \
             concentrate as p_cutoff grows"
                .into(),
        ));
    }
    if ladder.levels < 3 {
        return Err(Error::Usage(format!(
            "eta ladder needs at least 4 rungs (levels >= 3, got {})",
            ladder.levels
        )));
    }
    let tol = 1e-9;
    let etas = ladder.etas();
    let p_common = cutoff_for_damping(*etas.last().expect("non-empty"), tol, params.alpha());
    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let q = KernelQuery::new(
            x_b,
            x_a,
            t,
            TimeType::Real,
            eta,
            p_common,
            tol,
            params,
        )?;
        values.push(free_kernel(&q, params)?);
    }
    richardson_ratio2(&values, 50.0 * tol)
}

/// Window integral of the imaginary-time kernel over `x_b`, with an
/// analytic estimate of the mass outside the window.
#[derive(Debug, Clone, Copy)]
pub struct KernelMass {
    /// Quadrature mass inside the window.
    pub window_mass: f64,
    /// Estimated two-sided tail mass outside the window.
    pub tail_estimate: f64,
    /// `window_mass + tail_estimate`; the momentum-space normalization
    /// says this should be 1.
    pub total: f64,
    /// False when the estimated tail exceeds the requested tolerance,
    /// i.e. the window is too narrow to resolve the mass by quadrature
    /// alone.
    pub window_adequate: bool,
}

/// Integrates the kernel over `x_b in [-window, window]` around `x_a`.
pub fn free_kernel_normalization(
    q: &KernelQuery,
    params: &FractionalParams,
    window: f64,
    tolerance: f64,
) -> Result<KernelMass> {
    if q.time_type != TimeType::Imaginary {
        return Err(Error::Usage(
            "normalization by window quadrature is implemented for imaginary time".into(),
        ));
    }
    if !(window > 0.0) {
        return Err(Error::Usage("window must be > 0".into()));
    }
    let tau = q.t;
    if tau == 0.0 {
        return Err(Error::Usage("t = 0 is the delta-function limit".into()));
    }
    let kernel = |dx: f64| -> f64 {
        imaginary_kernel(dx, tau, params, (q.quad_tolerance * 1e-2).max(1e-13))
            .expect("imaginary kernel quadrature")
    };
    let quad = AdaptiveQuad { abs_tol: tolerance * 1e-2, max_intervals: 60_000 };
    // peak sits at dx = 0; give the adaptive pass a head start there
    let sigma = (params.d_alpha() * tau * params.hbar().powf(params.alpha() - 1.0))
        .powf(1.0 / params.alpha());
    let mut bps = vec![-8.0 * sigma, -sigma, sigma, 8.0 * sigma];
    bps.retain(|&p| p.abs() < window);
    let window_mass = quad.integrate_real(&kernel, -window, window, &bps)?;
    let tail_estimate = tail_mass(window, tau, params);
    let total = window_mass + tail_estimate;
    Ok(KernelMass {
        window_mass,
        tail_estimate,
        total,
        window_adequate: tail_estimate <= tolerance,
    })
}

/// Two-sided mass of the imaginary-time kernel outside `[-w, w]`.
fn tail_mass(w: f64, tau: f64, params: &FractionalParams) -> f64 {
    let alpha = params.alpha();
    let c = params.d_alpha() * tau * params.hbar().powf(alpha - 1.0);
    if alpha == 2.0 {
        return libm::erfc(w / (2.0 * c.sqrt()));
    }
    // term-by-term integral of the tail series:
    // 2 * int_w^inf x^(-ma-1) dx = 2 w^(-ma) / (ma)
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut m_fact = 1.0;
    for m in 1..=40 {
        m_fact *= m as f64;
        let ma = m as f64 * alpha;
        let term = neg_one_pow(m + 1)
            * libm::tgamma(ma + 1.0)
            * (m as f64 * std::f64::consts::PI * alpha / 2.0).sin()
            * c.powi(m as i32)
            * w.powf(-ma)
            / (m_fact * ma);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-16 {
            break;
        }
    }
    2.0 * sum / std::f64::consts::PI
}
