//! Physical constants of the fractional well system.

use crate::error::{Error, Result};

/// Levy index `alpha`, diffusion coefficient `D_alpha`, action quantum
/// `hbar`, and well half-width `l`.
///
/// The legal range is `1 < alpha <= 2`. `alpha = 1` (the Cauchy case) is
/// accepted only through [`FractionalParams::new_validation`], which exists
/// so imaginary-time oracles with a closed form can exercise the kernel
/// machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    alpha: f64,
    d_alpha: f64,
    hbar: f64,
    l: f64,
}

impl FractionalParams {
    pub fn new(alpha: f64, d_alpha: f64, hbar: f64, l: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside the legal interval 1 < alpha <= 2"
            )));
        }
        Self::checked(alpha, d_alpha, hbar, l)
    }

    /// Like [`FractionalParams::new`] but admits `alpha = 1` for
    /// validation against the Cauchy closed form.
    pub fn new_validation(alpha: f64, d_alpha: f64, hbar: f64, l: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside the validation interval 1 <= alpha <= 2"
            )));
        }
        Self::checked(alpha, d_alpha, hbar, l)
    }

    fn checked(alpha: f64, d_alpha: f64, hbar: f64, l: f64) -> Result<Self> {
        if !(d_alpha > 0.0) {
            return Err(Error::Domain(format!("d_alpha = {d_alpha} must be > 0")));
        }
        if !(hbar > 0.0) {
            return Err(Error::Domain(format!("hbar = {hbar} must be > 0")));
        }
        if !(l > 0.0) {
            return Err(Error::Domain(format!("well half-width l = {l} must be > 0")));
        }
        Ok(Self { alpha, d_alpha, hbar, l })
    }

    /// Natural units `hbar = 1`, `D_alpha = 1`, `l = 1`.
    pub fn natural(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, 1.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d_alpha(&self) -> f64 {
        self.d_alpha
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Particle mass through `D_2 = 1/2m`. Defined only at `alpha = 2`.
    pub fn mass(&self) -> Result<f64> {
        if self.alpha == 2.0 {
            Ok(1.0 / (2.0 * self.d_alpha))
        } else {
            Err(Error::Usage(format!(
                "mass() is defined only at alpha = 2 (got alpha = {})",
                self.alpha
            )))
        }
    }
}
