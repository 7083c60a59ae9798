//! Time evolution of in-well states: the production path rotates
//! eigenbasis coefficients by `exp(-i E_n dt / hbar)`; the kernel-matrix
//! path applies the discretized propagator and exists as a cross-check of
//! the integral evolution rule `psi_f(x_b) = integral K(x_b|x_a) psi_i(x_a) dx_a`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, WaveFunction};
use crate::params::FractionalParams;
use crate::well::{eigenfunction_values, eigenstate, PropagatorMatrix};
use crate::Grid;

/// Eigenbasis coefficients `c_n = <phi_n, psi>`, `n = 1..=N`.
#[derive(Debug, Clone)]
pub struct SpectralCoefficients {
    coeffs: Vec<Complex64>,
    params: FractionalParams,
    /// Time offset accumulated by [`SpectralCoefficients::evolve`].
    t_ref: f64,
}

impl SpectralCoefficients {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    /// `sum |c_n|^2`; 1 minus this is the truncated-mass diagnostic for a
    /// normalized state.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum E_n |c_n|^2`.
    pub fn energy_expectation(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                eigenstate(i + 1, &self.params)
                    .expect("n >= 1")
                    .energy()
                    * c.norm_sqr()
            })
            .sum()
    }

    /// Phase rotation `c_n -> c_n exp(-i E_n dt / hbar)`.
    pub fn evolve(&self, dt: f64) -> Self {
        let hbar = self.params.hbar();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = eigenstate(i + 1, &self.params).expect("n >= 1").energy();
                c * Complex64::new(0.0, -e * dt / hbar).exp()
            })
            .collect();
        Self { coeffs, params: self.params, t_ref: self.t_ref + dt }
    }

    /// `sum_n c_n phi_n(x)` sampled on `grid`.
    pub fn reconstruct(&self, grid: &Grid) -> Result<WaveFunction> {
        let states: Vec<_> = (1..=self.coeffs.len())
            .map(|n| eigenstate(n, &self.params))
            .collect::<Result<_>>()?;
        let mut out = WaveFunction::zeros(*grid);
        for (i, x) in grid.points().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, s) in self.coeffs.iter().zip(&states) {
                acc += c * s.eval(x);
            }
            out.values_mut()[i] = acc;
        }
        Ok(out)
    }
}

/// Expands `psi` over the first `n_modes` well eigenfunctions.
///
/// `psi` may live on a grid larger than the well, but any probability mass
/// outside `[-l, l]` above `1e-10` is a usage error: such a state is not
/// in the span of the basis.
pub fn expand(
    psi: &WaveFunction,
    n_modes: usize,
    params: &FractionalParams,
) -> Result<SpectralCoefficients> {
    if n_modes < 1 {
        return Err(Error::Usage("expansion needs at least one mode".into()));
    }
    let grid = psi.grid();
    let l = params.l();
    let mut outside = 0.0;
    for (i, x) in grid.points().enumerate() {
        if x.abs() > l {
            outside += psi.values()[i].norm_sqr() * grid.weight(i);
        }
    }
    if outside > 1e-10 {
        return Err(Error::Usage(format!(
            "state carries {outside:.3e} probability mass outside the well"
        )));
    }
    let coeffs = (1..=n_modes)
        .map(|n| {
            let phi = eigenfunction_values(&eigenstate(n, params)?, grid)?;
            inner_product(&phi, psi)
        })
        .collect::<Result<_>>()?;
    Ok(SpectralCoefficients { coeffs, params: *params, t_ref: 0.0 })
}

/// One application of the quadrature evolution rule
/// `psi_f(x_i) = h sum_j K(x_i, x_j) psi(x_j)`.
pub fn evolve_by_kernel(psi: &WaveFunction, propagator: &PropagatorMatrix) -> Result<WaveFunction> {
    if psi.grid() != propagator.grid() {
        return Err(Error::Usage("state and propagator grids differ".into()));
    }
    let grid = *psi.grid();
    let h = grid.spacing();
    let n = grid.len();
    let k = propagator.entries();
    let mut out = WaveFunction::zeros(grid);
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += k[(i, j)] * psi.values()[j];
        }
        out.values_mut()[i] = acc * h;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freekernel::TimeType;
    use crate::well::{propagator_matrix, PropagatorMethod};
    use std::f64::consts::PI;

    fn natural(alpha: f64) -> FractionalParams {
        FractionalParams::natural(alpha).unwrap()
    }

    fn well_grid(n: usize) -> Grid {
        Grid::bounded(-1.0, 1.0, n).unwrap()
    }

    /// Smooth normalized superposition used across the tests.
    fn smooth_state(grid: &Grid, params: &FractionalParams) -> WaveFunction {
        let c = [
            Complex64::new(0.8, 0.1),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.2, -0.2),
            Complex64::new(0.1, 0.05),
        ];
        let states: Vec<_> = (1..=4).map(|n| eigenstate(n, params).unwrap()).collect();
        let mut psi = WaveFunction::from_fn(*grid, |x| {
            c.iter()
                .zip(&states)
                .map(|(ci, s)| ci * s.eval(x))
                .sum()
        });
        let norm = psi.norm();
        for v in psi.values_mut() {
            *v /= norm;
        }
        psi
    }

    #[test]
    fn expand_recovers_eigenstate() {
        let params = natural(1.5);
        let grid = well_grid(2048);
        let phi3 = eigenfunction_values(&eigenstate(3, &params).unwrap(), &grid).unwrap();
        let c = expand(&phi3, 8, &params).unwrap();
        for (i, ci) in c.coeffs().iter().enumerate() {
            let expect = if i == 2 { 1.0 } else { 0.0 };
            assert!((ci.re - expect).abs() < 1e-8 && ci.im.abs() < 1e-12, "c_{}", i + 1);
        }
    }

    #[test]
    fn uniform_state_coefficients() {
        // psi = (2l)^(-1/2): c_n = ((-1)^n - 1) / (sqrt(2) l k_n)
        let params = natural(1.5);
        let grid = well_grid(4097);
        let psi = WaveFunction::from_real_fn(grid, |_| 0.5f64.sqrt());
        let c = expand(&psi, 64, &params).unwrap();
        let c1 = c.coeffs()[0];
        assert!((c1.re - (-2.0 * 2f64.sqrt() / PI)).abs() < 1e-6, "c1 = {c1}");
        assert!((c1.re + 0.900_316_316_157_106).abs() < 1e-6);
        assert!(c.coeffs()[1].norm() < 1e-10, "even modes vanish");

        // Parseval with the analytic n^-2 tail: 1 - sum = 4/(pi^2 N) + O(N^-2)
        let mass64 = c.mass();
        let analytic: f64 = (1..=64)
            .step_by(2)
            .map(|n| 8.0 / (PI * PI * (n * n) as f64))
            .sum();
        assert!((mass64 - analytic).abs() < 1e-4, "{mass64} vs analytic {analytic}");
        assert!((1.0 - mass64) < 1e-2 && (1.0 - mass64) > 1e-3);

        let c512 = expand(&psi, 512, &params).unwrap();
        assert!(1.0 - c512.mass() < 1e-3, "eps = {}", 1.0 - c512.mass());
    }

    #[test]
    fn support_leakage_rejected() {
        let params = natural(1.5);
        let wide = Grid::bounded(-2.0, 2.0, 1025).unwrap();
        let leaky = WaveFunction::from_real_fn(wide, |_| 0.5);
        assert!(matches!(expand(&leaky, 4, &params), Err(Error::Usage(_))));
        // zero-extended state on a wide grid is fine
        let params2 = params;
        let s1 = eigenstate(1, &params2).unwrap();
        let ok = WaveFunction::from_real_fn(wide, |x| s1.eval(x));
        assert!(expand(&ok, 4, &params2).is_ok());
    }

    #[test]
    fn eigenstate_density_is_stationary() {
        let params = natural(1.5);
        let grid = well_grid(512);
        let phi2 = eigenfunction_values(&eigenstate(2, &params).unwrap(), &grid).unwrap();
        let c = expand(&phi2, 8, &params).unwrap();
        let before = c.reconstruct(&grid).unwrap();
        let after = c.evolve(1.37).reconstruct(&grid).unwrap();
        for i in 0..grid.len() {
            let d = (after.values()[i].norm_sqr() - before.values()[i].norm_sqr()).abs();
            assert!(d < 1e-12, "density moved by {d} at node {i}");
        }
    }

    #[test]
    fn norm_and_energy_conserved() {
        let params = natural(1.5);
        let grid = well_grid(1024);
        let psi = smooth_state(&grid, &params);
        let c0 = expand(&psi, 200, &params).unwrap();
        let mut c = c0.clone();
        for _ in 0..100 {
            c = c.evolve(0.05);
        }
        assert!((c.mass() - c0.mass()).abs() < 1e-10);
        assert!((c.energy_expectation() - c0.energy_expectation()).abs() < 1e-10);
        let psi_t = c.reconstruct(&grid).unwrap();
        assert!((psi_t.norm() - psi.norm()).abs() < 1e-8);
    }

    #[test]
    fn evolution_phases_commute() {
        let params = natural(1.3);
        let grid = well_grid(256);
        let psi = smooth_state(&grid, &params);
        let c = expand(&psi, 32, &params).unwrap();
        let ab = c.evolve(0.3).evolve(0.7);
        let ba = c.evolve(0.7).evolve(0.3);
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn brownian_revival() {
        // alpha = 2: E_n T / hbar = 2 pi n^2 at T = 16 m l^2 / (pi hbar)
        let m = 1.0;
        let params = FractionalParams::new(2.0, 1.0 / (2.0 * m), 1.0, 1.0).unwrap();
        let grid = well_grid(1024);
        let psi = smooth_state(&grid, &params);
        let c0 = expand(&psi, 64, &params).unwrap();
        let t_revival = 16.0 * m / PI;
        let ct = c0.evolve(t_revival);
        let fidelity: Complex64 = c0
            .coeffs()
            .iter()
            .zip(ct.coeffs())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((fidelity.norm() - c0.mass()).abs() < 1e-8, "fidelity {}", fidelity.norm());
    }

    #[test]
    fn kernel_evolution_matches_spectral() {
        let params = natural(1.5);
        let grid = well_grid(1024);
        let psi = smooth_state(&grid, &params);
        let n_modes = 200;
        let dt = 0.1;
        let prop = propagator_matrix(
            &grid,
            dt,
            TimeType::Real,
            PropagatorMethod::Spectral(n_modes),
            &params,
        )
        .unwrap();
        let by_kernel = evolve_by_kernel(&psi, &prop).unwrap();
        let by_spectrum = expand(&psi, n_modes, &params)
            .unwrap()
            .evolve(dt)
            .reconstruct(&grid)
            .unwrap();
        let max = by_kernel
            .values()
            .iter()
            .zip(by_spectrum.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-5, "max-abs {max:.2e}");
        // norm drift of the matrix path stays truncation-limited
        assert!((by_kernel.norm() - psi.norm()).abs() < 1e-4);
    }

    #[test]
    fn propagator_semigroup_through_states() {
        let params = natural(1.5);
        let grid = well_grid(513);
        let psi = smooth_state(&grid, &params);
        let p1 = propagator_matrix(
            &grid,
            0.1,
            TimeType::Real,
            PropagatorMethod::Spectral(150),
            &params,
        )
        .unwrap();
        let p2 = propagator_matrix(
            &grid,
            0.2,
            TimeType::Real,
            PropagatorMethod::Spectral(150),
            &params,
        )
        .unwrap();
        let twice = evolve_by_kernel(&evolve_by_kernel(&psi, &p1).unwrap(), &p1).unwrap();
        let once = evolve_by_kernel(&psi, &p2).unwrap();
        let max = twice
            .values()
            .iter()
            .zip(once.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-5, "semigroup defect {max:.2e}");
    }

    #[test]
    fn zero_state_stays_zero() {
        let params = natural(1.5);
        let grid = well_grid(128);
        let zero = WaveFunction::zeros(grid);
        let prop = propagator_matrix(
            &grid,
            0.5,
            TimeType::Imaginary,
            PropagatorMethod::Spectral(32),
            &params,
        )
        .unwrap();
        let out = evolve_by_kernel(&zero, &prop).unwrap();
        assert!(out.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let params = natural(1.5);
        let prop = propagator_matrix(
            &well_grid(128),
            0.5,
            TimeType::Imaginary,
            PropagatorMethod::Spectral(16),
            &params,
        )
        .unwrap();
        let other = WaveFunction::zeros(well_grid(256));
        assert!(evolve_by_kernel(&other, &prop).is_err());
    }

    #[test]
    fn bessel_bound_on_normalized_states() {
        let params = natural(1.4);
        let grid = well_grid(2048);
        let psi = smooth_state(&grid, &params);
        for n in [4, 16, 64] {
            let c = expand(&psi, n, &params).unwrap();
            assert!(c.mass() <= 1.0 + 1e-6, "N={n}: mass {}", c.mass());
        }
    }
}
