//! The standing invariant suite: every cross-check the library promises,
//! packaged as named, individually runnable checks. The CLI `verify`
//! command prints one line per check and exits nonzero unless all pass;
//! the acceptance test target runs the same list.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

use crate::evolution::{evolve_by_kernel, expand};
use crate::freekernel::{
    free_kernel, free_kernel_extrapolated, EtaLadder, KernelQuery, TimeType,
};
use crate::grid::WaveFunction;
use crate::params::FractionalParams;
use crate::residual::{fse_residual, residual_convergence};
use crate::riesz::{
    hamiltonian_matrix, riesz_singular, riesz_spectral, RieszMethod, SingularOpts,
};
use crate::well::{
    eigenstate, gram_matrix, parity_form, propagator_matrix, well_kernel_images,
    well_kernel_spectral, PropagatorMethod,
};
use crate::Grid;

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub label: &'static str,
    pub passed: bool,
    /// Worst measured quantities, for the report line.
    pub detail: String,
}

/// Options shared by the whole suite.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Seed for the random-state checks.
    pub seed: u64,
    /// Test hook: force the named check to fail, to exercise the
    /// failure path of callers.
    pub inject_failure: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 7, inject_failure: None }
    }
}

pub struct Check {
    pub id: &'static str,
    pub label: &'static str,
    runner: fn(&VerifyOptions) -> CheckOutcome,
}

impl Check {
    pub fn run(&self, opts: &VerifyOptions) -> CheckOutcome {
        let mut out = (self.runner)(opts);
        if opts.inject_failure.as_deref() == Some(self.id) {
            out.passed = false;
            out.detail = format!("injected failure (test hook); real result: {}", out.detail);
        }
        out
    }
}

/// The full suite, in report order.
pub fn checks() -> Vec<Check> {
    vec![
        Check {
            id: "riesz-plane-wave",
            label: "plane waves are Riesz eigenfunctions with eigenvalue -|p|^alpha",
            runner: check_plane_waves,
        },
        Check {
            id: "hamiltonian-hermiticity",
            label: "discrete free Hamiltonian is Hermitian on a 512-point ring",
            runner: check_hermiticity,
        },
        Check {
            id: "riesz-cross-method",
            label: "spectral and singular-integral Riesz agree on a smooth bump",
            runner: check_riesz_cross_method,
        },
        Check {
            id: "free-kernel-oracles",
            label: "free kernel matches Gaussian, Cauchy and Fresnel closed forms",
            runner: check_free_kernel_oracles,
        },
        Check {
            id: "poisson-equivalence",
            label: "image sum (M=50) equals eigen-sum (N=200) in imaginary time",
            runner: check_poisson_equivalence,
        },
        Check {
            id: "spectrum-regression",
            label: "energy levels follow E_n = D (n pi hbar / 2l)^alpha",
            runner: check_spectrum,
        },
        Check {
            id: "parity-forms",
            label: "parity-resolved closed forms match the eigenfunctions pointwise",
            runner: check_parity,
        },
        Check {
            id: "orthonormality",
            label: "20x20 Gram matrix is the identity under quadrature",
            runner: check_orthonormality,
        },
        Check {
            id: "evolution-consistency",
            label: "spectral evolution is unitary and matches the kernel matrix",
            runner: check_evolution,
        },
        Check {
            id: "residual-diagnostic",
            label: "stationary-equation residual: classical limit small, fractional stable",
            runner: check_residual,
        },
    ]
}

/// Runs every check in order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    checks().iter().map(|c| c.run(opts)).collect()
}

fn outcome(
    id: &'static str,
    label: &'static str,
    passed: bool,
    detail: String,
) -> CheckOutcome {
    CheckOutcome { id, label, passed, detail }
}

fn check_plane_waves(_: &VerifyOptions) -> CheckOutcome {
    let grid = Grid::periodic(-PI / 2.0, PI / 2.0, 256).unwrap();
    let mut worst = 0.0f64;
    for &alpha in &[1.2, 1.5, 2.0] {
        let params = FractionalParams::natural(alpha).unwrap();
        for k in 1..=16 {
            let p = 2.0 * k as f64; // lattice momentum for L = pi
            let psi = WaveFunction::from_fn(grid, |x| Complex64::new(0.0, p * x).exp());
            let out = riesz_spectral(&psi, &params).unwrap();
            let lambda = -p.powf(alpha);
            for i in 0..grid.len() {
                let expect = psi.values()[i] * lambda;
                worst = worst.max((out.values()[i] - expect).norm() / expect.norm());
            }
        }
    }
    outcome(
        "riesz-plane-wave",
        "plane waves are Riesz eigenfunctions with eigenvalue -|p|^alpha",
        worst < 1e-10,
        format!("worst relative error {worst:.3e} (tolerance 1e-10)"),
    )
}

fn check_hermiticity(_: &VerifyOptions) -> CheckOutcome {
    let grid = Grid::periodic(-PI, PI, 512).unwrap();
    let zero_potential = vec![0.0; 512];
    let mut worst = 0.0f64;
    for &alpha in &[1.5, 2.0] {
        let params = FractionalParams::natural(alpha).unwrap();
        let h = hamiltonian_matrix(&grid, &zero_potential, &params).unwrap();
        for i in 0..512 {
            for j in 0..=i {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
    }
    outcome(
        "hamiltonian-hermiticity",
        "discrete free Hamiltonian is Hermitian on a 512-point ring",
        worst < 1e-10,
        format!("max |H - H^dagger| = {worst:.3e} (tolerance 1e-10)"),
    )
}

fn bump(x: f64) -> Complex64 {
    if x.abs() < 1.0 {
        Complex64::new((-1.0 / (1.0 - x * x)).exp(), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn check_riesz_cross_method(_: &VerifyOptions) -> CheckOutcome {
    // 16x the support width of padding keeps periodic wrap-around of the
    // algebraic tails well under the 1e-3 comparison scale
    let grid = Grid::periodic(-16.0, 16.0, 8192).unwrap();
    let mut worst = 0.0f64;
    for &alpha in &[1.2, 1.5, 1.8] {
        let params = FractionalParams::natural(alpha).unwrap();
        let psi = WaveFunction::from_fn(grid, bump);
        let spec = riesz_spectral(&psi, &params).unwrap();
        for &x in &[-0.4, 0.0, 0.4] {
            let i = ((x - grid.x_min()) / grid.spacing()).round() as usize;
            assert!((grid.point(i) - x).abs() < 1e-12);
            let sing =
                riesz_singular(&bump, (-1.0, 1.0), x, &params, &SingularOpts::default())
                    .unwrap();
            worst = worst.max((spec.values()[i] - sing).norm() / sing.norm());
        }
    }
    outcome(
        "riesz-cross-method",
        "spectral and singular-integral Riesz agree on a smooth bump",
        worst < 1e-3,
        format!("worst relative difference {worst:.3e} (tolerance 1e-3)"),
    )
}

fn check_free_kernel_oracles(_: &VerifyOptions) -> CheckOutcome {
    let dxs: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();

    // imaginary time, alpha = 2, D = 1/2: Gaussian heat kernel
    let p2 = FractionalParams::new(2.0, 0.5, 1.0, 1.0).unwrap();
    let mut worst_gauss = 0.0f64;
    for &dx in &dxs {
        let q = KernelQuery::imaginary(dx, 0.0, 1.0, &p2).unwrap();
        let v = free_kernel(&q, &p2).unwrap().re;
        let exact = (-dx * dx / 2.0).exp() / (2.0 * PI).sqrt();
        worst_gauss = worst_gauss.max((v - exact).abs());
    }

    // imaginary time, alpha = 1 (validation mode): Cauchy density
    let p1 = FractionalParams::new_validation(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut worst_cauchy = 0.0f64;
    for &dx in &dxs {
        let q = KernelQuery::imaginary(dx, 0.0, 1.0, &p1).unwrap();
        let v = free_kernel(&q, &p1).unwrap().re;
        let exact = (1.0 / PI) / (1.0 + dx * dx);
        worst_cauchy = worst_cauchy.max((v - exact).abs());
    }

    // real time, alpha = 2: Fresnel closed form via eta -> 0 extrapolation
    let mut worst_fresnel = 0.0f64;
    for &dx in &[0.0, 0.5, 1.0] {
        let out = free_kernel_extrapolated(dx, 0.0, 1.0, &EtaLadder::default(), &p2).unwrap();
        let exact = Complex64::new(0.0, -PI / 4.0).exp()
            * Complex64::new(0.0, dx * dx / 2.0).exp()
            / (2.0 * PI).sqrt();
        worst_fresnel = worst_fresnel.max((out.value - exact).norm() / exact.norm());
    }

    outcome(
        "free-kernel-oracles",
        "free kernel matches Gaussian, Cauchy and Fresnel closed forms",
        worst_gauss < 1e-6 && worst_cauchy < 1e-6 && worst_fresnel < 1e-4,
        format!(
            "gaussian {worst_gauss:.3e} (1e-6), cauchy {worst_cauchy:.3e} (1e-6), \
             fresnel rel {worst_fresnel:.3e} (1e-4)"
        ),
    )
}

fn check_poisson_equivalence(_: &VerifyOptions) -> CheckOutcome {
    let started = Instant::now();
    let lattice: Vec<f64> = (0..21).map(|i| -0.9 + 0.09 * i as f64).collect();
    let mut cells = Vec::new();
    let mut pass = true;
    for &alpha in &[1.5, 2.0] {
        let params = FractionalParams::natural(alpha).unwrap();
        for &tau in &[0.1, 1.0] {
            let mut max_abs = 0.0f64;
            for &xb in &lattice {
                for &xa in &lattice {
                    let ki =
                        well_kernel_images(xb, xa, tau, 50, &params, TimeType::Imaginary)
                            .unwrap();
                    let ks =
                        well_kernel_spectral(xb, xa, tau, 200, &params, TimeType::Imaginary)
                            .unwrap();
                    max_abs = max_abs.max((ki - ks).norm());
                }
            }
            pass &= max_abs < 1e-6;
            cells.push(format!("alpha={alpha} tau={tau}: {max_abs:.3e}"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    pass &= elapsed < 120.0;
    outcome(
        "poisson-equivalence",
        "image sum (M=50) equals eigen-sum (N=200) in imaginary time",
        pass,
        format!("{} (tolerance 1e-6); {elapsed:.1}s", cells.join(", ")),
    )
}

fn check_spectrum(_: &VerifyOptions) -> CheckOutcome {
    let mut worst_ratio = 0.0f64;
    for &alpha in &[1.2, 1.5, 1.8, 2.0] {
        let params = FractionalParams::natural(alpha).unwrap();
        let e1 = eigenstate(1, &params).unwrap().energy();
        for n in 1..=20 {
            let en = eigenstate(n, &params).unwrap().energy();
            let expect = (n as f64).powf(alpha);
            worst_ratio = worst_ratio.max((en / e1 - expect).abs() / expect);
        }
    }
    // alpha = 2, D = 1/2m: textbook well spectrum n^2 pi^2 hbar^2/(8 m l^2)
    let m = 1.3;
    let hbar = 0.7;
    let l = 0.9;
    let params = FractionalParams::new(2.0, 1.0 / (2.0 * m), hbar, l).unwrap();
    let mut worst_classical = 0.0f64;
    for n in 1..=20 {
        let en = eigenstate(n, &params).unwrap().energy();
        let expect = (n * n) as f64 * PI * PI * hbar * hbar / (8.0 * m * l * l);
        worst_classical = worst_classical.max((en - expect).abs() / expect);
    }
    outcome(
        "spectrum-regression",
        "energy levels follow E_n = D (n pi hbar / 2l)^alpha",
        worst_ratio < 1e-12 && worst_classical < 1e-12,
        format!(
            "worst E_n/E_1 - n^alpha deviation {worst_ratio:.3e}, \
             classical-limit deviation {worst_classical:.3e} (tolerance 1e-12)"
        ),
    )
}

fn check_parity(opts: &VerifyOptions) -> CheckOutcome {
    let params = FractionalParams::natural(1.5).unwrap();
    let mut state_rng = opts.seed.max(1);
    let mut next = move || {
        state_rng = state_rng
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state_rng >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut worst = 0.0f64;
    for n in 1..=12 {
        let state = eigenstate(n, &params).unwrap();
        let form = parity_form(n, &params).unwrap();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        for _ in 0..1000 {
            let x = next();
            let a = state.eval(x);
            worst = worst.max((form.eval(x) - a).abs());
            worst = worst.max((state.eval(-x) - sign * a).abs());
        }
    }
    outcome(
        "parity-forms",
        "parity-resolved closed forms match the eigenfunctions pointwise",
        worst < 1e-12,
        format!("worst pointwise deviation {worst:.3e} (tolerance 1e-12)"),
    )
}

fn check_orthonormality(_: &VerifyOptions) -> CheckOutcome {
    let params = FractionalParams::natural(1.5).unwrap();
    let grid = Grid::bounded(-1.0, 1.0, 2048).unwrap();
    let g = gram_matrix(20, &grid, &params).unwrap();
    let mut worst = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - expect).abs());
        }
    }
    outcome(
        "orthonormality",
        "20x20 Gram matrix is the identity under quadrature",
        worst < 1e-8,
        format!("max |G - I| = {worst:.3e} (tolerance 1e-8)"),
    )
}

fn check_evolution(_: &VerifyOptions) -> CheckOutcome {
    let params = FractionalParams::natural(1.5).unwrap();
    let grid = Grid::bounded(-1.0, 1.0, 1024).unwrap();
    let states: Vec<_> = (1..=4).map(|n| eigenstate(n, &params).unwrap()).collect();
    let weights = [
        Complex64::new(0.8, 0.1),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.2, -0.2),
        Complex64::new(0.1, 0.05),
    ];
    let mut psi = WaveFunction::from_fn(grid, |x| {
        weights.iter().zip(&states).map(|(c, s)| c * s.eval(x)).sum()
    });
    let norm = psi.norm();
    for v in psi.values_mut() {
        *v /= norm;
    }

    // 100 spectral steps preserve the coefficient mass
    let c0 = expand(&psi, 200, &params).unwrap();
    let mut c = c0.clone();
    for _ in 0..100 {
        c = c.evolve(0.05);
    }
    let norm_drift = (c.mass() - c0.mass()).abs();

    // one kernel-matrix step against one spectral step
    let dt = 0.1;
    let prop =
        propagator_matrix(&grid, dt, TimeType::Real, PropagatorMethod::Spectral(200), &params)
            .unwrap();
    let by_kernel = evolve_by_kernel(&psi, &prop).unwrap();
    let by_spectrum = c0.evolve(dt).reconstruct(&grid).unwrap();
    let max_diff = by_kernel
        .values()
        .iter()
        .zip(by_spectrum.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    outcome(
        "evolution-consistency",
        "spectral evolution is unitary and matches the kernel matrix",
        norm_drift < 1e-10 && max_diff < 1e-5,
        format!(
            "norm drift over 100 steps {norm_drift:.3e} (1e-10), \
             kernel-vs-spectral max-abs {max_diff:.3e} (1e-5)"
        ),
    )
}

fn check_residual(_: &VerifyOptions) -> CheckOutcome {
    // classical limit under the local route: pure discretization, shrinking
    // at second order
    let p2 = FractionalParams::new(2.0, 0.5, 1.0, 1.0).unwrap();
    let singular = RieszMethod::SingularIntegral(SingularOpts::default());
    let classical = residual_convergence(1, &p2, 4096, &singular, 4, 0.05).unwrap();
    let flags2 = classical.convergence.unwrap();

    // fractional case: an order-one diagnostic that padding does not move
    let p15 = FractionalParams::natural(1.5).unwrap();
    let frac = fse_residual(1, &p15, 4096, &RieszMethod::Spectral, 4, 0.05).unwrap();
    let frac_padded = fse_residual(1, &p15, 8192, &RieszMethod::Spectral, 8, 0.05).unwrap();
    let padding_change = (frac_padded.l2_rel - frac.l2_rel).abs() / frac.l2_rel;

    let pass = classical.l2_rel < 1e-3
        && (1.5..=2.5).contains(&flags2.refinement_order)
        && frac.l2_rel > 0.0
        && padding_change < 0.10;
    outcome(
        "residual-diagnostic",
        "stationary-equation residual: classical limit small, fractional stable",
        pass,
        format!(
            "alpha=2 l2_rel {:.3e} (1e-3) order {:.2} ([1.5, 2.5]); \
             alpha=1.5 l2_rel {:.4} (diagnostic, no ground truth asserted) \
             padding change {:.2}% (10%)",
            classical.l2_rel,
            flags2.refinement_order,
            frac.l2_rel,
            100.0 * padding_change
        ),
    )
}
