//! Low-frequency noise in the static path approximation, plus the closed-form
//! Markovian dephasing limit.
//!
//! Slow gate-charge noise is frozen into a Gaussian random offset `x`. Each value
//! of `x` shifts the device levels (hence the detunings) and the charge matrix
//! elements (hence the Rabi frequencies); the populations are then averaged over
//! the distribution of `x`. The external fields stay at the frequencies that are
//! resonant at the nominal bias.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cpb::{charge_element_expansion, cpb_spectrum, CpbModel, CpbSpectrum, ElementExpansion, ExpansionOrder};
use crate::dynamics::{propagate, MarkovRates, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::model3::{StateVector, ThreeLevelDrive};
use crate::tridiag::eigh_tridiagonal;

pub const DEFAULT_ORDER: usize = 21;

/// Gate-charge step used for finite-difference matrix-element expansions.
pub const ELEMENT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    GaussHermite { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Which parts of the drive respond to the offset, and to which order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fluctuations {
    pub detunings_linear: bool,
    pub detunings_quadratic: bool,
    pub rabi_linear: bool,
    pub rabi_quadratic: bool,
}

impl Fluctuations {
    pub fn linear_detunings() -> Self {
        Fluctuations { detunings_linear: true, detunings_quadratic: false, rabi_linear: false, rabi_quadratic: false }
    }

    pub fn all() -> Self {
        Fluctuations { detunings_linear: true, detunings_quadratic: true, rabi_linear: true, rabi_quadratic: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.detunings_quadratic && !self.detunings_linear {
            return Err(Error::Config("quadratic detuning fluctuations require the linear term".into()));
        }
        if self.rabi_quadratic && !self.rabi_linear {
            return Err(Error::Config("quadratic Rabi fluctuations require the linear term".into()));
        }
        Ok(())
    }

    fn detuning_order(&self) -> Option<ExpansionOrder> {
        match (self.detunings_linear, self.detunings_quadratic) {
            (true, true) => Some(ExpansionOrder::Quadratic),
            (true, false) => Some(ExpansionOrder::Linear),
            _ => None,
        }
    }

    fn rabi_order(&self) -> Option<ExpansionOrder> {
        match (self.rabi_linear, self.rabi_quadratic) {
            (true, true) => Some(ExpansionOrder::Quadratic),
            (true, false) => Some(ExpansionOrder::Linear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaSpec {
    /// Standard deviation of the static gate-charge offset.
    pub sigma_x: f64,
    pub method: QuadratureMethod,
    pub fluctuate: Fluctuations,
}

impl SpaSpec {
    pub fn gauss_hermite(sigma_x: f64, order: usize, fluctuate: Fluctuations) -> Self {
        SpaSpec { sigma_x, method: QuadratureMethod::GaussHermite { order }, fluctuate }
    }

    pub fn monte_carlo(sigma_x: f64, samples: usize, seed: u64, fluctuate: Fluctuations) -> Self {
        SpaSpec { sigma_x, method: QuadratureMethod::MonteCarlo { samples, seed }, fluctuate }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma_x.is_finite() || self.sigma_x < 0.0 {
            return Err(Error::InvalidParameter("sigma_x must be finite and non-negative".into()));
        }
        match self.method {
            QuadratureMethod::GaussHermite { order } if order < 3 || order % 2 == 0 => Err(Error::InvalidParameter(
                format!("quadrature order must be odd and at least 3, got {order}"),
            )),
            QuadratureMethod::MonteCarlo { samples: 0, .. } => {
                Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()))
            }
            _ => self.fluctuate.validate(),
        }
    }

    /// Offsets and probability weights realizing the average over `x`.
    pub fn nodes(&self) -> Result<Quadrature> {
        self.validate()?;
        match self.method {
            QuadratureMethod::GaussHermite { order } => gauss_hermite_nodes(order, self.sigma_x),
            QuadratureMethod::MonteCarlo { samples, seed } => Ok(monte_carlo_nodes(samples, seed, self.sigma_x)),
        }
    }
}

/// Points `x_k` with probabilities `w_k`, `sum w_k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Gauss-Hermite rule for a centred Gaussian with standard deviation `sigma_x`,
/// exact for polynomials up to degree `2 order - 1`. A vanishing `sigma_x`
/// collapses to the single node `0`.
pub fn gauss_hermite_nodes(order: usize, sigma_x: f64) -> Result<Quadrature> {
    if order < 3 || order.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("quadrature order must be odd and at least 3, got {order}")));
    }
    if !sigma_x.is_finite() || sigma_x < 0.0 {
        return Err(Error::InvalidParameter("sigma_x must be finite and non-negative".into()));
    }
    if sigma_x == 0.0 {
        return Ok(Quadrature { nodes: vec![0.0], weights: vec![1.0] });
    }

    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials
    let diag = vec![0.0; order];
    let off: Vec<f64> = (1..order).map(|k| (k as f64).sqrt()).collect();
    let eig = eigh_tridiagonal(&diag, &off)?;
    let raw_weights: Vec<f64> = eig.vectors.iter().map(|v| v[0] * v[0]).collect();

    // enforce the exact mirror symmetry of the rule
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let j = n - 1 - i;
        nodes[i] = 0.5 * (eig.values[i] - eig.values[j]);
        weights[i] = 0.5 * (raw_weights[i] + raw_weights[j]);
    }
    nodes[n / 2] = 0.0;
    let total: f64 = weights.iter().sum();
    Ok(Quadrature {
        nodes: nodes.into_iter().map(|x| x * sigma_x).collect(),
        weights: weights.into_iter().map(|w| w / total).collect(),
    })
}

fn monte_carlo_nodes(samples: usize, seed: u64, sigma_x: f64) -> Quadrature {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..samples)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * sigma_x
        })
        .collect();
    Quadrature { nodes, weights: vec![1.0 / samples as f64; samples] }
}

/// How a gate-charge offset `x` enters the Lambda-system drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseResponse {
    /// `d delta / dx` and `d^2 delta / dx^2`, device energy units.
    pub delta_slope: f64,
    pub delta_curvature: f64,
    pub delta_p_slope: f64,
    pub delta_p_curvature: f64,
    /// Expansion of the pump coupling `n_02` (absent: no Rabi response).
    pub pump: Option<ElementExpansion>,
    /// Expansion of the Stokes coupling `n_12`.
    pub stokes: Option<ElementExpansion>,
    /// Drive frequency units per device energy unit.
    pub energy_scale: f64,
}

impl NoiseResponse {
    /// Response of a Cooper-pair box at the bias of `spectrum`, with Rabi-coupling
    /// slopes from central finite differences.
    pub fn from_spectrum(spectrum: &CpbSpectrum, energy_scale: f64) -> Result<Self> {
        if spectrum.levels() < 3 {
            return Err(Error::InvalidParameter("noise response needs three device levels".into()));
        }
        let model = &spectrum.model;
        Ok(NoiseResponse {
            delta_slope: spectrum.a[1],
            delta_curvature: spectrum.b[1],
            delta_p_slope: spectrum.a[2],
            delta_p_curvature: spectrum.b[2],
            pump: Some(charge_element_expansion(model, 0, 2, ELEMENT_FD_STEP)?),
            stokes: Some(charge_element_expansion(model, 1, 2, ELEMENT_FD_STEP)?),
            energy_scale,
        })
    }

    pub fn from_device(model: &CpbModel, energy_scale: f64) -> Result<Self> {
        Self::from_spectrum(&cpb_spectrum(model, 3)?, energy_scale)
    }

    /// Purely linear detuning response `delta = a1 x`, `delta_p = a2 x`, already
    /// expressed in drive units.
    pub fn detuning_only(a1: f64, a2: f64) -> Self {
        NoiseResponse {
            delta_slope: a1,
            delta_curvature: 0.0,
            delta_p_slope: a2,
            delta_p_curvature: 0.0,
            pump: None,
            stokes: None,
            energy_scale: 1.0,
        }
    }

    /// The nominal drive seen by the system at offset `x`.
    pub fn drive_at(&self, base: &ThreeLevelDrive, x: f64, fluctuate: &Fluctuations) -> ThreeLevelDrive {
        let mut d = *base;
        if let Some(order) = fluctuate.detuning_order() {
            let shift = |a: f64, b: f64| match order {
                ExpansionOrder::Linear => a * x,
                ExpansionOrder::Quadratic => a * x + 0.5 * b * x * x,
            };
            d.detunings.delta += self.energy_scale * shift(self.delta_slope, self.delta_curvature);
            d.detunings.delta_p += self.energy_scale * shift(self.delta_p_slope, self.delta_p_curvature);
        }
        if let Some(order) = fluctuate.rabi_order() {
            let ratio = |e: &Option<ElementExpansion>| match e {
                Some(e) if e.value != 0.0 => (e.at(x, order) / e.value).abs(),
                _ => 1.0,
            };
            d.pulses.kappa_p *= ratio(&self.pump);
            d.pulses.kappa_s *= ratio(&self.stokes);
        }
        d
    }
}

/// Ensemble-averaged populations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaResult {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    /// Averaged final population of `|1>`.
    pub efficiency: f64,
    /// Standard error of the efficiency for Monte Carlo sampling.
    pub std_error: Option<f64>,
}

impl SpaResult {
    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("non-empty grid")
    }
}

/// Average over the static offset distribution. Each node is propagated
/// independently (in parallel) and reduced in node order, so the result does not
/// depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn spa_average(
    base: &ThreeLevelDrive,
    response: &NoiseResponse,
    spec: &SpaSpec,
    rates: &MarkovRates,
    psi0: &StateVector,
    grid: &TimeGrid,
    tol: f64,
) -> Result<SpaResult> {
    let quad = spec.nodes()?;
    let runs: Vec<Trajectory> = quad
        .nodes
        .par_iter()
        .map(|&x| propagate(&response.drive_at(base, x, &spec.fluctuate), rates, psi0, grid, tol))
        .collect::<Result<_>>()?;

    let mut populations = vec![[0.0; 3]; grid.len()];
    for (run, w) in runs.iter().zip(&quad.weights) {
        for (acc, p) in populations.iter_mut().zip(&run.populations) {
            for k in 0..3 {
                acc[k] += w * p[k];
            }
        }
    }
    let efficiency = populations.last().map(|p| p[1]).unwrap_or(f64::NAN);
    let std_error = match spec.method {
        QuadratureMethod::MonteCarlo { samples, .. } if samples > 1 => {
            let n = samples as f64;
            let var = runs.iter().map(|r| (r.efficiency - efficiency).powi(2)).sum::<f64>() / (n - 1.0);
            Some((var / n).sqrt())
        }
        _ => None,
    };
    Ok(SpaResult { times: grid.times().to_vec(), populations, efficiency, std_error })
}

/// Final populations `(rho_11, rho_00, rho_22)` of adiabatic transfer under
/// Markovian trapped-subspace dephasing at rate `gamma_01`, Gaussian width `width`
/// and half separation `tau`.
pub fn markovian_final_populations(gamma_01: f64, width: f64, tau: f64) -> Result<(f64, f64, f64)> {
    if !(gamma_01 >= 0.0) || !(width > 0.0) || !(tau > 0.0) {
        return Err(Error::InvalidParameter("need gamma_01 >= 0, width > 0, tau > 0".into()));
    }
    let e = if gamma_01.is_infinite() { 0.0 } else { (-3.0 * gamma_01 * width * width / (8.0 * tau)).exp() };
    let third = 1.0 / 3.0;
    Ok((third + 2.0 * third * e, third - third * e, third - third * e))
}

/// Standard deviation of the static offset whose Gaussian free-induction decay
/// `exp(-(a1 sigma t)^2 / 2)` reaches `1/e` at `t = t2`.
pub fn gaussian_dephasing_equivalent(t2: f64, a1: f64) -> Result<f64> {
    if !(t2 > 0.0) || !t2.is_finite() {
        return Err(Error::InvalidParameter("T2 must be positive".into()));
    }
    if a1 == 0.0 || !a1.is_finite() {
        return Err(Error::OutOfDomain("zero level slope: no finite sigma_x reproduces T2".into()));
    }
    Ok(std::f64::consts::SQRT_2 / (a1.abs() * t2))
}
