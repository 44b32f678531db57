//! Time propagation of the three-level system.
//!
//! Pure states follow `i dpsi/dt = H(t) psi`. Mixed states follow a Lindblad
//! equation with spontaneous decay towards lower bare levels and pure dephasing
//! between bare levels.

pub mod ode;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::model3::{StateVector, ThreeLevelDrive, C64};

pub use ode::{dopri5, OdeState};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
/// Most negative eigenvalue of a propagated density matrix that is still accepted.
pub const POSITIVITY_FLOOR: f64 = -1e-7;

/// Strictly increasing output times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidParameter("time grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("time grid has non-finite entries".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
        }
        Ok(TimeGrid(times))
    }

    /// `points` equally spaced times from `t0` to `t1` inclusive.
    pub fn uniform(t0: f64, t1: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter("uniform grid needs at least two points".into()));
        }
        let dt = (t1 - t0) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| t0 + dt * i as f64).collect();
        times[points - 1] = t1;
        Self::new(times)
    }

    /// The default dense grid over the drive's protocol window.
    pub fn protocol(d: &ThreeLevelDrive) -> Self {
        let (t0, t1) = d.window();
        Self::uniform(t0, t1, DEFAULT_GRID_POINTS).expect("validated pulse window")
    }

    /// Only the window endpoints, for runs where just the final state matters.
    pub fn endpoints(d: &ThreeLevelDrive) -> Self {
        let (t0, t1) = d.window();
        Self::new(vec![t0, t1]).expect("validated pulse window")
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Markovian relaxation rates. Decay rates are out of a level into a lower one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MarkovRates {
    /// `|1> -> |0>`, i.e. `1/T1` in the trapped subspace.
    pub gamma_10: f64,
    pub gamma_20: f64,
    pub gamma_21: f64,
    /// Pure-dephasing rates of `rho_01`, `rho_02`, `rho_12`.
    pub dephasing_01: f64,
    pub dephasing_02: f64,
    pub dephasing_12: f64,
}

impl MarkovRates {
    pub fn none() -> Self {
        Self::default()
    }

    /// Dephasing generated by `(|0><0| - |1><1|)` noise: `rho_01` decays at
    /// `gamma`, coherences with `|2>` at `gamma / 4`.
    pub fn trapped_dephasing(gamma: f64) -> Self {
        MarkovRates {
            dephasing_01: gamma,
            dephasing_02: 0.25 * gamma,
            dephasing_12: 0.25 * gamma,
            ..Self::default()
        }
    }

    pub fn with_t1(mut self, t1: f64) -> Self {
        self.gamma_10 = 1.0 / t1;
        self
    }

    fn all(&self) -> [f64; 6] {
        [
            self.gamma_10,
            self.gamma_20,
            self.gamma_21,
            self.dephasing_01,
            self.dephasing_02,
            self.dephasing_12,
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|r| *r == 0.0)
    }

    /// Rates must be non-negative, and the dephasing rates must come from
    /// classical level fluctuations: `sqrt(g_ij)` satisfy the triangle inequality.
    /// Other combinations do not define a completely positive evolution.
    pub fn validate(&self) -> Result<()> {
        if self.all().iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidParameter("Markov rates must be finite and non-negative".into()));
        }
        let s01 = self.dephasing_01.sqrt();
        let s02 = self.dephasing_02.sqrt();
        let s12 = self.dephasing_12.sqrt();
        let slack = 1e-12 * (s01 + s02 + s12);
        for (side, a, b) in [(s01, s02, s12), (s02, s01, s12), (s12, s01, s02)] {
            if side > a + b + slack {
                return Err(Error::InvalidParameter(format!(
                    "dephasing rates (01: {}, 02: {}, 12: {}) are not realizable by level \
                     fluctuations; need sqrt-rates to satisfy the triangle inequality",
                    self.dephasing_01, self.dephasing_02, self.dephasing_12
                )));
            }
        }
        Ok(())
    }

    fn dephasing_matrix(&self) -> Matrix3<f64> {
        let (a, b, c) = (self.dephasing_01, self.dephasing_02, self.dephasing_12);
        Matrix3::new(0.0, a, b, a, 0.0, c, b, c, 0.0)
    }
}

/// Density matrix in the bare basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(pub Matrix3<C64>);

impl DensityMatrix3 {
    pub fn from_pure(psi: &StateVector) -> Self {
        DensityMatrix3(psi.0 * psi.0.adjoint())
    }

    pub fn basis(level: usize) -> Self {
        Self::from_pure(&StateVector::basis(level))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        hermitian.symmetric_eigen().eigenvalues.min()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (self.0 - self.0.adjoint()).norm();
        if herm > 1e-10 {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        if (self.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter("density matrix trace differs from 1".into()));
        }
        if self.min_eigenvalue() < -1e-10 {
            return Err(Error::InvalidParameter("density matrix is not positive semidefinite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshots {
    Pure(Vec<StateVector>),
    Mixed(Vec<DensityMatrix3>),
}

/// Population histories on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    pub snapshots: Option<Snapshots>,
    /// Population of `|1>` at the final time.
    pub efficiency: f64,
}

impl Trajectory {
    pub(crate) fn from_populations(times: Vec<f64>, populations: Vec<[f64; 3]>, snapshots: Option<Snapshots>) -> Self {
        let efficiency = populations.last().map(|p| p[1]).unwrap_or(f64::NAN);
        Trajectory { times, populations, snapshots, efficiency }
    }

    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("trajectory has at least one point")
    }

    pub fn max_population(&self, level: usize) -> f64 {
        self.populations.iter().map(|p| p[level]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trace of the density matrix (or squared norm of the state) per time.
    pub fn traces(&self) -> Vec<f64> {
        self.populations.iter().map(|p| p.iter().sum()).collect()
    }

    /// `| ||psi(t_end)|| - 1 |` for pure-state runs.
    pub fn norm_drift(&self) -> Option<f64> {
        match &self.snapshots {
            Some(Snapshots::Pure(states)) => states.last().map(|s| (s.norm() - 1.0).abs()),
            _ => None,
        }
    }

    pub fn pure_states(&self) -> Option<&[StateVector]> {
        match &self.snapshots {
            Some(Snapshots::Pure(states)) => Some(states),
            _ => None,
        }
    }

    pub fn density_matrices(&self) -> Option<&[DensityMatrix3]> {
        match &self.snapshots {
            Some(Snapshots::Mixed(rhos)) => Some(rhos),
            _ => None,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"
        )));
    }
    Ok(())
}

/// Schrodinger evolution with adaptive step control. The state is not
/// renormalized, so norm drift stays observable.
pub fn propagate_unitary(d: &ThreeLevelDrive, psi0: &StateVector, grid: &TimeGrid, tol: f64) -> Result<Trajectory> {
    check_tol(tol)?;
    d.pulses.validate()?;
    if !psi0.is_finite() {
        return Err(Error::InvalidParameter("initial state is not finite".into()));
    }
    let minus_i = C64::new(0.0, -1.0);
    let states = dopri5(|t, y| (d.hamiltonian(t) * y) * minus_i, psi0.0, grid.times(), tol)?;
    let states: Vec<StateVector> = states.into_iter().map(StateVector).collect();
    let populations = states.iter().map(StateVector::populations).collect();
    Ok(Trajectory::from_populations(
        grid.times().to_vec(),
        populations,
        Some(Snapshots::Pure(states)),
    ))
}

/// Right-hand side of the Lindblad equation.
pub fn lindblad_rhs(h: &Matrix3<C64>, rates: &MarkovRates, rho: &Matrix3<C64>) -> Matrix3<C64> {
    let minus_i = C64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * minus_i;

    // decay |hi> -> |lo> with jump operator |lo><hi|
    for (rate, hi, lo) in [(rates.gamma_10, 1, 0), (rates.gamma_20, 2, 0), (rates.gamma_21, 2, 1)] {
        if rate == 0.0 {
            continue;
        }
        out[(lo, lo)] += rho[(hi, hi)] * rate;
        for k in 0..3 {
            // -1/2 {|hi><hi|, rho}
            out[(hi, k)] -= rho[(hi, k)] * (0.5 * rate);
            out[(k, hi)] -= rho[(k, hi)] * (0.5 * rate);
        }
    }

    let g = rates.dephasing_matrix();
    for i in 0..3 {
        for j in 0..3 {
            if g[(i, j)] != 0.0 {
                out[(i, j)] -= rho[(i, j)] * g[(i, j)];
            }
        }
    }
    out
}

/// Master-equation evolution. Every stored density matrix is checked for
/// positivity against [`POSITIVITY_FLOOR`].
pub fn propagate_lindblad(
    d: &ThreeLevelDrive,
    rates: &MarkovRates,
    rho0: &DensityMatrix3,
    grid: &TimeGrid,
    tol: f64,
) -> Result<Trajectory> {
    check_tol(tol)?;
    d.pulses.validate()?;
    rates.validate()?;
    rho0.validate()?;
    let rhos = dopri5(|t, r| lindblad_rhs(&d.hamiltonian(t), rates, r), rho0.0, grid.times(), tol)?;
    let rhos: Vec<DensityMatrix3> = rhos.into_iter().map(DensityMatrix3).collect();
    for (t, rho) in grid.times().iter().zip(&rhos) {
        let min_eigenvalue = rho.min_eigenvalue();
        if min_eigenvalue < POSITIVITY_FLOOR {
            return Err(Error::PositivityLoss { t: *t, min_eigenvalue });
        }
    }
    let populations = rhos.iter().map(DensityMatrix3::populations).collect();
    Ok(Trajectory::from_populations(
        grid.times().to_vec(),
        populations,
        Some(Snapshots::Mixed(rhos)),
    ))
}

/// Pure-state evolution when no rates are present, master equation otherwise.
pub fn propagate(
    d: &ThreeLevelDrive,
    rates: &MarkovRates,
    psi0: &StateVector,
    grid: &TimeGrid,
    tol: f64,
) -> Result<Trajectory> {
    if rates.is_zero() {
        propagate_unitary(d, psi0, grid, tol)
    } else {
        propagate_lindblad(d, rates, &DensityMatrix3::from_pure(psi0), grid, tol)
    }
}
