//! Cooper-pair-box device model in the truncated charge basis.
//!
//! `H0 = sum_n (q_g - n)^2 |n><n| - J/2 (|n+1><n| + h.c.)`, energies in the
//! charging units of the `(q_g - n)^2` term. The ac gate couples to the charge
//! operator `n`, so the Rabi frequencies scale with its matrix elements `n_ij`.

use crate::error::{Error, Result};
use crate::tridiag::eigh_tridiagonal;

pub const DEFAULT_N_MAX: usize = 10;

/// Tolerance on the lowest three energies under `n_max -> n_max + 1`.
pub const TRUNCATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbModel {
    /// Josephson strength `J`.
    pub josephson: f64,
    /// Gate charge `q_g`.
    pub gate_charge: f64,
    /// Basis is `n in [-n_max, n_max]`.
    pub n_max: usize,
}

impl CpbModel {
    pub fn new(josephson: f64, gate_charge: f64) -> Self {
        CpbModel { josephson, gate_charge, n_max: DEFAULT_N_MAX }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn at_gate_charge(mut self, gate_charge: f64) -> Self {
        self.gate_charge = gate_charge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.josephson.is_finite() || self.josephson < 0.0 {
            return Err(Error::InvalidParameter("J must be finite and non-negative".into()));
        }
        if !self.gate_charge.is_finite() {
            return Err(Error::InvalidParameter("q_g must be finite".into()));
        }
        if self.n_max < 3 {
            return Err(Error::InvalidParameter("n_max must be at least 3".into()));
        }
        Ok(())
    }

    fn dimension(&self) -> usize {
        2 * self.n_max + 1
    }

    fn charges(&self) -> impl Iterator<Item = f64> + '_ {
        let n_max = self.n_max as i64;
        (-n_max..=n_max).map(|n| n as f64)
    }
}

/// Lowest levels of the device with charge matrix elements and bias sensitivities.
#[derive(Debug, Clone, PartialEq)]
pub struct CpbSpectrum {
    pub model: CpbModel,
    /// `E_i - E_0`, ascending.
    pub energies: Vec<f64>,
    /// `n_matrix[i][j] = <i|n|j>` in the real eigenvector gauge.
    pub n_matrix: Vec<Vec<f64>>,
    /// `A_i = d(E_i - E_0)/dq_g`.
    pub a: Vec<f64>,
    /// `B_i = d^2(E_i - E_0)/dq_g^2`.
    pub b: Vec<f64>,
}

impl CpbSpectrum {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn n(&self, i: usize, j: usize) -> f64 {
        self.n_matrix[i][j]
    }
}

struct FullSolution {
    energies: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

fn solve_full(model: &CpbModel) -> Result<FullSolution> {
    let diag: Vec<f64> = model.charges().map(|n| (model.gate_charge - n).powi(2)).collect();
    let off = vec![-0.5 * model.josephson; model.dimension() - 1];
    let eig = eigh_tridiagonal(&diag, &off)?;
    Ok(FullSolution { energies: eig.values, vectors: eig.vectors })
}

fn charge_element(model: &CpbModel, u: &[f64], v: &[f64]) -> f64 {
    model.charges().zip(u.iter().zip(v)).map(|(n, (a, b))| n * a * b).sum()
}

/// Diagonalize the device and return its lowest `levels` states.
pub fn cpb_spectrum(model: &CpbModel, levels: usize) -> Result<CpbSpectrum> {
    model.validate()?;
    if levels == 0 || levels > 2 * model.n_max - 1 {
        return Err(Error::InvalidParameter(format!(
            "levels must be in 1..={} for n_max = {}",
            2 * model.n_max - 1,
            model.n_max
        )));
    }

    let full = solve_full(model)?;
    check_truncation(model, &full)?;

    let dim = model.dimension();
    let qg = model.gate_charge;

    // <k|n|i> for every retained basis state k and requested level i
    let n_full: Vec<Vec<f64>> = (0..levels)
        .map(|i| (0..dim).map(|k| charge_element(model, &full.vectors[k], &full.vectors[i])).collect())
        .collect();

    // dH/dq_g = 2 (q_g - n), d2H/dq_g2 = 2
    let slope_abs: Vec<f64> = (0..levels).map(|i| 2.0 * (qg - n_full[i][i])).collect();
    let mut curvature_abs = Vec::with_capacity(levels);
    for i in 0..levels {
        let mut sum = 2.0;
        for k in (0..dim).filter(|&k| k != i) {
            let coupling = n_full[i][k];
            if coupling == 0.0 {
                continue;
            }
            let gap = full.energies[i] - full.energies[k];
            if gap.abs() < 1e-13 {
                return Err(Error::EigenSolver(format!(
                    "coupled degenerate levels {i} and {k}: curvature undefined"
                )));
            }
            sum += 8.0 * coupling * coupling / gap;
        }
        curvature_abs.push(sum);
    }

    let e0 = full.energies[0];
    Ok(CpbSpectrum {
        model: *model,
        energies: full.energies[..levels].iter().map(|e| e - e0).collect(),
        n_matrix: (0..levels).map(|i| (0..levels).map(|j| n_full[i][j]).collect()).collect(),
        a: slope_abs.iter().map(|s| s - slope_abs[0]).collect(),
        b: curvature_abs.iter().map(|c| c - curvature_abs[0]).collect(),
    })
}

fn check_truncation(model: &CpbModel, full: &FullSolution) -> Result<()> {
    let bigger = solve_full(&model.with_n_max(model.n_max + 1))?;
    for i in 0..3 {
        let diff = (full.energies[i] - bigger.energies[i]).abs();
        if diff > TRUNCATION_TOL {
            return Err(Error::Truncation(format!(
                "level {i} moves by {diff:e} under n_max {} -> {}",
                model.n_max,
                model.n_max + 1
            )));
        }
    }
    Ok(())
}

/// Order retained in the bias-noise expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    Linear,
    Quadratic,
}

/// Detuning shifts `(delta, delta_p)` produced by a static gate-charge offset `x`
/// when the fields stay resonant with the nominal bias.
pub fn detuning_fluctuations(s: &CpbSpectrum, x: f64, order: ExpansionOrder) -> (f64, f64) {
    let expand = |a: f64, b: f64| match order {
        ExpansionOrder::Linear => a * x,
        ExpansionOrder::Quadratic => a * x + 0.5 * b * x * x,
    };
    (expand(s.a[1], s.b[1]), expand(s.a[2], s.b[2]))
}

/// Pump and Stokes Rabi frequencies for given field amplitudes.
pub fn rabi_from_drive(s: &CpbSpectrum, amp_p: f64, amp_s: f64) -> (f64, f64) {
    (amp_p * s.n(0, 2), amp_s * s.n(1, 2))
}

/// Peak pump Rabi frequency for a field that produces Rabi oscillations
/// `omega_r` on the `0 <-> 1` transition at the symmetry point:
/// `omega_r |n_02(q_g)| / |n_01(1/2)|`.
pub fn calibrated_pump_rabi(model: &CpbModel, omega_r: f64) -> Result<f64> {
    let here = cpb_spectrum(model, 3)?;
    let sweet = cpb_spectrum(&model.at_gate_charge(0.5), 3)?;
    let reference = sweet.n(0, 1).abs();
    if reference == 0.0 {
        return Err(Error::OutOfDomain("n_01 vanishes at the symmetry point".into()));
    }
    Ok(omega_r * here.n(0, 2).abs() / reference)
}

/// Value, first and second gate-charge derivative of a matrix element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementExpansion {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl ElementExpansion {
    pub fn at(&self, x: f64, order: ExpansionOrder) -> f64 {
        match order {
            ExpansionOrder::Linear => self.value + self.slope * x,
            ExpansionOrder::Quadratic => self.value + self.slope * x + 0.5 * self.curvature * x * x,
        }
    }
}

/// Central finite-difference expansion of `<i|n|j>` in the gate charge.
pub fn charge_element_expansion(model: &CpbModel, i: usize, j: usize, step: f64) -> Result<ElementExpansion> {
    let levels = i.max(j) + 1;
    let element = |qg: f64| -> Result<f64> { Ok(cpb_spectrum(&model.at_gate_charge(qg), levels)?.n(i, j)) };
    let q = model.gate_charge;
    let (minus, mid, plus) = (element(q - step)?, element(q)?, element(q + step)?);
    Ok(ElementExpansion {
        value: mid,
        slope: (plus - minus) / (2.0 * step),
        curvature: (plus - 2.0 * mid + minus) / (step * step),
    })
}
