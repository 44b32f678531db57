//! Driven three-level Lambda system in the rotating-wave approximation.
//!
//! Bare basis ordering is `{|0>, |1>, |2>}`: `|0>` and `|1>` span the trapped
//! subspace, `|2>` is the intermediate level. The pump couples `|0> <-> |2>`,
//! the Stokes field couples `|1> <-> |2>`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Hamiltonian = Matrix3<C64>;

/// Number of pulse widths kept on either side of the outer pulse peak.
pub const WINDOW_WIDTHS: f64 = 4.0;

/// Gaussian pump/Stokes pulse pair.
///
/// The Stokes pulse peaks at `-tau` and the pump at `+tau`, so `tau > 0` is the
/// counterintuitive ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Peak Rabi frequency scale.
    pub omega0: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
    /// Half the separation between the two pulse peaks.
    pub tau: f64,
    /// Gaussian width.
    pub width: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Constant phases of the pump and Stokes Rabi frequencies.
    pub phase_p: f64,
    pub phase_s: f64,
}

impl PulseParams {
    /// Pulse pair with unit amplitude multipliers on the default window
    /// `[-(|tau| + 4 width), |tau| + 4 width]`.
    pub fn new(omega0: f64, width: f64, tau: f64) -> Result<Self> {
        let half = tau.abs() + WINDOW_WIDTHS * width;
        let p = PulseParams {
            omega0,
            kappa_p: 1.0,
            kappa_s: 1.0,
            tau,
            width,
            t_start: -half,
            t_end: half,
            phase_p: 0.0,
            phase_s: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pulses in units where the width is 1: `omega0 = omega0_t`, `tau = tau_over_t`.
    pub fn reduced(omega0_t: f64, tau_over_t: f64) -> Result<Self> {
        Self::new(omega0_t, 1.0, tau_over_t)
    }

    pub fn with_kappas(mut self, kappa_p: f64, kappa_s: f64) -> Result<Self> {
        self.kappa_p = kappa_p;
        self.kappa_s = kappa_s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_window(mut self, t_start: f64, t_end: f64) -> Result<Self> {
        self.t_start = t_start;
        self.t_end = t_end;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        let fields = [
            self.omega0,
            self.kappa_p,
            self.kappa_s,
            self.tau,
            self.width,
            self.t_start,
            self.t_end,
            self.phase_p,
            self.phase_s,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return bad("pulse parameters must be finite");
        }
        if self.omega0 <= 0.0 {
            return bad("omega0 must be positive");
        }
        if self.width <= 0.0 {
            return bad("pulse width must be positive");
        }
        if self.kappa_p < 0.0 || self.kappa_s < 0.0 {
            return bad("amplitude multipliers must be non-negative");
        }
        if self.t_start >= self.t_end {
            return bad("t_start must precede t_end");
        }
        if -self.tau.abs() < self.t_start || self.tau.abs() > self.t_end {
            return bad("both pulse peaks must lie inside the protocol window");
        }
        Ok(())
    }

    /// Product of peak Rabi frequency and pulse width, the adiabaticity parameter.
    pub fn omega0_t(&self) -> f64 {
        self.omega0 * self.width
    }

    pub fn stokes_peak(&self) -> f64 {
        -self.tau
    }

    pub fn pump_peak(&self) -> f64 {
        self.tau
    }
}

/// Real pump and Stokes envelopes `(omega_p, omega_s)` at time `t`.
pub fn pulse_envelopes(t: f64, p: &PulseParams) -> (f64, f64) {
    let gauss = |center: f64| {
        let u = (t - center) / p.width;
        (-u * u).exp()
    };
    (
        p.kappa_p * p.omega0 * gauss(p.tau),
        p.kappa_s * p.omega0 * gauss(-p.tau),
    )
}

/// Two-photon detuning `delta` and single-photon pump detuning `delta_p`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetuningParams {
    pub delta: f64,
    pub delta_p: f64,
}

impl DetuningParams {
    pub fn new(delta: f64, delta_p: f64) -> Self {
        DetuningParams { delta, delta_p }
    }

    pub fn resonant() -> Self {
        Self::default()
    }

    /// Stokes detuning, `delta_p - delta`.
    pub fn delta_s(&self) -> f64 {
        self.delta_p - self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelDrive {
    pub pulses: PulseParams,
    pub detunings: DetuningParams,
}

impl ThreeLevelDrive {
    pub fn new(pulses: PulseParams, detunings: DetuningParams) -> Self {
        ThreeLevelDrive { pulses, detunings }
    }

    pub fn resonant(pulses: PulseParams) -> Self {
        Self::new(pulses, DetuningParams::resonant())
    }

    pub fn hamiltonian(&self, t: f64) -> Hamiltonian {
        rwa_hamiltonian(t, self)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.pulses.t_start, self.pulses.t_end)
    }
}

/// Three complex amplitudes in the bare basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub Vector3<C64>);

impl StateVector {
    pub fn new(c0: C64, c1: C64, c2: C64) -> Self {
        StateVector(Vector3::new(c0, c1, c2))
    }

    pub fn from_real(c0: f64, c1: f64, c2: f64) -> Self {
        Self::new(c0.into(), c1.into(), c2.into())
    }

    /// Bare basis state `|level>`.
    ///
    /// # Panics
    /// If `level > 2`.
    pub fn basis(level: usize) -> Self {
        assert!(level < 3, "three-level system has no level {level}");
        let mut v = Vector3::zeros();
        v[level] = C64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// RWA Hamiltonian: diagonal `(0, delta, delta_p)`, `H[2][0] = omega_p / 2`,
/// `H[2][1] = omega_s / 2`, Hermitian conjugates above the diagonal.
pub fn rwa_hamiltonian(t: f64, d: &ThreeLevelDrive) -> Hamiltonian {
    let p = &d.pulses;
    let (wp, ws) = pulse_envelopes(t, p);
    let half_p = C64::from_polar(0.5 * wp, p.phase_p);
    let half_s = C64::from_polar(0.5 * ws, p.phase_s);
    let zero = C64::new(0.0, 0.0);
    Matrix3::new(
        zero,
        zero,
        half_p.conj(),
        zero,
        C64::new(d.detunings.delta, 0.0),
        half_s.conj(),
        half_p,
        half_s,
        C64::new(d.detunings.delta_p, 0.0),
    )
}

/// Zero-energy eigenvector at two-photon resonance, `(omega_s, -omega_p, 0) / norm`.
pub fn dark_state(omega_p: f64, omega_s: f64) -> Result<StateVector> {
    let norm = omega_p.hypot(omega_s);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::UndefinedDarkState);
    }
    Ok(StateVector::from_real(omega_s / norm, -omega_p / norm, 0.0))
}

/// Instantaneous eigen-decomposition of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticSpectrum {
    pub values: [f64; 3],
    pub vectors: [StateVector; 3],
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
pub fn adiabatic_spectrum(t: f64, d: &ThreeLevelDrive) -> AdiabaticSpectrum {
    hermitian_eigen(&rwa_hamiltonian(t, d))
}

pub(crate) fn hermitian_eigen(h: &Hamiltonian) -> AdiabaticSpectrum {
    let eig = h.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.map(|k| eig.eigenvalues[k]);
    let vectors = order.map(|k| StateVector(eig.eigenvectors.column(k).into_owned()));
    AdiabaticSpectrum { values, vectors }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Adiabatic eigenvalues along `times`, with branches labelled by continuity.
///
/// At the first time the branches follow the bare-state labels `(|0>, |1>, |2>)`,
/// so before the pulses the ordering is `(0, delta, delta_p)`. At later times each
/// branch picks the eigenvector with the largest overlap with its previous one.
/// Eigenvector phases are aligned to the previous step.
pub fn adiabatic_track(d: &ThreeLevelDrive, times: &[f64]) -> Vec<AdiabaticSpectrum> {
    let mut out: Vec<AdiabaticSpectrum> = Vec::with_capacity(times.len());
    let bare = [StateVector::basis(0), StateVector::basis(1), StateVector::basis(2)];
    for &t in times {
        let sorted = adiabatic_spectrum(t, d);
        let reference = out.last().map(|s| s.vectors).unwrap_or(bare);
        let best = PERMUTATIONS
            .iter()
            .max_by(|a, b| {
                let score = |perm: &[usize; 3]| -> f64 {
                    (0..3)
                        .map(|branch| reference[branch].overlap(&sorted.vectors[perm[branch]]).powi(2))
                        .sum()
                };
                score(a).total_cmp(&score(b))
            })
            .copied()
            .unwrap_or([0, 1, 2]);
        let mut values = [0.0; 3];
        let mut vectors = sorted.vectors;
        for branch in 0..3 {
            values[branch] = sorted.values[best[branch]];
            let mut v = sorted.vectors[best[branch]];
            let ov = reference[branch].inner(&v);
            if ov.norm() > 0.0 {
                let phase = ov.conj() / ov.norm();
                v.0 *= phase;
            }
            vectors[branch] = v;
        }
        out.push(AdiabaticSpectrum { values, vectors });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig1_pulses() -> PulseParams {
        PulseParams::reduced(20.0, 0.6).unwrap()
    }

    #[test]
    fn envelopes_peak_values() {
        let p = fig1_pulses().with_kappas(0.7, 1.3).unwrap();
        let (wp, _) = pulse_envelopes(p.tau, &p);
        let (_, ws) = pulse_envelopes(-p.tau, &p);
        assert_eq!(wp, 0.7 * 20.0);
        assert_eq!(ws, 1.3 * 20.0);
    }

    #[test]
    fn stokes_precedes_pump() {
        let p = fig1_pulses();
        assert!(p.stokes_peak() < p.pump_peak());
        let (wp, ws) = pulse_envelopes(-1.0, &p);
        assert!(ws > wp);
    }

    #[test]
    fn default_window_contains_peaks() {
        let p = fig1_pulses();
        assert_abs_diff_eq!(p.t_start, -4.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t_end, 4.6, epsilon = 1e-15);
    }

    #[test]
    fn invalid_pulses_rejected() {
        assert!(PulseParams::new(0.0, 1.0, 0.6).is_err());
        assert!(PulseParams::new(1.0, -1.0, 0.6).is_err());
        assert!(fig1_pulses().with_kappas(-1.0, 1.0).is_err());
        assert!(fig1_pulses().with_window(1.0, 0.0).is_err());
        assert!(fig1_pulses().with_window(-0.1, 5.0).is_err());
    }

    #[test]
    fn zero_drive_gives_zero_hamiltonian() {
        let p = fig1_pulses().with_kappas(0.0, 0.0).unwrap();
        let h = rwa_hamiltonian(0.3, &ThreeLevelDrive::resonant(p));
        assert_eq!(h, Hamiltonian::zeros());
    }

    #[test]
    fn pump_peak_entries() {
        let p = fig1_pulses();
        let h = rwa_hamiltonian(p.tau, &ThreeLevelDrive::resonant(p));
        assert_eq!(h[(2, 0)].re, 10.0);
        assert_eq!(h[(0, 2)].re, 10.0);
        assert_eq!(h[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn hamiltonian_hermitian_with_phases() {
        let mut p = fig1_pulses();
        p.phase_p = 0.4;
        p.phase_s = -1.1;
        let d = ThreeLevelDrive::new(p, DetuningParams::new(0.3, -2.0));
        let h = rwa_hamiltonian(0.2, &d);
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn dark_state_limits() {
        let d0 = dark_state(0.0, 2.0).unwrap();
        assert_abs_diff_eq!(d0.overlap(&StateVector::basis(0)), 1.0, epsilon = 1e-15);
        let d1 = dark_state(2.0, 0.0).unwrap();
        assert_abs_diff_eq!(d1.overlap(&StateVector::basis(1)), 1.0, epsilon = 1e-15);
        let d = dark_state(1.0, 1.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(d.0[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(d.0[1].re, -s, epsilon = 1e-15);
        assert_eq!(d.0[2], C64::new(0.0, 0.0));
        assert_eq!(dark_state(0.0, 0.0), Err(Error::UndefinedDarkState));
    }

    #[test]
    fn resonant_spectrum_has_dark_branch() {
        let p = fig1_pulses();
        let d = ThreeLevelDrive::new(p, DetuningParams::new(0.0, -4.0));
        let t = 0.1;
        let spec = adiabatic_spectrum(t, &d);
        let (wp, ws) = pulse_envelopes(t, &p);
        let dark = dark_state(wp, ws).unwrap();
        let k = (0..3)
            .min_by(|&a, &b| spec.values[a].abs().total_cmp(&spec.values[b].abs()))
            .unwrap();
        assert!(spec.values[k].abs() < 1e-12);
        assert_abs_diff_eq!(spec.vectors[k].overlap(&dark), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn empty_drive_spectrum_is_zero() {
        let p = fig1_pulses().with_kappas(0.0, 0.0).unwrap();
        let spec = adiabatic_spectrum(0.0, &ThreeLevelDrive::resonant(p));
        assert_eq!(spec.values, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn track_starts_in_bare_order() {
        let p = fig1_pulses();
        let d = ThreeLevelDrive::new(p, DetuningParams::new(4.0, -6.0));
        let times: Vec<f64> = (0..=400).map(|i| p.t_start + (p.t_end - p.t_start) * i as f64 / 400.0).collect();
        let track = adiabatic_track(&d, &times);
        let first = &track[0];
        assert_abs_diff_eq!(first.values[0], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(first.values[1], 4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(first.values[2], -6.0, epsilon = 1e-6);
    }
}
