//! Parameter sweeps and derived quantities: efficiency diagrams over the
//! detunings, Landau-Zener pattern classes, two-photon linewidths, the device
//! figure of merit and Markovian versus static-noise dephasing scans.

pub mod contour;
pub mod sweep;

use crate::cpb::{calibrated_pump_rabi, cpb_spectrum, CpbModel, CpbSpectrum};
use crate::dynamics::{propagate, propagate_unitary, MarkovRates, TimeGrid};
use crate::error::{Error, Result};
use crate::model3::{DetuningParams, PulseParams, StateVector, ThreeLevelDrive};
use crate::noise::{gaussian_dephasing_equivalent, spa_average, Fluctuations, NoiseResponse, SpaResult, SpaSpec};

pub use contour::{marching_squares, Polyline};
pub use sweep::{run_sweep, CellResult, Checkpoint, SweepOptions};

pub const DEFAULT_CONTOUR_LEVEL: f64 = 0.9;
pub const DEFAULT_LINEWIDTH_LEVEL: f64 = 0.5;
pub const DEFAULT_MAP_POINTS: usize = 81;
/// Largest detuning handled by sweeps and linewidth searches, in units of `omega0`.
pub const MAX_DETUNING: f64 = 2.0;
const LINEWIDTH_SCAN_STEP: f64 = 0.02;
const LINEWIDTH_RESOLUTION: f64 = 1e-3;

/// `n` points from `lo` to `hi`, symmetric about the midpoint.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let m = (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| mid + half * ((2 * i) as f64 - m) / m).collect();
            v[0] = lo;
            v[n - 1] = hi;
            v
        }
    }
}

/// Rectangular detuning grid in units of `omega0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub delta: (f64, f64),
    pub delta_p: (f64, f64),
    pub n_delta: usize,
    pub n_delta_p: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(1.0, DEFAULT_MAP_POINTS)
    }
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        GridSpec { delta: (-half_width, half_width), delta_p: (-half_width, half_width), n_delta: n, n_delta_p: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_delta < 2 || self.n_delta_p < 2 {
            return Err(Error::InvalidParameter("detuning grid needs at least 2 points per axis".into()));
        }
        for (lo, hi) in [self.delta, self.delta_p] {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidParameter("grid bounds must be finite and increasing".into()));
            }
            if lo.abs() > MAX_DETUNING || hi.abs() > MAX_DETUNING {
                return Err(Error::InvalidParameter(format!("grid must lie within |detuning| <= {MAX_DETUNING} omega0")));
            }
        }
        Ok(())
    }

    pub fn delta_axis(&self) -> Vec<f64> {
        linspace(self.delta.0, self.delta.1, self.n_delta)
    }

    pub fn delta_p_axis(&self) -> Vec<f64> {
        linspace(self.delta_p.0, self.delta_p.1, self.n_delta_p)
    }

    pub fn cells(&self) -> usize {
        self.n_delta * self.n_delta_p
    }
}

/// Final population of `|1>` over a detuning grid. Axes are in units of `omega0`;
/// values are row-major with `delta` fastest and NaN where propagation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMap {
    pub omega0: f64,
    pub delta_axis: Vec<f64>,
    pub delta_p_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub failures: Vec<(usize, Error)>,
    pub contours: Vec<(f64, Vec<Polyline>)>,
}

/// Full width of the above-level region through the origin along each axis, in
/// units of `omega0`. A censored extent reached the grid edge and is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionExtent {
    pub along_delta: f64,
    pub along_delta_p: f64,
    pub delta_censored: bool,
    pub delta_p_censored: bool,
}

impl EfficiencyMap {
    pub fn value(&self, i_delta: usize, i_delta_p: usize) -> f64 {
        self.values[i_delta_p * self.delta_axis.len() + i_delta]
    }

    pub fn contour_at(&self, level: f64) -> Vec<Polyline> {
        marching_squares(&self.delta_axis, &self.delta_p_axis, &self.values, level)
    }

    /// The closed iso-line at `level` enclosing the origin, if any.
    pub fn origin_contour(&self, level: f64) -> Option<Polyline> {
        self.contour_at(level).into_iter().find(|c| c.closed && c.contains((0.0, 0.0)))
    }

    pub fn region_extent(&self, level: f64) -> Result<RegionExtent> {
        let i0 = origin_index(&self.delta_axis)?;
        let j0 = origin_index(&self.delta_p_axis)?;
        let nx = self.delta_axis.len();
        let row: Vec<f64> = (0..nx).map(|i| self.value(i, j0)).collect();
        let col: Vec<f64> = (0..self.delta_p_axis.len()).map(|j| self.value(i0, j)).collect();
        let (along_delta, delta_censored) = width_through(&self.delta_axis, &row, i0, level)?;
        let (along_delta_p, delta_p_censored) = width_through(&self.delta_p_axis, &col, j0, level)?;
        Ok(RegionExtent { along_delta, along_delta_p, delta_censored, delta_p_censored })
    }
}

fn origin_index(axis: &[f64]) -> Result<usize> {
    let span = axis.last().unwrap_or(&0.0) - axis.first().unwrap_or(&0.0);
    let (i, x) = axis
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .ok_or_else(|| Error::OutOfRange("empty axis".into()))?;
    if x.abs() > 1e-12 * span.abs() {
        return Err(Error::OutOfRange("the origin is not a grid node".into()));
    }
    Ok(i)
}

fn width_through(axis: &[f64], values: &[f64], i0: usize, level: f64) -> Result<(f64, bool)> {
    if !(values[i0] >= level) {
        return Err(Error::OutOfRange(format!("efficiency at the origin is below {level}")));
    }
    let mut censored = false;
    let mut edge = |step: isize| -> f64 {
        let mut i = i0;
        loop {
            let next = i as isize + step;
            if next < 0 || next as usize >= axis.len() {
                censored = true;
                return axis[i];
            }
            let n = next as usize;
            if !(values[n] >= level) {
                let v1 = if values[n].is_nan() { f64::NEG_INFINITY } else { values[n] };
                let t = if v1.is_infinite() { 0.0 } else { (values[i] - level) / (values[i] - v1) };
                return axis[i] + t * (axis[n] - axis[i]);
            }
            i = n;
        }
    };
    let hi = edge(1);
    let lo = edge(-1);
    Ok((hi - lo, censored))
}

/// Efficiency over a detuning grid, with iso-lines at `levels`.
pub fn efficiency_diagram(
    pulses: &PulseParams,
    grid: &GridSpec,
    levels: &[f64],
    tol: f64,
    opts: &SweepOptions,
) -> Result<EfficiencyMap> {
    pulses.validate()?;
    grid.validate()?;
    let delta_axis = grid.delta_axis();
    let delta_p_axis = grid.delta_p_axis();
    let nx = delta_axis.len();
    let omega0 = pulses.omega0;
    let psi0 = StateVector::basis(0);

    let cell = |k: usize| -> Result<Vec<f64>> {
        let det = DetuningParams::new(delta_axis[k % nx] * omega0, delta_p_axis[k / nx] * omega0);
        let d = ThreeLevelDrive::new(*pulses, det);
        Ok(vec![propagate_unitary(&d, &psi0, &TimeGrid::endpoints(&d), tol)?.efficiency])
    };
    let cells = run_sweep(grid.cells(), 1, cell, opts)?;

    let mut values = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (k, c) in cells.into_iter().enumerate() {
        match c {
            CellResult::Ok(v) => values.push(v[0]),
            CellResult::Failed(e) => {
                values.push(f64::NAN);
                failures.push((k, e));
            }
        }
    }
    let mut map = EfficiencyMap { omega0, delta_axis, delta_p_axis, values, failures, contours: Vec::new() };
    map.contours = levels.iter().map(|&l| (l, map.contour_at(l))).collect();
    Ok(map)
}

/// Landau-Zener pattern of the adiabatic levels for a given detuning ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LzPattern {
    /// `delta_p / delta > 1`
    A,
    /// `delta_p / delta < 0`
    B,
    /// `0 <= delta_p / delta < 1`
    C,
}

impl std::fmt::Display for LzPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LzPattern::A => "a",
            LzPattern::B => "b",
            LzPattern::C => "c",
        })
    }
}

pub fn lz_classify(delta: f64, delta_p: f64) -> Result<LzPattern> {
    if !delta.is_finite() || !delta_p.is_finite() {
        return Err(Error::InvalidParameter("detunings must be finite".into()));
    }
    if delta == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let r = delta_p / delta;
    Ok(if r > 1.0 {
        LzPattern::A
    } else if r < 0.0 {
        LzPattern::B
    } else {
        // the single-point boundary r == 1 belongs to neither listed interval; it
        // joins its neighbour below
        LzPattern::C
    })
}

/// Half-width of the efficiency along the line `delta_p = slope * delta`: the
/// first `|delta|` where the final population of `|1>` drops below `level`,
/// averaged over both signs of `delta`. Returned in the units of `pulses.omega0`.
pub fn two_photon_linewidth(pulses: &PulseParams, slope: f64, level: f64, tol: f64) -> Result<f64> {
    pulses.validate()?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter("level must lie in (0, 1)".into()));
    }
    if !slope.is_finite() {
        return Err(Error::InvalidParameter("slope must be finite".into()));
    }
    let omega0 = pulses.omega0;
    let efficiency = |delta: f64| -> Result<f64> {
        let d = ThreeLevelDrive::new(*pulses, DetuningParams::new(delta, slope * delta));
        Ok(propagate_unitary(&d, &StateVector::basis(0), &TimeGrid::endpoints(&d), tol)?.efficiency)
    };
    let on_axis = efficiency(0.0)?;
    if on_axis <= level {
        return Err(Error::InvalidParameter(format!("resonant efficiency {on_axis:.4} does not exceed level {level}")));
    }

    let crossing = |sign: f64| -> Result<f64> {
        let step = LINEWIDTH_SCAN_STEP * omega0;
        let steps = (MAX_DETUNING / LINEWIDTH_SCAN_STEP).round() as usize;
        let mut inside = 0.0;
        for k in 1..=steps {
            let x = k as f64 * step;
            if efficiency(sign * x)? < level {
                let mut outside = x;
                while outside - inside > LINEWIDTH_RESOLUTION * omega0 {
                    let mid = 0.5 * (inside + outside);
                    if efficiency(sign * mid)? < level {
                        outside = mid;
                    } else {
                        inside = mid;
                    }
                }
                return Ok(0.5 * (inside + outside));
            }
            inside = x;
        }
        Err(Error::OutOfRange(format!("efficiency stays above {level} up to |delta| = {MAX_DETUNING} omega0")))
    };
    let (pos, neg) = rayon::join(|| crossing(1.0), || crossing(-1.0));
    Ok(0.5 * (pos? + neg?))
}

/// Standard deviation of the two-photon detuning for a static offset of width
/// `sigma_x`, to second order in the level expansion.
pub fn sigma_delta(sigma_x: f64, a1: f64, b1: f64) -> Result<f64> {
    if !(sigma_x >= 0.0) {
        return Err(Error::InvalidParameter("sigma_x must be non-negative".into()));
    }
    let s2 = sigma_x * sigma_x;
    Ok((a1 * a1 * s2 + 0.5 * b1 * b1 * s2 * s2).sqrt())
}

/// `2 |n_02| / sigma_delta`: pump coupling against two-photon detuning noise.
pub fn figure_of_merit(spectrum: &CpbSpectrum, sigma_x: f64) -> Result<f64> {
    if !(sigma_x > 0.0) || !sigma_x.is_finite() {
        return Err(Error::InvalidParameter("sigma_x must be positive".into()));
    }
    if spectrum.levels() < 3 {
        return Err(Error::InvalidParameter("figure of merit needs three device levels".into()));
    }
    let sd = sigma_delta(sigma_x, spectrum.a[1], spectrum.b[1])?;
    if sd == 0.0 {
        return Err(Error::OutOfDomain("vanishing detuning noise: merit diverges".into()));
    }
    Ok(2.0 * spectrum.n(0, 2).abs() / sd)
}

/// Figure of merit over a `(J, q_g)` grid; row-major with `q_g` fastest. Undefined
/// merits are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MeritMap {
    pub j_axis: Vec<f64>,
    pub qg_axis: Vec<f64>,
    pub sigma_x: f64,
    /// `|n_02|`
    pub n02: Vec<f64>,
    pub a1: Vec<f64>,
    pub b1: Vec<f64>,
    pub sigma_delta: Vec<f64>,
    pub merit: Vec<f64>,
    pub failures: Vec<(usize, Error)>,
}

pub fn merit_map(j_axis: &[f64], qg_axis: &[f64], sigma_x: f64, n_max: usize, opts: &SweepOptions) -> Result<MeritMap> {
    if j_axis.is_empty() || qg_axis.is_empty() {
        return Err(Error::InvalidParameter("merit map axes must be non-empty".into()));
    }
    if !(sigma_x > 0.0) || !sigma_x.is_finite() {
        return Err(Error::InvalidParameter("sigma_x must be positive".into()));
    }
    let nq = qg_axis.len();
    let cell = |k: usize| -> Result<Vec<f64>> {
        let model = CpbModel::new(j_axis[k / nq], qg_axis[k % nq]).with_n_max(n_max);
        let s = cpb_spectrum(&model, 3)?;
        let sd = sigma_delta(sigma_x, s.a[1], s.b[1])?;
        let merit = match figure_of_merit(&s, sigma_x) {
            Ok(m) => m,
            Err(Error::OutOfDomain(_)) => f64::NAN,
            Err(e) => return Err(e),
        };
        Ok(vec![s.n(0, 2).abs(), s.a[1], s.b[1], sd, merit])
    };
    let cells = run_sweep(j_axis.len() * nq, 5, cell, opts)?;

    let mut m = MeritMap {
        j_axis: j_axis.to_vec(),
        qg_axis: qg_axis.to_vec(),
        sigma_x,
        n02: Vec::new(),
        a1: Vec::new(),
        b1: Vec::new(),
        sigma_delta: Vec::new(),
        merit: Vec::new(),
        failures: Vec::new(),
    };
    for (k, c) in cells.into_iter().enumerate() {
        let v = match c {
            CellResult::Ok(v) => v,
            CellResult::Failed(e) => {
                m.failures.push((k, e));
                vec![f64::NAN; 5]
            }
        };
        m.n02.push(v[0]);
        m.a1.push(v[1]);
        m.b1.push(v[2]);
        m.sigma_delta.push(v[3]);
        m.merit.push(v[4]);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DephasingMode {
    /// Lindblad dephasing of the trapped subspace at rate `1/T2`.
    Markov,
    /// Static Gaussian detuning noise with the same `T2`.
    Spa,
}

impl std::fmt::Display for DephasingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DephasingMode::Markov => "markov",
            DephasingMode::Spa => "spa",
        })
    }
}

impl std::str::FromStr for DephasingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov" => Ok(DephasingMode::Markov),
            "spa" => Ok(DephasingMode::Spa),
            _ => Err(Error::Config(format!("unknown dephasing mode `{s}` (expected markov or spa)"))),
        }
    }
}

/// Pulse shape and noise strength for a dephasing scan; times in units of the
/// pulse width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingSetup {
    pub tau_over_t: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
    pub t2: f64,
    /// Level slopes of `delta` and `delta_p` in the offset; only `a1 * sigma_x`
    /// (and `a2 * sigma_x`) enter.
    pub a1: f64,
    pub a2: f64,
    pub order: usize,
}

impl DephasingSetup {
    pub fn new(tau_over_t: f64, t2: f64) -> Self {
        DephasingSetup { tau_over_t, kappa_p: 1.0, kappa_s: 1.0, t2, a1: 1.0, a2: 0.0, order: crate::noise::DEFAULT_ORDER }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingRow {
    pub omega0_t: f64,
    pub mode: DephasingMode,
    pub populations: [f64; 3],
}

/// Final populations against `omega0 T` for each requested noise model, ordered by
/// `omega0 T` then by mode.
pub fn dephasing_scan(
    omega0_t: &[f64],
    setup: &DephasingSetup,
    modes: &[DephasingMode],
    tol: f64,
    opts: &SweepOptions,
) -> Result<Vec<DephasingRow>> {
    if !(setup.t2 > 0.0) || !setup.t2.is_finite() {
        return Err(Error::InvalidParameter("T2 must be positive".into()));
    }
    if modes.is_empty() {
        return Err(Error::InvalidParameter("no dephasing mode selected".into()));
    }
    let sigma_x = gaussian_dephasing_equivalent(setup.t2, setup.a1)?;
    let pulses: Vec<PulseParams> = omega0_t
        .iter()
        .map(|&o| PulseParams::reduced(o, setup.tau_over_t)?.with_kappas(setup.kappa_p, setup.kappa_s))
        .collect::<Result<_>>()?;
    let psi0 = StateVector::basis(0);
    let nm = modes.len();

    let cell = |k: usize| -> Result<Vec<f64>> {
        let d = ThreeLevelDrive::resonant(pulses[k / nm]);
        let grid = TimeGrid::endpoints(&d);
        let p = match modes[k % nm] {
            DephasingMode::Markov => {
                let rates = MarkovRates::trapped_dephasing(1.0 / setup.t2);
                propagate(&d, &rates, &psi0, &grid, tol)?.final_populations()
            }
            DephasingMode::Spa => {
                let response = NoiseResponse::detuning_only(setup.a1, setup.a2);
                let spec = SpaSpec::gauss_hermite(sigma_x, setup.order, Fluctuations::linear_detunings());
                spa_average(&d, &response, &spec, &MarkovRates::none(), &psi0, &grid, tol)?.final_populations()
            }
        };
        Ok(p.to_vec())
    };
    let cells = run_sweep(omega0_t.len() * nm, 3, cell, opts)?;
    cells
        .into_iter()
        .enumerate()
        .map(|(k, c)| match c {
            CellResult::Ok(v) => {
                Ok(DephasingRow { omega0_t: omega0_t[k / nm], mode: modes[k % nm], populations: [v[0], v[1], v[2]] })
            }
            CellResult::Failed(e) => Err(e),
        })
        .collect()
}

/// Rabi frequency of the `0 <-> 1` transition at the symmetry point, in charging
/// units, used to calibrate the device drive: 600 MHz against a 13.75 GHz
/// charging frequency.
pub const DEFAULT_OMEGA_R: f64 = 0.6 / 13.75;

/// Lambda-system transfer in a Cooper-pair box with equal peak pump and Stokes
/// Rabi frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbStirap {
    pub model: CpbModel,
    /// Calibration Rabi frequency, charging units.
    pub omega_r: f64,
    pub omega0_t: f64,
    pub tau_over_t: f64,
}

impl CpbStirap {
    pub fn new(model: CpbModel, omega0_t: f64, tau_over_t: f64) -> Self {
        CpbStirap { model, omega_r: DEFAULT_OMEGA_R, omega0_t, tau_over_t }
    }

    /// Peak pump Rabi frequency in charging units.
    pub fn omega0(&self) -> Result<f64> {
        let o = calibrated_pump_rabi(&self.model, self.omega_r)?;
        if o <= 0.0 {
            return Err(Error::OutOfDomain("the pump coupling vanishes at this bias".into()));
        }
        Ok(o)
    }

    /// Drive in units of the pulse width and the offset response in the same units.
    pub fn drive(&self) -> Result<(ThreeLevelDrive, NoiseResponse)> {
        let omega0 = self.omega0()?;
        let pulses = PulseParams::reduced(self.omega0_t, self.tau_over_t)?;
        let response = NoiseResponse::from_device(&self.model, self.omega0_t / omega0)?;
        Ok((ThreeLevelDrive::resonant(pulses), response))
    }

    pub fn spa_efficiency(&self, spec: &SpaSpec, tol: f64) -> Result<SpaResult> {
        let (d, response) = self.drive()?;
        spa_average(&d, &response, spec, &MarkovRates::none(), &StateVector::basis(0), &TimeGrid::endpoints(&d), tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_axis() {
        let a = linspace(-1.0, 1.0, 81);
        assert_eq!(a[40], 0.0);
        assert_eq!(a[0], -1.0);
        assert_eq!(a[80], 1.0);
        for i in 0..81 {
            assert_eq!(a[i], -a[80 - i]);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::square(1.0, 0).validate().is_err());
        assert!(GridSpec::square(2.5, 11).validate().is_err());
        assert!(GridSpec::square(2.0, 11).validate().is_ok());
    }

    #[test]
    fn lz_examples() {
        assert_eq!(lz_classify(1.0, 2.0).unwrap(), LzPattern::A);
        assert_eq!(lz_classify(1.0, -0.5).unwrap(), LzPattern::B);
        assert_eq!(lz_classify(1.0, 0.5).unwrap(), LzPattern::C);
        assert_eq!(lz_classify(-1.0, -2.0).unwrap(), LzPattern::A);
        assert_eq!(lz_classify(1.0, 0.0).unwrap(), LzPattern::C);
        assert_eq!(lz_classify(0.0, 1.0), Err(Error::UndefinedRatio));
    }

    #[test]
    fn sigma_delta_examples() {
        assert_abs_diff_eq!(sigma_delta(0.1, -0.3, 0.0).unwrap(), 0.03, epsilon = 1e-15);
        assert_eq!(sigma_delta(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_delta(0.1, 0.0, 2.0).unwrap(), 0.0141421356237, epsilon = 1e-12);
        assert!(sigma_delta(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn merit_reduces_without_curvature() {
        let s = cpb_spectrum(&CpbModel::new(1.0, 0.48), 3).unwrap();
        let m = figure_of_merit(&s, 0.004).unwrap();
        let expected = 2.0 * s.n(0, 2).abs() / sigma_delta(0.004, s.a[1], s.b[1]).unwrap();
        assert_eq!(m, expected);
        let sweet = cpb_spectrum(&CpbModel::new(1.0, 0.5), 3).unwrap();
        assert!(figure_of_merit(&sweet, 0.004).unwrap() < 1e-9);
        let flat = CpbSpectrum { a: vec![0.0; 3], b: vec![0.0; 3], ..sweet };
        assert!(matches!(figure_of_merit(&flat, 0.004), Err(Error::OutOfDomain(_))));
        assert!(figure_of_merit(&s, 0.0).is_err());
    }

    #[test]
    fn small_map_is_consistent() {
        let pulses = PulseParams::reduced(20.0, 0.6).unwrap();
        let grid = GridSpec::square(1.0, 5);
        let map = efficiency_diagram(&pulses, &grid, &[0.9], 1e-8, &SweepOptions::default()).unwrap();
        assert!(map.failures.is_empty());
        assert!(map.value(2, 2) >= 0.999);
        assert!(map.values.iter().all(|v| (0.0..=1.0 + 1e-9).contains(v)));
        // point symmetry of the map
        for j in 0..5 {
            for i in 0..5 {
                assert_abs_diff_eq!(map.value(i, j), map.value(4 - i, 4 - j), epsilon = 1e-7);
            }
        }
    }
}
