//! Flat INI-style run configuration.
//!
//! ```text
//! # comment
//! [pulses]
//! omega0T = 20
//! tau_over_T = 0.6
//! ```
//!
//! Times are in units of the pulse width `T`, detunings in units of `omega0`,
//! device energies in charging units. Unknown sections and keys are rejected.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use crate::analysis::{DephasingMode, GridSpec, DEFAULT_CONTOUR_LEVEL, DEFAULT_LINEWIDTH_LEVEL, DEFAULT_OMEGA_R};
use crate::cpb::DEFAULT_N_MAX;
use crate::dynamics::{MarkovRates, DEFAULT_GRID_POINTS, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::noise::{Fluctuations, QuadratureMethod, SpaSpec, DEFAULT_ORDER};
use crate::output::SIGNIFICANT_DIGITS;

#[derive(Debug, Clone, PartialEq)]
pub struct PulsesSection {
    pub omega0_t: f64,
    pub tau_over_t: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetuningsSection {
    pub delta: f64,
    pub delta_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSection {
    pub josephson: f64,
    pub gate_charge: f64,
    pub n_max: usize,
    /// Calibration Rabi frequency on `0 <-> 1` at the symmetry point.
    pub omega_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GaussHermite,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub sigma_x: f64,
    pub method: Method,
    pub order: usize,
    pub samples: usize,
    /// Monte Carlo sample stream.
    pub seed: u64,
    pub fluctuate: Fluctuations,
    pub t2: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_p_min: f64,
    pub delta_p_max: f64,
    pub n_delta: usize,
    pub n_delta_p: usize,
    pub levels: Vec<f64>,
    pub checkpoint_every: usize,
    pub omega0_t_list: Vec<f64>,
    pub modes: Vec<DephasingMode>,
    pub q_g_min: f64,
    pub q_g_max: f64,
    pub q_g_points: usize,
    pub j_min: f64,
    pub j_max: f64,
    pub j_points: usize,
    pub slope: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub directory: String,
    pub precision: usize,
    /// Laboratory frequency per unit `1/T`, in GHz; display only.
    pub scale_ghz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    /// Zero means one worker per core.
    pub workers: usize,
    pub tol: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pulses: PulsesSection,
    pub detunings: DetuningsSection,
    pub device: DeviceSection,
    pub noise: NoiseSection,
    pub markov: MarkovRates,
    pub sweep: SweepSection,
    pub output: OutputSection,
    pub run: RunSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSpec::default();
        RunConfig {
            pulses: PulsesSection { omega0_t: 20.0, tau_over_t: 0.6, kappa_p: 1.0, kappa_s: 1.0 },
            detunings: DetuningsSection { delta: 0.0, delta_p: 0.0 },
            device: DeviceSection { josephson: 1.0, gate_charge: 0.48, n_max: DEFAULT_N_MAX, omega_r: DEFAULT_OMEGA_R },
            noise: NoiseSection {
                sigma_x: 0.0,
                method: Method::GaussHermite,
                order: DEFAULT_ORDER,
                samples: 2000,
                seed: 0,
                fluctuate: Fluctuations::linear_detunings(),
                t2: 2.0,
                a1: 1.0,
                a2: 0.0,
            },
            markov: MarkovRates::none(),
            sweep: SweepSection {
                delta_min: grid.delta.0,
                delta_max: grid.delta.1,
                delta_p_min: grid.delta_p.0,
                delta_p_max: grid.delta_p.1,
                n_delta: grid.n_delta,
                n_delta_p: grid.n_delta_p,
                levels: vec![DEFAULT_CONTOUR_LEVEL],
                checkpoint_every: 500,
                omega0_t_list: vec![1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 50.0, 100.0],
                modes: vec![DephasingMode::Markov, DephasingMode::Spa],
                q_g_min: 0.40,
                q_g_max: 0.50,
                q_g_points: 11,
                j_min: 0.5,
                j_max: 2.0,
                j_points: 16,
                slope: 0.0,
                level: DEFAULT_LINEWIDTH_LEVEL,
            },
            output: OutputSection { directory: "out".into(), precision: SIGNIFICANT_DIGITS, scale_ghz: None },
            run: RunSection { workers: 0, tol: DEFAULT_TOL, grid_points: DEFAULT_GRID_POINTS },
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::Config(format!("`{key}`: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("`{key}`: expected a non-negative integer, got `{v}`")))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::Config(format!("`{key}` must not be empty")));
    }
    items.into_iter().map(|s| item(key, s)).collect()
}

fn parse_fluctuations(key: &str, v: &str) -> Result<Fluctuations> {
    let mut f = Fluctuations { detunings_linear: false, detunings_quadratic: false, rabi_linear: false, rabi_quadratic: false };
    if v.trim() == "none" {
        return Ok(f);
    }
    for item in parse_list(key, v, |_, s| Ok(s.to_string()))? {
        match item.as_str() {
            "detunings_linear" => f.detunings_linear = true,
            "detunings_quadratic" => f.detunings_quadratic = true,
            "rabi_linear" => f.rabi_linear = true,
            "rabi_quadratic" => f.rabi_quadratic = true,
            other => return Err(Error::Config(format!("`{key}`: unknown fluctuation `{other}`"))),
        }
    }
    f.validate()?;
    Ok(f)
}

fn fluctuations_str(f: &Fluctuations) -> String {
    let names: Vec<&str> = [
        (f.detunings_linear, "detunings_linear"),
        (f.detunings_quadratic, "detunings_quadratic"),
        (f.rabi_linear, "rabi_linear"),
        (f.rabi_quadratic, "rabi_quadratic"),
    ]
    .iter()
    .filter(|(on, _)| *on)
    .map(|(_, n)| *n)
    .collect();
    if names.is_empty() {
        "none".into()
    } else {
        names.join(",")
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut section: Option<String> = None;
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| at(format!("malformed section header `{line}`")))?.trim();
                if !SECTIONS.contains(&name) {
                    return Err(at(format!("unknown section `[{name}]`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.as_deref().ok_or_else(|| at(format!("key `{key}` outside of any section")))?;
            if !seen.insert((sec.to_string(), key.to_string())) {
                return Err(at(format!("duplicate key `{key}` in [{sec}]")));
            }
            cfg.set(sec, key, value).map_err(|e| match e {
                Error::Config(m) => at(m),
                other => at(other.to_string()),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<()> {
        let f = |v: &str| parse_f64(key, v);
        let u = |v: &str| parse_usize(key, v);
        match (section, key) {
            ("pulses", "omega0T") => self.pulses.omega0_t = f(v)?,
            ("pulses", "tau_over_T") => self.pulses.tau_over_t = f(v)?,
            ("pulses", "kappa_p") => self.pulses.kappa_p = f(v)?,
            ("pulses", "kappa_s") => self.pulses.kappa_s = f(v)?,
            ("detunings", "delta") => self.detunings.delta = f(v)?,
            ("detunings", "delta_p") => self.detunings.delta_p = f(v)?,
            ("device", "J") => self.device.josephson = f(v)?,
            ("device", "q_g") => self.device.gate_charge = f(v)?,
            ("device", "n_max") => self.device.n_max = u(v)?,
            ("device", "omega_r") => self.device.omega_r = f(v)?,
            ("noise", "sigma_x") => self.noise.sigma_x = f(v)?,
            ("noise", "method") => {
                self.noise.method = match v {
                    "gauss-hermite" => Method::GaussHermite,
                    "monte-carlo" => Method::MonteCarlo,
                    _ => return Err(Error::Config(format!("`{key}`: expected gauss-hermite or monte-carlo, got `{v}`"))),
                }
            }
            ("noise", "order") => self.noise.order = u(v)?,
            ("noise", "samples") => self.noise.samples = u(v)?,
            ("noise", "fluctuate") => self.noise.fluctuate = parse_fluctuations(key, v)?,
            ("noise", "T2") => self.noise.t2 = f(v)?,
            ("noise", "A1") => self.noise.a1 = f(v)?,
            ("noise", "A2") => self.noise.a2 = f(v)?,
            ("markov", "gamma_10") => self.markov.gamma_10 = f(v)?,
            ("markov", "gamma_20") => self.markov.gamma_20 = f(v)?,
            ("markov", "gamma_21") => self.markov.gamma_21 = f(v)?,
            ("markov", "dephasing_01") => self.markov.dephasing_01 = f(v)?,
            ("markov", "dephasing_02") => self.markov.dephasing_02 = f(v)?,
            ("markov", "dephasing_12") => self.markov.dephasing_12 = f(v)?,
            ("sweep", "delta_min") => self.sweep.delta_min = f(v)?,
            ("sweep", "delta_max") => self.sweep.delta_max = f(v)?,
            ("sweep", "delta_p_min") => self.sweep.delta_p_min = f(v)?,
            ("sweep", "delta_p_max") => self.sweep.delta_p_max = f(v)?,
            ("sweep", "n_delta") => self.sweep.n_delta = u(v)?,
            ("sweep", "n_delta_p") => self.sweep.n_delta_p = u(v)?,
            ("sweep", "levels") => self.sweep.levels = parse_list(key, v, parse_f64)?,
            ("sweep", "checkpoint_every") => self.sweep.checkpoint_every = u(v)?,
            ("sweep", "omega0T_list") => self.sweep.omega0_t_list = parse_list(key, v, parse_f64)?,
            ("sweep", "modes") => self.sweep.modes = parse_list(key, v, |_, s| s.parse::<DephasingMode>())?,
            ("sweep", "q_g_min") => self.sweep.q_g_min = f(v)?,
            ("sweep", "q_g_max") => self.sweep.q_g_max = f(v)?,
            ("sweep", "q_g_points") => self.sweep.q_g_points = u(v)?,
            ("sweep", "J_min") => self.sweep.j_min = f(v)?,
            ("sweep", "J_max") => self.sweep.j_max = f(v)?,
            ("sweep", "J_points") => self.sweep.j_points = u(v)?,
            ("sweep", "slope") => self.sweep.slope = f(v)?,
            ("sweep", "level") => self.sweep.level = f(v)?,
            ("output", "directory") => self.output.directory = v.to_string(),
            ("output", "precision") => self.output.precision = u(v)?,
            ("output", "scale_ghz") => self.output.scale_ghz = if v == "none" { None } else { Some(f(v)?) },
            ("noise", "seed") => {
                self.noise.seed = v.parse().map_err(|_| Error::Config(format!("`{key}`: expected an unsigned integer, got `{v}`")))?
            }
            ("run", "workers") => self.run.workers = u(v)?,
            ("run", "tol") => self.run.tol = f(v)?,
            ("run", "grid_points") => self.run.grid_points = u(v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}` in [{section}]"))),
        }
        Ok(())
    }

    /// Checks that do not need a physics run.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.pulses.omega0_t <= 0.0 {
            return bad("omega0T must be positive");
        }
        if self.pulses.kappa_p < 0.0 || self.pulses.kappa_s < 0.0 {
            return bad("kappa_p and kappa_s must be non-negative");
        }
        if self.device.n_max < 3 {
            return bad("n_max must be at least 3");
        }
        if self.noise.sigma_x < 0.0 {
            return bad("sigma_x must be non-negative");
        }
        if self.noise.t2 <= 0.0 {
            return bad("T2 must be positive");
        }
        if self.output.precision < 6 || self.output.precision > 17 {
            return bad("precision must lie in 6..=17");
        }
        if self.output.directory.is_empty() {
            return bad("output directory must not be empty");
        }
        if self.run.tol < crate::dynamics::MIN_TOL || self.run.tol > crate::dynamics::MAX_TOL {
            return bad("tol must lie in [1e-12, 1e-4]");
        }
        if self.run.grid_points < 2 {
            return bad("grid_points must be at least 2");
        }
        if !(self.sweep.level > 0.0 && self.sweep.level < 1.0) {
            return bad("level must lie in (0, 1)");
        }
        if self.sweep.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return bad("contour levels must lie in (0, 1)");
        }
        if self.sweep.omega0_t_list.iter().any(|o| *o <= 0.0) {
            return bad("omega0T_list entries must be positive");
        }
        self.spa_spec().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.markov.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn spa_spec(&self) -> SpaSpec {
        let method = match self.noise.method {
            Method::GaussHermite => QuadratureMethod::GaussHermite { order: self.noise.order },
            Method::MonteCarlo => QuadratureMethod::MonteCarlo { samples: self.noise.samples, seed: self.noise.seed },
        };
        SpaSpec { sigma_x: self.noise.sigma_x, method, fluctuate: self.noise.fluctuate }
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            delta: (self.sweep.delta_min, self.sweep.delta_max),
            delta_p: (self.sweep.delta_p_min, self.sweep.delta_p_max),
            n_delta: self.sweep.n_delta,
            n_delta_p: self.sweep.n_delta_p,
        }
    }

    pub fn workers(&self) -> Option<usize> {
        (self.run.workers > 0).then_some(self.run.workers)
    }

    /// The complete resolved configuration; parsing it gives back `self`.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let p = &self.pulses;
        let _ = writeln!(s, "[pulses]\nomega0T = {}\ntau_over_T = {}\nkappa_p = {}\nkappa_s = {}\n", p.omega0_t, p.tau_over_t, p.kappa_p, p.kappa_s);
        let _ = writeln!(s, "[detunings]\ndelta = {}\ndelta_p = {}\n", self.detunings.delta, self.detunings.delta_p);
        let d = &self.device;
        let _ = writeln!(s, "[device]\nJ = {}\nq_g = {}\nn_max = {}\nomega_r = {}\n", d.josephson, d.gate_charge, d.n_max, d.omega_r);
        let n = &self.noise;
        let method = match n.method {
            Method::GaussHermite => "gauss-hermite",
            Method::MonteCarlo => "monte-carlo",
        };
        let _ = writeln!(
            s,
            "[noise]\nsigma_x = {}\nmethod = {method}\norder = {}\nsamples = {}\nseed = {}\nfluctuate = {}\nT2 = {}\nA1 = {}\nA2 = {}\n",
            n.sigma_x,
            n.order,
            n.samples,
            n.seed,
            fluctuations_str(&n.fluctuate),
            n.t2,
            n.a1,
            n.a2
        );
        let m = &self.markov;
        let _ = writeln!(
            s,
            "[markov]\ngamma_10 = {}\ngamma_20 = {}\ngamma_21 = {}\ndephasing_01 = {}\ndephasing_02 = {}\ndephasing_12 = {}\n",
            m.gamma_10, m.gamma_20, m.gamma_21, m.dephasing_01, m.dephasing_02, m.dephasing_12
        );
        let w = &self.sweep;
        let modes: Vec<String> = w.modes.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(
            s,
            "[sweep]\ndelta_min = {}\ndelta_max = {}\ndelta_p_min = {}\ndelta_p_max = {}\nn_delta = {}\nn_delta_p = {}\nlevels = {}\ncheckpoint_every = {}\nomega0T_list = {}\nmodes = {}\nq_g_min = {}\nq_g_max = {}\nq_g_points = {}\nJ_min = {}\nJ_max = {}\nJ_points = {}\nslope = {}\nlevel = {}\n",
            w.delta_min,
            w.delta_max,
            w.delta_p_min,
            w.delta_p_max,
            w.n_delta,
            w.n_delta_p,
            join_f64(&w.levels),
            w.checkpoint_every,
            join_f64(&w.omega0_t_list),
            modes.join(","),
            w.q_g_min,
            w.q_g_max,
            w.q_g_points,
            w.j_min,
            w.j_max,
            w.j_points,
            w.slope,
            w.level
        );
        let o = &self.output;
        let scale = o.scale_ghz.map_or("none".to_string(), |x| x.to_string());
        let _ = writeln!(s, "[output]\ndirectory = {}\nprecision = {}\nscale_ghz = {scale}\n", o.directory, o.precision);
        let r = &self.run;
        let _ = writeln!(s, "[run]\nworkers = {}\ntol = {}\ngrid_points = {}", r.workers, r.tol, r.grid_points);
        s
    }

    /// Identifies the physics of a run: everything except the output location and
    /// the worker count.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output.directory = String::new();
        c.run.workers = 0;
        let mut h = std::collections::hash_map::DefaultHasher::new();
        c.to_ini().hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

const SECTIONS: [&str; 8] = ["pulses", "detunings", "device", "noise", "markov", "sweep", "output", "run"];
