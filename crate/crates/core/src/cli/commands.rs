use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    dephasing_scan, efficiency_diagram, linspace, merit_map, two_photon_linewidth, Checkpoint, CpbStirap,
    DephasingSetup, SweepOptions,
};
use crate::cpb::{cpb_spectrum, CpbModel};
use crate::dynamics::{propagate, TimeGrid};
use crate::error::{Error, Result};
use crate::model3::{DetuningParams, PulseParams, StateVector, ThreeLevelDrive};
use crate::noise::{spa_average, NoiseResponse};
use crate::output::{format_sig, write_csv, write_text};

use super::config::RunConfig;

pub const CONFIG_ECHO: &str = "config.resolved.cfg";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const EFFICIENCY_MAP_CSV: &str = "efficiency_map.csv";
pub const CONTOURS_CSV: &str = "contours.csv";
pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const MERIT_MAP_CSV: &str = "merit_map.csv";
pub const DEPHASING_CSV: &str = "dephasing_scan.csv";
pub const LINEWIDTH_CSV: &str = "linewidth.csv";

/// Output directory with the resolved configuration echoed into it.
pub struct RunContext {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl RunContext {
    pub fn prepare(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let out = PathBuf::from(&config.output.directory);
        fs::create_dir_all(&out)?;
        write_text(out.join(CONFIG_ECHO), &config.to_ini())?;
        Ok(RunContext { config, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn f(&self, v: f64) -> String {
        format_sig(v, self.config.output.precision)
    }

    fn sweep_options(&self, name: &str) -> SweepOptions {
        let every = self.config.sweep.checkpoint_every;
        SweepOptions {
            workers: self.config.workers(),
            checkpoint: (every > 0).then(|| Checkpoint {
                path: self.path(&format!("{name}.partial")),
                every,
                fingerprint: self.config.fingerprint(),
            }),
        }
    }

    fn pulses(&self) -> Result<PulseParams> {
        let p = &self.config.pulses;
        PulseParams::reduced(p.omega0_t, p.tau_over_t)?.with_kappas(p.kappa_p, p.kappa_s)
    }

    fn device(&self) -> CpbModel {
        let d = &self.config.device;
        CpbModel::new(d.josephson, d.gate_charge).with_n_max(d.n_max)
    }
}

fn finish_checkpoint(opts: &SweepOptions) -> Result<()> {
    if let Some(cp) = &opts.checkpoint {
        if Path::new(&cp.path).exists() {
            fs::remove_file(&cp.path)?;
        }
    }
    Ok(())
}

/// Population histories. With `sigma_x > 0` the populations are averaged over
/// static gate-charge noise of the configured device.
pub fn simulate(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    let pulses = ctx.pulses()?;
    let det = DetuningParams::new(c.detunings.delta * pulses.omega0, c.detunings.delta_p * pulses.omega0);
    let d = ThreeLevelDrive::new(pulses, det);
    let (t0, t1) = d.window();
    let grid = TimeGrid::uniform(t0, t1, c.run.grid_points)?;
    let psi0 = StateVector::basis(0);

    let (times, pops, traces) = if c.noise.sigma_x > 0.0 {
        let device = CpbStirap { omega_r: c.device.omega_r, ..CpbStirap::new(ctx.device(), c.pulses.omega0_t, c.pulses.tau_over_t) };
        let response = NoiseResponse::from_device(&device.model, c.pulses.omega0_t / device.omega0()?)?;
        let avg = spa_average(&d, &response, &c.spa_spec(), &c.markov, &psi0, &grid, c.run.tol)?;
        (avg.times, avg.populations, None)
    } else {
        let traj = propagate(&d, &c.markov, &psi0, &grid, c.run.tol)?;
        let traces = (!c.markov.is_zero()).then(|| traj.traces());
        (traj.times, traj.populations, traces)
    };

    let mut header = vec!["t", "P0", "P1", "P2"];
    if traces.is_some() {
        header.push("trace");
    }
    let rows = times.iter().zip(&pops).enumerate().map(|(k, (t, p))| {
        let mut r = vec![ctx.f(*t), ctx.f(p[0]), ctx.f(p[1]), ctx.f(p[2])];
        if let Some(tr) = &traces {
            r.push(ctx.f(tr[k]));
        }
        r
    });
    write_csv(ctx.path(TRAJECTORY_CSV), &header, rows)?;

    let last = pops.last().copied().unwrap_or([f64::NAN; 3]);
    let max_p2 = pops.iter().map(|p| p[2]).fold(0.0, f64::max);
    let mut line = format!(
        "efficiency = {}  P0 = {}  P2 = {}  max P2 = {}",
        ctx.f(last[1]),
        ctx.f(last[0]),
        ctx.f(last[2]),
        ctx.f(max_p2)
    );
    if let Some(scale) = c.output.scale_ghz {
        line.push_str(&format!("  (omega0 = {} GHz)", format_sig(c.pulses.omega0_t * scale, 6)));
    }
    Ok(line)
}

pub fn diagram(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    let pulses = ctx.pulses()?;
    let opts = ctx.sweep_options(EFFICIENCY_MAP_CSV);
    let map = efficiency_diagram(&pulses, &c.grid(), &c.sweep.levels, c.run.tol, &opts)?;

    let nx = map.delta_axis.len();
    let rows = map.values.iter().enumerate().map(|(k, v)| {
        vec![ctx.f(map.delta_axis[k % nx]), ctx.f(map.delta_p_axis[k / nx]), ctx.f(*v)]
    });
    write_csv(ctx.path(EFFICIENCY_MAP_CSV), &["delta", "delta_p", "efficiency"], rows)?;

    let mut rows = Vec::new();
    for (level, lines) in &map.contours {
        for (ci, line) in lines.iter().enumerate() {
            for (pi, (x, y)) in line.points.iter().enumerate() {
                rows.push(vec![
                    ctx.f(*level),
                    ci.to_string(),
                    (line.closed as u8).to_string(),
                    pi.to_string(),
                    ctx.f(*x),
                    ctx.f(*y),
                ]);
            }
        }
    }
    write_csv(ctx.path(CONTOURS_CSV), &["level", "contour", "closed", "point", "delta", "delta_p"], rows)?;
    finish_checkpoint(&opts)?;

    let n_lines: usize = map.contours.iter().map(|(_, l)| l.len()).sum();
    Ok(format!("{} cells, {} failed, {} contour lines", map.values.len(), map.failures.len(), n_lines))
}

pub fn cpb(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    let base = ctx.device();
    let axis = linspace(c.sweep.q_g_min, c.sweep.q_g_max, c.sweep.q_g_points.max(1));
    let mut rows = Vec::with_capacity(axis.len());
    for qg in &axis {
        let s = cpb_spectrum(&base.at_gate_charge(*qg), 3)?;
        rows.push(
            [qg, &base.josephson, &s.energies[1], &s.energies[2], &s.n(0, 1), &s.n(0, 2), &s.n(1, 2), &s.a[1], &s.a[2], &s.b[1], &s.b[2]]
                .iter()
                .map(|v| ctx.f(**v))
                .collect::<Vec<_>>(),
        );
    }
    write_csv(ctx.path(SPECTRUM_CSV), &["q_g", "J", "E1", "E2", "n01", "n02", "n12", "A1", "A2", "B1", "B2"], rows)?;
    Ok(format!("{} bias points at J = {}", axis.len(), base.josephson))
}

pub fn fom(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    if c.noise.sigma_x <= 0.0 {
        return Err(Error::Config("the figure of merit needs sigma_x > 0".into()));
    }
    let j_axis = linspace(c.sweep.j_min, c.sweep.j_max, c.sweep.j_points);
    let qg_axis = linspace(c.sweep.q_g_min, c.sweep.q_g_max, c.sweep.q_g_points);
    let opts = ctx.sweep_options(MERIT_MAP_CSV);
    let m = merit_map(&j_axis, &qg_axis, c.noise.sigma_x, c.device.n_max, &opts)?;
    let nq = qg_axis.len();
    let rows = (0..m.merit.len()).map(|k| {
        vec![
            ctx.f(j_axis[k / nq]),
            ctx.f(qg_axis[k % nq]),
            ctx.f(m.n02[k]),
            ctx.f(m.a1[k]),
            ctx.f(m.b1[k]),
            ctx.f(m.sigma_delta[k]),
            ctx.f(m.merit[k]),
        ]
    });
    write_csv(ctx.path(MERIT_MAP_CSV), &["J", "q_g", "n02", "A1", "B1", "sigma_delta", "merit"], rows)?;
    finish_checkpoint(&opts)?;
    let best = m.merit.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("{} cells, {} failed, max merit = {}", m.merit.len(), m.failures.len(), ctx.f(best)))
}

pub fn dephasing(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    let setup = DephasingSetup {
        tau_over_t: c.pulses.tau_over_t,
        kappa_p: c.pulses.kappa_p,
        kappa_s: c.pulses.kappa_s,
        t2: c.noise.t2,
        a1: c.noise.a1,
        a2: c.noise.a2,
        order: c.noise.order,
    };
    let opts = SweepOptions { workers: c.workers(), checkpoint: None };
    let rows = dephasing_scan(&c.sweep.omega0_t_list, &setup, &c.sweep.modes, c.run.tol, &opts)?;
    let out = rows.iter().map(|r| {
        vec![ctx.f(r.omega0_t), r.mode.to_string(), ctx.f(r.populations[0]), ctx.f(r.populations[1]), ctx.f(r.populations[2])]
    });
    write_csv(ctx.path(DEPHASING_CSV), &["omega0T", "mode", "P0", "P1", "P2"], out)?;
    Ok(format!("{} rows", rows.len()))
}

pub fn linewidth(ctx: &RunContext) -> Result<String> {
    let c = &ctx.config;
    let pulses = ctx.pulses()?;
    let half = two_photon_linewidth(&pulses, c.sweep.slope, c.sweep.level, c.run.tol)? / pulses.omega0;
    let row = [c.sweep.slope, c.sweep.level, c.pulses.kappa_p, c.pulses.kappa_s, c.pulses.omega0_t, half];
    write_csv(
        ctx.path(LINEWIDTH_CSV),
        &["slope", "level", "kappa_p", "kappa_s", "omega0T", "delta_half"],
        [row.iter().map(|v| ctx.f(*v)).collect::<Vec<_>>()],
    )?;
    Ok(format!("delta_half = {} omega0", ctx.f(half)))
}
