//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64 as C;

/// Pulse and detuning set in the oracle's own representation.
#[derive(Debug, Clone, Copy)]
pub struct Lambda {
    pub omega0: f64,
    pub width: f64,
    pub tau: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
    pub delta: f64,
    pub delta_p: f64,
}

impl Lambda {
    pub fn reduced(omega0_t: f64, tau_over_t: f64) -> Self {
        Lambda { omega0: omega0_t, width: 1.0, tau: tau_over_t, kappa_p: 1.0, kappa_s: 1.0, delta: 0.0, delta_p: 0.0 }
    }

    pub fn window(&self) -> (f64, f64) {
        let h = self.tau.abs() + 4.0 * self.width;
        (-h, h)
    }

    pub fn hamiltonian(&self, t: f64) -> Matrix3<f64> {
        let wp = self.kappa_p * self.omega0 * (-((t - self.tau) / self.width).powi(2)).exp();
        let ws = self.kappa_s * self.omega0 * (-((t + self.tau) / self.width).powi(2)).exp();
        Matrix3::new(0.0, 0.0, wp / 2.0, 0.0, self.delta, ws / 2.0, wp / 2.0, ws / 2.0, self.delta_p)
    }
}

/// Classical fixed-step fourth-order Runge-Kutta for `i dpsi/dt = H psi`, with
/// `substeps` steps between consecutive output times.
pub fn rk4_populations(sys: &Lambda, psi0: [f64; 3], times: &[f64], substeps: usize) -> Vec<[f64; 3]> {
    let f = |t: f64, y: &Vector3<C>| -> Vector3<C> {
        let h = sys.hamiltonian(t).map(|x| C::new(x, 0.0));
        (h * y) * C::new(0.0, -1.0)
    };
    let mut y = Vector3::new(C::new(psi0[0], 0.0), C::new(psi0[1], 0.0), C::new(psi0[2], 0.0));
    let pops = |y: &Vector3<C>| [y[0].norm_sqr(), y[1].norm_sqr(), y[2].norm_sqr()];
    let mut out = vec![pops(&y)];
    for w in times.windows(2) {
        let h = (w[1] - w[0]) / substeps as f64;
        let mut t = w[0];
        for _ in 0..substeps {
            let k1 = f(t, &y);
            let k2 = f(t + h / 2.0, &(y + k1 * C::new(h / 2.0, 0.0)));
            let k3 = f(t + h / 2.0, &(y + k2 * C::new(h / 2.0, 0.0)));
            let k4 = f(t + h, &(y + k3 * C::new(h, 0.0)));
            y += (k1 + k2 * C::new(2.0, 0.0) + k3 * C::new(2.0, 0.0) + k4) * C::new(h / 6.0, 0.0);
            t += h;
        }
        out.push(pops(&y));
    }
    out
}

/// Roots of the characteristic polynomial of a real symmetric 3x3 matrix,
/// ascending (trigonometric form of the cubic solution).
pub fn symmetric_cubic_roots(a: &Matrix3<f64>) -> [f64; 3] {
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q; 3];
    }
    let b = (a - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e_max = q + 2.0 * p * phi.cos();
    let e_min = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e_mid = 3.0 * q - e_max - e_min;
    [e_min, e_mid, e_max]
}

/// Dense charge-basis diagonalization: energies relative to the ground state and
/// `<i|n|j>` magnitudes for the lowest three levels.
pub fn dense_cpb(josephson: f64, gate_charge: f64, n_max: usize) -> (Vec<f64>, [[f64; 3]; 3]) {
    let charges: Vec<f64> = (-(n_max as i64)..=(n_max as i64)).map(|n| n as f64).collect();
    let dim = charges.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = (gate_charge - charges[i]).powi(2);
        if i + 1 < dim {
            h[(i, i + 1)] = -josephson / 2.0;
            h[(i + 1, i)] = -josephson / 2.0;
        }
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let e0 = eig.eigenvalues[order[0]];
    let energies: Vec<f64> = order.iter().map(|k| eig.eigenvalues[*k] - e0).collect();
    let mut n = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let u = eig.eigenvectors.column(order[i]);
            let v = eig.eigenvectors.column(order[j]);
            n[i][j] = (0..dim).map(|k| charges[k] * u[k] * v[k]).sum::<f64>().abs();
        }
    }
    (energies, n)
}

pub fn stirap_bin() -> &'static str {
    env!("CARGO_BIN_EXE_stirap")
}

pub fn run_cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(stirap_bin()).args(args).current_dir(cwd).output().expect("binary runs")
}
