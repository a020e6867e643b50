//! Test-only oracles. Nothing here calls into the amplitude formulas of the
//! crate under test.
#![allow(dead_code)]

use num_complex::Complex64;

/// A piecewise-constant 1D potential given as region wavenumbers separated
/// by interfaces. `wavenumbers.len() == interfaces.len() + 1`.
pub struct Layered {
    pub wavenumbers: Vec<Complex64>,
    pub interfaces: Vec<f64>,
}

type Mat2 = [[Complex64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn cis(k: Complex64, x: f64) -> Complex64 {
    // e^{i k x} for complex k
    (Complex64::i() * (k * x)).exp()
}

/// Maps right-side plane-wave coefficients (A_R, B_R) onto the left side of
/// an interface at `x` from continuity of ψ and ψ'.
fn interface(k_left: Complex64, k_right: Complex64, x: f64) -> Mat2 {
    let plus = (k_left + k_right) / (k_left * 2.0);
    let minus = (k_left - k_right) / (k_left * 2.0);
    let el_m = cis(-k_left, x);
    let el_p = cis(k_left, x);
    let er_p = cis(k_right, x);
    let er_m = cis(-k_right, x);
    [
        [el_m * plus * er_p, el_m * minus * er_m],
        [el_p * minus * er_p, el_p * plus * er_m],
    ]
}

impl Layered {
    pub fn rectangular(k: f64, k_inside: Complex64, width: f64) -> Self {
        let k = Complex64::new(k, 0.0);
        Self {
            wavenumbers: vec![k, k_inside, k],
            interfaces: vec![0.0, width],
        }
    }

    /// (t, r) for a unit wave incident from the left. Outer media must match.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let mut m: Mat2 = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for (j, &x) in self.interfaces.iter().enumerate() {
            let step = interface(self.wavenumbers[j], self.wavenumbers[j + 1], x);
            m = mul(&m, &step);
        }
        let t = m[0][0].inv();
        let r = m[1][0] * t;
        (t, r)
    }
}

/// Relative difference between two complex numbers.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Solves `cos²(x) = p_high` (branch `branch`) and then checks the smaller
/// anchor `cos²(x·ratio) = p_low`, returning the `x` that fits both best.
/// `x = φ/2` for the larger-phase anchor.
pub fn joint_half_phase_fit(p_high: f64, ratio: f64, p_low: f64, max_branch: usize) -> f64 {
    let alpha = p_high.sqrt().acos();
    let mut candidates = Vec::new();
    for n in 0..=max_branch {
        let base = n as f64 * std::f64::consts::PI;
        for c in [base - alpha, base + alpha] {
            if c > 0.0 {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates
        .into_iter()
        .map(|x| (x, ((x * ratio).cos().powi(2) - p_low).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
        .0
}
