//! Reference computations that share no code with the library solvers.

#![allow(dead_code)]

use num_complex::Complex64;

/// Integrates φ'' = (V(z) − k²) φ backwards from z_max, where φ = e^{ik(z−L)}
/// (t = 1), down to z_min with classical RK4, then splits φ there into
/// incident and reflected plane waves. Returns (r, t) in the e^{ik(z−L)}
/// transmission convention.
pub fn rk4_amplitudes(
    potential: impl Fn(f64) -> f64,
    k: f64,
    z_min: f64,
    z_max: f64,
    length: f64,
    steps: usize,
) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let h = -(z_max - z_min) / steps as f64;
    let mut z = z_max;
    let mut phi = Complex64::from_polar(1.0, k * (z_max - length));
    let mut dphi = i * k * phi;
    let f = |z: f64, phi: Complex64| (potential(z) - k * k) * phi;
    for _ in 0..steps {
        let k1p = dphi;
        let k1d = f(z, phi);
        let k2p = dphi + 0.5 * h * k1d;
        let k2d = f(z + 0.5 * h, phi + 0.5 * h * k1p);
        let k3p = dphi + 0.5 * h * k2d;
        let k3d = f(z + 0.5 * h, phi + 0.5 * h * k2p);
        let k4p = dphi + h * k3d;
        let k4d = f(z + h, phi + h * k3p);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        z += h;
    }
    // φ = A e^{ikz} + B e^{−ikz} at z_min
    let ratio = dphi / (i * k);
    let a = 0.5 * (phi + ratio) * Complex64::from_polar(1.0, -k * z_min);
    let b = 0.5 * (phi - ratio) * Complex64::from_polar(1.0, k * z_min);
    (b / a, 1.0 / a)
}

/// RK4 oracle at `steps` and `2·steps`, Richardson-combined for fourth order.
pub fn rk4_extrapolated(
    potential: impl Fn(f64) -> f64 + Copy,
    k: f64,
    z_min: f64,
    z_max: f64,
    length: f64,
    steps: usize,
) -> (Complex64, Complex64) {
    let (r1, t1) = rk4_amplitudes(potential, k, z_min, z_max, length, steps);
    let (r2, t2) = rk4_amplitudes(potential, k, z_min, z_max, length, 2 * steps);
    ((16.0 * r2 - r1) / 15.0, (16.0 * t2 - t1) / 15.0)
}

/// Mesa channel by RK4 over the flat interior [0, L]; `sign` is +1 for the
/// barrier, −1 for the well.
pub fn mesa_rk4(n: u32, sign: f64, k: f64, length: f64) -> (Complex64, Complex64) {
    let strength = sign * ((n + 1) as f64).sqrt();
    rk4_extrapolated(move |_| strength, k, 0.0, length, length, 1_000_000)
}

/// Mesa channel by plane-wave matching with complex inside wave number q.
pub fn mesa_matching(n: u32, sign: f64, k: f64, length: f64) -> (Complex64, Complex64) {
    let strength = sign * ((n + 1) as f64).sqrt();
    let q = Complex64::new(k * k - strength, 0.0).sqrt();
    let i = Complex64::i();
    // B/A from the z = L interface, A from the z = 0 interface
    let rho = (2.0 * i * q * length).exp() * (q - k) / (q + k);
    let a = 2.0 / ((1.0 + rho) + q / k * (1.0 - rho));
    let b = rho * a;
    let r = a + b - 1.0;
    let t = a * (i * q * length).exp() + b * (-i * q * length).exp();
    (r, t)
}

/// Trapping-state reflection Σ w_n² |r_n|² with untruncated weights
/// w_n² = 2(1−g²)/(1+g²) g^{2(n+1)}, summed until the weights vanish.
pub fn trapping_reflection_series(g: f64, mut reflection: impl FnMut(u32) -> f64) -> f64 {
    let g2 = g * g;
    if g2 == 0.0 {
        return 0.0;
    }
    let pre = 2.0 * (1.0 - g2) / (1.0 + g2) * g2;
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut n = 0;
    while power > 1e-20 {
        sum += power * reflection(n);
        power *= g2;
        n += 1;
    }
    pre * sum
}

pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}
