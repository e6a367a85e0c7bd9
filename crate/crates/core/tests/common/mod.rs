//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Surface coefficients in double precision.
#[derive(Clone, Copy, Debug)]
pub struct Coeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

pub const MARKOV: Coeffs = Coeffs { a: 0.0, b: 0.0, c: 0.0, d: 0.0, e: -3.0 };

pub type P = [Complex64; 3];

fn grad(k: &Coeffs, p: &P) -> P {
    let [x, y, z] = *p;
    [
        2.0 * x + k.e * y * z - k.a,
        2.0 * y + k.e * x * z - k.b,
        2.0 * z + k.e * x * y - k.c,
    ]
}

/// `grad P x e_axis`, written out by hand.
pub fn field(k: &Coeffs, axis: usize, p: &P) -> P {
    let n = grad(k, p);
    let zero = Complex64::new(0.0, 0.0);
    match axis {
        0 => [zero, n[2], -n[1]],
        1 => [-n[2], zero, n[0]],
        _ => [n[1], -n[0], zero],
    }
}

/// Classical RK4 for `p' = V^axis(p)` with `steps` equal steps to time `t`.
pub fn rk4(k: &Coeffs, axis: usize, p0: P, t: f64, steps: usize) -> P {
    let h = t / steps as f64;
    let mut p = p0;
    let add = |p: &P, v: &P, s: f64| -> P { [p[0] + v[0] * s, p[1] + v[1] * s, p[2] + v[2] * s] };
    for _ in 0..steps {
        let k1 = field(k, axis, &p);
        let k2 = field(k, axis, &add(&p, &k1, h / 2.0));
        let k3 = field(k, axis, &add(&p, &k2, h / 2.0));
        let k4 = field(k, axis, &add(&p, &k3, h));
        for i in 0..3 {
            p[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    p
}

/// Ordered Markov triples with `z <= bound` from the discriminant of the equation in `z`.
pub fn brute_force_triples(bound: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut x = 1u64;
    while x * x <= bound {
        let mut y = x;
        // the larger root is at least 3xy/2, and a smaller root >= y forces x = 1, y <= 2
        while 3 * x * y <= 2 * bound + 6 {
            let (xx, yy) = (x as u128, y as u128);
            let disc = 9 * xx * xx * yy * yy - 4 * (xx * xx + yy * yy);
            let s = isqrt(disc);
            if s * s == disc {
                for num in [3 * xx * yy + s, 3 * xx * yy - s] {
                    if num % 2 == 0 {
                        let z = (num / 2) as u64;
                        if z >= y && z <= bound && !out.contains(&(x, y, z)) {
                            out.push((x, y, z));
                        }
                    }
                }
            }
            y += 1;
        }
        x += 1;
    }
    out.sort_by_key(|&(x, y, z)| (z, y, x));
    out
}

fn isqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Ordinary least squares slope of `log(3 m_n)` on `sqrt n`, in plain floats.
pub fn ols_slope(values: &[(f64, f64)]) -> f64 {
    let n = values.len() as f64;
    let sx: f64 = values.iter().map(|v| v.0).sum();
    let sy: f64 = values.iter().map(|v| v.1).sum();
    let sxx: f64 = values.iter().map(|v| v.0 * v.0).sum();
    let sxy: f64 = values.iter().map(|v| v.0 * v.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
