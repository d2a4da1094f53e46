#![allow(dead_code)] // each test target uses its own subset

//! Shared helpers for the integration suites: a deterministic RNG and
//! dense linear-algebra oracles kept independent of the verified paths
//! they are used to check.

use bvp_certify::expr::{Expr, Var};
use bvp_certify::linalg::{solve, Mat};

/// xorshift64*; deterministic across platforms.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.unit() * (hi - lo)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix A^T A.
fn gram(a: &Mat) -> Mat {
    let n = a.n();
    let mut g = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a.get(k, i) * a.get(k, j);
            }
            g.set(i, j, s);
        }
    }
    g
}

/// Smallest singular value by inverse power iteration on the Gram matrix.
pub fn sigma_min_oracle(a: &Mat) -> Option<f64> {
    let g = gram(a);
    let n = a.n();
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let ny = norm2(&y);
    for v in &mut y {
        *v /= ny;
    }
    for _ in 0..500 {
        let z = solve(&g, &y)?;
        let nz = norm2(&z);
        if !nz.is_finite() || nz == 0.0 {
            return None;
        }
        y = z.iter().map(|v| v / nz).collect();
    }
    // Rayleigh quotient of G^-1 at the converged unit vector: 1/sigma_min^2
    let z = solve(&g, &y)?;
    let rho = dot(&y, &z);
    if rho <= 0.0 {
        return None;
    }
    Some((1.0 / rho).sqrt())
}

/// Random expression over the full grammar, depth-bounded, with division
/// restricted to constants bounded away from zero and exponential arguments
/// damped so values stay within a testable range.
pub fn random_expr(rng: &mut Rng, depth: usize) -> Expr {
    if depth == 0 {
        return match rng.below(5) {
            0 => Expr::var(Var::X),
            1 => Expr::var(Var::U),
            2 => Expr::var(Var::V),
            3 => Expr::pi(),
            _ => Expr::constant(rng.range(-2.0, 2.0)),
        };
    }
    match rng.below(9) {
        0 => Expr::add(&random_expr(rng, depth - 1), &random_expr(rng, depth - 1)),
        1 => Expr::sub(&random_expr(rng, depth - 1), &random_expr(rng, depth - 1)),
        2 => Expr::mul(&random_expr(rng, depth - 1), &random_expr(rng, depth - 1)),
        3 => Expr::neg(&random_expr(rng, depth - 1)),
        4 => Expr::sin(&random_expr(rng, depth - 1)),
        5 => Expr::cos(&random_expr(rng, depth - 1)),
        6 => Expr::exp(&Expr::mul(
            &Expr::constant(0.3),
            &random_expr(rng, depth - 1),
        )),
        7 => {
            let mag = rng.range(0.5, 2.5);
            let sign = if rng.below(2) == 0 { 1.0 } else { -1.0 };
            Expr::div(&random_expr(rng, depth - 1), &Expr::constant(sign * mag))
        }
        _ => Expr::pow_int(&random_expr(rng, depth - 1), 2 + rng.below(2) as u32),
    }
}

/// Largest singular value by power iteration on the Gram matrix.
pub fn sigma_max_oracle(a: &Mat) -> f64 {
    let g = gram(a);
    let n = a.n();
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 2.0)).collect();
    let mut lambda = 0.0f64;
    for _ in 0..500 {
        let z = g.mat_vec(&y);
        let nz = norm2(&z);
        if nz == 0.0 {
            return 0.0;
        }
        lambda = nz / norm2(&y);
        y = z.iter().map(|v| v / nz).collect();
    }
    lambda.sqrt()
}
