//! The weighted cosine basis of the Neumann Sobolev space on (0, 1).
//!
//! A function with vanishing derivative at both endpoints is represented by
//! its coordinates `b` in the basis `{1, sqrt(2) cos((k-1) pi x) / omega(k)}`
//! with weights `omega(k) = sqrt(1 + ((k-1) pi)^2 + ((k-1) pi)^4)`. In these
//! coordinates the `H^2` norm is the plain Euclidean norm of `b`; the raw
//! cosine amplitude of mode `k` is `b_k / omega(k)`.

use crate::expr::{Expr, PathExpr, Var};
use crate::interval::{const_pi, Interval};

/// Basis weight `omega(k)`, `k >= 1`.
pub fn omega(k: usize) -> f64 {
    assert!(k >= 1);
    let t = (k - 1) as f64 * std::f64::consts::PI;
    (1.0 + t * t + t * t * t * t).sqrt()
}

/// Enclosure of `omega(k)`.
pub fn omega_interval(k: usize) -> Interval {
    assert!(k >= 1);
    let t = const_pi().mul(&Interval::point((k - 1) as f64));
    let s = t.sqr();
    Interval::point(1.0)
        .add(&s)
        .add(&s.sqr())
        .sqrt()
        .expect("omega argument is positive")
}

/// Tail bound factor `(pi m)^2 / omega(m+1)`; strictly increasing in `m`
/// and strictly below 1.
pub fn tail_lambda(m: usize) -> f64 {
    assert!(m >= 1);
    -diag_a(m + 1)
}

/// Enclosure of `tail_lambda(m)`.
pub fn tail_lambda_interval(m: usize) -> Interval {
    assert!(m >= 1);
    let num = const_pi().mul(&Interval::point(m as f64)).sqr();
    num.div(&omega_interval(m + 1)).expect("omega is positive")
}

/// Diagonal symbol of the second-derivative operator in the weighted basis:
/// `a_1 = 0`, `a_k = -((k-1) pi)^2 / omega(k)`.
pub fn diag_a(k: usize) -> f64 {
    assert!(k >= 1);
    if k == 1 {
        return 0.0;
    }
    let t = (k - 1) as f64 * std::f64::consts::PI;
    -(t * t) / omega(k)
}

/// Candidate solution in weighted-basis coordinates; the Euclidean norm of
/// `b` is the `H^2` norm of the represented function.
#[derive(Debug, Clone, PartialEq)]
pub struct CosCoeffs {
    b: Vec<f64>,
}

impl CosCoeffs {
    pub fn new(b: Vec<f64>) -> CosCoeffs {
        assert!(!b.is_empty(), "at least one coefficient");
        assert!(b.iter().all(|x| x.is_finite()));
        CosCoeffs { b }
    }

    pub fn zeros(m: usize) -> CosCoeffs {
        CosCoeffs::new(vec![0.0; m])
    }

    /// Builds coordinates from raw cosine amplitudes, `b_k = amp_k * omega(k)`.
    pub fn from_amplitudes(amps: &[f64]) -> CosCoeffs {
        let b = amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * omega(i + 1))
            .collect();
        CosCoeffs::new(b)
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.b
    }

    /// Raw cosine amplitude of mode `k` (1-based).
    pub fn amplitude(&self, k: usize) -> f64 {
        self.b[k - 1] / omega(k)
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        (1..=self.m()).map(|k| self.amplitude(k)).collect()
    }

    /// `H^2` norm of the represented function (isometry).
    pub fn h2_norm(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Closed-form trigonometric polynomial `W` reconstructed from coordinates,
/// with its first two derivatives as expressions in `x`.
///
/// The derivative series is built term by term, so `W'` is a pure sine
/// series and vanishes at both endpoints by construction.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    w: PathExpr,
    dw: PathExpr,
    ddw: PathExpr,
    /// Per-mode coefficients of `cos((k-1) pi x)` actually stored in the
    /// expressions (the mean for k = 1).
    coeffs: Vec<f64>,
}

impl TrigPoly {
    /// `W(x) = b_1 + sum_k sqrt(2) cos((k-1) pi x) / omega(k) * b_k`.
    ///
    /// The per-mode coefficient is rounded once to a double; the candidate
    /// is, by definition, the function represented exactly by the resulting
    /// expression, and every rigorous bound downstream refers to it.
    pub fn reconstruct(c: &CosCoeffs) -> TrigPoly {
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut coeffs = Vec::with_capacity(c.m());
        let mut w = Expr::constant(c.coeffs()[0]);
        let mut dw = Expr::constant(0.0);
        let mut ddw = Expr::constant(0.0);
        coeffs.push(c.coeffs()[0]);
        for k in 2..=c.m() {
            let g = c.coeffs()[k - 1] / omega(k) * sqrt2;
            coeffs.push(g);
            if g == 0.0 {
                continue;
            }
            let j = (k - 1) as f64;
            let jpx = Expr::mul(
                &Expr::constant(j),
                &Expr::mul(&Expr::pi(), &Expr::var(Var::X)),
            );
            // W term: g cos(j pi x)
            w = Expr::add(&w, &Expr::mul(&Expr::constant(g), &Expr::cos(&jpx)));
            // W' term: -(g j) pi sin(j pi x)
            let gj = Expr::mul(&Expr::constant(g), &Expr::constant(j));
            dw = Expr::sub(
                &dw,
                &Expr::mul(&gj, &Expr::mul(&Expr::pi(), &Expr::sin(&jpx))),
            );
            // W'' term: -(g j^2) pi^2 cos(j pi x)
            let gj2 = Expr::mul(&Expr::constant(g), &Expr::constant(j * j));
            let pi2 = Expr::mul(&Expr::pi(), &Expr::pi());
            ddw = Expr::sub(&ddw, &Expr::mul(&gj2, &Expr::mul(&pi2, &Expr::cos(&jpx))));
        }
        TrigPoly {
            w: PathExpr::new(w).expect("x-only expression"),
            dw: PathExpr::new(dw).expect("x-only expression"),
            ddw: PathExpr::new(ddw).expect("x-only expression"),
            coeffs,
        }
    }

    pub fn w(&self) -> &PathExpr {
        &self.w
    }

    pub fn dw(&self) -> &PathExpr {
        &self.dw
    }

    pub fn ddw(&self) -> &PathExpr {
        &self.ddw
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Certified enclosure of the `H^2` norm of the function the stored
    /// expressions represent (whose coefficients carry one rounding each).
    pub fn h2_norm_enclosure(&self) -> Interval {
        let sqrt2 = Interval::point(2.0).sqrt().expect("positive");
        let mut sum = Interval::point(self.coeffs[0]).sqr();
        for (i, &g) in self.coeffs.iter().enumerate().skip(1) {
            let k = i + 1;
            // b_k of the represented function: g * omega(k) / sqrt(2)
            let b = Interval::point(g)
                .mul(&omega_interval(k))
                .div(&sqrt2)
                .expect("sqrt2 is positive");
            sum = sum.add(&b.sqr());
        }
        sum.clamp_nonnegative().sqrt().expect("sum of squares")
    }
}
