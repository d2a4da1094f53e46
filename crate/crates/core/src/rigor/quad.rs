//! Rigorous quadrature on [0, 1] with explicit remainder enclosures.

use crate::expr::{EvalError, PathExpr};
use crate::galerkin::QuadMode;
use crate::interval::Interval;
use crate::par;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    Eval(EvalError),
    /// The Simpson remainder enclosure came out wider than a plain interval
    /// Riemann sum would be; the caller should switch modes.
    FourthDerivativeBlowup,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::Eval(e) => write!(f, "{e}"),
            QuadError::FourthDerivativeBlowup => write!(
                f,
                "Simpson remainder wider than the Riemann fallback; switch quadrature modes"
            ),
        }
    }
}

impl std::error::Error for QuadError {}

impl From<EvalError> for QuadError {
    fn from(e: EvalError) -> Self {
        QuadError::Eval(e)
    }
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0)
}

/// Enclosure of the grid point i/n; intersected with [0, 1] so integrands
/// are only ever evaluated inside the domain.
fn grid(i: usize, n: usize) -> Interval {
    Interval::point(i as f64)
        .div(&Interval::point(n as f64))
        .expect("grid count is positive")
        .intersect(&unit())
        .expect("grid point lies in the domain")
}

/// Interval containing the exact integral of `g` over [0, 1].
///
/// Both modes subdivide [0, 1] into `panels` cells. Simpson mode applies
/// the three-point rule per cell (endpoints plus midpoint) on interval
/// nodes and adds the per-cell remainder `-(w^5/2880) * g''''`, with the
/// fourth derivative obtained symbolically and enclosed over each cell.
/// Riemann mode sums cell width times the hull of `g` over each cell; it
/// needs no derivatives and serves as the fallback when the fourth
/// derivative is too wild.
pub fn enclose_integral(
    g: &PathExpr,
    panels: usize,
    mode: QuadMode,
) -> Result<Interval, QuadError> {
    assert!(panels >= 2 && panels.is_multiple_of(2), "panels must be even");
    match mode {
        QuadMode::Riemann => Ok(riemann(g, panels)?),
        QuadMode::Simpson => {
            // 2 * panels + 1 nodes at half-cell spacing
            let halves = 2 * panels;
            let half_step = Interval::point(1.0)
                .div(&Interval::point(halves as f64))
                .expect("positive");

            let vals = par::map_range(halves + 1, |i| {
                g.eval_interval(&grid(i, halves)).map(|v| {
                    let w = if i == 0 || i == halves {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    v.mul(&Interval::point(w))
                })
            });
            let mut terms = Vec::with_capacity(halves + 1);
            for v in vals {
                terms.push(v?);
            }
            let value = par::pairwise_sum_interval(&terms)
                .mul(&half_step)
                .div(&Interval::point(3.0))
                .expect("exact divisor");

            // Per cell of width w the rule's error is -(w^5/2880) g''''(xi);
            // summing the signed per-cell enclosures keeps the true error
            // inside while letting opposite signs cancel.
            let g4 = g.diff_x().diff_x().diff_x().diff_x();
            let cell_vals = par::map_range(panels, |k| {
                let cell = grid(2 * k, halves).hull(&grid(2 * k + 2, halves));
                g4.eval_interval(&cell)
            });
            let mut cell_terms = Vec::with_capacity(panels);
            for v in cell_vals {
                cell_terms.push(v?);
            }
            let coeff = Interval::point(1.0)
                .div(&Interval::point(panels as f64))
                .expect("positive")
                .pow_int(5)
                .div(&Interval::point(2880.0))
                .expect("exact divisor")
                .neg();
            let remainder = coeff.mul(&par::pairwise_sum_interval(&cell_terms));

            let fallback = riemann(g, panels)?;
            if remainder.width() > fallback.width() {
                return Err(QuadError::FourthDerivativeBlowup);
            }
            Ok(value.add(&remainder))
        }
    }
}

fn riemann(g: &PathExpr, panels: usize) -> Result<Interval, EvalError> {
    let h = Interval::point(1.0)
        .div(&Interval::point(panels as f64))
        .expect("panel count is positive");
    let vals = par::map_range(panels, |k| {
        let cell = grid(k, panels).hull(&grid(k + 1, panels));
        g.eval_interval(&cell)
    });
    let mut terms = Vec::with_capacity(panels);
    for v in vals {
        terms.push(v?);
    }
    Ok(h.mul(&par::pairwise_sum_interval(&terms)))
}
