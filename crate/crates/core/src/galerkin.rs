//! Non-rigorous floating-point pipeline: the cosine Galerkin residual, its
//! Jacobian, fixed-panel Simpson quadrature and a damped Newton iteration
//! that produces the candidate coordinates.

use crate::expr::{EvalError, Expr, PathExpr, Var};
use crate::linalg::{self, Mat};
use crate::par;
use crate::series::{diag_a, omega, CosCoeffs, TrigPoly};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMode {
    Simpson,
    Riemann,
}

#[derive(Debug, Clone)]
pub struct NewtonParams {
    /// Initial guess as raw cosine amplitudes; padded with zeros to `m`.
    pub b0_amplitudes: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct RigorParams {
    pub panels: usize,
    pub subdiv: usize,
    pub mode: QuadMode,
}

/// A fully specified problem `u'' = f(x, u, u')` with Neumann conditions.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub f: Expr,
    pub m: usize,
    /// Kantorovich search radius `R` around the candidate.
    pub search_radius: f64,
    pub solver_panels: usize,
    pub newton: NewtonParams,
    pub rigor: RigorParams,
}

pub const DEFAULT_M: usize = 5;
pub const DEFAULT_R: f64 = 1.0;
pub const DEFAULT_SOLVER_PANELS: usize = 1024;
pub const DEFAULT_RIGOR_PANELS: usize = 64;
pub const DEFAULT_SUBDIV: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;

impl ProblemSpec {
    // negated comparisons also reject NaN configuration values
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), String> {
        if self.m < 1 {
            return Err("m must be at least 1".into());
        }
        if !(self.search_radius > 0.0) {
            return Err("R must be positive".into());
        }
        if !(self.newton.tol > 0.0) {
            return Err("newton.tol must be positive".into());
        }
        if self.newton.max_iter < 1 {
            return Err("newton.max_iter must be at least 1".into());
        }
        if self.newton.b0_amplitudes.len() > self.m {
            return Err(format!(
                "newton.b0 has {} entries but m = {}",
                self.newton.b0_amplitudes.len(),
                self.m
            ));
        }
        for panels in [self.solver_panels, self.rigor.panels] {
            if panels < 2 || panels % 2 != 0 {
                return Err(format!("panel count {panels} must be even and at least 2"));
            }
        }
        if self.rigor.subdiv < 1 {
            return Err("rigor.subdiv must be at least 1".into());
        }
        Ok(())
    }

    pub fn initial_coeffs(&self) -> CosCoeffs {
        let mut amps = self.newton.b0_amplitudes.clone();
        amps.resize(self.m, 0.0);
        CosCoeffs::from_amplitudes(&amps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    SingularJacobian,
    NoConvergence { iterations: usize, residual: f64 },
    Eval(EvalError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::SingularJacobian => write!(f, "Jacobian is numerically singular"),
            SolveError::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "Newton did not converge after {iterations} iterations (residual {residual:.3e})"
            ),
            SolveError::Eval(e) => write!(f, "integrand evaluation failed: {e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<EvalError> for SolveError {
    fn from(e: EvalError) -> Self {
        SolveError::Eval(e)
    }
}

/// Composite Simpson value of `g` on [0, 1]: the three-point rule on each
/// of `panels` cells (endpoints plus midpoint, 2 panels + 1 nodes). Node
/// values may be computed in parallel; the weighted terms are combined by
/// pairwise summation in index order, so the value is reproducible.
pub fn simpson_fixed(g: &PathExpr, panels: usize) -> Result<f64, EvalError> {
    assert!(panels >= 2 && panels.is_multiple_of(2), "panels must be even");
    let halves = 2 * panels;
    let n = halves as f64;
    let vals = par::map_range(halves + 1, |i| {
        let w = if i == 0 || i == halves {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        g.eval(i as f64 / n).map(|v| w * v)
    });
    let mut terms = Vec::with_capacity(halves + 1);
    for v in vals {
        terms.push(v?);
    }
    Ok(par::pairwise_sum(&terms) * (1.0 / n) / 3.0)
}

/// Test function of mode `i` (1-based) without its normalization:
/// `cos((i-1) pi x)`; the `sqrt(2)` factors are applied outside the
/// integrals so expressions never need an exact square root.
pub(crate) fn cos_mode(i: usize) -> Expr {
    let j = (i - 1) as f64;
    Expr::cos(&Expr::mul(
        &Expr::constant(j),
        &Expr::mul(&Expr::pi(), &Expr::var(Var::X)),
    ))
}

pub(crate) fn sin_mode(i: usize) -> Expr {
    let j = (i - 1) as f64;
    Expr::sin(&Expr::mul(
        &Expr::constant(j),
        &Expr::mul(&Expr::pi(), &Expr::var(Var::X)),
    ))
}

fn norm_factor(i: usize) -> f64 {
    if i == 1 {
        1.0
    } else {
        std::f64::consts::SQRT_2
    }
}

/// Residual expression `W''(x) - f(x, W(x), W'(x))` of the reconstructed
/// candidate.
pub fn residual_path(f: &Expr, tp: &TrigPoly) -> PathExpr {
    let f_on_path = f.substitute_path(tp.w().expr(), tp.dw().expr());
    PathExpr::new(Expr::sub(tp.ddw().expr(), f_on_path.expr())).expect("x-only expression")
}

/// Cosine Galerkin integrals of the residual, one per mode.
pub fn galerkin_residual(p: &ProblemSpec, b: &CosCoeffs) -> Result<Vec<f64>, SolveError> {
    assert_eq!(b.m(), p.m);
    let tp = TrigPoly::reconstruct(b);
    let res = residual_path(&p.f, &tp);
    let mut out = Vec::with_capacity(p.m);
    for i in 1..=p.m {
        let integrand =
            PathExpr::new(Expr::mul(res.expr(), &cos_mode(i))).expect("x-only expression");
        let val = simpson_fixed(&integrand, p.solver_panels)?;
        out.push(norm_factor(i) * val);
    }
    Ok(out)
}

/// Jacobian of the Galerkin system. The second-derivative part of the basis
/// integrates exactly against the test functions and contributes the
/// diagonal `-((j-1) pi)^2 / omega(j)`; only the `f_u` and `f_u'` couplings
/// are computed by quadrature.
pub fn jacobian(p: &ProblemSpec, b: &CosCoeffs) -> Result<Mat, SolveError> {
    assert_eq!(b.m(), p.m);
    let tp = TrigPoly::reconstruct(b);
    let fu = p.f.diff(Var::U).substitute_path(tp.w().expr(), tp.dw().expr());
    let fup = p.f.diff(Var::V).substitute_path(tp.w().expr(), tp.dw().expr());
    let fu_zero = fu.expr().is_const(0.0);
    let fup_zero = fup.expr().is_const(0.0);

    let m = p.m;
    let entries = par::map_range(m * m, |idx| -> Result<f64, EvalError> {
        let i = idx / m + 1;
        let j = idx % m + 1;
        let jj = (j - 1) as f64;
        let fac = norm_factor(i) * norm_factor(j) / omega(j);
        let mut a = if i == j { diag_a(j) } else { 0.0 };
        if !fu_zero {
            let integrand = PathExpr::new(Expr::mul(
                fu.expr(),
                &Expr::mul(&cos_mode(j), &cos_mode(i)),
            ))
            .expect("x-only expression");
            a -= fac * simpson_fixed(&integrand, p.solver_panels)?;
        }
        if j > 1 && !fup_zero {
            let integrand = PathExpr::new(Expr::mul(
                fup.expr(),
                &Expr::mul(&sin_mode(j), &cos_mode(i)),
            ))
            .expect("x-only expression");
            a += fac * jj * std::f64::consts::PI * simpson_fixed(&integrand, p.solver_panels)?;
        }
        Ok(a)
    });

    let mut mat = Mat::zeros(m);
    for (idx, e) in entries.into_iter().enumerate() {
        mat.set(idx / m, idx % m, e?);
    }
    Ok(mat)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Damped Newton iteration on the Galerkin system, recording the residual
/// infinity norm after each accepted step.
pub fn newton_trace(p: &ProblemSpec) -> Result<(CosCoeffs, Vec<f64>), SolveError> {
    let mut b = p.initial_coeffs();
    let mut res = galerkin_residual(p, &b)?;
    let mut rn = inf_norm(&res);
    let mut history = vec![rn];
    for _ in 0..p.newton.max_iter {
        if rn <= p.newton.tol {
            return Ok((b, history));
        }
        let jac = jacobian(p, &b)?;
        // degenerate-but-consistent directions (a right-hand side with no
        // dependence on the mean mode, say) are left uncorrected
        let delta = linalg::solve_consistent(&jac, &res).ok_or(SolveError::SingularJacobian)?;
        // plain Newton step, halved up to 10 times while the residual fails
        // to decrease; the best candidate seen is kept either way
        let mut best: Option<(CosCoeffs, Vec<f64>, f64)> = None;
        let mut t = 1.0;
        for _ in 0..=10 {
            let cand = CosCoeffs::new(
                b.coeffs()
                    .iter()
                    .zip(&delta)
                    .map(|(bi, di)| bi - t * di)
                    .collect(),
            );
            let cres = galerkin_residual(p, &cand)?;
            let crn = inf_norm(&cres);
            let better_than_best = best.as_ref().is_none_or(|(_, _, bn)| crn < *bn);
            if better_than_best {
                best = Some((cand, cres, crn));
            }
            if crn < rn {
                break;
            }
            t *= 0.5;
        }
        let (nb, nres, nrn) = best.expect("at least one candidate evaluated");
        b = nb;
        res = nres;
        rn = nrn;
        history.push(rn);
    }
    if rn <= p.newton.tol {
        return Ok((b, history));
    }
    Err(SolveError::NoConvergence {
        iterations: p.newton.max_iter,
        residual: rn,
    })
}

/// Newton iteration returning only the converged coordinates.
pub fn newton_solve(p: &ProblemSpec) -> Result<CosCoeffs, SolveError> {
    newton_trace(p).map(|(b, _)| b)
}
