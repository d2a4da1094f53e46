//! Certified computations: the residual norm bound, the verified lower
//! bound on the bijectivity modulus of the linearization (finite block
//! plus diagonal tail), the Lipschitz constant of the derivative, and the
//! Kantorovich existence certificate assembled from them.

mod ivmat;
mod quad;

pub use ivmat::{nu0_bound, IvMat};
pub use quad::{enclose_integral, QuadError};

use crate::expr::{Expr, PathExpr, Var};
use crate::galerkin::{cos_mode, sin_mode, QuadMode, ProblemSpec};
use crate::interval::{const_c1, const_pi, Interval};
use crate::par;
use crate::series::{omega_interval, tail_lambda_interval, CosCoeffs, TrigPoly};
use std::fmt;

/// The certified scalars feeding the Kantorovich test. Every field is a
/// directed bound: `eta`, `n`, `k`, `r` round up, `nu0`, `l`, `nu` round
/// down.
#[derive(Debug, Clone, PartialEq)]
pub struct RigorBounds {
    /// Upper bound on the L2 norm of the residual of the candidate.
    pub eta: f64,
    /// Upper bound on the four-term derivative-sup sum along the candidate.
    pub n: f64,
    /// Lipschitz constant of the derivative on the ball of radius `r`.
    pub k: f64,
    /// Lower bound on the bijectivity modulus of the finite block.
    pub nu0: f64,
    /// `min(nu0, (pi m)^2 / omega(m+1))`.
    pub l: f64,
    /// `l - n/(pi m)`, clamped at zero.
    pub nu: f64,
    /// Radius of the ball on which `k` is valid; covers the search ball.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    NuNonpositive,
    DiscriminantNegative,
    TStarExceedsR,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::NuNonpositive => write!(f, "NuNonpositive"),
            FailReason::DiscriminantNegative => write!(f, "DiscriminantNegative"),
            FailReason::TStarExceedsR => write!(f, "TStarExceedsR"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    Verified,
    Failed(FailReason),
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertStatus::Verified => write!(f, "Verified"),
            CertStatus::Failed(r) => write!(f, "Failed(kantorovich: {r})"),
        }
    }
}

/// Outcome of the Kantorovich test. On failure the radii are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub status: CertStatus,
    /// Upper bound on the smaller root of `eta - nu t + (K/2) t^2`.
    pub t_star: f64,
    /// Lower bound on the larger root (capped at `R` when `K = 0`).
    pub t_dstar: f64,
    /// H2 distance from the candidate to the certified zero.
    pub radius_h2: f64,
    /// C1 distance, `c1 * radius_h2`.
    pub radius_c1: f64,
    /// Radius of the uniqueness ball, `min(t_dstar, R)`.
    pub uniqueness_radius: f64,
}

impl Certificate {
    fn failed(reason: FailReason) -> Certificate {
        Certificate {
            status: CertStatus::Failed(reason),
            t_star: 0.0,
            t_dstar: 0.0,
            radius_h2: 0.0,
            radius_c1: 0.0,
            uniqueness_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Eta,
    Jacobian,
    Nu0,
    NBound,
    KBound,
    Kantorovich,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Eta => write!(f, "eta"),
            Stage::Jacobian => write!(f, "jacobian"),
            Stage::Nu0 => write!(f, "nu0"),
            Stage::NBound => write!(f, "n-bound"),
            Stage::KBound => write!(f, "k-bound"),
            Stage::Kantorovich => write!(f, "kantorovich"),
        }
    }
}

/// A rigor-stage failure, tagged with the stage that raised it.
#[derive(Debug, Clone, PartialEq)]
pub struct RigorError {
    pub stage: Stage,
    pub error: QuadError,
}

impl fmt::Display for RigorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rigor stage {}: {}", self.stage, self.error)
    }
}

impl std::error::Error for RigorError {}

fn at_stage(stage: Stage) -> impl Fn(QuadError) -> RigorError {
    move |error| RigorError { stage, error }
}

/// Result of a full certification run.
#[derive(Debug, Clone)]
pub struct CertifyOutcome {
    pub bounds: RigorBounds,
    pub certificate: Certificate,
    /// Stages whose Simpson quadrature fell back to Riemann mode.
    pub quad_fallback: Vec<&'static str>,
}

/// Integrates with the configured mode; in Simpson mode a fourth-derivative
/// blowup automatically falls back to Riemann and reports it.
fn run_quad(
    g: &PathExpr,
    panels: usize,
    mode: QuadMode,
) -> Result<(Interval, bool), QuadError> {
    match mode {
        QuadMode::Riemann => Ok((enclose_integral(g, panels, QuadMode::Riemann)?, false)),
        QuadMode::Simpson => match enclose_integral(g, panels, QuadMode::Simpson) {
            Ok(v) => Ok((v, false)),
            Err(QuadError::FourthDerivativeBlowup) => {
                Ok((enclose_integral(g, panels, QuadMode::Riemann)?, true))
            }
            Err(e) => Err(e),
        },
    }
}

fn sqrt2_interval() -> Interval {
    Interval::point(2.0).sqrt().expect("positive")
}

fn mode_factor(i: usize) -> Interval {
    if i == 1 {
        Interval::point(1.0)
    } else {
        sqrt2_interval()
    }
}

fn eta_impl(p: &ProblemSpec, tp: &TrigPoly) -> Result<(f64, bool), QuadError> {
    let res = crate::galerkin::residual_path(&p.f, tp);
    let squared = PathExpr::new(Expr::pow_int(res.expr(), 2)).expect("x-only expression");
    let (iv, fell_back) = run_quad(&squared, p.rigor.panels, p.rigor.mode)?;
    // the true integral is nonnegative; clamp before the square root
    let eta = iv.clamp_nonnegative().sqrt().expect("nonnegative").hi();
    Ok((eta, fell_back))
}

/// Upper bound on the L2 norm of the residual of the reconstructed
/// candidate: the square root of an enclosure of the integral of the
/// squared residual.
pub fn eta_bound(p: &ProblemSpec, b: &CosCoeffs) -> Result<f64, RigorError> {
    let tp = TrigPoly::reconstruct(b);
    eta_impl(p, &tp).map(|(v, _)| v).map_err(at_stage(Stage::Eta))
}

fn interval_jacobian_impl(
    p: &ProblemSpec,
    tp: &TrigPoly,
) -> Result<(IvMat, bool), QuadError> {
    let fu = p.f.diff(Var::U).substitute_path(tp.w().expr(), tp.dw().expr());
    let fup = p.f.diff(Var::V).substitute_path(tp.w().expr(), tp.dw().expr());
    let fu_zero = fu.expr().is_const(0.0);
    let fup_zero = fup.expr().is_const(0.0);
    let m = p.m;
    let pi = const_pi();

    let entries = par::map_range(m * m, |idx| -> Result<(Interval, bool), QuadError> {
        let i = idx / m + 1;
        let j = idx % m + 1;
        let jj = Interval::point((j - 1) as f64);
        let fac = mode_factor(i)
            .mul(&mode_factor(j))
            .div(&omega_interval(j))
            .expect("omega is positive");
        let mut entry = if i == j && j > 1 {
            pi.mul(&jj).sqr().neg().div(&omega_interval(j)).expect("positive")
        } else {
            Interval::point(0.0)
        };
        let mut fell_back = false;
        if !fu_zero {
            let integrand = PathExpr::new(Expr::mul(
                fu.expr(),
                &Expr::mul(&cos_mode(j), &cos_mode(i)),
            ))
            .expect("x-only expression");
            let (q, fb) = run_quad(&integrand, p.rigor.panels, p.rigor.mode)?;
            fell_back |= fb;
            entry = entry.sub(&fac.mul(&q));
        }
        if j > 1 && !fup_zero {
            let integrand = PathExpr::new(Expr::mul(
                fup.expr(),
                &Expr::mul(&sin_mode(j), &cos_mode(i)),
            ))
            .expect("x-only expression");
            let (q, fb) = run_quad(&integrand, p.rigor.panels, p.rigor.mode)?;
            fell_back |= fb;
            entry = entry.add(&fac.mul(&jj).mul(&pi).mul(&q));
        }
        Ok((entry, fell_back))
    });

    let mut mat = IvMat::zeros(m);
    let mut fell_back = false;
    for (idx, e) in entries.into_iter().enumerate() {
        let (iv, fb) = e?;
        fell_back |= fb;
        mat.set(idx / m, idx % m, iv);
    }
    Ok((mat, fell_back))
}

/// Entrywise enclosure of the Galerkin Jacobian at the candidate.
pub fn interval_jacobian(p: &ProblemSpec, b: &CosCoeffs) -> Result<IvMat, RigorError> {
    let tp = TrigPoly::reconstruct(b);
    interval_jacobian_impl(p, &tp)
        .map(|(m, _)| m)
        .map_err(at_stage(Stage::Jacobian))
}

/// A whole-domain cell decomposition: `count` subintervals of [0, 1].
fn x_cell(c: usize, count: usize) -> Interval {
    let lo = Interval::point(c as f64)
        .div(&Interval::point(count as f64))
        .expect("positive count");
    let hi = Interval::point((c + 1) as f64)
        .div(&Interval::point(count as f64))
        .expect("positive count");
    lo.hull(&hi)
        .intersect(&Interval::new(0.0, 1.0))
        .expect("cell lies in the domain")
}

/// Sup bounds of |g| and sqrt(g^2 + g'^2) over [0, 1] by subdivision.
fn sup_norms(g: &PathExpr, subdiv: usize) -> Result<(f64, f64), QuadError> {
    let cells = if g.expr().uses(Var::X) { subdiv } else { 1 };
    let dg = g.diff_x();
    let per_cell = par::map_range(cells, |c| -> Result<(f64, f64), QuadError> {
        let x = x_cell(c, cells);
        let gv = g.eval_interval(&x)?;
        let dgv = dg.eval_interval(&x)?;
        let c0 = gv.abs().hi();
        let c1 = gv.sqr().add(&dgv.sqr()).clamp_nonnegative().sqrt().expect("nonnegative").hi();
        Ok((c0, c1))
    });
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for v in per_cell {
        let (a, b) = v?;
        c0 = c0.max(a);
        c1 = c1.max(b);
    }
    Ok((c0, c1))
}

fn n_impl(p: &ProblemSpec, tp: &TrigPoly, subdiv: usize) -> Result<f64, QuadError> {
    let fu = p.f.diff(Var::U).substitute_path(tp.w().expr(), tp.dw().expr());
    let fup = p.f.diff(Var::V).substitute_path(tp.w().expr(), tp.dw().expr());
    let (fu_c0, fu_c1) = sup_norms(&fu, subdiv)?;
    let (fup_c0, fup_c1) = sup_norms(&fup, subdiv)?;
    let total = Interval::point(fu_c0)
        .add(&Interval::point(fu_c1))
        .add(&Interval::point(fup_c0))
        .add(&Interval::point(fup_c1));
    Ok(total.hi())
}

/// Upper bound on `||f_u(z)||_C0 + ||f_u(z)||_C1 + ||f_u'(z)||_C0 +
/// ||f_u'(z)||_C1` along the candidate path `z(x) = (x, W(x), W'(x))`.
pub fn n_bound(p: &ProblemSpec, b: &CosCoeffs, subdiv: usize) -> Result<f64, RigorError> {
    let tp = TrigPoly::reconstruct(b);
    n_impl(p, &tp, subdiv).map_err(at_stage(Stage::NBound))
}

/// Upper bound on `c1 ||D^2 f^x(u, v)||_F` over `[0,1] x [-c1 r, c1 r]^2`,
/// a superset of the disc the theorem asks for. Axes the Hessian does not
/// depend on are not subdivided.
pub fn k_bound(p: &ProblemSpec, r: f64, subdiv: usize) -> Result<f64, RigorError> {
    assert!(r > 0.0, "Lipschitz ball radius must be positive");
    let c1 = const_c1();
    let half = c1.mul(&Interval::point(r)).hi();
    let box_uv = Interval::new(-half, half);

    let fu = p.f.diff(Var::U);
    let fuu = fu.diff(Var::U);
    let fuv = fu.diff(Var::V);
    let fvv = p.f.diff(Var::V).diff(Var::V);

    let uses = |v: Var| fuu.uses(v) || fuv.uses(v) || fvv.uses(v);
    let nx = if uses(Var::X) { subdiv } else { 1 };
    let nu = if uses(Var::U) { subdiv } else { 1 };
    let nv = if uses(Var::V) { subdiv } else { 1 };

    let uv_cell = |c: usize, count: usize| -> Interval {
        if count == 1 {
            return box_uv;
        }
        let w = box_uv.width() / count as f64;
        let lo = box_uv.lo() + w * c as f64;
        let hi = if c + 1 == count {
            box_uv.hi()
        } else {
            box_uv.lo() + w * (c + 1) as f64
        };
        // one ulp out keeps the union of cells covering the whole box
        Interval::new(lo, hi).widen_ulps(1).intersect(&box_uv).expect("inside box")
    };

    // parallel over x-slabs; each slab reduces its own cells in index order
    let slab_sups = par::map_range(nx, |ix| -> Result<f64, QuadError> {
        let x = if nx == 1 {
            Interval::new(0.0, 1.0)
        } else {
            x_cell(ix, nx)
        };
        let mut sup = 0.0f64;
        for iu in 0..nu {
            let u = uv_cell(iu, nu);
            for iv in 0..nv {
                let v = uv_cell(iv, nv);
                let a = fuu.eval_interval(&x, &u, &v)?;
                let bq = fuv.eval_interval(&x, &u, &v)?;
                let d = fvv.eval_interval(&x, &u, &v)?;
                let frob_sq = a
                    .sqr()
                    .add(&Interval::point(2.0).mul(&bq.sqr()))
                    .add(&d.sqr());
                sup = sup.max(frob_sq.clamp_nonnegative().sqrt().expect("nonnegative").hi());
            }
        }
        Ok(sup)
    });
    let mut sup = 0.0f64;
    for v in slab_sups {
        sup = sup.max(v.map_err(at_stage(Stage::KBound))?);
    }
    Ok(c1.mul(&Interval::point(sup)).hi())
}

/// Combines the finite-block bound with the diagonal tail and the
/// truncation perturbation: `L = min(nu0, (pi m)^2/omega(m+1))` and
/// `nu = L - N/(pi m)`, clamped at zero.
pub fn assemble_nu(nu0: f64, m: usize, n: f64) -> (f64, f64) {
    assert!(nu0 >= 0.0 && n >= 0.0);
    let l = nu0.min(tail_lambda_interval(m).lo());
    let pim = const_pi().mul(&Interval::point(m as f64));
    let perturb = Interval::point(n).div(&pim).expect("pi m is positive");
    let nu = Interval::point(l).sub(&perturb).lo().max(0.0);
    (l, nu)
}

/// Kantorovich test: decides whether `g1(t) = eta - nu t + (K/2) t^2` has
/// roots `t* <= t**` with `t*` inside the search radius, entirely in
/// interval arithmetic over the certified scalar bounds.
pub fn kantorovich_verify(eta: f64, nu: f64, k: f64, r_search: f64) -> Certificate {
    assert!(eta >= 0.0 && k >= 0.0 && r_search > 0.0);
    if nu <= 0.0 {
        return Certificate::failed(FailReason::NuNonpositive);
    }
    let eta_iv = Interval::point(eta);
    let nu_iv = Interval::point(nu);
    let c1 = const_c1();

    let (t_star, t_dstar) = if k == 0.0 {
        // linear problems: g1 degenerates, the single root is eta/nu and
        // the uniqueness root escapes to infinity (reported capped at R)
        let t = eta_iv.div(&nu_iv).expect("nu positive").hi().max(0.0);
        (t, r_search)
    } else {
        let k_iv = Interval::point(k);
        let disc = nu_iv.sqr().sub(
            &Interval::point(2.0).mul(&k_iv).mul(&eta_iv),
        );
        if disc.lo() <= 0.0 {
            return Certificate::failed(FailReason::DiscriminantNegative);
        }
        let sq = disc.sqrt().expect("positive discriminant");
        let t_enc = nu_iv.sub(&sq).div(&k_iv).expect("k positive");
        let td_enc = nu_iv.add(&sq).div(&k_iv).expect("k positive");
        (t_enc.hi().max(0.0), td_enc.lo())
    };

    if t_star > r_search {
        return Certificate::failed(FailReason::TStarExceedsR);
    }
    debug_assert!(t_star <= t_dstar);
    Certificate {
        status: CertStatus::Verified,
        t_star,
        t_dstar,
        radius_h2: t_star,
        radius_c1: c1.mul(&Interval::point(t_star)).hi(),
        uniqueness_radius: t_dstar.min(r_search),
    }
}

/// Runs the full certification pipeline on a candidate: the Lipschitz ball
/// radius, then `eta`, the interval Jacobian and its modulus bound, `N`,
/// `K`, the assembled `nu` and the Kantorovich test.
pub fn certify(p: &ProblemSpec, b: &CosCoeffs) -> Result<CertifyOutcome, RigorError> {
    assert_eq!(b.m(), p.m);
    let tp = TrigPoly::reconstruct(b);
    let r_search = Interval::point(p.search_radius);

    // ball radius r >= ||candidate||_H2 + R, from the certified norm of the
    // reconstructed expression and from the coordinate norm, whichever is
    // larger
    let r_expr = tp.h2_norm_enclosure().add(&r_search).hi();
    let r_coord = Interval::point(b.h2_norm()).add(&r_search).hi();
    let r = r_expr.max(r_coord);

    let mut fallback = Vec::new();
    let (eta, fb_eta) = eta_impl(p, &tp).map_err(at_stage(Stage::Eta))?;
    if fb_eta {
        fallback.push("eta");
    }
    let (jac, fb_jac) = interval_jacobian_impl(p, &tp).map_err(at_stage(Stage::Jacobian))?;
    if fb_jac {
        fallback.push("jacobian");
    }
    let nu0 = nu0_bound(&jac);
    let n = n_impl(p, &tp, p.rigor.subdiv).map_err(at_stage(Stage::NBound))?;
    let k = k_bound(p, r, p.rigor.subdiv)?;
    let (l, nu) = assemble_nu(nu0, p.m, n);
    let certificate = kantorovich_verify(eta, nu, k, p.search_radius);

    let bounds = RigorBounds {
        eta,
        n,
        k,
        nu0,
        l,
        nu,
        r,
    };
    debug_assert!(bounds.nu <= bounds.l && bounds.l <= bounds.nu0 || bounds.nu0 == 0.0);
    Ok(CertifyOutcome {
        bounds,
        certificate,
        quad_fallback: fallback,
    })
}
