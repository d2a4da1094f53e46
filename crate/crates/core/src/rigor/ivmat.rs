//! Interval matrices and the verified lower bound on the bijectivity
//! modulus of every real matrix inside an interval enclosure.

use crate::interval::Interval;
use crate::linalg::{self, Mat};

/// Row-major square matrix of intervals.
#[derive(Debug, Clone)]
pub struct IvMat {
    n: usize,
    a: Vec<Interval>,
}

impl IvMat {
    pub fn zeros(n: usize) -> IvMat {
        IvMat {
            n,
            a: vec![Interval::point(0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Interval) -> IvMat {
        let mut m = IvMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.a[i * self.n + j] = v;
    }

    pub fn midpoint(&self) -> Mat {
        let mut m = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).mid());
            }
        }
        m
    }
}

/// Certified lower bound on the bijectivity modulus (reciprocal spectral
/// norm of the inverse) of every real matrix contained in `a`.
///
/// Let V approximately invert the midpoint matrix and q >= ||I - V B||_F
/// for all B in the enclosure. If q < 1 then V B is invertible with
/// ||(V B)^-1||_2 <= 1/(1 - q), so B^-1 = (V B)^-1 V exists and
/// ||B^-1||_F <= ||V||_F / (1 - q); the bound is the reciprocal, rounded
/// down. Returns 0 when invertibility cannot be established.
pub fn nu0_bound(a: &IvMat) -> f64 {
    let n = a.n();
    let v = match linalg::invert(&a.midpoint()) {
        Some(v) => v,
        None => return 0.0,
    };
    // E = I - V * A, accumulated in interval arithmetic in index order
    let mut e_frob_sq = Interval::point(0.0);
    for i in 0..n {
        for j in 0..n {
            let mut s = Interval::point(if i == j { 1.0 } else { 0.0 });
            for k in 0..n {
                s = s.sub(&Interval::point(v.get(i, k)).mul(&a.get(k, j)));
            }
            e_frob_sq = e_frob_sq.add(&s.sqr());
        }
    }
    let q = e_frob_sq.clamp_nonnegative().sqrt().expect("sum of squares").hi();
    // the negated comparison also rejects a NaN q
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(q < 1.0) {
        return 0.0;
    }
    let mut v_frob_sq = Interval::point(0.0);
    for i in 0..n {
        for j in 0..n {
            v_frob_sq = v_frob_sq.add(&Interval::point(v.get(i, j)).sqr());
        }
    }
    let v_frob = v_frob_sq.clamp_nonnegative().sqrt().expect("sum of squares");
    let one_minus_q = Interval::point(1.0).sub(&Interval::point(q));
    match one_minus_q.div(&v_frob) {
        Ok(iv) => iv.lo().max(0.0),
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_bound_is_inverse_sqrt_m() {
        let id = IvMat::from_fn(4, |i, j| Interval::point(if i == j { 1.0 } else { 0.0 }));
        let nu0 = nu0_bound(&id);
        assert!((0.499..=0.5).contains(&nu0));
    }

    #[test]
    fn diagonal_bound_is_frobenius_of_inverse() {
        let d = IvMat::from_fn(2, |i, j| {
            Interval::point(match (i, j) {
                (0, 0) => 2.0,
                (1, 1) => 4.0,
                _ => 0.0,
            })
        });
        let nu0 = nu0_bound(&d);
        // 1 / sqrt(1/4 + 1/16) = 1.7888543819998317; true sigma_min is 2
        assert!(nu0 <= 1.788_854_381_999_832);
        assert!(nu0 >= 1.788_854_381_999_6);
    }

    #[test]
    fn singular_midpoint_gives_zero() {
        let s = IvMat::from_fn(2, |_, _| Interval::point(1.0));
        assert_eq!(nu0_bound(&s), 0.0);
    }

    #[test]
    fn wide_entries_give_zero() {
        // entries so wide that the enclosure contains singular matrices
        let w = IvMat::from_fn(2, |i, j| {
            if i == j {
                Interval::new(-2.0, 2.0)
            } else {
                Interval::point(0.0)
            }
        });
        assert_eq!(nu0_bound(&w), 0.0);
    }
}
