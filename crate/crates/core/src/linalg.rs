//! Small dense float linear algebra: just enough for the m-dimensional
//! Galerkin systems (m is typically 5).

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Pivots below this fraction of the largest entry are treated as zero.
const PIVOT_REL: f64 = 1e-12;

fn scale_of(a: &Mat) -> f64 {
    a.a.iter().fold(f64::MIN_POSITIVE, |acc, x| acc.max(x.abs()))
}

fn eliminate(a: &Mat, b: &[f64], skip_free: bool) -> Option<Vec<f64>> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let floor = PIVOT_REL * scale_of(a);
    let mut m = a.a.clone();
    let mut x = b.to_vec();
    let mut free = vec![false; n];
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1 * n + col]
                    .abs()
                    .partial_cmp(&m[r2 * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot_row * n + col].abs() <= floor {
            if !skip_free {
                return None;
            }
            free[col] = true;
            continue;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let piv = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / piv;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[row * n + j] -= factor * m[col * n + j];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        if free[col] {
            x[col] = 0.0;
            continue;
        }
        x[col] /= m[col * n + col];
        for row in 0..col {
            x[row] -= m[row * n + col] * x[col];
        }
    }
    Some(x)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot degenerates.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    eliminate(a, b, false)
}

/// Like [`solve`], but degenerate pivot directions are left uncorrected
/// (their solution component is zero) provided the system is consistent:
/// the candidate must reproduce `b` to a small residual. Returns `None`
/// for genuinely inconsistent singular systems.
pub fn solve_consistent(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    if let Some(x) = eliminate(a, b, false) {
        return Some(x);
    }
    let x = eliminate(a, b, true)?;
    let bnorm = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let xnorm = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-8 * (scale_of(a) * xnorm + bnorm) + 1e-300;
    let consistent = a
        .mat_vec(&x)
        .iter()
        .zip(b)
        .all(|(got, want)| (got - want).abs() <= tol);
    if consistent {
        Some(x)
    } else {
        None
    }
}

/// Approximate inverse by column-wise solves.
pub fn invert(a: &Mat) -> Option<Mat> {
    let n = a.n;
    let mut inv = Mat::zeros(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for (i, v) in col.into_iter().enumerate() {
            inv.set(i, j, v);
        }
    }
    Some(inv)
}
