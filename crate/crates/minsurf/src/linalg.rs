//! Small dense linear algebra helpers.
//!
//! Everything here operates on tiny objects (vectors of length <= 13,
//! matrices up to 10x10), so plain `Vec<f64>` rows are used throughout.

use rand::Rng;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a -= c * b`
pub fn axpy(a: &mut [f64], c: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x -= c * y;
    }
}

/// Rows of `m` applied to `v`.
pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0.0; cols]; rows];
    for (r, row) in out.iter_mut().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            let arc = a[r][k];
            for (c, val) in row.iter_mut().enumerate() {
                *val += arc * bk[c];
            }
        }
    }
    out
}

pub fn identity(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|r| (0..dim).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Largest deviation of `m mᵀ` from the identity.
pub fn orthogonality_residual(m: &[Vec<f64>]) -> f64 {
    let dim = m.len();
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let g = dot(&m[r], &m[c]);
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Complete `seed_rows` to a full orthonormal basis of R^dim.
///
/// Candidates are the ambient basis vectors; at every step the candidate
/// whose residual against everything already chosen is largest is selected,
/// ties broken by lowest index. The same pivot rule is used for chart frame
/// completion and normal-rotation completion so gauge choices stay
/// reproducible.
pub fn complete_orthonormal(seed_rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = seed_rows.to_vec();
    while rows.len() < dim {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for a in 0..dim {
            let mut r = vec![0.0; dim];
            r[a] = 1.0;
            for row in &rows {
                let c = dot(&r, row);
                axpy(&mut r, c, row);
            }
            let n = norm(&r);
            let better = match &best {
                None => true,
                Some((_, bn, _)) => n > *bn + 1e-12,
            };
            if better {
                best = Some((a, n, r));
            }
        }
        let (_, n, mut r) = best.expect("dim > 0");
        assert!(n > 1e-12, "cannot complete a degenerate basis");
        for x in r.iter_mut() {
            *x /= n;
        }
        // one re-orthogonalization pass keeps the Gram residual at rounding level
        for row in rows.iter() {
            let c = dot(&r, row);
            axpy(&mut r, c, row);
        }
        let n2 = norm(&r);
        for x in r.iter_mut() {
            *x /= n2;
        }
        rows.push(r);
    }
    rows
}

/// Eigen-decomposition of a symmetric 2x2 matrix `[[a, b], [b, d]]`.
///
/// Returns `(theta, [l1, l2])` with rotation columns
/// `(cos θ, sin θ), (-sin θ, cos θ)` diagonalizing the matrix to
/// `diag(l1, l2)`.
pub fn eig_sym2(a: f64, b: f64, d: f64) -> (f64, [f64; 2]) {
    if b == 0.0 {
        return (0.0, [a, d]);
    }
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (s, c) = theta.sin_cos();
    let l1 = c * c * a + 2.0 * s * c * b + s * s * d;
    let l2 = s * s * a - 2.0 * s * c * b + c * c * d;
    (theta, [l1, l2])
}

/// Haar-ish random orthogonal matrix: Gram-Schmidt on a Gaussian sample.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            // Box-Muller; avoids pulling in a distributions crate.
            let mut r: Vec<f64> = (0..dim)
                .map(|_| {
                    let a: f64 = rng.gen_range(1e-12..1.0);
                    let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    (-2.0 * a.ln()).sqrt() * b.cos()
                })
                .collect();
            for row in &rows {
                let c = dot(&r, row);
                axpy(&mut r, c, row);
            }
            let n = norm(&r);
            if n < 1e-9 {
                ok = false;
                break;
            }
            for x in r.iter_mut() {
                *x /= n;
            }
            rows.push(r);
        }
        if ok {
            return rows;
        }
    }
}
