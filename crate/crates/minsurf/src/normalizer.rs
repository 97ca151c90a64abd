//! Normal-frame normalization into canonical shape operators.
//!
//! Two pointwise reductions, applied on top of the engine's Gram-Schmidt
//! gauge:
//!
//! 1. the off-diagonal reduction: rotate the normal frame so `e₃` points
//!    along `Σ_β h^β₁₂ e_β`; afterwards `h̃³₁₂ = b > 0` and `h̃^β₁₂ = 0`
//!    for `β >= 4`;
//! 2. the canonical reduction: rotate `e₄..e_n` so `e₄` points along
//!    `(h̃^β₁₁)_{β>=4}`; for the surfaces this toolkit certifies the
//!    operators then collapse to `L³ = offdiag(b)`, `L⁴ = diag(b, -b)`,
//!    `L^β = 0`, with `b² = S/4`.
//!
//! For arbitrary inputs the deviation from that collapsed form is returned
//! as a residual rather than forced to zero. When the normal bundle is flat
//! (all `R_αβ12` negligible) the shape operators commute and a single
//! tangent Jacobi rotation diagonalizes all of them simultaneously; that is
//! the flat branch. Points where neither reduction applies are reported as
//! `MixedRejected`.
//!
//! Covariant derivatives transform pointwise under a normal rotation
//! (`h̃^α_ijk = Σ_β R_αβ h^β_ijk`), so rotating the engine's `h1`/`h2` by
//! the canonical rotation yields the canonical-frame `λ^α_k`, `λ^α_kl`
//! without differentiating the rotation itself.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{normal_curvature_components, H1Block, H2Block, ShapeData};
use crate::linalg::{complete_orthonormal, identity, mat_mul, norm};

pub type Mat2 = [[f64; 2]; 2];

/// Default scale-relative threshold deciding flat vs nowhere-flat points.
pub const FLATNESS_SCALE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NowhereFlat,
    Flat,
    MixedRejected,
}

/// Result of the normalization pass at one point.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CanonicalForm {
    /// Orthogonal (n-2)x(n-2) matrix; row `r` gives the new normal
    /// `ẽ_{3+r}` in the input normal basis.
    pub rotation: Vec<Vec<f64>>,
    /// Tangent Jacobi angle; meaningful on the flat branch only.
    pub tangent_rotation: f64,
    pub b: f64,
    /// `h³₁₁` after normalization; vanishes in canonical form.
    pub lambda3: f64,
    /// `h⁴₁₁` after normalization.
    pub lambda4: f64,
    /// Largest deviation from the canonical claims (see module docs).
    pub residual: f64,
    pub branch: Branch,
    /// `Σ_{β>3} (h^β_ij)²` in the normalized frame.
    pub s_bar: f64,
    /// `Σ (h³_ij)²` in the normalized frame.
    pub s3: f64,
    /// Shape operators in the normalized frame.
    pub h_canonical: Vec<Mat2>,
}

pub enum StarOutcome {
    Rotated {
        rotation: Vec<Vec<f64>>,
        h: Vec<Mat2>,
    },
    /// Off-diagonal vector below threshold: the point belongs to the flat
    /// branch. Not an error.
    FlatSignal,
}

/// Apply a normal rotation to a family of shape operators:
/// `h̃^r = Σ_β R_rβ h^β`.
pub fn rotate_h(rotation: &[Vec<f64>], h: &[Mat2]) -> Vec<Mat2> {
    rotate_mats(rotation, h)
}

fn rotate_mats(rotation: &[Vec<f64>], h: &[Mat2]) -> Vec<Mat2> {
    rotation
        .iter()
        .map(|row| {
            let mut out = [[0.0; 2]; 2];
            for (c, m) in row.iter().zip(h) {
                for i in 0..2 {
                    for j in 0..2 {
                        out[i][j] += c * m[i][j];
                    }
                }
            }
            out
        })
        .collect()
}

/// Apply a normal rotation to first covariant derivatives.
pub fn rotate_h1(rotation: &[Vec<f64>], h1: &[H1Block]) -> Vec<H1Block> {
    rotation
        .iter()
        .map(|row| {
            let mut out = [[[0.0; 2]; 2]; 2];
            for (c, t) in row.iter().zip(h1) {
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            out[i][j][k] += c * t[i][j][k];
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Apply a normal rotation to second covariant derivatives.
pub fn rotate_h2(rotation: &[Vec<f64>], h2: &[H2Block]) -> Vec<H2Block> {
    rotation
        .iter()
        .map(|row| {
            let mut out = [[[[0.0; 2]; 2]; 2]; 2];
            for (c, t) in row.iter().zip(h2) {
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                out[i][j][k][l] += c * t[i][j][k][l];
                            }
                        }
                    }
                }
            }
            out
        })
        .collect()
}

fn frobenius(m: &Mat2) -> f64 {
    (m[0][0] * m[0][0] + 2.0 * m[0][1] * m[0][1] + m[1][1] * m[1][1]).sqrt()
}

fn sum_squares(h: &[Mat2]) -> f64 {
    h.iter().fold(0.0, |acc, m| {
        acc + m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]
    })
}

/// Rotate `e₃` onto the off-diagonal vector `(h^α₁₂)_α`, completing the
/// rotation with the same largest-residual pivot rule the frame builder
/// uses. Signals the flat branch when the vector is negligible.
pub fn normalize_star(h: &[Mat2], flat_threshold: f64) -> StarOutcome {
    let nc = h.len();
    let w: Vec<f64> = h.iter().map(|m| m[0][1]).collect();
    let wn = norm(&w);
    if wn <= flat_threshold || nc == 0 {
        return StarOutcome::FlatSignal;
    }
    let unit: Vec<f64> = w.iter().map(|x| x / wn).collect();
    let rotation = complete_orthonormal(&[unit], nc);
    let rotated = rotate_mats(&rotation, h);
    StarOutcome::Rotated {
        rotation,
        h: rotated,
    }
}

/// Canonical reduction of operators already in off-diagonal-reduced form.
///
/// `s` is the squared norm of the second fundamental form, used in the
/// `b² = S/4` part of the residual. `lambda_threshold` decides when the
/// `(h^β₁₁)_{β>=4}` vector is too degenerate for the reduction.
pub fn normalize_theorem1(h_star: &[Mat2], s: f64, lambda_threshold: f64) -> CanonicalForm {
    let nc = h_star.len();
    let mut rotation = identity(nc);
    let mut h = h_star.to_vec();

    // fix b > 0 (flip e₃ if a hand-made input arrives with b < 0)
    if h[0][0][1] < 0.0 {
        for x in rotation[0].iter_mut() {
            *x = -*x;
        }
        for i in 0..2 {
            for j in 0..2 {
                h[0][i][j] = -h[0][i][j];
            }
        }
    }
    let b = h[0][0][1];

    let lambda_vec: Vec<f64> = h.iter().skip(1).map(|m| m[0][0]).collect();
    let ln = norm(&lambda_vec);
    if ln <= lambda_threshold {
        // Theorem hypotheses not met: b nonzero but no λ-direction to pin e₄.
        let s3 = sum_squares(&h[..1]);
        return CanonicalForm {
            rotation,
            tangent_rotation: 0.0,
            b,
            lambda3: h[0][0][0],
            lambda4: 0.0,
            residual: canonical_residual(&h, b, s),
            branch: Branch::MixedRejected,
            s_bar: sum_squares(&h) - s3,
            s3,
            h_canonical: h,
        };
    }

    let unit: Vec<f64> = lambda_vec.iter().map(|x| x / ln).collect();
    let sub = complete_orthonormal(&[unit], nc - 1);
    let mut rot2 = identity(nc);
    for (r, row) in sub.iter().enumerate() {
        for (c, val) in row.iter().enumerate() {
            rot2[1 + r][1 + c] = *val;
        }
    }
    let mut h_canon = rotate_mats(&rot2, &h);
    let mut rotation = mat_mul(&rot2, &rotation);
    if nc >= 2 && h_canon[1][0][0] < 0.0 {
        for x in rotation[1].iter_mut() {
            *x = -*x;
        }
        for i in 0..2 {
            for j in 0..2 {
                h_canon[1][i][j] = -h_canon[1][i][j];
            }
        }
    }

    let s3 = sum_squares(&h_canon[..1]);
    CanonicalForm {
        rotation,
        tangent_rotation: 0.0,
        b,
        lambda3: h_canon[0][0][0],
        lambda4: if nc >= 2 { h_canon[1][0][0] } else { 0.0 },
        residual: canonical_residual(&h_canon, b, s),
        branch: Branch::NowhereFlat,
        s_bar: sum_squares(&h_canon) - s3,
        s3,
        h_canonical: h_canon,
    }
}

/// Deviation from `L³ = offdiag(b)`, `L⁴ = diag(b, -b)`, `L^β = 0`,
/// `b² = S/4`.
fn canonical_residual(h: &[Mat2], b: f64, s: f64) -> f64 {
    let mut r = (b * b - s / 4.0).abs();
    r = r.max(h[0][0][0].abs()).max(h[0][1][1].abs());
    if h.len() >= 2 {
        r = r
            .max((h[1][0][0].abs() - b).abs())
            .max((h[1][1][1] + h[1][0][0]).abs())
            .max(h[1][0][1].abs());
    } else {
        // canonical form requires an e₄ carrying diag(b, -b)
        r = r.max(b.abs());
    }
    for m in h.iter().skip(2) {
        r = r.max(frobenius(m));
    }
    r
}

/// Largest commutator entry `|R_αβ12|` over normal pairs.
pub fn max_commutator(h: &[Mat2]) -> f64 {
    normal_curvature_components(h)
        .iter()
        .fold(0.0f64, |m, &(_, _, r)| m.max(r.abs()))
}

/// Simultaneous diagonalization of commuting shape operators by one tangent
/// Jacobi rotation. Returns the angle `θ ∈ (-π/4, π/4]` and the rotated
/// operators.
pub fn diagonalize_flat(h: &[Mat2], commute_tol: f64) -> Result<(f64, Vec<Mat2>)> {
    let worst = max_commutator(h);
    if worst > commute_tol {
        return Err(Error::Usage(format!(
            "shape operators do not commute: largest commutator norm {worst:.3e} > {commute_tol:.3e}"
        )));
    }
    // pivot on the operator with the largest anisotropic part
    // ((a-d)/2, b); an isotropic operator is rotation-invariant and pins
    // no principal directions
    let anisotropy = |m: &Mat2| (0.5 * (m[0][0] - m[1][1])).hypot(m[0][1]);
    let pivot = h
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| anisotropy(a).partial_cmp(&anisotropy(b)).expect("finite"))
        .map(|(i, _)| i);
    let theta = match pivot {
        Some(i) if anisotropy(&h[i]) > 1e-14 && h[i][0][1].abs() > 1e-14 => {
            let m = &h[i];
            let mut t = 0.5 * (2.0 * m[0][1]).atan2(m[0][0] - m[1][1]);
            if t > std::f64::consts::FRAC_PI_4 {
                t -= std::f64::consts::FRAC_PI_2;
            }
            if t <= -std::f64::consts::FRAC_PI_4 {
                t += std::f64::consts::FRAC_PI_2;
            }
            t
        }
        _ => 0.0,
    };
    Ok((theta, rotate_tangent(h, theta)))
}

/// Conjugate every operator by the tangent rotation
/// `ē₁ = cos θ e₁ + sin θ e₂`, `ē₂ = -sin θ e₁ + cos θ e₂`.
pub fn rotate_tangent(h: &[Mat2], theta: f64) -> Vec<Mat2> {
    let (s, c) = theta.sin_cos();
    h.iter()
        .map(|m| {
            let a = m[0][0];
            let bq = m[0][1];
            let d = m[1][1];
            let a2 = c * c * a + 2.0 * s * c * bq + s * s * d;
            let b2 = (c * c - s * s) * bq - s * c * (a - d);
            let d2 = s * s * a - 2.0 * s * c * bq + c * c * d;
            [[a2, b2], [b2, d2]]
        })
        .collect()
}

/// Full pointwise dispatch: flat-branch diagonalization when all `R_αβ12`
/// are negligible, otherwise the off-diagonal and canonical reductions.
/// The flatness threshold is `FLATNESS_SCALE · max(1, S)` unless overridden.
pub fn canonicalize(h: &[Mat2], s: f64, flatness_scale: f64) -> Result<CanonicalForm> {
    let nc = h.len();
    let threshold = flatness_scale * s.abs().max(1.0);
    if max_commutator(h) <= threshold {
        let (theta, rotated) = diagonalize_flat(h, threshold)?;
        let residual = rotated.iter().fold(0.0f64, |m, op| m.max(op[0][1].abs()));
        let s3 = if nc >= 1 {
            sum_squares(&rotated[..1])
        } else {
            0.0
        };
        return Ok(CanonicalForm {
            rotation: identity(nc),
            tangent_rotation: theta,
            b: 0.0,
            lambda3: if nc >= 1 { rotated[0][0][0] } else { 0.0 },
            lambda4: if nc >= 2 { rotated[1][0][0] } else { 0.0 },
            residual,
            branch: Branch::Flat,
            s_bar: sum_squares(&rotated) - s3,
            s3,
            h_canonical: rotated,
        });
    }
    match normalize_star(h, threshold) {
        StarOutcome::FlatSignal => {
            // normal curvature above threshold but no off-diagonal vector:
            // numerically inconsistent input
            Err(Error::Usage(
                "normal curvature is nonzero but every h^α_12 vanishes".into(),
            ))
        }
        StarOutcome::Rotated {
            rotation,
            h: h_star,
        } => {
            let mut canon = normalize_theorem1(&h_star, s, threshold);
            canon.rotation = mat_mul(&canon.rotation, &rotation);
            Ok(canon)
        }
    }
}

/// Covariant derivatives in the canonical frame, with the residuals of the
/// gradient and second-derivative relations they are required to satisfy.
#[derive(Clone, Debug)]
pub struct CanonicalDerivatives {
    /// Rotated `h^α_ijk`.
    pub h1: Vec<H1Block>,
    /// Rotated `h^α_ijkl` when order-4 data is present.
    pub h2: Option<Vec<H2Block>>,
    /// `λ^α_k = h^α_11k`.
    pub lambda_k: Vec<[f64; 2]>,
    /// `λ^α_kl = h^α_11kl`.
    pub lambda_kl: Option<Vec<[[f64; 2]; 2]>>,
    /// Named residuals of the canonical-frame derivative relations.
    pub relation_residuals: BTreeMap<String, f64>,
}

/// Rotate the engine's covariant derivatives into the canonical frame and
/// evaluate the gradient relations
/// `λ³₁ = -λ⁴₂ = -S₂/(4√S)`, `λ³₂ = λ⁴₁ = S₁/(4√S)` and, when second
/// derivatives are available, their `λ^α_kl` counterparts.
pub fn canonical_derivatives(
    shape: &ShapeData,
    canon: &CanonicalForm,
) -> Result<CanonicalDerivatives> {
    if canon.branch != Branch::NowhereFlat {
        return Err(Error::Usage(
            "canonical derivatives require the nowhere-flat branch".into(),
        ));
    }
    if shape.s < 1e-10 {
        return Err(Error::Singularity(
            "canonical derivative relations divide by sqrt(S) but S vanishes".into(),
        ));
    }
    let h1 = shape
        .h1
        .as_ref()
        .ok_or_else(|| Error::Usage("first covariant derivatives not computed".into()))?;
    let h1c = rotate_h1(&canon.rotation, h1);
    let h2c = shape.h2.as_ref().map(|h2| rotate_h2(&canon.rotation, h2));
    let lambda_k: Vec<[f64; 2]> = h1c.iter().map(|t| [t[0][0][0], t[0][0][1]]).collect();
    let lambda_kl: Option<Vec<[[f64; 2]; 2]>> = h2c.as_ref().map(|h2| {
        h2.iter()
            .map(|t| {
                [
                    [t[0][0][0][0], t[0][0][0][1]],
                    [t[0][0][1][0], t[0][0][1][1]],
                ]
            })
            .collect()
    });

    let mut residuals = BTreeMap::new();
    let grad = shape
        .grad_s
        .ok_or_else(|| Error::Usage("frame gradient of S not computed".into()))?;
    let inv4s = 1.0 / (4.0 * shape.s.sqrt());
    if lambda_k.len() >= 2 {
        let l3 = lambda_k[0];
        let l4 = lambda_k[1];
        residuals.insert("lambda3_1".into(), (l3[0] + grad[1] * inv4s).abs());
        residuals.insert("lambda3_2".into(), (l3[1] - grad[0] * inv4s).abs());
        residuals.insert("lambda4_1".into(), (l4[0] - grad[0] * inv4s).abs());
        residuals.insert("lambda4_2".into(), (l4[1] - grad[1] * inv4s).abs());
    }
    if let (Some(lkl), Some(hess), Some(p)) = (&lambda_kl, shape.s_hess, shape.p) {
        if lkl.len() >= 2 {
            let l3 = lkl[0];
            let l4 = lkl[1];
            residuals.insert("lambda3_11".into(), (l3[0][0] + hess[1][0] * inv4s).abs());
            residuals.insert("lambda4_21".into(), (l4[1][0] - hess[1][0] * inv4s).abs());
            residuals.insert(
                "lambda3_12".into(),
                (l3[0][1] + (hess[1][1] - p) * inv4s).abs(),
            );
            residuals.insert(
                "lambda4_22".into(),
                (l4[1][1] - (hess[1][1] - p) * inv4s).abs(),
            );
            residuals.insert("lambda3_22".into(), (l3[1][1] - hess[0][1] * inv4s).abs());
            residuals.insert("lambda4_12".into(), (l4[0][1] - hess[0][1] * inv4s).abs());
            residuals.insert(
                "lambda3_21".into(),
                (l3[1][0] - (hess[0][0] - p) * inv4s).abs(),
            );
            residuals.insert(
                "lambda4_11".into(),
                (l4[0][0] - (hess[0][0] - p) * inv4s).abs(),
            );
        }
    }
    Ok(CanonicalDerivatives {
        h1: h1c,
        h2: h2c,
        lambda_k,
        lambda_kl,
        relation_residuals: residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::geometry::analyze;
    use crate::linalg::random_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn veronese_canonical_ops() -> Vec<Mat2> {
        let b = (1.0f64 / 3.0).sqrt();
        vec![[[0.0, b], [b, 0.0]], [[b, 0.0], [0.0, -b]]]
    }

    #[test]
    fn star_leaves_reduced_input_alone() {
        let h = veronese_canonical_ops();
        match normalize_star(&h, 1e-8) {
            StarOutcome::Rotated { rotation, h: out } => {
                assert_eq!(rotation, identity(2));
                assert_eq!(out, h);
            }
            StarOutcome::FlatSignal => panic!("unexpected flat signal"),
        }
    }

    #[test]
    fn star_recovers_b_after_random_mix() {
        let h = veronese_canonical_ops();
        let b = h[0][0][1];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let rot = random_orthogonal(2, &mut rng);
            let mixed = rotate_mats(&rot, &h);
            match normalize_star(&mixed, 1e-8) {
                StarOutcome::Rotated { h: out, .. } => {
                    assert!((out[0][0][1] - b).abs() < 1e-10);
                    for m in out.iter().skip(1) {
                        assert!(m[0][1].abs() < 1e-10);
                    }
                }
                StarOutcome::FlatSignal => panic!("unexpected flat signal"),
            }
        }
    }

    #[test]
    fn star_flags_flat_input() {
        let h: Vec<Mat2> = vec![[[1.0, 0.0], [0.0, -1.0]], [[0.3, 0.0], [0.0, -0.3]]];
        assert!(matches!(normalize_star(&h, 1e-8), StarOutcome::FlatSignal));
    }

    #[test]
    fn theorem1_on_engine_veronese() {
        let spec = lookup("veronese").unwrap();
        let a = analyze(&spec, 0.8, 0.3, 3).unwrap();
        let canon = canonicalize(&a.shape.h, a.shape.s, FLATNESS_SCALE).unwrap();
        assert_eq!(canon.branch, Branch::NowhereFlat);
        assert!(canon.residual < 1e-8, "residual {}", canon.residual);
        assert!((canon.b * canon.b - 1.0 / 3.0).abs() < 1e-8);
        assert!((canon.s_bar - canon.s3).abs() < 1e-8);
        assert!((canon.s_bar + canon.s3 - a.shape.s).abs() < 1e-12);
    }

    #[test]
    fn canonical_form_survives_random_gauge() {
        let spec = lookup("generalized_veronese").unwrap();
        let a = analyze(&spec, 1.1, 2.0, 3).unwrap();
        let base = canonicalize(&a.shape.h, a.shape.s, FLATNESS_SCALE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let rot = random_orthogonal(a.shape.h.len(), &mut rng);
            let mixed = rotate_mats(&rot, &a.shape.h);
            let canon = canonicalize(&mixed, a.shape.s, FLATNESS_SCALE).unwrap();
            assert!(canon.residual < 1e-8, "residual {}", canon.residual);
            assert!((canon.b - base.b).abs() < 1e-10);
            assert!((canon.s_bar - base.s_bar).abs() < 1e-10);
            assert!((canon.s3 - base.s3).abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_input_is_rejected() {
        // non-commuting pair whose λ-vector (h^β₁₁ for β >= 4) vanishes:
        // b != 0 but nothing pins e₄
        let b = 0.7;
        let h: Vec<Mat2> = vec![[[0.0, b], [b, 0.0]], [[0.0, 0.0], [0.0, 0.5]]];
        let s = 2.0 * b * b + 0.25;
        let canon = canonicalize(&h, s, FLATNESS_SCALE).unwrap();
        assert_eq!(canon.branch, Branch::MixedRejected);
        assert!(canon.residual > 0.1);
    }

    #[test]
    fn flat_branch_diagonalizes_rotated_clifford() {
        let ops: Vec<Mat2> = vec![[[1.0, 0.0], [0.0, -1.0]]];
        for theta0 in [-0.6, -0.2, 0.31, 0.78] {
            let mixed = rotate_tangent(&ops, theta0);
            let (theta, out) = diagonalize_flat(&mixed, 1e-10).unwrap();
            assert!(out[0][0][1].abs() < 1e-9, "offdiag {}", out[0][0][1]);
            assert!(theta > -std::f64::consts::FRAC_PI_4 - 1e-12);
            assert!(theta <= std::f64::consts::FRAC_PI_4 + 1e-12);
            // undoing the synthetic rotation, modulo the π/2 ambiguity
            let wrapped = (theta + theta0).rem_euclid(std::f64::consts::FRAC_PI_2);
            let dist = wrapped.min(std::f64::consts::FRAC_PI_2 - wrapped);
            assert!(dist < 1e-10, "theta0 {theta0} theta {theta}");
        }
    }

    #[test]
    fn flat_branch_trivial_cases() {
        let diag: Vec<Mat2> = vec![[[0.4, 0.0], [0.0, -0.4]]];
        let (theta, out) = diagonalize_flat(&diag, 1e-10).unwrap();
        assert_eq!(theta, 0.0);
        assert_eq!(out, diag);

        let zeros: Vec<Mat2> = vec![[[0.0; 2]; 2], [[0.0; 2]; 2]];
        let (theta, out) = diagonalize_flat(&zeros, 1e-10).unwrap();
        assert_eq!(theta, 0.0);
        assert_eq!(out, zeros);
    }

    #[test]
    fn noncommuting_input_is_usage_error() {
        let h: Vec<Mat2> = vec![[[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]]];
        match diagonalize_flat(&h, 1e-10) {
            Err(Error::Usage(msg)) => assert!(msg.contains("commut")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_derivatives_vanish_on_veronese() {
        let spec = lookup("veronese").unwrap();
        let a = analyze(&spec, 0.9, 1.4, 4).unwrap();
        let canon = canonicalize(&a.shape.h, a.shape.s, FLATNESS_SCALE).unwrap();
        let derivs = canonical_derivatives(&a.shape, &canon).unwrap();
        for l in &derivs.lambda_k {
            assert!(l[0].abs() < 1e-7 && l[1].abs() < 1e-7);
        }
        for (name, r) in &derivs.relation_residuals {
            assert!(*r < 1e-5, "{name} residual {r}");
        }
    }

    #[test]
    fn generalized_veronese_second_derivatives() {
        let spec = lookup("generalized_veronese").unwrap();
        let a = analyze(&spec, 1.2, 0.8, 4).unwrap();
        let canon = canonicalize(&a.shape.h, a.shape.s, FLATNESS_SCALE).unwrap();
        let derivs = canonical_derivatives(&a.shape, &canon).unwrap();
        let s = a.shape.s;
        let p = a.shape.p.unwrap();
        let lkl = derivs.lambda_kl.as_ref().unwrap();
        // λ³₁₂ - λ³₂₁ = ¼ √S (3S - 4)
        let commutator = lkl[0][0][1] - lkl[0][1][0];
        let want = 0.25 * s.sqrt() * (3.0 * s - 4.0);
        assert!(
            (commutator - want).abs() < 1e-5,
            "commutator {commutator} want {want}"
        );
        // with S constant, λ³₁₂ = P/(4√S)
        let want12 = p / (4.0 * s.sqrt());
        assert!(
            (lkl[0][0][1] - want12).abs() < 1e-5,
            "λ³₁₂ {} want {want12}",
            lkl[0][0][1]
        );
        for (name, r) in &derivs.relation_residuals {
            assert!(*r < 1e-5, "{name} residual {r}");
        }
    }
}
