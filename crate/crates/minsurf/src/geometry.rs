//! Moving-frame geometry of an immersed surface, computed from jets.
//!
//! From the component jets of `Φ(u, v)` at a chart point this module builds
//! an adapted orthonormal frame `{Φ; e₁, e₂; e₃..e_n}`, the connection
//! components `ω_AB(e_k) = ⟨D_{e_k} e_A, e_B⟩`, the second fundamental form
//! `h^α_ij = ⟨D_{e_i} e_j, e_α⟩` (discarding the component along `Φ`, which
//! belongs to the sphere itself), and from these the curvature scalars and
//! covariant derivatives:
//!
//! * `K = 1 + Σ_α (h^α₁₁ h^α₂₂ - (h^α₁₂)²)` (Gauss equation, ambient
//!   curvature 1), cross-checked against the intrinsic Brioschi formula;
//! * `R_αβ12 = Σ_m (h^α₁ₘ h^β_m2 - h^α₂ₘ h^β_m1)` and
//!   `K^N = ½ sqrt(Σ R²)` over both index orders;
//! * `h^α_ijk = e_k(h^α_ij) + Σ_m ω_mi(e_k) h^α_mj + Σ_m ω_mj(e_k) h^α_im
//!   + Σ_β ω_βα(e_k) h^β_ij`, and the analogous second derivatives;
//! * `S = Σ (h^α_ij)²`, `P = Σ (h^α_ijk)²`, `Q = Σ (h^α_ijkl)²`, frame
//!   derivatives of `S`, and the Laplace-Beltrami of `S` under the induced
//!   metric.
//!
//! Every derivative is analytic, carried by the jets; the jet order of each
//! intermediate drops by one per differentiation, which is why second
//! covariant derivatives need order-4 input jets. All functions are pure;
//! grid evaluations may run concurrently as long as aggregation stays in
//! grid-index order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::ImmersionSpec;
use crate::error::{Error, Result};
use crate::jet::{multi_indices, Jet2, Var};

/// Metric determinants at or below this are treated as chart degeneracies.
pub const METRIC_DET_FLOOR: f64 = 1e-10;

/// Per-normal block of first covariant derivatives, indexed `[i][j][k]`.
pub type H1Block = [[[f64; 2]; 2]; 2];
/// Per-normal block of second covariant derivatives, indexed `[i][j][k][l]`.
pub type H2Block = [[[[f64; 2]; 2]; 2]; 2];

// ---------------------------------------------------------------------------
// jet-vector helpers
// ---------------------------------------------------------------------------

fn jv_dot(a: &[Jet2], b: &[Jet2]) -> Jet2 {
    let mut acc = Jet2::constant(0.0, a[0].order()).expect("valid order");
    for (x, y) in a.iter().zip(b) {
        acc = acc + *x * *y;
    }
    acc
}

fn jv_truncate(a: &[Jet2], order: usize) -> Vec<Jet2> {
    a.iter().map(|j| j.truncate(order)).collect()
}

fn jv_deriv(a: &[Jet2], var: Var) -> Vec<Jet2> {
    a.iter().map(|j| j.derivative(var)).collect()
}

/// Directional derivative of a scalar jet along a chart vector field with
/// jet coefficients `(cu, cv)`: `cu ∂u f + cv ∂v f`, one order lower.
fn directional(f: &Jet2, cu: &Jet2, cv: &Jet2) -> Jet2 {
    let order = f.order() - 1;
    f.derivative(Var::U) * cu.truncate(order) + f.derivative(Var::V) * cv.truncate(order)
}

// ---------------------------------------------------------------------------
// frames
// ---------------------------------------------------------------------------

/// Adapted orthonormal frame with connection components at a chart point.
///
/// Frame fields are indexed `0 => e₁`, `1 => e₂`, `2 + a => e_{3+a}` for the
/// `a`-th normal. `omega[k][A][B]` holds `ω_AB(e_k)` as a jet one order below
/// the frame fields.
#[derive(Clone, Debug)]
pub struct FramePoint {
    /// Components per ambient vector, `n + 1`.
    pub ambient_dim: usize,
    /// Sphere dimension `n`; the normal bundle has rank `n - 2`.
    pub sphere_dim: usize,
    /// Jet order of the frame fields (input order minus one).
    pub order: usize,
    /// `Φ` truncated to the frame order.
    pub position: Vec<Jet2>,
    pub tangent: [Vec<Jet2>; 2],
    /// Chart coefficients of the tangent frame: `e_k = c[k][0] ∂u + c[k][1] ∂v`.
    pub tangent_chart: [[Jet2; 2]; 2],
    pub normal: Vec<Vec<Jet2>>,
    pub omega: Vec<Vec<Vec<Jet2>>>,
    /// Induced metric determinant at the point.
    pub metric_det: f64,
}

impl FramePoint {
    fn field(&self, a: usize) -> &[Jet2] {
        match a {
            0 | 1 => &self.tangent[a],
            _ => &self.normal[a - 2],
        }
    }

    /// Number of frame fields (`n`): two tangents plus the normals.
    pub fn field_count(&self) -> usize {
        2 + self.normal.len()
    }

    /// Largest deviation of the value-level Gram matrix of
    /// `{Φ, e₁, …, e_n}` from the identity.
    pub fn gram_residual(&self) -> f64 {
        let count = self.field_count() + 1;
        let vector = |a: usize| -> &[Jet2] {
            if a == 0 {
                &self.position
            } else {
                self.field(a - 1)
            }
        };
        let mut worst = 0.0f64;
        for a in 0..count {
            for b in a..count {
                let g: f64 = vector(a)
                    .iter()
                    .zip(vector(b))
                    .map(|(x, y)| x.value() * y.value())
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Largest deviation from `ω_AB(e_k) = -ω_BA(e_k)` at value level.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..2 {
            for a in 0..self.field_count() {
                for b in 0..self.field_count() {
                    worst = worst
                        .max((self.omega[k][a][b].value() + self.omega[k][b][a].value()).abs());
                }
            }
        }
        worst
    }
}

/// Build the adapted frame from immersion jets of order at least 2.
///
/// `e₁, e₂` come from Gram-Schmidt on `(∂uΦ, ∂vΦ)` in that order. The
/// normal frame projects ambient basis vectors against `span{Φ, e₁, e₂}`
/// and the normals found so far, picking at each step the candidate with
/// the largest residual norm (ties broken by lowest ambient index).
pub fn build_frames(jets: &[Jet2]) -> Result<FramePoint> {
    if jets.len() < 3 {
        return Err(Error::Usage(format!(
            "immersion needs at least 3 components, got {}",
            jets.len()
        )));
    }
    let m = jets[0].order();
    if m < 2 {
        return Err(Error::Usage(format!(
            "frame construction needs jets of order >= 2, got {m}"
        )));
    }
    if jets.iter().any(|j| j.order() != m) {
        return Err(Error::Usage(
            "mixed jet orders in immersion components".into(),
        ));
    }
    if jets.iter().any(|j| !j.is_finite()) {
        return Err(Error::Domain("non-finite immersion jet coefficient".into()));
    }

    let ambient_dim = jets.len();
    let sphere_dim = ambient_dim - 1;
    let order = m - 1;

    let du = jv_deriv(jets, Var::U);
    let dv = jv_deriv(jets, Var::V);
    let e_uu = jv_dot(&du, &du);
    let e_uv = jv_dot(&du, &dv);
    let e_vv = jv_dot(&dv, &dv);
    let metric_det = e_uu.value() * e_vv.value() - e_uv.value() * e_uv.value();
    if !(metric_det > METRIC_DET_FLOOR) {
        return Err(Error::Domain(format!(
            "degenerate induced metric: det g = {metric_det:.3e} <= {METRIC_DET_FLOOR:.0e}"
        )));
    }

    let one = Jet2::constant(1.0, order).expect("valid order");
    let zero = Jet2::constant(0.0, order).expect("valid order");

    let norm_u = e_uu.sqrt()?;
    let c1u = one.try_div(&norm_u)?;
    let e1: Vec<Jet2> = du.iter().map(|j| *j * c1u).collect();

    // e₂ = (∂vΦ - (F/E) ∂uΦ) / |…|
    let f_over_e = e_uv.try_div(&e_uu)?;
    let w: Vec<Jet2> = dv
        .iter()
        .zip(&du)
        .map(|(dvj, duj)| *dvj - f_over_e * *duj)
        .collect();
    let norm_w = jv_dot(&w, &w).sqrt()?;
    let c2v = one.try_div(&norm_w)?;
    let c2u = -(f_over_e * c2v);
    let e2: Vec<Jet2> = w.iter().map(|j| *j * c2v).collect();

    let position = jv_truncate(jets, order);

    // Normal completion. Pivot decisions use value-level residuals; the
    // chosen candidate is then orthonormalized in jet arithmetic.
    let mut normal: Vec<Vec<Jet2>> = Vec::with_capacity(sphere_dim - 2);
    while normal.len() < sphere_dim - 2 {
        let chosen: Vec<&[Jet2]> = std::iter::once(position.as_slice())
            .chain([e1.as_slice(), e2.as_slice()])
            .chain(normal.iter().map(|v| v.as_slice()))
            .collect();
        let mut best: Option<(usize, f64)> = None;
        for a in 0..ambient_dim {
            let mut res = vec![0.0; ambient_dim];
            res[a] = 1.0;
            for f in &chosen {
                let c = f[a].value();
                for (r, fj) in res.iter_mut().zip(f.iter()) {
                    *r -= c * fj.value();
                }
            }
            let n2: f64 = res.iter().map(|x| x * x).sum();
            if best.is_none_or(|(_, bn)| n2 > bn + 1e-12) {
                best = Some((a, n2));
            }
        }
        let (pivot, n2) = best.expect("ambient_dim > 0");
        if n2 < 1e-12 {
            return Err(Error::Domain(
                "normal completion failed: no ambient direction has a usable residual".into(),
            ));
        }
        let mut r: Vec<Jet2> = (0..ambient_dim)
            .map(|a| if a == pivot { one } else { zero })
            .collect();
        for f in &chosen {
            let c = f[pivot];
            for (rj, fj) in r.iter_mut().zip(f.iter()) {
                *rj = *rj - c * *fj;
            }
        }
        let rn = jv_dot(&r, &r).sqrt()?;
        let inv = one.try_div(&rn)?;
        normal.push(r.iter().map(|j| *j * inv).collect());
    }

    // Connection components ω_AB(e_k) as jets of one order less.
    let field_count = sphere_dim;
    let fields: Vec<&[Jet2]> = (0..field_count)
        .map(|a| -> &[Jet2] {
            match a {
                0 => &e1,
                1 => &e2,
                _ => &normal[a - 2],
            }
        })
        .collect();
    let chart = [[c1u, zero], [c2u, c2v]];
    let omega_order = order - 1;
    let mut omega =
        vec![
            vec![
                vec![Jet2::constant(0.0, omega_order).expect("valid order"); field_count];
                field_count
            ];
            2
        ];
    for k in 0..2 {
        let cu = chart[k][0].truncate(omega_order);
        let cv = chart[k][1].truncate(omega_order);
        for (a, fa) in fields.iter().enumerate() {
            let da: Vec<Jet2> = fa
                .iter()
                .map(|j| j.derivative(Var::U) * cu + j.derivative(Var::V) * cv)
                .collect();
            for (b, fb) in fields.iter().enumerate() {
                omega[k][a][b] = jv_dot(&da, &jv_truncate(fb, omega_order));
            }
        }
    }

    Ok(FramePoint {
        ambient_dim,
        sphere_dim,
        order,
        position,
        tangent: [e1, e2],
        tangent_chart: chart,
        normal,
        omega,
        metric_det,
    })
}

// ---------------------------------------------------------------------------
// second fundamental form and derived scalars
// ---------------------------------------------------------------------------

/// Shape operators, covariant derivatives and the scalars built from them.
///
/// Index convention: `alpha = 0..normal_count` numbers the normal fields
/// (`e_{3+alpha}` in frame terms); `i, j, k, l` are tangent indices 0, 1.
#[derive(Clone, Debug)]
pub struct ShapeData {
    pub normal_count: usize,
    /// `h^α_ij` as jets (two orders below the immersion jets).
    pub h_jets: Vec<[[Jet2; 2]; 2]>,
    pub h: Vec<[[f64; 2]; 2]>,
    /// Largest `|⟨D_{e₁}e₂ - D_{e₂}e₁, e_α⟩|` seen while symmetrizing.
    pub h_asym: f64,
    /// Mean curvature vector components `H^α`.
    pub mean: Vec<f64>,
    pub s: f64,
    pub s_jet: Jet2,
    pub h1_jets: Option<Vec<[[[Jet2; 2]; 2]; 2]>>,
    pub h1: Option<Vec<H1Block>>,
    pub p: Option<f64>,
    /// Frame derivatives `S_k = e_k(S)`.
    pub grad_s: Option<[f64; 2]>,
    grad_s_jets: Option<[Jet2; 2]>,
    pub h2: Option<Vec<H2Block>>,
    pub q: Option<f64>,
    /// Second covariant derivatives `S_kl` of the scalar `S`.
    pub s_hess: Option<[[f64; 2]; 2]>,
}

impl ShapeData {
    /// Largest Codazzi residual `|h^α_ijk - h^α_ikj|` over all index
    /// permutations, when first derivatives are available.
    pub fn codazzi_residual(&self) -> Option<f64> {
        let h1 = self.h1.as_ref()?;
        let mut worst = 0.0f64;
        for a in h1 {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        worst = worst.max((a[i][j][k] - a[i][k][j]).abs());
                        worst = worst.max((a[i][j][k] - a[j][i][k]).abs());
                    }
                }
            }
        }
        Some(worst)
    }
}

/// Second fundamental form from the frame: fills `h`, the mean curvature
/// vector and `S`.
pub fn second_fundamental(frame: &FramePoint) -> ShapeData {
    let nc = frame.sphere_dim - 2;
    let horder = frame.order - 1;
    let mut h_jets = Vec::with_capacity(nc);
    let mut h = Vec::with_capacity(nc);
    let mut mean = Vec::with_capacity(nc);
    let mut h_asym = 0.0f64;
    let mut s_jet = Jet2::constant(0.0, horder).expect("valid order");
    for a in 0..nc {
        // h^α_ij = ω_{j,α}(e_i); symmetrize the off-diagonal pair.
        let h11 = frame.omega[0][0][2 + a];
        let h22 = frame.omega[1][1][2 + a];
        let h12a = frame.omega[0][1][2 + a];
        let h12b = frame.omega[1][0][2 + a];
        h_asym = h_asym.max((h12a.value() - h12b.value()).abs());
        let h12 = (h12a + h12b).scale(0.5);
        h_jets.push([[h11, h12], [h12, h22]]);
        h.push([[h11.value(), h12.value()], [h12.value(), h22.value()]]);
        mean.push(0.5 * (h11.value() + h22.value()));
        s_jet = s_jet + h11 * h11 + h12 * h12 + h12 * h12 + h22 * h22;
    }
    ShapeData {
        normal_count: nc,
        h_jets,
        h,
        h_asym,
        mean,
        s: s_jet.value(),
        s_jet,
        h1_jets: None,
        h1: None,
        p: None,
        grad_s: None,
        grad_s_jets: None,
        h2: None,
        q: None,
        s_hess: None,
    }
}

/// Signed components `R_αβ12` for `α < β` (0-based normal indices).
pub fn normal_curvature_components(h: &[[[f64; 2]; 2]]) -> Vec<(usize, usize, f64)> {
    let nc = h.len();
    let mut out = Vec::new();
    for a in 0..nc {
        for b in (a + 1)..nc {
            let mut r = 0.0;
            for m in 0..2 {
                r += h[a][0][m] * h[b][m][1] - h[a][1][m] * h[b][m][0];
            }
            out.push((a, b, r));
        }
    }
    out
}

/// Per-point curvature summary.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub point: (f64, f64),
    /// Gauss curvature from the Gauss equation.
    pub k: f64,
    /// Normal scalar curvature, `½ sqrt(Σ R²)` over both index orders.
    pub kn: f64,
    pub s: f64,
    /// Signed `R_{αβ12}` entries, `alpha`/`beta` in paper numbering (3-based).
    pub normal_tensor: Vec<NormalTensorEntry>,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalTensorEntry {
    pub alpha: usize,
    pub beta: usize,
    pub value: f64,
}

/// Gauss equation and normal curvature from the shape operators.
pub fn curvatures(shape: &ShapeData, point: (f64, f64)) -> CurvatureReport {
    let mut k = 1.0;
    for a in &shape.h {
        k += a[0][0] * a[1][1] - a[0][1] * a[0][1];
    }
    let pairs = normal_curvature_components(&shape.h);
    // fold from +0.0: the stdlib f64 Sum identity is -0.0, which would
    // leak a negative zero into reports for codimension-1 surfaces
    let kn = pairs
        .iter()
        .fold(0.0f64, |acc, (_, _, r)| acc + r * r)
        .sqrt();
    CurvatureReport {
        point,
        k,
        kn,
        s: shape.s,
        normal_tensor: pairs
            .into_iter()
            .map(|(a, b, value)| NormalTensorEntry {
                alpha: a + 3,
                beta: b + 3,
                value,
            })
            .collect(),
        residuals: BTreeMap::new(),
    }
}

/// First covariant derivatives: fills `h1`, `P` and the frame gradient of
/// `S`. Requires immersion jets of order >= 3.
pub fn covariant_h1(frame: &FramePoint, shape: &mut ShapeData) -> Result<()> {
    if frame.order < 2 {
        return Err(Error::Usage(
            "first covariant derivatives need immersion jets of order >= 3".into(),
        ));
    }
    let nc = shape.normal_count;
    let out_order = frame.order - 2;
    let zero = Jet2::constant(0.0, out_order).expect("valid order");
    let mut h1_jets = vec![[[[zero; 2]; 2]; 2]; nc];
    let mut h1 = vec![[[[0.0; 2]; 2]; 2]; nc];
    let mut p = 0.0;
    for a in 0..nc {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut acc = directional(
                        &shape.h_jets[a][i][j],
                        &frame.tangent_chart[k][0],
                        &frame.tangent_chart[k][1],
                    );
                    for m in 0..2 {
                        let w_mi = frame.omega[k][m][i].truncate(out_order);
                        let w_mj = frame.omega[k][m][j].truncate(out_order);
                        acc = acc
                            + w_mi * shape.h_jets[a][m][j].truncate(out_order)
                            + w_mj * shape.h_jets[a][i][m].truncate(out_order);
                    }
                    for b in 0..nc {
                        let w_ba = frame.omega[k][2 + b][2 + a].truncate(out_order);
                        acc = acc + w_ba * shape.h_jets[b][i][j].truncate(out_order);
                    }
                    h1_jets[a][i][j][k] = acc;
                    h1[a][i][j][k] = acc.value();
                    p += acc.value() * acc.value();
                }
            }
        }
    }
    let grad_jets = [
        directional(
            &shape.s_jet,
            &frame.tangent_chart[0][0],
            &frame.tangent_chart[0][1],
        ),
        directional(
            &shape.s_jet,
            &frame.tangent_chart[1][0],
            &frame.tangent_chart[1][1],
        ),
    ];
    shape.grad_s = Some([grad_jets[0].value(), grad_jets[1].value()]);
    shape.grad_s_jets = Some(grad_jets);
    shape.h1_jets = Some(h1_jets);
    shape.h1 = Some(h1);
    shape.p = Some(p);
    Ok(())
}

/// Second covariant derivatives: fills `h2`, `Q` and the Hessian `S_kl`.
/// Requires immersion jets of order 4.
pub fn covariant_h2(frame: &FramePoint, shape: &mut ShapeData) -> Result<()> {
    let h1_jets = match &shape.h1_jets {
        Some(j) if frame.order >= 3 => j,
        _ => {
            return Err(Error::Usage(
                "second covariant derivatives need immersion jets of order 4".into(),
            ))
        }
    };
    let nc = shape.normal_count;
    let mut h2 = vec![[[[[0.0; 2]; 2]; 2]; 2]; nc];
    let mut q = 0.0;
    let omega_val = |l: usize, a: usize, b: usize| frame.omega[l][a][b].value();
    for a in 0..nc {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let jet = &h1_jets[a][i][j][k];
                        let mut acc = frame.tangent_chart[l][0].value() * jet.coeff(1, 0)
                            + frame.tangent_chart[l][1].value() * jet.coeff(0, 1);
                        let h1v = shape.h1.as_ref().expect("filled with h1_jets");
                        for m in 0..2 {
                            acc += omega_val(l, m, i) * h1v[a][m][j][k]
                                + omega_val(l, m, j) * h1v[a][i][m][k]
                                + omega_val(l, m, k) * h1v[a][i][j][m];
                        }
                        for b in 0..nc {
                            acc += omega_val(l, 2 + b, 2 + a) * h1v[b][i][j][k];
                        }
                        h2[a][i][j][k][l] = acc;
                        q += acc * acc;
                    }
                }
            }
        }
    }
    let grad_jets = shape.grad_s_jets.as_ref().expect("filled with h1_jets");
    let grad = shape.grad_s.expect("filled with h1_jets");
    let mut s_hess = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut acc = frame.tangent_chart[l][0].value() * grad_jets[k].coeff(1, 0)
                + frame.tangent_chart[l][1].value() * grad_jets[k].coeff(0, 1);
            for m in 0..2 {
                acc += omega_val(l, m, k) * grad[m];
            }
            s_hess[k][l] = acc;
        }
    }
    shape.h2 = Some(h2);
    shape.q = Some(q);
    shape.s_hess = Some(s_hess);
    Ok(())
}

// ---------------------------------------------------------------------------
// chart-route scalars
// ---------------------------------------------------------------------------

/// Laplace-Beltrami of a scalar jet under the metric induced by `position`:
/// `Δf = (1/√g) ∂_a(√g g^{ab} ∂_b f)`. Needs `f` of order >= 2 and
/// `position` of order >= 3.
pub fn laplace_beltrami(position: &[Jet2], f: &Jet2) -> Result<f64> {
    if f.order() < 2 || position[0].order() < 3 {
        return Err(Error::Usage(
            "Laplace-Beltrami needs a scalar of order >= 2 on a chart of order >= 3".into(),
        ));
    }
    let du = jv_deriv(position, Var::U);
    let dv = jv_deriv(position, Var::V);
    let work = f.order() - 1;
    let e = jv_dot(&du, &du).truncate(work);
    let ff = jv_dot(&du, &dv).truncate(work);
    let g = jv_dot(&dv, &dv).truncate(work);
    let det = e * g - ff * ff;
    if !(det.value() > METRIC_DET_FLOOR) {
        return Err(Error::Domain(format!(
            "degenerate induced metric: det g = {:.3e}",
            det.value()
        )));
    }
    let sqrt_det = det.sqrt()?;
    let fu = f.derivative(Var::U);
    let fv = f.derivative(Var::V);
    // √g g^{ab} ∂_b f with g^{uu} = G/det, g^{uv} = -F/det, g^{vv} = E/det
    let wu = (g * fu - ff * fv).try_div(&det)? * sqrt_det;
    let wv = (e * fv - ff * fu).try_div(&det)? * sqrt_det;
    Ok((wu.derivative(Var::U).value() + wv.derivative(Var::V).value()) / sqrt_det.value())
}

/// Laplace-Beltrami of the scalar `S` at a chart point (order-4 pipeline).
pub fn laplacian_s(spec: &ImmersionSpec, u: f64, v: f64) -> Result<f64> {
    let jets = spec.evaluate(u, v, 4)?;
    let frame = build_frames(&jets)?;
    let shape = second_fundamental(&frame);
    laplace_beltrami(&frame.position, &shape.s_jet)
}

/// Intrinsic Gauss curvature by the Brioschi formula, straight from the
/// metric jets; independent of the frame and shape-operator pipeline.
pub fn intrinsic_gauss(jets: &[Jet2]) -> Result<f64> {
    if jets[0].order() < 3 {
        return Err(Error::Usage(
            "Brioschi curvature needs immersion jets of order >= 3".into(),
        ));
    }
    let du = jv_deriv(jets, Var::U);
    let dv = jv_deriv(jets, Var::V);
    let e = jv_dot(&du, &du);
    let f = jv_dot(&du, &dv);
    let g = jv_dot(&dv, &dv);
    let det = e.value() * g.value() - f.value() * f.value();
    if !(det > METRIC_DET_FLOOR) {
        return Err(Error::Domain(format!(
            "degenerate induced metric: det g = {det:.3e}"
        )));
    }
    let (e0, f0, g0) = (e.value(), f.value(), g.value());
    let m1 = [
        [
            -0.5 * e.coeff(0, 2) + f.coeff(1, 1) - 0.5 * g.coeff(2, 0),
            0.5 * e.coeff(1, 0),
            f.coeff(1, 0) - 0.5 * e.coeff(0, 1),
        ],
        [f.coeff(0, 1) - 0.5 * g.coeff(1, 0), e0, f0],
        [0.5 * g.coeff(0, 1), f0, g0],
    ];
    let m2 = [
        [0.0, 0.5 * e.coeff(0, 1), 0.5 * g.coeff(1, 0)],
        [0.5 * e.coeff(0, 1), e0, f0],
        [0.5 * g.coeff(1, 0), f0, g0],
    ];
    Ok((det3(&m1) - det3(&m2)) / (det * det))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Apply a constant ambient rotation to immersion jets (gauge tests).
pub fn rotate_ambient(rot: &[Vec<f64>], jets: &[Jet2]) -> Vec<Jet2> {
    let order = jets[0].order();
    rot.iter()
        .map(|row| {
            let mut acc = Jet2::constant(0.0, order).expect("valid order");
            for (c, j) in row.iter().zip(jets) {
                acc = acc + j.scale(*c);
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------------------
// per-point orchestration
// ---------------------------------------------------------------------------

/// Everything the identity suite needs at one chart point.
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub point: (f64, f64),
    pub jet_order: usize,
    pub frame: FramePoint,
    pub shape: ShapeData,
    pub curvature: CurvatureReport,
    /// Largest jet-coefficient deviation of `|Φ|²` from the constant 1.
    pub unit_sphere_residual: f64,
    pub k_intrinsic: Option<f64>,
    pub laplacian_s: Option<f64>,
}

/// Run the full pipeline at a point. Derivative tiers are filled according
/// to the jet order: `h1`/`P` need order 3, `h2`/`Q`/`ΔS` need order 4.
pub fn analyze(spec: &ImmersionSpec, u: f64, v: f64, order: usize) -> Result<PointAnalysis> {
    if order < 2 {
        return Err(Error::Usage(format!(
            "analysis needs jet order >= 2, got {order}"
        )));
    }
    let jets = spec.evaluate(u, v, order)?;
    analyze_jets(&jets, (u, v))
}

/// Same as [`analyze`] but starting from caller-provided jets, so gauge
/// tests can rotate the ambient coordinates first.
pub fn analyze_jets(jets: &[Jet2], point: (f64, f64)) -> Result<PointAnalysis> {
    let order = jets[0].order();
    let mut unit_residual = 0.0f64;
    {
        let nsq = jv_dot(jets, jets);
        for (i, j) in multi_indices(order) {
            let expect = if (i, j) == (0, 0) { 1.0 } else { 0.0 };
            unit_residual = unit_residual.max((nsq.coeff(i, j) - expect).abs());
        }
    }
    let frame = build_frames(jets)?;
    let mut shape = second_fundamental(&frame);
    if order >= 3 {
        covariant_h1(&frame, &mut shape)?;
    }
    let laplacian = if order >= 4 {
        covariant_h2(&frame, &mut shape)?;
        Some(laplace_beltrami(&frame.position, &shape.s_jet)?)
    } else {
        None
    };
    let k_intrinsic = if order >= 3 {
        Some(intrinsic_gauss(jets)?)
    } else {
        None
    };
    let mut curvature = curvatures(&shape, point);
    curvature
        .residuals
        .insert("unit_sphere".into(), unit_residual);
    curvature
        .residuals
        .insert("gram".into(), frame.gram_residual());
    curvature.residuals.insert(
        "connection_antisymmetry".into(),
        frame.antisymmetry_residual(),
    );
    curvature
        .residuals
        .insert("h_symmetry".into(), shape.h_asym);
    curvature.residuals.insert(
        "minimality".into(),
        shape.mean.iter().fold(0.0f64, |m, x| m.max(x.abs())),
    );
    if let Some(c) = shape.codazzi_residual() {
        curvature.residuals.insert("codazzi".into(), c);
    }
    if let Some(ki) = k_intrinsic {
        curvature
            .residuals
            .insert("gauss_equation".into(), (ki - curvature.k).abs());
    }
    Ok(PointAnalysis {
        point,
        jet_order: order,
        frame,
        shape,
        curvature,
        unit_sphere_residual: unit_residual,
        k_intrinsic,
        laplacian_s: laplacian,
    })
}
