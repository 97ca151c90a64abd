//! Catalog of chart-parametrized minimal immersions into round spheres.
//!
//! Every entry is a map `Φ(u, v)` from a 2-D chart into the unit sphere
//! `S^n ⊂ R^{n+1}`, evaluable as jets of any order up to 4:
//!
//! * `equator` — the totally geodesic `S² ⊂ S³`;
//! * `clifford_torus` — `(cos u, sin u, cos v, sin v)/√2` in `S³`;
//! * `veronese` — the classical quadratic parametrization of `S²` in `S⁴`;
//! * `generalized_veronese` — the degree-3 harmonic immersion into `S⁶`;
//! * `calabi(s)` for `1 <= s <= 6` — the degree-`s` immersion built from a
//!   real orthonormal basis of degree-`s` spherical harmonics, scaled by
//!   `sqrt(4π/(2s+1))` so the addition theorem puts the image on the unit
//!   sphere `S^{2s}`.
//!
//! Sphere-based charts use polar coordinates `u ∈ (0, π)`, `v ∈ [0, 2π]`
//! with a fixed exclusion band of width 0.15 around the poles; the band is a
//! coordinate degeneracy of the chart, not a geometric feature. Harmonics
//! carry no Condon-Shortley phase and are ordered `m = -s..s`, which pins
//! one congruence representative; all derived quantities are checked to be
//! congruence-invariant.
//!
//! The `expected` constants stored on a spec are test oracles only; the
//! geometry engine never reads them.

use crate::error::{Error, Result};
use crate::grid::Rect;
use crate::jet::{Jet2, Var, MAX_ORDER};

/// Exclusion band half-width around the polar coordinate singularities.
pub const POLE_MARGIN: f64 = 0.15;

/// Largest supported Calabi degree.
pub const MAX_CALABI_DEGREE: u32 = 6;

/// Closed-form curvature constants used as oracles in tests and reports.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Expected {
    pub k: f64,
    pub s: f64,
    pub kn: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Equator,
    CliffordTorus,
    Veronese,
    GeneralizedVeronese,
    Calabi(u32),
}

/// A named chart-parametrized immersion into `S^ambient_n`.
#[derive(Clone, Debug)]
pub struct ImmersionSpec {
    pub name: String,
    pub kind: SurfaceKind,
    /// The surface lies in `S^ambient_n ⊂ R^{ambient_n + 1}`.
    pub ambient_n: usize,
    pub degree_s: Option<u32>,
    /// Full chart rectangle, before removing the exclusion band.
    pub chart: Rect,
    /// Exclusion band width at both `u`-ends of the chart.
    pub margin_u: f64,
    pub expected: Option<Expected>,
    /// Documented lower bound for the induced metric determinant on the
    /// valid chart region.
    pub min_metric_det: f64,
}

impl ImmersionSpec {
    /// Chart rectangle minus the exclusion band.
    pub fn valid_rect(&self) -> Rect {
        Rect {
            u0: self.chart.u0 + self.margin_u,
            u1: self.chart.u1 - self.margin_u,
            v0: self.chart.v0,
            v1: self.chart.v1,
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.valid_rect().contains(u, v)
    }

    /// Component jets of `Φ(u, v)`, length `ambient_n + 1`.
    pub fn evaluate(&self, u: f64, v: f64, order: usize) -> Result<Vec<Jet2>> {
        if order > MAX_ORDER {
            return Err(Error::Config(format!(
                "jet order {order} out of range 0..={MAX_ORDER}"
            )));
        }
        if !self.contains(u, v) {
            return Err(Error::Domain(format!(
                "point ({u}, {v}) outside the valid chart of `{}` \
                 (u in [{:.4}, {:.4}] after the {:.2}-wide exclusion band, v in [{:.4}, {:.4}])",
                self.name,
                self.valid_rect().u0,
                self.valid_rect().u1,
                self.margin_u,
                self.chart.v0,
                self.chart.v1,
            )));
        }
        let uj = Jet2::variable(Var::U, u, order).expect("order checked");
        let vj = Jet2::variable(Var::V, v, order).expect("order checked");
        let components = match self.kind {
            SurfaceKind::Equator => equator_components(&uj, &vj, order),
            SurfaceKind::CliffordTorus => clifford_components(&uj, &vj),
            SurfaceKind::Veronese => veronese_components(&uj, &vj, order),
            SurfaceKind::GeneralizedVeronese => calabi_components(3, &uj, &vj, order),
            SurfaceKind::Calabi(s) => calabi_components(s, &uj, &vj, order),
        };
        debug_assert_eq!(components.len(), self.ambient_n + 1);
        Ok(components)
    }
}

fn sphere_chart() -> Rect {
    Rect {
        u0: 0.0,
        u1: std::f64::consts::PI,
        v0: 0.0,
        v1: std::f64::consts::TAU,
    }
}

/// Round-metric scale of the degree-`s` immersion: the induced metric is
/// `s(s+1)/2` times the unit round metric, so `det g = (s(s+1)/2)² sin²u`.
fn calabi_metric_scale(s: u32) -> f64 {
    (s * (s + 1)) as f64 / 2.0
}

fn sphere_min_det(s: u32) -> f64 {
    let scale = calabi_metric_scale(s);
    0.9 * scale * scale * POLE_MARGIN.sin().powi(2)
}

fn calabi_expected(s: u32) -> Expected {
    let k = 2.0 / (s as f64 * (s as f64 + 1.0));
    Expected {
        k,
        s: 2.0 - 2.0 * k,
        kn: if s >= 2 { 1.0 - k } else { 0.0 },
    }
}

/// Degree-`s` standard minimal immersion spec. Degrees above
/// [`MAX_CALABI_DEGREE`] are rejected to keep the harmonic recurrences in a
/// well-tested range.
pub fn build_calabi(s: u32) -> Result<ImmersionSpec> {
    if !(1..=MAX_CALABI_DEGREE).contains(&s) {
        return Err(Error::Usage(format!(
            "calabi degree {s} out of supported range 1..={MAX_CALABI_DEGREE}"
        )));
    }
    Ok(ImmersionSpec {
        name: format!("calabi_{s}"),
        kind: SurfaceKind::Calabi(s),
        ambient_n: 2 * s as usize,
        degree_s: Some(s),
        chart: sphere_chart(),
        margin_u: POLE_MARGIN,
        expected: Some(calabi_expected(s)),
        min_metric_det: sphere_min_det(s),
    })
}

/// The named catalog: every surface the classification theorems mention.
pub fn catalog_list() -> Vec<ImmersionSpec> {
    vec![
        ImmersionSpec {
            name: "equator".into(),
            kind: SurfaceKind::Equator,
            ambient_n: 3,
            degree_s: Some(1),
            chart: sphere_chart(),
            margin_u: POLE_MARGIN,
            expected: Some(Expected {
                k: 1.0,
                s: 0.0,
                kn: 0.0,
            }),
            min_metric_det: sphere_min_det(1),
        },
        ImmersionSpec {
            name: "clifford_torus".into(),
            kind: SurfaceKind::CliffordTorus,
            ambient_n: 3,
            degree_s: None,
            chart: Rect {
                u0: 0.0,
                u1: std::f64::consts::TAU,
                v0: 0.0,
                v1: std::f64::consts::TAU,
            },
            margin_u: 0.0,
            expected: Some(Expected {
                k: 0.0,
                s: 2.0,
                kn: 0.0,
            }),
            min_metric_det: 0.2,
        },
        ImmersionSpec {
            name: "veronese".into(),
            kind: SurfaceKind::Veronese,
            ambient_n: 4,
            degree_s: Some(2),
            chart: sphere_chart(),
            margin_u: POLE_MARGIN,
            expected: Some(Expected {
                k: 1.0 / 3.0,
                s: 4.0 / 3.0,
                kn: 2.0 / 3.0,
            }),
            min_metric_det: sphere_min_det(2),
        },
        ImmersionSpec {
            name: "generalized_veronese".into(),
            kind: SurfaceKind::GeneralizedVeronese,
            ambient_n: 6,
            degree_s: Some(3),
            chart: sphere_chart(),
            margin_u: POLE_MARGIN,
            expected: Some(Expected {
                k: 1.0 / 6.0,
                s: 5.0 / 3.0,
                kn: 5.0 / 6.0,
            }),
            min_metric_det: sphere_min_det(3),
        },
    ]
}

/// Look a surface up by catalog name.
pub fn lookup(name: &str) -> Result<ImmersionSpec> {
    if let Some(spec) = catalog_list().into_iter().find(|s| s.name == name) {
        return Ok(spec);
    }
    if let Some(rest) = name.strip_prefix("calabi_") {
        if let Ok(s) = rest.parse::<u32>() {
            return build_calabi(s);
        }
    }
    Err(Error::Usage(format!(
        "unknown surface `{name}`; run the catalog listing for valid names"
    )))
}

// ---------------------------------------------------------------------------
// chart maps
// ---------------------------------------------------------------------------

/// Unit-sphere point (sin u cos v, sin u sin v, cos u) as jets.
fn sphere_point(uj: &Jet2, vj: &Jet2) -> [Jet2; 3] {
    let su = uj.sin();
    [su * vj.cos(), su * vj.sin(), uj.cos()]
}

fn equator_components(uj: &Jet2, vj: &Jet2, order: usize) -> Vec<Jet2> {
    let p = sphere_point(uj, vj);
    let zero = Jet2::constant(0.0, order).expect("order checked");
    vec![p[0], p[1], p[2], zero]
}

fn clifford_components(uj: &Jet2, vj: &Jet2) -> Vec<Jet2> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        uj.cos().scale(inv_sqrt2),
        uj.sin().scale(inv_sqrt2),
        vj.cos().scale(inv_sqrt2),
        vj.sin().scale(inv_sqrt2),
    ]
}

/// `√3 (yz, xz, xy, (x²-y²)/2, (x²+y²-2z²)/(2√3))` on `x²+y²+z² = 1`.
fn veronese_components(uj: &Jet2, vj: &Jet2, order: usize) -> Vec<Jet2> {
    let [x, y, z] = sphere_point(uj, vj);
    let sqrt3 = 3.0f64.sqrt();
    let two = Jet2::constant(2.0, order).expect("order checked");
    vec![
        (y * z).scale(sqrt3),
        (x * z).scale(sqrt3),
        (x * y).scale(sqrt3),
        (x * x - y * y).scale(sqrt3 / 2.0),
        (x * x + y * y - two * z * z).scale(0.5),
    ]
}

/// Coefficients of the Legendre polynomial `P_s`, ascending powers.
/// All values are dyadic rationals, hence exact in f64.
fn legendre_coeffs(s: u32) -> Vec<f64> {
    let mut prev = vec![1.0]; // P_0
    if s == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0]; // P_1
    for n in 1..s {
        // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
        let nf = n as f64;
        let mut next = vec![0.0; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += (2.0 * nf + 1.0) * c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= nf * c;
        }
        for c in next.iter_mut() {
            *c /= nf + 1.0;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn differentiate_poly(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect()
}

fn horner(coeffs: &[f64], x: &Jet2) -> Jet2 {
    let order = x.order();
    let mut acc = Jet2::constant(*coeffs.last().expect("nonempty"), order).expect("order checked");
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc * *x + Jet2::constant(c, order).expect("order checked");
    }
    acc
}

/// Components `c_s · Y_{s,m}(p(u, v))` for `m = -s..s`, with real harmonics
/// `Y` orthonormal on the sphere and `c_s = sqrt(4π/(2s+1))`. The
/// normalizations combine to `sqrt(2 (s-m)!/(s+m)!)` for `m != 0`, so no π
/// enters the map. `sin^m u · (d^m P_s/dx^m)(cos u)` is the associated
/// Legendre function without the Condon-Shortley phase.
fn calabi_components(s: u32, uj: &Jet2, vj: &Jet2, order: usize) -> Vec<Jet2> {
    // d^m P_s / dx^m for m = 0..s
    let mut dlegendre = Vec::with_capacity(s as usize + 1);
    dlegendre.push(legendre_coeffs(s));
    for m in 1..=s as usize {
        dlegendre.push(differentiate_poly(&dlegendre[m - 1]));
    }

    let cu = uj.cos();
    let su = uj.sin();
    let mut out = Vec::with_capacity(2 * s as usize + 1);
    for m in -(s as i64)..=(s as i64) {
        let ma = m.unsigned_abs() as u32;
        let radial = horner(&dlegendre[ma as usize], &cu);
        let comp = if m == 0 {
            radial
        } else {
            // (s-m)!/(s+m)! = 1 / ((s-m+1) (s-m+2) ... (s+m))
            let mut ratio = 1.0;
            for k in (s - ma + 1)..=(s + ma) {
                ratio /= k as f64;
            }
            let norm = (2.0 * ratio).sqrt();
            let angular = if m > 0 {
                vj.scale(ma as f64).cos()
            } else {
                vj.scale(ma as f64).sin()
            };
            (su.powi(ma) * radial * angular).scale(norm)
        };
        out.push(comp);
    }
    debug_assert_eq!(out.len(), 2 * s as usize + 1);
    let _ = order;
    out
}
