//! Catalog-level properties: the unit-sphere jet identity at scale, the
//! congruence comparison between the hand-written Veronese chart and the
//! degree-2 harmonic immersion, and chart regularity bounds.

mod common;

use common::gauss_legendre;
use minsurf::catalog::{build_calabi, catalog_list, ImmersionSpec, MAX_CALABI_DEGREE};
use minsurf::geometry::build_frames;
use minsurf::grid::sample_points;
use minsurf::jet::multi_indices;

fn full_catalog() -> Vec<ImmersionSpec> {
    let mut specs = catalog_list();
    for s in 1..=MAX_CALABI_DEGREE {
        specs.push(build_calabi(s).unwrap());
    }
    specs
}

#[test]
fn unit_sphere_identity_at_200_random_points_per_surface() {
    for spec in full_catalog() {
        let pts = sample_points(spec.valid_rect(), 200, 0xC0FFEE);
        for (u, v) in pts {
            let jets = spec.evaluate(u, v, 3).unwrap();
            let mut nsq = minsurf::jet::Jet2::constant(0.0, 3).unwrap();
            for j in &jets {
                nsq = nsq + *j * *j;
            }
            for (i, j) in multi_indices(3) {
                let expect = if (i, j) == (0, 0) { 1.0 } else { 0.0 };
                assert!(
                    (nsq.coeff(i, j) - expect).abs() < 1e-10,
                    "{} at ({u}, {v}) coeff ({i},{j})",
                    spec.name
                );
            }
        }
    }
}

/// Component-function Gram matrix over the round measure, via quadrature
/// that is exact for these trigonometric-polynomial integrands.
fn gram_matrix(spec: &ImmersionSpec) -> Vec<Vec<f64>> {
    let dim = spec.ambient_n + 1;
    let (nodes, weights) = gauss_legendre(12);
    let m = 16usize;
    let mut gram = vec![vec![0.0; dim]; dim];
    for (x, w) in nodes.iter().zip(&weights) {
        let u = x.acos();
        for kv in 0..m {
            let v = std::f64::consts::TAU * (kv as f64 + 0.5) / m as f64;
            let jets = spec.evaluate(u, v, 0).unwrap();
            let values: Vec<f64> = jets.iter().map(|j| j.value()).collect();
            // weight of the normalized round measure sin(u) du dv / (4π),
            // with sin(u) du already absorbed by the x = cos(u) substitution
            let scale = w / (2.0 * m as f64);
            for a in 0..dim {
                for b in 0..dim {
                    gram[a][b] += scale * values[a] * values[b];
                }
            }
        }
    }
    gram
}

#[test]
fn veronese_chart_is_congruent_to_the_degree_2_harmonic_immersion() {
    let veronese = catalog_list()
        .into_iter()
        .find(|s| s.name == "veronese")
        .unwrap();
    let calabi2 = build_calabi(2).unwrap();
    let g1 = gram_matrix(&veronese);
    let g2 = gram_matrix(&calabi2);
    // both charts have orthogonal components of equal L² norm, so the Gram
    // matrices agree (with each other, and with I/5)
    for a in 0..5 {
        for b in 0..5 {
            assert!(
                (g1[a][b] - g2[a][b]).abs() < 1e-8,
                "Gram mismatch at ({a},{b}): {} vs {}",
                g1[a][b],
                g2[a][b]
            );
            let expect = if a == b { 0.2 } else { 0.0 };
            assert!((g1[a][b] - expect).abs() < 1e-8);
        }
    }
}

#[test]
fn induced_metric_determinant_stays_above_documented_bound() {
    for spec in full_catalog() {
        let pts = sample_points(spec.valid_rect(), 64, 0xBEEF);
        for (u, v) in pts {
            let jets = spec.evaluate(u, v, 2).unwrap();
            let frame = build_frames(&jets).unwrap();
            assert!(
                frame.metric_det >= spec.min_metric_det,
                "{}: det {} < documented {} at ({u}, {v})",
                spec.name,
                frame.metric_det,
                spec.min_metric_det
            );
        }
    }
}

#[test]
fn calabi_degree_cap_is_enforced() {
    assert!(build_calabi(MAX_CALABI_DEGREE).is_ok());
    assert!(build_calabi(MAX_CALABI_DEGREE + 1).is_err());
}
