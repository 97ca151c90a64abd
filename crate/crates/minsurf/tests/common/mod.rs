//! Shared oracle helpers for the integration tests: central finite
//! differences with Richardson extrapolation, and Gauss-Legendre quadrature.
//! These are test-side oracles only; the library itself never differentiates
//! numerically.

#![allow(dead_code)]

/// Steps per **total** derivative order `i + j`, balancing truncation
/// against roundoff for second-order central stencils sharpened once by
/// Richardson. Composed mixed-partial stencils amplify the inner stencil's
/// cancellation noise by the outer step, so the step must grow with the
/// total order; a single tiny step drowns third and fourth derivatives in
/// noise.
const STEPS: [f64; 5] = [0.0, 1e-4, 2e-3, 5e-3, 1e-2];

fn central(f: &dyn Fn(f64) -> f64, x: f64, order: u32, h: f64) -> f64 {
    match order {
        0 => f(x),
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => panic!("finite differences implemented up to order 4"),
    }
}

/// One Richardson step: eliminates the h² error of the central stencils.
fn richardson(f: &dyn Fn(f64) -> f64, x: f64, order: u32, h: f64) -> f64 {
    if order == 0 {
        return f(x);
    }
    (4.0 * central(f, x, order, h / 2.0) - central(f, x, order, h)) / 3.0
}

/// Central-difference estimate of `∂^{i+j} f / ∂u^i ∂v^j` at `(u, v)`.
pub fn fd_partial<F: Fn(f64, f64) -> f64>(f: F, i: u32, j: u32, u: f64, v: f64) -> f64 {
    let h = STEPS[(i + j) as usize];
    let inner = |uu: f64| richardson(&|vv: f64| f(uu, vv), v, j, h);
    richardson(&inner, u, i, h)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 1..n {
        let mf = m as f64;
        let p2 = ((2.0 * mf + 1.0) * x * p1 - mf * p0) / (mf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn fd_matches_analytic_derivatives_of_a_smooth_function() {
        // f(u, v) = exp(u) sin(v): every raw partial is ±exp(u) sin(v) or
        // ±exp(u) cos(v)
        let f = |u: f64, v: f64| u.exp() * v.sin();
        let (u, v): (f64, f64) = (0.3, 0.8);
        for i in 0..=4u32 {
            for j in 0..=(4 - i) {
                let trig = match j % 4 {
                    0 => v.sin(),
                    1 => v.cos(),
                    2 => -v.sin(),
                    _ => -v.cos(),
                };
                let expect = u.exp() * trig;
                let got = fd_partial(f, i, j, u, v);
                let tol = match i + j {
                    0..=2 => 1e-9,
                    3 => 1e-7,
                    _ => 2e-6,
                };
                assert!(
                    (got - expect).abs() < tol,
                    "({i},{j}): fd {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(12);
        // ∫ x^k over [-1,1] = 2/(k+1) for even k
        for k in [0usize, 2, 4, 8, 16, 22] {
            let got: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            let expect = 2.0 / (k as f64 + 1.0);
            assert!(
                (got - expect).abs() < 1e-13,
                "degree {k}: {got} vs {expect}"
            );
        }
    }
}
