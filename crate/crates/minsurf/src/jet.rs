//! Truncated bivariate Taylor (jet) arithmetic.
//!
//! A [`Jet2`] carries the value and all raw partial derivatives
//! `∂^{i+j} f / ∂u^i ∂v^j` of a scalar function of two chart variables at a
//! base point, for every multi-index with `i + j <= order <= 4`. Arithmetic
//! propagates derivatives exactly through the truncation order, so every
//! derivative the curvature formulas consume is analytic; finite differences
//! appear only in test oracles.
//!
//! Coefficients store *raw* partials, not Taylor-normalized ones. The
//! binomial weights of the Leibniz rule are applied inside multiplication:
//! `∂^{(a,b)}(fg) = Σ C(a,i) C(b,j) ∂^{(i,j)}f ∂^{(a-i,b-j)}g`.
//!
//! Values are immutable after construction and all operations are pure, so
//! jets can be shared and evaluated concurrently without synchronization.

use crate::error::{Error, Result};

/// Largest supported truncation order. Second covariant derivatives of the
/// second fundamental form consume four chart derivatives of the immersion,
/// which is exactly order 4.
pub const MAX_ORDER: usize = 4;

/// Dense triangular coefficient count at `MAX_ORDER`.
const CAP: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

/// Binomial coefficients C(n, k) for n, k <= MAX_ORDER.
const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

const FACTORIAL: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Number of coefficients of a jet of the given order.
#[inline]
pub fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Storage slot of the multi-index `(i, j)`: indices are grouped by total
/// degree `d = i + j` and ordered by `j` within a degree.
#[inline]
fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Iterate all multi-indices `(i, j)` with `i + j <= order` in slot order.
pub fn multi_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

/// The two chart variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

/// Truncated Taylor expansion of a scalar function of `(u, v)`.
///
/// `coeff(i, j)` is the raw partial `∂^{i+j} f / ∂u^i ∂v^j` at the base
/// point; `coeff(0, 0)` is the function value. Slots above the active order
/// are kept at zero so equality and debug output stay meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    order: u8,
    c: [f64; CAP],
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Config(format!(
            "jet order {order} out of range 0..={MAX_ORDER}"
        )));
    }
    Ok(())
}

impl Jet2 {
    /// Constant jet: value with all derivatives zero.
    pub fn constant(value: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut c = [0.0; CAP];
        c[0] = value;
        Ok(Self {
            order: order as u8,
            c,
        })
    }

    /// Coordinate jet: the seeded first partial is 1, everything else 0.
    pub fn variable(var: Var, value: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut c = [0.0; CAP];
        c[0] = value;
        if order >= 1 {
            match var {
                Var::U => c[slot(1, 0)] = 1.0,
                Var::V => c[slot(0, 1)] = 1.0,
            }
        }
        Ok(Self {
            order: order as u8,
            c,
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// The function value, `coeff(0, 0)`.
    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Raw partial `∂^{i+j} f / ∂u^i ∂v^j`. Zero outside the active order.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j <= self.order() {
            self.c[slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c[..coeff_count(self.order())]
            .iter()
            .all(|x| x.is_finite())
    }

    /// Drop coefficients above `order`. Raising the order is not allowed;
    /// the dropped information cannot be recovered.
    pub fn truncate(&self, order: usize) -> Self {
        debug_assert!(order <= self.order());
        let mut c = [0.0; CAP];
        c[..coeff_count(order)].copy_from_slice(&self.c[..coeff_count(order)]);
        Self {
            order: order as u8,
            c,
        }
    }

    /// Partial derivative as a jet of one order less. With raw-partial
    /// storage this is a pure index shift.
    pub fn derivative(&self, var: Var) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let order = self.order() - 1;
        let mut c = [0.0; CAP];
        for (i, j) in multi_indices(order) {
            c[slot(i, j)] = match var {
                Var::U => self.c[slot(i + 1, j)],
                Var::V => self.c[slot(i, j + 1)],
            };
        }
        Self {
            order: order as u8,
            c,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        for x in out.c[..coeff_count(self.order())].iter_mut() {
            *x *= factor;
        }
        out
    }

    fn require_same_order(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.order != rhs.order {
            return Err(Error::Usage(format!(
                "jet order mismatch in {op}: {} vs {}",
                self.order, rhs.order
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.require_same_order(rhs, "add")?;
        let mut out = *self;
        for k in 0..coeff_count(self.order()) {
            out.c[k] += rhs.c[k];
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.require_same_order(rhs, "sub")?;
        let mut out = *self;
        for k in 0..coeff_count(self.order()) {
            out.c[k] -= rhs.c[k];
        }
        Ok(out)
    }

    /// Leibniz product, exact through the truncation order.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.require_same_order(rhs, "mul")?;
        let order = self.order();
        let mut c = [0.0; CAP];
        for (a, b) in multi_indices(order) {
            let mut acc = 0.0;
            for i in 0..=a {
                for j in 0..=b {
                    acc +=
                        BINOM[a][i] * BINOM[b][j] * self.c[slot(i, j)] * rhs.c[slot(a - i, b - j)];
                }
            }
            c[slot(a, b)] = acc;
        }
        Ok(Self {
            order: order as u8,
            c,
        })
    }

    /// Quotient, solving the Leibniz relation degree by degree.
    ///
    /// Writing `q = self / rhs`, the product rule gives, for each target
    /// index `(a, b)`,
    /// `self(a,b) = Σ C(a,i) C(b,j) q(i,j) rhs(a-i,b-j)`,
    /// in which `q(a,b)` appears exactly once with weight `rhs(0,0)`.
    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.require_same_order(rhs, "div")?;
        if rhs.value() == 0.0 {
            return Err(Error::Singularity(
                "division by a jet with zero value".into(),
            ));
        }
        let order = self.order();
        let inv = 1.0 / rhs.value();
        let mut q = [0.0; CAP];
        for (a, b) in multi_indices(order) {
            let mut acc = self.c[slot(a, b)];
            for i in 0..=a {
                for j in 0..=b {
                    if i == a && j == b {
                        continue;
                    }
                    acc -= BINOM[a][i] * BINOM[b][j] * q[slot(i, j)] * rhs.c[slot(a - i, b - j)];
                }
            }
            q[slot(a, b)] = acc * inv;
        }
        Ok(Self {
            order: order as u8,
            c: q,
        })
    }

    /// Compose with a univariate function given its derivatives
    /// `derivs[k] = f^{(k)}(value)` for `k = 0..=order`.
    ///
    /// Splits the jet as `a = a0 + ā` with `ā` the derivative part; then
    /// `f(a) = Σ_k f^{(k)}(a0)/k! · ā^k` terminates at `k = order` because
    /// `ā^k` has no coefficients below total degree `k`. Evaluated by
    /// Horner's rule in `ā`.
    fn compose(&self, derivs: &[f64]) -> Self {
        let order = self.order();
        debug_assert_eq!(derivs.len(), order + 1);
        let mut bar = *self;
        bar.c[0] = 0.0;
        let mut acc = Self::constant(derivs[order] / FACTORIAL[order], order)
            .expect("order already validated");
        for k in (0..order).rev() {
            acc = acc.try_mul(&bar).expect("orders equal");
            acc.c[0] += derivs[k] / FACTORIAL[k];
        }
        acc
    }

    /// Sine with exact chain rule through the truncation order.
    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c, s];
        self.compose(&cycle[..=self.order()])
    }

    /// Cosine with exact chain rule through the truncation order.
    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s, c];
        self.compose(&cycle[..=self.order()])
    }

    /// Exponential with exact chain rule through the truncation order.
    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.order() + 1])
    }

    /// Square root; requires a strictly positive value.
    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(Error::Singularity(format!(
                "sqrt of nonpositive jet value {a0}"
            )));
        }
        // f^{(k)} = (1/2)(1/2 - 1)...(1/2 - k + 1) a0^{1/2 - k}
        let mut derivs = vec![0.0; self.order() + 1];
        let mut val = a0.sqrt();
        let mut factor = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            if k > 0 {
                factor *= 0.5 - (k as f64 - 1.0);
                val /= a0;
            }
            *d = factor * val;
        }
        Ok(self.compose(&derivs))
    }

    /// Nonnegative integer power via the chain rule.
    pub fn powi(&self, n: u32) -> Self {
        let a0 = self.value();
        let mut derivs = vec![0.0; self.order() + 1];
        for (k, d) in derivs.iter_mut().enumerate() {
            if k as u32 > n {
                break;
            }
            // n (n-1) ... (n-k+1) a0^{n-k}
            let mut falling = 1.0;
            for step in 0..k {
                falling *= (n - step as u32) as f64;
            }
            *d = falling * a0.powi((n - k as u32) as i32);
        }
        self.compose(&derivs)
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.try_add(&rhs).expect("jet order mismatch in +")
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.try_sub(&rhs).expect("jet order mismatch in -")
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.try_mul(&rhs).expect("jet order mismatch in *")
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_u(value: f64, order: usize) -> Jet2 {
        Jet2::variable(Var::U, value, order).unwrap()
    }

    fn jet_v(value: f64, order: usize) -> Jet2 {
        Jet2::variable(Var::V, value, order).unwrap()
    }

    #[test]
    fn seed_u_order2() {
        let j = jet_u(2.0, 2);
        assert_eq!(j.coeff(0, 0), 2.0);
        assert_eq!(j.coeff(1, 0), 1.0);
        for (i, k) in multi_indices(2) {
            if (i, k) != (0, 0) && (i, k) != (1, 0) {
                assert_eq!(j.coeff(i, k), 0.0);
            }
        }
    }

    #[test]
    fn seed_v_order0_is_constant() {
        let j = jet_v(0.0, 0);
        assert_eq!(j.order(), 0);
        assert_eq!(j.coeff(0, 0), 0.0);
    }

    #[test]
    fn coordinate_has_no_second_derivative() {
        let j = jet_u(1.5, 4);
        assert_eq!(j.coeff(2, 0), 0.0);
    }

    #[test]
    fn order_out_of_range_is_config_error() {
        assert!(matches!(
            Jet2::variable(Var::U, 0.0, 5),
            Err(Error::Config(_))
        ));
        assert!(matches!(Jet2::constant(0.0, 9), Err(Error::Config(_))));
    }

    #[test]
    fn square_of_coordinate() {
        let u = jet_u(3.0, 2);
        let sq = u * u;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.coeff(1, 0), 6.0);
        assert_eq!(sq.coeff(2, 0), 2.0);
    }

    #[test]
    fn add_zero_is_identity() {
        let a = jet_u(1.25, 3).sin();
        let z = Jet2::constant(0.0, 3).unwrap();
        assert_eq!(a + z, a);
    }

    #[test]
    fn order_mismatch_is_usage_error() {
        let a = jet_u(1.0, 2);
        let b = jet_u(1.0, 3);
        assert!(matches!(a.try_add(&b), Err(Error::Usage(_))));
        assert!(matches!(a.try_mul(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn division_by_zero_value_is_singularity() {
        let one = Jet2::constant(1.0, 2).unwrap();
        let z = jet_u(0.0, 2);
        assert!(matches!(one.try_div(&z), Err(Error::Singularity(_))));
    }

    #[test]
    fn sqrt_of_nonpositive_is_singularity() {
        let z = Jet2::constant(-4.0, 2).unwrap();
        assert!(matches!(z.sqrt(), Err(Error::Singularity(_))));
    }

    #[test]
    fn reciprocal_of_u_matches_analytic_partials() {
        // 1/u at u = 2: f = 0.5, f' = -1/4, f'' = 1/4, f''' = -3/8.
        let one = Jet2::constant(1.0, 3).unwrap();
        let q = one.try_div(&jet_u(2.0, 3)).unwrap();
        assert!((q.value() - 0.5).abs() < 1e-15);
        assert!((q.coeff(1, 0) + 0.25).abs() < 1e-15);
        assert!((q.coeff(2, 0) - 0.25).abs() < 1e-15);
        assert!((q.coeff(3, 0) + 0.375).abs() < 1e-15);
    }

    #[test]
    fn sine_of_coordinate_at_zero() {
        let s = jet_u(0.0, 3).sin();
        assert!((s.value() - 0.0).abs() < 1e-15);
        assert!((s.coeff(1, 0) - 1.0).abs() < 1e-15);
        assert!((s.coeff(2, 0) - 0.0).abs() < 1e-15);
        assert!((s.coeff(3, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_of_constant_four() {
        let r = Jet2::constant(4.0, 4).unwrap().sqrt().unwrap();
        assert_eq!(r.value(), 2.0);
        for (i, j) in multi_indices(4) {
            if (i, j) != (0, 0) {
                assert_eq!(r.coeff(i, j), 0.0);
            }
        }
    }

    #[test]
    fn sin_squared_plus_cos_squared_is_one() {
        let a = (jet_u(0.7, 4) * jet_v(0.4, 4)).exp();
        let pyth = a.sin() * a.sin() + a.cos() * a.cos();
        for (i, j) in multi_indices(4) {
            let expect = if (i, j) == (0, 0) { 1.0 } else { 0.0 };
            assert!(
                (pyth.coeff(i, j) - expect).abs() < 1e-10,
                "coeff ({i},{j}) = {}",
                pyth.coeff(i, j)
            );
        }
    }

    #[test]
    fn powi_handles_zero_base() {
        let p = jet_u(0.0, 3).powi(2);
        assert_eq!(p.value(), 0.0);
        assert_eq!(p.coeff(1, 0), 0.0);
        assert_eq!(p.coeff(2, 0), 2.0);
        assert_eq!(p.coeff(3, 0), 0.0);
    }

    #[test]
    fn derivative_shifts_raw_partials() {
        let f = (jet_u(0.3, 4) * jet_v(1.1, 4)).sin();
        let fu = f.derivative(Var::U);
        for (i, j) in multi_indices(3) {
            assert_eq!(fu.coeff(i, j), f.coeff(i + 1, j));
        }
    }
}
