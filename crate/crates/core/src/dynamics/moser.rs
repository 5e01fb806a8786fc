//! Hamiltonian interpolation of a positive twist map from its generating
//! function.  Orbits of the interpolation project to straight lines in the
//! `(t, x)` plane; the time map is recovered exactly at `t = 1`.

use std::sync::Arc;

use super::genfn::{solve_increasing, GeneratingFn};
use super::{fr, DynError};
use crate::Real;

/// 10-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GL_NODES: [f64; 10] = [
    -0.973906528517172,
    -0.865063366688985,
    -0.679409568299024,
    -0.433395394129247,
    -0.148874338981631,
    0.148874338981631,
    0.433395394129247,
    0.679409568299024,
    0.865063366688985,
    0.973906528517172,
];
const GL_WEIGHTS: [f64; 10] = [
    0.066671344308688,
    0.149451349150581,
    0.219086362515982,
    0.269266719309996,
    0.295524224714753,
    0.295524224714753,
    0.269266719309996,
    0.219086362515982,
    0.149451349150581,
    0.066671344308688,
];

/// Adaptive Gauss-Legendre quadrature to absolute tolerance `tol`.
pub fn gauss_legendre<F: Real>(f: &impl Fn(F) -> F, a: F, b: F, tol: F) -> F {
    fn panel<F: Real>(f: &impl Fn(F) -> F, a: F, b: F) -> F {
        let half = (b - a) * fr(0.5);
        let mid = (a + b) * fr(0.5);
        let mut sum = F::zero();
        for k in 0..10 {
            sum = sum + fr::<F>(GL_WEIGHTS[k]) * f(mid + half * fr(GL_NODES[k]));
        }
        sum * half
    }
    fn refine<F: Real>(f: &impl Fn(F) -> F, a: F, b: F, whole: F, tol: F, depth: u32) -> F {
        let mid = (a + b) * fr(0.5);
        let left = panel(f, a, mid);
        let right = panel(f, mid, b);
        if (left + right - whole).abs() <= tol || depth >= 24 {
            return left + right;
        }
        let half_tol = tol * fr(0.5);
        refine(f, a, mid, left, half_tol, depth + 1) + refine(f, mid, b, right, half_tol, depth + 1)
    }
    let whole = panel(f, a, b);
    refine(f, a, b, whole, tol, 0)
}

/// The interpolation flow of one twist map.
pub struct MoserFlow<F: Real> {
    gf: Arc<dyn GeneratingFn<F>>,
    quad_tol: F,
}

impl<F: Real> MoserFlow<F> {
    pub fn new(gf: Arc<dyn GeneratingFn<F>>) -> Self {
        Self { gf, quad_tol: fr(1e-10) }
    }

    /// Initial slope of the extremal through `(x, y)`: the `p` with
    /// `y = -d1 h(x, x + p)`.
    pub fn lambda(&self, x: F, y: F) -> Result<F, DynError> {
        let g = |p: F| -self.gf.d1(x, x + p) - y;
        solve_increasing(g, F::zero(), F::one())
    }

    /// Momentum observable `dL/dp` along the family of affine extremals.
    ///
    /// The corrector terms come from the closed forms
    /// `u'(x) = -d1 h(x, x)` and `v'(x) = -d2 h(x, x)`.
    pub fn dp_lagrangian(&self, t: F, x: F, p: F) -> F {
        let integrand = |pp: F| self.gf.d12(x - pp * t, x + pp * (F::one() - t));
        let integral = gauss_legendre(&integrand, F::zero(), p, self.quad_tol);
        let m_x = -(F::one() - t) * self.gf.d1(x, x) + t * self.gf.d2(x, x);
        -integral + m_x
    }

    /// The isotopy at time `t` in `[0, 1]`; `psi(1, .)` equals the twist map
    /// of the generating function and `psi(0, .)` the identity.
    pub fn psi(&self, t: F, x: F, y: F) -> Result<(F, F), DynError> {
        let lam = self.lambda(x, y)?;
        let xt = x + lam * t;
        let yt = self.dp_lagrangian(t, xt, lam);
        Ok((xt, yt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::genfn::{psi_rotation, rotation_gf, GfMap};
    use std::f64::consts::PI;

    #[test]
    fn quadrature_is_accurate() {
        let v = gauss_legendre(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let v = gauss_legendre(&|x: f64| (50.0 * x).sin(), 0.0, 2.0, 1e-11);
        let exact = (1.0 - (100.0f64).cos()) / 50.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn interpolation_of_the_quarter_rotation() {
        let gf = Arc::new(rotation_gf::<f64>(PI / 2.0).unwrap());
        let flow = MoserFlow::new(gf.clone());
        let map = GfMap::new(gf);
        for (x, y) in [(0.2, 0.4), (-0.8, 0.1), (0.9, -0.9)] {
            let (x0, y0) = flow.psi(0.0, x, y).unwrap();
            assert!((x0 - x).abs() < 1e-12 && (y0 - y).abs() < 1e-12);
            let (x1, y1) = flow.psi(1.0, x, y).unwrap();
            let (fx, fy) = map.forward(x, y).unwrap();
            assert!((x1 - fx).abs() < 1e-9 && (y1 - fy).abs() < 1e-9);
            // explicit closed form for the quarter turn
            let lam = flow.lambda(x, y).unwrap();
            assert!((lam - (y - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn x_projection_is_affine() {
        let gf = Arc::new(psi_rotation::<f64>(4).unwrap());
        let flow = MoserFlow::new(gf);
        let (x, y) = (0.3, -0.6);
        let (x0, _) = flow.psi(0.0, x, y).unwrap();
        let (x1, _) = flow.psi(1.0, x, y).unwrap();
        for k in 1..10 {
            let t = k as f64 / 10.0;
            let (xt, _) = flow.psi(t, x, y).unwrap();
            let chord = x0 + t * (x1 - x0);
            assert!((xt - chord).abs() < 1e-12);
        }
    }
}
