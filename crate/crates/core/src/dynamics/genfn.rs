//! Generating functions of positive twist maps and the maps they induce.
//!
//! A generating function `h(x, x')` encodes the map through `y = -d1 h` and
//! `y' = d2 h`; the twist condition is `d1 d2 h < 0`.

use std::sync::Arc;

use super::{fr, DynError};
use crate::Real;

pub trait GeneratingFn<F: Real>: Send + Sync {
    fn h(&self, x: F, xp: F) -> F;
    fn d1(&self, x: F, xp: F) -> F;
    fn d2(&self, x: F, xp: F) -> F;
    /// Mixed second derivative; negative on the working domain.
    fn d12(&self, x: F, xp: F) -> F {
        let eps = fr::<F>(1e-6);
        (self.d1(x, xp + eps) - self.d1(x, xp - eps)) / (fr::<F>(2.0) * eps)
    }
}

/// Generating function of a linear rotation by `theta`:
/// `h = cot(theta)/2 (x^2 + x'^2) - csc(theta) x x'`.
#[derive(Clone, Debug)]
pub struct RotationGf<F> {
    cot: F,
    csc: F,
}

pub fn rotation_gf<F: Real>(theta: f64) -> Result<RotationGf<F>, DynError> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(DynError::BadAngle(theta));
    }
    Ok(RotationGf { cot: fr(1.0 / theta.tan()), csc: fr(1.0 / theta.sin()) })
}

impl<F: Real> GeneratingFn<F> for RotationGf<F> {
    fn h(&self, x: F, xp: F) -> F {
        fr::<F>(0.5) * self.cot * (x * x + xp * xp) - self.csc * x * xp
    }
    fn d1(&self, x: F, xp: F) -> F {
        self.cot * x - self.csc * xp
    }
    fn d2(&self, x: F, xp: F) -> F {
        -self.csc * x + self.cot * xp
    }
    fn d12(&self, _x: F, _xp: F) -> F {
        -self.csc
    }
}

/// The two zone layouts used by the modified rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ZoneKind {
    /// Rigid rotation on `|x| <= 1`, fixed points at `+-2`, period-2 points
    /// at `+-4`.
    Psi,
    /// Rigid rotation on `|x| <= 1`, both `+-2` and `+-4` of period two.
    Upsilon,
}

/// `h = xi(x) - csc(theta) x x' + xi(x')` with a piecewise-quadratic `xi`
/// blended smoothly between zones; the cross term alone carries the twist.
#[derive(Clone, Debug)]
pub struct ZonedGf<F> {
    csc: F,
    cot: F,
    kind: ZoneKind,
}

/// Modified rotation by `2 pi / ell` whose plane extension fixes `(+-2, 0)`
/// and exchanges `(+-4, 0)`.
pub fn psi_rotation<F: Real>(ell: usize) -> Result<ZonedGf<F>, DynError> {
    if ell < 3 {
        return Err(DynError::BadOrder(ell));
    }
    let theta = 2.0 * std::f64::consts::PI / ell as f64;
    Ok(ZonedGf { csc: fr(1.0 / theta.sin()), cot: fr(1.0 / theta.tan()), kind: ZoneKind::Psi })
}

/// Modified rotation by `2 pi / ell` exchanging both `(+-2, 0)` and
/// `(+-4, 0)`.
pub fn upsilon_rotation<F: Real>(ell: usize) -> Result<ZonedGf<F>, DynError> {
    if ell < 3 {
        return Err(DynError::BadOrder(ell));
    }
    let theta = 2.0 * std::f64::consts::PI / ell as f64;
    Ok(ZonedGf { csc: fr(1.0 / theta.sin()), cot: fr(1.0 / theta.tan()), kind: ZoneKind::Upsilon })
}

/// Quintic smoothstep and its derivative.
fn smoothstep<F: Real>(s: F) -> (F, F) {
    let c10: F = fr(10.0);
    let c15: F = fr(15.0);
    let c6: F = fr(6.0);
    let c30: F = fr(30.0);
    let c60: F = fr(60.0);
    let w = s * s * s * (c10 - c15 * s + c6 * s * s);
    let dw = s * s * (c30 - c60 * s + c30 * s * s);
    (w, dw)
}

impl<F: Real> ZonedGf<F> {
    /// Zone coefficients: `xi = a/2 x^2` on plateaus.
    fn plateaus(&self) -> Vec<(f64, f64, F)> {
        match self.kind {
            ZoneKind::Psi => vec![
                (0.0, 1.0, self.cot),
                (1.5, 2.5, self.csc),
                (3.5, 4.5, -self.csc),
            ],
            ZoneKind::Upsilon => vec![(0.0, 1.0, self.cot), (1.5, 4.5, -self.csc)],
        }
    }

    /// `(xi(|x|), d xi / d|x|)`.
    fn xi_abs(&self, r: F) -> (F, F) {
        let half = fr::<F>(0.5);
        let plateaus = self.plateaus();
        for (k, &(lo, hi, a)) in plateaus.iter().enumerate() {
            let lo = fr::<F>(lo);
            let hi = fr::<F>(hi);
            if r <= hi || k + 1 == plateaus.len() {
                if r >= lo {
                    return (half * a * r * r, a * r);
                }
                // Blend zone between the previous plateau and this one.
                let (_, prev_hi, b) = plateaus[k - 1];
                let prev_hi = fr::<F>(prev_hi);
                let s = (r - prev_hi) / (lo - prev_hi);
                let (w, dw) = smoothstep(s);
                let one = F::one();
                let val = half * (b + w * (a - b)) * r * r;
                let der = (b + w * (a - b)) * r + half * dw / (lo - prev_hi) * (a - b) * r * r;
                let _ = one;
                return (val, der);
            }
        }
        unreachable!("plateau list covers the line")
    }

    fn xi(&self, x: F) -> (F, F) {
        let (v, d) = self.xi_abs(x.abs());
        (v, if x < F::zero() { -d } else { d })
    }
}

impl<F: Real> GeneratingFn<F> for ZonedGf<F> {
    fn h(&self, x: F, xp: F) -> F {
        self.xi(x).0 - self.csc * x * xp + self.xi(xp).0
    }
    fn d1(&self, x: F, xp: F) -> F {
        self.xi(x).1 - self.csc * xp
    }
    fn d2(&self, x: F, xp: F) -> F {
        -self.csc * x + self.xi(xp).1
    }
    fn d12(&self, _x: F, _xp: F) -> F {
        -self.csc
    }
}

/// The forward twist map induced by a generating function: solve
/// `y = -d1 h(x, x')` for `x'` (strictly increasing in `x'`), then
/// `y' = d2 h(x, x')`.
pub struct GfMap<F: Real> {
    pub gf: Arc<dyn GeneratingFn<F>>,
}

impl<F: Real> GfMap<F> {
    pub fn new(gf: Arc<dyn GeneratingFn<F>>) -> Self {
        Self { gf }
    }

    pub fn forward(&self, x: F, y: F) -> Result<(F, F), DynError> {
        // Newton on xp with the analytic twist derivative, bisection backup.
        let g = |xp: F| -self.gf.d1(x, xp) - y;
        let mut xp = x;
        for _ in 0..50 {
            let val = g(xp);
            let slope = -self.gf.d12(x, xp);
            if slope <= F::zero() {
                break;
            }
            let step = val / slope;
            xp = xp - step;
            if step.abs() < fr::<F>(1e-14) * (F::one() + xp.abs()) {
                return Ok((xp, self.gf.d2(x, xp)));
            }
        }
        let xp = solve_increasing(g, x, fr(1.0))?;
        Ok((xp, self.gf.d2(x, xp)))
    }
}

/// Safeguarded Newton with an expanding bracket for a strictly increasing
/// scalar function.
pub(crate) fn solve_increasing<F: Real>(
    g: impl Fn(F) -> F,
    start: F,
    scale: F,
) -> Result<F, DynError> {
    // Expand a bracket around the start.
    let mut lo = start - scale;
    let mut hi = start + scale;
    let mut width = scale;
    for _ in 0..200 {
        if g(lo) <= F::zero() {
            break;
        }
        width = width * fr(2.0);
        lo = lo - width;
    }
    for _ in 0..200 {
        if g(hi) >= F::zero() {
            break;
        }
        width = width * fr(2.0);
        hi = hi + width;
    }
    let (mut glo, mut ghi) = (g(lo), g(hi));
    if glo > F::zero() || ghi < F::zero() {
        return Err(DynError::RootFind(format!(
            "no bracket: g({lo:?}) = {glo:?}, g({hi:?}) = {ghi:?}"
        )));
    }
    // Illinois regula falsi.
    let tol = fr::<F>(1e-14) * (F::one() + hi.abs() + lo.abs());
    let mut side = 0i8;
    for _ in 0..120 {
        if hi - lo < tol || glo == F::zero() || ghi == F::zero() {
            break;
        }
        let mid = if (ghi - glo).abs() > F::zero() {
            let sec = lo - glo * (hi - lo) / (ghi - glo);
            if sec > lo + tol * fr(0.01) && sec < hi - tol * fr(0.01) {
                sec
            } else {
                (lo + hi) * fr(0.5)
            }
        } else {
            (lo + hi) * fr(0.5)
        };
        let gm = g(mid);
        if gm.abs() < fr(1e-300) {
            return Ok(mid);
        }
        if gm < F::zero() {
            lo = mid;
            glo = gm;
            if side == -1 {
                ghi = ghi * fr(0.5);
            }
            side = -1;
        } else {
            hi = mid;
            ghi = gm;
            if side == 1 {
                glo = glo * fr(0.5);
            }
            side = 1;
        }
    }
    if glo == F::zero() {
        return Ok(lo);
    }
    if ghi == F::zero() {
        return Ok(hi);
    }
    Ok((lo + hi) * fr(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quarter_rotation_is_xy() {
        let gf = rotation_gf::<f64>(PI / 2.0).unwrap();
        assert_eq!(gf.h(2.0, 3.0), -6.0);
        let map = GfMap::new(Arc::new(gf));
        for (x, y) in [(0.3, -0.4), (1.0, 0.0), (-0.7, 0.2)] {
            let (xp, yp) = map.forward(x, y).unwrap();
            assert!((xp - y).abs() < 1e-12 && (yp + x).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_map_matches_trigonometry() {
        let theta = PI / 3.0;
        let gf = rotation_gf::<f64>(theta).unwrap();
        let map = GfMap::new(Arc::new(gf));
        let (x, y) = (0.5, -0.25);
        let (xp, yp) = map.forward(x, y).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        assert!((xp - (c * x + s * y)).abs() < 1e-12);
        assert!((yp - (-s * x + c * y)).abs() < 1e-12);
    }

    #[test]
    fn psi_markers() {
        let gf = psi_rotation::<f64>(4).unwrap();
        let map = GfMap::new(Arc::new(gf));
        // Fixed points at (+-2, 0).
        for x in [2.0, -2.0] {
            let (xp, yp) = map.forward(x, 0.0).unwrap();
            assert!((xp - x).abs() < 1e-10 && yp.abs() < 1e-10, "{x}: {xp} {yp}");
        }
        // Period-2 points at (+-4, 0).
        let (xp, yp) = map.forward(4.0, 0.0).unwrap();
        assert!((xp + 4.0).abs() < 1e-10 && yp.abs() < 1e-10);
        let (xp2, yp2) = map.forward(xp, yp).unwrap();
        assert!((xp2 - 4.0).abs() < 1e-10 && yp2.abs() < 1e-10);
        // Rigid rotation on the disc.
        let (x, y) = (0.4, 0.3);
        let (xp, yp) = map.forward(x, y).unwrap();
        assert!((xp - y).abs() < 1e-10 && (yp + x).abs() < 1e-10);
    }

    #[test]
    fn upsilon_markers() {
        let gf = upsilon_rotation::<f64>(4).unwrap();
        let map = GfMap::new(Arc::new(gf));
        for x in [2.0, 4.0] {
            let (xp, yp) = map.forward(x, 0.0).unwrap();
            assert!((xp + x).abs() < 1e-10 && yp.abs() < 1e-10, "{x}: {xp} {yp}");
            let (x2, y2) = map.forward(xp, yp).unwrap();
            assert!((x2 - x).abs() < 1e-10 && y2.abs() < 1e-10);
        }
    }

    #[test]
    fn zoned_xi_is_smooth_enough() {
        let gf = psi_rotation::<f64>(5).unwrap();
        // finite-difference of h in x matches d1 across the blend regions
        for &x in &[0.9, 1.2, 1.4, 2.0, 2.7, 3.1, 3.9, 5.0, -1.3] {
            let xp = 0.37;
            let eps = 1e-6;
            let fd = (gf.h(x + eps, xp) - gf.h(x - eps, xp)) / (2.0 * eps);
            assert!((fd - gf.d1(x, xp)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn generic_scalar_instantiates() {
        let gf = rotation_gf::<f32>(PI / 2.0).unwrap();
        let map = GfMap::new(Arc::new(gf));
        let (xp, yp) = map.forward(0.25f32, 0.5).unwrap();
        assert!((xp - 0.5).abs() < 1e-4 && (yp + 0.25).abs() < 1e-4);
    }
}
