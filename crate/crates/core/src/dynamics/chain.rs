//! Chained twist systems: periodic sequences of positive twist maps with
//! rotation padding, their generating data, and the induced recurrence
//! relations.

use std::sync::Arc;

use super::genfn::{psi_rotation, solve_increasing, upsilon_rotation, GeneratingFn, GfMap};
use super::moser::gauss_legendre;
use super::{fr, DynError};
use crate::Real;

/// An area-preserving map of the plane given pointwise.
pub trait PlaneMap<F: Real>: Send + Sync {
    fn forward(&self, x: F, y: F) -> (F, F);
    fn label(&self) -> String {
        "map".into()
    }
}

/// Rigid rotation of a disc about `center`, tapered to the identity between
/// radii `r1 < r2` by a quintic profile.
#[derive(Clone, Debug)]
pub struct LocalRotation<F> {
    pub center: (F, F),
    pub r1: F,
    pub r2: F,
    pub angle: F,
}

impl<F: Real> PlaneMap<F> for LocalRotation<F> {
    fn forward(&self, x: F, y: F) -> (F, F) {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let r = (dx * dx + dy * dy).sqrt();
        let theta = if r <= self.r1 {
            self.angle
        } else if r >= self.r2 {
            F::zero()
        } else {
            let s = (r - self.r1) / (self.r2 - self.r1);
            let w = s * s * s * (fr::<F>(10.0) - fr::<F>(15.0) * s + fr::<F>(6.0) * s * s);
            self.angle * (F::one() - w)
        };
        let (sin, cos) = theta.sin_cos();
        (self.center.0 + cos * dx - sin * dy, self.center.1 + sin * dx + cos * dy)
    }
    fn label(&self) -> String {
        "local rotation".into()
    }
}

/// Composition of plane maps, applied left to right.
pub struct Composed<F: Real> {
    pub maps: Vec<Arc<dyn PlaneMap<F>>>,
}

impl<F: Real> PlaneMap<F> for Composed<F> {
    fn forward(&self, x: F, y: F) -> (F, F) {
        let mut z = (x, y);
        for m in &self.maps {
            z = m.forward(z.0, z.1);
        }
        z
    }
    fn label(&self) -> String {
        "composition".into()
    }
}

impl<F: Real> PlaneMap<F> for GfMap<F> {
    fn forward(&self, x: F, y: F) -> (F, F) {
        GfMap::forward(self, x, y).expect("twist map evaluation")
    }
    fn label(&self) -> String {
        "generating-function map".into()
    }
}

/// One factor of a chained system: either a closed-form generating function
/// or a plane map whose generating data is recovered by root finding.
#[derive(Clone)]
pub enum Step<F: Real> {
    Closed(Arc<dyn GeneratingFn<F>>),
    Derived(Arc<dyn PlaneMap<F>>),
}

impl<F: Real> Step<F> {
    pub fn forward(&self, x: F, y: F) -> Result<(F, F), DynError> {
        match self {
            Step::Closed(gf) => GfMap { gf: gf.clone() }.forward(x, y),
            Step::Derived(map) => Ok(map.forward(x, y)),
        }
    }

    /// `y` on the segment from `x` to `xp`: `y = -d1 h(x, xp)`, i.e. the
    /// momentum the map sends through `x -> xp`.
    pub fn y_out(&self, x: F, xp: F) -> Result<F, DynError> {
        match self {
            Step::Closed(gf) => Ok(-gf.d1(x, xp)),
            Step::Derived(map) => {
                // Solve f(x, y) = xp for y; increasing by the twist property.
                let g = |y: F| map.forward(x, y).0 - xp;
                solve_increasing(g, F::zero(), F::one())
            }
        }
    }

    /// `y' = d2 h(x, xp)`: the image momentum at `xp`.
    pub fn y_in(&self, x: F, xp: F) -> Result<F, DynError> {
        match self {
            Step::Closed(gf) => Ok(gf.d2(x, xp)),
            Step::Derived(map) => {
                let y = self.y_out(x, xp)?;
                Ok(map.forward(x, y).1)
            }
        }
    }

    /// Generating-function value, by line quadrature for derived maps.
    pub fn h(&self, x: F, xp: F) -> Result<F, DynError> {
        match self {
            Step::Closed(gf) => Ok(gf.h(x, xp)),
            Step::Derived(_) => {
                // h(x, xp) = h(0, 0) + int_0^1 [d1 h * x + d2 h * xp] (sx, s xp) ds
                let tol = fr::<F>(1e-10);
                let integrand = |s: F| -> F {
                    let (a, b) = (s * x, s * xp);
                    let d1 = -self.y_out(a, b).unwrap_or_else(|_| F::zero());
                    let d2 = self.y_in(a, b).unwrap_or_else(|_| F::zero());
                    d1 * x + d2 * xp
                };
                Ok(gauss_legendre(&integrand, F::zero(), F::one(), tol))
            }
        }
    }

    /// Mixed second derivative of the generating function.
    pub fn d12(&self, x: F, xp: F) -> Result<F, DynError> {
        match self {
            Step::Closed(gf) => Ok(gf.d12(x, xp)),
            Step::Derived(_) => {
                let eps = fr::<F>(1e-5);
                let hi = self.y_out(x, xp + eps)?;
                let lo = self.y_out(x, xp - eps)?;
                // d1 = -y_out, so d12 = -(d y_out / d xp)
                Ok(-(hi - lo) / (fr::<F>(2.0) * eps))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Step::Closed(_) => "generating function".into(),
            Step::Derived(m) => m.label(),
        }
    }

    /// Sampled twist bound `df/dy` over a grid.
    pub fn twist_minimum(&self, half_width: F, grid: usize) -> Result<F, DynError> {
        let mut min: Option<F> = None;
        let eps = fr::<F>(1e-5);
        for i in 0..=grid {
            for j in 0..=grid {
                let x = -half_width
                    + fr::<F>(2.0) * half_width * fr::<F>(i as f64) / fr::<F>(grid as f64);
                let y = -half_width
                    + fr::<F>(2.0) * half_width * fr::<F>(j as f64) / fr::<F>(grid as f64);
                let up = self.forward(x, y + eps)?.0;
                let dn = self.forward(x, y - eps)?.0;
                let slope = (up - dn) / (fr::<F>(2.0) * eps);
                if min.map_or(true, |m| slope < m) {
                    min = Some(slope);
                }
            }
        }
        Ok(min.expect("grid is nonempty"))
    }
}

/// Parameters of the chained decomposition.
#[derive(Clone, Debug)]
pub struct ChainParams {
    /// Rotation order of the factor carrying each near-identity map.
    pub ell: usize,
    /// The padding rotations turn by `2 pi / (kappa ell)`.
    pub kappa: usize,
    /// Extra identity-on-the-disc rotation blocks.
    pub r: usize,
    pub ell_r: usize,
    /// Extra sign-exchanging rotation blocks.
    pub rho: usize,
    pub ell_rho: usize,
    /// Grid half-width and resolution for the twist check.
    pub twist_box: f64,
    pub twist_grid: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self { ell: 4, kappa: 1, r: 0, ell_r: 4, rho: 0, ell_rho: 4, twist_box: 5.0, twist_grid: 14 }
    }
}

/// A periodic sequence of positive twist maps.
pub struct ChainedIsotopy<F: Real> {
    pub steps: Vec<Step<F>>,
    pub params: ChainParams,
}

/// Chain near-identity maps with rotation padding: each `G_i` rides on a
/// `2 pi / ell` rotation followed by `kappa (ell - 1)` faster rotations, so
/// the block is the identity on the disc; extra blocks prepend `r` full
/// rotations and `rho` sign-exchanging rotations.
pub fn build_chained_isotopy<F: Real>(
    gs: Vec<Arc<dyn PlaneMap<F>>>,
    params: ChainParams,
) -> Result<ChainedIsotopy<F>, DynError> {
    if params.ell < 3 || params.kappa < 1 {
        return Err(DynError::BadOrder(params.ell.min(params.kappa * 3)));
    }
    let psi: Arc<dyn GeneratingFn<F>> = Arc::new(psi_rotation::<F>(params.ell)?);
    let psi_fast: Arc<dyn GeneratingFn<F>> = if params.kappa == 1 {
        psi.clone()
    } else {
        Arc::new(psi_rotation::<F>(params.kappa * params.ell)?)
    };
    let mut steps: Vec<Step<F>> = Vec::new();
    for _ in 0..params.rho {
        let ups: Arc<dyn GeneratingFn<F>> = Arc::new(upsilon_rotation::<F>(params.ell_rho)?);
        for _ in 0..params.ell_rho {
            steps.push(Step::Closed(ups.clone()));
        }
    }
    for _ in 0..params.r {
        let rot: Arc<dyn GeneratingFn<F>> = Arc::new(psi_rotation::<F>(params.ell_r)?);
        for _ in 0..params.ell_r {
            steps.push(Step::Closed(rot.clone()));
        }
    }
    for g in gs {
        for _ in 0..params.kappa * (params.ell - 1) {
            steps.push(Step::Closed(psi_fast.clone()));
        }
        let ride = Composed {
            maps: vec![Arc::new(GfMap { gf: psi.clone() }) as Arc<dyn PlaneMap<F>>, g],
        };
        steps.push(Step::Derived(Arc::new(ride)));
    }
    let chain = ChainedIsotopy { steps, params };
    chain.check_twist()?;
    Ok(chain)
}

impl<F: Real> ChainedIsotopy<F> {
    pub fn period(&self) -> usize {
        self.steps.len()
    }

    fn check_twist(&self) -> Result<(), DynError> {
        for (j, step) in self.steps.iter().enumerate() {
            if matches!(step, Step::Closed(_)) {
                continue; // twist is structural for generating functions
            }
            let min = step.twist_minimum(fr(self.params.twist_box), self.params.twist_grid)?;
            if min <= F::zero() {
                return Err(DynError::TwistViolation(
                    format!("step {} ({})", j + 1, step.label()),
                    min.to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
        Ok(())
    }

    /// Largest deviation of the structural markers: fixed points `(+-2, 0)`
    /// and period-two points `(+-4, 0)` of every factor.
    pub fn marker_deviation(&self) -> Result<F, DynError> {
        let mut worst = F::zero();
        for step in &self.steps {
            for x in [fr::<F>(2.0), fr(-2.0)] {
                let (xp, yp) = step.forward(x, F::zero())?;
                worst = worst.max((xp - x).abs()).max(yp.abs());
            }
            for x in [fr::<F>(4.0), fr(-4.0)] {
                let (xp, yp) = step.forward(x, F::zero())?;
                worst = worst.max((xp + x).abs()).max(yp.abs());
            }
        }
        Ok(worst)
    }

    /// Trace a finite set through the whole period.
    pub fn trace(&self, points: &[(F, F)]) -> Result<TracedSet<F>, DynError> {
        let mut orbits: Vec<Vec<(F, F)>> = points.iter().map(|&z| vec![z]).collect();
        for step in &self.steps {
            for orbit in orbits.iter_mut() {
                let &(x, y) = orbit.last().unwrap();
                orbit.push(step.forward(x, y)?);
            }
        }
        // Closure permutation: endpoint must coincide with some start point.
        let mut perm = vec![usize::MAX; points.len()];
        for (i, orbit) in orbits.iter().enumerate() {
            let end = *orbit.last().unwrap();
            let mut best = (F::infinity(), usize::MAX);
            for (k, &start) in points.iter().enumerate() {
                let d = (end.0 - start.0).abs().max((end.1 - start.1).abs());
                if d < best.0 {
                    best = (d, k);
                }
            }
            if best.0 > fr(1e-6) {
                return Err(DynError::Verification(format!(
                    "traced set is not invariant: point {} returns {:?} away",
                    i + 1,
                    best.0.to_f64()
                )));
            }
            perm[i] = best.1;
        }
        Ok(TracedSet { orbits, perm })
    }
}

/// Orbits of an invariant set over one period, with the return permutation.
pub struct TracedSet<F> {
    pub orbits: Vec<Vec<(F, F)>>,
    pub perm: Vec<usize>,
}

impl<F: Real> TracedSet<F> {
    /// The x-projections as an exact discretized braid.  Anchors within
    /// numerical dust of one another are snapped together slice-wise (a
    /// transversal coincidence, not a near-tangency), and the endpoints are
    /// snapped onto the starts of their image strands.
    pub fn braid(&self) -> crate::braid::DiscretizedBraid {
        let snap = 1e-9f64;
        let m = self.orbits.len();
        let d = self.orbits[0].len() - 1;
        let mut vals: Vec<Vec<f64>> = self
            .orbits
            .iter()
            .map(|o| o.iter().map(|&(x, _)| x.to_f64().expect("finite coordinate")).collect())
            .collect();
        for j in 0..d {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| vals[a][j].partial_cmp(&vals[b][j]).unwrap());
            for w in 1..m {
                let (prev, here) = (order[w - 1], order[w]);
                if (vals[here][j] - vals[prev][j]).abs() < snap {
                    vals[here][j] = vals[prev][j];
                }
            }
        }
        for mu in 0..m {
            vals[mu][d] = vals[self.perm[mu]][0];
        }
        let strands: Vec<Vec<crate::Rat>> = vals
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| crate::Rat::from_float(x).expect("finite coordinate"))
                    .collect()
            })
            .collect();
        crate::braid::DiscretizedBraid::new(strands, self.perm.clone())
            .expect("traced orbits close up")
    }
}

/// The recurrence relations induced by a chained system.
pub struct RecurrenceSystem<F: Real> {
    steps: Arc<Vec<Step<F>>>,
}

impl<F: Real> RecurrenceSystem<F> {
    pub fn new(chain: &ChainedIsotopy<F>) -> Self {
        Self { steps: Arc::new(chain.steps.clone()) }
    }

    pub fn from_steps(steps: Vec<Step<F>>) -> Self {
        Self { steps: Arc::new(steps) }
    }

    pub fn period(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, j: usize) -> &Step<F> {
        &self.steps[j % self.steps.len()]
    }

    /// `R_j(a, b, c)`: the momentum mismatch at the middle anchor, vanishing
    /// exactly on orbit segments.
    pub fn r(&self, j: usize, a: F, b: F, c: F) -> Result<F, DynError> {
        let d = self.steps.len();
        let prev = self.step((j + d - 1) % d);
        let here = self.step(j);
        Ok(here.y_out(b, c)? - prev.y_in(a, b)?)
    }

    /// Residual vector of a periodic strand.
    pub fn residual(&self, xs: &[F]) -> Result<Vec<F>, DynError> {
        let d = xs.len();
        let mut out = Vec::with_capacity(d);
        for j in 0..d {
            out.push(self.r(j, xs[(j + d - 1) % d], xs[j], xs[(j + 1) % d])?);
        }
        Ok(out)
    }

    pub fn residual_norm(&self, xs: &[F]) -> Result<F, DynError> {
        Ok(self
            .residual(xs)?
            .into_iter()
            .fold(F::zero(), |acc, v| acc.max(v.abs())))
    }

    /// The discrete action of one periodic strand.
    pub fn action(&self, xs: &[F]) -> Result<F, DynError> {
        let d = xs.len();
        let mut sum = F::zero();
        for j in 0..d {
            sum = sum + self.step(j).h(xs[j], xs[(j + 1) % d])?;
        }
        Ok(sum)
    }

    /// Action of a whole braid: sum over strands, following the closure
    /// permutation through each cycle.
    pub fn braid_action(&self, strands: &[Vec<F>]) -> Result<F, DynError> {
        let mut sum = F::zero();
        for s in strands {
            sum = sum + self.action(s)?;
        }
        Ok(sum)
    }

    /// Sampled parabolicity: minimum of `dR/da` and `dR/dc` over a grid.
    pub fn parabolicity_minimum(&self, half_width: F, grid: usize) -> Result<F, DynError> {
        let eps = fr::<F>(1e-5);
        let mut min: Option<F> = None;
        let d = self.steps.len();
        let to = |i: usize| -> F {
            -half_width + fr::<F>(2.0) * half_width * fr::<F>(i as f64) / fr::<F>(grid as f64)
        };
        for j in 0..d {
            for ia in 0..=grid {
                for ib in 0..=grid {
                    for ic in 0..=grid {
                        let (a, b, c) = (to(ia), to(ib), to(ic));
                        let da = (self.r(j, a + eps, b, c)? - self.r(j, a - eps, b, c)?)
                            / (fr::<F>(2.0) * eps);
                        let dc = (self.r(j, a, b, c + eps)? - self.r(j, a, b, c - eps)?)
                            / (fr::<F>(2.0) * eps);
                        let local = da.min(dc);
                        if min.map_or(true, |m| local < m) {
                            min = Some(local);
                        }
                    }
                }
            }
        }
        Ok(min.expect("grid is nonempty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::genfn::rotation_gf;
    use std::f64::consts::PI;

    fn quarter_steps(d: usize) -> RecurrenceSystem<f64> {
        let gf: Arc<dyn GeneratingFn<f64>> = Arc::new(rotation_gf(PI / 2.0).unwrap());
        RecurrenceSystem::from_steps((0..d).map(|_| Step::Closed(gf.clone())).collect())
    }

    #[test]
    fn quarter_rotation_recurrence_is_a_plus_c() {
        let rs = quarter_steps(4);
        for (a, b, c) in [(0.3, -0.2, 0.7), (1.0, 2.0, -1.0)] {
            assert!((rs.r(1, a, b, c).unwrap() - (a + c)).abs() < 1e-12);
        }
        // The 4-periodic strand (1, 0, -1, 0) is stationary.
        let xs = [1.0, 0.0, -1.0, 0.0];
        assert!(rs.residual_norm(&xs).unwrap() < 1e-12);
        assert!(rs.action(&xs).unwrap().abs() < 1e-12);
    }

    #[test]
    fn action_gradient_is_minus_r() {
        let rs = quarter_steps(4);
        let xs = [0.4, -0.1, 0.3, 0.2];
        let eps = 1e-6;
        for j in 0..4 {
            let mut hi = xs;
            hi[j] += eps;
            let mut lo = xs;
            lo[j] -= eps;
            let grad = (rs.action(&hi).unwrap() - rs.action(&lo).unwrap()) / (2.0 * eps);
            let r = rs.residual(&xs).unwrap()[j];
            assert!((grad + r).abs() < 1e-6, "slot {j}: grad {grad} vs -R {}", -r);
        }
    }

    #[test]
    fn chained_identity_block() {
        // One trivial near-identity map: the block is the identity on the
        // disc and every factor keeps the structural markers.
        let id: Arc<dyn PlaneMap<f64>> = Arc::new(LocalRotation {
            center: (0.0, 0.0),
            r1: 0.1,
            r2: 0.2,
            angle: 0.0,
        });
        let chain = build_chained_isotopy(vec![id], ChainParams::default()).unwrap();
        assert_eq!(chain.period(), 4);
        assert!(chain.marker_deviation().unwrap() < 1e-9);
        let mut z = (0.37, -0.21);
        for step in &chain.steps {
            z = step.forward(z.0, z.1).unwrap();
        }
        assert!((z.0 - 0.37).abs() < 1e-9 && (z.1 + 0.21).abs() < 1e-9);
    }

    #[test]
    fn traced_rotation_orbit_is_a_braid() {
        let id: Arc<dyn PlaneMap<f64>> = Arc::new(LocalRotation {
            center: (0.0, 0.0),
            r1: 0.1,
            r2: 0.2,
            angle: 0.0,
        });
        let chain = build_chained_isotopy(vec![id], ChainParams::default()).unwrap();
        let pts = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)];
        let traced = chain.trace(&pts).unwrap();
        // One block is a full clockwise turn: every point returns home.
        assert_eq!(traced.perm, vec![0, 1, 2, 3]);
        let braid = traced.braid();
        assert!(braid.validate().is_ok());
        // Four points under a full rotation wind once around each other.
        assert_eq!(braid.word_metric(), 12);
    }

    #[test]
    fn derived_step_generating_data() {
        // A derived step wrapping the quarter rotation reproduces the
        // closed-form partials.
        let gf: Arc<dyn GeneratingFn<f64>> = Arc::new(rotation_gf(PI / 2.0).unwrap());
        let closed = Step::Closed(gf.clone());
        let derived = Step::Derived(Arc::new(GfMap { gf }) as Arc<dyn PlaneMap<f64>>);
        for (x, xp) in [(0.2, 0.5), (-0.4, 0.1)] {
            assert!((closed.y_out(x, xp).unwrap() - derived.y_out(x, xp).unwrap()).abs() < 1e-9);
            assert!((closed.y_in(x, xp).unwrap() - derived.y_in(x, xp).unwrap()).abs() < 1e-9);
            assert!((closed.d12(x, xp).unwrap() - derived.d12(x, xp).unwrap()).abs() < 1e-4);
            assert!((closed.h(x, xp).unwrap() - derived.h(x, xp).unwrap()).abs() < 1e-8);
        }
    }
}
