//! The gradient-like recurrence flow on free strands, stationary-point
//! search, orbit lifting, and braiding verification of found orbits.

use super::chain::{RecurrenceSystem, Step};
use super::{fr, DynError};
use crate::Real;

#[derive(Clone, Debug)]
pub struct FlowOptions {
    /// Convergence threshold on the sup norm of the residual.
    pub tolerance: f64,
    /// Initial flow step.
    pub dt: f64,
    /// Maximum flow time.
    pub max_time: f64,
    /// Pairwise sup-distance below which two solutions are identified.
    pub dedup: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, dt: 0.05, max_time: 2_000.0, dedup: 1e-6 }
    }
}

/// A stationary free strand.
#[derive(Clone, Debug)]
pub struct Solution<F> {
    pub strand: Vec<F>,
    pub residual: F,
}

#[derive(Clone, Debug)]
pub enum FlowOutcome<F> {
    Converged(Solution<F>),
    /// The trajectory left the braid class through its exit set.
    Escaped { at_time: f64 },
    /// The flow stalled without reaching the tolerance.
    Stalled { residual: F },
}

/// Crossing-count signature of a free strand against the fixed strands.
fn signature<F: Real>(free: &[F], fixed: &[Vec<F>]) -> Vec<usize> {
    let d = free.len();
    let mut sig = Vec::with_capacity(fixed.len());
    for other in fixed {
        let mut count = 0;
        let sgn = |j: usize| -> i8 {
            let diff = free[j % d] - other[j % other.len().max(1)];
            if diff > F::zero() {
                1
            } else if diff < F::zero() {
                -1
            } else {
                0
            }
        };
        for j in 0..d {
            let a = sgn(j);
            let b = sgn(j + 1);
            if a == 0 {
                count += 1;
            } else if b != 0 && b != a {
                count += 1;
            }
        }
        sig.push(count);
    }
    sig
}

/// Integrate one free strand under the recurrence flow inside its braid
/// class; the fixed strands are given as `d`-periodic anchor sequences.
pub fn flow_strand<F: Real>(
    rs: &RecurrenceSystem<F>,
    fixed: &[Vec<F>],
    start: Vec<F>,
    opts: &FlowOptions,
) -> Result<FlowOutcome<F>, DynError> {
    let mut xs = start;
    let mut t = 0.0f64;
    let mut dt = opts.dt;
    let tol = fr::<F>(opts.tolerance);
    let home = signature(&xs, fixed);
    // A guarded Newton attempt first: stationary strands of saddle type
    // repel the flow, but the polish keeps the braid class honest.
    if let Ok(sol) = polish(rs, fixed, xs.clone(), opts) {
        return Ok(FlowOutcome::Converged(sol));
    }
    while t < opts.max_time {
        let res = rs.residual(&xs)?;
        let norm = res.iter().fold(F::zero(), |a, v| a.max(v.abs()));
        if norm < tol {
            return polish(rs, fixed, xs, opts).map(FlowOutcome::Converged);
        }
        // Try to polish early once the flow is clearly settling.
        if norm < fr(1e-4) {
            if let Ok(sol) = polish(rs, fixed, xs.clone(), opts) {
                return Ok(FlowOutcome::Converged(sol));
            }
        }
        // Explicit Euler proposal with class guard.
        let mut accepted = false;
        while dt > 1e-12 {
            let cand: Vec<F> =
                xs.iter().zip(&res).map(|(&x, &r)| x + fr::<F>(dt) * r).collect();
            if signature(&cand, fixed) == home {
                xs = cand;
                t += dt;
                accepted = true;
                if dt < opts.dt {
                    dt *= 2.0;
                }
                break;
            }
            dt *= 0.5;
        }
        if !accepted {
            // The trajectory is pressed against the class boundary.
            return Ok(FlowOutcome::Escaped { at_time: t });
        }
    }
    let res = rs.residual_norm(&xs)?;
    Ok(FlowOutcome::Stalled { residual: res })
}

/// Newton polish of a near-stationary strand, with a finite-difference
/// Jacobian.
fn polish<F: Real>(
    rs: &RecurrenceSystem<F>,
    fixed: &[Vec<F>],
    mut xs: Vec<F>,
    opts: &FlowOptions,
) -> Result<Solution<F>, DynError> {
    let d = xs.len();
    let home = signature(&xs, fixed);
    let eps = fr::<F>(1e-7);
    for _ in 0..60 {
        let res = rs.residual(&xs)?;
        let norm = res.iter().fold(F::zero(), |a, v| a.max(v.abs()));
        if norm < fr(1e-13) {
            break;
        }
        let mut jac = vec![vec![F::zero(); d]; d];
        for k in 0..d {
            let mut hi = xs.clone();
            hi[k] = hi[k] + eps;
            let rhi = rs.residual(&hi)?;
            let mut lo = xs.clone();
            lo[k] = lo[k] - eps;
            let rlo = rs.residual(&lo)?;
            for j in 0..d {
                jac[j][k] = (rhi[j] - rlo[j]) / (fr::<F>(2.0) * eps);
            }
        }
        let delta = match solve_dense(&mut jac.clone(), &res) {
            Some(delta) => delta,
            None => {
                // Degenerate critical manifold: damped least-squares step.
                let mut normal = vec![vec![F::zero(); d]; d];
                let mut rhs = vec![F::zero(); d];
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            normal[i][j] = normal[i][j] + jac[k][i] * jac[k][j];
                        }
                    }
                    for k in 0..d {
                        rhs[i] = rhs[i] + jac[k][i] * res[k];
                    }
                    normal[i][i] = normal[i][i] + fr(1e-9);
                }
                solve_dense(&mut normal, &rhs)
                    .ok_or_else(|| DynError::RootFind("singular polish Jacobian".into()))?
            }
        };
        for k in 0..d {
            xs[k] = xs[k] - delta[k];
        }
    }
    if signature(&xs, fixed) != home {
        return Err(DynError::Verification("polish left the braid class".into()));
    }
    let residual = rs.residual_norm(&xs)?;
    if residual > fr(opts.tolerance) {
        return Err(DynError::NonConvergence(residual.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(Solution { strand: xs, residual })
}

/// Gaussian elimination with partial pivoting.
fn solve_dense<F: Real>(a: &mut [Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = b.len();
    let mut x: Vec<F> = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < fr(1e-14) {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
            let v = x[col];
            x[row] = x[row] - f * v;
        }
    }
    for col in (0..n).rev() {
        let mut sum = x[col];
        for k in (col + 1)..n {
            sum = sum - a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    Some(x)
}

/// Flow a family of seeds and collect the distinct stationary strands found,
/// sorted lexicographically.
pub fn find_stationary<F: Real>(
    rs: &RecurrenceSystem<F>,
    fixed: &[Vec<F>],
    seeds: &[Vec<F>],
    opts: &FlowOptions,
) -> Result<(Vec<Solution<F>>, Vec<FlowOutcome<F>>), DynError> {
    let mut found: Vec<Solution<F>> = Vec::new();
    let mut diagnostics = Vec::new();
    for seed in seeds {
        let outcome = flow_strand(rs, fixed, seed.clone(), opts)?;
        if let FlowOutcome::Converged(sol) = &outcome {
            let dup = found.iter().any(|other| {
                sol.strand
                    .iter()
                    .zip(&other.strand)
                    .fold(F::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
                    < fr(opts.dedup)
            });
            if !dup {
                found.push(sol.clone());
            }
        }
        diagnostics.push(outcome);
    }
    found.sort_by(|a, b| {
        a.strand
            .partial_cmp(&b.strand)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok((found, diagnostics))
}

/// Lift a stationary strand to a plane orbit via the generating relations
/// and verify it against the step maps.
pub fn lift_orbit<F: Real>(
    rs: &RecurrenceSystem<F>,
    xs: &[F],
    tolerance: f64,
) -> Result<Vec<(F, F)>, DynError> {
    let d = xs.len();
    let mut orbit = Vec::with_capacity(d);
    for j in 0..d {
        let prev = (j + d - 1) % d;
        let y = rs.step(prev).y_in(xs[prev], xs[j])?;
        orbit.push((xs[j], y));
    }
    let mut worst = F::zero();
    for j in 0..d {
        let (x, y) = orbit[j];
        let (xn, yn) = rs.step(j).forward(x, y)?;
        let (ex, ey) = orbit[(j + 1) % d];
        worst = worst.max((xn - ex).abs()).max((yn - ey).abs());
    }
    if worst > fr(tolerance) {
        return Err(DynError::Verification(format!(
            "lifted orbit deviates by {:?} from the step maps",
            worst.to_f64()
        )));
    }
    Ok(orbit)
}

/// Verification report for a family of plane orbits.
#[derive(Clone, Debug, Default)]
pub struct OrbitChecks {
    pub transversal: bool,
    pub crossings_positive: bool,
    pub links: Vec<((usize, usize), usize, usize)>,
    pub all_inside_disc: bool,
    pub violations: Vec<String>,
}

impl OrbitChecks {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the braiding of plane orbits of one system: transversal
/// x-projections, positivity of every crossing (larger slope carries larger
/// momentum through the crossing), linking numbers equal to half the
/// intersection counts, and containment in the open unit disc.
pub fn verify_orbit_braiding<F: Real>(
    rs: &RecurrenceSystem<F>,
    orbits: &[Vec<(F, F)>],
    require_disc: bool,
) -> OrbitChecks {
    let mut checks = OrbitChecks {
        transversal: true,
        crossings_positive: true,
        all_inside_disc: true,
        ..Default::default()
    };
    let d = rs.period();
    for (i, orbit) in orbits.iter().enumerate() {
        if orbit.len() % d != 0 {
            checks.violations.push(format!("orbit {} has period {} not a multiple of {}", i + 1, orbit.len(), d));
        }
        if require_disc {
            for (j, &(x, y)) in orbit.iter().enumerate() {
                if (x * x + y * y).sqrt() >= F::one() {
                    checks.all_inside_disc = false;
                    checks
                        .violations
                        .push(format!("orbit {} leaves the unit disc at slice {}", i + 1, j));
                }
            }
        }
    }
    for i in 0..orbits.len() {
        for k in (i + 1)..orbits.len() {
            let (crossings, positive, transversal) = pair_crossings(rs, &orbits[i], &orbits[k]);
            if !transversal {
                checks.transversal = false;
                checks
                    .violations
                    .push(format!("orbits {} and {} have a tangency", i + 1, k + 1));
            }
            if crossings % 2 != 0 {
                checks
                    .violations
                    .push(format!("orbits {} and {} cross an odd number of times", i + 1, k + 1));
            }
            if !positive {
                checks.crossings_positive = false;
                checks
                    .violations
                    .push(format!("orbits {} and {} have a negative crossing", i + 1, k + 1));
            }
            checks.links.push(((i, k), crossings, crossings / 2));
        }
    }
    checks
}

/// Count crossings of two orbits' x-projections over their common period and
/// test positivity of each crossing through the momentum difference.
fn pair_crossings<F: Real>(
    rs: &RecurrenceSystem<F>,
    a: &[(F, F)],
    b: &[(F, F)],
) -> (usize, bool, bool) {
    let d = rs.period();
    let n = lcm(a.len(), b.len()).max(d);
    let mut crossings = 0;
    let mut positive = true;
    let mut transversal = true;
    let ax = |j: usize| a[j % a.len()].0;
    let bx = |j: usize| b[j % b.len()].0;
    for j in 0..n {
        let (a0, a1) = (ax(j), ax(j + 1));
        let (b0, b1) = (bx(j), bx(j + 1));
        let s0 = a0 - b0;
        let s1 = a1 - b1;
        if s0 == F::zero() {
            // Anchor coincidence: transversality against the neighbours.
            let prev = ax((j + n - 1) % n) - bx((j + n - 1) % n);
            if prev * s1 >= F::zero() {
                transversal = false;
            }
            crossings += 1;
            // Positivity at the anchor: outgoing slopes order the momenta.
            let pa = a1 - a0;
            let pb = b1 - b0;
            if !crossing_is_positive(rs.step(j % d), F::zero(), a0, pa, pb) {
                positive = false;
            }
        } else if s1 != F::zero() && s0 * s1 < F::zero() {
            crossings += 1;
            let frac = s0 / (s0 - s1);
            let xstar = a0 + frac * (a1 - a0);
            let pa = a1 - a0;
            let pb = b1 - b0;
            if !crossing_is_positive(rs.step(j % d), frac, xstar, pa, pb) {
                positive = false;
            }
        }
    }
    (crossings, positive, transversal)
}

/// At an interior crossing the momentum difference equals
/// `-int_{p_b}^{p_a} d12 h(x* - p s, x* + p (1 - s)) dp`, which shares the
/// sign of `p_a - p_b` exactly when the twist holds along the chord.  A
/// single quadrature panel settles the sign.
fn crossing_is_positive<F: Real>(step: &Step<F>, s: F, xstar: F, pa: F, pb: F) -> bool {
    if pa == pb {
        return true;
    }
    let half = (pa - pb) * fr(0.5);
    let mid = (pa + pb) * fr(0.5);
    let nodes = [-0.861136311594053, -0.339981043584856, 0.339981043584856, 0.861136311594053];
    let weights = [0.347854845137454, 0.652145154862546, 0.652145154862546, 0.347854845137454];
    let mut dy = F::zero();
    for k in 0..4 {
        let p = mid + half * fr(nodes[k]);
        let v = step.d12(xstar - p * s, xstar + p * (F::one() - s)).unwrap_or_else(|_| F::zero());
        dy = dy - fr::<F>(weights[k]) * v;
    }
    dy = dy * half;
    dy * (pa - pb) > F::zero()
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::chain::Step;
    use crate::dynamics::genfn::{rotation_gf, GeneratingFn};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn quarter_system(d: usize) -> RecurrenceSystem<f64> {
        let gf: Arc<dyn GeneratingFn<f64>> = Arc::new(rotation_gf(PI / 2.0).unwrap());
        RecurrenceSystem::from_steps((0..d).map(|_| Step::Closed(gf.clone())).collect())
    }

    #[test]
    fn flow_finds_the_rotation_orbit() {
        // Skeleton: the stationary strands (1,0,-1,0) rotated, pinning a
        // free strand near the origin.
        let rs = quarter_system(4);
        let fixed = vec![
            vec![1.0, 0.0, -1.0, 0.0],
            vec![0.0, -1.0, 0.0, 1.0],
            vec![-1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
        ];
        for f in &fixed {
            assert!(rs.residual_norm(f).unwrap() < 1e-12);
        }
        let seed = vec![0.05, -0.04, 0.02, 0.03];
        let (found, _) = find_stationary(&rs, &fixed, &[seed], &FlowOptions::default()).unwrap();
        // The quarter rotation is integrable: the seed settles onto the
        // nearby point of the stationary family inside the class.
        assert_eq!(found.len(), 1);
        assert!(found[0].residual < 1e-9);
        for &v in &found[0].strand {
            assert!(v.abs() < 0.1);
        }
        let orbit = lift_orbit(&rs, &found[0].strand, 1e-8).unwrap();
        assert_eq!(orbit.len(), 4);
    }

    #[test]
    fn lift_reproduces_rotation() {
        let rs = quarter_system(4);
        let xs = [1.0, 0.0, -1.0, 0.0];
        let orbit = lift_orbit(&rs, &xs, 1e-9).unwrap();
        // (1,0) -> (0,-1) -> (-1,0) -> (0,1) under (x, y) -> (y, -x)
        let expect = [(1.0, 0.0), (0.0, -1.0), (-1.0, 0.0), (0.0, 1.0)];
        for (got, want) in orbit.iter().zip(expect.iter()) {
            assert!((got.0 - want.0).abs() < 1e-9 && (got.1 - want.1).abs() < 1e-9);
        }
    }

    #[test]
    fn braiding_checks_on_rotation_orbits() {
        let rs = quarter_system(4);
        let a = lift_orbit(&rs, &[1.0, 0.0, -1.0, 0.0], 1e-9).unwrap();
        let b = lift_orbit(&rs, &[0.5, 0.0, -0.5, 0.0], 1e-9).unwrap();
        let checks = verify_orbit_braiding(&rs, &[a, b], false);
        assert!(checks.ok(), "{:?}", checks.violations);
        assert_eq!(checks.links[0].1, 2);
        assert_eq!(checks.links[0].2, 1);
    }
}
