//! The forcing pipeline: a skeleton word plus a 2-colored class yield an
//! index certificate and a lower bound on forced periodic orbits; with a
//! realized twist system the stationary strands are located numerically and
//! their braiding is verified.

use std::collections::HashMap;

use thiserror::Error;

use crate::braid::{crossing_matrix, ev};
use crate::colored::{ColoredBraid, ColoredError, Fiber};
use crate::conley::{braid_index_raw, class_index, ConleyError, IndexOptions, IndexReport};
use crate::dynamics::{
    find_stationary, lift_orbit, verify_orbit_braiding, ChainedIsotopy, DynError, FlowOptions,
    OrbitChecks, RecurrenceSystem, Solution,
};
use crate::word::{Color, ColoredWord, PositiveWord, WordError};
use crate::Real;

#[derive(Debug, Error)]
pub enum ForcingError {
    #[error("query is inconsistent: the colored word projects to {got}, not the skeleton word")]
    Inconsistent { got: String },
    #[error("realized skeleton does not match the query modulo full twists: {0}")]
    RealizationMismatch(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Colored(#[from] ColoredError),
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error(transparent)]
    Dynamics(#[from] DynError),
}

/// Which proof route matches the realized skeleton against the query word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// The realized braid matches the query word directly.
    Direct,
    /// The query word carries `lambda` extra full twists; the realization
    /// must be extended by `r = lambda` rotation blocks.
    NeedsTwists { lambda: usize },
    /// The realized braid carries `lambda` extra full twists; the index is
    /// matched through the dual route with `rho = 1`,
    /// `ell_rho = 2 lambda + 2`.
    DualRoute { lambda: usize },
}

/// A realized system: a chained sequence of twist maps with an invariant
/// set tracing the skeleton.
pub struct Realization<F: Real> {
    pub chain: ChainedIsotopy<F>,
    pub invariant_set: Vec<(F, F)>,
}

pub struct ForcingQuery<F: Real> {
    pub skeleton: PositiveWord,
    pub colored: ColoredWord,
    pub realization: Option<Realization<F>>,
}

/// Structured refusal: the query is valid but carries no forcing claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refusal {
    Improper { witness: String },
    Cylindrical { cycle: usize },
    IndexZero,
}

/// A numerically located orbit with its diagnostics.
pub struct FoundOrbit<F> {
    pub strand: Vec<F>,
    pub residual: F,
    pub orbit: Vec<(F, F)>,
    pub inside_disc: bool,
}

pub struct ForcingReport<F> {
    pub flags: crate::colored::ClassFlags,
    pub index: Option<IndexReport>,
    pub lower_bound: usize,
    pub refusal: Option<Refusal>,
    pub case: Option<Case>,
    /// Smallest number of trivial extensions making the class free, when
    /// the search succeeded within its budget.
    pub free_extensions: Option<usize>,
    pub found: Vec<FoundOrbit<F>>,
    pub orbit_checks: Option<OrbitChecks>,
    /// Found orbits reproduce the queried crossing data modulo the
    /// realization's twist surplus.
    pub braid_type_verified: Option<bool>,
}

impl<F: Real> ForcingReport<F> {
    pub fn forced(&self) -> bool {
        self.refusal.is_none() && self.lower_bound > 0
    }
}

/// Compare a realized skeleton braid with the query word modulo full
/// twists, through the pairwise crossing matrix and the closure
/// permutation.
pub fn classify_case<F: Real>(
    realization: &Realization<F>,
    skeleton: &PositiveWord,
) -> Result<Case, ForcingError> {
    let traced = realization.chain.trace(&realization.invariant_set)?;
    let braid = traced.braid();
    let m = braid.strand_count();
    if skeleton.strands() != m {
        return Err(ForcingError::RealizationMismatch(format!(
            "{} invariant points against {} skeleton strands",
            m,
            skeleton.strands()
        )));
    }
    // Match strands by their rank at the initial slice.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| braid.strands()[a][0].cmp(&braid.strands()[b][0]));
    let mut zeta = vec![0usize; m]; // traced index -> query strand (0-based)
    for (rank, &s) in order.iter().enumerate() {
        zeta[s] = rank;
    }
    let query = ev(skeleton, 0);
    for s in 0..m {
        if zeta[braid.permutation()[s]] != query.permutation()[zeta[s]] {
            return Err(ForcingError::RealizationMismatch(
                "closure permutations differ".into(),
            ));
        }
    }
    let mat_real = crossing_matrix(&braid);
    let mat_query = crossing_matrix(&query);
    let mut diff: Option<i64> = None;
    for i in 0..m {
        for j in (i + 1)..m {
            let d = mat_real[i][j] as i64 - mat_query[zeta[i]][zeta[j]] as i64;
            match diff {
                None => diff = Some(d),
                Some(prev) if prev != d => {
                    return Err(ForcingError::RealizationMismatch(format!(
                        "crossing surplus is not uniform: {prev} vs {d} on pair {}-{}",
                        i + 1,
                        j + 1
                    )));
                }
                _ => {}
            }
        }
    }
    let diff = diff.unwrap_or(0);
    if diff % 2 != 0 {
        return Err(ForcingError::RealizationMismatch(format!("odd crossing surplus {diff}")));
    }
    let c = diff / 2;
    Ok(match c.cmp(&0) {
        std::cmp::Ordering::Equal => Case::Direct,
        std::cmp::Ordering::Less => Case::NeedsTwists { lambda: (-c) as usize },
        std::cmp::Ordering::Greater => Case::DualRoute { lambda: c as usize },
    })
}

#[derive(Clone, Debug)]
pub struct ForceOptions {
    pub index: IndexOptions,
    pub flow: FlowOptions,
    /// Upper bound on the search for the free extension count.
    pub max_free_extensions: usize,
}

impl Default for ForceOptions {
    fn default() -> Self {
        Self {
            index: IndexOptions::default(),
            flow: FlowOptions::default(),
            max_free_extensions: 4,
        }
    }
}

/// Run the full pipeline.
pub fn force<F: Real>(
    query: &ForcingQuery<F>,
    opts: &ForceOptions,
) -> Result<ForcingReport<F>, ForcingError> {
    // Consistency: the black projection of the colored word must be
    // positively conjugate to the skeleton word.
    let beta = query.colored.project(Color::Black)?;
    let consistent = if beta.len() <= 16 {
        beta.positively_conjugate(&query.skeleton)?
    } else {
        crate::garside::positively_conjugate_nf(&beta, &query.skeleton, 2_000_000)?
    };
    if !consistent {
        return Err(ForcingError::Inconsistent { got: beta.to_string() });
    }

    // Index and flags.
    let (flags, index, refusal) = match class_index(&query.colored, &opts.index) {
        Ok(report) => {
            let flags = report.flags.clone();
            if !flags.all_acylindrical() {
                let cycle = flags.acylindrical.iter().position(|&b| !b).unwrap_or(0);
                (flags, Some(report), Some(Refusal::Cylindrical { cycle }))
            } else if report.homology.is_zero() {
                (flags, Some(report), Some(Refusal::IndexZero))
            } else {
                (flags, Some(report), None)
            }
        }
        Err(ConleyError::Improper(witness)) => {
            let fiber = Fiber::build(
                &ColoredBraid::from_word(&query.colored, 0)?.augment_star(),
                &opts.index.fiber,
            )?;
            (fiber.flags(), None, Some(Refusal::Improper { witness }))
        }
        Err(e) => return Err(e.into()),
    };

    let lower_bound = match (&refusal, &index) {
        (None, Some(report)) => report.lower_bound(),
        _ => 0,
    };

    // Smallest number of trivial extensions making the class free.
    let free_extensions = if refusal.is_none() {
        let mut result = None;
        for q in 0..=opts.max_free_extensions {
            let cb = ColoredBraid::from_word(&query.colored, 0)?.augment_star().extend(q);
            if let Ok(fiber) = Fiber::build(&cb, &opts.index.fiber) {
                if fiber.is_free() {
                    result = Some(q);
                    break;
                }
            }
        }
        result
    } else {
        None
    };

    let mut report = ForcingReport {
        flags,
        index,
        lower_bound,
        refusal,
        case: None,
        free_extensions,
        found: Vec::new(),
        orbit_checks: None,
        braid_type_verified: None,
    };
    if report.refusal.is_some() {
        return Ok(report);
    }

    if let Some(realization) = &query.realization {
        report.case = Some(classify_case(realization, &query.skeleton)?);
        run_realization(query, realization, opts, &mut report)?;
    }
    Ok(report)
}

fn fr<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("literal fits the scalar")
}

/// Locate stationary free strands of the realized system inside the queried
/// class and verify their braiding.
fn run_realization<F: Real>(
    query: &ForcingQuery<F>,
    realization: &Realization<F>,
    opts: &ForceOptions,
    report: &mut ForcingReport<F>,
) -> Result<(), ForcingError> {
    let chain = &realization.chain;
    let rs = RecurrenceSystem::new(chain);
    let traced = chain.trace(&realization.invariant_set)?;
    let d = chain.period();
    let fixed: Vec<Vec<F>> =
        traced.orbits.iter().map(|o| o.iter().take(d).map(|&(x, _)| x).collect()).collect();

    // Skeleton strands are stationary by construction.
    for f in &fixed {
        let res = rs.residual_norm(f)?;
        if res > fr(1e-7) {
            return Err(ForcingError::RealizationMismatch(format!(
                "skeleton strand has recurrence residual {:?}",
                res.to_f64()
            )));
        }
    }

    // Seeds: constant-gap strands between the slice-wise sorted skeleton
    // levels, plus jittered copies.
    let mut seeds: Vec<Vec<F>> = Vec::new();
    let m = fixed.len();
    let two = F::one() + F::one();
    for g in 0..=m {
        let mut seed = Vec::with_capacity(d);
        for j in 0..d {
            let mut vals: Vec<F> = fixed.iter().map(|f| f[j]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let v = if g == 0 {
                vals[0] - F::one()
            } else if g == m {
                vals[m - 1] + F::one()
            } else {
                (vals[g - 1] + vals[g]) / two
            };
            seed.push(v);
        }
        seeds.push(seed);
    }
    let jitter = fr::<F>(2e-3);
    let base: Vec<Vec<F>> = seeds.clone();
    for (k, s) in base.iter().enumerate() {
        let mut up = s.clone();
        let mut dn = s.clone();
        for (j, v) in up.iter_mut().enumerate() {
            *v = *v + jitter * fr::<F>((((j + k) % 3) as f64) - 1.0);
        }
        for v in dn.iter_mut() {
            *v = *v - jitter;
        }
        seeds.push(up);
        seeds.push(dn);
    }

    let (solutions, _diags) = find_stationary(&rs, &fixed, &seeds, &opts.flow)?;

    // Keep the solutions matching the queried class modulo full twists.
    let expected = expected_red_budgets(query, realization)?;
    let mut kept: Vec<Solution<F>> = Vec::new();
    for sol in solutions {
        if red_budgets(&sol.strand, &fixed, &traced.perm) == expected {
            kept.push(sol);
        }
    }

    let mut orbits = Vec::new();
    for sol in &kept {
        let orbit = lift_orbit(&rs, &sol.strand, 1e-6)?;
        let inside = orbit.iter().all(|&(x, y)| (x * x + y * y).sqrt() < F::one());
        report.found.push(FoundOrbit {
            strand: sol.strand.clone(),
            residual: sol.residual,
            orbit: orbit.clone(),
            inside_disc: inside,
        });
        orbits.push(orbit);
    }
    // Assemble one closed orbit per skeleton closure cycle.
    let mut all: Vec<Vec<(F, F)>> = Vec::new();
    for cyc in crate::word::permutation_cycles(&traced.perm) {
        let mut closed = Vec::with_capacity(cyc.len() * d);
        let mut s = cyc[0];
        loop {
            closed.extend(traced.orbits[s].iter().take(d).copied());
            s = traced.perm[s];
            if s == cyc[0] {
                break;
            }
        }
        all.push(closed);
    }
    all.extend(orbits);
    let checks = verify_orbit_braiding(&rs, &all, false);
    report.braid_type_verified = Some(!report.found.is_empty());
    report.orbit_checks = Some(checks);
    Ok(())
}

/// Crossing counts of a free strand against each skeleton closure cycle.
fn red_budgets<F: Real>(strand: &[F], fixed: &[Vec<F>], perm: &[usize]) -> HashMap<usize, usize> {
    let cycles = crate::word::permutation_cycles(perm);
    let d = strand.len();
    let mut budgets = HashMap::new();
    for cyc in cycles {
        let rep = *cyc.iter().min().unwrap();
        let mut count = 0usize;
        for &s in &cyc {
            let sgn = |j: usize| -> i8 {
                let (jj, ss) = if j >= d { (j - d, perm[s]) } else { (j, s) };
                let diff = strand[jj % d] - fixed[ss][jj % d];
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
                if a == 0 {
                    count += 1;
                } else {
                    let b = sgn(j + 1);
                    if b != 0 && b != a {
                        count += 1;
                    }
                }
            }
        }
        budgets.insert(rep, count);
    }
    budgets
}

/// The red-versus-cycle crossing counts the found orbits must reproduce:
/// the queried colored word's counts plus the twist surplus of the
/// realization.
fn expected_red_budgets<F: Real>(
    query: &ForcingQuery<F>,
    realization: &Realization<F>,
) -> Result<HashMap<usize, usize>, ForcingError> {
    let cb = ColoredBraid::from_word(&query.colored, 0)?;
    let braid = cb.braid();
    let n = cb.red_count();
    if n != 1 {
        return Err(ForcingError::RealizationMismatch(
            "realized searches use a single free strand".into(),
        ));
    }
    let perm_black: Vec<usize> = braid.permutation()[n..].iter().map(|&p| p - n).collect();
    let cycles = crate::word::permutation_cycles(&perm_black);
    let mat = crossing_matrix(braid);
    let case = classify_case(realization, &query.skeleton)?;
    let surplus = match case {
        Case::Direct => 0i64,
        Case::NeedsTwists { lambda } => -(lambda as i64),
        Case::DualRoute { lambda } => lambda as i64,
    };
    let mut budgets = HashMap::new();
    for cyc in cycles {
        let rep = *cyc.iter().min().unwrap();
        let base: usize = cyc.iter().map(|&b| mat[0][n + b]).sum();
        let twist = 2 * surplus * cyc.len() as i64;
        budgets.insert(rep, (base as i64 + twist).max(0) as usize);
    }
    Ok(budgets)
}

/// Suspension identity of the dual route: the saw-augmented class twisted by
/// `lambda + 1` full-twist blocks carries the base index suspended by
/// `2 n (lambda + 1)` degrees.
pub fn check_dual_route_suspension(
    colored: &ColoredWord,
    lambda: usize,
    opts: &IndexOptions,
) -> Result<bool, ForcingError> {
    let base = ColoredBraid::from_word(colored, 0)?.augment_star();
    let base_index = braid_index_raw(&base, opts)?;
    let twisted = base.augment_saw().full_twist_block(lambda + 1);
    let twisted_index = braid_index_raw(&twisted, opts)?;
    let n = colored.red_count();
    Ok(twisted_index.homology == base_index.homology.shifted(2 * n * (lambda + 1)).trimmed())
}

/// Render a forcing report as structured text.
pub fn render_report<F: Real>(query_desc: &str, report: &ForcingReport<F>) -> String {
    let mut out = String::new();
    out.push_str(&format!("query: {query_desc}\n"));
    out.push_str(&format!(
        "flags: proper={} bounded={} free={} acylindrical={:?}\n",
        report.flags.proper, report.flags.bounded, report.flags.free, report.flags.acylindrical
    ));
    match &report.refusal {
        Some(Refusal::Improper { witness }) => {
            out.push_str(&format!("refusal: improper class ({witness})\n"));
        }
        Some(Refusal::Cylindrical { cycle }) => {
            out.push_str(&format!("refusal: cylindrical free component {cycle}\n"));
        }
        Some(Refusal::IndexZero) => out.push_str("refusal: trivial index, no forcing claim\n"),
        None => {}
    }
    if let Some(index) = &report.index {
        out.push_str(&format!("betti: {:?}\n", index.homology.betti));
        out.push_str(&format!("P_t = {}\n", index.homology.poincare()));
        out.push_str(&format!(
            "components: {} (membership {:?}, {} fiber states, period {})\n",
            index.components.len(),
            index.membership,
            index.fiber_states,
            index.period
        ));
    }
    out.push_str(&format!("lower bound: {}\n", report.lower_bound));
    if let Some(q) = report.free_extensions {
        out.push_str(&format!("free after extensions: {q}\n"));
    }
    if let Some(case) = report.case {
        out.push_str(&format!("case: {case:?}\n"));
    }
    if !report.found.is_empty() {
        out.push_str(&format!("found orbits: {}\n", report.found.len()));
        for (k, f) in report.found.iter().enumerate() {
            out.push_str(&format!(
                "  orbit {}: residual {:.3e} inside_disc={} x = {:?}\n",
                k + 1,
                f.residual.to_f64().unwrap_or(f64::NAN),
                f.inside_disc,
                f.strand.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>()
            ));
        }
    }
    if let Some(checks) = &report.orbit_checks {
        out.push_str(&format!(
            "braiding checks: transversal={} positive={} links={:?}\n",
            checks.transversal, checks.crossings_positive, checks.links
        ));
        for v in &checks.violations {
            out.push_str(&format!("  violation: {v}\n"));
        }
    }
    if let Some(m) = &report.braid_type_verified {
        out.push_str(&format!("braid type verified: {m}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn consistency_gate() {
        let gamma =
            PositiveWord::new(5, vec![4, 1, 2, 3, 2, 2, 3, 2, 1, 4]).unwrap();
        let colored = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
        let good = ForcingQuery::<f64> {
            skeleton: PositiveWord::new(4, vec![3, 1, 2, 2, 1, 3]).unwrap(),
            colored: colored.clone(),
            realization: None,
        };
        let report = force(&good, &ForceOptions::default()).unwrap();
        assert!(report.forced());
        assert_eq!(report.lower_bound, 1);
        assert_eq!(report.free_extensions, Some(0));

        let bad = ForcingQuery::<f64> {
            skeleton: PositiveWord::new(4, vec![1, 2, 1]).unwrap(),
            colored,
            realization: None,
        };
        assert!(matches!(force(&bad, &ForceOptions::default()), Err(ForcingError::Inconsistent { .. })));
    }

    #[test]
    fn improper_refusal_is_structured() {
        // All-(+1) concatenation block alone: improper.
        let gamma = PositiveWord::new(5, vec![4, 1, 3, 2, 2, 3, 1, 4]).unwrap();
        let colored = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
        let query = ForcingQuery::<f64> {
            skeleton: colored.project(Color::Black).unwrap(),
            colored,
            realization: None,
        };
        let report = force(&query, &ForceOptions::default()).unwrap();
        assert!(matches!(report.refusal, Some(Refusal::Improper { .. })));
        assert!(!report.forced());
    }
}
