//! Discretized closed braids: validation, diagrams, braid words, and the
//! extension / dualization / augmentation operators.
//!
//! A braid is `m` strands of `d+1` exact rational anchor points closed up by
//! a permutation.  Anchor coincidences are allowed only where the two strands
//! cross transversally.

use std::collections::HashMap;

use num::{Signed, Zero};
use thiserror::Error;

use crate::word::PositiveWord;
use crate::{rati, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("strand {0} has {1} anchors; expected {2}")]
    StrandLength(usize, usize, usize),
    #[error("permutation is not a bijection on the strands")]
    PermNotBijective,
    #[error("closure broken: strand {strand} ends at {end} but strand {image} starts at {start}")]
    Closure { strand: usize, image: usize, end: String, start: String },
    #[error("tangency between strands {0} and {1} at slice {2}")]
    Tangency(usize, usize, usize),
    #[error("no strand starts where strand {0} ends; cannot infer the closure")]
    NoClosure(usize),
    #[error("ambiguous closure: several strands share a start value")]
    AmbiguousClosure,
    #[error("braid must have period at least 1")]
    EmptyPeriod,
    #[error("dualization needs an even period, got {0}")]
    OddPeriod(usize),
    #[error("braid word extraction needs a braid that survives regularization")]
    NotRegular,
}

/// Outcome of [`DiscretizedBraid::validate`], reporting the first violated
/// clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Ok,
    Violation(String),
}

impl Validity {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validity::Ok)
    }
}

/// A discretized period-`d` closed braid on `m` strands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretizedBraid {
    strands: Vec<Vec<Rat>>,
    perm: Vec<usize>,
}

/// One transversal intersection of the piecewise-linear diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// Time of the intersection, in `[0, 1)` units of the closed diagram.
    pub t: Rat,
    /// Height of the intersection point.
    pub height: Rat,
    /// 1-based rank of the crossing among the strand heights at time `t`.
    pub pos: usize,
    /// The two strands involved.
    pub strands: (usize, usize),
}

/// The piecewise-linear diagram data of a braid: its crossings in time order
/// and the word metric (total intersection count with multiplicity).
#[derive(Clone, Debug)]
pub struct BraidDiagram {
    pub crossings: Vec<Crossing>,
}

impl BraidDiagram {
    pub fn word_metric(&self) -> usize {
        self.crossings.len()
    }
}

impl DiscretizedBraid {
    /// Build from strands and an explicit closure permutation.
    pub fn new(strands: Vec<Vec<Rat>>, perm: Vec<usize>) -> Result<Self, BraidError> {
        let m = strands.len();
        assert!(m >= 1, "a braid needs at least one strand");
        let len = strands[0].len();
        if len < 2 {
            return Err(BraidError::EmptyPeriod);
        }
        for (mu, s) in strands.iter().enumerate() {
            if s.len() != len {
                return Err(BraidError::StrandLength(mu, s.len(), len));
            }
        }
        let mut seen = vec![false; m];
        for &p in &perm {
            if p >= m || seen[p] {
                return Err(BraidError::PermNotBijective);
            }
            seen[p] = true;
        }
        if perm.len() != m {
            return Err(BraidError::PermNotBijective);
        }
        Ok(Self { strands, perm })
    }

    /// Build from strands, inferring the permutation by matching endpoints.
    pub fn from_strands(strands: Vec<Vec<Rat>>) -> Result<Self, BraidError> {
        let m = strands.len();
        let d = strands[0].len() - 1;
        let mut perm = vec![usize::MAX; m];
        let mut used = vec![false; m];
        for mu in 0..m {
            let end = &strands[mu][d];
            let matches: Vec<usize> =
                (0..m).filter(|&nu| !used[nu] && strands[nu][0] == *end).collect();
            match matches.len() {
                0 => return Err(BraidError::NoClosure(mu)),
                1 => {
                    perm[mu] = matches[0];
                    used[matches[0]] = true;
                }
                _ => return Err(BraidError::AmbiguousClosure),
            }
        }
        Self::new(strands, perm)
    }

    /// Integer-anchor convenience constructor.
    pub fn from_ints(strands: &[&[i64]]) -> Result<Self, BraidError> {
        let s: Vec<Vec<Rat>> =
            strands.iter().map(|row| row.iter().map(|&v| rati(v)).collect()).collect();
        Self::from_strands(s)
    }

    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }

    pub fn period(&self) -> usize {
        self.strands[0].len() - 1
    }

    pub fn strands(&self) -> &[Vec<Rat>] {
        &self.strands
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (mu, &p) in self.perm.iter().enumerate() {
            inv[p] = mu;
        }
        inv
    }

    /// Anchor of strand `mu` at an arbitrary (possibly out-of-range) slice,
    /// following the closure.
    pub fn anchor(&self, mu: usize, j: i64) -> Rat {
        let d = self.period() as i64;
        let mut strand = mu;
        let mut jj = j;
        let inv = self.inverse_perm();
        while jj < 0 {
            strand = inv[strand];
            jj += d;
        }
        while jj > d {
            strand = self.perm[strand];
            jj -= d;
        }
        // jj == d reads the stored endpoint directly.
        self.strands[strand][jj as usize].clone()
    }

    /// Check the defining conditions, reporting the first violation.
    pub fn validate(&self) -> Validity {
        let m = self.strand_count();
        let d = self.period();
        for mu in 0..m {
            let end = &self.strands[mu][d];
            let start = &self.strands[self.perm[mu]][0];
            if end != start {
                return Validity::Violation(format!(
                    "closure: strand {} ends at {} but its image starts at {}",
                    mu + 1,
                    end,
                    start
                ));
            }
        }
        for mu in 0..m {
            for nu in (mu + 1)..m {
                for j in 0..d {
                    if self.strands[mu][j] == self.strands[nu][j] {
                        let a = self.anchor(mu, j as i64 - 1) - self.anchor(nu, j as i64 - 1);
                        let b = self.anchor(mu, j as i64 + 1) - self.anchor(nu, j as i64 + 1);
                        if !(a * b).is_negative() {
                            return Validity::Violation(format!(
                                "tangency between strands {} and {} at slice {}",
                                mu + 1,
                                nu + 1,
                                j
                            ));
                        }
                    }
                }
            }
        }
        Validity::Ok
    }

    /// All crossings of the PL diagram over one period, with anchor
    /// coincidences counted once at their slice.
    pub fn diagram(&self) -> BraidDiagram {
        let m = self.strand_count();
        let d = self.period();
        let dd = rati(d as i64);
        let mut crossings = Vec::new();
        for mu in 0..m {
            for nu in (mu + 1)..m {
                for j in 0..d {
                    let s0 = &self.strands[mu][j] - &self.strands[nu][j];
                    let s1 = &self.strands[mu][j + 1] - &self.strands[nu][j + 1];
                    if s0.is_zero() {
                        let t = rati(j as i64) / &dd;
                        let height = self.strands[mu][j].clone();
                        crossings.push((t, height, (mu, nu)));
                    } else if !s1.is_zero() && (s0.clone() * &s1).is_negative() {
                        let frac = &s0 / (&s0 - &s1);
                        let t = (rati(j as i64) + &frac) / &dd;
                        let height = &self.strands[mu][j]
                            + frac * (&self.strands[mu][j + 1] - &self.strands[mu][j]);
                        crossings.push((t, height, (mu, nu)));
                    }
                }
            }
        }
        crossings.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let out = crossings
            .into_iter()
            .map(|(t, height, strands)| {
                let below = (0..m)
                    .filter(|&lam| lam != strands.0 && lam != strands.1)
                    .filter(|&lam| self.height_at(lam, &t) < height)
                    .count();
                Crossing { t, height, pos: below + 1, strands }
            })
            .collect();
        BraidDiagram { crossings: out }
    }

    /// PL-interpolated height of a strand at time `t` in `[0, 1]`.
    pub fn height_at(&self, mu: usize, t: &Rat) -> Rat {
        let d = self.period() as i64;
        let scaled = t * rati(d);
        let j = scaled.floor();
        let frac = &scaled - &j;
        let j = j.to_integer();
        use num::ToPrimitive;
        let j = j.to_i64().expect("slice index fits i64");
        let a = self.anchor(mu, j);
        let b = self.anchor(mu, j + 1);
        let delta = &b - &a;
        a + frac * delta
    }

    /// Total intersection count of the diagram (the word metric).
    pub fn word_metric(&self) -> usize {
        self.diagram().word_metric()
    }

    /// Crossing count between one pair of strands over a single period.
    pub fn pair_crossings(&self, mu: usize, nu: usize) -> usize {
        self.diagram().crossings.iter().filter(|c| c.strands == (mu.min(nu), mu.max(nu))).count()
    }

    /// Whether all anchors per slice and all crossing times are distinct.
    pub fn is_regular(&self) -> bool {
        let d = self.period();
        for j in 0..d {
            let mut vals: Vec<&Rat> = self.strands.iter().map(|s| &s[j]).collect();
            vals.sort();
            if vals.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        let diag = self.diagram();
        diag.crossings.windows(2).all(|w| w[0].t != w[1].t)
    }

    /// Deterministic regularization: separates anchor coincidences and
    /// simultaneous crossings by perturbing the lexicographically smallest
    /// strand involved, using the slice-dependent offset `1/(3(j+2))` scaled
    /// below the local gap.  The output is positively isotopic to the input.
    pub fn regularize(&self) -> DiscretizedBraid {
        let mut b = self.clone();
        let d = b.period();
        // Phase 1: distinct anchors per slice.
        loop {
            let mut tie = None;
            'outer: for j in 0..d {
                for mu in 0..b.strand_count() {
                    for nu in (mu + 1)..b.strand_count() {
                        if b.strands[mu][j] == b.strands[nu][j] {
                            tie = Some((mu, j));
                            break 'outer;
                        }
                    }
                }
            }
            match tie {
                None => break,
                Some((mu, j)) => {
                    let eps = b.safe_epsilon(j);
                    b.bump_anchor(mu, j, eps);
                }
            }
        }
        // Phase 2: distinct crossing times.
        let mut round = 0u32;
        loop {
            let diag = b.diagram();
            let mut tie = None;
            for w in diag.crossings.windows(2) {
                if w[0].t == w[1].t {
                    tie = Some((w[0].strands.0.min(w[1].strands.0), w[0].t.clone()));
                    break;
                }
            }
            match tie {
                None => break,
                Some((mu, t)) => {
                    let j = slice_of_time(&t, d);
                    let eps = b.safe_epsilon(j) / rati(2i64.pow(round.min(40)));
                    b.bump_anchor(mu, j, eps);
                    round += 1;
                    assert!(round < 1000, "regularization failed to terminate");
                }
            }
        }
        debug_assert!(b.is_regular());
        b
    }

    /// Offset `1/(3(j+2))` clipped under half the smallest nonzero gap at the
    /// slice, so a bump can neither hit another strand nor flip a crossing.
    fn safe_epsilon(&self, j: usize) -> Rat {
        let mut vals: Vec<Rat> = Vec::new();
        for jj in [j.saturating_sub(1), j, (j + 1).min(self.period())] {
            for s in &self.strands {
                vals.push(s[jj].clone());
            }
        }
        vals.sort();
        let mut min_gap: Option<Rat> = None;
        for w in vals.windows(2) {
            let gap = &w[1] - &w[0];
            if !gap.is_zero() && min_gap.as_ref().map_or(true, |g| &gap < g) {
                min_gap = Some(gap);
            }
        }
        let base = Rat::new(1.into(), (3 * (j as i64 + 2)).into());
        match min_gap {
            Some(g) => {
                let lim = g / rati(3);
                if base < lim {
                    base
                } else {
                    lim
                }
            }
            None => base,
        }
    }

    fn bump_anchor(&mut self, mu: usize, j: usize, eps: Rat) {
        let d = self.period();
        let v = &self.strands[mu][j] + eps;
        self.strands[mu][j] = v.clone();
        if j == 0 {
            let inv = self.inverse_perm();
            self.strands[inv[mu]][d] = v;
        }
    }

    /// The positive word of the diagram; non-regular braids are regularized
    /// first, so the result is well-defined up to positive conjugacy.
    pub fn braid_word(&self) -> PositiveWord {
        let b = if self.is_regular() { self.clone() } else { self.regularize() };
        let letters: Vec<usize> = b.diagram().crossings.iter().map(|c| c.pos).collect();
        PositiveWord::new(self.strand_count(), letters).expect("crossing ranks are in range")
    }

    /// Append `k` constant slices (the trivial extension).
    pub fn extend(&self, k: usize) -> DiscretizedBraid {
        let mut strands = self.strands.clone();
        for s in strands.iter_mut() {
            let last = s.last().unwrap().clone();
            for _ in 0..k {
                s.push(last.clone());
            }
        }
        DiscretizedBraid { strands, perm: self.perm.clone() }
    }

    /// Append one negated slice.  The result usually closes up only after a
    /// second application; see [`DiscretizedBraid::full_twist_block`].
    pub fn half_twist(&self) -> DiscretizedBraid {
        let mut strands = self.strands.clone();
        for s in strands.iter_mut() {
            let last = s.last().unwrap().clone();
            s.push(-last);
        }
        DiscretizedBraid { strands, perm: self.perm.clone() }
    }

    /// Append a full-twist block (negated slice, then back), applied `k`
    /// times.  Always closes up.
    pub fn full_twist_block(&self, k: usize) -> DiscretizedBraid {
        let mut strands = self.strands.clone();
        for s in strands.iter_mut() {
            let last = s.last().unwrap().clone();
            for _ in 0..k {
                s.push(-last.clone());
                s.push(last.clone());
            }
        }
        DiscretizedBraid { strands, perm: self.perm.clone() }
    }

    /// Alternate-sign dualization `x_j -> (-1)^j x_j`; requires even period.
    pub fn dual(&self) -> Result<DiscretizedBraid, BraidError> {
        if self.period() % 2 != 0 {
            return Err(BraidError::OddPeriod(self.period()));
        }
        let strands = self
            .strands
            .iter()
            .map(|s| {
                s.iter()
                    .enumerate()
                    .map(|(j, v)| if j % 2 == 0 { v.clone() } else { -v.clone() })
                    .collect()
            })
            .collect();
        Ok(DiscretizedBraid { strands, perm: self.perm.clone() })
    }

    /// Add constant strands one unit below the slice-wise minimum and one
    /// unit above the slice-wise maximum.
    pub fn augment_star(&self) -> DiscretizedBraid {
        let d = self.period();
        let mut lo = Vec::with_capacity(d + 1);
        let mut hi = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let min = self.strands.iter().map(|s| &s[j]).min().unwrap();
            let max = self.strands.iter().map(|s| &s[j]).max().unwrap();
            lo.push(min - rati(1));
            hi.push(max + rati(1));
        }
        let mut strands = self.strands.clone();
        let m = strands.len();
        strands.push(lo);
        strands.push(hi);
        let mut perm = self.perm.clone();
        perm.push(m);
        perm.push(m + 1);
        DiscretizedBraid { strands, perm }
    }

    /// Add the two alternating sawtooth strands
    /// `(-1)^j min - (-1)^j` and `(-1)^j max + (-1)^j`.
    pub fn augment_saw(&self) -> DiscretizedBraid {
        let d = self.period();
        let mut s_lo = Vec::with_capacity(d + 1);
        let mut s_hi = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let min = self.strands.iter().map(|s| &s[j]).min().unwrap().clone();
            let max = self.strands.iter().map(|s| &s[j]).max().unwrap().clone();
            let sign = if j % 2 == 0 { rati(1) } else { rati(-1) };
            s_lo.push(&sign * min - &sign);
            s_hi.push(&sign * max + &sign);
        }
        let mut strands = self.strands.clone();
        let m = strands.len();
        strands.push(s_lo);
        strands.push(s_hi);
        let mut perm = self.perm.clone();
        perm.push(m);
        perm.push(m + 1);
        DiscretizedBraid { strands, perm }
    }

    /// Relabel strands by a bijection `zeta` (new index of old strand `mu` is
    /// `zeta[mu]`).
    pub fn relabel(&self, zeta: &[usize]) -> DiscretizedBraid {
        let m = self.strand_count();
        let mut strands = vec![Vec::new(); m];
        let mut perm = vec![0; m];
        for mu in 0..m {
            strands[zeta[mu]] = self.strands[mu].clone();
            perm[zeta[mu]] = zeta[self.perm[mu]];
        }
        DiscretizedBraid { strands, perm }
    }
}

fn slice_of_time(t: &Rat, d: usize) -> usize {
    use num::ToPrimitive;
    let scaled = t * rati(d as i64);
    scaled.floor().to_integer().to_usize().unwrap_or(0).min(d - 1)
}

/// Evaluate a positive word as a discretized braid: strand `mu` starts at
/// height `mu+1`, follows the letter-induced permutations one letter per
/// slice, and holds constant for `q` extra slices.
pub fn ev(word: &PositiveWord, q: usize) -> DiscretizedBraid {
    let m = word.strands();
    let d = word.len();
    let mut heights: Vec<Vec<Rat>> = (0..m).map(|mu| vec![rati(mu as i64 + 1)]).collect();
    let mut pos: Vec<usize> = (0..m).collect();
    for &i in word.letters() {
        for mu in 0..m {
            if pos[mu] + 1 == i {
                pos[mu] = i;
            } else if pos[mu] == i {
                pos[mu] = i - 1;
            }
        }
        for mu in 0..m {
            heights[mu].push(rati(pos[mu] as i64 + 1));
        }
    }
    for _ in 0..q.max(if d == 0 { 1 } else { 0 }) {
        for h in heights.iter_mut() {
            let last = h.last().unwrap().clone();
            h.push(last);
        }
    }
    let perm = {
        let mut p = vec![0; m];
        for mu in 0..m {
            p[mu] = pos[mu];
        }
        p
    };
    DiscretizedBraid::new(heights, perm).expect("evaluated braids are well-formed")
}

/// Evaluate a word packing one permutation-braid layer per slice instead of
/// one letter per slice.  Same braid class as [`ev`], far fewer slices.
pub fn ev_compact(word: &PositiveWord, q: usize) -> DiscretizedBraid {
    let m = word.strands();
    let layers = word.simple_layers();
    let mut heights: Vec<Vec<Rat>> = (0..m).map(|mu| vec![rati(mu as i64 + 1)]).collect();
    let mut pos: Vec<usize> = (0..m).collect();
    for layer in &layers {
        for &i in layer.letters() {
            for mu in 0..m {
                if pos[mu] + 1 == i {
                    pos[mu] = i;
                } else if pos[mu] == i {
                    pos[mu] = i - 1;
                }
            }
        }
        for mu in 0..m {
            heights[mu].push(rati(pos[mu] as i64 + 1));
        }
    }
    for _ in 0..q.max(if layers.is_empty() { 1 } else { 0 }) {
        for h in heights.iter_mut() {
            let last = h.last().unwrap().clone();
            h.push(last);
        }
    }
    let perm = pos;
    DiscretizedBraid::new(heights, perm).expect("evaluated braids are well-formed")
}

/// Whether two braids are positively isotopic: connected by single-anchor
/// moves in the canonical lattice model, up to strand relabelling.
pub fn same_class(a: &DiscretizedBraid, b: &DiscretizedBraid) -> Result<bool, BraidError> {
    use crate::lattice::StateSpace;
    if a.strand_count() != b.strand_count() || a.period() != b.period() {
        return Ok(false);
    }
    let (space_a, start) = StateSpace::from_braid(a);
    let (space_b, target_state) = StateSpace::from_braid(b);
    if space_a.total_crossings(&start) != space_b.total_crossings(&target_state) {
        return Ok(false);
    }
    let target = space_b.canonical_key(&target_state);
    let movable = vec![true; a.strand_count()];
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(space_a.canonical_key(&start));
    queue.push_back(start);
    while let Some(st) = queue.pop_front() {
        if space_a.canonical_key(&st) == target {
            return Ok(true);
        }
        for nb in space_a.neighbors(&st, &movable) {
            let key = space_a.canonical_key(&nb);
            if seen.insert(key) {
                queue.push_back(nb);
            }
        }
    }
    Ok(false)
}

/// Whether the braid class equals its topological class: the lattice
/// component of the braid exhausts every configuration carrying a positively
/// conjugate word.
pub fn is_free(b: &DiscretizedBraid) -> Result<bool, BraidError> {
    use crate::lattice::{enumerate_states, StateSpace};
    let word = b.braid_word();
    if b.period() > word.len() {
        return Ok(true);
    }
    let class = word
        .conjugacy_closure(crate::word::DEFAULT_CLOSURE_CAP)
        .map_err(|_| BraidError::NotRegular)?;
    let (space, start) = StateSpace::from_braid(b);
    let movable = vec![true; b.strand_count()];
    let component = space
        .component(&start, &movable, 50_000_000)
        .expect("plain braid components are small");
    let component_keys: std::collections::HashSet<_> =
        component.iter().map(|st| space.canonical_key(st)).collect();
    let all = enumerate_states(&space, word.len(), 50_000_000)
        .expect("bounded-budget enumeration is small");
    for st in all {
        if space.total_crossings(&st) != word.len() {
            continue;
        }
        let w = space.to_braid(&st).braid_word();
        if !class.contains(&w.letters().to_vec()) {
            continue;
        }
        if !component_keys.contains(&space.canonical_key(&st)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pairwise crossing-count matrix of a braid.
pub fn crossing_matrix(b: &DiscretizedBraid) -> Vec<Vec<usize>> {
    let m = b.strand_count();
    let mut mat = vec![vec![0; m]; m];
    for c in b.diagram().crossings {
        let (mu, nu) = c.strands;
        mat[mu][nu] += 1;
        mat[nu][mu] += 1;
    }
    mat
}

/// Crossing counts between a distinguished strand and each closure cycle of
/// the remaining strands, indexed by sorted cycle representative.
pub fn cycle_crossings(b: &DiscretizedBraid, strand: usize) -> HashMap<usize, usize> {
    let cycles = crate::word::permutation_cycles(b.permutation());
    let mat = crossing_matrix(b);
    let mut out = HashMap::new();
    for cyc in cycles {
        if cyc.contains(&strand) {
            continue;
        }
        let rep = *cyc.iter().min().unwrap();
        let total = cyc.iter().map(|&nu| mat[strand][nu]).sum();
        out.insert(rep, total);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_b() -> DiscretizedBraid {
        DiscretizedBraid::from_ints(&[&[1, 4, 1], &[2, 2, 2], &[3, 3, 3]]).unwrap()
    }

    fn example_b_prime() -> DiscretizedBraid {
        DiscretizedBraid::from_ints(&[&[4, 1, 4], &[2, 2, 2], &[3, 3, 3]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(example_b().validate().is_ok());
        assert!(DiscretizedBraid::from_ints(&[&[0, 0]]).unwrap().validate().is_ok());
        // Tangency: two strands meet at slice 1 with equal-sign neighbours.
        let bad = DiscretizedBraid::new(
            vec![vec![rati(0), rati(1)], vec![rati(1), rati(1)]],
            vec![1, 0],
        )
        .unwrap();
        assert!(!bad.validate().is_ok());
    }

    #[test]
    fn words_of_the_two_period_two_braids() {
        assert_eq!(example_b().braid_word().letters(), &[1, 2, 2, 1]);
        assert_eq!(example_b_prime().braid_word().letters(), &[2, 1, 1, 2]);
    }

    #[test]
    fn trivial_braid_has_empty_word() {
        let b = DiscretizedBraid::from_ints(&[&[1, 1], &[2, 2]]).unwrap();
        assert!(b.braid_word().is_empty());
        assert_eq!(b.word_metric(), 0);
    }

    #[test]
    fn word_metric_matches_word_length() {
        for b in [example_b(), example_b_prime()] {
            assert_eq!(b.word_metric(), b.braid_word().len());
        }
    }

    #[test]
    fn regularize_is_identity_on_regular() {
        let b = example_b();
        assert!(b.is_regular());
        assert_eq!(b.regularize(), b);
    }

    #[test]
    fn regularize_separates_coincidences() {
        // Two strands crossing exactly at an anchor.
        let b = DiscretizedBraid::from_ints(&[&[1, 2, 3, 1], &[3, 2, 1, 3]]).unwrap();
        assert!(b.validate().is_ok());
        assert!(!b.is_regular());
        let r = b.regularize();
        assert!(r.is_regular());
        assert!(r.validate().is_ok());
        assert_eq!(r.word_metric(), b.word_metric());
        // Idempotent words under repeated regularization.
        assert_eq!(r.braid_word(), r.regularize().braid_word());
    }

    #[test]
    fn ev_reproduces_example_words() {
        let w = PositiveWord::new(3, vec![1, 2, 2, 1]).unwrap();
        let b = ev(&w, 1);
        assert_eq!(b.period(), 5);
        assert!(b.validate().is_ok());
        let back = b.braid_word();
        assert!(back.positively_conjugate(&w).unwrap());

        let gamma = PositiveWord::new(3, vec![2, 1, 2]).unwrap();
        let g = ev(&gamma, 0);
        assert_eq!(g.period(), 3);
        assert_eq!(g.braid_word().letters(), &[2, 1, 2]);
    }

    #[test]
    fn ev_compact_same_class() {
        let w = PositiveWord::new(5, vec![4, 1, 2, 3, 2, 2, 3, 2, 1, 4]).unwrap();
        let b = ev_compact(&w, 0);
        assert!(b.validate().is_ok());
        assert!(b.period() <= 6);
        assert!(b.braid_word().positively_conjugate(&w).unwrap());
    }

    #[test]
    fn dual_is_involution() {
        let b = example_b();
        assert_eq!(b.dual().unwrap().dual().unwrap(), b);
        let odd = DiscretizedBraid::from_ints(&[&[1, 1, 1, 1]]).unwrap();
        assert!(odd.dual().is_err());
    }

    #[test]
    fn star_augmentation_bounds() {
        let b = DiscretizedBraid::from_ints(&[&[2, 2]]).unwrap();
        let s = b.augment_star();
        assert_eq!(s.strand_count(), 3);
        assert_eq!(s.strands()[1], vec![rati(1), rati(1)]);
        assert_eq!(s.strands()[2], vec![rati(3), rati(3)]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn full_twist_block_adds_two_crossings_per_pair() {
        let b = DiscretizedBraid::from_ints(&[&[1, 1], &[2, 2]]).unwrap();
        let t = b.full_twist_block(1);
        assert!(t.validate().is_ok());
        assert_eq!(t.period(), 3);
        assert_eq!(t.word_metric(), 2);
    }

    #[test]
    fn extension_keeps_word() {
        let b = example_b();
        let e = b.extend(1);
        assert!(e.validate().is_ok());
        assert_eq!(e.period(), 3);
        assert_eq!(e.braid_word().letters(), b.braid_word().letters());
    }

    #[test]
    fn class_membership_of_the_two_representatives() {
        let b = example_b();
        let bp = example_b_prime();
        assert!(same_class(&b, &b).unwrap());
        // Same word class, different path components.
        assert!(b.braid_word().positively_conjugate(&bp.braid_word()).unwrap());
        assert!(!same_class(&b, &bp).unwrap());
        // A global shift is a positive isotopy.
        let shifted = DiscretizedBraid::from_ints(&[&[3, 6, 3], &[4, 4, 4], &[5, 5, 5]]).unwrap();
        assert!(same_class(&b, &shifted).unwrap());
    }

    #[test]
    fn freeness_of_period_two_and_three_representatives() {
        assert!(!is_free(&example_b()).unwrap());
        let b2 =
            DiscretizedBraid::from_ints(&[&[1, 4, 1, 1], &[2, 2, 2, 2], &[3, 3, 3, 3]]).unwrap();
        assert!(is_free(&b2).unwrap());
        // Fast path: period exceeding the word length.
        let small = DiscretizedBraid::from_ints(&[&[1, 2, 1, 1], &[2, 1, 2, 2]]).unwrap();
        assert!(is_free(&small).unwrap());
    }

    #[test]
    fn even_pairwise_intersections_on_closed_cycles() {
        // Strands fixed by the closure meet each other an even number of times.
        let b = example_b();
        let mat = crossing_matrix(&b);
        for mu in 0..3 {
            for nu in (mu + 1)..3 {
                assert_eq!(mat[mu][nu] % 2, 0);
            }
        }
    }
}
