//! Canonical lattice model of discretized braid classes.
//!
//! A configuration is stored as its slice-wise level sequence: at every slice
//! the strands are grouped bottom-to-top into levels (a level with two or
//! more strands is an anchor coincidence).  Single-anchor `±1` lattice moves
//! become split/merge moves between adjacent levels, so every class search is
//! an exact finite search on canonical states, independent of any ambient
//! window.  Rendering a state back to integers places level `k` at height
//! `2(k+1)`.

use std::collections::{HashSet, VecDeque};

use crate::braid::DiscretizedBraid;
use crate::rati;

/// Closure data shared by all states of one search.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub m: usize,
    pub d: usize,
    pub perm: Vec<usize>,
    pub inv: Vec<usize>,
}

/// A configuration as slice-major level ranks: `pos[j*m + s]` is the level of
/// strand `s` at slice `j`, with ranks dense from 0 at every slice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LevelState {
    pub pos: Vec<u8>,
}

impl StateSpace {
    pub fn new(m: usize, d: usize, perm: Vec<usize>) -> Self {
        let mut inv = vec![0; m];
        for (s, &p) in perm.iter().enumerate() {
            inv[p] = s;
        }
        Self { m, d, perm, inv }
    }

    /// Extract the space and canonical state of a braid (slices `0..d`).
    pub fn from_braid(b: &DiscretizedBraid) -> (Self, LevelState) {
        let m = b.strand_count();
        let d = b.period();
        let space = Self::new(m, d, b.permutation().to_vec());
        let mut pos = vec![0u8; m * d];
        for j in 0..d {
            let mut vals: Vec<_> = (0..m).map(|s| (b.strands()[s][j].clone(), s)).collect();
            vals.sort();
            let mut rank = 0u8;
            for k in 0..m {
                if k > 0 && vals[k].0 != vals[k - 1].0 {
                    rank += 1;
                }
                pos[j * m + vals[k].1] = rank;
            }
        }
        (space, LevelState { pos })
    }

    /// Render a state as an integer-anchored braid, level `k` at `2(k+1)`.
    pub fn to_braid(&self, st: &LevelState) -> DiscretizedBraid {
        let mut strands = Vec::with_capacity(self.m);
        for s in 0..self.m {
            let mut row = Vec::with_capacity(self.d + 1);
            for j in 0..self.d {
                row.push(rati(2 * (st.pos[j * self.m + s] as i64 + 1)));
            }
            row.push(rati(2 * (st.pos[self.perm[s]] as i64 + 1)));
            strands.push(row);
        }
        DiscretizedBraid::new(strands, self.perm.clone()).expect("states render to braids")
    }

    /// Level of strand `s` at slice `j`, following the closure out of range.
    pub fn level(&self, st: &LevelState, mut j: i64, mut s: usize) -> u8 {
        let d = self.d as i64;
        while j < 0 {
            s = self.inv[s];
            j += d;
        }
        while j >= d {
            s = self.perm[s];
            j -= d;
        }
        st.pos[(j as usize) * self.m + s]
    }

    fn sign(&self, st: &LevelState, j: i64, s: usize, t: usize) -> i8 {
        let a = self.level(st, j, s);
        let b = self.level(st, j, t);
        if a < b {
            -1
        } else if a > b {
            1
        } else {
            0
        }
    }

    /// Transversality of every anchor coincidence.
    pub fn is_valid(&self, st: &LevelState) -> bool {
        for j in 0..self.d {
            for s in 0..self.m {
                for t in (s + 1)..self.m {
                    if st.pos[j * self.m + s] == st.pos[j * self.m + t] {
                        let a = self.sign(st, j as i64 - 1, s, t) as i32;
                        let b = self.sign(st, j as i64 + 1, s, t) as i32;
                        if a * b >= 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Crossing count between two strands over one period.
    pub fn pair_crossings(&self, st: &LevelState, s: usize, t: usize) -> usize {
        let mut count = 0;
        for j in 0..self.d {
            let here = self.sign(st, j as i64, s, t);
            if here == 0 {
                count += 1;
            } else {
                let next = self.sign(st, j as i64 + 1, s, t);
                if next != 0 && next != here {
                    count += 1;
                }
            }
        }
        count
    }

    /// Total crossing count (word metric) of a state.
    pub fn total_crossings(&self, st: &LevelState) -> usize {
        let mut total = 0;
        for s in 0..self.m {
            for t in (s + 1)..self.m {
                total += self.pair_crossings(st, s, t);
            }
        }
        total
    }

    /// Re-canonicalize one slice from raw (possibly sparse, fractional-step)
    /// rank keys.
    fn set_slice_from_keys(&self, st: &mut LevelState, j: usize, keys: &[(i32, usize)]) {
        let mut sorted = keys.to_vec();
        sorted.sort();
        let mut rank = 0u8;
        for k in 0..sorted.len() {
            if k > 0 && sorted[k].0 != sorted[k - 1].0 {
                rank += 1;
            }
            st.pos[j * self.m + sorted[k].1] = rank;
        }
    }

    /// All valid single-strand one-notch moves of `movable` strands.
    pub fn neighbors(&self, st: &LevelState, movable: &[bool]) -> Vec<LevelState> {
        let mut out = Vec::new();
        for j in 0..self.d {
            let slice = &st.pos[j * self.m..(j + 1) * self.m];
            let top = *slice.iter().max().unwrap();
            for s in 0..self.m {
                if !movable[s] {
                    continue;
                }
                let lv = slice[s];
                let alone = slice.iter().enumerate().all(|(t, &r)| t == s || r != lv);
                for dir in [-1i32, 1] {
                    // Doubled keys leave room to split off between levels.
                    let mut keys: Vec<(i32, usize)> =
                        (0..self.m).map(|t| (2 * slice[t] as i32, t)).collect();
                    if alone {
                        // Merge into the adjacent level, if any.
                        if (dir < 0 && lv == 0) || (dir > 0 && lv == top) {
                            continue;
                        }
                        keys[s].0 = 2 * (lv as i32 + dir);
                    } else {
                        // Split out of the shared level.
                        keys[s].0 = 2 * lv as i32 + dir;
                    }
                    let mut next = st.clone();
                    self.set_slice_from_keys(&mut next, j, &keys);
                    if next != *st && self.is_valid(&next) {
                        out.push(next);
                    }
                }
            }
        }
        out
    }

    /// Connected component of `seed` under the moves of `movable` strands.
    pub fn component(
        &self,
        seed: &LevelState,
        movable: &[bool],
        cap: usize,
    ) -> Result<HashSet<LevelState>, SearchTooLarge> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(seed.clone());
        queue.push_back(seed.clone());
        while let Some(st) = queue.pop_front() {
            for nb in self.neighbors(&st, movable) {
                if !seen.contains(&nb) {
                    if seen.len() >= cap {
                        return Err(SearchTooLarge(cap));
                    }
                    seen.insert(nb.clone());
                    queue.push_back(nb);
                }
            }
        }
        Ok(seen)
    }

    /// Quotient strand labels: relabel strands by their level profiles and
    /// conjugate the closure, giving a label-independent key.
    pub fn canonical_key(&self, st: &LevelState) -> (Vec<u8>, Vec<usize>) {
        let mut profiles: Vec<(Vec<u8>, usize)> = (0..self.m)
            .map(|s| ((0..self.d).map(|j| st.pos[j * self.m + s]).collect(), s))
            .collect();
        profiles.sort();
        let mut zeta = vec![0; self.m]; // old -> new
        for (new, &(_, old)) in profiles.iter().enumerate() {
            zeta[old] = new;
        }
        let mut pos = vec![0u8; self.m * self.d];
        for j in 0..self.d {
            for s in 0..self.m {
                pos[j * self.m + zeta[s]] = st.pos[j * self.m + s];
            }
        }
        let mut perm = vec![0; self.m];
        for s in 0..self.m {
            perm[zeta[s]] = zeta[self.perm[s]];
        }
        (pos, perm)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("state search exceeded {0} states")]
pub struct SearchTooLarge(pub usize);

/// Dense weak orders (ordered set partitions) of `m` labels, as rank vectors:
/// every vector over `0..m` whose value set is an initial segment.
pub fn weak_orders(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut ranks = vec![0u8; m];
    fn rec(m: usize, k: usize, ranks: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == m {
            let max = *ranks.iter().max().unwrap();
            if (0..=max).all(|r| ranks.contains(&r)) {
                out.push(ranks.clone());
            }
            return;
        }
        for r in 0..m {
            ranks[k] = r as u8;
            rec(m, k + 1, ranks, out);
        }
    }
    rec(m, 0, &mut ranks, &mut out);
    out.sort();
    out
}

/// Enumerate every valid state of the space whose total crossing count is at
/// most `budget`, by depth-first search over slices.
pub fn enumerate_states(
    space: &StateSpace,
    budget: usize,
    cap: usize,
) -> Result<Vec<LevelState>, SearchTooLarge> {
    let orders = weak_orders(space.m);
    let mut out = Vec::new();
    let mut partial: Vec<Vec<u8>> = Vec::new();

    fn step_crossings(a: &[u8], b: &[u8]) -> usize {
        // Strict sign flips between two consecutive slices plus coincidences
        // at the first slice.
        let m = a.len();
        let mut c = 0;
        for s in 0..m {
            for t in (s + 1)..m {
                if a[s] == a[t] {
                    c += 1;
                } else if b[s] != b[t] && (a[s] < a[t]) != (b[s] < b[t]) {
                    c += 1;
                }
            }
        }
        c
    }

    fn ties_ok(prev: &[u8], here: &[u8], next: &[u8]) -> bool {
        let m = here.len();
        for s in 0..m {
            for t in (s + 1)..m {
                if here[s] == here[t] {
                    let a = (prev[s] as i32 - prev[t] as i32).signum();
                    let b = (next[s] as i32 - next[t] as i32).signum();
                    if a * b >= 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        space: &StateSpace,
        orders: &[Vec<u8>],
        budget: usize,
        cap: usize,
        used: usize,
        partial: &mut Vec<Vec<u8>>,
        out: &mut Vec<LevelState>,
    ) -> Result<(), SearchTooLarge> {
        if partial.len() == space.d {
            // Closure: wrap crossings and boundary tie checks.
            let mut pos = Vec::with_capacity(space.m * space.d);
            for sl in partial.iter() {
                pos.extend_from_slice(sl);
            }
            let st = LevelState { pos };
            if !space.is_valid(&st) {
                return Ok(());
            }
            if space.total_crossings(&st) <= budget {
                if out.len() >= cap {
                    return Err(SearchTooLarge(cap));
                }
                out.push(st);
            }
            return Ok(());
        }
        for ord in orders {
            let mut add = 0;
            if let Some(prev) = partial.last() {
                add = step_crossings(prev, ord);
                if used + add > budget {
                    continue;
                }
                if partial.len() >= 2 {
                    let p2 = &partial[partial.len() - 2];
                    if !ties_ok(p2, prev, ord) {
                        continue;
                    }
                }
            }
            partial.push(ord.clone());
            rec(space, orders, budget, cap, used + add, partial, out)?;
            partial.pop();
        }
        Ok(())
    }

    rec(space, &orders, budget, cap, 0, &mut partial, &mut out)?;
    Ok(out)
}

/// Group a set of states into connected components under moves of `movable`.
pub fn split_components(
    space: &StateSpace,
    states: &HashSet<LevelState>,
    movable: &[bool],
) -> Vec<Vec<LevelState>> {
    let mut remaining: HashSet<&LevelState> = states.iter().collect();
    let mut components = Vec::new();
    let mut keys: Vec<&LevelState> = states.iter().collect();
    keys.sort();
    for seed in keys {
        if !remaining.contains(seed) {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::new();
        remaining.remove(seed);
        queue.push_back(seed.clone());
        while let Some(st) = queue.pop_front() {
            comp.push(st.clone());
            for nb in space.neighbors(&st, movable) {
                if let Some(&found) = remaining.get(&nb) {
                    let found = found.clone();
                    remaining.remove(&found);
                    queue.push_back(found);
                }
            }
        }
        comp.sort();
        components.push(comp);
    }
    components.sort();
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::DiscretizedBraid;

    fn b_example() -> DiscretizedBraid {
        DiscretizedBraid::from_ints(&[&[1, 4, 1], &[2, 2, 2], &[3, 3, 3]]).unwrap()
    }

    #[test]
    fn state_round_trip() {
        let (space, st) = StateSpace::from_braid(&b_example());
        assert!(space.is_valid(&st));
        let back = space.to_braid(&st);
        assert!(back.validate().is_ok());
        assert_eq!(back.word_metric(), b_example().word_metric());
        let (_, st2) = StateSpace::from_braid(&back);
        assert_eq!(st, st2);
    }

    #[test]
    fn crossings_match_diagram() {
        let (space, st) = StateSpace::from_braid(&b_example());
        assert_eq!(space.total_crossings(&st), 4);
        assert_eq!(space.pair_crossings(&st, 0, 1), 2);
        assert_eq!(space.pair_crossings(&st, 0, 2), 2);
        assert_eq!(space.pair_crossings(&st, 1, 2), 0);
    }

    #[test]
    fn moves_preserve_class_data() {
        let (space, st) = StateSpace::from_braid(&b_example());
        let movable = vec![true; 3];
        for nb in space.neighbors(&st, &movable) {
            assert!(space.is_valid(&nb));
            assert_eq!(space.total_crossings(&nb), 4);
        }
        // The example is rigid up to monotone slides: a single canonical
        // state.
        let comp = space.component(&st, &movable, 1_000_000).unwrap();
        assert_eq!(comp.len(), 1);
    }

    #[test]
    fn weak_order_counts() {
        assert_eq!(weak_orders(1).len(), 1);
        assert_eq!(weak_orders(2).len(), 3);
        assert_eq!(weak_orders(3).len(), 13);
        assert!(weak_orders(3).contains(&vec![2, 0, 1]));
    }

    #[test]
    fn enumerate_finds_component_members() {
        let (space, st) = StateSpace::from_braid(&b_example());
        let all = enumerate_states(&space, 4, 10_000_000).unwrap();
        assert!(all.contains(&st));
        for s in &all {
            assert!(space.is_valid(s));
        }
    }
}
