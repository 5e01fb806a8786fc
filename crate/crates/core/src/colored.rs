//! 2-colored discretized braids: `n` free (red) strands relative to a fixed
//! skeleton of `m` black strands, fibers of the class over the skeleton, and
//! the decision procedures for proper / bounded / cylindrical.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::braid::{ev_compact, BraidError, DiscretizedBraid};
use crate::lattice::{LevelState, SearchTooLarge, StateSpace};
use crate::word::{permutation_cycles, ColoredWord, WordError};

#[derive(Debug, Error)]
pub enum ColoredError {
    #[error("red strand count {0} exceeds strand count {1}")]
    TooManyRed(usize, usize),
    #[error("closure permutation mixes red and black strands")]
    MixedClosure,
    #[error("the union braid is invalid: {0}")]
    InvalidUnion(String),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Search(#[from] SearchTooLarge),
}

/// How fiber membership in the topological class was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Exact colored-conjugacy test against the rewriting closure.
    Exact,
    /// Invariants only (pairwise cycle crossing counts and total length);
    /// used when the closure of the defining word is too large.
    Invariants,
}

/// A 2-colored discretized braid: strands `0..n` are red, the rest black.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBraid {
    n: usize,
    braid: DiscretizedBraid,
}

impl ColoredBraid {
    pub fn new(n: usize, braid: DiscretizedBraid) -> Result<Self, ColoredError> {
        let m = braid.strand_count();
        if n > m {
            return Err(ColoredError::TooManyRed(n, m));
        }
        for s in 0..m {
            if (s < n) != (braid.permutation()[s] < n) {
                return Err(ColoredError::MixedClosure);
            }
        }
        Ok(Self { n, braid })
    }

    /// Assemble from separate red and black strand lists.
    pub fn from_parts(red: Vec<Vec<crate::Rat>>, black: Vec<Vec<crate::Rat>>) -> Result<Self, ColoredError> {
        let n = red.len();
        let mut strands = red;
        strands.extend(black);
        let braid = DiscretizedBraid::from_strands(strands)?;
        Self::new(n, braid)
    }

    /// Realize a colored word as a colored braid, red strands first.  Uses
    /// the layer-packed evaluation, so the period is the number of
    /// permutation-braid layers of the word.
    pub fn from_word(cw: &ColoredWord, extra: usize) -> Result<Self, ColoredError> {
        let b = ev_compact(cw.word(), extra);
        let total = cw.word().strands();
        let n = cw.red_count();
        let mut zeta = vec![0usize; total];
        let mut next_red = 0;
        let mut next_black = n;
        for s in 0..total {
            if cw.red().contains(&(s + 1)) {
                zeta[s] = next_red;
                next_red += 1;
            } else {
                zeta[s] = next_black;
                next_black += 1;
            }
        }
        Self::new(n, b.relabel(&zeta))
    }

    pub fn red_count(&self) -> usize {
        self.n
    }

    pub fn black_count(&self) -> usize {
        self.braid.strand_count() - self.n
    }

    pub fn braid(&self) -> &DiscretizedBraid {
        &self.braid
    }

    pub fn period(&self) -> usize {
        self.braid.period()
    }

    pub fn validate(&self) -> Result<(), ColoredError> {
        match self.braid.validate() {
            crate::braid::Validity::Ok => Ok(()),
            crate::braid::Validity::Violation(v) => Err(ColoredError::InvalidUnion(v)),
        }
    }

    pub fn regularized(&self) -> ColoredBraid {
        ColoredBraid { n: self.n, braid: self.braid.regularize() }
    }

    /// The defining colored word: the word of the union braid together with
    /// the red start-height ranks.
    pub fn colored_word(&self) -> Result<ColoredWord, ColoredError> {
        let reg = if self.braid.is_regular() { self.clone() } else { self.regularized() };
        let gamma = reg.braid.braid_word();
        let mut starts: Vec<(crate::Rat, usize)> =
            (0..reg.braid.strand_count()).map(|s| (reg.braid.strands()[s][0].clone(), s)).collect();
        starts.sort();
        let mut red = BTreeSet::new();
        for (rank, (_, s)) in starts.iter().enumerate() {
            if *s < self.n {
                red.insert(rank + 1);
            }
        }
        Ok(ColoredWord::new(gamma, red)?)
    }

    /// Star augmentation: two constant black strands one unit outside the
    /// slice-wise extremes of the whole configuration.
    pub fn augment_star(&self) -> ColoredBraid {
        ColoredBraid { n: self.n, braid: self.braid.augment_star() }
    }

    /// Sawtooth augmentation on the black part.
    pub fn augment_saw(&self) -> ColoredBraid {
        ColoredBraid { n: self.n, braid: self.braid.augment_saw() }
    }

    pub fn extend(&self, k: usize) -> ColoredBraid {
        ColoredBraid { n: self.n, braid: self.braid.extend(k) }
    }

    pub fn dual(&self) -> Result<ColoredBraid, ColoredError> {
        Ok(ColoredBraid { n: self.n, braid: self.braid.dual()? })
    }

    pub fn full_twist_block(&self, k: usize) -> ColoredBraid {
        ColoredBraid { n: self.n, braid: self.braid.full_twist_block(k) }
    }
}

/// Options for fiber enumeration.
#[derive(Clone, Debug)]
pub struct FiberOptions {
    /// Cap on the colored rewriting closure before falling back to
    /// invariant-based membership.
    pub closure_cap: usize,
    /// Cap on enumerated states.
    pub state_cap: usize,
    /// Words longer than this skip the exact-closure membership test and use
    /// the crossing-count invariants directly.
    pub exact_word_limit: usize,
}

impl Default for FiberOptions {
    fn default() -> Self {
        Self { closure_cap: 400_000, state_cap: 4_000_000, exact_word_limit: 120 }
    }
}

/// The fiber of a 2-colored class over its skeleton: every red configuration
/// whose colored word lies in the class of the seed, grouped into path
/// components of the lattice model.
pub struct Fiber {
    pub space: StateSpace,
    pub n: usize,
    pub components: Vec<Vec<LevelState>>,
    pub seed_component: usize,
    pub membership: Membership,
    seed: LevelState,
}

/// Decision flags of a 2-colored class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFlags {
    pub proper: bool,
    pub bounded: bool,
    pub free: bool,
    /// Per red closure-cycle: `true` when the cycle cannot be slid past the
    /// skeleton.
    pub acylindrical: Vec<bool>,
    /// Witness for a properness failure: state index data for reporting.
    pub collapse_witness: Option<String>,
}

impl ClassFlags {
    pub fn all_acylindrical(&self) -> bool {
        self.acylindrical.iter().all(|&b| b)
    }
}

impl Fiber {
    /// Enumerate the fiber of the topological class of `cb`.
    pub fn build(cb: &ColoredBraid, opts: &FiberOptions) -> Result<Fiber, ColoredError> {
        let reg = cb.regularized();
        reg.validate()?;
        let n = reg.red_count();
        let (space, seed) = StateSpace::from_braid(reg.braid());

        // Exact membership set when the element-level closure is small
        // enough.
        let target = reg.colored_word()?;
        let exact = if target.word().len() > opts.exact_word_limit {
            None
        } else {
            match crate::garside::conjugacy_closure_elements(
                target.word(),
                target.red(),
                opts.closure_cap,
            ) {
                Ok(set) => Some(set),
                Err(WordError::ClosureTooLarge(_)) => None,
                Err(e) => return Err(e.into()),
            }
        };
        let membership = if exact.is_some() { Membership::Exact } else { Membership::Invariants };

        // Crossing budgets between closure cycles, from the seed.
        let budgets = cycle_budgets(&space, &seed, n);
        let total_budget: usize = space.total_crossings(&seed);

        let states = enumerate_fiber_states(
            &space,
            &seed,
            n,
            &budgets,
            total_budget,
            opts.state_cap,
            |st| match &exact {
                None => Ok(true),
                Some(set) => {
                    let cand = ColoredBraid::new(n, space.to_braid(st))
                        .expect("states preserve the red/black split");
                    let cw = cand.colored_word()?;
                    Ok(set.contains(cw.word(), cw.red()))
                }
            },
        )?;

        let state_set: HashSet<LevelState> = states.into_iter().collect();
        let movable = red_mask(&space, n);
        let components = crate::lattice::split_components(&space, &state_set, &movable);
        let seed_component = components
            .iter()
            .position(|c| c.binary_search(&seed).is_ok())
            .expect("seed belongs to its own fiber");
        Ok(Fiber { space, n, components, seed_component, membership, seed })
    }

    pub fn seed(&self) -> &LevelState {
        &self.seed
    }

    pub fn state_count(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    fn all_states(&self) -> impl Iterator<Item = &LevelState> {
        self.components.iter().flatten()
    }

    /// Proper: no red strand (cycle) admits an unobstructed collapse onto
    /// another strand from any state of the class.
    pub fn is_proper(&self) -> (bool, Option<String>) {
        let m = self.space.m;
        for st in self.all_states() {
            for r in 0..self.n {
                for t in 0..m {
                    if t == r {
                        continue;
                    }
                    if self.collapse_feasible(st, r, t) {
                        let witness = format!(
                            "red strand {} can collapse onto strand {} from state {:?}",
                            r + 1,
                            t + 1,
                            self.space.to_braid(st).strands()[r]
                        );
                        return (false, Some(witness));
                    }
                }
            }
        }
        (true, None)
    }

    /// A collapse of the closure cycle of `r` onto the cycle of `t` is
    /// feasible when the pairing of strands closes up (the target cycle
    /// length divides the red cycle length) and at every slice no third
    /// strand lies strictly between a collapsing pair or shares the level of
    /// the moving strand.  Red strands converging onto the same target move
    /// together and do not block each other.
    fn collapse_feasible(&self, st: &LevelState, r: usize, t: usize) -> bool {
        let cycle_len = |mut s: usize| {
            let start = s;
            let mut len = 1;
            s = self.space.perm[s];
            while s != start {
                len += 1;
                s = self.space.perm[s];
            }
            len
        };
        let lr = cycle_len(r);
        let lt = cycle_len(t);
        if lr % lt != 0 {
            return false;
        }
        let mut target_of: HashMap<usize, usize> = HashMap::new();
        let (mut x, mut y) = (r, t);
        for _ in 0..lr {
            if x == y {
                return false;
            }
            target_of.insert(x, y);
            x = self.space.perm[x];
            y = self.space.perm[y];
        }
        for (&x, &y) in &target_of {
            for j in 0..self.space.d {
                let lx = self.space.level(st, j as i64, x);
                let ly = self.space.level(st, j as i64, y);
                let (lo, hi) = (lx.min(ly), lx.max(ly));
                for u in 0..self.space.m {
                    if u == x || u == y || target_of.get(&u) == Some(&y) {
                        continue;
                    }
                    let lu = self.space.level(st, j as i64, u);
                    if (lo < lu && lu < hi) || (lu == lx && lx != ly) {
                        return false; // blocked at this slice by u
                    }
                }
            }
        }
        true
    }

    /// Bounded: no state puts a red strand strictly above or strictly below
    /// every other strand at some slice (such a coordinate is free to run
    /// away).
    pub fn is_bounded(&self) -> bool {
        for st in self.all_states() {
            for r in 0..self.n {
                for j in 0..self.space.d {
                    let lr = self.space.level(st, j as i64, r);
                    let mut above_all = true;
                    let mut below_all = true;
                    for u in 0..self.space.m {
                        if u == r {
                            continue;
                        }
                        let lu = self.space.level(st, j as i64, u);
                        if lu >= lr {
                            above_all = false;
                        }
                        if lu <= lr {
                            below_all = false;
                        }
                    }
                    if above_all || below_all {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Red closure cycles, each sorted, in sorted order.
    pub fn red_cycles(&self) -> Vec<Vec<usize>> {
        let cycles = permutation_cycles(&self.space.perm);
        let mut out: Vec<Vec<usize>> = cycles
            .into_iter()
            .filter(|c| c[0] < self.n)
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        out.sort();
        out
    }

    /// Acylindrical: the selected red cycle cannot reach a state where all
    /// of its strands sit strictly above (or strictly below) every black
    /// strand at every slice.
    pub fn is_acylindrical(&self, cycle: &[usize]) -> bool {
        for st in self.all_states() {
            let mut above = true;
            let mut below = true;
            for &r in cycle {
                for j in 0..self.space.d {
                    let lr = self.space.level(st, j as i64, r);
                    for b in self.n..self.space.m {
                        let lb = self.space.level(st, j as i64, b);
                        if lr <= lb {
                            above = false;
                        }
                        if lr >= lb {
                            below = false;
                        }
                    }
                }
            }
            if above || below {
                return false;
            }
        }
        true
    }

    /// Free: the lattice component of the seed exhausts the topological
    /// class.
    pub fn is_free(&self) -> bool {
        self.components.len() == 1
    }

    pub fn flags(&self) -> ClassFlags {
        let (proper, collapse_witness) = self.is_proper();
        let acylindrical = self.red_cycles().iter().map(|c| self.is_acylindrical(c)).collect();
        ClassFlags {
            proper,
            bounded: self.is_bounded(),
            free: self.is_free(),
            acylindrical,
            collapse_witness,
        }
    }
}

pub(crate) fn red_mask(space: &StateSpace, n: usize) -> Vec<bool> {
    (0..space.m).map(|s| s < n).collect()
}

/// Crossing budgets between closure cycles of the seed state, keyed by the
/// sorted pair of cycle representatives; only pairs touching a red cycle are
/// constrained (the black part is rigid).
fn cycle_budgets(
    space: &StateSpace,
    seed: &LevelState,
    n: usize,
) -> HashMap<(usize, usize), usize> {
    let cycles = permutation_cycles(&space.perm);
    let mut rep = vec![0usize; space.m];
    for c in &cycles {
        let r = *c.iter().min().unwrap();
        for &s in c {
            rep[s] = r;
        }
    }
    let mut budgets: HashMap<(usize, usize), usize> = HashMap::new();
    for s in 0..space.m {
        for t in (s + 1)..space.m {
            if s >= n && t >= n {
                continue;
            }
            let key = (rep[s].min(rep[t]), rep[s].max(rep[t]));
            *budgets.entry(key).or_insert(0) += space.pair_crossings(seed, s, t);
        }
    }
    budgets
}

/// Depth-first enumeration of all valid red placements over the fixed black
/// order, with per-cycle crossing budgets and a final membership check.
#[allow(clippy::too_many_arguments)]
fn enumerate_fiber_states<Fm>(
    space: &StateSpace,
    seed: &LevelState,
    n: usize,
    budgets: &HashMap<(usize, usize), usize>,
    total_budget: usize,
    cap: usize,
    member: Fm,
) -> Result<Vec<LevelState>, ColoredError>
where
    Fm: FnMut(&LevelState) -> Result<bool, ColoredError>,
{
    let m = space.m;
    let d = space.d;
    let mb = m - n;
    // Black order per slice, bottom to top, from the seed.
    let mut black_order: Vec<Vec<usize>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut blacks: Vec<(u8, usize)> =
            (n..m).map(|s| (seed.pos[j * m + s], s)).collect();
        blacks.sort();
        black_order.push(blacks.into_iter().map(|(_, s)| s).collect());
    }

    // All red placements of one slice: rank vectors over all m strands.
    let placements_per_slice: Vec<Vec<Vec<u8>>> = (0..d)
        .map(|j| slice_placements(n, mb, &black_order[j], m))
        .collect();

    let cycles = permutation_cycles(&space.perm);
    let mut rep = vec![0usize; m];
    for c in &cycles {
        let r = *c.iter().min().unwrap();
        for &s in c {
            rep[s] = r;
        }
    }

    struct Ctx<'a, Fm> {
        space: &'a StateSpace,
        n: usize,
        budgets: &'a HashMap<(usize, usize), usize>,
        total_budget: usize,
        cap: usize,
        member: Fm,
        rep: Vec<usize>,
        out: Vec<LevelState>,
    }

    fn step_used(
        a: &[u8],
        b: &[u8],
        n: usize,
        m: usize,
        used: &mut HashMap<(usize, usize), usize>,
        rep: &[usize],
    ) -> usize {
        let mut add_total = 0;
        for s in 0..m {
            for t in (s + 1)..m {
                if s >= n && t >= n {
                    continue;
                }
                let hit = if a[s] == a[t] {
                    true
                } else {
                    b[s] != b[t] && (a[s] < a[t]) != (b[s] < b[t])
                };
                if hit {
                    let key = (rep[s].min(rep[t]), rep[s].max(rep[t]));
                    *used.entry(key).or_insert(0) += 1;
                    add_total += 1;
                }
            }
        }
        add_total
    }

    fn ties_ok(prev: &[u8], here: &[u8], next: &[u8], n: usize, m: usize) -> bool {
        for s in 0..m {
            for t in (s + 1)..m {
                if s >= n && t >= n {
                    continue;
                }
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
    fn rec<Fm>(
        ctx: &mut Ctx<Fm>,
        placements: &[Vec<Vec<u8>>],
        partial: &mut Vec<Vec<u8>>,
        used: &mut HashMap<(usize, usize), usize>,
        used_total: usize,
    ) -> Result<(), ColoredError>
    where
        Fm: FnMut(&LevelState) -> Result<bool, ColoredError>,
    {
        let d = ctx.space.d;
        let m = ctx.space.m;
        if partial.len() == d {
            let mut pos = Vec::with_capacity(m * d);
            for sl in partial.iter() {
                pos.extend_from_slice(sl);
            }
            let st = LevelState { pos };
            if !ctx.space.is_valid(&st) {
                return Ok(());
            }
            if ctx.space.total_crossings(&st) != ctx.total_budget {
                return Ok(());
            }
            // Exact per-cycle budget match.
            let mut per_cycle: HashMap<(usize, usize), usize> = HashMap::new();
            for s in 0..m {
                for t in (s + 1)..m {
                    if s >= ctx.n && t >= ctx.n {
                        continue;
                    }
                    let key = (ctx.rep[s].min(ctx.rep[t]), ctx.rep[s].max(ctx.rep[t]));
                    *per_cycle.entry(key).or_insert(0) += ctx.space.pair_crossings(&st, s, t);
                }
            }
            for (key, want) in ctx.budgets {
                if per_cycle.get(key).copied().unwrap_or(0) != *want {
                    return Ok(());
                }
            }
            for (key, have) in &per_cycle {
                if ctx.budgets.get(key).copied().unwrap_or(0) != *have {
                    return Ok(());
                }
            }
            if !(ctx.member)(&st)? {
                return Ok(());
            }
            if ctx.out.len() >= ctx.cap {
                return Err(SearchTooLarge(ctx.cap).into());
            }
            ctx.out.push(st);
            return Ok(());
        }
        let j = partial.len();
        let options = placements[j].clone();
        for opt in options {
            let mut add_map: HashMap<(usize, usize), usize> = HashMap::new();
            let mut add_total = 0;
            if let Some(prev) = partial.last() {
                add_total = step_used(prev, &opt, ctx.n, m, &mut add_map, &ctx.rep);
                if used_total + add_total > ctx.total_budget {
                    continue;
                }
                let mut over = false;
                for (key, v) in &add_map {
                    let have = used.get(key).copied().unwrap_or(0) + v;
                    if have > ctx.budgets.get(key).copied().unwrap_or(0) {
                        over = true;
                        break;
                    }
                }
                if over {
                    continue;
                }
                if partial.len() >= 2 {
                    let p2 = &partial[partial.len() - 2];
                    if !ties_ok(p2, prev, &opt, ctx.n, m) {
                        continue;
                    }
                }
            }
            for (key, v) in &add_map {
                *used.entry(*key).or_insert(0) += v;
            }
            partial.push(opt);
            rec(ctx, placements, partial, used, used_total + add_total)?;
            partial.pop();
            for (key, v) in &add_map {
                *used.get_mut(key).unwrap() -= v;
            }
        }
        Ok(())
    }

    let mut ctx = Ctx {
        space,
        n,
        budgets,
        total_budget,
        cap,
        member,
        rep,
        out: Vec::new(),
    };
    let mut partial = Vec::new();
    let mut used = HashMap::new();
    rec(&mut ctx, &placements_per_slice, &mut partial, &mut used, 0)?;
    Ok(ctx.out)
}

/// All rank vectors of one slice: blacks in their fixed order, reds inserted
/// at black levels, strictly between, or tied with other reds in a gap.
fn slice_placements(n: usize, mb: usize, black_order: &[usize], m: usize) -> Vec<Vec<u8>> {
    // Slots along the line: gap g (0..=mb) and black k (0..mb) alternate:
    // gap 0, black 0, gap 1, black 1, ..., black mb-1, gap mb.
    // A red is assigned a slot; reds sharing a gap slot additionally carry a
    // weak order.
    let slots = 2 * mb + 1;
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];

    fn emit(
        mb: usize,
        black_order: &[usize],
        m: usize,
        assign: &[usize],
        out: &mut Vec<Vec<u8>>,
    ) {
        // Group reds per slot.
        let mut per_slot: Vec<Vec<usize>> = vec![Vec::new(); 2 * mb + 1];
        for (r, &sl) in assign.iter().enumerate() {
            per_slot[sl].push(r);
        }
        // Enumerate weak orders of reds within each gap slot.
        let gap_slots: Vec<usize> =
            (0..2 * mb + 1).filter(|s| s % 2 == 0 && !per_slot[*s].is_empty()).collect();
        let order_choices: Vec<Vec<Vec<u8>>> = gap_slots
            .iter()
            .map(|&sl| crate::lattice::weak_orders(per_slot[sl].len()))
            .collect();
        let mut idx = vec![0usize; gap_slots.len()];
        loop {
            // Build the rank vector.
            let mut ranks = vec![0u8; m];
            let mut level: u8 = 0;
            let mut first = true;
            for sl in 0..2 * mb + 1 {
                if sl % 2 == 1 {
                    // Black slot: one level holding the black and its reds.
                    if !first {
                        level += 1;
                    }
                    first = false;
                    ranks[black_order[sl / 2]] = level;
                    for &r in &per_slot[sl] {
                        ranks[r] = level;
                    }
                } else if !per_slot[sl].is_empty() {
                    let gi = gap_slots.iter().position(|&g| g == sl).unwrap();
                    let ord = &order_choices[gi][idx[gi]];
                    let sub_levels = *ord.iter().max().unwrap() as usize + 1;
                    for sub in 0..sub_levels {
                        if !first {
                            level += 1;
                        }
                        first = false;
                        for (k, &r) in per_slot[sl].iter().enumerate() {
                            if ord[k] as usize == sub {
                                ranks[r] = level;
                            }
                        }
                    }
                }
            }
            out.push(ranks);
            // Advance the mixed-radix index over weak orders.
            let mut carry = 0;
            loop {
                if carry >= idx.len() {
                    return;
                }
                idx[carry] += 1;
                if idx[carry] < order_choices[carry].len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
        }
    }

    fn rec(
        n: usize,
        mb: usize,
        slots: usize,
        black_order: &[usize],
        m: usize,
        k: usize,
        assign: &mut Vec<usize>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if k == n {
            emit(mb, black_order, m, assign, out);
            return;
        }
        for sl in 0..slots {
            assign[k] = sl;
            rec(n, mb, slots, black_order, m, k + 1, assign, out);
        }
    }

    rec(n, mb, slots, black_order, m, 0, &mut assign, &mut out);
    out.sort();
    out.dedup();
    out
}
