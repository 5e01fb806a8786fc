//! Index pairs of fiber components and their relative homology.
//!
//! A proper bounded component is covered by chambers: per red strand and
//! slice, the code `2g` places the strand in the `g`-th gap of the black
//! order, the code `2k+1` on the `k`-th black level.  The closure of the
//! chambers is a cube complex `N` (gaps are edges, black levels vertices);
//! the exit set collects the boundary cells whose every outward chamber
//! strictly decreases the word metric, closed under faces.  Directions in
//! which the component is pinned with uniform wall behaviour are split off
//! symbolically: exit walls on both sides suspend the index, entrance walls
//! on both sides drop out, and a mixed pinned direction kills the index.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::colored::{ClassFlags, ColoredBraid, ColoredError, Fiber, FiberOptions, Membership};
use crate::snf::{rank_mod2, smith_diagonal};
use crate::word::ColoredWord;

#[derive(Debug, Error)]
pub enum ConleyError {
    #[error("class is not proper: {0}")]
    Improper(String),
    #[error("class is not bounded; augment the skeleton first")]
    Unbounded,
    #[error("two free strands share a gap; this geometry is not supported")]
    SharedGap,
    #[error("index complex exceeded {0} cells")]
    TooLarge(usize),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Colored(#[from] ColoredError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Integer,
    Mod2,
}

#[derive(Clone, Debug)]
pub struct IndexOptions {
    pub coefficients: Coefficients,
    pub fiber: FiberOptions,
    pub cell_cap: usize,
    /// Split off uniformly pinned directions symbolically.
    pub symbolic_reduction: bool,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            coefficients: Coefficients::Integer,
            fiber: FiberOptions::default(),
            cell_cap: 3_000_000,
            symbolic_reduction: true,
        }
    }
}

/// Betti numbers and torsion summands per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<i128>>,
}

impl HomologyResult {
    pub fn zero() -> Self {
        Self { betti: Vec::new(), torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti.iter().all(|&b| b == 0) && self.torsion.iter().all(|t| t.is_empty())
    }

    pub fn shifted(&self, k: usize) -> Self {
        let mut betti = vec![0; k];
        betti.extend_from_slice(&self.betti);
        let mut torsion = vec![Vec::new(); k];
        torsion.extend(self.torsion.iter().cloned());
        Self { betti, torsion }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let len = self.betti.len().max(other.betti.len());
        let mut betti = vec![0; len];
        let mut torsion = vec![Vec::new(); len];
        for k in 0..len {
            betti[k] = self.betti.get(k).copied().unwrap_or(0)
                + other.betti.get(k).copied().unwrap_or(0);
            let mut t = self.torsion.get(k).cloned().unwrap_or_default();
            t.extend(other.torsion.get(k).cloned().unwrap_or_default());
            t.sort();
            torsion[k] = t;
        }
        Self { betti, torsion }
    }

    /// Drop trailing zero degrees.
    pub fn trimmed(&self) -> Self {
        let mut end = self.betti.len();
        while end > 0
            && self.betti[end - 1] == 0
            && self.torsion.get(end - 1).map_or(true, |t| t.is_empty())
        {
            end -= 1;
        }
        Self {
            betti: self.betti[..end].to_vec(),
            torsion: self.torsion.iter().take(end).cloned().collect(),
        }
    }

    /// Poincare polynomial of the free part, e.g. `t^4 + t^5`.
    pub fn poincare(&self) -> String {
        let mut terms = Vec::new();
        for (k, &b) in self.betti.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let coeff = if b == 1 { String::new() } else { format!("{b}*") };
            let mono = match k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            terms.push(format!("{coeff}{mono}"));
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    /// Number of monomials of the Poincare polynomial (the forcing lower
    /// bound).
    pub fn monomial_count(&self) -> usize {
        self.betti.iter().filter(|&&b| b > 0).count()
    }
}

/// The index pair of one fiber component over the active directions, plus
/// the symbolic suspension bookkeeping.
#[derive(Clone, Debug)]
pub struct IndexPair {
    /// Active `(red, slice)` directions, as indices `r * d + j`.
    pub active: Vec<usize>,
    /// Suspension shift contributed by pinned exit-exit directions.
    pub shift: usize,
    /// A pinned direction with exactly one exit wall trivializes the index.
    pub killed: bool,
    pub chambers: usize,
    /// All cells of `N`, as active-direction code vectors.
    pub cells: Vec<Vec<u8>>,
    /// The exit set, a face-closed subset of the cells.
    pub exit: HashSet<Vec<u8>>,
}

impl IndexPair {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn exit_count(&self) -> usize {
        self.exit.len()
    }

    pub fn relative_cell_count(&self) -> usize {
        self.cells.len() - self.exit.len()
    }

    fn dim_of(cell: &[u8]) -> usize {
        cell.iter().filter(|&&c| c % 2 == 0).count()
    }

    /// Euler characteristic of the relative complex, including the shift.
    pub fn euler_characteristic(&self) -> i64 {
        if self.killed {
            return 0;
        }
        let mut chi: i64 = 0;
        for cell in &self.cells {
            if self.exit.contains(cell) {
                continue;
            }
            let dim = Self::dim_of(cell) + self.shift;
            chi += if dim % 2 == 0 { 1 } else { -1 };
        }
        chi
    }
}

/// Geometry shared by all chambers of one component: black positional ranks
/// per slice and the closure transport.
struct Geometry {
    n: usize,
    d: usize,
    mb: usize,
    black_rank: Vec<Vec<usize>>,
    red_perm: Vec<usize>,
    black_perm: Vec<usize>,
}

impl Geometry {
    fn from_fiber(fiber: &Fiber) -> Geometry {
        let space = &fiber.space;
        let n = fiber.n;
        let d = space.d;
        let mb = space.m - n;
        // Black order is state-independent; read it off any state.
        let st = fiber.seed();
        let mut black_rank = vec![vec![0; mb]; d];
        for j in 0..d {
            let mut blacks: Vec<(u8, usize)> =
                (0..mb).map(|b| (st.pos[j * space.m + n + b], b)).collect();
            blacks.sort();
            for (rank, &(_, b)) in blacks.iter().enumerate() {
                black_rank[j][b] = rank;
            }
        }
        let red_perm = (0..n).map(|r| space.perm[r]).collect();
        let black_perm = (0..mb).map(|b| space.perm[n + b] - n).collect();
        Geometry { n, d, mb, black_rank, red_perm, black_perm }
    }

    fn code(&self, codes: &[u8], r: usize, j: usize) -> i32 {
        codes[r * self.d + j] as i32
    }

    /// Word-metric contribution of the red strands in a chamber.
    fn metric_red(&self, codes: &[u8]) -> Result<usize, ConleyError> {
        let mut total = 0;
        for r in 0..self.n {
            for b in 0..self.mb {
                let mut signs = Vec::with_capacity(self.d + 1);
                for j in 0..self.d {
                    let wall = 2 * self.black_rank[j][b] as i32 + 1;
                    signs.push((self.code(codes, r, j) - wall).signum());
                }
                let wall = 2 * self.black_rank[0][self.black_perm[b]] as i32 + 1;
                signs.push((self.code(codes, self.red_perm[r], 0) - wall).signum());
                total += count_crossings(&signs);
            }
        }
        for r in 0..self.n {
            for s in (r + 1)..self.n {
                let mut signs = Vec::with_capacity(self.d + 1);
                for j in 0..self.d {
                    let a = self.code(codes, r, j);
                    let b = self.code(codes, s, j);
                    if a == b {
                        return Err(ConleyError::SharedGap);
                    }
                    signs.push((a - b).signum());
                }
                let a = self.code(codes, self.red_perm[r], 0);
                let b = self.code(codes, self.red_perm[s], 0);
                signs.push((a - b).signum());
                total += count_crossings(&signs);
            }
        }
        Ok(total)
    }
}

fn count_crossings(signs: &[i32]) -> usize {
    let d = signs.len() - 1;
    let mut count = 0;
    for j in 0..d {
        if signs[j] == 0 {
            count += 1;
        } else if signs[j + 1] != 0 && signs[j + 1] != signs[j] {
            count += 1;
        }
    }
    count
}

/// Chamber code vector of a state, or `None` when some red strand sits on a
/// wall (the state is not a chamber).
fn chamber_codes(fiber: &Fiber, st: &crate::lattice::LevelState) -> Result<Option<Vec<u8>>, ConleyError> {
    let space = &fiber.space;
    let n = fiber.n;
    let d = space.d;
    let mut codes = vec![0u8; n * d];
    for j in 0..d {
        for r in 0..n {
            let lr = st.pos[j * space.m + r];
            let mut below = 0;
            for b in n..space.m {
                let lb = st.pos[j * space.m + b];
                if lb < lr {
                    below += 1;
                } else if lb == lr {
                    return Ok(None);
                }
            }
            for s in 0..n {
                if s != r && st.pos[j * space.m + s] == lr {
                    return Ok(None);
                }
            }
            codes[r * d + j] = 2 * below as u8;
        }
    }
    // Two reds in one gap have distinct levels but equal codes.
    for j in 0..d {
        for r in 0..n {
            for s in (r + 1)..n {
                if codes[r * d + j] == codes[s * d + j] {
                    return Err(ConleyError::SharedGap);
                }
            }
        }
    }
    Ok(Some(codes))
}

/// Build the index pair of one component of the fiber.
pub fn component_index_pair(
    fiber: &Fiber,
    component: usize,
    opts: &IndexOptions,
) -> Result<IndexPair, ConleyError> {
    let geom = Geometry::from_fiber(fiber);
    let d = geom.d;
    let n = geom.n;
    let nd = n * d;

    let mut chambers_full: HashSet<Vec<u8>> = HashSet::new();
    for st in &fiber.components[component] {
        if let Some(codes) = chamber_codes(fiber, st)? {
            chambers_full.insert(codes);
        }
    }
    if chambers_full.is_empty() {
        return Ok(IndexPair {
            active: Vec::new(),
            shift: 0,
            killed: false,
            chambers: 0,
            cells: Vec::new(),
            exit: HashSet::new(),
        });
    }

    let mut chambers_sorted: Vec<Vec<u8>> = chambers_full.iter().cloned().collect();
    chambers_sorted.sort();
    let template = chambers_sorted[0].clone();
    let m0 = geom.metric_red(&template)?;
    for c in &chambers_sorted {
        if geom.metric_red(c)? != m0 {
            return Err(ConleyError::Inconsistent(
                "chambers of one component disagree on the word metric".into(),
            ));
        }
    }

    // Classify directions.
    let mut active = Vec::new();
    let mut shift = 0usize;
    let mut killed = false;
    for q in 0..nd {
        let varies = chambers_sorted.iter().any(|c| c[q] != template[q]);
        if varies || !opts.symbolic_reduction {
            active.push(q);
            continue;
        }
        // Pinned direction: wall behaviour per chamber and side.
        let mut lo_exit = 0usize;
        let mut hi_exit = 0usize;
        let total = chambers_sorted.len();
        let mut mixed = false;
        for c in &chambers_sorted {
            for (side, counter) in [(-2i32, &mut lo_exit), (2i32, &mut hi_exit)] {
                let code = c[q] as i32 + side;
                if !(0..=(2 * geom.mb as i32)).contains(&code) {
                    return Err(ConleyError::Unbounded);
                }
                let mut nb = c.clone();
                nb[q] = code as u8;
                let met = geom.metric_red(&nb)?;
                if met == m0 {
                    return Err(ConleyError::Inconsistent(
                        "neighbouring chamber of equal metric missing from the component".into(),
                    ));
                }
                if met < m0 {
                    *counter += 1;
                }
            }
        }
        if (lo_exit != 0 && lo_exit != total) || (hi_exit != 0 && hi_exit != total) {
            mixed = true;
        }
        if mixed {
            active.push(q);
            continue;
        }
        let lo = lo_exit == total;
        let hi = hi_exit == total;
        match (lo, hi) {
            (true, true) => shift += 1,
            (false, false) => {}
            _ => killed = true,
        }
    }

    if killed {
        return Ok(IndexPair {
            active,
            shift,
            killed: true,
            chambers: chambers_sorted.len(),
            cells: Vec::new(),
            exit: HashSet::new(),
        });
    }

    // Explicit cube complex over the active directions.
    let project = |c: &[u8]| -> Vec<u8> { active.iter().map(|&q| c[q]).collect() };
    let chambers_act: HashSet<Vec<u8>> = chambers_sorted.iter().map(|c| project(c)).collect();
    let inflate = |act: &[u8]| -> Vec<u8> {
        let mut full = template.clone();
        for (k, &q) in active.iter().enumerate() {
            full[q] = act[k];
        }
        full
    };

    let mut cells: HashSet<Vec<u8>> = HashSet::new();
    let mut queue: VecDeque<Vec<u8>> = VecDeque::new();
    for c in &chambers_act {
        cells.insert(c.clone());
        queue.push_back(c.clone());
    }
    while let Some(cell) = queue.pop_front() {
        for p in 0..cell.len() {
            if cell[p] % 2 == 0 {
                for delta in [-1i32, 1] {
                    let mut face = cell.clone();
                    face[p] = (cell[p] as i32 + delta) as u8;
                    if !cells.contains(&face) {
                        if cells.len() >= opts.cell_cap {
                            return Err(ConleyError::TooLarge(opts.cell_cap));
                        }
                        cells.insert(face.clone());
                        queue.push_back(face);
                    }
                }
            }
        }
    }

    // Exit classification: locally maximal word metric on the boundary.
    let mut metric_memo: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut metric_of = |act: &Vec<u8>, geom: &Geometry| -> Result<usize, ConleyError> {
        if let Some(&v) = metric_memo.get(act) {
            return Ok(v);
        }
        let v = geom.metric_red(&inflate(act))?;
        metric_memo.insert(act.clone(), v);
        Ok(v)
    };

    let mut raw_exit: Vec<Vec<u8>> = Vec::new();
    for cell in &cells {
        let walls: Vec<usize> = (0..cell.len()).filter(|&p| cell[p] % 2 == 1).collect();
        // Enumerate adjacent chambers.
        let mut outward = Vec::new();
        let mut interior = true;
        let combos = 1usize << walls.len();
        for mask in 0..combos {
            let mut ch = cell.clone();
            for (bit, &p) in walls.iter().enumerate() {
                let delta = if mask & (1 << bit) != 0 { 1 } else { -1i32 };
                ch[p] = (ch[p] as i32 + delta) as u8;
            }
            if !chambers_act.contains(&ch) {
                interior = false;
                outward.push(ch);
            }
        }
        if interior {
            continue;
        }
        let mut exit = true;
        for ch in &outward {
            let met = metric_of(ch, &geom)?;
            if met >= m0 {
                exit = false;
                break;
            }
        }
        if exit {
            raw_exit.push(cell.clone());
        }
    }

    // Face closure of the exit cells.
    let mut exit: HashSet<Vec<u8>> = HashSet::new();
    let mut queue: VecDeque<Vec<u8>> = raw_exit.into_iter().collect();
    for cell in &queue {
        exit.insert(cell.clone());
    }
    while let Some(cell) = queue.pop_front() {
        exit.insert(cell.clone());
        for p in 0..cell.len() {
            if cell[p] % 2 == 0 {
                for delta in [-1i32, 1] {
                    let mut face = cell.clone();
                    face[p] = (cell[p] as i32 + delta) as u8;
                    if !exit.contains(&face) {
                        queue.push_back(face);
                    }
                }
            }
        }
    }

    let mut cells: Vec<Vec<u8>> = cells.into_iter().collect();
    cells.sort();
    Ok(IndexPair {
        active,
        shift,
        killed: false,
        chambers: chambers_sorted.len(),
        cells,
        exit,
    })
}

/// Relative homology of the pair, over the requested coefficients.
pub fn relative_homology(
    pair: &IndexPair,
    coefficients: Coefficients,
) -> Result<HomologyResult, ConleyError> {
    if pair.killed {
        return Ok(HomologyResult::zero());
    }
    // Relative cells.
    let rel: Vec<&Vec<u8>> = pair.cells.iter().filter(|c| !pair.exit.contains(*c)).collect();
    if rel.is_empty() {
        return Ok(HomologyResult::zero());
    }
    let index: HashMap<&Vec<u8>, usize> = rel.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut complex = ChainComplex::new(rel.len());
    for (i, cell) in rel.iter().enumerate() {
        complex.dim[i] = IndexPair::dim_of(cell);
        let mut sign = 1i128;
        for p in 0..cell.len() {
            if cell[p] % 2 == 0 {
                for (delta, orient) in [(1i32, sign), (-1i32, -sign)] {
                    let mut face = (*cell).clone();
                    face[p] = (cell[p] as i32 + delta) as u8;
                    if let Some(&fi) = index.get(&face) {
                        complex.add_boundary(i, fi, orient);
                    }
                }
                sign = -sign;
            }
        }
    }
    complex.reduce();
    let top = complex.dim.iter().copied().max().unwrap_or(0);
    let mut betti = vec![0usize; top + 1];
    let mut torsion = vec![Vec::new(); top + 1];

    // Count remaining cells and boundary ranks per degree.
    let mut counts = vec![0usize; top + 2];
    for i in 0..complex.len() {
        if complex.alive[i] {
            counts[complex.dim[i]] += 1;
        }
    }
    let mut ranks = vec![0usize; top + 2];
    let mut diags: Vec<Vec<i128>> = vec![Vec::new(); top + 2];
    for k in 1..=top {
        let mat = complex.boundary_matrix(k);
        if mat.is_empty() || mat[0].is_empty() {
            continue;
        }
        match coefficients {
            Coefficients::Integer => {
                let diag = smith_diagonal(mat);
                ranks[k] = diag.iter().filter(|&&v| v != 0).count();
                diags[k] = diag.into_iter().filter(|&v| v.abs() > 1).collect();
            }
            Coefficients::Mod2 => {
                ranks[k] = rank_mod2(&mat);
            }
        }
    }
    for k in 0..=top {
        let r_k = ranks[k];
        let r_k1 = ranks.get(k + 1).copied().unwrap_or(0);
        betti[k] = counts[k].saturating_sub(r_k + r_k1);
        if coefficients == Coefficients::Integer {
            if k >= 1 {
                // torsion in degree k-1 comes from the SNF of d_k
                torsion[k - 1].extend(diags[k].iter().copied());
                torsion[k - 1].sort();
            }
        }
    }
    Ok(HomologyResult { betti, torsion }.shifted(pair.shift).trimmed())
}

struct ChainComplex {
    dim: Vec<usize>,
    boundary: Vec<HashMap<usize, i128>>,
    coboundary: Vec<HashSet<usize>>,
    alive: Vec<bool>,
}

impl ChainComplex {
    fn new(len: usize) -> Self {
        Self {
            dim: vec![0; len],
            boundary: vec![HashMap::new(); len],
            coboundary: vec![HashSet::new(); len],
            alive: vec![true; len],
        }
    }

    fn len(&self) -> usize {
        self.dim.len()
    }

    fn add_boundary(&mut self, cell: usize, face: usize, coeff: i128) {
        let entry = self.boundary[cell].entry(face).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.boundary[cell].remove(&face);
            self.coboundary[face].remove(&cell);
        } else {
            self.coboundary[face].insert(cell);
        }
    }

    /// Cancel unit-coefficient incidences (algebraic Morse reduction); the
    /// homology of the complex is unchanged, including torsion.
    fn reduce(&mut self) {
        let mut queue: VecDeque<usize> = (0..self.len()).collect();
        while let Some(b) = queue.pop_front() {
            if !self.alive[b] {
                continue;
            }
            let pick = self.boundary[b]
                .iter()
                .filter(|&(_, &c)| c == 1 || c == -1)
                .min_by_key(|&(&a, _)| self.coboundary[a].len())
                .map(|(&a, &c)| (a, c));
            let (a, eps) = match pick {
                None => continue,
                Some(p) => p,
            };
            // Cancel the pair (a, b).
            let b_boundary: Vec<(usize, i128)> =
                self.boundary[b].iter().map(|(&f, &c)| (f, c)).collect();
            let a_cofaces: Vec<usize> =
                self.coboundary[a].iter().copied().filter(|&c| c != b).collect();
            for &c in &a_cofaces {
                let gamma = self.boundary[c][&a];
                let factor = -gamma / eps; // eps is +-1
                for &(f, coeff) in &b_boundary {
                    self.add_boundary(c, f, factor * coeff);
                }
                queue.push_back(c);
            }
            // Remove a and b from the complex.
            for (&f, _) in self.boundary[b].clone().iter() {
                self.coboundary[f].remove(&b);
            }
            for &c in self.coboundary[a].clone().iter() {
                self.boundary[c].remove(&a);
            }
            for (&f, _) in self.boundary[a].clone().iter() {
                self.coboundary[f].remove(&a);
            }
            for &c in self.coboundary[b].clone().iter() {
                self.boundary[c].remove(&b);
                queue.push_back(c);
            }
            self.boundary[a].clear();
            self.boundary[b].clear();
            self.coboundary[a].clear();
            self.coboundary[b].clear();
            self.alive[a] = false;
            self.alive[b] = false;
        }
    }

    /// Dense boundary matrix from degree `k` to `k-1` over the survivors.
    fn boundary_matrix(&self, k: usize) -> Vec<Vec<i128>> {
        let rows: Vec<usize> =
            (0..self.len()).filter(|&i| self.alive[i] && self.dim[i] + 1 == k).collect();
        let cols: Vec<usize> =
            (0..self.len()).filter(|&i| self.alive[i] && self.dim[i] == k).collect();
        let row_index: HashMap<usize, usize> =
            rows.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut mat = vec![vec![0i128; cols.len()]; rows.len()];
        for (jc, &c) in cols.iter().enumerate() {
            for (&f, &coeff) in &self.boundary[c] {
                if let Some(&ir) = row_index.get(&f) {
                    mat[ir][jc] = coeff;
                }
            }
        }
        mat
    }
}

/// The homology of one full fiber: wedge (degree-wise sum) over components.
#[derive(Clone, Debug)]
pub struct IndexReport {
    pub homology: HomologyResult,
    pub components: Vec<HomologyResult>,
    pub flags: ClassFlags,
    pub membership: Membership,
    pub augmented: bool,
    pub period: usize,
    pub fiber_states: usize,
}

impl IndexReport {
    pub fn lower_bound(&self) -> usize {
        self.homology.monomial_count()
    }
}

/// Index of a colored braid class, star-augmenting the skeleton first.
/// Requires the class to be proper.
pub fn braid_index(cb: &ColoredBraid, opts: &IndexOptions) -> Result<IndexReport, ConleyError> {
    braid_index_impl(&cb.augment_star(), opts, true)
}

/// Index of a colored braid class exactly as given, without augmentation.
pub fn braid_index_raw(cb: &ColoredBraid, opts: &IndexOptions) -> Result<IndexReport, ConleyError> {
    braid_index_impl(cb, opts, false)
}

/// Index of the class of a 2-colored word.
pub fn class_index(cw: &ColoredWord, opts: &IndexOptions) -> Result<IndexReport, ConleyError> {
    let cb = ColoredBraid::from_word(cw, 0)?;
    braid_index(&cb, opts)
}

fn braid_index_impl(
    cb: &ColoredBraid,
    opts: &IndexOptions,
    augmented: bool,
) -> Result<IndexReport, ConleyError> {
    let fiber = Fiber::build(cb, &opts.fiber)?;
    let flags = fiber.flags();
    if !flags.proper {
        return Err(ConleyError::Improper(
            flags.collapse_witness.clone().unwrap_or_else(|| "collapse found".into()),
        ));
    }
    if !flags.bounded {
        return Err(ConleyError::Unbounded);
    }
    let mut components = Vec::new();
    let mut total = HomologyResult::zero();
    for k in 0..fiber.components.len() {
        let pair = component_index_pair(&fiber, k, opts)?;
        let hom = relative_homology(&pair, opts.coefficients)?;
        total = total.wedge(&hom);
        components.push(hom);
    }
    Ok(IndexReport {
        homology: total.trimmed(),
        components,
        flags,
        membership: fiber.membership,
        augmented,
        period: cb.period(),
        fiber_states: fiber.state_count(),
    })
}

/// Stabilization: the index of the star-augmented class is unchanged by the
/// trivial extension.
pub fn check_stabilization(cb: &ColoredBraid, opts: &IndexOptions) -> Result<bool, ConleyError> {
    let star = cb.augment_star();
    let base = braid_index_raw(&star, opts)?;
    let ext = braid_index_raw(&star.extend(1), opts)?;
    Ok(base.homology == ext.homology)
}

/// Duality: a full-twist block after dualization suspends the index by twice
/// the number of free strands.
pub fn check_duality(cb: &ColoredBraid, opts: &IndexOptions) -> Result<bool, ConleyError> {
    let star = cb.augment_star();
    let dual = star.dual()?;
    let lhs = braid_index_raw(&dual.full_twist_block(1), opts)?;
    let rhs = braid_index_raw(&dual, opts)?;
    Ok(lhs.homology == rhs.homology.shifted(2 * cb.red_count()).trimmed())
}
