//! The positive braid monoid: words, positive equality and conjugacy,
//! 2-colored words, color projection, and the symmetric normal form.
//!
//! Equality (`positive_equal`) and conjugacy are decided by exhaustive
//! length-preserving rewriting: both relation families preserve word length,
//! so the closure of a word under rewrites is finite.  This is exact and
//! practical for desk-scale words; closures are capped and report
//! [`WordError::ClosureTooLarge`] beyond the cap.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {0} out of range for {1} strands")]
    BadGenerator(usize, usize),
    #[error("strand counts differ: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("red set {0:?} is not a union of cycles of the induced permutation")]
    InvalidColoring(Vec<usize>),
    #[error("red set entry {0} out of range 1..={1}")]
    BadColorEntry(usize, usize),
    #[error("rewriting closure exceeded {0} states; word too long for exact search")]
    ClosureTooLarge(usize),
}

/// Default cap on rewriting-closure sizes.
pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;

/// A word in the positive braid monoid on `strands` strands.
///
/// Letters are 1-based generator indices `i`, each exchanging positions `i`
/// and `i+1`.  The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositiveWord {
    strands: usize,
    letters: Vec<usize>,
}

impl fmt::Debug for PositiveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PositiveWord(m={}; {})", self.strands, self)
    }
}

impl fmt::Display for PositiveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let s: Vec<String> = self.letters.iter().map(|i| format!("s{i}")).collect();
        write!(f, "{}", s.join(" "))
    }
}

impl PositiveWord {
    pub fn new(strands: usize, letters: Vec<usize>) -> Result<Self, WordError> {
        assert!(strands >= 1, "a braid needs at least one strand");
        for &i in &letters {
            if i == 0 || i + 1 > strands {
                return Err(WordError::BadGenerator(i, strands));
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn identity(strands: usize) -> Self {
        Self { strands, letters: Vec::new() }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Result<Self, WordError> {
        if self.strands != other.strands {
            return Err(WordError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self { strands: self.strands, letters })
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Self { strands: self.strands, letters }
    }

    /// Permutation induced by the word: `perm[p]` is the final position of a
    /// strand starting at position `p` (0-based).
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands).collect();
        for p in perm.iter_mut() {
            *p = self.apply_to_position(*p);
        }
        perm
    }

    /// Image of a single 0-based position under the word.
    pub fn apply_to_position(&self, pos: usize) -> usize {
        let mut p = pos;
        for &i in &self.letters {
            if p + 1 == i {
                p = i;
            } else if p == i {
                p = i - 1;
            }
        }
        p
    }

    /// One-step rewrites by the two braid-relation families.
    fn rewrites(&self) -> Vec<Vec<usize>> {
        let w = &self.letters;
        let mut out = Vec::new();
        for k in 0..w.len().saturating_sub(1) {
            let (a, b) = (w[k], w[k + 1]);
            if a.abs_diff(b) >= 2 {
                let mut v = w.clone();
                v.swap(k, k + 1);
                out.push(v);
            }
        }
        for k in 0..w.len().saturating_sub(2) {
            let (a, b, c) = (w[k], w[k + 1], w[k + 2]);
            if a == c && a.abs_diff(b) == 1 {
                let mut v = w.clone();
                v[k] = b;
                v[k + 1] = a;
                v[k + 2] = b;
                out.push(v);
            }
        }
        out
    }

    /// All spellings of the same monoid element, up to `cap` states.
    pub fn equality_closure(&self, cap: usize) -> Result<BTreeSet<Vec<usize>>, WordError> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.letters.clone());
        queue.push_back(self.letters.clone());
        while let Some(w) = queue.pop_front() {
            let word = Self { strands: self.strands, letters: w };
            for v in word.rewrites() {
                if !seen.contains(&v) {
                    if seen.len() >= cap {
                        return Err(WordError::ClosureTooLarge(cap));
                    }
                    seen.insert(v.clone());
                    queue.push_back(v);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Positive equality in the monoid.
    pub fn positive_equal(&self, other: &Self) -> Result<bool, WordError> {
        self.positive_equal_capped(other, DEFAULT_CLOSURE_CAP)
    }

    pub fn positive_equal_capped(&self, other: &Self, cap: usize) -> Result<bool, WordError> {
        if self.strands != other.strands {
            return Err(WordError::StrandMismatch(self.strands, other.strands));
        }
        if self.letters.len() != other.letters.len() {
            return Ok(false);
        }
        if self.permutation() != other.permutation() {
            return Ok(false);
        }
        // BFS from one side, early exit on hit.
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.letters.clone());
        queue.push_back(self.letters.clone());
        while let Some(w) = queue.pop_front() {
            if w == other.letters {
                return Ok(true);
            }
            let word = Self { strands: self.strands, letters: w };
            for v in word.rewrites() {
                if !seen.contains(&v) {
                    if seen.len() >= cap {
                        return Err(WordError::ClosureTooLarge(cap));
                    }
                    seen.insert(v.clone());
                    queue.push_back(v);
                }
            }
        }
        Ok(false)
    }

    /// Closure under positive equality and the cyclic letter move.
    pub fn conjugacy_closure(&self, cap: usize) -> Result<BTreeSet<Vec<usize>>, WordError> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.letters.clone());
        queue.push_back(self.letters.clone());
        while let Some(w) = queue.pop_front() {
            let word = Self { strands: self.strands, letters: w.clone() };
            let mut nexts = word.rewrites();
            if !w.is_empty() {
                let mut rot = w.clone();
                rot.rotate_left(1);
                nexts.push(rot);
            }
            for v in nexts {
                if !seen.contains(&v) {
                    if seen.len() >= cap {
                        return Err(WordError::ClosureTooLarge(cap));
                    }
                    seen.insert(v.clone());
                    queue.push_back(v);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Positive conjugacy.
    pub fn positively_conjugate(&self, other: &Self) -> Result<bool, WordError> {
        if self.strands != other.strands {
            return Err(WordError::StrandMismatch(self.strands, other.strands));
        }
        if self.letters.len() != other.letters.len() {
            return Ok(false);
        }
        let cls = self.conjugacy_closure(DEFAULT_CLOSURE_CAP)?;
        Ok(cls.contains(&other.letters))
    }

    /// Greedy factorization into permutation-braid layers: within a layer no
    /// strand pair crosses twice, so each layer embeds in a single slice of a
    /// discretized braid.  The concatenation of the layers is the original
    /// word up to positive equality (it is the original word literally).
    pub fn simple_layers(&self) -> Vec<PositiveWord> {
        let m = self.strands;
        let mut layers = Vec::new();
        let mut pos: Vec<usize> = (0..m).collect(); // strand -> position
        let mut at: Vec<usize> = (0..m).collect(); // position -> strand
        let mut cur: Vec<usize> = Vec::new();
        let mut crossed: HashSet<(usize, usize)> = HashSet::new();
        for &i in &self.letters {
            let (s, t) = (at[i - 1], at[i]);
            let key = (s.min(t), s.max(t));
            if crossed.contains(&key) {
                layers.push(Self { strands: m, letters: std::mem::take(&mut cur) });
                crossed.clear();
            }
            crossed.insert(key);
            cur.push(i);
            at.swap(i - 1, i);
            pos.swap(s, t);
        }
        if !cur.is_empty() {
            layers.push(Self { strands: m, letters: cur });
        }
        layers
    }
}

/// Cycles of a permutation given as an image table.
pub fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut p = perm[start];
        while p != start {
            seen[p] = true;
            cyc.push(p);
            p = perm[p];
        }
        cycles.push(cyc);
    }
    cycles
}

/// A positive conjugacy class with its canonical (lexicographically smallest)
/// representative and the the sorted member list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: PositiveWord,
    pub members: Vec<PositiveWord>,
}

pub fn conjugacy_class(word: &PositiveWord) -> Result<ConjugacyClass, WordError> {
    conjugacy_class_capped(word, DEFAULT_CLOSURE_CAP)
}

pub fn conjugacy_class_capped(
    word: &PositiveWord,
    cap: usize,
) -> Result<ConjugacyClass, WordError> {
    let closure = word.conjugacy_closure(cap)?;
    let members: Vec<PositiveWord> = closure
        .into_iter()
        .map(|letters| PositiveWord { strands: word.strands(), letters })
        .collect();
    let representative = members.first().expect("closure contains the seed").clone();
    Ok(ConjugacyClass { representative, members })
}

/// Which color a projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Black,
    Red,
}

/// A positive word on `n + m` strands together with a red coloring: a set of
/// start positions (1-based) closed under the induced permutation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredWord {
    word: PositiveWord,
    red: BTreeSet<usize>,
}

impl fmt::Debug for ColoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredWord({}; red={:?})", self.word, self.red)
    }
}

impl ColoredWord {
    pub fn new(word: PositiveWord, red: BTreeSet<usize>) -> Result<Self, WordError> {
        for &r in &red {
            if r == 0 || r > word.strands() {
                return Err(WordError::BadColorEntry(r, word.strands()));
            }
        }
        let perm = word.permutation();
        for &r in &red {
            if !red.contains(&(perm[r - 1] + 1)) {
                return Err(WordError::InvalidColoring(red.iter().copied().collect()));
            }
        }
        Ok(Self { word, red })
    }

    pub fn word(&self) -> &PositiveWord {
        &self.word
    }

    pub fn red(&self) -> &BTreeSet<usize> {
        &self.red
    }

    pub fn red_count(&self) -> usize {
        self.red.len()
    }

    pub fn black_count(&self) -> usize {
        self.word.strands() - self.red.len()
    }

    /// The cycle-tracing projection onto one color.
    ///
    /// For every cycle of the removed color, the strand position is traced
    /// through the needed power of the word; letters where the traced strand
    /// moves are deleted and surviving letters are shifted down once for each
    /// removed strand sitting below them.
    pub fn project(&self, keep: Color) -> Result<PositiveWord, WordError> {
        let total = self.word.strands();
        let removed: BTreeSet<usize> = match keep {
            Color::Black => self.red.clone(),
            Color::Red => (1..=total).filter(|p| !self.red.contains(p)).collect(),
        };
        let keep_count = total - removed.len();
        let letters = self.word.letters();
        let d = letters.len();
        let mut delete = vec![false; d];
        let mut shift = vec![0usize; d];

        let perm = self.word.permutation();
        let cycles = permutation_cycles(&perm);
        for cyc in cycles {
            if !removed.contains(&(cyc[0] + 1)) {
                continue;
            }
            let ell = cyc.len();
            let mut k = cyc[0] + 1; // 1-based position
            for j in 0..ell * d {
                let i = letters[j % d];
                let prev = k;
                if k == i {
                    k = i + 1;
                } else if k == i + 1 {
                    k = i;
                }
                if k != prev {
                    delete[j % d] = true;
                } else if k < i {
                    shift[j % d] += 1;
                }
            }
        }

        let mut out = Vec::new();
        for j in 0..d {
            if delete[j] {
                continue;
            }
            let i = letters[j];
            assert!(i > shift[j], "projection produced a non-positive generator");
            out.push(i - shift[j]);
        }
        PositiveWord::new(keep_count.max(1), out)
    }

    /// One-step moves preserving the colored conjugacy class.
    fn colored_moves(&self) -> Vec<(Vec<usize>, BTreeSet<usize>)> {
        let mut out: Vec<(Vec<usize>, BTreeSet<usize>)> = self
            .word
            .rewrites()
            .into_iter()
            .map(|v| (v, self.red.clone()))
            .collect();
        if !self.word.letters().is_empty() {
            let i = self.word.letters()[0];
            let mut rot = self.word.letters().to_vec();
            rot.rotate_left(1);
            // Cycling conjugates by the leading transposition.
            let red: BTreeSet<usize> = self
                .red
                .iter()
                .map(|&r| {
                    if r == i {
                        i + 1
                    } else if r == i + 1 {
                        i
                    } else {
                        r
                    }
                })
                .collect();
            out.push((rot, red));
        }
        out
    }

    /// Closure under colored positive conjugacy, up to `cap` states.
    pub fn conjugacy_closure(
        &self,
        cap: usize,
    ) -> Result<HashSet<(Vec<usize>, BTreeSet<usize>)>, WordError> {
        let mut seen: HashSet<(Vec<usize>, BTreeSet<usize>)> = HashSet::new();
        let mut queue = VecDeque::new();
        let seed = (self.word.letters().to_vec(), self.red.clone());
        seen.insert(seed.clone());
        queue.push_back(seed);
        while let Some((w, red)) = queue.pop_front() {
            let cw = ColoredWord {
                word: PositiveWord { strands: self.word.strands(), letters: w },
                red,
            };
            for state in cw.colored_moves() {
                if !seen.contains(&state) {
                    if seen.len() >= cap {
                        return Err(WordError::ClosureTooLarge(cap));
                    }
                    seen.insert(state.clone());
                    queue.push_back(state);
                }
            }
        }
        Ok(seen)
    }

    /// Colored positive conjugacy: the words are positively conjugate by a
    /// conjugator matching the red sets.
    pub fn colored_conjugate(&self, other: &Self) -> Result<bool, WordError> {
        self.colored_conjugate_capped(other, DEFAULT_CLOSURE_CAP)
    }

    pub fn colored_conjugate_capped(&self, other: &Self, cap: usize) -> Result<bool, WordError> {
        if self.word.strands() != other.word.strands() {
            return Err(WordError::StrandMismatch(self.word.strands(), other.word.strands()));
        }
        if self.red.len() != other.red.len() || self.word.len() != other.word.len() {
            return Ok(false);
        }
        let closure = self.conjugacy_closure(cap)?;
        Ok(closure.contains(&(other.word.letters().to_vec(), other.red.clone())))
    }
}

/// The full twist on `m` strands, `(s1 ... s_{m-1})^m`.
pub fn full_twist(m: usize) -> PositiveWord {
    let mut letters = Vec::new();
    for _ in 0..m {
        letters.extend(1..m);
    }
    PositiveWord { strands: m, letters }
}

/// The half twist (fundamental element) on `m` strands.
pub fn half_twist(m: usize) -> PositiveWord {
    let mut letters = Vec::new();
    for k in (1..m).rev() {
        letters.extend(1..=k);
    }
    PositiveWord { strands: m, letters }
}

/// A word split as `square^power * base` with the base prime to the full
/// twist `square`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricNormalForm {
    pub power: i64,
    pub base: PositiveWord,
}

impl SymmetricNormalForm {
    /// Reassemble `square^max(power,0) * base`.
    pub fn reconstruct(&self) -> PositiveWord {
        let m = self.base.strands();
        let mut w = PositiveWord::identity(m);
        for _ in 0..self.power.max(0) {
            w = w.concat(&full_twist(m)).unwrap();
        }
        w.concat(&self.base).unwrap()
    }
}

/// Extract the maximal full-twist power of `square^power_in * word`.
///
/// Divisibility is decided on the positive-equality closure: the full twist
/// is central, so it divides a word exactly when some spelling carries a
/// literal full-twist prefix.
pub fn symmetric_normal_form(
    power_in: i64,
    word: &PositiveWord,
    cap: usize,
) -> Result<SymmetricNormalForm, WordError> {
    let m = word.strands();
    let twist = full_twist(m);
    let mut power = power_in;
    let mut base = word.clone();
    if m >= 2 {
        loop {
            if base.len() < twist.len() {
                break;
            }
            let closure = base.equality_closure(cap)?;
            let hit = closure
                .iter()
                .find(|w| w.starts_with(twist.letters()))
                .map(|w| w[twist.len()..].to_vec());
            match hit {
                Some(rest) => {
                    power += 1;
                    base = PositiveWord { strands: m, letters: rest };
                }
                None => break,
            }
        }
    }
    // Canonical spelling of the base.
    let closure = base.equality_closure(cap)?;
    let letters = closure.into_iter().next().expect("closure nonempty");
    Ok(SymmetricNormalForm { power, base: PositiveWord { strands: m, letters } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(m: usize, letters: &[usize]) -> PositiveWord {
        PositiveWord::new(m, letters.to_vec()).unwrap()
    }

    #[test]
    fn braid_relations() {
        assert!(w(3, &[1, 2, 1]).positive_equal(&w(3, &[2, 1, 2])).unwrap());
        assert!(w(4, &[1, 3]).positive_equal(&w(4, &[3, 1])).unwrap());
        assert!(!w(3, &[1]).positive_equal(&w(3, &[2])).unwrap());
    }

    #[test]
    fn conjugacy_class_of_example_word() {
        let cls = conjugacy_class(&w(3, &[1, 2, 2, 1])).unwrap();
        let got: Vec<Vec<usize>> =
            cls.members.iter().map(|m| m.letters().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 1, 2, 2], vec![1, 2, 2, 1], vec![2, 1, 1, 2], vec![2, 2, 1, 1]]
        );
    }

    #[test]
    fn singleton_class() {
        let cls = conjugacy_class(&w(2, &[1])).unwrap();
        assert_eq!(cls.members.len(), 1);
    }

    #[test]
    fn class_well_defined_on_members() {
        let u = w(3, &[1, 2]);
        let cls = conjugacy_class(&u).unwrap();
        assert!(cls.members.iter().any(|m| m.letters() == [2, 1]));
        for m in &cls.members {
            let other = conjugacy_class(m).unwrap();
            assert_eq!(other.members, cls.members);
        }
    }

    #[test]
    fn projection_drops_red_crossings() {
        let gamma = ColoredWord::new(w(3, &[2, 1, 2]), [2].into()).unwrap();
        assert_eq!(gamma.project(Color::Black).unwrap().letters(), &[1]);
    }

    #[test]
    fn projection_larger_example() {
        let gamma =
            ColoredWord::new(w(5, &[4, 1, 2, 3, 2, 2, 3, 2, 1, 4]), [3].into()).unwrap();
        assert_eq!(gamma.project(Color::Black).unwrap().letters(), &[3, 1, 2, 2, 1, 3]);
    }

    #[test]
    fn projection_empty_red_is_identity_map() {
        let gamma = ColoredWord::new(w(3, &[2, 1, 2]), BTreeSet::new()).unwrap();
        assert_eq!(gamma.project(Color::Black).unwrap().letters(), &[2, 1, 2]);
    }

    #[test]
    fn colored_conjugacy_example() {
        let a = ColoredWord::new(w(3, &[2, 1, 2]), [2].into()).unwrap();
        // Cycling s2 s1 s2 once gives s1 s2 s2 and moves the red position to 3.
        let b = ColoredWord::new(w(3, &[1, 2, 2]), [3].into()).unwrap();
        assert!(a.colored_conjugate(&b).unwrap());
        assert!(a.colored_conjugate(&a).unwrap());
        // Complementary coloring of the cycled word: same word class but the
        // red cycle has the wrong length.
        let c = ColoredWord::new(w(3, &[1, 2, 2]), [1, 2].into()).unwrap();
        assert!(!a.colored_conjugate(&c).unwrap());
    }

    #[test]
    fn coloring_must_be_cycle_closed() {
        assert!(ColoredWord::new(w(3, &[1]), [1].into()).is_err());
        assert!(ColoredWord::new(w(3, &[1]), [1, 2].into()).is_ok());
    }

    #[test]
    fn full_twist_shape() {
        assert_eq!(full_twist(3).letters(), &[1, 2, 1, 2, 1, 2]);
        assert_eq!(full_twist(3).len(), 6);
        let sq = full_twist(4);
        let p = sq.permutation();
        assert_eq!(p, vec![0, 1, 2, 3]);
    }

    #[test]
    fn normal_form_extracts_twists() {
        let nf = symmetric_normal_form(0, &w(3, &[1]), DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(nf.power, 0);
        assert_eq!(nf.base.letters(), &[1]);

        let u = full_twist(3).concat(&w(3, &[1])).unwrap();
        let nf = symmetric_normal_form(0, &u, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(nf.power, 1);
        assert_eq!(nf.base.letters(), &[1]);
        assert!(nf.reconstruct().positive_equal(&u).unwrap());
    }

    #[test]
    fn layers_are_simple_and_multiply_back() {
        let u = w(4, &[2, 1, 2, 3, 2, 3, 2, 3, 1, 2]);
        let layers = u.simple_layers();
        let mut prod = PositiveWord::identity(4);
        for layer in &layers {
            // no pair crosses twice within a layer
            let mut crossed = HashSet::new();
            let mut at: Vec<usize> = (0..4).collect();
            for &i in layer.letters() {
                let key = (at[i - 1].min(at[i]), at[i - 1].max(at[i]));
                assert!(crossed.insert(key));
                at.swap(i - 1, i);
            }
            prod = prod.concat(layer).unwrap();
        }
        assert_eq!(prod.letters(), u.letters());
    }
}
