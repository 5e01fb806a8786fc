//! Left-greedy normal forms for positive braids and element-level conjugacy
//! search.
//!
//! Positive words are factored into permutation braids (each strand pair
//! crosses at most once per factor) in left-greedy order; two positive words
//! are equal in the monoid exactly when their normal forms coincide.  The
//! positive conjugacy class is explored at the element level: cycling by a
//! dividing generator maps normal form to normal form, so the search space
//! collapses all spellings of an element to one node.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::word::{PositiveWord, WordError};

/// A permutation braid as the table `pi[x] = final position of x` (0-based).
type Perm = Vec<u8>;

fn perm_identity(m: usize) -> Perm {
    (0..m as u8).collect()
}

fn is_identity(p: &Perm) -> bool {
    p.iter().enumerate().all(|(i, &v)| v as usize == i)
}

/// sigma_i (1-based) left-divides the permutation braid: descent at i.
fn has_left_descent(p: &Perm, i: usize) -> bool {
    p[i - 1] > p[i]
}

/// The braid `p * sigma_i` is still a permutation braid.
fn extendable(p: &Perm, i: usize) -> bool {
    let a = p.iter().position(|&v| v as usize == i - 1).unwrap();
    let b = p.iter().position(|&v| v as usize == i).unwrap();
    a < b
}

/// p * sigma_i (apply p, then swap positions i-1, i).
fn append_sigma(p: &Perm, i: usize) -> Perm {
    p.iter()
        .map(|&v| {
            if v as usize == i - 1 {
                i as u8
            } else if v as usize == i {
                (i - 1) as u8
            } else {
                v
            }
        })
        .collect()
}

/// sigma_i \ p (strip a leading sigma_i).
fn strip_sigma(p: &Perm, i: usize) -> Perm {
    let mut q = p.clone();
    q.swap(i - 1, i);
    q
}

/// Left-greedy normal form: a list of non-identity permutation braids.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NormalForm {
    pub strands: usize,
    pub factors: Vec<Perm>,
}

impl NormalForm {
    pub fn of(word: &PositiveWord) -> NormalForm {
        let m = word.strands();
        let mut factors: Vec<Perm> = word
            .letters()
            .iter()
            .map(|&i| append_sigma(&perm_identity(m), i))
            .collect();
        normalize(m, &mut factors);
        NormalForm { strands: m, factors }
    }

    pub fn canonical_length(&self) -> usize {
        self.factors.len()
    }

    /// Total letter count.
    pub fn letter_length(&self) -> usize {
        self.factors.iter().map(|f| inversions(f)).sum()
    }

    /// Rebuild a concrete spelling.
    pub fn spell(&self) -> PositiveWord {
        let mut letters = Vec::new();
        for f in &self.factors {
            letters.extend(factor_letters(f));
        }
        PositiveWord::new(self.strands, letters).expect("normal forms spell valid words")
    }

    fn key(&self) -> Vec<u8> {
        let mut k = Vec::with_capacity(self.factors.len() * self.strands + 1);
        for f in &self.factors {
            k.extend_from_slice(f);
            k.push(u8::MAX);
        }
        k
    }
}

fn inversions(p: &Perm) -> usize {
    let mut c = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                c += 1;
            }
        }
    }
    c
}

/// One reduced word of a permutation braid, peeled off the left.
fn factor_letters(p: &Perm) -> Vec<usize> {
    let mut q = p.clone();
    let mut letters = Vec::new();
    while let Some(i) = (1..q.len()).find(|&i| has_left_descent(&q, i)) {
        letters.push(i);
        q = strip_sigma(&q, i);
    }
    letters
}

/// Left-greedy normalization of a factor list, in place.
fn normalize(m: usize, factors: &mut Vec<Perm>) {
    factors.retain(|f| !is_identity(f));
    if factors.is_empty() {
        return;
    }
    let mut changed = true;
    while changed {
        changed = false;
        let mut k = 0;
        while k + 1 < factors.len() {
            // Move every movable generator from factor k+1 into factor k.
            let mut local = true;
            while local {
                local = false;
                for i in 1..m {
                    if has_left_descent(&factors[k + 1], i) && extendable(&factors[k], i) {
                        factors[k] = append_sigma(&factors[k], i);
                        factors[k + 1] = strip_sigma(&factors[k + 1], i);
                        local = true;
                        changed = true;
                    }
                }
            }
            if is_identity(&factors[k + 1]) {
                factors.remove(k + 1);
            } else {
                k += 1;
            }
        }
    }
}

/// Exact positive equality via normal forms.
pub fn positive_equal_nf(u: &PositiveWord, v: &PositiveWord) -> bool {
    u.strands() == v.strands() && NormalForm::of(u) == NormalForm::of(v)
}

/// Generators dividing the element on the left: descents of the head factor.
fn left_dividing_generators(nf: &NormalForm) -> Vec<usize> {
    match nf.factors.first() {
        None => Vec::new(),
        Some(head) => (1..nf.strands).filter(|&i| has_left_descent(head, i)).collect(),
    }
}

/// Cycle by a dividing generator: `x -> sigma_i^{-1} x sigma_i`.
fn cycle_by(nf: &NormalForm, i: usize) -> NormalForm {
    let m = nf.strands;
    let mut factors = nf.factors.clone();
    factors[0] = strip_sigma(&factors[0], i);
    factors.push(append_sigma(&perm_identity(m), i));
    normalize(m, &mut factors);
    NormalForm { strands: m, factors }
}

/// Element-level closure of the positive conjugacy class, as normal-form
/// keys.  Optionally tracks a red coloring, conjugated along each cycling.
pub struct ConjugacyClosure {
    pub elements: HashSet<(Vec<u8>, BTreeSet<usize>)>,
}

impl ConjugacyClosure {
    pub fn contains(&self, word: &PositiveWord, red: &BTreeSet<usize>) -> bool {
        self.elements.contains(&(NormalForm::of(word).key(), red.clone()))
    }
}

/// Breadth-first closure under generator cycling, capped.
pub fn conjugacy_closure_elements(
    word: &PositiveWord,
    red: &BTreeSet<usize>,
    cap: usize,
) -> Result<ConjugacyClosure, WordError> {
    let nf = NormalForm::of(word);
    let seed = (nf.clone(), red.clone());
    let mut seen: HashSet<(Vec<u8>, BTreeSet<usize>)> = HashSet::new();
    seen.insert((nf.key(), red.clone()));
    let mut queue = VecDeque::new();
    queue.push_back(seed);
    while let Some((x, a)) = queue.pop_front() {
        for i in left_dividing_generators(&x) {
            let y = cycle_by(&x, i);
            let b: BTreeSet<usize> = a
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
            let key = (y.key(), b.clone());
            if !seen.contains(&key) {
                if seen.len() >= cap {
                    return Err(WordError::ClosureTooLarge(cap));
                }
                seen.insert(key);
                queue.push_back((y, b));
            }
        }
    }
    Ok(ConjugacyClosure { elements: seen })
}

/// Exact positive conjugacy via the element-level closure.
pub fn positively_conjugate_nf(
    u: &PositiveWord,
    v: &PositiveWord,
    cap: usize,
) -> Result<bool, WordError> {
    if u.strands() != v.strands() {
        return Err(WordError::StrandMismatch(u.strands(), v.strands()));
    }
    if u.len() != v.len() {
        return Ok(false);
    }
    let closure = conjugacy_closure_elements(u, &BTreeSet::new(), cap)?;
    Ok(closure.contains(v, &BTreeSet::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::conjugacy_class;

    fn w(m: usize, letters: &[usize]) -> PositiveWord {
        PositiveWord::new(m, letters.to_vec()).unwrap()
    }

    #[test]
    fn normal_form_equality_matches_rewriting() {
        let pairs = [
            (w(3, &[1, 2, 1]), w(3, &[2, 1, 2]), true),
            (w(4, &[1, 3]), w(4, &[3, 1]), true),
            (w(3, &[1]), w(3, &[2]), false),
            (w(3, &[1, 2, 2, 1]), w(3, &[2, 1, 1, 2]), false),
            (w(4, &[1, 2, 3, 1, 2, 1]), w(4, &[3, 2, 1, 3, 2, 3]), true),
        ];
        for (u, v, want) in pairs {
            assert_eq!(positive_equal_nf(&u, &v), want, "{u} vs {v}");
            assert_eq!(u.positive_equal(&v).unwrap(), want);
        }
    }

    #[test]
    fn spell_round_trip() {
        for word in [w(3, &[1, 2, 2, 1]), w(4, &[2, 1, 3, 2, 2]), w(5, &[4, 1, 2, 3, 2])] {
            let nf = NormalForm::of(&word);
            assert!(positive_equal_nf(&nf.spell(), &word));
            assert_eq!(nf.letter_length(), word.len());
        }
    }

    #[test]
    fn element_conjugacy_matches_spelling_closure() {
        for word in [w(3, &[1, 2, 2, 1]), w(3, &[2, 1, 2]), w(4, &[1, 3, 2, 1])] {
            let cls = conjugacy_class(&word).unwrap();
            for member in &cls.members {
                assert!(positively_conjugate_nf(&word, member, 1_000_000).unwrap());
            }
            // A same-length non-member.
            let other = w(word.strands(), &vec![1; word.len()]);
            let in_class = cls.members.iter().any(|m| m.letters() == other.letters());
            assert_eq!(
                positively_conjugate_nf(&word, &other, 1_000_000).unwrap(),
                in_class
            );
        }
    }

    #[test]
    fn closure_is_element_level() {
        // (s1 s3)^3 has eight spellings but few conjugacy-class elements.
        let word = w(4, &[1, 3, 1, 3, 1, 3]);
        let closure = conjugacy_closure_elements(&word, &BTreeSet::new(), 100_000).unwrap();
        assert!(closure.elements.len() <= 4);
        assert!(closure.contains(&w(4, &[3, 1, 3, 1, 3, 1]), &BTreeSet::new()));
    }
}
