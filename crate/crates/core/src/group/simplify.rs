//! Tietze elimination of generators that occur exactly once in a relator,
//! and classification of the resulting presentation into a backend.

use super::finite::FiniteGroup;
use super::word::{cyclic_reduce, exponent_sums, free_reduce, inverse, Letter, Word};
use super::GroupBackend;
use crate::error::Result;

/// Outcome of relator elimination on `⟨x_0..x_{n-1} | R⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplified {
    /// Original index of each surviving generator.
    pub kept: Vec<usize>,
    /// For every original generator, an equal word in the survivors.
    pub images: Vec<Word>,
    /// Remaining relators over the survivors, in canonical cyclic form.
    pub relators: Vec<Word>,
}

impl Simplified {
    pub fn num_generators(&self) -> usize {
        self.kept.len()
    }
}

/// Lexicographically least rotation of `w` or of its inverse.
pub fn canonical_relator(w: &[Letter]) -> Word {
    let w = cyclic_reduce(w);
    if w.is_empty() {
        return w;
    }
    let inv = inverse(&w);
    let mut best: Option<Word> = None;
    for candidate in [&w, &inv] {
        for k in 0..candidate.len() {
            let mut rot = candidate[k..].to_vec();
            rot.extend_from_slice(&candidate[..k]);
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

fn substitute(word: &[Letter], x: usize, image: &[Letter]) -> Word {
    let inv_image = inverse(image);
    let mut out = Vec::with_capacity(word.len());
    for &l in word {
        if l.generator == x {
            out.extend_from_slice(if l.inverse { &inv_image } else { image });
        } else {
            out.push(l);
        }
    }
    free_reduce(&out)
}

pub fn simplify(num_generators: usize, relators: &[Word]) -> Simplified {
    let mut rels: Vec<Word> = relators.iter().map(|r| canonical_relator(r)).filter(|r| !r.is_empty()).collect();
    rels.sort();
    rels.dedup();
    let mut images: Vec<Word> = (0..num_generators).map(|g| vec![Letter::gen(g)]).collect();
    let mut alive = vec![true; num_generators];

    loop {
        // shortest relator first, then the highest-numbered generator, so
        // earlier chords survive
        let mut candidate: Option<(usize, usize, usize)> = None;
        for (ri, r) in rels.iter().enumerate() {
            let mut counts = vec![0usize; num_generators];
            for l in r {
                counts[l.generator] += 1;
            }
            if let Some(x) = (0..num_generators).rev().find(|&g| counts[g] == 1) {
                let key = (r.len(), ri, num_generators - x);
                if candidate.is_none_or(|c| key < c) {
                    candidate = Some(key);
                }
            }
        }
        let Some((_, ri, rx)) = candidate else { break };
        let x = num_generators - rx;
        let r = rels.remove(ri);
        let pos = r.iter().position(|l| l.generator == x).expect("occurrence");
        let mut rot = r[pos..].to_vec();
        rot.extend_from_slice(&r[..pos]);
        let rest = &rot[1..];
        // x^ε · rest = 1
        let image = if rot[0].inverse { rest.to_vec() } else { inverse(rest) };
        alive[x] = false;
        for img in images.iter_mut() {
            *img = substitute(img, x, &image);
        }
        rels = rels
            .iter()
            .map(|w| canonical_relator(&substitute(w, x, &image)))
            .filter(|w| !w.is_empty())
            .collect();
        rels.sort();
        rels.dedup();
    }

    let kept: Vec<usize> = (0..num_generators).filter(|&g| alive[g]).collect();
    let mut relabel = vec![usize::MAX; num_generators];
    for (i, &g) in kept.iter().enumerate() {
        relabel[g] = i;
    }
    let rename = |w: &Word| -> Word {
        w.iter().map(|l| Letter { generator: relabel[l.generator], inverse: l.inverse }).collect()
    };
    let images = images.iter().map(rename).collect();
    let mut relators: Vec<Word> = rels.iter().map(|r| canonical_relator(&rename(r))).collect();
    relators.sort();
    relators.dedup();
    Simplified { kept, images, relators }
}

fn is_commutator_presentation(rank: usize, relators: &[Word]) -> bool {
    if relators.len() != rank * (rank - 1) / 2 {
        return false;
    }
    let mut expected: Vec<Word> = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            expected.push(canonical_relator(&[Letter::gen(i), Letter::gen(j), Letter::inv(i), Letter::inv(j)]));
        }
    }
    expected.sort();
    let mut got = relators.to_vec();
    got.sort();
    got == expected
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Picks a decidable backend for a simplified presentation: free when there
/// are no relators, cyclic for one generator, free-abelian for the standard
/// commutator presentation, and a finite table when coset enumeration closes
/// within `order_bound`. `Ok(None)` when none applies.
pub fn classify(s: &Simplified, order_bound: usize) -> Result<Option<GroupBackend>> {
    let rank = s.num_generators();
    if rank == 0 {
        return Ok(Some(GroupBackend::Finite(FiniteGroup::trivial())));
    }
    if s.relators.is_empty() {
        return Ok(Some(GroupBackend::Free { rank }));
    }
    if rank == 1 {
        let g = s.relators.iter().fold(0u64, |acc, r| gcd(acc, exponent_sums(r, 1)[0].unsigned_abs()));
        return Ok(Some(if g == 0 { GroupBackend::Free { rank: 1 } } else { GroupBackend::Cyclic { order: g } }));
    }
    if is_commutator_presentation(rank, &s.relators) {
        return Ok(Some(GroupBackend::FreeAbelian { rank }));
    }
    match FiniteGroup::from_presentation(rank, &s.relators, order_bound) {
        Ok(g) => Ok(Some(GroupBackend::Finite(g))),
        Err(crate::Error::PossiblyInfiniteGroup { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::parse_word;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn words(n: &[String], ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| parse_word(w, n).unwrap()).collect()
    }

    #[test]
    fn eliminates_single_occurrence() {
        let n = names(&["a", "b", "c"]);
        let s = simplify(3, &words(&n, &["a b C", "c a B"]));
        // c = ab, leaving a b a B = 1
        assert_eq!(s.kept, vec![0, 1]);
        assert_eq!(s.relators.len(), 1);
        assert_eq!(s.relators[0].len(), 4);
    }

    #[test]
    fn classifies_examples() {
        let ab = names(&["a", "b"]);
        let free = simplify(2, &[]);
        assert_eq!(classify(&free, 100).unwrap(), Some(GroupBackend::Free { rank: 2 }));

        let z3 = simplify(1, &words(&names(&["a"]), &["a3"]));
        assert_eq!(classify(&z3, 100).unwrap(), Some(GroupBackend::Cyclic { order: 3 }));

        let z6 = simplify(1, &words(&names(&["a"]), &["a6", "a4"]));
        assert_eq!(classify(&z6, 100).unwrap(), Some(GroupBackend::Cyclic { order: 2 }));

        let torus = simplify(2, &words(&ab, &["abAB"]));
        assert_eq!(classify(&torus, 100).unwrap(), Some(GroupBackend::FreeAbelian { rank: 2 }));

        let s3 = simplify(2, &words(&ab, &["a2", "b2", "(ab)3"]));
        match classify(&s3, 100).unwrap() {
            Some(GroupBackend::Finite(g)) => assert_eq!(g.order(), 6),
            other => panic!("{other:?}"),
        }

        let killed = simplify(2, &words(&ab, &["a", "ab"]));
        assert_eq!(killed.num_generators(), 0);
        assert!(matches!(classify(&killed, 100).unwrap(), Some(GroupBackend::Finite(g)) if g.order() == 1));
    }

    #[test]
    fn images_respect_relations() {
        // ⟨a,b,c | c = ab⟩ is free on a,b
        let n = names(&["a", "b", "c"]);
        let s = simplify(3, &words(&n, &["a b C"]));
        assert_eq!(s.kept, vec![0, 1]);
        assert_eq!(s.images[2], vec![Letter::gen(0), Letter::gen(1)]);
        assert!(s.relators.is_empty());
    }
}
