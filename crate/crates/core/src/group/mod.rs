//! Word-problem backends for the fundamental groups that occur here:
//! free, free-abelian, cyclic, and finite (multiplication table).

pub mod characters;
pub mod finite;
pub mod simplify;
pub mod word;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use finite::FiniteGroup;
pub use word::{Letter, Word};

use word::free_reduce;

/// Canonical normal form of a group element; equal elements have equal
/// normal forms within one backend.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    /// Freely reduced word.
    Free(Word),
    /// Exponent vector.
    Abelian(Vec<i64>),
    /// Residue modulo the order.
    Cyclic(u64),
    /// Index into the multiplication table.
    Finite(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupBackend {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Cyclic { order: u64 },
    Finite(FiniteGroup),
}

impl fmt::Display for GroupBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupBackend::Free { rank } => write!(f, "free({rank})"),
            GroupBackend::FreeAbelian { rank } => write!(f, "free-abelian({rank})"),
            GroupBackend::Cyclic { order } => write!(f, "cyclic({order})"),
            GroupBackend::Finite(g) => write!(f, "finite({})", g.order()),
        }
    }
}

impl GroupBackend {
    pub fn num_generators(&self) -> usize {
        match self {
            GroupBackend::Free { rank } | GroupBackend::FreeAbelian { rank } => *rank,
            GroupBackend::Cyclic { .. } => 1,
            GroupBackend::Finite(g) => g.num_generators(),
        }
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupBackend::Free { rank } | GroupBackend::FreeAbelian { rank } => (*rank == 0).then_some(1),
            GroupBackend::Cyclic { order } => Some(*order as usize),
            GroupBackend::Finite(g) => Some(g.order()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == Some(1)
    }

    /// Multiplication table view for finite backends.
    pub fn to_finite(&self) -> Option<FiniteGroup> {
        match self {
            GroupBackend::Cyclic { order } => Some(FiniteGroup::cyclic(*order as usize)),
            GroupBackend::Finite(g) => Some(g.clone()),
            GroupBackend::Free { rank: 0 } | GroupBackend::FreeAbelian { rank: 0 } => Some(FiniteGroup::trivial()),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupBackend::Free { .. } => GroupElement::Free(Vec::new()),
            GroupBackend::FreeAbelian { rank } => GroupElement::Abelian(vec![0; *rank]),
            GroupBackend::Cyclic { .. } => GroupElement::Cyclic(0),
            GroupBackend::Finite(_) => GroupElement::Finite(0),
        }
    }

    pub fn letter(&self, l: Letter) -> GroupElement {
        self.reduce(&[l])
    }

    /// Normal form of a word over the backend's generators.
    pub fn reduce(&self, word: &[Letter]) -> GroupElement {
        match self {
            GroupBackend::Free { .. } => GroupElement::Free(free_reduce(word)),
            GroupBackend::FreeAbelian { rank } => GroupElement::Abelian(word::exponent_sums(word, *rank)),
            GroupBackend::Cyclic { order } => {
                let n = *order as i64;
                let s: i64 = word.iter().map(|l| l.sign()).sum();
                GroupElement::Cyclic(s.rem_euclid(n) as u64)
            }
            GroupBackend::Finite(g) => GroupElement::Finite(g.evaluate(word)),
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupBackend::Free { .. }, GroupElement::Free(x), GroupElement::Free(y)) => {
                GroupElement::Free(word::concat(x, y))
            }
            (GroupBackend::FreeAbelian { .. }, GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                GroupElement::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupBackend::Cyclic { order }, GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                GroupElement::Cyclic((x + y) % order)
            }
            (GroupBackend::Finite(g), GroupElement::Finite(x), GroupElement::Finite(y)) => {
                GroupElement::Finite(g.mul(*x, *y))
            }
            _ => panic!("group element does not belong to backend {self}"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupBackend::Free { .. }, GroupElement::Free(x)) => GroupElement::Free(word::inverse(x)),
            (GroupBackend::FreeAbelian { .. }, GroupElement::Abelian(x)) => {
                GroupElement::Abelian(x.iter().map(|p| -p).collect())
            }
            (GroupBackend::Cyclic { order }, GroupElement::Cyclic(x)) => GroupElement::Cyclic((order - x) % order),
            (GroupBackend::Finite(g), GroupElement::Finite(x)) => GroupElement::Finite(g.inverse(*x)),
            _ => panic!("group element does not belong to backend {self}"),
        }
    }

    /// A word spelling the element.
    pub fn to_word(&self, a: &GroupElement) -> Word {
        match (self, a) {
            (GroupBackend::Free { .. }, GroupElement::Free(x)) => x.clone(),
            (GroupBackend::FreeAbelian { .. }, GroupElement::Abelian(x)) => x
                .iter()
                .enumerate()
                .flat_map(|(g, &e)| {
                    let l = if e < 0 { Letter::inv(g) } else { Letter::gen(g) };
                    std::iter::repeat_n(l, e.unsigned_abs() as usize)
                })
                .collect(),
            (GroupBackend::Cyclic { order }, GroupElement::Cyclic(x)) => {
                let (x, n) = (*x, *order);
                if x <= n / 2 {
                    vec![Letter::gen(0); x as usize]
                } else {
                    vec![Letter::inv(0); (n - x) as usize]
                }
            }
            (GroupBackend::Finite(g), GroupElement::Finite(x)) => g.word(*x).clone(),
            _ => panic!("group element does not belong to backend {self}"),
        }
    }

    /// Word length of the normal form (the word metric for free and
    /// free-abelian backends, shortlex length for finite ones).
    pub fn length(&self, a: &GroupElement) -> usize {
        self.to_word(a).len()
    }

    /// Amenability by group class.
    pub fn is_amenable(&self) -> bool {
        !matches!(self, GroupBackend::Free { rank } if *rank >= 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::parse_word;

    fn ab() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn free_reduction_to_identity() {
        let f = GroupBackend::Free { rank: 2 };
        let w = parse_word("a b B A", &ab()).unwrap();
        assert_eq!(f.reduce(&w), f.identity());
    }

    #[test]
    fn cyclic_residue() {
        let c = GroupBackend::Cyclic { order: 3 };
        let w = parse_word("a5", &["a".to_string()]).unwrap();
        assert_eq!(c.reduce(&w), GroupElement::Cyclic(2));
        assert_eq!(c.to_word(&GroupElement::Cyclic(2)), vec![Letter::inv(0)]);
    }

    #[test]
    fn finite_table_kills_relators() {
        let rels: Vec<Word> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab()).unwrap()).collect();
        let g = GroupBackend::Finite(FiniteGroup::from_presentation(2, &rels, 100).unwrap());
        assert_eq!(g.reduce(&parse_word("(ab)3", &ab()).unwrap()), g.identity());
        assert_ne!(g.reduce(&parse_word("ab", &ab()).unwrap()), g.reduce(&parse_word("ba", &ab()).unwrap()));
    }

    #[test]
    fn abelian_is_commutative() {
        let z2 = GroupBackend::FreeAbelian { rank: 2 };
        assert_eq!(
            z2.reduce(&parse_word("ab", &ab()).unwrap()),
            z2.reduce(&parse_word("ba", &ab()).unwrap())
        );
        let x = z2.reduce(&parse_word("a3 B", &ab()).unwrap());
        assert_eq!(z2.reduce(&z2.to_word(&x)), x);
    }

    #[test]
    fn amenability_by_class() {
        assert!(!GroupBackend::Free { rank: 2 }.is_amenable());
        assert!(GroupBackend::Free { rank: 1 }.is_amenable());
        assert!(GroupBackend::FreeAbelian { rank: 2 }.is_amenable());
        assert!(GroupBackend::Cyclic { order: 5 }.is_amenable());
    }
}
