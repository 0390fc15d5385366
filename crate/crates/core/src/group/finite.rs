//! Finite groups as multiplication tables, obtained from presentations by
//! Todd–Coxeter coset enumeration over the trivial subgroup.

use std::collections::VecDeque;

use super::word::{Letter, Word};
use crate::error::{Error, Result};

const UNDEF: usize = usize::MAX;

/// A finite group with elements `0..order`, `0` the identity. Elements are
/// numbered in shortlex order of their representative words.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<usize>,
    inv: Vec<usize>,
    generators: Vec<usize>,
    words: Vec<Word>,
}

fn column(l: Letter) -> usize {
    2 * l.generator + l.inverse as usize
}

fn column_letter(col: usize) -> Letter {
    Letter { generator: col / 2, inverse: col % 2 == 1 }
}

struct CosetTable {
    cols: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    limit: usize,
}

impl CosetTable {
    fn new(cols: usize, limit: usize) -> Self {
        CosetTable { cols, table: vec![UNDEF; cols], parent: vec![0], limit }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.cols + x]
    }

    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.len() >= self.limit {
            return Err(Error::PossiblyInfiniteGroup { bound: self.limit });
        }
        let d = self.len();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.parent[drop] = keep;
        queue.push(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.get(e, x);
                if f == UNDEF {
                    continue;
                }
                self.set(f, x ^ 1, UNDEF);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let ex = self.get(e1, x);
                let fx = self.get(f1, x ^ 1);
                if ex != UNDEF {
                    self.merge(f1, ex, &mut queue);
                } else if fx != UNDEF {
                    self.merge(e1, fx, &mut queue);
                } else {
                    self.set(e1, x, f1);
                    self.set(f1, x ^ 1, e1);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, rel: &[usize]) -> Result<()> {
        if rel.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let mut i = 0usize;
        let mut j = rel.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.get(f, rel[i]) != UNDEF {
                f = self.get(f, rel[i]);
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, rel[j as usize] ^ 1) != UNDEF {
                b = self.get(b, rel[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, rel[i], b);
                self.set(b, rel[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, rel[i])?;
        }
    }
}

impl FiniteGroup {
    /// Enumerates `⟨generators | relators⟩`. Fails with
    /// [`Error::PossiblyInfiniteGroup`] when the order exceeds `order_bound`
    /// or the enumeration needs more than a fixed multiple of it in
    /// intermediate cosets.
    pub fn from_presentation(num_generators: usize, relators: &[Word], order_bound: usize) -> Result<Self> {
        let cols = 2 * num_generators;
        let limit = order_bound.saturating_mul(64).max(4096);
        let mut ct = CosetTable::new(cols, limit);
        let rels: Vec<Vec<usize>> = relators.iter().map(|r| r.iter().map(|&l| column(l)).collect()).collect();
        let mut c = 0;
        while c < ct.len() {
            for r in &rels {
                if !ct.alive(c) {
                    break;
                }
                ct.scan_and_fill(c, r)
                    .map_err(|_| Error::PossiblyInfiniteGroup { bound: order_bound })?;
            }
            for x in 0..cols {
                if !ct.alive(c) {
                    break;
                }
                if ct.get(c, x) == UNDEF {
                    ct.define(c, x).map_err(|_| Error::PossiblyInfiniteGroup { bound: order_bound })?;
                }
            }
            c += 1;
        }

        // Shortlex BFS over live cosets from the subgroup coset.
        let mut number = vec![UNDEF; ct.len()];
        let mut words: Vec<Word> = vec![Vec::new()];
        let mut cosets = vec![0usize];
        number[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            if cosets.len() > order_bound {
                return Err(Error::PossiblyInfiniteGroup { bound: order_bound });
            }
            let coset = cosets[k];
            for x in 0..cols {
                let t = ct.get(coset, x);
                if t == UNDEF {
                    return Err(Error::NumericalFailure("incomplete coset table".into()));
                }
                let t = ct.rep(t);
                if number[t] == UNDEF {
                    number[t] = cosets.len();
                    cosets.push(t);
                    let mut w = words[k].clone();
                    w.push(column_letter(x));
                    words.push(w);
                    queue.push_back(number[t]);
                }
            }
        }
        let order = cosets.len();
        if order > order_bound {
            return Err(Error::PossiblyInfiniteGroup { bound: order_bound });
        }
        let mut action = vec![0usize; order * cols];
        for (k, &coset) in cosets.iter().enumerate() {
            for x in 0..cols {
                let t = ct.get(coset, x);
                action[k * cols + x] = number[ct.rep(t)];
            }
        }
        let mut mult = vec![0usize; order * order];
        for a in 0..order {
            for (b, w) in words.iter().enumerate() {
                let mut e = a;
                for &l in w {
                    e = action[e * cols + column(l)];
                }
                mult[a * order + b] = e;
            }
        }
        Self::from_parts(order, mult, (0..num_generators).map(|g| action[2 * g]).collect(), words)
    }

    fn from_parts(order: usize, mult: Vec<usize>, generators: Vec<usize>, words: Vec<Word>) -> Result<Self> {
        let mut inv = vec![UNDEF; order];
        for a in 0..order {
            inv[a] = (0..order)
                .find(|&b| mult[a * order + b] == 0)
                .ok_or_else(|| Error::NumericalFailure("multiplication table without inverses".into()))?;
        }
        Ok(FiniteGroup { order, mult, inv, generators, words })
    }

    /// `Z_n` with one generator.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mult = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let words = (0..n)
            .map(|k| {
                // shortlex: positive powers up to n/2, negative beyond
                if k <= n / 2 { vec![Letter::gen(0); k] } else { vec![Letter::inv(0); n - k] }
            })
            .collect();
        let generators = if n == 1 { vec![0] } else { vec![1] };
        Self::from_parts(n, mult, generators, words).expect("cyclic table")
    }

    pub fn trivial() -> Self {
        FiniteGroup { order: 1, mult: vec![0], inv: vec![0], generators: Vec::new(), words: vec![Vec::new()] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn generator(&self, g: usize) -> usize {
        self.generators[g]
    }

    pub fn letter(&self, l: Letter) -> usize {
        let g = self.generators[l.generator];
        if l.inverse { self.inv[g] } else { g }
    }

    pub fn evaluate(&self, word: &[Letter]) -> usize {
        word.iter().fold(0, |acc, &l| self.mul(acc, self.letter(l)))
    }

    /// Shortlex representative word of an element.
    pub fn word(&self, a: usize) -> &Word {
        &self.words[a]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![UNDEF; self.order];
        let mut classes = Vec::new();
        for a in 0..self.order {
            if class_of[a] != UNDEF {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order).map(|g| self.mul(self.mul(g, a), self.inv[g])).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                class_of[c] = classes.len();
            }
            classes.push(class);
        }
        classes
    }
}
