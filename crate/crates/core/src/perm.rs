//! Permutations on a finite point set and generation of finite groups by
//! breadth-first closure.
//!
//! Points are 0-based internally; the CLI renders cycle notation 1-based.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::{Error, Result};

/// Default bound on closure size. Closures that would grow past the cap abort
/// with [`Error::OrderCapExceeded`] instead of running away.
pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// A permutation of `{0, …, degree−1}` stored as its image sequence.
///
/// Two permutations are equal exactly when their image sequences are equal;
/// the derived `Ord`/`Hash` give every element a canonical position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from an image sequence, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Composition `self ∘ other`: the result maps `x` to `self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// The same permutation on a larger point set, fixing the new points.
    pub fn padded(&self, degree: usize) -> Result<Permutation> {
        if degree < self.degree() {
            return Err(Error::DegreeMismatch(self.degree(), degree));
        }
        let mut images = self.images.clone();
        images.extend(self.degree()..degree);
        Ok(Permutation { images })
    }

    /// Nontrivial cycles, each rotated to start at its smallest point and
    /// sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut cycles = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            cycles.push(cycle);
        }
        cycles
    }
}

/// Renders 1-based disjoint cycle notation, e.g. `(1 2)(3 4)`; the identity
/// prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A finite set of equal-degree permutations, closed under composition and
/// inverse once produced by [`ElementSet::close`]. Elements are kept in
/// canonical sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    degree: usize,
    elements: Vec<Permutation>,
}

impl ElementSet {
    /// Smallest subgroup containing `gens`, by breadth-first closure.
    ///
    /// The empty generating set yields the trivial group (on zero points).
    /// Aborts with [`Error::OrderCapExceeded`] if the closure grows past
    /// `cap`.
    pub fn close(gens: &[Permutation], cap: usize) -> Result<Self> {
        let degree = match gens.first() {
            Some(g) => g.degree(),
            None => 0,
        };
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let mut set: HashSet<Permutation> = HashSet::new();
        let mut queue: VecDeque<Permutation> = VecDeque::new();
        set.insert(Permutation::identity(degree));
        queue.push_back(Permutation::identity(degree));
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = x.compose(g)?;
                if !set.contains(&y) {
                    if set.len() >= cap {
                        return Err(Error::OrderCapExceeded { cap });
                    }
                    set.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = set.into_iter().collect();
        elements.sort();
        Ok(ElementSet { degree, elements })
    }

    /// Wraps an already-closed, sorted element list. Callers must guarantee
    /// closure; used by quotient construction where closure is structural.
    pub(crate) fn from_closed_sorted(degree: usize, elements: Vec<Permutation>) -> Self {
        ElementSet { degree, elements }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// Membership test; errors on degree mismatch.
    pub fn is_member(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, p.degree()));
        }
        Ok(self.elements.binary_search(p).is_ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    // (0 1) and (0 1 2) on three points.
    fn transposition() -> Permutation {
        perm(&[1, 0, 2])
    }

    fn three_cycle() -> Permutation {
        perm(&[1, 2, 0])
    }

    #[test]
    fn compose_identity_is_neutral() {
        let p = three_cycle();
        let id = Permutation::identity(3);
        assert_eq!(id.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&id).unwrap(), p);
    }

    #[test]
    fn compose_involution_is_identity() {
        let t = transposition();
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn compose_matches_pointwise_definition() {
        // Oracle: evaluate x ↦ p(q(x)) point by point.
        let p = transposition();
        let q = three_cycle();
        let expected: Vec<usize> = (0..3).map(|x| p.apply(q.apply(x))).collect();
        assert_eq!(expected, vec![0, 2, 1]);
        assert_eq!(p.compose(&q).unwrap(), perm(&[0, 2, 1]));
    }

    #[test]
    fn compose_degree_mismatch() {
        let p = transposition();
        let q = perm(&[1, 0]);
        assert_eq!(p.compose(&q), Err(Error::DegreeMismatch(3, 2)));
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert_eq!(
            Permutation::from_images(vec![0, 0, 1]),
            Err(Error::NotABijection)
        );
        assert_eq!(
            Permutation::from_images(vec![0, 3, 1]),
            Err(Error::NotABijection)
        );
    }

    #[test]
    fn inverse_composes_to_identity() {
        let p = three_cycle();
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn close_empty_yields_trivial() {
        let s = ElementSet::close(&[], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.elements()[0].is_identity());
    }

    #[test]
    fn close_transposition_yields_order_two() {
        let s = ElementSet::close(&[perm(&[1, 0])], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn close_generates_symmetric_on_three_points() {
        let s = ElementSet::close(&[transposition(), three_cycle()], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn close_rejects_mixed_degrees() {
        assert_eq!(
            ElementSet::close(&[perm(&[1, 0]), three_cycle()], DEFAULT_ORDER_CAP),
            Err(Error::DegreeMismatch(2, 3))
        );
    }

    #[test]
    fn close_respects_cap() {
        assert_eq!(
            ElementSet::close(&[transposition(), three_cycle()], 4),
            Err(Error::OrderCapExceeded { cap: 4 })
        );
    }

    #[test]
    fn membership_examples() {
        let order_two = ElementSet::close(&[perm(&[1, 0, 2])], DEFAULT_ORDER_CAP).unwrap();
        assert!(order_two.is_member(&Permutation::identity(3)).unwrap());
        // An order-2 group contains no 3-cycle.
        assert!(!order_two.is_member(&three_cycle()).unwrap());

        let sym3 = ElementSet::close(&[transposition(), three_cycle()], DEFAULT_ORDER_CAP).unwrap();
        // The transposition (0 2) lies in the symmetric group.
        assert!(sym3.is_member(&perm(&[2, 1, 0])).unwrap());
    }

    #[test]
    fn membership_degree_mismatch() {
        let s = ElementSet::close(&[perm(&[1, 0])], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(
            s.is_member(&Permutation::identity(3)),
            Err(Error::DegreeMismatch(2, 3))
        );
    }

    #[test]
    fn close_is_idempotent() {
        let s = ElementSet::close(&[transposition(), three_cycle()], DEFAULT_ORDER_CAP).unwrap();
        let again = ElementSet::close(s.elements(), DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn display_uses_one_based_cycles() {
        assert_eq!(perm(&[1, 0, 2]).to_string(), "(1 2)");
        assert_eq!(perm(&[1, 0, 3, 2]).to_string(), "(1 2)(3 4)");
        assert_eq!(Permutation::identity(0).to_string(), "()");
        assert_eq!(Permutation::identity(4).to_string(), "()");
    }
}
