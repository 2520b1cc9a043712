//! Lift counting and generating-lift search through epimorphisms of finite
//! groups.
//!
//! For an epimorphism `f: G -> H` with kernel `K`, a subgroup `F <= G` and a
//! generating tuple `h` of `H` of length `n`, the counting function
//!
//! ```text
//! phi_n^F(h) = #{ g in F^n : f(g) = h componentwise and <g> = F }
//! ```
//!
//! can be computed two independent ways:
//!
//! * brute force: enumerate the product of the fibers of the `h_i` inside
//!   `F` and test closure, and
//! * by recursion: there are exactly `|F ∩ K|^n` lifts of `h` to `F`, each
//!   of which generates some subgroup of `F` that still projects onto `H`, so
//!   `phi_n^F(h) = |F ∩ K|^n − Σ_{E} phi_n^E(h)` where `E` runs over the
//!   proper subgroups of `F` with `f(E) = H`.
//!
//! The recursion shows `phi_n^F` does not depend on the choice of generating
//! tuple (only on `F` and `n`), and positivity at `F = G` for `n >= d(G)` is
//! the classical lifting lemma for finite groups; both facts are verified
//! exhaustively by this crate's test corpus rather than assumed.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::group::{same_group, FiniteGroup, GroupHom, Subgroup};
use crate::{Error, Result};

/// An ordered tuple of group elements with its generated subgroup cached.
#[derive(Clone, Debug)]
pub struct GeneratingTuple {
    group: Arc<FiniteGroup>,
    entries: Vec<usize>,
    generated: Vec<usize>,
}

impl GeneratingTuple {
    pub fn new(group: &Arc<FiniteGroup>, entries: Vec<usize>) -> Result<Self> {
        for &e in &entries {
            if e >= group.order() {
                return Err(Error::ElementOutOfRange(e, group.order()));
            }
        }
        let generated = group.closure_indices(&entries);
        Ok(GeneratingTuple {
            group: Arc::clone(group),
            entries,
            generated,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn generated_subgroup(&self) -> Subgroup {
        self.group.subgroup_unchecked(self.generated.clone())
    }

    /// True iff the tuple generates the whole group.
    pub fn generates(&self) -> bool {
        self.generated.len() == self.group.order()
    }

    /// The image tuple under a homomorphism out of this tuple's group.
    pub fn mapped(&self, hom: &GroupHom) -> Result<GeneratingTuple> {
        if !same_group(hom.source(), &self.group) {
            return Err(Error::InvalidArgument(
                "tuple does not live in the homomorphism source".into(),
            ));
        }
        GeneratingTuple::new(
            hom.target(),
            self.entries.iter().map(|&e| hom.apply(e)).collect(),
        )
    }
}

impl PartialEq for GeneratingTuple {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.entries == other.entries
    }
}

impl Eq for GeneratingTuple {}

/// Odometer over a product of index lists, in lexicographic order (first
/// factor slowest). An empty factor list yields exactly one empty tuple; an
/// empty factor yields nothing.
pub(crate) struct ProductIter<'a> {
    factors: &'a [Vec<usize>],
    state: Vec<usize>,
    done: bool,
}

impl<'a> ProductIter<'a> {
    pub(crate) fn new(factors: &'a [Vec<usize>]) -> Self {
        let done = factors.iter().any(|f| f.is_empty());
        ProductIter {
            factors,
            state: vec![0; factors.len()],
            done,
        }
    }
}

impl<'a> Iterator for ProductIter<'a> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item: Vec<usize> = self
            .state
            .iter()
            .zip(self.factors)
            .map(|(&i, f)| f[i])
            .collect();
        // Advance, last position fastest.
        let mut pos = self.factors.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.state[pos] += 1;
            if self.state[pos] < self.factors[pos].len() {
                break;
            }
            self.state[pos] = 0;
        }
        Some(item)
    }
}

/// Smallest `n` such that some n-tuple generates the group; 0 for the trivial
/// group. Searches element combinations (repeats never help).
pub fn min_generators(group: &Arc<FiniteGroup>) -> usize {
    for n in 0..=group.order() {
        for combo in (0..group.order()).combinations(n) {
            if group.generates(&combo) {
                return n;
            }
        }
    }
    unreachable!("the full element list generates")
}

/// All `|G|^n` ordered tuples filtered to those generating the group, in
/// lexicographic order of element indices.
pub fn generating_tuples(group: &Arc<FiniteGroup>, n: usize) -> Vec<GeneratingTuple> {
    let all: Vec<usize> = (0..group.order()).collect();
    let factors: Vec<Vec<usize>> = (0..n).map(|_| all.clone()).collect();
    ProductIter::new(&factors)
        .filter(|entries| group.generates(entries))
        .map(|entries| GeneratingTuple::new(group, entries).expect("indices are in range"))
        .collect()
}

/// The fiber `{ p in F : f(p) = h }`. May be empty; when `f(F)` is the whole
/// target the fiber has exactly `|F ∩ ker f|` elements.
pub fn lift_fiber(hom: &GroupHom, sub: &Subgroup, target_element: usize) -> Vec<usize> {
    sub.members()
        .iter()
        .copied()
        .filter(|&p| hom.apply(p) == target_element)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMethod {
    Brute,
    Recursive,
}

impl std::fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiMethod::Brute => write!(f, "brute"),
            PhiMethod::Recursive => write!(f, "recursive"),
        }
    }
}

/// Result of one phi evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiReport {
    pub subgroup_members: Vec<usize>,
    pub tuple: Vec<usize>,
    pub n: usize,
    pub count: u128,
    pub method: PhiMethod,
}

/// Evaluates `phi_n^F` for one fixed epimorphism, sharing the subgroup
/// lattice of the source and a memo table across calls.
///
/// The memo keys on (subgroup, tuple) since phi depends on both; the subgroup
/// family of the recursion is recomputed per `F` from the global subgroup
/// list with the surjectivity filter `f(E) = H`.
pub struct PhiEvaluator<'a> {
    hom: &'a GroupHom,
    subs: Vec<Subgroup>,
    by_members: HashMap<Vec<usize>, usize>,
    surjects: Vec<bool>,
    kernel_meet: Vec<usize>,
    contained_in: Vec<Vec<bool>>,
    memo: HashMap<(usize, Vec<usize>), u128>,
}

impl<'a> PhiEvaluator<'a> {
    pub fn new(hom: &'a GroupHom) -> Self {
        let subs = hom.source().subgroups();
        let by_members: HashMap<Vec<usize>, usize> = subs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.members().to_vec(), i))
            .collect();
        let target_order = hom.target().order();
        let surjects: Vec<bool> = subs
            .iter()
            .map(|s| hom.image_of(s).order() == target_order)
            .collect();
        let kernel = hom.kernel();
        let kernel_mask = kernel.mask();
        let kernel_meet: Vec<usize> = subs
            .iter()
            .map(|s| s.members().iter().filter(|&&m| kernel_mask[m]).count())
            .collect();
        let contained_in: Vec<Vec<bool>> = subs
            .iter()
            .map(|e| subs.iter().map(|f| e.subset_of(f)).collect())
            .collect();
        PhiEvaluator {
            hom,
            subs,
            by_members,
            surjects,
            kernel_meet,
            contained_in,
            memo: HashMap::new(),
        }
    }

    pub fn hom(&self) -> &GroupHom {
        self.hom
    }

    /// The source's subgroup lattice in canonical order.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subs
    }

    /// True iff `f(subgroup) = H` for the indexed subgroup.
    pub fn surjects_onto_target(&self, index: usize) -> bool {
        self.surjects[index]
    }

    fn resolve(&self, sub: &Subgroup) -> Result<usize> {
        if !same_group(sub.parent(), self.hom.source()) {
            return Err(Error::InvalidArgument(
                "subgroup belongs to a different group".into(),
            ));
        }
        self.by_members
            .get(sub.members())
            .copied()
            .ok_or_else(|| Error::InvalidArgument("not a subgroup of the source".into()))
    }

    fn check_tuple(&self, h: &GeneratingTuple) -> Result<()> {
        if !same_group(h.group(), self.hom.target()) {
            return Err(Error::InvalidArgument(
                "tuple does not live in the target group".into(),
            ));
        }
        if !h.generates() {
            return Err(Error::NotGenerating);
        }
        Ok(())
    }

    /// Exact count by enumerating the fiber product and testing closure.
    pub fn brute(&self, sub: &Subgroup, h: &GeneratingTuple) -> Result<PhiReport> {
        let fi = self.resolve(sub)?;
        self.check_tuple(h)?;
        let sub = &self.subs[fi];
        let fibers: Vec<Vec<usize>> = h
            .entries()
            .iter()
            .map(|&hi| lift_fiber(self.hom, sub, hi))
            .collect();
        let source = self.hom.source();
        let count = ProductIter::new(&fibers)
            .filter(|tuple| source.closure_size(tuple) == sub.order())
            .count() as u128;
        Ok(PhiReport {
            subgroup_members: sub.members().to_vec(),
            tuple: h.entries().to_vec(),
            n: h.len(),
            count,
            method: PhiMethod::Brute,
        })
    }

    /// Count via the kernel-power recursion, memoized on (subgroup, tuple).
    pub fn recursive(&mut self, sub: &Subgroup, h: &GeneratingTuple) -> Result<PhiReport> {
        let fi = self.resolve(sub)?;
        self.check_tuple(h)?;
        let count = self.recursive_by_index(fi, h.entries());
        Ok(PhiReport {
            subgroup_members: self.subs[fi].members().to_vec(),
            tuple: h.entries().to_vec(),
            n: h.len(),
            count,
            method: PhiMethod::Recursive,
        })
    }

    fn recursive_by_index(&mut self, fi: usize, h: &[usize]) -> u128 {
        let key = (fi, h.to_vec());
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let count = if !self.surjects[fi] {
            // No lift of the tuple lands in a subgroup missing part of the
            // target.
            0
        } else {
            let total = (self.kernel_meet[fi] as u128).pow(h.len() as u32);
            let mut below = 0u128;
            for e in 0..self.subs.len() {
                if e != fi && self.contained_in[e][fi] && self.surjects[e] {
                    below += self.recursive_by_index(e, h);
                }
            }
            total
                .checked_sub(below)
                .expect("every lift generates exactly one projecting subgroup")
        };
        self.memo.insert(key, count);
        count
    }
}

/// Convenience wrapper building a throwaway evaluator. Prefer constructing
/// one [`PhiEvaluator`] per epimorphism when evaluating many tuples.
pub fn phi_brute(hom: &GroupHom, sub: &Subgroup, h: &GeneratingTuple) -> Result<PhiReport> {
    PhiEvaluator::new(hom).brute(sub, h)
}

pub fn phi_recursive(hom: &GroupHom, sub: &Subgroup, h: &GeneratingTuple) -> Result<PhiReport> {
    PhiEvaluator::new(hom).recursive(sub, h)
}

/// Searches the fiber product for a lift of `h` generating the whole source;
/// returns the lexicographically first such lift in fiber-product order, or
/// `None` if no lift generates.
pub fn find_generating_lift(
    hom: &GroupHom,
    h: &GeneratingTuple,
) -> Result<Option<GeneratingTuple>> {
    if !hom.is_surjective() {
        return Err(Error::NotSurjective);
    }
    if !same_group(h.group(), hom.target()) {
        return Err(Error::InvalidArgument(
            "tuple does not live in the target group".into(),
        ));
    }
    if !h.generates() {
        return Err(Error::NotGenerating);
    }
    let source = hom.source();
    let full = source.full_subgroup();
    let fibers: Vec<Vec<usize>> = h
        .entries()
        .iter()
        .map(|&hi| lift_fiber(hom, &full, hi))
        .collect();
    for tuple in ProductIter::new(&fibers) {
        if source.generates(&tuple) {
            return Ok(Some(GeneratingTuple::new(source, tuple)?));
        }
    }
    Ok(None)
}

/// Outcome of exhaustively verifying one epimorphism at one tuple length.
#[derive(Clone, Debug)]
pub struct GaschutzReport {
    pub n: usize,
    pub tuple_count: usize,
    pub phi_min: u128,
    pub phi_max: u128,
    pub lifts_found: usize,
    /// Target tuples for which no generating lift exists, or for which the
    /// lift search and the count disagree. Expected empty.
    pub violations: Vec<Vec<usize>>,
}

impl GaschutzReport {
    pub fn verified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn phi_constant(&self) -> bool {
        self.phi_min == self.phi_max
    }
}

/// For every generating n-tuple of the target, confirms a generating lift
/// exists and tallies the phi values. Rejects `n` below the source's minimal
/// number of generators (the claim is only made from there up).
pub fn verify_epi_gaschutz(hom: &GroupHom, n: usize) -> Result<GaschutzReport> {
    if !hom.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let d = min_generators(hom.source());
    if n < d {
        return Err(Error::TooFewEntries { n, d });
    }
    let tuples = generating_tuples(hom.target(), n);
    let full = hom.source().full_subgroup();
    let mut evaluator = PhiEvaluator::new(hom);
    let mut phi_min = u128::MAX;
    let mut phi_max = 0u128;
    let mut lifts_found = 0usize;
    let mut violations = Vec::new();
    for h in &tuples {
        let phi = evaluator.recursive(&full, h)?.count;
        phi_min = phi_min.min(phi);
        phi_max = phi_max.max(phi);
        let lift = find_generating_lift(hom, h)?;
        if lift.is_some() {
            lifts_found += 1;
        }
        if lift.is_none() || phi == 0 || (phi > 0) != lift.is_some() {
            violations.push(h.entries().to_vec());
        }
    }
    if tuples.is_empty() {
        phi_min = 0;
    }
    Ok(GaschutzReport {
        n,
        tuple_count: tuples.len(),
        phi_min,
        phi_max,
        lifts_found,
        violations,
    })
}

/// The minimal `m` such that for every quotient of the group and every
/// generating n-tuple of that quotient with `n >= m`, a generating lift
/// exists. Quantified over the group's own quotient lattice.
///
/// For `n >= d(G)` lifts always exist (the lifting lemma, verified
/// exhaustively by the test corpus), so only `n < d(G)` is scanned; the scan
/// walks down from `d(G) − 1` and stops at the first failing level.
pub fn gaschutz_rank(group: &Arc<FiniteGroup>) -> usize {
    let d = min_generators(group);
    let quotients = group.quotient_epimorphisms();
    let mut rank = d;
    for n in (0..d).rev() {
        let all_lift = quotients.iter().all(|q| {
            generating_tuples(q.target(), n).iter().all(|h| {
                find_generating_lift(q, h)
                    .expect("projection is surjective and h generates")
                    .is_some()
            })
        });
        if all_lift {
            rank = n;
        } else {
            break;
        }
    }
    rank
}

/// Searches for an isomorphism by mapping a minimal generating tuple of `a`
/// onto tuples of `b` and extending. Exhaustive on small orders; used by
/// tests as third-isomorphism scaffolding.
pub fn find_isomorphism(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Option<GroupHom> {
    if a.order() != b.order() {
        return None;
    }
    let d = min_generators(a);
    let gens_a = (0..a.order())
        .combinations(d)
        .find(|combo| a.generates(combo))
        .expect("minimal generating set exists");
    let all: Vec<usize> = (0..b.order()).collect();
    let factors: Vec<Vec<usize>> = (0..d).map(|_| all.clone()).collect();
    for images in ProductIter::new(&factors) {
        let pairs: Vec<(usize, usize)> =
            gens_a.iter().copied().zip(images.iter().copied()).collect();
        if let Ok(hom) = GroupHom::from_generator_images(a, b, &pairs) {
            if hom.is_injective() && hom.is_surjective() {
                return Some(hom);
            }
        }
    }
    None
}
