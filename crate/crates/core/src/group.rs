//! Finite groups as first-class tabulated objects: subgroup enumeration,
//! homomorphisms with kernels and images, and quotients.
//!
//! A [`FiniteGroup`] is built once from permutations and then frozen: elements
//! are indexed 0..order in canonical sorted order and all products go through
//! the multiplication table. Everything downstream (lift counting, towers)
//! works on element indices.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::perm::{ElementSet, Permutation};
use crate::{Error, Result};

pub struct FiniteGroup {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    table: Vec<usize>,
    inverses: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn from_generators(gens: &[Permutation], cap: usize) -> Result<Arc<Self>> {
        Ok(Self::from_element_set(ElementSet::close(gens, cap)?))
    }

    pub fn from_element_set(set: ElementSet) -> Arc<Self> {
        let elements = set.elements().to_vec();
        let order = elements.len();
        let index: HashMap<Permutation, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut table = vec![0; order * order];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                let prod = pa.compose(pb).expect("equal degrees within a group");
                table[a * order + b] = *index.get(&prod).expect("closed element set");
            }
        }
        let inverses = elements
            .iter()
            .map(|p| *index.get(&p.inverse()).expect("closed element set"))
            .collect();
        let identity = *index
            .get(&Permutation::identity(set.degree()))
            .expect("closure contains the identity");
        Arc::new(FiniteGroup {
            elements,
            index,
            table,
            inverses,
            identity,
        })
    }

    pub fn trivial() -> Arc<Self> {
        Self::from_generators(&[], 1).expect("trivial closure")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.elements[self.identity].degree()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Member indices of the subgroup generated by `seed`, sorted.
    pub fn closure_indices(&self, seed: &[usize]) -> Vec<usize> {
        let (mask, _) = self.closure_mask(seed);
        (0..self.order()).filter(|&i| mask[i]).collect()
    }

    /// Order of the subgroup generated by `seed`.
    pub fn closure_size(&self, seed: &[usize]) -> usize {
        self.closure_mask(seed).1
    }

    /// True iff `seed` generates the whole group.
    pub fn generates(&self, seed: &[usize]) -> bool {
        self.closure_size(seed) == self.order()
    }

    fn closure_mask(&self, seed: &[usize]) -> (Vec<bool>, usize) {
        let order = self.order();
        let mut mask = vec![false; order];
        let mut stack = Vec::with_capacity(order);
        mask[self.identity] = true;
        stack.push(self.identity);
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in seed {
                let y = self.table[x * order + g];
                if !mask[y] {
                    mask[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        (mask, count)
    }

    pub fn full_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup {
            parent: Arc::clone(self),
            members: (0..self.order()).collect(),
        }
    }

    pub fn trivial_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup {
            parent: Arc::clone(self),
            members: vec![self.identity],
        }
    }

    /// Wraps a member list as a subgroup after checking closure under the
    /// table, inverses, and the identity.
    pub fn subgroup_from_indices(self: &Arc<Self>, members: &[usize]) -> Result<Subgroup> {
        let mut sorted: Vec<usize> = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &i in &sorted {
            if i >= self.order() {
                return Err(Error::ElementOutOfRange(i, self.order()));
            }
        }
        let mask = {
            let mut m = vec![false; self.order()];
            for &i in &sorted {
                m[i] = true;
            }
            m
        };
        if !mask[self.identity] {
            return Err(Error::InvalidArgument(
                "subgroup must contain the identity".into(),
            ));
        }
        for &a in &sorted {
            if !mask[self.inv(a)] {
                return Err(Error::InvalidArgument(
                    "member set is not closed under inverse".into(),
                ));
            }
            for &b in &sorted {
                if !mask[self.mul(a, b)] {
                    return Err(Error::InvalidArgument(
                        "member set is not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(Subgroup {
            parent: Arc::clone(self),
            members: sorted,
        })
    }

    pub(crate) fn subgroup_unchecked(self: &Arc<Self>, members: Vec<usize>) -> Subgroup {
        Subgroup {
            parent: Arc::clone(self),
            members,
        }
    }

    /// All subgroups, each exactly once, in canonical order (by order, then by
    /// member list). Includes the trivial and the full subgroup.
    ///
    /// Enumeration extends known subgroups by one outside element and closes,
    /// seeded with the cyclic subgroups.
    pub fn subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut found: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
        let mut queue: Vec<Vec<usize>> = Vec::new();
        let mut insert = |members: Vec<usize>, queue: &mut Vec<Vec<usize>>| {
            if !found.contains_key(&members) {
                found.insert(members.clone(), ());
                queue.push(members);
            }
        };
        insert(vec![self.identity], &mut queue);
        for g in 0..self.order() {
            insert(self.closure_indices(&[g]), &mut queue);
        }
        while let Some(members) = queue.pop() {
            for g in 0..self.order() {
                if members.binary_search(&g).is_err() {
                    let mut seed = members.clone();
                    seed.push(g);
                    insert(self.closure_indices(&seed), &mut queue);
                }
            }
        }
        let mut subs: Vec<Subgroup> = found
            .into_keys()
            .map(|members| Subgroup {
                parent: Arc::clone(self),
                members,
            })
            .collect();
        subs.sort_by(|a, b| (a.order(), &a.members).cmp(&(b.order(), &b.members)));
        subs
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        let mask = sub.mask();
        for g in 0..self.order() {
            let gi = self.inv(g);
            for &n in &sub.members {
                if !mask[self.mul(self.mul(g, n), gi)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn normal_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        self.subgroups()
            .into_iter()
            .filter(|s| self.is_normal(s))
            .collect()
    }

    /// Quotient by a normal subgroup, realized faithfully as the permutation
    /// action on cosets, together with the projection epimorphism.
    ///
    /// Normality is always verified, never assumed.
    pub fn quotient(self: &Arc<Self>, normal: &Subgroup) -> Result<(Arc<FiniteGroup>, GroupHom)> {
        if !Arc::ptr_eq(self, &normal.parent) {
            return Err(Error::InvalidArgument(
                "subgroup belongs to a different group".into(),
            ));
        }
        if !self.is_normal(normal) {
            return Err(Error::NotNormal);
        }
        let order = self.order();
        // Coset of each element, canonically represented by its least member.
        let mut coset_rep = vec![usize::MAX; order];
        let mut reps = Vec::new();
        for x in 0..order {
            if coset_rep[x] == usize::MAX {
                let members: Vec<usize> = normal.members.iter().map(|&n| self.mul(x, n)).collect();
                let rep = *members.iter().min().expect("nonempty coset");
                for &m in &members {
                    coset_rep[m] = rep;
                }
                reps.push(rep);
            }
        }
        reps.sort_unstable();
        let coset_pos: HashMap<usize, usize> =
            reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        // Left multiplication action of G on the cosets; since the subgroup is
        // normal its core equals the subgroup, so the induced action of the
        // quotient is faithful.
        let coset_count = reps.len();
        let action = |g: usize| -> Permutation {
            let images: Vec<usize> = reps
                .iter()
                .map(|&r| coset_pos[&coset_rep[self.mul(g, r)]])
                .collect();
            Permutation::from_images(images).expect("group action is a bijection")
        };
        let acting: Vec<Permutation> = (0..order).map(&action).collect();
        let mut distinct = acting.clone();
        distinct.sort();
        distinct.dedup();
        debug_assert_eq!(distinct.len(), coset_count);
        let quotient =
            FiniteGroup::from_element_set(ElementSet::from_closed_sorted(coset_count, distinct));
        let images: Vec<usize> = acting
            .iter()
            .map(|p| quotient.index_of(p).expect("image is tabulated"))
            .collect();
        let hom = GroupHom {
            source: Arc::clone(self),
            target: Arc::clone(&quotient),
            images,
        };
        debug_assert!(hom.verify_multiplicative());
        Ok((quotient, hom))
    }

    /// Projection epimorphisms onto all quotients (one per normal subgroup),
    /// in the canonical normal-subgroup order.
    pub fn quotient_epimorphisms(self: &Arc<Self>) -> Vec<GroupHom> {
        self.normal_subgroups()
            .iter()
            .map(|n| self.quotient(n).expect("enumerated normal subgroup").1)
            .collect()
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order())
            .field("degree", &self.degree())
            .finish()
    }
}

/// True when the two handles denote the same group, either literally shared
/// or element-for-element equal.
pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a.elements == b.elements
}

/// A subgroup, stored as the sorted member indices of its parent.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, element: usize) -> bool {
        self.members.binary_search(&element).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.parent.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.parent.order()];
        for &m in &self.members {
            mask[m] = true;
        }
        mask
    }

    /// True iff every member of `self` lies in `other`.
    pub fn subset_of(&self, other: &Subgroup) -> bool {
        let mut i = 0;
        for &m in &self.members {
            while i < other.members.len() && other.members[i] < m {
                i += 1;
            }
            if i == other.members.len() || other.members[i] != m {
                return false;
            }
        }
        true
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.parent, &other.parent) && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subgroup")
            .field("order", &self.order())
            .field("members", &self.members)
            .finish()
    }
}

/// A homomorphism between finite groups, tabulated on every source element.
#[derive(Clone)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    images: Vec<usize>,
}

impl GroupHom {
    pub fn identity(group: &Arc<FiniteGroup>) -> GroupHom {
        GroupHom {
            source: Arc::clone(group),
            target: Arc::clone(group),
            images: (0..group.order()).collect(),
        }
    }

    /// Extends generator images to the unique homomorphism, if well defined.
    ///
    /// `pairs` maps source elements (which must generate the source) to target
    /// elements. Extension is by breadth-first closure; afterwards
    /// multiplicativity is re-checked exhaustively on all element pairs.
    pub fn from_generator_images(
        source: &Arc<FiniteGroup>,
        target: &Arc<FiniteGroup>,
        pairs: &[(usize, usize)],
    ) -> Result<GroupHom> {
        for &(g, h) in pairs {
            if g >= source.order() {
                return Err(Error::ElementOutOfRange(g, source.order()));
            }
            if h >= target.order() {
                return Err(Error::ElementOutOfRange(h, target.order()));
            }
        }
        let mut images: Vec<Option<usize>> = vec![None; source.order()];
        images[source.identity()] = Some(target.identity());
        let mut stack = vec![source.identity()];
        while let Some(x) = stack.pop() {
            let fx = images[x].expect("assigned before push");
            for &(g, fg) in pairs {
                let y = source.mul(x, g);
                let fy = target.mul(fx, fg);
                match images[y] {
                    None => {
                        images[y] = Some(fy);
                        stack.push(y);
                    }
                    Some(existing) if existing != fy => {
                        return Err(Error::IllDefinedHom(format!(
                            "conflicting images for element {y}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        if images.iter().any(|i| i.is_none()) {
            return Err(Error::NonGeneratingDomain);
        }
        let hom = GroupHom {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images: images.into_iter().map(|i| i.expect("checked")).collect(),
        };
        if !hom.verify_multiplicative() {
            return Err(Error::IllDefinedHom(
                "exhaustive multiplicativity check failed".into(),
            ));
        }
        Ok(hom)
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn apply(&self, element: usize) -> usize {
        self.images[element]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Checks `f(xy) = f(x)f(y)` on all pairs.
    pub fn verify_multiplicative(&self) -> bool {
        let n = self.source.order();
        for x in 0..n {
            for y in 0..n {
                if self.images[self.source.mul(x, y)]
                    != self.target.mul(self.images[x], self.images[y])
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn kernel(&self) -> Subgroup {
        let id = self.target.identity();
        let members: Vec<usize> = (0..self.source.order())
            .filter(|&x| self.images[x] == id)
            .collect();
        self.source.subgroup_unchecked(members)
    }

    pub fn image(&self) -> Subgroup {
        let mut members: Vec<usize> = self.images.clone();
        members.sort_unstable();
        members.dedup();
        self.target.subgroup_unchecked(members)
    }

    /// Image of a subgroup of the source, as a subgroup of the target.
    pub fn image_of(&self, sub: &Subgroup) -> Subgroup {
        let mut members: Vec<usize> = sub.members().iter().map(|&x| self.images[x]).collect();
        members.sort_unstable();
        members.dedup();
        self.target.subgroup_unchecked(members)
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    /// Composition `next ∘ self` (first `self`, then `next`).
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        if !same_group(&self.target, &next.source) {
            return Err(Error::InvalidArgument(
                "composition endpoints do not match".into(),
            ));
        }
        Ok(GroupHom {
            source: Arc::clone(&self.source),
            target: Arc::clone(&next.target),
            images: self.images.iter().map(|&x| next.images[x]).collect(),
        })
    }
}

impl std::fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupHom")
            .field("source_order", &self.source.order())
            .field("target_order", &self.target.order())
            .finish()
    }
}

/// Constructors for the named group families used throughout the crate.
/// Each returns the tabulated group together with the indices of its
/// canonical generators (in the order the family defines them).
pub mod families {
    use super::*;

    type Presented = (Arc<FiniteGroup>, Vec<usize>);

    fn present(gens: Vec<Permutation>, cap: usize) -> Result<Presented> {
        let group = FiniteGroup::from_generators(&gens, cap)?;
        let indices = gens
            .iter()
            .map(|g| group.index_of(g).expect("generator lies in its closure"))
            .collect();
        Ok((group, indices))
    }

    /// Cyclic group of order `m` as the m-cycle on m points.
    pub fn cyclic(m: usize, cap: usize) -> Result<Presented> {
        if m == 0 {
            return Err(Error::InvalidArgument("cyclic order must be >= 1".into()));
        }
        if m == 1 {
            return present(vec![], cap);
        }
        let cycle = Permutation::from_images((0..m).map(|i| (i + 1) % m).collect())?;
        present(vec![cycle], cap)
    }

    /// Dihedral group of order `order` (`order = 2m`), as symmetries of the
    /// m-gon for m >= 3; degenerate small cases are realized faithfully on
    /// extra points.
    pub fn dihedral(order: usize, cap: usize) -> Result<Presented> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "dihedral order must be an even number >= 2".into(),
            ));
        }
        let m = order / 2;
        match m {
            1 => present(vec![Permutation::from_images(vec![1, 0])?], cap),
            2 => present(
                vec![
                    Permutation::from_images(vec![1, 0, 2, 3])?,
                    Permutation::from_images(vec![0, 1, 3, 2])?,
                ],
                cap,
            ),
            _ => {
                let rotation = Permutation::from_images((0..m).map(|i| (i + 1) % m).collect())?;
                let reflection = Permutation::from_images((0..m).map(|i| (m - i) % m).collect())?;
                present(vec![rotation, reflection], cap)
            }
        }
    }

    /// Klein four-group on four points.
    pub fn klein(cap: usize) -> Result<Presented> {
        present(
            vec![
                Permutation::from_images(vec![1, 0, 2, 3])?,
                Permutation::from_images(vec![0, 1, 3, 2])?,
            ],
            cap,
        )
    }

    /// Symmetric group on `k` points, generated by a transposition and a
    /// k-cycle.
    pub fn symmetric(k: usize, cap: usize) -> Result<Presented> {
        match k {
            0 | 1 => present(vec![], cap),
            2 => present(vec![Permutation::from_images(vec![1, 0])?], cap),
            _ => {
                let mut t: Vec<usize> = (0..k).collect();
                t.swap(0, 1);
                let cycle = Permutation::from_images((0..k).map(|i| (i + 1) % k).collect())?;
                present(vec![Permutation::from_images(t)?, cycle], cap)
            }
        }
    }

    /// Alternating group on `k` points.
    pub fn alternating(k: usize, cap: usize) -> Result<Presented> {
        match k {
            0..=2 => present(vec![], cap),
            3 => present(vec![Permutation::from_images(vec![1, 2, 0])?], cap),
            _ => {
                let mut three: Vec<usize> = (0..k).collect();
                three[0] = 1;
                three[1] = 2;
                three[2] = 0;
                let long = if k % 2 == 1 {
                    // Odd k: the k-cycle is even.
                    Permutation::from_images((0..k).map(|i| (i + 1) % k).collect())?
                } else {
                    // Even k: use the (k-1)-cycle on points 1..k.
                    let mut images: Vec<usize> = (0..k).collect();
                    for i in 1..k {
                        images[i] = if i + 1 < k { i + 1 } else { 1 };
                    }
                    Permutation::from_images(images)?
                };
                present(vec![Permutation::from_images(three)?, long], cap)
            }
        }
    }

    /// Quaternion group of order 8, by left multiplication on
    /// {1, −1, i, −i, j, −j, k, −k}.
    pub fn quaternion8(cap: usize) -> Result<Presented> {
        let i = Permutation::from_images(vec![2, 3, 1, 0, 6, 7, 5, 4])?;
        let j = Permutation::from_images(vec![4, 5, 7, 6, 1, 0, 2, 3])?;
        present(vec![i, j], cap)
    }

    /// Elementary abelian group of order `p^k`, as `k` disjoint p-cycles.
    pub fn elem_abelian(p: usize, k: usize, cap: usize) -> Result<Presented> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if k == 0 {
            return present(vec![], cap);
        }
        let degree = p * k;
        let gens = (0..k)
            .map(|block| {
                let images: Vec<usize> = (0..degree)
                    .map(|x| {
                        if x / p == block {
                            block * p + (x % p + 1) % p
                        } else {
                            x
                        }
                    })
                    .collect();
                Permutation::from_images(images)
            })
            .collect::<Result<Vec<_>>>()?;
        present(gens, cap)
    }

    pub fn is_prime(n: usize) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }
}
