//! Finite truncations of inverse limits: chains of finite groups with
//! verified connecting epimorphisms, a designated kernel pushed forward to
//! every level, and the compatible-lift argument made executable.
//!
//! The deepest level plays the role of the limit: a generating tuple of the
//! base quotient `G_M / K_M` is lifted once at the deepest level and then
//! projected down, and the per-level sets of kernel shifts that keep
//! generation are enumerated outright; at finite depth this is exactly the
//! finite-intersection structure of the compactness argument.

use std::sync::Arc;

use crate::group::{same_group, FiniteGroup, GroupHom, Subgroup};
use crate::lifting::{find_generating_lift, min_generators, GeneratingTuple, ProductIter};
use crate::{Error, Result};

/// A finite chain `G_1 <- G_2 <- … <- G_M` (deepest last) with the
/// pushforwards `K_m` of a designated normal kernel `K_M <= G_M`.
pub struct TowerSpec {
    levels: Vec<Arc<FiniteGroup>>,
    connecting: Vec<GroupHom>,
    projections: Vec<GroupHom>,
    kernels: Vec<Subgroup>,
    base_quotient: Arc<FiniteGroup>,
    base_map: GroupHom,
}

impl TowerSpec {
    /// Builds and verifies a tower. `connecting[i]` must be an epimorphism
    /// `levels[i+1] -> levels[i]`; `deepest_kernel` must be normal in the
    /// deepest level. Kernels at shallower levels are the pushforwards of the
    /// designated kernel, and the compatibility `p(K_{m+1}) = K_m` is checked
    /// after construction.
    pub fn new(
        levels: Vec<Arc<FiniteGroup>>,
        connecting: Vec<GroupHom>,
        deepest_kernel: Subgroup,
    ) -> Result<TowerSpec> {
        if levels.is_empty() {
            return Err(Error::InvalidTower(
                "a tower needs at least one level".into(),
            ));
        }
        if connecting.len() + 1 != levels.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels need {} connecting maps, got {}",
                levels.len(),
                levels.len() - 1,
                connecting.len()
            )));
        }
        for (i, map) in connecting.iter().enumerate() {
            if !same_group(map.source(), &levels[i + 1]) || !same_group(map.target(), &levels[i]) {
                return Err(Error::InvalidTower(format!(
                    "connecting map {i} does not join levels {} and {i}",
                    i + 1
                )));
            }
            if !map.is_surjective() {
                return Err(Error::NotSurjective);
            }
        }
        let deepest = levels.last().expect("nonempty");
        if !same_group(deepest_kernel.parent(), deepest) {
            return Err(Error::InvalidTower(
                "designated kernel must live in the deepest level".into(),
            ));
        }
        if !deepest.is_normal(&deepest_kernel) {
            return Err(Error::NotNormal);
        }
        // Composite projections G_M -> G_m.
        let depth = levels.len();
        let mut projections = vec![GroupHom::identity(deepest)];
        for m in (0..depth - 1).rev() {
            let next = projections.last().expect("seeded").then(&connecting[m])?;
            projections.push(next);
        }
        projections.reverse();
        let kernels: Vec<Subgroup> = projections
            .iter()
            .map(|p| p.image_of(&deepest_kernel))
            .collect();
        for m in 0..depth - 1 {
            if connecting[m].image_of(&kernels[m + 1]) != kernels[m] {
                return Err(Error::InvalidTower(format!(
                    "kernel pushforward incompatible between levels {} and {m}",
                    m + 1
                )));
            }
        }
        let (base_quotient, base_map) = deepest.quotient(&deepest_kernel)?;
        Ok(TowerSpec {
            levels,
            connecting,
            projections,
            kernels,
            base_quotient,
            base_map,
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, m: usize) -> &Arc<FiniteGroup> {
        &self.levels[m]
    }

    pub fn levels(&self) -> &[Arc<FiniteGroup>] {
        &self.levels
    }

    pub fn connecting(&self) -> &[GroupHom] {
        &self.connecting
    }

    /// Composite projection from the deepest level to level `m`.
    pub fn projection(&self, m: usize) -> &GroupHom {
        &self.projections[m]
    }

    pub fn kernel(&self, m: usize) -> &Subgroup {
        &self.kernels[m]
    }

    pub fn deepest(&self) -> &Arc<FiniteGroup> {
        self.levels.last().expect("nonempty")
    }

    /// `H = G_M / K_M`, the quotient the tuple to lift lives in.
    pub fn base_quotient(&self) -> &Arc<FiniteGroup> {
        &self.base_quotient
    }

    /// The projection `G_M -> G_M / K_M`.
    pub fn base_map(&self) -> &GroupHom {
        &self.base_map
    }

    /// The tower cut off at `depth` levels, with the pushforward kernel as
    /// its designated kernel and the same tie-breaking everywhere.
    pub fn truncate(&self, depth: usize) -> Result<TowerSpec> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::InvalidTower(format!(
                "cannot truncate a depth-{} tower to {depth}",
                self.depth()
            )));
        }
        TowerSpec::new(
            self.levels[..depth].to_vec(),
            self.connecting[..depth - 1].to_vec(),
            self.kernels[depth - 1].clone(),
        )
    }

    /// The induced map `G_M/K_M -> G_m/K_m` between the base quotient and a
    /// truncation's base quotient (used to transport tuples to truncations).
    pub fn induced_base_map(&self, truncated: &TowerSpec) -> Result<GroupHom> {
        let depth = truncated.depth();
        if depth > self.depth() {
            return Err(Error::InvalidTower(
                "truncation is deeper than the tower".into(),
            ));
        }
        // Elements of H are cosets; send a coset to the coset of the
        // projection of any representative. Well defined because the level
        // kernel is the pushforward of the designated kernel.
        let h = &self.base_quotient;
        let mut images = vec![usize::MAX; h.order()];
        for x in 0..self.deepest().order() {
            let hx = self.base_map.apply(x);
            let image = truncated
                .base_map()
                .apply(self.projections[depth - 1].apply(x));
            if images[hx] == usize::MAX {
                images[hx] = image;
            } else if images[hx] != image {
                return Err(Error::InvalidTower(
                    "induced base map is not well defined".into(),
                ));
            }
        }
        let pairs: Vec<(usize, usize)> =
            images.iter().enumerate().map(|(x, &fx)| (x, fx)).collect();
        GroupHom::from_generator_images(h, truncated.base_quotient(), &pairs)
    }
}

impl std::fmt::Debug for TowerSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let orders: Vec<usize> = self.levels.iter().map(|g| g.order()).collect();
        f.debug_struct("TowerSpec")
            .field("level_orders", &orders)
            .field(
                "kernel_orders",
                &self.kernels.iter().map(|k| k.order()).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// `Z/p <- Z/p^2 <- … <- Z/p^M` with the reduction maps; the designated
/// kernel is the kernel of the composite onto the shallowest level.
pub fn build_cyclic_tower(p: usize, depth: usize, cap: usize) -> Result<TowerSpec> {
    if !crate::group::families::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    let mut order = 1usize;
    for _ in 0..depth {
        order = order
            .checked_mul(p)
            .filter(|&o| o <= cap)
            .ok_or(Error::OrderCapExceeded { cap })?;
    }
    let mut levels = Vec::with_capacity(depth);
    let mut generators = Vec::with_capacity(depth);
    let mut m = p;
    for _ in 0..depth {
        let (group, gens) = crate::group::families::cyclic(m, cap)?;
        levels.push(group);
        generators.push(gens[0]);
        m *= p;
    }
    let mut connecting = Vec::with_capacity(depth - 1);
    for i in 0..depth - 1 {
        connecting.push(GroupHom::from_generator_images(
            &levels[i + 1],
            &levels[i],
            &[(generators[i + 1], generators[i])],
        )?);
    }
    // Kernel of the composite to the shallowest level.
    let composite = {
        let mut proj = GroupHom::identity(&levels[depth - 1]);
        for i in (0..depth - 1).rev() {
            proj = proj.then(&connecting[i])?;
        }
        proj
    };
    TowerSpec::new(levels.clone(), connecting, composite.kernel())
}

/// Per-level enumeration of the kernel shifts that keep generation:
/// `{ k in K_m^n : < p_m(g) · k > = G_m }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReport {
    /// 1-based level index, shallowest first.
    pub level: usize,
    pub group_order: usize,
    pub kernel_order: usize,
    pub shift_count: u128,
    pub generating_shifts: u128,
}

/// A compatible family of tuples produced by lifting once at the deepest
/// level and projecting down.
#[derive(Clone, Debug)]
pub struct TowerLift {
    pub deepest: GeneratingTuple,
    /// Tuple images at each level, shallowest first; the last entry equals
    /// the deepest tuple.
    pub per_level: Vec<Vec<usize>>,
    pub level_reports: Vec<LevelReport>,
}

/// Lifts a generating tuple of the base quotient to a tuple of the deepest
/// level that generates every level of the tower.
///
/// The lift is found by `find_generating_lift` at the deepest level (so the
/// tie-break is the lexicographically first lift) and projected down;
/// projections of generating tuples generate, and this is re-verified level
/// by level.
pub fn tower_lift(tower: &TowerSpec, h: &GeneratingTuple) -> Result<TowerLift> {
    if !same_group(h.group(), tower.base_quotient()) {
        return Err(Error::InvalidArgument(
            "tuple does not live in the tower's base quotient".into(),
        ));
    }
    let n = h.len();
    let d = min_generators(tower.deepest());
    if n < d {
        return Err(Error::TooFewEntries { n, d });
    }
    if !h.generates() {
        return Err(Error::NotGenerating);
    }
    let deepest = find_generating_lift(tower.base_map(), h)?
        .expect("a generating lift exists at the deepest level for n >= d");
    let mut per_level = Vec::with_capacity(tower.depth());
    for m in 0..tower.depth() {
        let image: Vec<usize> = deepest
            .entries()
            .iter()
            .map(|&x| tower.projection(m).apply(x))
            .collect();
        assert!(
            tower.level(m).generates(&image),
            "projected lift generates level {m}"
        );
        per_level.push(image);
    }
    let level_reports = level_sets_nonempty(tower, deepest.entries())?;
    Ok(TowerLift {
        deepest,
        per_level,
        level_reports,
    })
}

/// For an arbitrary lift tuple `g` at the deepest level, enumerates per level
/// the kernel shifts `k` in `K_m^n` with `< p_m(g)·k > = G_m` and reports the
/// cardinalities. All counts are positive when `n >= d(G_M)`.
pub fn level_sets_nonempty(
    tower: &TowerSpec,
    deepest_entries: &[usize],
) -> Result<Vec<LevelReport>> {
    let order = tower.deepest().order();
    for &x in deepest_entries {
        if x >= order {
            return Err(Error::ElementOutOfRange(x, order));
        }
    }
    let n = deepest_entries.len();
    let mut reports = Vec::with_capacity(tower.depth());
    for m in 0..tower.depth() {
        let group = tower.level(m);
        let kernel = tower.kernel(m);
        let projected: Vec<usize> = deepest_entries
            .iter()
            .map(|&x| tower.projection(m).apply(x))
            .collect();
        let factors: Vec<Vec<usize>> = (0..n).map(|_| kernel.members().to_vec()).collect();
        let mut generating = 0u128;
        let mut total = 0u128;
        for shift in ProductIter::new(&factors) {
            total += 1;
            let shifted: Vec<usize> = projected
                .iter()
                .zip(&shift)
                .map(|(&g, &k)| group.mul(g, k))
                .collect();
            if group.generates(&shifted) {
                generating += 1;
            }
        }
        reports.push(LevelReport {
            level: m + 1,
            group_order: group.order(),
            kernel_order: kernel.order(),
            shift_count: total,
            generating_shifts: generating,
        });
    }
    Ok(reports)
}
