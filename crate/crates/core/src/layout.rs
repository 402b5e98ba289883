//! Brick tiling of the canvas and the sculpt → merge → protect pipeline
//! that turns a voxel selection into a strand plan.
//!
//! Layers are grouped into two-layer slabs. Slab `p` covers layers `2p` and
//! `2p + 1`; even slabs run bricks along x, odd slabs along y. Within a slab
//! every helix contributes one plus segment and one minus segment (two
//! domains each). A full brick is the minus segment of one helix followed by
//! the plus segment of its neighbour along the slab direction; the two
//! segments left over at the ends of each row become half bricks.
//!
//! Domain order inside a brick is 5'→3'. Plus strands run towards
//! increasing `k`, minus strands towards decreasing `k`, so a full brick in
//! slab `p` reads `[h:2p+1:-, h:2p:-, h':2p:+, h':2p+1:+]`: positions 1 and
//! 4 sit in the upper layer of the slab, 2 and 3 in the lower one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canvas::{Canvas, CanvasSpec, VoxelCoord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// One 8-nt single-stranded domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DomainId {
    pub voxel: VoxelCoord,
    pub side: Side,
}

impl DomainId {
    pub const fn new(voxel: VoxelCoord, side: Side) -> Self {
        DomainId { voxel, side }
    }

    /// The complementary domain of the same duplex.
    pub fn partner(self) -> DomainId {
        DomainId {
            voxel: self.voxel,
            side: self.side.opposite(),
        }
    }

    /// The domain that follows this one 3'-ward along the same strand side
    /// of the same helix, if any.
    fn successor(self, layers: u32) -> Option<DomainId> {
        let VoxelCoord { x, y, k } = self.voxel;
        let k = match self.side {
            Side::Plus if k + 1 < layers => k + 1,
            Side::Minus if k > 0 => k - 1,
            _ => return None,
        };
        Some(DomainId::new(VoxelCoord { x, y, k }, self.side))
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.voxel.x,
            self.voxel.y,
            self.voxel.k,
            self.side.as_str()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    X,
    Y,
}

impl Orientation {
    /// Orientation of the bricks in slab `pair`.
    pub fn of_pair(pair: u32) -> Orientation {
        if pair.is_multiple_of(2) {
            Orientation::X
        } else {
            Orientation::Y
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::X => "x",
            Orientation::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BrickKind {
    Full,
    Half,
    Boundary,
    Fragment,
}

impl BrickKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BrickKind::Full => "full",
            BrickKind::Half => "half",
            BrickKind::Boundary => "boundary",
            BrickKind::Fragment => "fragment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Anchor {
    /// Helix `(x, y)` of the brick's first domain.
    pub helix: (u32, u32),
    pub pair_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Brick {
    pub kind: BrickKind,
    pub orientation: Orientation,
    /// 5'→3'.
    pub domains: Vec<DomainId>,
    pub anchor: Anchor,
}

impl Brick {
    pub fn length_nt(&self) -> usize {
        8 * self.domains.len()
    }
}

/// The two domains a helix contributes to slab `pair` on one side, 5'→3'.
pub fn segment(helix: (u32, u32), side: Side, pair: u32) -> [DomainId; 2] {
    let lower = DomainId::new(VoxelCoord::new(helix.0, helix.1, 2 * pair), side);
    let upper = DomainId::new(VoxelCoord::new(helix.0, helix.1, 2 * pair + 1), side);
    match side {
        Side::Plus => [lower, upper],
        Side::Minus => [upper, lower],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickLayout {
    pub spec: CanvasSpec,
    /// Full and half bricks in canonical order.
    pub bricks: Vec<Brick>,
}

pub fn canonical_layout(spec: CanvasSpec) -> Result<BrickLayout> {
    spec.validate()?;
    let (w, h) = (spec.width_helices, spec.height_helices);
    let mut bricks = Vec::with_capacity(spec.voxel_count());
    for pair in 0..spec.layer_pairs() {
        let orientation = Orientation::of_pair(pair);
        // (rows, cells per row, helix at (row, cell))
        let (rows, len) = match orientation {
            Orientation::X => (h, w),
            Orientation::Y => (w, h),
        };
        let helix = |row: u32, cell: u32| match orientation {
            Orientation::X => (cell, row),
            Orientation::Y => (row, cell),
        };
        for row in 0..rows {
            for cell in 0..len - 1 {
                let from = helix(row, cell);
                let to = helix(row, cell + 1);
                let mut domains = Vec::with_capacity(4);
                domains.extend(segment(from, Side::Minus, pair));
                domains.extend(segment(to, Side::Plus, pair));
                bricks.push(Brick {
                    kind: BrickKind::Full,
                    orientation,
                    domains,
                    anchor: Anchor {
                        helix: from,
                        pair_index: pair,
                    },
                });
            }
            for (end, side) in [
                (helix(row, len - 1), Side::Minus),
                (helix(row, 0), Side::Plus),
            ] {
                bricks.push(Brick {
                    kind: BrickKind::Half,
                    orientation,
                    domains: segment(end, side, pair).to_vec(),
                    anchor: Anchor {
                        helix: end,
                        pair_index: pair,
                    },
                });
            }
        }
    }
    Ok(BrickLayout { spec, bricks })
}

impl BrickLayout {
    pub fn count(&self, kind: BrickKind) -> usize {
        self.bricks.iter().filter(|b| b.kind == kind).count()
    }

    /// Bricks that hold the complement of at least one domain of `brick`,
    /// in order of first contact.
    pub fn neighbors(&self, brick: &Brick) -> Result<Vec<&Brick>> {
        if !self.bricks.contains(brick) {
            return Err(Error::UnknownBrick);
        }
        let owner = domain_owners(&self.bricks);
        let mut seen = Vec::new();
        for d in &brick.domains {
            if let Some(&i) = owner.get(&d.partner()) {
                if &self.bricks[i] != brick && !seen.contains(&i) {
                    seen.push(i);
                }
            }
        }
        Ok(seen.into_iter().map(|i| &self.bricks[i]).collect())
    }
}

fn domain_owners(bricks: &[Brick]) -> HashMap<DomainId, usize> {
    let mut owner = HashMap::new();
    for (i, b) in bricks.iter().enumerate() {
        for d in &b.domains {
            owner.insert(*d, i);
        }
    }
    owner
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtectorPolicy {
    #[default]
    EmitFragments,
    SuppressAndProtect,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanOptions {
    pub boundary_merge: bool,
    pub protector_policy: ProtectorPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandPlan {
    pub spec: CanvasSpec,
    pub bricks: Vec<Brick>,
    /// Domains whose sequence is forced to TTTTTTTT.
    pub protected_domains: BTreeSet<DomainId>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickCounts {
    pub full: usize,
    pub half: usize,
    pub boundary: usize,
    pub fragment: usize,
}

impl BrickCounts {
    pub fn strands(&self) -> usize {
        self.full + self.half + self.boundary + self.fragment
    }
}

impl StrandPlan {
    pub fn counts(&self) -> BrickCounts {
        let mut c = BrickCounts::default();
        for b in &self.bricks {
            match b.kind {
                BrickKind::Full => c.full += 1,
                BrickKind::Half => c.half += 1,
                BrickKind::Boundary => c.boundary += 1,
                BrickKind::Fragment => c.fragment += 1,
            }
        }
        c
    }

    pub fn domain_count(&self) -> usize {
        self.bricks.iter().map(|b| b.domains.len()).sum()
    }

    pub fn total_nt(&self) -> usize {
        8 * self.domain_count()
    }
}

/// Restricts every canonical brick to the selected voxels. Each maximal run
/// of surviving domains becomes its own strand.
pub fn sculpt(layout: &BrickLayout, canvas: &Canvas) -> Result<StrandPlan> {
    if layout.spec != *canvas.spec() {
        return Err(Error::SpecMismatch);
    }
    let mut bricks = Vec::with_capacity(layout.bricks.len());
    let mut warnings = Vec::new();
    for brick in &layout.bricks {
        let keep: Vec<bool> = brick
            .domains
            .iter()
            .map(|d| canvas.is_selected(d.voxel))
            .collect();
        if keep.iter().all(|k| *k) {
            bricks.push(brick.clone());
            continue;
        }
        let mut start = 0;
        while start < keep.len() {
            if !keep[start] {
                start += 1;
                continue;
            }
            let mut end = start;
            while end < keep.len() && keep[end] {
                end += 1;
            }
            let domains = brick.domains[start..end].to_vec();
            // A surviving two-domain run is a half brick only if it is a
            // whole segment, i.e. it does not straddle the full brick's
            // central junction.
            let kind = if end - start == 2 && start % 2 == 0 {
                BrickKind::Half
            } else {
                BrickKind::Fragment
            };
            let first = domains[0].voxel;
            let piece = Brick {
                kind,
                orientation: brick.orientation,
                domains,
                anchor: Anchor {
                    helix: (first.x, first.y),
                    pair_index: brick.anchor.pair_index,
                },
            };
            if kind == BrickKind::Fragment {
                warnings.push(format!(
                    "irregular {}-nt fragment starting at domain {}",
                    piece.length_nt(),
                    piece.domains[0]
                ));
            }
            bricks.push(piece);
            start = end;
        }
    }
    Ok(StrandPlan {
        spec: layout.spec,
        bricks,
        protected_domains: BTreeSet::new(),
        warnings,
    })
}

/// Greedily merges half bricks into sequence-contiguous full bricks,
/// producing 48-nt boundary bricks. Halves are visited by ascending
/// `(pair_index, y, x, side)`; a full brick absorbs at most one half.
pub fn merge_boundary_bricks(plan: &StrandPlan) -> StrandPlan {
    let layers = plan.spec.layers();
    let mut by_first = HashMap::new();
    let mut by_last = HashMap::new();
    for (i, b) in plan.bricks.iter().enumerate() {
        if b.kind == BrickKind::Full {
            by_first.insert(b.domains[0], i);
            by_last.insert(*b.domains.last().unwrap(), i);
        }
    }

    let mut halves: Vec<usize> = (0..plan.bricks.len())
        .filter(|&i| plan.bricks[i].kind == BrickKind::Half)
        .collect();
    halves.sort_by_key(|&i| {
        let b = &plan.bricks[i];
        (
            b.anchor.pair_index,
            b.anchor.helix.1,
            b.anchor.helix.0,
            b.domains[0].side,
        )
    });

    // full index -> (half index, half goes first)
    let mut merges: HashMap<usize, (usize, bool)> = HashMap::new();
    let mut absorbed = vec![false; plan.bricks.len()];
    for hi in halves {
        let half = &plan.bricks[hi];
        let last = *half.domains.last().unwrap();
        let before = last
            .successor(layers)
            .and_then(|d| by_first.get(&d))
            .filter(|fi| !merges.contains_key(fi))
            .map(|&fi| (fi, true));
        // full brick ending right before this half begins
        let after = || {
            predecessor(half.domains[0], layers)
                .and_then(|d| by_last.get(&d))
                .filter(|fi| !merges.contains_key(fi))
                .map(|&fi| (fi, false))
        };
        if let Some((fi, half_first)) = before.or_else(after) {
            merges.insert(fi, (hi, half_first));
            absorbed[hi] = true;
        }
    }

    let mut bricks = Vec::with_capacity(plan.bricks.len() - merges.len());
    for (i, b) in plan.bricks.iter().enumerate() {
        if absorbed[i] {
            continue;
        }
        match merges.get(&i) {
            Some(&(hi, half_first)) => {
                let half = &plan.bricks[hi];
                let mut domains = Vec::with_capacity(6);
                if half_first {
                    domains.extend_from_slice(&half.domains);
                    domains.extend_from_slice(&b.domains);
                } else {
                    domains.extend_from_slice(&b.domains);
                    domains.extend_from_slice(&half.domains);
                }
                let first = domains[0].voxel;
                bricks.push(Brick {
                    kind: BrickKind::Boundary,
                    orientation: b.orientation,
                    domains,
                    anchor: Anchor {
                        helix: (first.x, first.y),
                        pair_index: b.anchor.pair_index,
                    },
                });
            }
            None => bricks.push(b.clone()),
        }
    }
    StrandPlan {
        spec: plan.spec,
        bricks,
        protected_domains: plan.protected_domains.clone(),
        warnings: plan.warnings.clone(),
    }
}

fn predecessor(d: DomainId, layers: u32) -> Option<DomainId> {
    let VoxelCoord { x, y, k } = d.voxel;
    let k = match d.side {
        Side::Plus if k > 0 => k - 1,
        Side::Minus if k + 1 < layers => k + 1,
        _ => return None,
    };
    Some(DomainId::new(VoxelCoord { x, y, k }, d.side))
}

pub fn apply_protector_policy(plan: &StrandPlan, policy: ProtectorPolicy) -> StrandPlan {
    match policy {
        ProtectorPolicy::EmitFragments => plan.clone(),
        ProtectorPolicy::SuppressAndProtect => {
            let (dropped, kept): (Vec<&Brick>, Vec<&Brick>) = plan
                .bricks
                .iter()
                .partition(|b| b.kind == BrickKind::Fragment && b.length_nt() < 16);
            let remaining: BTreeSet<DomainId> = kept
                .iter()
                .flat_map(|b| b.domains.iter().copied())
                .collect();
            let mut protected_domains = plan.protected_domains.clone();
            let mut warnings = plan.warnings.clone();
            for b in &dropped {
                for d in &b.domains {
                    warnings.push(format!("dropped 8-nt fragment {d}"));
                    if remaining.contains(&d.partner()) {
                        protected_domains.insert(d.partner());
                    }
                }
            }
            StrandPlan {
                spec: plan.spec,
                bricks: kept.into_iter().cloned().collect(),
                protected_domains,
                warnings,
            }
        }
    }
}

/// Sculpt, optionally merge boundary bricks, then apply the protector
/// policy.
pub fn build_plan(canvas: &Canvas, options: PlanOptions) -> Result<StrandPlan> {
    let layout = canonical_layout(*canvas.spec())?;
    let mut plan = sculpt(&layout, canvas)?;
    if options.boundary_merge {
        plan = merge_boundary_bricks(&plan);
    }
    Ok(apply_protector_policy(&plan, options.protector_policy))
}
