//! The molecular canvas: a cuboid grid of 8-bp duplex voxels and which of
//! them are still part of the sculpture.
//!
//! Helices run along z. A voxel is addressed by its helix `(x, y)` and its
//! 8-bp layer `k`, so a canvas of depth `D` bp has `D / 8` layers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DimensionError, Error, Result};

/// Base pairs per voxel along the helix axis.
pub const BP_PER_LAYER: u32 = 8;
/// Approximate helix-to-helix spacing in nm.
pub const HELIX_PITCH_NM: f64 = 2.5;
/// Approximate length of one 8-bp layer in nm.
pub const LAYER_LENGTH_NM: f64 = 2.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanvasSpec {
    pub width_helices: u32,
    pub height_helices: u32,
    pub depth_bp: u32,
}

impl CanvasSpec {
    /// Validated constructor.
    pub fn new(width_helices: u32, height_helices: u32, depth_bp: u32) -> Result<Self> {
        let spec = CanvasSpec {
            width_helices,
            height_helices,
            depth_bp,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> std::result::Result<(), DimensionError> {
        if self.width_helices < 2 {
            return Err(DimensionError::WidthTooSmall(self.width_helices));
        }
        if self.height_helices < 2 {
            return Err(DimensionError::HeightTooSmall(self.height_helices));
        }
        if self.depth_bp == 0 || !self.depth_bp.is_multiple_of(BP_PER_LAYER) {
            return Err(DimensionError::DepthNotMultipleOf8(self.depth_bp));
        }
        if !(self.depth_bp / BP_PER_LAYER).is_multiple_of(2) {
            return Err(DimensionError::OddLayerCount(self.depth_bp));
        }
        Ok(())
    }

    pub fn layers(&self) -> u32 {
        self.depth_bp / BP_PER_LAYER
    }

    /// Number of two-layer slabs.
    pub fn layer_pairs(&self) -> u32 {
        self.layers() / 2
    }

    pub fn voxel_count(&self) -> usize {
        self.width_helices as usize * self.height_helices as usize * self.layers() as usize
    }

    pub fn contains(&self, v: VoxelCoord) -> bool {
        v.x < self.width_helices && v.y < self.height_helices && v.k < self.layers()
    }

    pub(crate) fn check(&self, v: VoxelCoord) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                coord: v,
                width: self.width_helices,
                height: self.height_helices,
                layers: self.layers(),
            })
        }
    }

    /// Linear index in canonical voxel order (x outermost, k innermost).
    pub fn index_of(&self, v: VoxelCoord) -> usize {
        (v.x as usize * self.height_helices as usize + v.y as usize) * self.layers() as usize
            + v.k as usize
    }

    pub fn coord_of(&self, index: usize) -> VoxelCoord {
        let layers = self.layers() as usize;
        let height = self.height_helices as usize;
        VoxelCoord {
            x: (index / (layers * height)) as u32,
            y: ((index / layers) % height) as u32,
            k: (index % layers) as u32,
        }
    }

    /// All voxels in canonical order.
    pub fn voxels(&self) -> impl Iterator<Item = VoxelCoord> + '_ {
        (0..self.voxel_count()).map(move |i| self.coord_of(i))
    }

    /// Bounding-box size in nm.
    pub fn physical_size(&self) -> (f64, f64, f64) {
        (
            HELIX_PITCH_NM * self.width_helices as f64,
            HELIX_PITCH_NM * self.height_helices as f64,
            LAYER_LENGTH_NM * self.layers() as f64,
        )
    }
}

impl fmt::Display for CanvasSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}H x {}H x {}B",
            self.width_helices, self.height_helices, self.depth_bp
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VoxelCoord {
    pub x: u32,
    pub y: u32,
    pub k: u32,
}

impl VoxelCoord {
    pub const fn new(x: u32, y: u32, k: u32) -> Self {
        VoxelCoord { x, y, k }
    }
}

impl fmt::Display for VoxelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    spec: CanvasSpec,
    selected: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanvasStats {
    pub selected_voxels: usize,
    pub domain_count: usize,
    /// (x, y, z) in nm.
    pub physical_size: (f64, f64, f64),
}

impl Canvas {
    /// A canvas with every voxel selected.
    pub fn new(spec: CanvasSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Canvas {
            spec,
            selected: vec![true; spec.voxel_count()],
        })
    }

    pub fn spec(&self) -> &CanvasSpec {
        &self.spec
    }

    pub fn is_selected(&self, v: VoxelCoord) -> bool {
        self.spec.contains(v) && self.selected[self.spec.index_of(v)]
    }

    pub fn selected_count(&self) -> usize {
        self.selected.iter().filter(|s| **s).count()
    }

    pub fn selected_voxels(&self) -> impl Iterator<Item = VoxelCoord> + '_ {
        self.spec
            .voxels()
            .filter(move |v| self.selected[self.spec.index_of(*v)])
    }

    /// Deselected voxels in canonical order.
    pub fn removed_voxels(&self) -> impl Iterator<Item = VoxelCoord> + '_ {
        self.spec
            .voxels()
            .filter(move |v| !self.selected[self.spec.index_of(*v)])
    }

    pub fn set_voxel(&mut self, v: VoxelCoord, present: bool) -> Result<()> {
        self.spec.check(v)?;
        let i = self.spec.index_of(v);
        self.selected[i] = present;
        Ok(())
    }

    /// Deselects every voxel in the inclusive box `lo..=hi`.
    pub fn remove_box(&mut self, lo: VoxelCoord, hi: VoxelCoord) -> Result<()> {
        self.spec.check(lo)?;
        self.spec.check(hi)?;
        if lo.x > hi.x || lo.y > hi.y || lo.k > hi.k {
            return Err(Error::InvertedBox { lo, hi });
        }
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                for k in lo.k..=hi.k {
                    let i = self.spec.index_of(VoxelCoord { x, y, k });
                    self.selected[i] = false;
                }
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> CanvasStats {
        let selected_voxels = self.selected_count();
        CanvasStats {
            selected_voxels,
            domain_count: 2 * selected_voxels,
            physical_size: self.spec.physical_size(),
        }
    }

    /// Moves the selection onto a grid of different dimensions. Shared
    /// coordinates keep their state, new coordinates start selected.
    pub fn resize(&self, new_spec: CanvasSpec) -> Result<Canvas> {
        let mut out = Canvas::new(new_spec)?;
        for v in self.removed_voxels() {
            if new_spec.contains(v) {
                let i = new_spec.index_of(v);
                out.selected[i] = false;
            }
        }
        Ok(out)
    }
}
