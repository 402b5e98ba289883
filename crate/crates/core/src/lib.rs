//! DNA-brick design from a sculpted voxel canvas.
//!
//! The pipeline is: [`canvas::Canvas`] (which voxels remain) →
//! [`layout::canonical_layout`] and [`layout::sculpt`] (which strands are
//! needed) → [`seqgen::generate_domains`] (one constrained 8-mer per voxel)
//! → [`seqgen::assemble_strands`] → exports in [`io`].

pub mod analysis;
pub mod canvas;
pub mod cost;
pub mod error;
pub mod io;
pub mod layout;
pub mod project;
pub mod seqgen;
pub mod sequence;

pub use canvas::{Canvas, CanvasSpec, CanvasStats, VoxelCoord};
pub use error::{DimensionError, Error, Result};
pub use layout::{
    apply_protector_policy, build_plan, canonical_layout, merge_boundary_bricks, sculpt, Brick,
    BrickKind, BrickLayout, DomainId, Orientation, PlanOptions, ProtectorPolicy, Side, StrandPlan,
};
pub use project::{DesignSummary, GenerationParams, Project};
pub use seqgen::{assemble_strands, generate_domains, ConstraintConfig, DomainAssignment, Strand};
pub use sequence::DomainSeq;
