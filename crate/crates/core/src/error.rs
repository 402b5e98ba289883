use thiserror::Error;

use crate::canvas::VoxelCoord;

/// Reasons a canvas dimension triple is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("width must be at least 2 helices, got {0}")]
    WidthTooSmall(u32),
    #[error("height must be at least 2 helices, got {0}")]
    HeightTooSmall(u32),
    #[error("depth must be a positive multiple of 8 bp, got {0}")]
    DepthNotMultipleOf8(u32),
    #[error("depth of {0} bp gives an odd number of 8-bp layers; use a multiple of 16")]
    OddLayerCount(u32),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid canvas dimensions: {0}")]
    Dimension(#[from] DimensionError),
    #[error("voxel {coord} is outside a {width}x{height}x{layers} grid")]
    OutOfRange {
        coord: VoxelCoord,
        width: u32,
        height: u32,
        layers: u32,
    },
    #[error("box corners are inverted: {lo} is not <= {hi}")]
    InvertedBox { lo: VoxelCoord, hi: VoxelCoord },
    #[error("canvas dimensions do not match the layout or assignment")]
    SpecMismatch,
    #[error("brick is not part of this layout")]
    UnknownBrick,
    #[error("domain {0} has no generated sequence")]
    MissingDomain(String),
    #[error("invalid nucleotide {0:?}")]
    InvalidBase(char),
    #[error("expected an 8-mer, got length {0}")]
    LengthMismatch(usize),
    #[error("invalid constraint configuration: {0}")]
    InvalidConfig(String),
    #[error("constraints are infeasible: {0}")]
    Infeasible(String),
    #[error("cost rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("malformed project file: {0}")]
    Malformed(String),
    #[error("unsupported project version {0}")]
    UnsupportedVersion(u64),
    #[error("cached sequence checksum mismatch")]
    ChecksumMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
