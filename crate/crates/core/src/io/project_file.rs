//! The `.3dna` project document: canonical pretty-printed JSON.
//!
//! ```json
//! {
//!   "format": "3dna-project",
//!   "version": 1,
//!   "canvas": { "width_helices": 8, "height_helices": 8, "depth_bp": 64 },
//!   "removed_voxels": [[1, 1, 1], ...],
//!   "generation": { "seed": 42, "constraints": { ... } },
//!   "options": { "boundary_merge": false, "protector_policy": "emit_fragments" },
//!   "sequences": { "sha256": "...", "strands": [{ "id": "...", "sequence": "..." }] }
//! }
//! ```
//!
//! `sequences` is optional. Sequences are always regenerated from the seed
//! on import; the cache only has to match its own checksum.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canvas::{Canvas, CanvasSpec, VoxelCoord};
use crate::error::{Error, Result};
use crate::layout::PlanOptions;
use crate::project::{GenerationParams, Project};
use crate::seqgen::Strand;

pub const FORMAT_TAG: &str = "3dna-project";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CachedStrand {
    pub id: String,
    pub sequence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CachedSequences {
    pub sha256: String,
    pub strands: Vec<CachedStrand>,
}

impl CachedSequences {
    pub fn from_strands(strands: &[Strand]) -> Self {
        let strands: Vec<CachedStrand> = strands
            .iter()
            .map(|s| CachedStrand {
                id: s.id.clone(),
                sequence: s.sequence.clone(),
            })
            .collect();
        CachedSequences {
            sha256: checksum(&strands),
            strands,
        }
    }

    pub fn verify(&self) -> Result<()> {
        if checksum(&self.strands) == self.sha256 {
            Ok(())
        } else {
            Err(Error::ChecksumMismatch)
        }
    }
}

fn checksum(strands: &[CachedStrand]) -> String {
    let mut h = Sha256::new();
    for s in strands {
        h.update(s.id.as_bytes());
        h.update(b"\t");
        h.update(s.sequence.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectDocument {
    format: String,
    version: u64,
    canvas: CanvasSpec,
    removed_voxels: Vec<[u32; 3]>,
    generation: GenerationParams,
    options: PlanOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequences: Option<CachedSequences>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportedProject {
    pub project: Project,
    pub cached: Option<CachedSequences>,
}

/// Serializes a project. Identical projects give identical bytes.
pub fn export_project(project: &Project, cached: Option<&CachedSequences>) -> Vec<u8> {
    let doc = ProjectDocument {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        canvas: *project.spec(),
        removed_voxels: project
            .canvas
            .removed_voxels()
            .map(|v| [v.x, v.y, v.k])
            .collect(),
        generation: project.generation,
        options: project.options,
        sequences: cached.cloned(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("project document serializes");
    out.push(b'\n');
    out
}

pub fn import_project(bytes: &[u8]) -> Result<ImportedProject> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    match value.get("format").and_then(|f| f.as_str()) {
        Some(FORMAT_TAG) => {}
        Some(other) => return Err(Error::Malformed(format!("unknown format tag {other:?}"))),
        None => return Err(Error::Malformed("missing format tag".into())),
    }
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(Error::UnsupportedVersion(v)),
        None => return Err(Error::Malformed("missing or non-integer version".into())),
    }
    let doc: ProjectDocument =
        serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;

    doc.generation.constraints.validate()?;
    let mut canvas = Canvas::new(doc.canvas)?;
    for [x, y, k] in doc.removed_voxels {
        canvas.set_voxel(VoxelCoord::new(x, y, k), false)?;
    }
    if let Some(cache) = &doc.sequences {
        cache.verify()?;
    }
    Ok(ImportedProject {
        project: Project {
            canvas,
            generation: doc.generation,
            options: doc.options,
        },
        cached: doc.sequences,
    })
}
