//! A design project: canvas, generation parameters and plan options, plus
//! the full pipeline from voxels to strands.

use serde::{Deserialize, Serialize};

use crate::analysis::{plan_domain_sequences, similarity_histogram, SimilarityHistogram};
use crate::canvas::{Canvas, CanvasSpec};
use crate::cost::{estimate_cost, CostConfig, CostReport};
use crate::error::Result;
use crate::layout::{build_plan, BrickCounts, PlanOptions, StrandPlan};
use crate::seqgen::{
    assemble_strands, generate_domains, ConstraintConfig, DomainAssignment, Strand,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub seed: u64,
    pub constraints: ConstraintConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub canvas: Canvas,
    pub generation: GenerationParams,
    pub options: PlanOptions,
}

/// Counts reported after every edit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub canvas: CanvasSpec,
    pub selected_voxels: usize,
    /// Domains carried by the strands of the plan.
    pub domains: usize,
    pub physical_size_nm: (f64, f64, f64),
    pub bricks: BrickCounts,
    pub strands: usize,
    pub total_nt: usize,
    pub cost: CostReport,
}

impl Project {
    pub fn new(spec: CanvasSpec) -> Result<Self> {
        Ok(Project {
            canvas: Canvas::new(spec)?,
            generation: GenerationParams::default(),
            options: PlanOptions::default(),
        })
    }

    pub fn spec(&self) -> &CanvasSpec {
        self.canvas.spec()
    }

    pub fn plan(&self) -> Result<StrandPlan> {
        build_plan(&self.canvas, self.options)
    }

    pub fn assignment(&self) -> Result<DomainAssignment> {
        generate_domains(
            *self.spec(),
            self.generation.seed,
            self.generation.constraints,
        )
    }

    pub fn strands(&self) -> Result<Vec<Strand>> {
        assemble_strands(&self.plan()?, &self.assignment()?)
    }

    pub fn histogram(&self) -> Result<SimilarityHistogram> {
        let seqs = plan_domain_sequences(&self.plan()?, &self.assignment()?);
        Ok(similarity_histogram(&seqs))
    }

    /// Needs no sequences, so it stays cheap enough to run after every edit.
    pub fn summary(&self, cost: CostConfig) -> Result<DesignSummary> {
        let plan = self.plan()?;
        let stats = self.canvas.stats();
        let bricks = plan.counts();
        let total_nt = plan.total_nt();
        Ok(DesignSummary {
            canvas: *self.spec(),
            selected_voxels: stats.selected_voxels,
            domains: plan.domain_count(),
            physical_size_nm: stats.physical_size,
            bricks,
            strands: bricks.strands(),
            total_nt,
            cost: estimate_cost(total_nt as u64, cost)?,
        })
    }
}
