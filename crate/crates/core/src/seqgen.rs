//! Constrained random generation of domain sequences and strand assembly.
//!
//! Every voxel gets one plus-side 8-mer; the minus side is its reverse
//! complement. Voxels are visited in canonical order and each draws from
//! its own ChaCha stream keyed by `(seed, x, y, k)`, so the result depends
//! only on the seed, the grid and the constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canvas::{CanvasSpec, VoxelCoord};
use crate::error::{Error, Result};
use crate::layout::{BrickKind, DomainId, Orientation, Side, StrandPlan};
use crate::sequence::{DomainSeq, DOMAIN_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstraintConfig {
    pub gc_min: f64,
    pub gc_max: f64,
    pub max_run: u32,
    pub target_hamming: u32,
    pub retry_budget: u32,
    pub check_complements: bool,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            gc_min: 0.40,
            gc_max: 0.60,
            max_run: 4,
            target_hamming: 6,
            retry_budget: 1000,
            check_complements: false,
        }
    }
}

const EPS: f64 = 1e-9;

impl ConstraintConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |f: f64| (0.0..=1.0).contains(&f);
        if !in_unit(self.gc_min) || !in_unit(self.gc_max) || self.gc_min > self.gc_max {
            return Err(Error::InvalidConfig(format!(
                "GC window [{}, {}] must satisfy 0 <= min <= max <= 1",
                self.gc_min, self.gc_max
            )));
        }
        if self.max_run == 0 {
            return Err(Error::InvalidConfig("max_run must be at least 1".into()));
        }
        if self.target_hamming > DOMAIN_LEN as u32 {
            return Err(Error::InvalidConfig(format!(
                "target_hamming {} exceeds the domain length",
                self.target_hamming
            )));
        }
        Ok(())
    }

    /// Allowed G+C counts per 8-mer, inclusive.
    pub fn gc_count_window(&self) -> (u32, u32) {
        let n = DOMAIN_LEN as f64;
        let lo = (n * self.gc_min - EPS).ceil().max(0.0) as u32;
        let hi = (n * self.gc_max + EPS).floor() as u32;
        (lo, hi)
    }

    /// Whether an 8-mer passes the GC and homopolymer rules.
    pub fn admits(&self, s: DomainSeq) -> bool {
        let (lo, hi) = self.gc_count_window();
        let gc = s.gc_count();
        gc >= lo && gc <= hi && s.longest_run() <= self.max_run
    }

    /// Every 8-mer satisfying the hard constraints, in code order.
    pub fn admissible(&self) -> Result<Vec<DomainSeq>> {
        self.validate()?;
        let (lo, hi) = self.gc_count_window();
        if lo > hi {
            return Err(Error::Infeasible(format!(
                "no integer GC count of an 8-mer lies in [{}, {}]",
                self.gc_min, self.gc_max
            )));
        }
        let out: Vec<DomainSeq> = DomainSeq::all().filter(|s| self.admits(*s)).collect();
        if out.is_empty() {
            return Err(Error::Infeasible(
                "no 8-mer satisfies the GC and run constraints".into(),
            ));
        }
        Ok(out)
    }
}

/// An accepted domain whose distance to the earlier domains fell short of
/// the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub domain: DomainId,
    pub min_distance: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainAssignment {
    pub seed: u64,
    pub config: ConstraintConfig,
    pub spec: CanvasSpec,
    /// Plus-side sequence per voxel, canonical voxel order.
    plus: Vec<DomainSeq>,
    pub violations: Vec<Violation>,
}

impl DomainAssignment {
    pub fn plus(&self, v: VoxelCoord) -> Option<DomainSeq> {
        self.spec
            .contains(v)
            .then(|| self.plus[self.spec.index_of(v)])
    }

    pub fn get(&self, d: DomainId) -> Option<DomainSeq> {
        self.plus(d.voxel).map(|s| match d.side {
            Side::Plus => s,
            Side::Minus => s.reverse_complement(),
        })
    }

    /// Plus-side domains in canonical voxel order.
    pub fn plus_domains(&self) -> &[DomainSeq] {
        &self.plus
    }

    pub fn iter(&self) -> impl Iterator<Item = (DomainId, DomainSeq)> + '_ {
        self.spec.voxels().flat_map(move |v| {
            let s = self.plus[self.spec.index_of(v)];
            [
                (DomainId::new(v, Side::Plus), s),
                (DomainId::new(v, Side::Minus), s.reverse_complement()),
            ]
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream owned by one voxel.
pub fn voxel_stream_seed(seed: u64, v: VoxelCoord) -> u64 {
    let mut h = splitmix64(seed);
    for part in [v.x, v.y, v.k] {
        h = splitmix64(h ^ u64::from(part));
    }
    h
}

const NO_DISTANCE: u8 = u8::MAX;

pub fn generate_domains(
    spec: CanvasSpec,
    seed: u64,
    config: ConstraintConfig,
) -> Result<DomainAssignment> {
    spec.validate()?;
    let admissible = config.admissible()?;
    let n = admissible.len() as u32;
    // min distance from each admissible 8-mer to everything accepted so far
    let mut min_dist = vec![NO_DISTANCE; admissible.len()];
    let mut plus = Vec::with_capacity(spec.voxel_count());
    let mut violations = Vec::new();

    for v in spec.voxels() {
        let mut rng = ChaCha8Rng::seed_from_u64(voxel_stream_seed(seed, v));
        if min_dist.iter().all(|d| *d == 0) {
            return Err(Error::Infeasible(format!(
                "only {} distinct admissible 8-mers exist, canvas needs {}",
                plus.len(),
                spec.voxel_count()
            )));
        }
        let target = config.target_hamming.min(DOMAIN_LEN as u32) as u8;
        let mut best: Option<(usize, u8)> = None;
        let mut drawn = 0u32;
        let budget = config.retry_budget.max(1);
        let chosen = loop {
            let i = rng.random_range(0..n) as usize;
            let d = min_dist[i];
            drawn += 1;
            if d >= target && d > 0 {
                break (i, d);
            }
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((i, d));
            }
            if drawn >= budget {
                // uniqueness is never relaxed
                if let Some((bi, bd)) = best {
                    if bd > 0 {
                        break (bi, bd);
                    }
                }
            }
        };
        let (i, d) = chosen;
        let accepted = admissible[i];
        if d != NO_DISTANCE && u32::from(d) < config.target_hamming {
            violations.push(Violation {
                domain: DomainId::new(v, Side::Plus),
                min_distance: u32::from(d),
            });
        }
        let rc = accepted.reverse_complement();
        for (slot, cand) in min_dist.iter_mut().zip(&admissible) {
            let mut dist = cand.hamming(accepted) as u8;
            if config.check_complements {
                dist = dist.min(cand.hamming(rc) as u8);
            }
            *slot = (*slot).min(dist);
        }
        plus.push(accepted);
    }

    Ok(DomainAssignment {
        seed,
        config,
        spec,
        plus,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strand {
    pub id: String,
    pub kind: BrickKind,
    pub orientation: Orientation,
    pub domains: Vec<DomainId>,
    pub sequence: String,
}

impl Strand {
    pub fn length_nt(&self) -> usize {
        self.sequence.len()
    }
}

/// Stable strand identifier derived from the strand's kind and 5' domain.
pub fn strand_id(kind: BrickKind, first: DomainId) -> String {
    let tag = match kind {
        BrickKind::Full => 'F',
        BrickKind::Half => 'H',
        BrickKind::Boundary => 'B',
        BrickKind::Fragment => 'R',
    };
    let side = match first.side {
        Side::Plus => 'p',
        Side::Minus => 'm',
    };
    let v = first.voxel;
    format!("{tag}-{}-{}-{}{side}", v.x, v.y, v.k)
}

pub fn assemble_strands(plan: &StrandPlan, assignment: &DomainAssignment) -> Result<Vec<Strand>> {
    if plan.spec != assignment.spec {
        return Err(Error::SpecMismatch);
    }
    plan.bricks
        .iter()
        .map(|b| {
            let mut sequence = String::with_capacity(b.length_nt());
            for d in &b.domains {
                let s = if plan.protected_domains.contains(d) {
                    DomainSeq::POLY_T
                } else {
                    assignment
                        .get(*d)
                        .ok_or_else(|| Error::MissingDomain(d.to_string()))?
                };
                sequence.push_str(&s.to_string());
            }
            Ok(Strand {
                id: strand_id(b.kind, b.domains[0]),
                kind: b.kind,
                orientation: b.orientation,
                domains: b.domains.clone(),
                sequence,
            })
        })
        .collect()
}

/// Homopolymer runs longer than `max_run` that cross a domain junction
/// inside an assembled strand, as `(strand id, run start, run length)`.
pub fn junction_runs(strands: &[Strand], max_run: u32) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    for s in strands {
        let bytes = s.sequence.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut j = i;
            while j < bytes.len() && bytes[j] == bytes[i] {
                j += 1;
            }
            let len = j - i;
            let crosses = i / DOMAIN_LEN != (j - 1) / DOMAIN_LEN;
            if len > max_run as usize && crosses {
                out.push((s.id.clone(), i, len));
            }
            i = j;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canvas::Canvas;
    use crate::layout::{build_plan, PlanOptions};

    fn spec(w: u32, h: u32, d: u32) -> CanvasSpec {
        CanvasSpec::new(w, h, d).unwrap()
    }

    #[test]
    fn default_window_is_exactly_four() {
        assert_eq!(ConstraintConfig::default().gc_count_window(), (4, 4));
        let half = ConstraintConfig {
            gc_min: 0.5,
            gc_max: 0.5,
            ..Default::default()
        };
        assert_eq!(half.gc_count_window(), (4, 4));
    }

    #[test]
    fn default_admissible_set_size() {
        // C(8,4) * 2^8 placements; a run of five is impossible with four G/C
        let n = ConstraintConfig::default().admissible().unwrap().len();
        assert_eq!(n, 70 * 256);
    }

    #[test]
    fn infeasible_and_invalid_configs() {
        let empty = ConstraintConfig {
            gc_min: 0.55,
            gc_max: 0.60,
            ..Default::default()
        };
        assert!(matches!(
            generate_domains(spec(2, 2, 16), 1, empty),
            Err(Error::Infeasible(_))
        ));
        let bad = ConstraintConfig {
            gc_min: 0.7,
            gc_max: 0.6,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = ConstraintConfig {
            max_run: 0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = ConstraintConfig {
            target_hamming: 9,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn too_many_voxels_for_distinct_codes() {
        // all-GC, alternating, no runs: only CGCGCGCG and GCGCGCGC remain
        let cfg = ConstraintConfig {
            gc_min: 1.0,
            gc_max: 1.0,
            max_run: 1,
            ..Default::default()
        };
        assert_eq!(cfg.admissible().unwrap().len(), 2);
        assert!(matches!(
            generate_domains(spec(2, 2, 16), 5, cfg),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn small_canvas_properties() {
        let s = spec(2, 2, 16);
        let a = generate_domains(s, 42, ConstraintConfig::default()).unwrap();
        let plus = a.plus_domains();
        assert_eq!(plus.len(), 8);
        for (i, d) in plus.iter().enumerate() {
            assert_eq!(d.gc_count(), 4);
            assert!(d.longest_run() <= 4);
            for e in &plus[..i] {
                assert_ne!(d, e);
            }
        }
        assert_eq!(
            a,
            generate_domains(s, 42, ConstraintConfig::default()).unwrap()
        );
        let b = generate_domains(s, 43, ConstraintConfig::default()).unwrap();
        assert_ne!(a.plus_domains(), b.plus_domains());
    }

    #[test]
    fn minus_side_is_reverse_complement() {
        let a = generate_domains(spec(3, 2, 32), 7, ConstraintConfig::default()).unwrap();
        for v in a.spec.voxels() {
            let p = a.get(DomainId::new(v, Side::Plus)).unwrap();
            let m = a.get(DomainId::new(v, Side::Minus)).unwrap();
            assert_eq!(m, p.reverse_complement());
        }
        assert_eq!(a.iter().count(), 2 * a.spec.voxel_count());
    }

    #[test]
    fn large_canvas_records_violations() {
        // a quaternary length-8 code with distance 6 has at most 4^3 = 64 words
        let a = generate_domains(spec(6, 6, 48), 1, ConstraintConfig::default()).unwrap();
        assert!(a.violations.len() >= 216 - 64);
        let plus = a.plus_domains();
        let order: Vec<VoxelCoord> = a.spec.voxels().collect();
        for viol in &a.violations {
            let i = order.iter().position(|v| *v == viol.domain.voxel).unwrap();
            let brute = plus[..i].iter().map(|e| e.hamming(plus[i])).min().unwrap();
            assert_eq!(brute, viol.min_distance);
        }
    }

    #[test]
    fn complement_checking_keeps_codes_apart() {
        let cfg = ConstraintConfig {
            check_complements: true,
            ..Default::default()
        };
        let a = generate_domains(spec(3, 3, 32), 9, cfg).unwrap();
        let plus = a.plus_domains();
        for (i, d) in plus.iter().enumerate() {
            for e in &plus[..i] {
                assert!(d.hamming(*e) >= 1);
                assert!(d.hamming(e.reverse_complement()) >= 1);
            }
        }
    }

    #[test]
    fn zero_budget_still_generates() {
        let cfg = ConstraintConfig {
            retry_budget: 0,
            ..Default::default()
        };
        let a = generate_domains(spec(2, 2, 32), 3, cfg).unwrap();
        assert_eq!(a.plus_domains().len(), 16);
    }

    #[test]
    fn assembled_lengths_and_protection() {
        let s = spec(2, 2, 16);
        let a = generate_domains(s, 42, ConstraintConfig::default()).unwrap();
        let mut c = Canvas::new(s).unwrap();
        c.set_voxel(VoxelCoord::new(0, 0, 1), false).unwrap();
        let opts = PlanOptions {
            protector_policy: crate::layout::ProtectorPolicy::SuppressAndProtect,
            ..Default::default()
        };
        let plan = build_plan(&c, opts).unwrap();
        let strands = assemble_strands(&plan, &a).unwrap();
        let protected = DomainId::new(VoxelCoord::new(0, 0, 0), Side::Minus);
        let mut seen = false;
        for st in &strands {
            assert_eq!(st.length_nt(), 8 * st.domains.len());
            for (j, d) in st.domains.iter().enumerate() {
                let chunk = &st.sequence[8 * j..8 * j + 8];
                if *d == protected {
                    assert_eq!(chunk, "TTTTTTTT");
                    seen = true;
                } else {
                    assert_eq!(chunk, a.get(*d).unwrap().to_string());
                }
            }
        }
        assert!(seen);
    }

    #[test]
    fn assemble_rejects_mismatched_assignment() {
        let plan = build_plan(
            &Canvas::new(spec(2, 2, 16)).unwrap(),
            PlanOptions::default(),
        )
        .unwrap();
        let a = generate_domains(spec(2, 2, 32), 1, ConstraintConfig::default()).unwrap();
        assert!(matches!(
            assemble_strands(&plan, &a),
            Err(Error::SpecMismatch)
        ));
    }

    #[test]
    fn strand_ids_are_unique() {
        let s = spec(4, 4, 32);
        let a = generate_domains(s, 1, ConstraintConfig::default()).unwrap();
        let mut c = Canvas::new(s).unwrap();
        c.set_voxel(VoxelCoord::new(1, 2, 1), false).unwrap();
        let opts = PlanOptions {
            boundary_merge: true,
            ..Default::default()
        };
        let strands = assemble_strands(&build_plan(&c, opts).unwrap(), &a).unwrap();
        let mut ids: Vec<&str> = strands.iter().map(|s| s.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), strands.len());
    }

    #[test]
    fn junction_run_detection() {
        let strand = Strand {
            id: "x".into(),
            kind: BrickKind::Half,
            orientation: Orientation::X,
            domains: vec![],
            sequence: "ACGTAAAAAAAGCTGC".into(),
        };
        assert_eq!(
            junction_runs(std::slice::from_ref(&strand), 4),
            vec![("x".to_string(), 4, 7)]
        );
        assert!(junction_runs(&[strand], 7).is_empty());
    }
}
