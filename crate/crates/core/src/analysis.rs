//! Pairwise similarity of domain sequences.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::layout::StrandPlan;
use crate::seqgen::DomainAssignment;
use crate::sequence::{DomainSeq, DOMAIN_LEN};

/// Unordered pairs of domains sharing 8, 7 or 6 positions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityHistogram {
    pub pairs_8: u64,
    pub pairs_7: u64,
    pub pairs_6: u64,
    pub total_domains: u64,
}

/// Counts pairs by multiplicity of each distinct 8-mer and by walking its
/// radius-2 Hamming ball, so the cost is linear in the number of domains.
pub fn similarity_histogram(domains: &[DomainSeq]) -> SimilarityHistogram {
    let mut count = vec![0u64; 1 << 16];
    let mut distinct = Vec::new();
    for d in domains {
        let c = &mut count[d.code() as usize];
        if *c == 0 {
            distinct.push(d.code());
        }
        *c += 1;
    }

    let mut pairs_8 = 0;
    // ordered pair sums, halved at the end
    let mut ordered_7 = 0;
    let mut ordered_6 = 0;
    for &code in &distinct {
        let m = count[code as usize];
        pairs_8 += m * (m - 1) / 2;
        for i in 0..DOMAIN_LEN {
            for a in 1..4u16 {
                let one = code ^ (a << (2 * i));
                ordered_7 += m * count[one as usize];
                for j in i + 1..DOMAIN_LEN {
                    for b in 1..4u16 {
                        let two = one ^ (b << (2 * j));
                        ordered_6 += m * count[two as usize];
                    }
                }
            }
        }
    }
    SimilarityHistogram {
        pairs_8,
        pairs_7: ordered_7 / 2,
        pairs_6: ordered_6 / 2,
        total_domains: domains.len() as u64,
    }
}

/// Parses text domains and builds the histogram.
pub fn similarity_histogram_str<S: AsRef<str>>(domains: &[S]) -> Result<SimilarityHistogram> {
    let parsed = domains
        .iter()
        .map(|s| s.as_ref().parse::<DomainSeq>())
        .collect::<Result<Vec<_>>>()?;
    Ok(similarity_histogram(&parsed))
}

/// Every domain sequence used by the plan's strands, both sides, without
/// protector domains.
pub fn plan_domain_sequences(plan: &StrandPlan, assignment: &DomainAssignment) -> Vec<DomainSeq> {
    plan.bricks
        .iter()
        .flat_map(|b| b.domains.iter())
        .filter(|d| !plan.protected_domains.contains(d))
        .filter_map(|d| assignment.get(*d))
        .collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::error::Error;

    fn brute(domains: &[DomainSeq]) -> (u64, u64, u64) {
        let mut h = (0, 0, 0);
        for i in 0..domains.len() {
            for j in i + 1..domains.len() {
                match 8 - domains[i].hamming(domains[j]) {
                    8 => h.0 += 1,
                    7 => h.1 += 1,
                    6 => h.2 += 1,
                    _ => {}
                }
            }
        }
        h
    }

    #[test]
    fn tiny_cases() {
        let h = similarity_histogram_str(&["AAAAAAAA"]).unwrap();
        assert_eq!((h.pairs_8, h.pairs_7, h.pairs_6), (0, 0, 0));
        let h = similarity_histogram_str(&["AAAAAAAA", "AAAAAAAC"]).unwrap();
        assert_eq!((h.pairs_8, h.pairs_7, h.pairs_6), (0, 1, 0));
        assert_eq!(h.total_domains, 2);
        let h = similarity_histogram_str(&["ACGTACGT", "ACGTACGT", "ACGTACGT"]).unwrap();
        assert_eq!(h.pairs_8, 3);
        let h = similarity_histogram(&[]);
        assert_eq!(h, SimilarityHistogram::default());
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(matches!(
            similarity_histogram_str(&["ACGT"]),
            Err(Error::LengthMismatch(4))
        ));
    }

    proptest! {
        #[test]
        fn matches_brute_force(codes in proptest::collection::vec(0u16..64, 0..80)) {
            // small alphabet slice so collisions and near-misses are common
            let domains: Vec<DomainSeq> = codes.into_iter().map(DomainSeq::from_code).collect();
            let h = similarity_histogram(&domains);
            prop_assert_eq!((h.pairs_8, h.pairs_7, h.pairs_6), brute(&domains));
        }
    }
}
