//! Contiguous-partition enumeration for compound merging, plus the binary
//! bracketing count for constituency arithmetic. Note the two grow
//! differently: order-preserving contiguous partitions of n components number
//! 2^(n-1), while full binary bracketings over n leaves number the
//! (n-1)-th Catalan number.

use std::ops::Range;

use thiserror::Error;

use crate::phonology::PhonemeString;

pub const DEFAULT_COMPONENT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("{n} components exceeds the cap of {cap}")]
    TooManyComponents { n: usize, cap: usize },
    #[error("cannot partition zero components")]
    Empty,
}

/// All order- and contiguity-preserving partitions of `0..n` into groups,
/// as index ranges. Deterministic order: the n-1 gap bits counted in binary,
/// bit i set meaning a cut after element i.
pub fn partition_ranges(n: usize, cap: usize) -> Result<Vec<Vec<Range<usize>>>, PartitionError> {
    if n == 0 {
        return Err(PartitionError::Empty);
    }
    if n > cap {
        return Err(PartitionError::TooManyComponents { n, cap });
    }
    let gaps = n - 1;
    let mut out = Vec::with_capacity(1usize << gaps);
    for mask in 0u64..(1u64 << gaps) {
        let mut groups = Vec::new();
        let mut start = 0;
        for gap in 0..gaps {
            if mask & (1 << gap) != 0 {
                groups.push(start..gap + 1);
                start = gap + 1;
            }
        }
        groups.push(start..n);
        out.push(groups);
    }
    Ok(out)
}

/// Every partition of a compound's component list into contiguous groups.
pub fn enumerate_compound_partitions(
    components: &[PhonemeString],
    cap: usize,
) -> Result<Vec<Vec<Vec<PhonemeString>>>, PartitionError> {
    let ranges = partition_ranges(components.len(), cap)?;
    Ok(ranges
        .into_iter()
        .map(|groups| groups.into_iter().map(|r| components[r].to_vec()).collect())
        .collect())
}

/// Number of full binary bracketings over `n` leaves, i.e. the Catalan
/// number C(n-1).
pub fn count_bracketings(n: u64) -> u64 {
    assert!(n >= 1, "bracketings are defined for n >= 1 leaves");
    let k = n - 1;
    let mut c: u64 = 1;
    for i in 0..k {
        // C(i+1) = C(i) * 2(2i+1) / (i+2)
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}
