//! Sparse binary patterns: part descriptors and engram indices.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Sorted, duplicate-free indices of the set bits.
fn sample_bits<R: Rng + ?Sized>(rng: &mut R, dim: u32, active: u32) -> Vec<u16> {
    let mut bits: Vec<u16> = index::sample(rng, dim as usize, active as usize)
        .into_iter()
        .map(|i| i as u16)
        .collect();
    bits.sort_unstable();
    bits
}

/// Size of the intersection of two sorted index lists.
pub fn overlap(a: &[u16], b: &[u16]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Allocentric description of a part as a sparse binary feature pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Descriptor(Vec<u16>);

impl Descriptor {
    /// Builds a descriptor from set-bit indices, which must be strictly
    /// increasing and below `dim`.
    pub fn from_bits(bits: Vec<u16>, dim: u32) -> Option<Self> {
        let sorted = bits.windows(2).all(|w| w[0] < w[1]);
        let in_range = bits.last().is_none_or(|&b| (b as u32) < dim);
        (sorted && in_range && !bits.is_empty()).then_some(Self(bits))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: u32, active: u32) -> Self {
        Self(sample_bits(rng, dim, active))
    }

    pub fn bits(&self) -> &[u16] {
        &self.0
    }

    pub fn active(&self) -> usize {
        self.0.len()
    }

    /// `|a ∧ b| / k`, with `k` the number of set bits of `self`.
    pub fn similarity(&self, other: &Descriptor) -> f64 {
        overlap(&self.0, &other.0) as f64 / self.0.len() as f64
    }

    /// Moves `flips` set bits to random unset positions, keeping sparsity.
    pub fn with_swaps<R: Rng + ?Sized>(&self, rng: &mut R, flips: u32, dim: u32) -> Self {
        if flips == 0 {
            return self.clone();
        }
        let bits = &self.0;
        let drop = index::sample(rng, bits.len(), flips as usize).into_vec();
        let mut keep: Vec<u16> = bits
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, &b)| b)
            .collect();
        let mut added = 0;
        while added < flips {
            let b = rng.random_range(0..dim) as u16;
            if bits.binary_search(&b).is_err() && !keep.contains(&b) {
                keep.push(b);
                added += 1;
            }
        }
        keep.sort_unstable();
        Self(keep)
    }
}

/// Random sparse index pattern of a memory node. Carries no content.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Engram(Vec<u16>);

impl Engram {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: u32, active: u32) -> Self {
        Self(sample_bits(rng, dim, active))
    }

    pub fn bits(&self) -> &[u16] {
        &self.0
    }

    pub fn overlap(&self, other: &Engram) -> usize {
        overlap(&self.0, &other.0)
    }
}
