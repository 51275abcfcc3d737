use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::ModeSpectrum;

/// One eigenvalue `λ = Λ₀ Πᵢ ξᵢ^{nᵢ}` of a product-form density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueRecord {
    pub occupation: Vec<u32>,
    pub lambda: f64,
}

struct Frontier {
    lambda: f64,
    occupation: Vec<u32>,
    /// Index of the last mode that was incremented to reach this vector.
    last: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // max-heap: larger λ first, then lexicographically smaller occupation
    fn cmp(&self, other: &Self) -> Ordering {
        self.lambda
            .total_cmp(&other.lambda)
            .then_with(|| other.occupation.cmp(&self.occupation))
    }
}

/// The `k` largest eigenvalues in non-increasing order, ties broken by
/// lexicographic order of the occupation vector.
///
/// Best-first search: every occupation vector has a unique parent obtained
/// by decrementing its last non-zero entry, and a child is never larger than
/// its parent, so popping a max-heap yields eigenvalues in order. Modes with
/// `ξ = 0` contribute only their ground level; generation stops early once no
/// positive eigenvalue remains.
pub fn top_eigenvalues(spec: &ModeSpectrum, k: usize) -> Vec<EigenvalueRecord> {
    let n = spec.n_modes();
    let mut out = Vec::with_capacity(k.min(1 << 20));
    if k == 0 || spec.lambda0 <= 0.0 {
        return out;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Frontier {
        lambda: spec.lambda0,
        occupation: vec![0; n],
        last: 0,
    });
    while let Some(node) = heap.pop() {
        for j in node.last..n {
            let ratio = spec.xi[j];
            let lambda = node.lambda * ratio;
            if lambda <= 0.0 {
                continue;
            }
            let mut occupation = node.occupation.clone();
            occupation[j] += 1;
            heap.push(Frontier {
                lambda,
                occupation,
                last: j,
            });
        }
        out.push(EigenvalueRecord {
            occupation: node.occupation,
            lambda: node.lambda,
        });
        if out.len() == k {
            break;
        }
    }
    out
}
