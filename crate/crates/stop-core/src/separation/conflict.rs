use crate::instance::StopInstance;
use crate::paths::MinTimeMatrix;
use std::collections::BTreeSet;

/// Customer pairs that no single feasible route can visit together, in either order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConflictSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl ConflictSet {
    /// Pairs `i < j` of customers whose shortest routes through both, in both
    /// orders, exceed the time limit. `min_times` must belong to `inst`.
    pub fn build(inst: &StopInstance, min_times: &MinTimeMatrix<f64>) -> Self {
        let (s, t) = (inst.origin(), inst.destination());
        let limit = inst.time_limit();
        let too_long = |a: usize, b: usize| min_times.get(s, a) + min_times.get(a, b) + min_times.get(b, t) > limit;
        let pairs = inst
            .customers()
            .flat_map(|i| (i + 1..inst.destination()).map(move |j| (i, j)))
            .filter(|&(i, j)| too_long(i, j) && too_long(j, i))
            .collect();
        ConflictSet { pairs }
    }

    /// The pairs whose vertices both survive in `reduced`, renamed to its ids.
    pub fn restricted_to(&self, reduced: &StopInstance) -> Self {
        let mut local = vec![None; reduced.original_ids().iter().max().map_or(0, |&m| m + 1)];
        for (v, &orig) in reduced.original_ids().iter().enumerate() {
            local[orig] = Some(v);
        }
        let at = |v: usize| local.get(v).copied().flatten();
        let pairs = self
            .pairs
            .iter()
            .filter_map(|&(i, j)| Some((at(i)?, at(j)?)))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        ConflictSet { pairs }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i.min(j), i.max(j)))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
