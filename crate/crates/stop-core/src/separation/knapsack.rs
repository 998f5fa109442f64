use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KnapsackError {
    #[error("items fixed to one exceed the capacity")]
    InfeasibleFixing,
    #[error("item {0} is fixed both to zero and to one")]
    ContradictoryFixing(usize),
}

/// Maximize `Σ profit·y` subject to `Σ weight·y ≤ capacity` over binary `y`,
/// with some items forced out or in. Returns the optimum and the chosen items
/// (sorted, fixed ones included). Bellman recursion over the spare capacity.
pub fn knapsack_max(
    profits: &[i64],
    weights: &[u64],
    capacity: u64,
    fixed_zero: &[usize],
    fixed_one: &[usize],
) -> Result<(i64, Vec<usize>), KnapsackError> {
    assert_eq!(profits.len(), weights.len());
    if let Some(&k) = fixed_one.iter().find(|k| fixed_zero.contains(k)) {
        return Err(KnapsackError::ContradictoryFixing(k));
    }
    let used: u64 = fixed_one.iter().map(|&k| weights[k]).sum();
    let spare = capacity.checked_sub(used).ok_or(KnapsackError::InfeasibleFixing)? as usize;
    // Items with nonpositive profit never help.
    let free: Vec<usize> = (0..profits.len())
        .filter(|k| !fixed_zero.contains(k) && !fixed_one.contains(k) && profits[*k] > 0)
        .collect();
    let mut best = vec![0i64; spare + 1];
    let mut took = vec![vec![false; spare + 1]; free.len()];
    for (r, &k) in free.iter().enumerate() {
        let w = weights[k] as usize;
        for c in (w..=spare).rev() {
            let with = best[c - w] + profits[k];
            if with > best[c] {
                best[c] = with;
                took[r][c] = true;
            }
        }
    }
    let mut chosen: Vec<usize> = fixed_one.to_vec();
    let mut c = spare;
    for (r, &k) in free.iter().enumerate().rev() {
        if took[r][c] {
            chosen.push(k);
            c -= weights[k] as usize;
        }
    }
    chosen.sort_unstable();
    let value = chosen.iter().map(|&k| profits[k]).sum();
    debug_assert_eq!(value, best[spare] + fixed_one.iter().map(|&k| profits[k]).sum::<i64>());
    Ok((value, chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_item_blocks_the_other() {
        assert_eq!(knapsack_max(&[1, 1], &[3, 3], 5, &[], &[0]), Ok((1, vec![0])));
    }

    #[test]
    fn zero_capacity() {
        assert_eq!(knapsack_max(&[1, 2], &[1, 1], 0, &[], &[]), Ok((0, vec![])));
    }

    #[test]
    fn small_case() {
        // Of the eight subsets, {0, 2} (weight 4, profit 6) is the best that fits.
        assert_eq!(knapsack_max(&[4, 3, 2], &[3, 2, 1], 4, &[], &[]), Ok((6, vec![0, 2])));
    }

    #[test]
    fn bad_fixings() {
        assert_eq!(knapsack_max(&[1], &[3], 2, &[], &[0]), Err(KnapsackError::InfeasibleFixing));
        assert_eq!(knapsack_max(&[1], &[1], 2, &[0], &[0]), Err(KnapsackError::ContradictoryFixing(0)));
    }

    proptest! {
        #[test]
        fn matches_subset_enumeration(
            items in prop::collection::vec((0i64..20, 1u64..12), 0..10),
            capacity in 0u64..40,
            fix in prop::collection::vec(0u8..3, 10),
        ) {
            let profits: Vec<i64> = items.iter().map(|i| i.0).collect();
            let weights: Vec<u64> = items.iter().map(|i| i.1).collect();
            let n = items.len();
            let zero: Vec<usize> = (0..n).filter(|&k| fix[k] == 1).collect();
            let one: Vec<usize> = (0..n).filter(|&k| fix[k] == 2).collect();
            let mut expected: Option<i64> = None;
            for mask in 0u32..1 << n {
                let has = |k: usize| mask >> k & 1 == 1;
                if zero.iter().any(|&k| has(k)) || one.iter().any(|&k| !has(k)) {
                    continue;
                }
                let w: u64 = (0..n).filter(|&k| has(k)).map(|k| weights[k]).sum();
                if w <= capacity {
                    let p: i64 = (0..n).filter(|&k| has(k)).map(|k| profits[k]).sum();
                    expected = Some(expected.map_or(p, |e| e.max(p)));
                }
            }
            match knapsack_max(&profits, &weights, capacity, &zero, &one) {
                Ok((value, chosen)) => {
                    prop_assert_eq!(Some(value), expected);
                    prop_assert!(chosen.iter().map(|&k| weights[k]).sum::<u64>() <= capacity);
                    prop_assert!(one.iter().all(|k| chosen.contains(k)));
                    prop_assert!(zero.iter().all(|k| !chosen.contains(k)));
                }
                Err(_) => prop_assert_eq!(expected, None),
            }
        }
    }
}
