//! Exhaustive (r, s)-robustness check for small digraphs.
//!
//! For a node set `S`, a node of `S` is *r-reachable* when it has at least
//! `r` in-neighbors outside `S`. The graph is (r, s)-robust when, for every
//! pair of nonempty disjoint sets `S1`, `S2`, at least one holds:
//!
//! * every node of `S1` is r-reachable,
//! * every node of `S2` is r-reachable,
//! * the r-reachable nodes of `S1` and `S2` number at least `s` in total.
//!
//! Every subset pair is enumerated, roughly `3^n` work, so the check refuses
//! graphs above a node limit.

use alloc::vec;

use super::{Digraph, GraphError};

/// Default node limit for [`check_rs_robustness`].
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 16;

// u32 masks plus a 2^n table.
const HARD_LIMIT: usize = 24;

pub fn check_rs_robustness(g: &Digraph, r: usize, s: usize) -> Result<bool, GraphError> {
    check_rs_robustness_with_limit(g, r, s, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn check_rs_robustness_with_limit(
    g: &Digraph,
    r: usize,
    s: usize,
    limit: usize,
) -> Result<bool, GraphError> {
    if r == 0 || s == 0 {
        return Err(GraphError::InvalidRobustnessParams { r, s });
    }
    let n = g.node_count();
    let limit = limit.min(HARD_LIMIT);
    if n > limit {
        return Err(GraphError::ExhaustiveCheckInfeasible { n, limit });
    }
    if n < 2 {
        // no pair of nonempty disjoint subsets exists
        return Ok(true);
    }

    let in_masks: alloc::vec::Vec<u32> = (0..n)
        .map(|i| g.in_neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();

    let all: u32 = (1u32 << n) - 1;
    let subsets = 1usize << n;

    // reachable[S] = number of r-reachable nodes of S; full[S] = all of S is.
    let mut reachable = vec![0u8; subsets];
    let mut full = vec![false; subsets];
    for set in 1..subsets {
        let set_mask = set as u32;
        let outside = !set_mask & all;
        let mut count = 0u8;
        let mut rest = set_mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (in_masks[i] & outside).count_ones() as usize >= r {
                count += 1;
            }
        }
        reachable[set] = count;
        full[set] = count as u32 == set_mask.count_ones();
    }

    for s1 in 1..subsets {
        if full[s1] {
            continue;
        }
        let complement = !(s1 as u32) & all;
        // walk the nonempty submasks of the complement
        let mut s2 = complement;
        while s2 != 0 {
            let idx = s2 as usize;
            if !full[idx] && (reachable[s1] as usize + reachable[idx] as usize) < s {
                return Ok(false);
            }
            s2 = (s2 - 1) & complement;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    /// Direct transcription of the definition over explicit node lists.
    fn naive(g: &Digraph, r: usize, s: usize) -> bool {
        let n = g.node_count();
        let reach = |set: &[bool], i: usize| {
            g.in_neighbors(i).iter().filter(|&&j| !set[j]).count() >= r
        };
        // assign each node to S1 (1), S2 (2) or neither (0)
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut in1 = vec![false; n];
            let mut in2 = vec![false; n];
            for i in 0..n {
                match c % 3 {
                    1 => in1[i] = true,
                    2 => in2[i] = true,
                    _ => {}
                }
                c /= 3;
            }
            let s1: Vec<usize> = (0..n).filter(|&i| in1[i]).collect();
            let s2: Vec<usize> = (0..n).filter(|&i| in2[i]).collect();
            if s1.is_empty() || s2.is_empty() {
                continue;
            }
            let x1 = s1.iter().filter(|&&i| reach(&in1, i)).count();
            let x2 = s2.iter().filter(|&&i| reach(&in2, i)).count();
            if !(x1 == s1.len() || x2 == s2.len() || x1 + x2 >= s) {
                return false;
            }
        }
        true
    }

    #[test]
    fn edgeless_pair_is_not_robust() {
        assert_eq!(check_rs_robustness(&Digraph::empty(2), 1, 1), Ok(false));
    }

    #[test]
    fn complete_four_is_2_1_robust() {
        let k4 = Digraph::complete(4);
        assert!(naive(&k4, 2, 1));
        assert_eq!(check_rs_robustness(&k4, 2, 1), Ok(true));
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            for k in 1..n {
                let g = super::super::generate_random_digraph(n, k, &mut rng).unwrap();
                for r in 1..=3 {
                    for s in 1..=3 {
                        assert_eq!(
                            check_rs_robustness(&g, r, s).unwrap(),
                            naive(&g, r, s),
                            "n={n} k={k} r={r} s={s}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn refuses_large_graphs() {
        let g = Digraph::empty(17);
        assert_eq!(
            check_rs_robustness(&g, 1, 1),
            Err(GraphError::ExhaustiveCheckInfeasible { n: 17, limit: 16 })
        );
    }

    #[test]
    fn rejects_zero_parameters() {
        let g = Digraph::complete(3);
        assert!(matches!(
            check_rs_robustness(&g, 0, 1),
            Err(GraphError::InvalidRobustnessParams { .. })
        ));
    }
}
