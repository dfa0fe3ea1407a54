//! Adversarial instance families for the memoryless-decoding throughput gap,
//! and the exhaustive minimum-completion-time oracle that certifies it at
//! small scale.

use crate::error::Error;
use crate::model::Sfm;

/// Every pair of data packets is wanted by a distinct receiver:
/// N = K(K-1)/2 receivers, each wanting two packets.
pub fn build_a1(k: usize) -> Sfm {
    assert!(k >= 2);
    let mut lists = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            lists.push(vec![i, j]);
        }
    }
    Sfm::from_wants_lists(k, &lists)
}

/// Like [`build_a1`], plus m receivers wanting each single packet:
/// N = mK + K(K-1)/2 receivers.
pub fn build_a2(k: usize, m: usize) -> Sfm {
    assert!(k >= 2);
    let mut lists = Vec::with_capacity(m * k + k * (k - 1) / 2);
    for p in 0..k {
        for _ in 0..m {
            lists.push(vec![p]);
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            lists.push(vec![i, j]);
        }
    }
    Sfm::from_wants_lists(k, &lists)
}

const BRUTE_FORCE_MAX_PACKETS: usize = 5;
const BRUTE_FORCE_MAX_RECEIVERS: usize = 12;

/// Minimum number of erasure-free XOR transmissions that complete every
/// receiver under memoryless decoding, by iterative-deepening search over
/// coding-set sequences.
pub fn bruteforce_idnc_min_bct(sfm: &Sfm) -> Result<u32, Error> {
    bruteforce_idnc_min_bct_with_limits(
        sfm,
        BRUTE_FORCE_MAX_PACKETS,
        BRUTE_FORCE_MAX_RECEIVERS,
    )
}

pub fn bruteforce_idnc_min_bct_with_limits(
    sfm: &Sfm,
    max_packets: usize,
    max_receivers: usize,
) -> Result<u32, Error> {
    let k = sfm.packets();
    let n = sfm.receivers();
    if k > max_packets {
        return Err(Error::TooLarge {
            what: "packets",
            got: k,
            limit: max_packets,
        });
    }
    if n > max_receivers {
        return Err(Error::TooLarge {
            what: "receivers",
            got: n,
            limit: max_receivers,
        });
    }
    // State: per receiver, bitmask of packets decoded-or-had.
    let full: u32 = (1u32 << k) - 1;
    let initial: Vec<u32> = (0..n)
        .map(|r| {
            let mut has = 0u32;
            for p in 0..k {
                if !sfm.wants(r, p) {
                    has |= 1 << p;
                }
            }
            has
        })
        .collect();
    if initial.iter().all(|&h| h == full) {
        return Ok(0);
    }

    fn apply(state: &[u32], coding_set: u32) -> (Vec<u32>, bool) {
        let mut next = state.to_vec();
        let mut progressed = false;
        for h in next.iter_mut() {
            let outside = coding_set & !*h;
            if outside.count_ones() == 1 {
                *h |= outside;
                progressed = true;
            }
        }
        (next, progressed)
    }

    fn dfs(state: &[u32], depth_left: u32, full: u32) -> bool {
        if state.iter().all(|&h| h == full) {
            return true;
        }
        if depth_left == 0 {
            return false;
        }
        for coding_set in 1..=full {
            let (next, progressed) = apply(state, coding_set);
            // A transmission that decodes nothing can be dropped from any
            // completing sequence, so skip it.
            if !progressed {
                continue;
            }
            if dfs(&next, depth_left - 1, full) {
                return true;
            }
        }
        false
    }

    // Sending every packet uncoded always completes, so K is an upper bound.
    for depth in 1..=(k as u32) {
        if dfs(&initial, depth, full) {
            return Ok(depth);
        }
    }
    unreachable!("uncoded schedule of length K always completes");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_enumerates_all_pairs() {
        let sfm = build_a1(3);
        assert_eq!(sfm.receivers(), 3);
        let lists: Vec<Vec<usize>> = (0..3).map(|n| sfm.wants_of(n)).collect();
        assert_eq!(lists, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(build_a1(4).receivers(), 6);
    }

    #[test]
    fn a2_adds_single_packet_receivers() {
        let sfm = build_a2(2, 1);
        assert_eq!(sfm.receivers(), 3);
        assert_eq!(sfm.wants_of(0), vec![0]);
        assert_eq!(sfm.wants_of(1), vec![1]);
        assert_eq!(sfm.wants_of(2), vec![0, 1]);
    }

    #[test]
    fn single_pair_receiver_needs_two_slots() {
        // Any XOR of both packets is discarded, so the two packets must be
        // sent separately.
        assert_eq!(bruteforce_idnc_min_bct(&build_a1(2)).unwrap(), 2);
    }

    #[test]
    fn single_receiver_single_packet_needs_one_slot() {
        let sfm = Sfm::from_wants_lists(1, &[vec![0]]);
        assert_eq!(bruteforce_idnc_min_bct(&sfm).unwrap(), 1);
    }

    #[test]
    fn oversized_instances_are_refused() {
        assert!(matches!(
            bruteforce_idnc_min_bct(&build_a1(6)),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            bruteforce_idnc_min_bct_with_limits(&build_a1(4), 5, 5),
            Err(Error::TooLarge { .. })
        ));
        assert_eq!(
            bruteforce_idnc_min_bct_with_limits(&build_a1(4), 5, 6).unwrap(),
            3
        );
    }
}
