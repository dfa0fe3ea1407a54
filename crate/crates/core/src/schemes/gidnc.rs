//! Heuristic general instantly-decodable network coding. Packets are binary
//! XORs chosen by a greedy maximum-degree clique over the coding graph;
//! receivers are memoryless and discard anything that is not instantly
//! decodable.

use rand::RngCore;

use crate::error::Error;
use crate::gf::CodingVector;
use crate::model::{BlockMetrics, ChannelModel, Sfm, SlotRecord, TransmissionLog};
use crate::schemes::{Feedback, Scheme};

/// A memoryless receiver: it only remembers which packets it has decoded or
/// already had.
#[derive(Debug, Clone)]
pub struct IdncReceiver {
    has: Vec<bool>,
    wants: Vec<usize>,
    decode_slot: Vec<Option<u32>>,
    missing: usize,
    last_slot: u32,
}

impl IdncReceiver {
    pub fn from_sfm(sfm: &Sfm, n: usize) -> Self {
        let k = sfm.packets();
        let has: Vec<bool> = (0..k).map(|p| !sfm.wants(n, p)).collect();
        let wants = sfm.wants_of(n);
        let missing = wants.len();
        IdncReceiver {
            has,
            wants,
            decode_slot: vec![None; k],
            missing,
            last_slot: 0,
        }
    }

    pub fn finished(&self) -> bool {
        self.missing == 0
    }

    pub fn has(&self, p: usize) -> bool {
        self.has[p]
    }

    pub fn wants(&self) -> &[usize] {
        &self.wants
    }

    pub fn missing_packets(&self) -> Vec<usize> {
        self.wants
            .iter()
            .copied()
            .filter(|&p| !self.has[p])
            .collect()
    }

    pub fn decode_slot(&self, p: usize) -> Option<u32> {
        self.decode_slot[p]
    }

    /// Memoryless decoding: the XOR of `coding_set` decodes one packet iff
    /// exactly one packet of the set is still missing; otherwise the packet
    /// is discarded without storing anything.
    pub fn deliver(
        &mut self,
        coding_set: &[usize],
        slot: u32,
        erased: bool,
    ) -> Result<Option<usize>, Error> {
        if slot == 0 || slot <= self.last_slot {
            return Err(Error::SlotRegression {
                last: self.last_slot,
                got: slot,
            });
        }
        self.last_slot = slot;
        if erased {
            return Ok(None);
        }
        let mut outside = None;
        let mut outside_count = 0;
        for &p in coding_set {
            if !self.has[p] {
                outside = Some(p);
                outside_count += 1;
                if outside_count > 1 {
                    return Ok(None);
                }
            }
        }
        match (outside, outside_count) {
            (Some(p), 1) => {
                self.has[p] = true;
                self.decode_slot[p] = Some(slot);
                self.missing -= 1;
                Ok(Some(p))
            }
            _ => Ok(None),
        }
    }
}

/// Greedy clique selection on the coding graph: one vertex per (receiver,
/// missing packet) pair; two vertices are joined iff the packets coincide or
/// each receiver already has the other's packet. Grows the clique by maximum
/// degree within the remaining candidates, breaking ties by lowest receiver
/// index then lowest packet index. Returns the distinct packet indices of the
/// clique: the XOR coding set.
pub fn gidnc_coding_set(receivers: &[IdncReceiver]) -> Vec<usize> {
    let mut vertices: Vec<(usize, usize)> = Vec::new();
    for (n, r) in receivers.iter().enumerate() {
        if r.finished() {
            continue;
        }
        for p in r.missing_packets() {
            vertices.push((n, p));
        }
    }
    let v = vertices.len();
    if v == 0 {
        return Vec::new();
    }
    let words = v.div_ceil(64);
    let mut adj = vec![0u64; v * words];
    for i in 0..v {
        let (n1, p1) = vertices[i];
        for j in (i + 1)..v {
            let (n2, p2) = vertices[j];
            if n1 == n2 {
                continue;
            }
            let joined = p1 == p2 || (receivers[n1].has(p2) && receivers[n2].has(p1));
            if joined {
                adj[i * words + j / 64] |= 1 << (j % 64);
                adj[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut cand = vec![!0u64; words];
    if v % 64 != 0 {
        cand[words - 1] = (1u64 << (v % 64)) - 1;
    }
    let mut clique: Vec<(usize, usize)> = Vec::new();
    loop {
        // Highest degree within the remaining candidates; vertices are in
        // (receiver, packet) order, so strict improvement keeps the lowest.
        let mut best: Option<(usize, u32)> = None;
        for i in 0..v {
            if cand[i / 64] >> (i % 64) & 1 == 0 {
                continue;
            }
            let deg: u32 = (0..words)
                .map(|w| (adj[i * words + w] & cand[w]).count_ones())
                .sum();
            if best.map_or(true, |(_, d)| deg > d) {
                best = Some((i, deg));
            }
        }
        let (pick, _) = match best {
            None => break,
            Some(b) => b,
        };
        clique.push(vertices[pick]);
        for w in 0..words {
            cand[w] &= adj[pick * words + w];
        }
    }
    let mut set: Vec<usize> = clique.iter().map(|&(_, p)| p).collect();
    set.sort_unstable();
    set.dedup();
    set
}

pub struct GidncScheme;

impl Scheme for GidncScheme {
    fn name(&self) -> &'static str {
        "gidnc"
    }

    fn feedback(&self) -> Feedback {
        Feedback::FullyOnline
    }

    fn run_block(
        &self,
        sfm: &Sfm,
        channel: &ChannelModel,
        channel_rng: &mut dyn RngCore,
        _coef_rng: &mut dyn RngCore,
        mut log: Option<&mut TransmissionLog>,
    ) -> Result<BlockMetrics, Error> {
        let receivers = sfm.receivers();
        assert_eq!(channel.receivers(), receivers);
        let mut state: Vec<IdncReceiver> = (0..receivers)
            .map(|n| IdncReceiver::from_sfm(sfm, n))
            .collect();
        let mut slot: u32 = 0;
        let mut feedback_rounds: u32 = 0;
        while state.iter().any(|r| !r.finished()) {
            let coding_set = gidnc_coding_set(&state);
            debug_assert!(!coding_set.is_empty());
            slot += 1;
            let erased = channel.draw_erasures(&mut *channel_rng);
            let mut newly_decoded = vec![Vec::new(); receivers];
            for (n, r) in state.iter_mut().enumerate() {
                if !r.finished() {
                    if let Some(p) = r.deliver(&coding_set, slot, erased[n])? {
                        newly_decoded[n].push(p);
                    }
                }
            }
            if let Some(log) = log.as_deref_mut() {
                log.push(SlotRecord {
                    slot,
                    coding_set: coding_set.clone(),
                    erased,
                    newly_decoded,
                });
            }
            feedback_rounds += 1;
        }
        let table: Vec<Vec<(usize, u32)>> = state
            .iter()
            .map(|r| {
                r.wants()
                    .iter()
                    .map(|&p| (p, r.decode_slot(p).expect("finished receiver")))
                    .collect()
            })
            .collect();
        Ok(BlockMetrics::from_decode_table(
            &table,
            slot,
            feedback_rounds,
        ))
    }
}

/// The XOR coding vector corresponding to an IDNC coding set, for logs and
/// replays that want the unified packet representation.
pub fn xor_packet(k: usize, coding_set: &[usize]) -> CodingVector {
    CodingVector::xor_of(k, coding_set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use num_rational::Ratio;

    fn run_gidnc(sfm: &Sfm, pe: f64, seed: u64) -> (BlockMetrics, TransmissionLog) {
        let scheme = GidncScheme;
        let channel = ChannelModel::uniform(pe, sfm.receivers(), seed).unwrap();
        let mut ch = rng::channel_stream(seed, sfm.receivers(), 0);
        let mut co = rng::coef_stream(seed, "gidnc", sfm.receivers(), 0);
        let mut log = TransmissionLog::new();
        let m = scheme
            .run_block(sfm, &channel, &mut ch, &mut co, Some(&mut log))
            .unwrap();
        (m, log)
    }

    #[test]
    fn shared_single_packet_is_sent_alone() {
        let sfm = Sfm::from_wants_lists(2, &[vec![0], vec![0]]);
        let state: Vec<IdncReceiver> = (0..2).map(|n| IdncReceiver::from_sfm(&sfm, n)).collect();
        assert_eq!(gidnc_coding_set(&state), vec![0]);
    }

    #[test]
    fn example1_trace_matches_scheme1() {
        let sfm = Sfm::from_wants_lists(3, &[vec![1, 2], vec![0, 2]]);
        let (m, log) = run_gidnc(&sfm, 0.0, 1);
        assert_eq!(log[0].coding_set, vec![0, 1]);
        assert_eq!(log[1].coding_set, vec![2]);
        assert_eq!(m.apdd().unwrap(), Ratio::new(3, 2));
        assert_eq!(m.bct(), 2);
    }

    #[test]
    fn memoryless_receiver_discards_undecodable_xor() {
        let sfm = Sfm::from_wants_lists(3, &[vec![1, 2]]);
        let mut r = IdncReceiver::from_sfm(&sfm, 0);
        assert_eq!(r.deliver(&[1, 2], 1, false).unwrap(), None);
        // Nothing was stored: the same packet later is still undecodable.
        assert_eq!(r.deliver(&[1, 2], 2, false).unwrap(), None);
        assert_eq!(r.deliver(&[1], 3, false).unwrap(), Some(1));
        assert_eq!(r.deliver(&[1, 2], 4, false).unwrap(), Some(2));
    }

    #[test]
    fn receiver_missing_one_of_the_set_decodes_it() {
        let sfm = Sfm::from_wants_lists(3, &[vec![1]]);
        let mut r = IdncReceiver::from_sfm(&sfm, 0);
        assert_eq!(r.deliver(&[1, 2], 1, false).unwrap(), Some(1));
        assert!(r.finished());
    }

    #[test]
    fn walkthrough_r4_discards_triple_xor() {
        let sfm = Sfm::from_wants_lists(6, &[vec![0, 1, 2]]);
        let mut r = IdncReceiver::from_sfm(&sfm, 0);
        assert_eq!(r.deliver(&[0, 1, 2], 1, false).unwrap(), None);
        assert!(!r.finished());
    }

    #[test]
    fn pairs_instance_completes_with_bct_at_least_three() {
        let sfm = crate::schemes::build_a1(4);
        let (m, _) = run_gidnc(&sfm, 0.0, 2);
        assert!(m.bct() >= 3, "bct = {}", m.bct());
    }
}
