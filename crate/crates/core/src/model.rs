//! The broadcast instance model: state feedback matrix, erasure channel,
//! receiver decoding state, and the per-block delay/throughput metrics.

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gf::{CodingVector, KnowledgeMatrix};

/// State feedback matrix: `wants[n][k]` is true iff receiver n missed packet k
/// in the uncoded round and still wants it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sfm {
    wants: Vec<Vec<bool>>,
    k: usize,
}

impl Sfm {
    pub fn new(wants: Vec<Vec<bool>>) -> Self {
        let k = wants.first().map_or(0, |row| row.len());
        assert!(wants.iter().all(|row| row.len() == k), "ragged SFM rows");
        Sfm { wants, k }
    }

    /// Builds an SFM from per-receiver lists of wanted packet indices.
    pub fn from_wants_lists(k: usize, lists: &[Vec<usize>]) -> Self {
        let wants = lists
            .iter()
            .map(|list| {
                let mut row = vec![false; k];
                for &p in list {
                    row[p] = true;
                }
                row
            })
            .collect();
        Sfm::new(wants)
    }

    pub fn packets(&self) -> usize {
        self.k
    }

    pub fn receivers(&self) -> usize {
        self.wants.len()
    }

    pub fn wants(&self, n: usize, k: usize) -> bool {
        self.wants[n][k]
    }

    pub fn wants_of(&self, n: usize) -> Vec<usize> {
        (0..self.k).filter(|&k| self.wants[n][k]).collect()
    }

    /// w_n: number of packets receiver n wants.
    pub fn w(&self, n: usize) -> usize {
        self.wants[n].iter().filter(|&&b| b).count()
    }

    /// sum(A): total number of wanted (receiver, packet) pairs.
    pub fn total_wants(&self) -> usize {
        (0..self.receivers()).map(|n| self.w(n)).sum()
    }

    /// Packets wanted by at least one receiver.
    pub fn wanted_by_anyone(&self) -> Vec<usize> {
        (0..self.k)
            .filter(|&k| (0..self.receivers()).any(|n| self.wants[n][k]))
            .collect()
    }
}

/// Independent Bernoulli erasures, one probability per receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    erasure_probs: Vec<f64>,
    pub rng_seed: u64,
}

impl ChannelModel {
    pub fn new(erasure_probs: Vec<f64>, rng_seed: u64) -> Result<Self, Error> {
        for &p in &erasure_probs {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidErasureProb(p));
            }
        }
        Ok(ChannelModel {
            erasure_probs,
            rng_seed,
        })
    }

    pub fn uniform(pe: f64, receivers: usize, rng_seed: u64) -> Result<Self, Error> {
        Self::new(vec![pe; receivers], rng_seed)
    }

    pub fn receivers(&self) -> usize {
        self.erasure_probs.len()
    }

    pub fn erasure_prob(&self, n: usize) -> f64 {
        self.erasure_probs[n]
    }

    pub fn erasure_probs(&self) -> &[f64] {
        &self.erasure_probs
    }

    /// Draws one slot's erasure flags, one per receiver in order.
    pub fn draw_erasures<R: Rng>(&self, rng: &mut R) -> Vec<bool> {
        self.erasure_probs
            .iter()
            .map(|&p| rng.gen::<f64>() < p)
            .collect()
    }
}

/// One uncoded round: receiver n misses packet k with probability P_{e,n}.
pub fn generate_sfm<R: Rng>(k: usize, channel: &ChannelModel, rng: &mut R) -> Sfm {
    let wants = (0..channel.receivers())
        .map(|n| {
            let p = channel.erasure_prob(n);
            (0..k).map(|_| rng.gen::<f64>() < p).collect()
        })
        .collect();
    Sfm::new(wants)
}

/// A receiver's decoding state: knowledge matrix seeded with the packets it
/// already has, plus the slot at which each wanted packet decoded.
#[derive(Debug, Clone)]
pub struct ReceiverDecoder {
    k: usize,
    initial_wants: Vec<usize>,
    km: KnowledgeMatrix,
    decoded: Vec<bool>,
    /// decode_slot[k] = slot u_{n,k}, Some only for initially-wanted packets.
    decode_slot: Vec<Option<u32>>,
    undecoded_wants: usize,
    last_slot: u32,
}

impl ReceiverDecoder {
    pub fn from_sfm(sfm: &Sfm, n: usize) -> Self {
        let k = sfm.packets();
        let mut km = KnowledgeMatrix::new(k);
        let mut decoded = vec![false; k];
        for idx in 0..k {
            if !sfm.wants(n, idx) {
                km.eliminate(&CodingVector::unit(k, idx)).unwrap();
                decoded[idx] = true;
            }
        }
        let initial_wants = sfm.wants_of(n);
        let undecoded_wants = initial_wants.len();
        ReceiverDecoder {
            k,
            initial_wants,
            km,
            decoded,
            decode_slot: vec![None; k],
            undecoded_wants,
            last_slot: 0,
        }
    }

    pub fn packets(&self) -> usize {
        self.k
    }

    pub fn knowledge(&self) -> &KnowledgeMatrix {
        &self.km
    }

    pub fn initial_wants(&self) -> &[usize] {
        &self.initial_wants
    }

    /// Generalized Wants set: every packet not yet decoded, including packets
    /// received inside still-undecodable combinations.
    pub fn wants_now(&self) -> Vec<usize> {
        (0..self.k).filter(|&k| !self.decoded[k]).collect()
    }

    pub fn is_decoded(&self, k: usize) -> bool {
        self.decoded[k]
    }

    pub fn finished(&self) -> bool {
        self.undecoded_wants == 0
    }

    pub fn decode_slot(&self, k: usize) -> Option<u32> {
        self.decode_slot[k]
    }

    /// Delivers one coded transmission. Erased slots change nothing but still
    /// consume the slot index. Returns the newly decoded packet indices.
    pub fn deliver(
        &mut self,
        v: &CodingVector,
        slot: u32,
        erased: bool,
    ) -> Result<Vec<usize>, Error> {
        if slot == 0 || slot <= self.last_slot {
            return Err(Error::SlotRegression {
                last: self.last_slot,
                got: slot,
            });
        }
        self.last_slot = slot;
        if erased {
            return Ok(Vec::new());
        }
        self.absorb(v, slot)
    }

    /// Applies a vector without slot bookkeeping checks; used for sender-side
    /// speculative state where slot numbers are not authoritative.
    pub fn absorb(&mut self, v: &CodingVector, slot: u32) -> Result<Vec<usize>, Error> {
        self.km.eliminate(v)?;
        let mut newly = Vec::new();
        for idx in self.km.decoded_indices() {
            if !self.decoded[idx] {
                self.decoded[idx] = true;
                newly.push(idx);
                if self.initial_wants.contains(&idx) {
                    self.decode_slot[idx] = Some(slot);
                    self.undecoded_wants -= 1;
                }
            }
        }
        Ok(newly)
    }

    /// True iff receiving v would decode at least one new packet; does not
    /// change the state.
    pub fn would_decode(&self, v: &CodingVector) -> bool {
        let mut probe = self.km.clone();
        if !probe.eliminate(v).unwrap_or(false) {
            return false;
        }
        probe
            .decoded_indices()
            .iter()
            .any(|&idx| !self.decoded[idx])
    }
}

/// One slot of the transmission log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot: u32,
    pub coding_set: Vec<usize>,
    pub erased: Vec<bool>,
    pub newly_decoded: Vec<Vec<usize>>,
}

pub type TransmissionLog = Vec<SlotRecord>;

/// Per-block delay and throughput summary, evaluated exactly in rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMetrics {
    /// u_{n,k} for every initially wanted pair, as (receiver, packet, slot).
    pub decode_slots: Vec<(usize, usize, u32)>,
    /// D_n per receiver; None when w_n = 0 (Eq. for D_n is undefined there).
    pub per_receiver_apdd: Vec<Option<Ratio<u64>>>,
    /// Overall APDD D.
    pub apdd: Option<Ratio<u64>>,
    /// U_n per receiver; None when w_n = 0.
    pub per_receiver_completion: Vec<Option<u32>>,
    /// Block completion time U = max_n U_n.
    pub bct: u32,
    pub slots_used: u32,
    pub feedback_rounds: u32,
    /// Coded emissions that failed the innovativeness contract.
    pub innovation_violations: u32,
    /// Cover emissions that failed the instant-decodability contract.
    pub instant_decode_violations: u32,
}

impl BlockMetrics {
    /// Folds completed receiver states into the Eq.-(2)/(3) metrics.
    pub fn from_decoders(
        decoders: &[ReceiverDecoder],
        slots_used: u32,
        feedback_rounds: u32,
    ) -> Result<Self, Error> {
        let mut table: Vec<Vec<(usize, u32)>> = Vec::with_capacity(decoders.len());
        for (n, d) in decoders.iter().enumerate() {
            let mut entries = Vec::with_capacity(d.initial_wants().len());
            for &k in d.initial_wants() {
                let slot = d.decode_slot(k).ok_or(Error::IncompleteBlock {
                    receiver: n,
                    missing: d
                        .initial_wants()
                        .iter()
                        .filter(|&&p| d.decode_slot(p).is_none())
                        .count(),
                })?;
                entries.push((k, slot));
            }
            table.push(entries);
        }
        Ok(Self::from_decode_table(&table, slots_used, feedback_rounds))
    }

    /// Builds metrics from a complete decode table: per receiver, the (packet,
    /// slot) pair of every initially wanted packet.
    pub fn from_decode_table(
        table: &[Vec<(usize, u32)>],
        slots_used: u32,
        feedback_rounds: u32,
    ) -> Self {
        let mut decode_slots = Vec::new();
        let mut per_receiver_apdd = Vec::with_capacity(table.len());
        let mut per_receiver_completion = Vec::with_capacity(table.len());
        let mut total: u64 = 0;
        let mut total_wants: u64 = 0;
        let mut bct = 0u32;
        for (n, entries) in table.iter().enumerate() {
            if entries.is_empty() {
                per_receiver_apdd.push(None);
                per_receiver_completion.push(None);
                continue;
            }
            let mut sum: u64 = 0;
            let mut u_n = 0u32;
            for &(k, slot) in entries {
                decode_slots.push((n, k, slot));
                sum += slot as u64;
                u_n = u_n.max(slot);
            }
            per_receiver_apdd.push(Some(Ratio::new(sum, entries.len() as u64)));
            per_receiver_completion.push(Some(u_n));
            bct = bct.max(u_n);
            total += sum;
            total_wants += entries.len() as u64;
        }
        let apdd = if total_wants > 0 {
            Some(Ratio::new(total, total_wants))
        } else {
            None
        };
        BlockMetrics {
            decode_slots,
            per_receiver_apdd,
            apdd,
            per_receiver_completion,
            bct,
            slots_used,
            feedback_rounds,
            innovation_violations: 0,
            instant_decode_violations: 0,
        }
    }

    /// Overall APDD D per Eq. (3); errors when no packet was wanted.
    pub fn apdd(&self) -> Result<Ratio<u64>, Error> {
        self.apdd.ok_or(Error::NoWantedPackets)
    }

    pub fn apdd_f64(&self) -> Option<f64> {
        self.apdd
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    /// Block completion time U.
    pub fn bct(&self) -> u32 {
        self.bct
    }

    /// Independent re-fold of APDD and BCT from a transmission log; used to
    /// cross-check the incremental bookkeeping.
    pub fn recompute_from_log(
        log: &TransmissionLog,
        sfm: &Sfm,
    ) -> Result<(Ratio<u64>, u32), Error> {
        let mut total: u64 = 0;
        let mut count: u64 = 0;
        let mut bct = 0u32;
        for n in 0..sfm.receivers() {
            for record in log {
                for &k in &record.newly_decoded[n] {
                    if sfm.wants(n, k) {
                        total += record.slot as u64;
                        count += 1;
                        bct = bct.max(record.slot);
                    }
                }
            }
        }
        if count == 0 {
            return Err(Error::NoWantedPackets);
        }
        Ok((Ratio::new(total, count), bct))
    }
}
