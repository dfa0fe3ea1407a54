//! The coding schemes. Each variant implements the [`Scheme`] trait and is
//! registered under a name; the simulation harness and CLI select one at
//! runtime.

mod gidnc;
mod instances;
mod lnc;
mod perfect;

pub use gidnc::{gidnc_coding_set, GidncScheme, IdncReceiver};
pub use instances::{build_a1, build_a2, bruteforce_idnc_min_bct, bruteforce_idnc_min_bct_with_limits};
pub use lnc::{LncMode, LncScheme};
pub use perfect::PerfectOracle;

use rand::{Rng, RngCore};

use crate::error::Error;
use crate::gf::{CodingVector, Gf256, KnowledgeMatrix};
use crate::hypergraph::Hypergraph;
use crate::model::{BlockMetrics, ChannelModel, ReceiverDecoder, Sfm, TransmissionLog};

/// How a scheme learns the receivers' state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feedback {
    /// Poll all receivers after every transmission.
    FullyOnline,
    /// Poll only when the sender's speculative state predicts that some
    /// receiver would finish.
    SemiOnline,
    /// One speculative round, then never poll again.
    Offline,
    /// No feedback at all.
    None,
}

/// A broadcast coding scheme, selected by name at runtime.
pub trait Scheme: Send + Sync {
    fn name(&self) -> &'static str;

    fn feedback(&self) -> Feedback;

    /// Simulates one block until every receiver has decoded its wants set.
    /// Termination is decided by the omniscient harness, independent of the
    /// scheme's feedback discipline.
    fn run_block(
        &self,
        sfm: &Sfm,
        channel: &ChannelModel,
        channel_rng: &mut dyn RngCore,
        coef_rng: &mut dyn RngCore,
        log: Option<&mut TransmissionLog>,
    ) -> Result<BlockMetrics, Error>;
}

pub const SCHEME_NAMES: [&str; 6] = [
    "rlnc",
    "hlnc-full",
    "hlnc-semi",
    "hlnc-offline",
    "gidnc",
    "perfect",
];

/// Looks a scheme up by its registered name.
pub fn make_scheme(name: &str) -> Result<Box<dyn Scheme>, Error> {
    match name {
        "rlnc" => Ok(Box::new(LncScheme::new(LncMode::Rlnc))),
        "hlnc-full" => Ok(Box::new(LncScheme::new(LncMode::HlncFull))),
        "hlnc-semi" => Ok(Box::new(LncScheme::new(LncMode::HlncSemi))),
        "hlnc-offline" => Ok(Box::new(LncScheme::new(LncMode::HlncOffline))),
        "gidnc" => Ok(Box::new(GidncScheme)),
        "perfect" => Ok(Box::new(PerfectOracle)),
        other => Err(Error::UnknownScheme(other.to_string())),
    }
}

/// The sender's per-receiver shadow of the decoding state: authoritative right
/// after a feedback round, speculative between rounds.
#[derive(Debug, Clone)]
pub struct SenderView {
    shadows: Vec<ReceiverDecoder>,
}

impl SenderView {
    pub fn from_sfm(sfm: &Sfm) -> Self {
        SenderView {
            shadows: (0..sfm.receivers())
                .map(|n| ReceiverDecoder::from_sfm(sfm, n))
                .collect(),
        }
    }

    pub fn shadows(&self) -> &[ReceiverDecoder] {
        &self.shadows
    }

    pub fn all_finished(&self) -> bool {
        self.shadows.iter().all(|d| d.finished())
    }

    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph::from_states(&self.shadows)
    }

    /// Feedback round: replace the shadow state with the true receiver state.
    pub fn sync_to(&mut self, truth: &[ReceiverDecoder]) {
        self.shadows = truth.to_vec();
    }

    /// Locally updates the shadow state assuming every receiver received v.
    /// Returns true iff some receiver is newly predicted to have finished.
    pub fn assume_received(&mut self, v: &CodingVector, slot: u32) -> bool {
        let mut predicted_finisher = false;
        for d in self.shadows.iter_mut() {
            if d.finished() {
                continue;
            }
            d.absorb(v, slot).expect("shadow absorb");
            if d.finished() {
                predicted_finisher = true;
            }
        }
        predicted_finisher
    }
}

/// Draws a coded packet supported exactly on `coding_set` with nonzero random
/// coefficients, resampling until it is innovative to every target knowledge
/// space. The targets with all set packets already decoded can never gain
/// anything, which is a caller contract violation.
pub fn verified_innovative_vector(
    k: usize,
    coding_set: &[usize],
    targets: &[(usize, &KnowledgeMatrix)],
    rng: &mut dyn RngCore,
) -> Result<CodingVector, Error> {
    const MAX_ATTEMPTS: u32 = 64;
    for &(receiver, km) in targets {
        let decoded = km.decoded_indices();
        if coding_set.iter().all(|p| decoded.contains(p)) {
            return Err(Error::UselessCodingSet { receiver });
        }
    }
    for _ in 0..MAX_ATTEMPTS {
        let mut v = CodingVector::zero(k);
        for &p in coding_set {
            v.set(p, Gf256(rng.gen_range(1..=255)));
        }
        if targets.iter().all(|(_, km)| km.is_innovative(&v)) {
            return Ok(v);
        }
    }
    Err(Error::CoefficientSearchExhausted {
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_knows_all_names_and_rejects_unknown() {
        for name in SCHEME_NAMES {
            let s = make_scheme(name).unwrap();
            assert_eq!(s.name(), name);
        }
        assert!(matches!(
            make_scheme("hlnc"),
            Err(Error::UnknownScheme(_))
        ));
    }

    #[test]
    fn verified_vector_on_singleton_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let km = KnowledgeMatrix::new(4);
        let v = verified_innovative_vector(4, &[2], &[(0, &km)], &mut rng).unwrap();
        assert_eq!(v.support(), vec![2]);
        assert!(!v.get(2).is_zero());
    }

    #[test]
    fn verified_vector_full_support_against_fresh_receivers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kms: Vec<KnowledgeMatrix> = (0..5).map(|_| KnowledgeMatrix::new(6)).collect();
        let targets: Vec<(usize, &KnowledgeMatrix)> =
            kms.iter().enumerate().map(|(n, km)| (n, km)).collect();
        let set: Vec<usize> = (0..6).collect();
        let v = verified_innovative_vector(6, &set, &targets, &mut rng).unwrap();
        assert_eq!(v.support().len(), 6);
        for (_, km) in &targets {
            assert!(km.is_innovative(&v));
        }
    }

    #[test]
    fn verified_vector_rejects_useless_coding_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut km = KnowledgeMatrix::new(3);
        km.eliminate(&CodingVector::unit(3, 0)).unwrap();
        km.eliminate(&CodingVector::unit(3, 1)).unwrap();
        let err = verified_innovative_vector(3, &[0, 1], &[(7, &km)], &mut rng);
        assert!(matches!(err, Err(Error::UselessCodingSet { receiver: 7 })));
    }

    #[test]
    fn walkthrough_slot1_cover_packet_is_innovative_to_all() {
        let sfm = Sfm::from_wants_lists(
            6,
            &[vec![0, 3], vec![1, 4], vec![2, 5], vec![0, 1, 2]],
        );
        let view = SenderView::from_sfm(&sfm);
        let targets: Vec<(usize, &KnowledgeMatrix)> = view
            .shadows()
            .iter()
            .enumerate()
            .map(|(n, d)| (n, d.knowledge()))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = verified_innovative_vector(6, &[0, 1, 2], &targets, &mut rng).unwrap();
        // Instantly decodable by the three receivers wanting exactly one of {p1,p2,p3}.
        for n in 0..3 {
            assert!(view.shadows()[n].would_decode(&v));
        }
        assert!(!view.shadows()[3].would_decode(&v));
        assert!(view.shadows()[3].knowledge().is_innovative(&v));
    }
}
