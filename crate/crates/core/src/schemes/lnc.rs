//! The linear-coding schemes that share one slot loop: RLNC and the
//! cover-packet scheme under its three feedback disciplines.
//!
//! Cover packets are coded over a minimal vertex cover of the wants
//! hypergraph, so each one is innovative to every unfinished receiver and
//! instantly decodable by at least one. RLNC packets are coded over the whole
//! initially-wanted support. Both kinds carry coefficients that are explicitly
//! verified innovative, which makes the throughput guarantee deterministic
//! rather than with-high-probability.

use rand::RngCore;

use crate::error::Error;
use crate::gf::KnowledgeMatrix;
use crate::hypergraph::{minimal_vertex_cover, Hypergraph};
use crate::model::{BlockMetrics, ChannelModel, ReceiverDecoder, Sfm, SlotRecord, TransmissionLog};
use crate::schemes::{verified_innovative_vector, Feedback, Scheme, SenderView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LncMode {
    Rlnc,
    HlncFull,
    HlncSemi,
    HlncOffline,
}

impl LncMode {
    fn name(self) -> &'static str {
        match self {
            LncMode::Rlnc => "rlnc",
            LncMode::HlncFull => "hlnc-full",
            LncMode::HlncSemi => "hlnc-semi",
            LncMode::HlncOffline => "hlnc-offline",
        }
    }

    fn feedback(self) -> Feedback {
        match self {
            LncMode::Rlnc => Feedback::None,
            LncMode::HlncFull => Feedback::FullyOnline,
            LncMode::HlncSemi => Feedback::SemiOnline,
            LncMode::HlncOffline => Feedback::Offline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EmissionKind {
    Cover,
    Dense,
}

pub struct LncScheme {
    mode: LncMode,
}

impl LncScheme {
    pub fn new(mode: LncMode) -> Self {
        LncScheme { mode }
    }
}

impl Scheme for LncScheme {
    fn name(&self) -> &'static str {
        self.mode.name()
    }

    fn feedback(&self) -> Feedback {
        self.mode.feedback()
    }

    fn run_block(
        &self,
        sfm: &Sfm,
        channel: &ChannelModel,
        channel_rng: &mut dyn RngCore,
        coef_rng: &mut dyn RngCore,
        mut log: Option<&mut TransmissionLog>,
    ) -> Result<BlockMetrics, Error> {
        let k = sfm.packets();
        let receivers = sfm.receivers();
        assert_eq!(channel.receivers(), receivers);
        let mut truth: Vec<ReceiverDecoder> = (0..receivers)
            .map(|n| ReceiverDecoder::from_sfm(sfm, n))
            .collect();
        if truth.iter().all(|d| d.finished()) {
            return BlockMetrics::from_decoders(&truth, 0, 0);
        }

        let initial_support = sfm.wanted_by_anyone();
        // RLNC keeps no sender view; its coding decision is fixed up front.
        let mut view = match self.mode {
            LncMode::Rlnc => None,
            _ => Some(SenderView::from_sfm(sfm)),
        };
        let mut dense_phase = matches!(self.mode, LncMode::Rlnc);
        let mut round_open = false;
        let mut slot: u32 = 0;
        let mut feedback_rounds: u32 = 0;
        let mut innovation_violations: u32 = 0;
        let mut instant_decode_violations: u32 = 0;

        loop {
            // Semi-online rounds: poll feedback when the previous round closed
            // (the poll before the very first transmission is waived).
            if matches!(self.mode, LncMode::HlncSemi) && !round_open {
                if slot > 0 {
                    view.as_mut().unwrap().sync_to(&truth);
                }
                feedback_rounds += 1;
                round_open = true;
            }

            let (coding_set, kind) = if dense_phase {
                (initial_support.clone(), EmissionKind::Dense)
            } else {
                let h = match self.mode {
                    LncMode::HlncFull => Hypergraph::from_states(&truth),
                    _ => view.as_ref().unwrap().hypergraph(),
                };
                let cover = minimal_vertex_cover(&h)?;
                (cover.vertices().to_vec(), EmissionKind::Cover)
            };

            // Cover packets are verified against the sender's own (possibly
            // speculative) state: speculative knowledge contains the true
            // knowledge, so innovativeness carries over. Dense packets are
            // sent without usable feedback, so their coefficients are checked
            // against the true state, standing in for a very large field.
            let shadow_targets: Vec<(usize, &KnowledgeMatrix)>;
            let truth_targets: Vec<(usize, &KnowledgeMatrix)>;
            let targets = match (kind, self.mode) {
                (EmissionKind::Dense, _) | (_, LncMode::HlncFull) => {
                    truth_targets = truth
                        .iter()
                        .enumerate()
                        .filter(|(_, d)| !d.finished())
                        .map(|(n, d)| (n, d.knowledge()))
                        .collect();
                    &truth_targets
                }
                _ => {
                    let shadows = view.as_ref().unwrap().shadows();
                    shadow_targets = shadows
                        .iter()
                        .enumerate()
                        .filter(|(_, d)| !d.finished())
                        .map(|(n, d)| (n, d.knowledge()))
                        .collect();
                    &shadow_targets
                }
            };
            let v = verified_innovative_vector(k, &coding_set, targets, coef_rng)?;

            slot += 1;

            // Scheme guarantees, checked against the true receiver state.
            for d in truth.iter().filter(|d| !d.finished()) {
                if !d.knowledge().is_innovative(&v) {
                    innovation_violations += 1;
                    break;
                }
            }
            if kind == EmissionKind::Cover
                && !truth
                    .iter()
                    .filter(|d| !d.finished())
                    .any(|d| d.would_decode(&v))
            {
                instant_decode_violations += 1;
            }
            #[cfg(debug_assertions)]
            if matches!(self.mode, LncMode::HlncSemi | LncMode::HlncOffline)
                && kind == EmissionKind::Cover
            {
                check_speculative_cover_property(
                    view.as_ref().unwrap(),
                    &truth,
                    &coding_set,
                );
            }

            let erased = channel.draw_erasures(&mut *channel_rng);
            let mut newly_decoded = vec![Vec::new(); receivers];
            for (n, d) in truth.iter_mut().enumerate() {
                if !d.finished() {
                    newly_decoded[n] = d.deliver(&v, slot, erased[n])?;
                }
            }
            if let Some(log) = log.as_deref_mut() {
                log.push(SlotRecord {
                    slot,
                    coding_set: v.support(),
                    erased,
                    newly_decoded,
                });
            }

            let done = truth.iter().all(|d| d.finished());

            match self.mode {
                LncMode::Rlnc => {}
                LncMode::HlncFull => {
                    feedback_rounds += 1;
                }
                LncMode::HlncSemi => {
                    if view.as_mut().unwrap().assume_received(&v, slot) {
                        round_open = false;
                    }
                }
                LncMode::HlncOffline => {
                    if !dense_phase && view.as_mut().unwrap().assume_received(&v, slot) {
                        dense_phase = true;
                    }
                }
            }

            if done {
                break;
            }
        }

        let mut metrics = BlockMetrics::from_decoders(&truth, slot, feedback_rounds)?;
        metrics.innovation_violations = innovation_violations;
        metrics.instant_decode_violations = instant_decode_violations;
        Ok(metrics)
    }
}

/// The speculative state the sender codes over between feedback polls must be
/// a subgraph of the true wants hypergraph with the same hyperedges present,
/// and the chosen cover must then be a minimal cover of the true hypergraph
/// as well.
#[cfg(debug_assertions)]
fn check_speculative_cover_property(
    view: &SenderView,
    truth: &[ReceiverDecoder],
    cover: &[usize],
) {
    for (n, (shadow, actual)) in view.shadows().iter().zip(truth).enumerate() {
        assert_eq!(
            shadow.finished(),
            actual.finished(),
            "receiver {n}: speculative and true completion must agree mid-round"
        );
        if shadow.finished() {
            continue;
        }
        let spec_wants = shadow.wants_now();
        let true_wants = actual.wants_now();
        assert!(
            spec_wants.iter().all(|p| true_wants.contains(p)),
            "receiver {n}: speculative wants must be a subset of true wants"
        );
        assert!(
            true_wants.iter().any(|p| cover.contains(p)),
            "receiver {n}: cover must still cover the true wants set"
        );
    }
    let single_incidence = truth.iter().filter(|d| !d.finished()).any(|d| {
        d.wants_now()
            .iter()
            .filter(|p| cover.contains(p))
            .count()
            == 1
    });
    assert!(
        single_incidence,
        "cover must meet some true wants set exactly once"
    );
}
