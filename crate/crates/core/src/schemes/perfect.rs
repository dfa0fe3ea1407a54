//! Counterfactual bookkeeping for the conceptual perfect technique: whenever
//! an unfinished receiver's channel is on, it decodes exactly one additional
//! wanted packet. No packets are actually coded; the resulting delays are the
//! floor that every real scheme is measured against.

use rand::RngCore;

use crate::error::Error;
use crate::model::{BlockMetrics, ChannelModel, Sfm, SlotRecord, TransmissionLog};
use crate::schemes::{Feedback, Scheme};

pub struct PerfectOracle;

impl Scheme for PerfectOracle {
    fn name(&self) -> &'static str {
        "perfect"
    }

    fn feedback(&self) -> Feedback {
        Feedback::None
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
        let wants: Vec<Vec<usize>> = (0..receivers).map(|n| sfm.wants_of(n)).collect();
        let mut granted = vec![0usize; receivers];
        let mut table: Vec<Vec<(usize, u32)>> = vec![Vec::new(); receivers];
        let mut slot: u32 = 0;
        while (0..receivers).any(|n| granted[n] < wants[n].len()) {
            slot += 1;
            let erased = channel.draw_erasures(&mut *channel_rng);
            let mut newly_decoded = vec![Vec::new(); receivers];
            for n in 0..receivers {
                if granted[n] < wants[n].len() && !erased[n] {
                    let p = wants[n][granted[n]];
                    granted[n] += 1;
                    table[n].push((p, slot));
                    newly_decoded[n].push(p);
                }
            }
            if let Some(log) = log.as_deref_mut() {
                log.push(SlotRecord {
                    slot,
                    coding_set: Vec::new(),
                    erased,
                    newly_decoded,
                });
            }
        }
        Ok(BlockMetrics::from_decode_table(&table, slot, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use num_rational::Ratio;

    #[test]
    fn erasure_free_receiver_decodes_one_per_slot() {
        let sfm = Sfm::from_wants_lists(3, &[vec![0, 1, 2]]);
        let channel = ChannelModel::uniform(0.0, 1, 0).unwrap();
        let mut ch = rng::channel_stream(0, 1, 0);
        let mut co = rng::coef_stream(0, "perfect", 1, 0);
        let m = PerfectOracle
            .run_block(&sfm, &channel, &mut ch, &mut co, None)
            .unwrap();
        assert_eq!(m.apdd().unwrap(), Ratio::new(2, 1));
        assert_eq!(m.bct(), 3);
    }

    #[test]
    fn mean_apdd_matches_renewal_argument() {
        // w = 3, pe = 0.2: mean APDD over many blocks approaches 2.5.
        let sfm = Sfm::from_wants_lists(3, &[vec![0, 1, 2]]);
        let channel = ChannelModel::uniform(0.2, 1, 0).unwrap();
        let blocks = 20_000u64;
        let mut sum = 0.0;
        for b in 0..blocks {
            let mut ch = rng::channel_stream(13, 1, b);
            let mut co = rng::coef_stream(13, "perfect", 1, b);
            let m = PerfectOracle
                .run_block(&sfm, &channel, &mut ch, &mut co, None)
                .unwrap();
            sum += m.apdd_f64().unwrap();
        }
        let mean = sum / blocks as f64;
        assert!((mean - 2.5).abs() / 2.5 < 0.02, "mean = {mean}");
    }
}
