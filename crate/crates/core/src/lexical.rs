//! Lexical affinity: speaker-turn words cut the transcript into utterances,
//! utterances map to segment index spans, and the spans fill the block
//! matrix Q_c.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::AffinityMatrix;
use crate::num::Real;
use crate::timeline::{segments_in_utterance, Segment, TimeInterval};

/// A transcript word with its boundaries and the probability that a
/// speaker change happens at this word.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub text: String,
    pub interval: TimeInterval,
    pub turn_prob: f64,
}

/// Maximal run of words between turn-word cut points, possibly shortened
/// by over-segmentation. `word_span` is inclusive on both ends; the
/// interval is the hull of the member word intervals, inter-word silence
/// included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utterance {
    pub word_span: (usize, usize),
    pub interval: TimeInterval,
}

/// Checks the word-list invariants: probabilities in [0, 1], valid
/// intervals, sorted by start, non-overlapping.
pub fn validate_words(words: &[Word]) -> Result<()> {
    for (i, w) in words.iter().enumerate() {
        if !(0.0..=1.0).contains(&w.turn_prob) || !w.turn_prob.is_finite() {
            return Err(Error::InvalidInput(format!(
                "word {i} has turn probability {} outside [0, 1]",
                w.turn_prob
            )));
        }
        if w.interval.end <= w.interval.start {
            return Err(Error::InvalidInput(format!(
                "word {i} has an empty interval"
            )));
        }
        if i > 0 && w.interval.start < words[i - 1].interval.end {
            return Err(Error::InvalidInput(format!(
                "words {} and {i} overlap or are out of order",
                i - 1
            )));
        }
    }
    Ok(())
}

/// Indices of words whose turn probability strictly exceeds c, ascending.
pub fn pick_turn_words(words: &[Word], c: f64) -> Vec<usize> {
    words
        .iter()
        .enumerate()
        .filter(|(_, w)| w.turn_prob > c)
        .map(|(i, _)| i)
        .collect()
}

/// Cuts the word sequence immediately before every turn word.
///
/// Words ahead of the first turn word form the initial utterance; a turn
/// word at index 0 cuts vacuously. Concatenating the output spans
/// reproduces the full word sequence.
pub fn cut_into_utterances(words: &[Word], turn_indices: &[usize]) -> Vec<Utterance> {
    debug_assert!(turn_indices.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(turn_indices.iter().all(|&i| i < words.len()));
    if words.is_empty() {
        return Vec::new();
    }
    let mut cuts = Vec::with_capacity(turn_indices.len() + 2);
    cuts.push(0);
    cuts.extend(turn_indices.iter().copied().filter(|&i| i > 0));
    cuts.push(words.len());
    cuts.windows(2)
        .map(|w| make_utterance(words, w[0], w[1] - 1))
        .collect()
}

fn make_utterance(words: &[Word], first: usize, last: usize) -> Utterance {
    Utterance {
        word_span: (first, last),
        interval: TimeInterval {
            start: words[first].interval.start,
            end: words[last].interval.end,
        },
    }
}

/// Drops utterances spanning exactly one word; their duration is too short
/// to claim a segment reliably.
pub fn filter_single_word(utts: Vec<Utterance>) -> Vec<Utterance> {
    utts.into_iter()
        .filter(|u| u.word_span.1 > u.word_span.0)
        .collect()
}

/// Splits every utterance left to right into chunks of at most `nu` words.
///
/// All chunks have exactly `nu` words except a shorter final chunk; chunk
/// intervals are re-hulled from their member words. Over-segmentation may
/// produce single-word chunks; they are kept, since single-word filtering
/// happens before this step.
pub fn oversegment(words: &[Word], utts: &[Utterance], nu: usize) -> Result<Vec<Utterance>> {
    if nu < 2 {
        return Err(Error::InvalidParameter(format!(
            "max utterance length must be >= 2, got {nu}"
        )));
    }
    let mut out = Vec::new();
    for utt in utts {
        let (first, last) = utt.word_span;
        let mut lo = first;
        while lo <= last {
            let hi = (lo + nu - 1).min(last);
            out.push(make_utterance(words, lo, hi));
            lo = hi + 1;
        }
    }
    Ok(out)
}

/// Fills the lexical adjacency matrix Q_c over `segments.len()` segments.
///
/// Each utterance that claims a segment span (m, n) sets q_ij = 1 for all
/// m <= i, j <= n; overlapping spans accumulate as a union of rectangles,
/// not a transitive closure. Utterances claiming no segment contribute
/// nothing.
pub fn build_q<T: Real>(
    utts: &[Utterance],
    segments: &[Segment],
    min_overlap_fraction: f64,
) -> AffinityMatrix<T> {
    assert!(!segments.is_empty(), "segment list must be nonempty");
    let m = segments.len();
    let mut q = Array2::zeros((m, m));
    for utt in utts {
        if let Some((lo, hi)) = segments_in_utterance(segments, utt.interval, min_overlap_fraction)
        {
            for i in lo..=hi {
                for j in lo..=hi {
                    q[[i, j]] = T::one();
                }
            }
        }
    }
    AffinityMatrix::from_array_unchecked(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeline::uniform_segments;
    use proptest::prelude::*;

    /// Contiguous words, 0.4 s each, with the given turn probabilities.
    fn words_with_probs(probs: &[f64]) -> Vec<Word> {
        probs
            .iter()
            .enumerate()
            .map(|(i, &p)| Word {
                text: format!("w{i}"),
                interval: TimeInterval {
                    start: 0.4 * i as f64,
                    end: 0.4 * (i + 1) as f64,
                },
                turn_prob: p,
            })
            .collect()
    }

    fn spans(utts: &[Utterance]) -> Vec<(usize, usize)> {
        utts.iter().map(|u| u.word_span).collect()
    }

    #[test]
    fn strict_threshold_comparison() {
        let words = words_with_probs(&[0.1, 0.05, 0.6, 0.2]);
        assert_eq!(pick_turn_words(&words, 0.3), vec![2]);
        assert_eq!(pick_turn_words(&words, 1.0), Vec::<usize>::new());
        assert_eq!(pick_turn_words(&words, 0.0), vec![0, 1, 2, 3]);
        // 0.2 is not strictly greater than 0.2.
        assert_eq!(pick_turn_words(&words, 0.2), vec![2]);
    }

    #[test]
    fn cuts_before_every_turn_word() {
        let words = words_with_probs(&[0.0; 6]);
        assert_eq!(
            spans(&cut_into_utterances(&words, &[2, 4])),
            vec![(0, 1), (2, 3), (4, 5)]
        );
    }

    #[test]
    fn no_turn_words_is_one_utterance() {
        let words = words_with_probs(&[0.0; 4]);
        assert_eq!(spans(&cut_into_utterances(&words, &[])), vec![(0, 3)]);
    }

    #[test]
    fn turn_word_at_index_zero_cuts_vacuously() {
        let words = words_with_probs(&[0.0; 4]);
        assert_eq!(spans(&cut_into_utterances(&words, &[0])), vec![(0, 3)]);
    }

    #[test]
    fn utterance_interval_is_word_hull() {
        let words = words_with_probs(&[0.0; 3]);
        let utts = cut_into_utterances(&words, &[1]);
        assert_eq!(utts[0].interval, TimeInterval { start: 0.0, end: 0.4 });
        assert!((utts[1].interval.start - 0.4).abs() < 1e-12);
        assert!((utts[1].interval.end - 1.2).abs() < 1e-12);
    }

    #[test]
    fn singletons_dropped() {
        let words = words_with_probs(&[0.0; 6]);
        let utts = cut_into_utterances(&words, &[2, 3]);
        assert_eq!(spans(&utts), vec![(0, 1), (2, 2), (3, 5)]);
        assert_eq!(spans(&filter_single_word(utts)), vec![(0, 1), (3, 5)]);
    }

    #[test]
    fn all_singletons_filter_to_nothing() {
        let words = words_with_probs(&[0.0; 3]);
        let utts = cut_into_utterances(&words, &[1, 2]);
        // Spans (0,0), (1,1), (2,2).
        assert!(filter_single_word(utts).is_empty());
    }

    #[test]
    fn oversegment_greedy_chunks() {
        let words = words_with_probs(&[0.0; 7]);
        let utts = cut_into_utterances(&words, &[]);
        let chunks = oversegment(&words, &utts, 3).unwrap();
        assert_eq!(spans(&chunks), vec![(0, 2), (3, 5), (6, 6)]);
    }

    #[test]
    fn oversegment_leaves_short_utterances_alone() {
        let words = words_with_probs(&[0.0; 3]);
        let utts = cut_into_utterances(&words, &[]);
        assert_eq!(spans(&oversegment(&words, &utts, 3).unwrap()), vec![(0, 2)]);
    }

    #[test]
    fn oversegment_even_split() {
        let words = words_with_probs(&[0.0; 4]);
        let utts = cut_into_utterances(&words, &[]);
        assert_eq!(
            spans(&oversegment(&words, &utts, 2).unwrap()),
            vec![(0, 1), (2, 3)]
        );
    }

    #[test]
    fn oversegment_rejects_nu_below_two() {
        let words = words_with_probs(&[0.0; 4]);
        let utts = cut_into_utterances(&words, &[]);
        assert!(matches!(
            oversegment(&words, &utts, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn q_fills_one_rectangle() {
        let segments = uniform_segments(
            &[TimeInterval { start: 0.0, end: 3.4 }],
            1.0,
            0.3,
        )
        .unwrap();
        assert_eq!(segments.len(), 9);
        // One utterance claiming exactly segments 3..=6.
        let utt = Utterance {
            word_span: (0, 1),
            interval: TimeInterval { start: 0.9, end: 2.8 },
        };
        let q: AffinityMatrix<f64> = build_q(&[utt], &segments[..8], 0.75);
        for i in 0..8 {
            for j in 0..8 {
                let expected = if (3..=6).contains(&i) && (3..=6).contains(&j) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(q.get(i, j), expected, "q[{i}][{j}]");
            }
        }
    }

    #[test]
    fn q_without_utterances_is_zero() {
        let segments = uniform_segments(
            &[TimeInterval { start: 0.0, end: 2.0 }],
            1.0,
            0.3,
        )
        .unwrap();
        let q: AffinityMatrix<f64> = build_q(&[], &segments, 0.75);
        assert!(q.as_array().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn q_blocks_union_without_transitive_closure() {
        // Two spans (2, 4) and (4, 6) on 8 segments: rectangles union,
        // corner q[2][6] stays 0.
        let segments = uniform_segments(
            &[TimeInterval { start: 0.0, end: 3.1 }],
            1.0,
            0.3,
        )
        .unwrap();
        assert_eq!(segments.len(), 8);
        let utt_a = Utterance {
            word_span: (0, 1),
            interval: TimeInterval { start: 0.6, end: 2.2 },
        };
        let utt_b = Utterance {
            word_span: (2, 3),
            interval: TimeInterval { start: 1.2, end: 2.8 },
        };
        assert_eq!(segments_in_utterance(&segments, utt_a.interval, 0.75), Some((2, 4)));
        assert_eq!(segments_in_utterance(&segments, utt_b.interval, 0.75), Some((4, 6)));
        let q: AffinityMatrix<f64> = build_q(&[utt_a, utt_b], &segments, 0.75);
        assert_eq!(q.get(2, 4), 1.0);
        assert_eq!(q.get(4, 6), 1.0);
        assert_eq!(q.get(2, 6), 0.0);
        assert_eq!(q.get(6, 2), 0.0);
        assert_eq!(q.get(3, 3), 1.0);
    }

    #[test]
    fn validate_words_rejects_bad_lists() {
        let mut words = words_with_probs(&[0.2, 0.3]);
        assert!(validate_words(&words).is_ok());
        words[1].turn_prob = 1.5;
        assert!(validate_words(&words).is_err());
        let mut words = words_with_probs(&[0.2, 0.3]);
        words[1].interval.start = 0.1; // overlaps word 0
        assert!(validate_words(&words).is_err());
    }

    proptest! {
        #[test]
        fn turn_indices_shrink_as_c_grows(
            probs in proptest::collection::vec(0.0..1.0f64, 1..60),
            c1 in 0.0..1.0f64,
            c2 in 0.0..1.0f64,
        ) {
            let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
            let words = words_with_probs(&probs);
            let under_hi = pick_turn_words(&words, hi);
            let under_lo = pick_turn_words(&words, lo);
            prop_assert!(under_hi.iter().all(|i| under_lo.contains(i)));
        }

        #[test]
        fn cut_round_trip_preserves_sequence(
            len in 1usize..60,
            turn_seed in proptest::collection::vec(0.0..1.0f64, 60),
        ) {
            let words = words_with_probs(&vec![0.0; len]);
            let turns: Vec<usize> = (0..len).filter(|&i| turn_seed[i] > 0.6).collect();
            let utts = cut_into_utterances(&words, &turns);
            let mut next = 0;
            for u in &utts {
                prop_assert_eq!(u.word_span.0, next);
                prop_assert!(u.word_span.1 >= u.word_span.0);
                next = u.word_span.1 + 1;
            }
            prop_assert_eq!(next, len);
        }

        #[test]
        fn oversegment_preserves_words_and_caps_length(
            len in 1usize..80,
            nu in 2usize..10,
        ) {
            let words = words_with_probs(&vec![0.0; len]);
            let utts = cut_into_utterances(&words, &[]);
            let chunks = oversegment(&words, &utts, nu).unwrap();
            let total: usize = chunks
                .iter()
                .map(|u| u.word_span.1 - u.word_span.0 + 1)
                .sum();
            prop_assert_eq!(total, len);
            for u in &chunks {
                prop_assert!(u.word_span.1 - u.word_span.0 + 1 <= nu);
            }
        }

        #[test]
        fn q_is_symmetric_union_of_diagonal_blocks(
            cuts in proptest::collection::vec(0.0..1.0f64, 12),
        ) {
            let segments = uniform_segments(
                &[TimeInterval { start: 0.0, end: 6.0 }],
                1.0,
                0.3,
            ).unwrap();
            let words = words_with_probs(&cuts);
            let turns = pick_turn_words(&words, 0.5);
            let utts = cut_into_utterances(&words, &turns);
            let q: AffinityMatrix<f64> = build_q(&utts, &segments, 0.75);
            let m = q.size();
            for i in 0..m {
                for j in 0..m {
                    let v = q.get(i, j);
                    prop_assert!(v == 0.0 || v == 1.0);
                    prop_assert_eq!(v, q.get(j, i));
                    // Any 1 implies 1s on both diagonal corners of its
                    // rectangle.
                    if v == 1.0 {
                        prop_assert_eq!(q.get(i, i), 1.0);
                        prop_assert_eq!(q.get(j, j), 1.0);
                    }
                }
            }
        }
    }
}
