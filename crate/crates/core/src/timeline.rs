//! Time-interval algebra, uniform segmentation of speech regions, and the
//! mapping from utterance boundaries to segment index spans.

use crate::error::{Error, Result};

/// Slack for stride arithmetic, far below any meaningful audio duration.
/// Guards `floor` against cases like (1.9 - 1.0) / 0.3 landing a hair under
/// the exact integer.
const TIME_EPS: f64 = 1e-9;

/// Half-open-in-spirit span of audio time in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    /// Validates 0 <= start < end with both endpoints finite.
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || start < 0.0 || end <= start {
            return Err(Error::InvalidInput(format!(
                "invalid time interval [{start}, {end}]"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

/// Fixed-length analysis window; the atomic unit that receives a speaker
/// label. Indices run 0..M-1 in strictly increasing start order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub index: usize,
    pub interval: TimeInterval,
}

/// Slides a `window`-long segment by `shift` through each speech region.
///
/// Within a region, segments start at region.start, region.start + shift,
/// and so on while the window still fits. If the last stride-aligned
/// segment stops short of region.end, one extra segment anchored at
/// region.end - window is appended so no audio is left uncovered. A region
/// shorter than the window yields a single segment covering the whole
/// region; that is the only case where a segment is shorter than the
/// window. Indices are global across regions in time order.
pub fn uniform_segments(
    regions: &[TimeInterval],
    window: f64,
    shift: f64,
) -> Result<Vec<Segment>> {
    if !window.is_finite() || window <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "window must be positive, got {window}"
        )));
    }
    if !shift.is_finite() || shift <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shift must be positive, got {shift}"
        )));
    }
    let mut prev_end = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for region in regions {
        if region.duration() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "speech region [{}, {}] has nonpositive duration",
                region.start, region.end
            )));
        }
        if region.start < prev_end {
            return Err(Error::InvalidInput(
                "speech regions must be sorted and non-overlapping".into(),
            ));
        }
        prev_end = region.end;

        let duration = region.duration();
        if duration < window - TIME_EPS {
            push_segment(&mut out, region.start, region.end);
            continue;
        }
        // Stride count by formula rather than repeated addition, so the
        // emitted list provably matches floor((D - window) / shift) + 1.
        let strides = ((duration - window) / shift + TIME_EPS).floor() as usize + 1;
        for i in 0..strides {
            let start = region.start + i as f64 * shift;
            push_segment(&mut out, start, start + window);
        }
        let last_start = region.start + (strides - 1) as f64 * shift;
        if last_start + window < region.end - TIME_EPS {
            push_segment(&mut out, region.end - window, region.end);
        }
    }
    Ok(out)
}

fn push_segment(out: &mut Vec<Segment>, start: f64, end: f64) {
    let index = out.len();
    out.push(Segment {
        index,
        interval: TimeInterval { start, end },
    });
}

/// Length of the intersection of two intervals, zero when disjoint.
pub fn overlap_duration(a: TimeInterval, b: TimeInterval) -> f64 {
    (a.end.min(b.end) - a.start.max(b.start)).max(0.0)
}

/// Index span (m, n) of the segments claimed by an utterance.
///
/// A segment qualifies when its overlap with `utt` reaches
/// `min_overlap_fraction` of the segment duration, or when it lies entirely
/// inside `utt` (so a sub-window utterance can still claim a fully
/// contained segment). Returns the first and last qualifying indices, or
/// `None` when no segment qualifies.
pub fn segments_in_utterance(
    segments: &[Segment],
    utt: TimeInterval,
    min_overlap_fraction: f64,
) -> Option<(usize, usize)> {
    debug_assert!(
        min_overlap_fraction > 0.0 && min_overlap_fraction <= 1.0,
        "fraction must lie in (0, 1]"
    );
    let mut first = None;
    let mut last = None;
    for seg in segments {
        let needed = min_overlap_fraction * seg.interval.duration();
        let inside = seg.interval.start >= utt.start && seg.interval.end <= utt.end;
        if overlap_duration(seg.interval, utt) >= needed || inside {
            if first.is_none() {
                first = Some(seg.index);
            }
            last = Some(seg.index);
        }
    }
    Some((first?, last?))
}
