//! Laplacian construction, eigengap analysis, turn-threshold selection,
//! and spectral clustering.

use ndarray::{s, Array2};

use crate::eigen::{eigh, eigvalsh};
use crate::error::{Error, Result};
use crate::fusion::combine_max;
use crate::kmeans::{kmeans, KMeansParams};
use crate::lexical::{
    build_q, cut_into_utterances, filter_single_word, oversegment, pick_turn_words, Word,
};
use crate::matrix::AffinityMatrix;
use crate::num::Real;
use crate::timeline::Segment;

/// Asymmetry beyond this is a hard input error rather than roundoff.
const SYMMETRY_TOL: f64 = 1e-12;

/// Floor for the eigengap-vector minimum; repeated eigenvalues make the
/// true minimum collapse to 0.
const RATIO_FLOOR: f64 = 1e-10;

/// Unnormalized graph Laplacian L = D - A with D the diagonal of row sums.
///
/// Self-loops cancel: the diagonal of L is the row sum excluding a_ii, so
/// adding any diagonal to A leaves L unchanged.
pub fn laplacian<T: Real>(a: &AffinityMatrix<T>) -> Result<Array2<T>> {
    if !a.is_symmetric(T::of(SYMMETRY_TOL)) {
        return Err(Error::InvalidInput(format!(
            "adjacency must be symmetric within {SYMMETRY_TOL}, worst asymmetry {}",
            a.asymmetry()
        )));
    }
    let m = a.size();
    let mut l = Array2::zeros((m, m));
    for i in 0..m {
        let mut off_diagonal_sum = T::zero();
        for j in 0..m {
            if j != i {
                let v = a.get(i, j);
                off_diagonal_sum = off_diagonal_sum + v;
                l[[i, j]] = -v;
            }
        }
        l[[i, i]] = off_diagonal_sum;
    }
    Ok(l)
}

/// Ascending Laplacian spectrum with its consecutive-difference gap vector,
/// the min-max gap ratio, and the eigengap estimate of the speaker count.
#[derive(Debug, Clone, PartialEq)]
pub struct EigengapReport<T: Real> {
    /// All M eigenvalues, ascending.
    pub eigenvalues: Vec<T>,
    /// eigengaps[n] = eigenvalues[n+1] - eigenvalues[n], length M-1.
    pub eigengaps: Vec<T>,
    /// max(gaps) / max(min(gaps), 1e-10).
    pub ratio: T,
    /// Turn threshold this report was built under, when one applies.
    pub threshold: Option<f64>,
    /// Position of the largest gap among the first `k_max`, 1-based; the
    /// first maximum wins ties.
    pub estimated_speakers: usize,
}

/// Decomposes a Laplacian and summarizes its eigengap structure.
///
/// `k_max` caps the speaker-count search: the estimate is
/// argmax over gap positions 1..=k_max (clamped to M-1).
pub fn eigengap_report<T: Real>(
    l: &Array2<T>,
    threshold: Option<f64>,
    k_max: usize,
) -> Result<EigengapReport<T>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    if l.nrows() < 2 {
        return Err(Error::InvalidInput(format!(
            "eigengap analysis needs at least 2 segments, got {}",
            l.nrows()
        )));
    }
    let eigenvalues = eigvalsh(l)?;
    Ok(report_from_eigenvalues(eigenvalues, threshold, k_max))
}

fn report_from_eigenvalues<T: Real>(
    eigenvalues: Vec<T>,
    threshold: Option<f64>,
    k_max: usize,
) -> EigengapReport<T> {
    let eigengaps: Vec<T> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let max_gap = eigengaps
        .iter()
        .copied()
        .fold(T::neg_infinity(), |acc, g| acc.max(g));
    let min_gap = eigengaps
        .iter()
        .copied()
        .fold(T::infinity(), |acc, g| acc.min(g));
    let ratio = max_gap / min_gap.max(T::of(RATIO_FLOOR));

    let limit = k_max.min(eigengaps.len());
    let mut best = 0;
    for n in 1..limit {
        if eigengaps[n] > eigengaps[best] {
            best = n;
        }
    }
    EigengapReport {
        eigenvalues,
        eigengaps,
        ratio,
        threshold,
        estimated_speakers: best + 1,
    }
}

/// Result of the turn-threshold grid search.
#[derive(Debug, Clone)]
pub struct ThresholdSearch<T: Real> {
    /// Winning threshold, the smallest one on ratio ties.
    pub threshold: f64,
    /// Fused adjacency A_c at the winning threshold.
    pub adjacency: AffinityMatrix<T>,
    pub report: EigengapReport<T>,
    /// (c, ratio) for every grid point that evaluated cleanly, grid order.
    pub ratios: Vec<(f64, f64)>,
}

/// Evaluates every threshold in `c_grid` and keeps the one whose fused
/// adjacency yields the largest min-max eigengap ratio.
///
/// A grid point that fails numerically is disqualified without aborting
/// the search; the search errors only when every point fails.
pub fn select_threshold<T: Real>(
    p_ud: &AffinityMatrix<T>,
    words: &[Word],
    segments: &[Segment],
    c_grid: &[f64],
    nu: usize,
    min_overlap_fraction: f64,
    k_max: usize,
) -> Result<ThresholdSearch<T>> {
    if c_grid.is_empty() {
        return Err(Error::InvalidParameter("threshold grid is empty".into()));
    }
    if c_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "threshold grid must be ascending".into(),
        ));
    }

    let mut best: Option<ThresholdSearch<T>> = None;
    let mut ratios: Vec<(f64, f64)> = Vec::with_capacity(c_grid.len());
    let mut last_failure: Option<Error> = None;
    for &c in c_grid {
        match evaluate_threshold(p_ud, words, segments, c, nu, min_overlap_fraction, k_max) {
            Ok((adjacency, report)) => {
                ratios.push((c, report.ratio.as_f64()));
                let improved = match &best {
                    None => true,
                    Some(b) => report.ratio > b.report.ratio,
                };
                if improved {
                    best = Some(ThresholdSearch {
                        threshold: c,
                        adjacency,
                        report,
                        ratios: Vec::new(),
                    });
                }
            }
            Err(e) => last_failure = Some(e),
        }
    }
    match best {
        Some(mut search) => {
            search.ratios = ratios;
            Ok(search)
        }
        None => Err(last_failure.unwrap_or_else(|| {
            Error::Numerical("every threshold grid point failed".into())
        })),
    }
}

fn evaluate_threshold<T: Real>(
    p_ud: &AffinityMatrix<T>,
    words: &[Word],
    segments: &[Segment],
    c: f64,
    nu: usize,
    min_overlap_fraction: f64,
    k_max: usize,
) -> Result<(AffinityMatrix<T>, EigengapReport<T>)> {
    let turns = pick_turn_words(words, c);
    let utts = filter_single_word(cut_into_utterances(words, &turns));
    let utts = oversegment(words, &utts, nu)?;
    let q = build_q::<T>(&utts, segments, min_overlap_fraction);
    let a = combine_max(p_ud, &q)?;
    let l = laplacian(&a)?;
    let report = eigengap_report(&l, Some(c), k_max)?;
    Ok((a, report))
}

/// Unnormalized spectral clustering: k-means over the rows of the
/// eigenvector matrix of the k smallest Laplacian eigenvalues.
///
/// Deterministic for a fixed seed.
pub fn spectral_cluster<T: Real>(
    a: &AffinityMatrix<T>,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let m = a.size();
    if k < 1 || k > m {
        return Err(Error::InvalidParameter(format!(
            "speaker count must lie in 1..={m}, got {k}"
        )));
    }
    let l = laplacian(a)?;
    let eig = eigh(&l)?;
    let embedding = eig.vectors.slice(s![.., ..k]).to_owned();
    let fit = kmeans(&embedding, &KMeansParams::new(k, seed))?;
    Ok(fit.labels)
}
