//! Workload generation and measurement helpers for the alignment benchmarks.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a seed fixes
//! every generated sequence and corpus.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use opberg_core::{
    naive_optimal, opberg_align, smith_waterman, AlignmentResult, GapModel, Label, Mode, OpbergParams, Result,
    ScoringScheme, SentenceRecord, TokenSeq,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_seq<R: Rng>(rng: &mut R, len: usize, alphabet: u32) -> TokenSeq {
    TokenSeq { tokens: (0..len).map(|_| opberg_core::PosToken(rng.gen_range(0..alphabet))).collect(), source_id: None }
}

/// A pair of length-`n` sequences for size `n` under `seed`. Different sizes
/// draw from independent streams.
pub fn random_pair(seed: u64, n: usize, alphabet: u32) -> (TokenSeq, TokenSeq) {
    let mut r = rng(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (random_seq(&mut r, n, alphabet), random_seq(&mut r, n, alphabet))
}

const TAGS: &[&str] = &["NN", "NNS", "NNP", "VB", "VBD", "VBZ", "VBN", "JJ", "RB", "IN", "DT", "PRP", "CC", "TO", "MD"];

/// Labeled records with Penn-style tags. Causal records carry a verb-centered
/// motif so the two classes are separable but not trivially so.
pub fn synthetic_corpus(seed: u64, count: usize, prefix: &str) -> Vec<SentenceRecord> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let causal = r.gen_bool(0.5);
            let len = r.gen_range(4..16);
            let mut pos: Vec<String> = (0..len).map(|_| TAGS[r.gen_range(0..TAGS.len())].to_owned()).collect();
            if causal {
                let at = r.gen_range(0..len - 2);
                pos[at] = "NN".into();
                pos[at + 1] = "VBZ".into();
                pos[at + 2] = "NN".into();
            }
            let label = if causal { Label::Causal } else { Label::NonCausal };
            SentenceRecord::new(format!("{prefix}{i:05}"), label, pos)
        })
        .collect()
}

/// Runs one engine. The k-indexed engine gets linear gaps at the extend cost.
pub fn run_mode(
    mode: Mode,
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
    params: &OpbergParams,
) -> Result<AlignmentResult> {
    match mode {
        Mode::Sw => smith_waterman(a, b, scheme, gaps),
        Mode::Naive => naive_optimal(a, b, scheme, gaps.linear, params.jump_penalty, params.k_max),
        Mode::Opberg => opberg_align(a, b, scheme, gaps, params),
    }
}

/// Parameters used by the size sweeps.
pub fn sweep_params() -> (ScoringScheme, GapModel, OpbergParams) {
    (ScoringScheme::uniform(2, -1), GapModel::linear(-1), OpbergParams::unconstrained(-3))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

/// System allocator that tracks live and peak heap bytes. Install it with
/// `#[global_allocator]` in a binary or test target.
pub struct CountingAlloc;

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed) + new_size - layout.size();
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

/// Wall time and heap high-water mark above the starting level. Only
/// meaningful when [`CountingAlloc`] is the global allocator.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, Duration, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let peak = PEAK.load(Ordering::Relaxed).saturating_sub(base);
    (out, elapsed, peak)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mode: Mode,
    pub n: usize,
    pub wall_time: Duration,
    pub peak_bytes: usize,
}

/// Best-of-`reps` timing for one engine at one size.
pub fn bench_one(mode: Mode, n: usize, reps: usize, seed: u64, alphabet: u32) -> Result<BenchRow> {
    let (a, b) = random_pair(seed, n, alphabet);
    let (scheme, gaps, params) = sweep_params();
    let mut best = Duration::MAX;
    let mut peak = 0;
    for _ in 0..reps.max(1) {
        let (res, t, bytes) = measure(|| run_mode(mode, &a, &b, &scheme, &gaps, &params));
        res?;
        best = best.min(t);
        peak = peak.max(bytes);
    }
    Ok(BenchRow { mode, n, wall_time: best, peak_bytes: peak })
}
