//! Multi-segment local alignment of part-of-speech sequences, and a
//! nearest-neighbor causal sentence classifier built on it.
//!
//! Three aligners share one result type:
//!
//! * [`smith_waterman`]: the best single local alignment.
//! * [`naive_optimal`]: a cubic reference that indexes the DP by segment count.
//! * [`opberg_align`]: the quadratic single-pass engine, with break and start
//!   thresholds on top of the per-segment jump penalty.
//!
//! ```
//! use opberg_core::{Alphabet, GapModel, OpbergParams, ScoringScheme, opberg_align};
//!
//! let mut abc = Alphabet::new();
//! let a = abc.intern(&["A", "A", "C", "C"]);
//! let b = abc.intern(&["A", "A", "B", "B", "B", "C", "C"]);
//! let res = opberg_align(
//!     &a,
//!     &b,
//!     &ScoringScheme::uniform(2, -1),
//!     &GapModel::affine(0, -1),
//!     &OpbergParams::unconstrained(-1),
//! )
//! .unwrap();
//! assert_eq!((res.total_score, res.k), (7, 2));
//! ```

pub mod alphabet;
pub mod classifier;
pub mod corpus;
pub mod error;
pub mod grid;
pub mod naive;
pub mod opberg;
pub mod oracle;
pub mod result;
pub mod scoring;
pub mod sw;
mod trace;

pub use alphabet::{Alphabet, PosToken, TokenSeq};
pub use classifier::{
    classify, classify_all, decide, evaluate, similarity, ClassifierParams, Decision, DecisionLabel, LabeledCorpus,
    Metrics, Normalization, Similarity,
};
pub use corpus::{read_corpus, write_corpus, ExternalTagger, Label, Lexicon, SentenceRecord, TaggerError};
pub use error::{Error, Result};
pub use grid::{score_length, Grid};
pub use naive::naive_optimal;
pub use opberg::{opberg_align, opberg_fill, priced_out_penalty};
pub use oracle::{brute_force_affine, brute_force_oracle, ORACLE_LIMIT};
pub use result::{AlignOp, AlignmentResult, Mode, Segment, SegmentStart};
pub use scoring::{BetaMode, GammaSpec, GapModel, OpbergParams, Score, ScoreBounds, ScoringScheme, Threshold};
pub use sw::smith_waterman;
