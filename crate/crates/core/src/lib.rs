//! Morphic words around the Thue-Morse sequence.
//!
//! This crate builds, cross-checks and exposes a family of interlocking
//! combinatorial objects:
//!
//! * **Fixed points of substitutions** ([`words`]): alphabets, finite words,
//!   morphisms, and lazily extended fixed-point streams, together with
//!   factor-occurrence and gap extraction by direct scan.
//! * **A catalog of named systems** ([`catalog`]): the Thue-Morse word, the
//!   ternary Thue-Morse word, the gap sequence of the block `01` and its
//!   four-letter preimage, Berstel's 2-uniform presentation, and the
//!   substitutions tying all of them together.
//! * **Gap sequences of arbitrary factors** ([`gaps`]): classification of a
//!   factor by the minimal block order in which it embeds, and morphic
//!   generation of its gap sequence, verified against scanning.
//! * **Automaticity probes** ([`kernel`]): kernel exploration with
//!   fingerprint equality, square detection, and arithmetic-subsequence
//!   distinctness witnesses.
//! * **Non-crossing matchings** ([`matching`]): the decorated seven-letter
//!   alphabet, the connector-linking and rotation algorithms, and the degree
//!   of a position.
//! * **Weighted base-k transducers** ([`transducer`]): exact thirds
//!   arithmetic, the base-4 degree transducer, the 196-state discrepancy
//!   transducer, and three independent routes to the discrepancy of `01`
//!   blocks.
//! * **Residue-class numerics** ([`residue`]): positions of long prefixes of
//!   the gap preimage word in prescribed residue classes, missing-digit sets,
//!   and the exponential-sum products controlling them.
//!
//! All sequence-level computations use exact integer arithmetic; discrepancy
//! values live in the ring (1/3)Z, represented exactly by [`transducer::Third`].
//! Floating point appears only in the exponential-sum module, where the
//! claims under test are inequalities with documented tolerances.
//!
//! # Quick start
//!
//! ```
//! use gapseq::catalog;
//!
//! let tm = catalog::thue_morse();
//! assert_eq!(tm.prefix(8).unwrap().to_string(), "01101001");
//!
//! // Gaps between consecutive occurrences of "01" in the Thue-Morse word.
//! let w = tm.word_from_str("01").unwrap();
//! assert_eq!(tm.gaps_by_scan(&w, 5).unwrap(), vec![3, 3, 4, 2, 3]);
//! ```
//!
//! The consistency suite that ties the modules together is in [`verify`];
//! the command line interface lives in the companion `gapseq-cli` crate.

pub mod catalog;
pub mod error;
pub mod gaps;
pub mod kernel;
pub mod matching;
pub mod residue;
pub mod transducer;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use transducer::Third;
pub use words::{Alphabet, Morphism, MorphicStream, Symbol, Word};
