//! The named substitution systems and the identities tying them together.
//!
//! Everything here is constructed data: the Thue-Morse word `t`, the ternary
//! Thue-Morse word `A` (OEIS A005679 family), the gap word `B` recording the
//! distances between consecutive `01` blocks in `t`, its four-letter
//! preimage word, Berstel's 2-uniform presentation of `A`, and the
//! substitutions translating between them. The identities are checked on
//! prefixes by the test suite and by [`crate::verify`]; nothing here is
//! proved, only cross-verified.
//!
//! Canonical symbol orders are load-bearing: the four-letter alphabet is
//! ordered `a, ā, b, c` and the decorated seven-letter alphabet (see
//! [`crate::matching`]) is ordered `a, b̂<, b̂>, b<, b>, c<, c>`; matrix and
//! transducer indexing elsewhere relies on these orders.

use std::sync::Arc;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::words::{Alphabet, MorphicStream, Morphism, Symbol, Word};

static BINARY: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&["0", "1"]).unwrap());
static TERNARY: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&["a", "b", "c"]).unwrap());
static BARRED: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&["a", "ā", "b", "c"]).unwrap());
static BERSTEL: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&["a", "b", "bh", "c"]).unwrap());
static GAP_DIGITS: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&["2", "3", "4"]).unwrap());

/// The two-letter alphabet `{0,1}`.
pub fn binary_alphabet() -> Arc<Alphabet> {
    Arc::clone(&BINARY)
}

/// The three-letter alphabet `{a,b,c}`.
pub fn ternary_alphabet() -> Arc<Alphabet> {
    Arc::clone(&TERNARY)
}

/// The four-letter alphabet `{a,ā,b,c}`, in that order.
pub fn barred_alphabet() -> Arc<Alphabet> {
    Arc::clone(&BARRED)
}

/// Berstel's four-letter alphabet `{a,b,bh,c}`; `bh` is the auxiliary
/// b-letter that the coding merges back into `b`.
pub fn berstel_alphabet() -> Arc<Alphabet> {
    Arc::clone(&BERSTEL)
}

/// Gap digits `{2,3,4}`: every gap between consecutive `01` blocks in the
/// Thue-Morse word is one of these.
pub fn gap_alphabet() -> Arc<Alphabet> {
    Arc::clone(&GAP_DIGITS)
}

/// Numeric value of a letter of the gap alphabet.
pub fn gap_value(s: Symbol) -> u64 {
    s as u64 + 2
}

/// Numeric values of a word over the gap alphabet.
pub fn gap_values(w: &Word) -> Vec<u64> {
    w.symbols().iter().map(|&s| gap_value(s)).collect()
}

fn morphism(src: &Arc<Alphabet>, dst: &Arc<Alphabet>, images: &[&str]) -> Morphism {
    Morphism::from_images(Arc::clone(src), Arc::clone(dst), images).unwrap()
}

/// The Thue-Morse substitution `0 -> 01, 1 -> 10`.
pub fn tm_morphism() -> Morphism {
    morphism(&BINARY, &BINARY, &["01", "10"])
}

/// The ternary substitution `a -> abc, b -> ac, c -> b` whose fixed point is
/// the ternary Thue-Morse word.
pub fn ternary_morphism() -> Morphism {
    morphism(&TERNARY, &TERNARY, &["abc", "ac", "b"])
}

/// Block substitution recovering the Thue-Morse word from the ternary word:
/// `a -> 011010, b -> 0110, c -> 01`.
pub fn tm_blocks() -> Morphism {
    morphism(&TERNARY, &BINARY, &["011010", "0110", "01"])
}

/// Gap contribution of each ternary letter: `a -> 33, b -> 4, c -> 2`.
/// Applied to the ternary word it yields the gap word of `01`.
pub fn gap_blocks() -> Morphism {
    morphism(&TERNARY, &GAP_DIGITS, &["33", "4", "2"])
}

/// The four-letter substitution `a -> aā, ā -> bc, b -> aāc, c -> b` whose
/// fixed point is the preimage of the gap word.
pub fn gap_morphism() -> Morphism {
    morphism(&BARRED, &BARRED, &["aā", "bc", "aāc", "b"])
}

/// Coding of the four-letter fixed point onto gap digits:
/// `a -> 3, ā -> 3, b -> 4, c -> 2`.
pub fn gap_coding() -> Morphism {
    morphism(&BARRED, &GAP_DIGITS, &["3", "3", "4", "2"])
}

/// Gap contribution of each four-letter symbol for the block `10`:
/// `a -> 24, ā -> 33, b -> 233, c -> 4`. Its image of the preimage word is
/// the gap word of `10`.
pub fn gaps10_blocks() -> Morphism {
    morphism(&BARRED, &GAP_DIGITS, &["24", "33", "233", "4"])
}

/// Return words of `0110` keyed by the four-letter alphabet:
/// `a -> 011010, ā -> 011001, b -> 01101001, c -> 0110`. Concatenated along
/// the preimage word these rebuild the Thue-Morse word.
pub fn tm_return_blocks() -> Morphism {
    morphism(&BARRED, &BINARY, &["011010", "011001", "01101001", "0110"])
}

/// Berstel's 2-uniform substitution `a -> ab, b -> ca, bh -> ac, c -> c bh`.
pub fn berstel_morphism() -> Morphism {
    morphism(&BERSTEL, &BERSTEL, &["a b", "c a", "a c", "c bh"])
}

/// Coding that merges the auxiliary letter: `a -> a, b -> b, bh -> b, c -> c`.
pub fn berstel_coding() -> Morphism {
    morphism(&BERSTEL, &TERNARY, &["a", "b", "b", "c"])
}

/// The conjugating map `a -> aā`, fixing `b` and `c`; it intertwines the
/// ternary substitution with the four-letter one.
pub fn doubling_conjugacy() -> Morphism {
    morphism(&TERNARY, &BARRED, &["aā", "b", "c"])
}

/// The Thue-Morse word `t = 0110100110010110...` as a stream.
pub fn thue_morse() -> MorphicStream {
    MorphicStream::new(tm_morphism(), 0).unwrap()
}

/// Thue-Morse stream with an explicit scan budget.
pub fn thue_morse_with_budget(budget: usize) -> MorphicStream {
    thue_morse().with_budget(budget)
}

/// The ternary Thue-Morse word `A = abcacbabcbac...`.
pub fn ternary_tm() -> MorphicStream {
    MorphicStream::new(ternary_morphism(), 0).unwrap()
}

/// The four-letter preimage word `aābcaācb...` of the gap word.
pub fn gap_preimage() -> MorphicStream {
    MorphicStream::new(gap_morphism(), 0).unwrap()
}

/// The gap word `B = 334233243342...` of the block `01`, as the coded
/// fixed point of the four-letter substitution.
pub fn gaps01() -> MorphicStream {
    MorphicStream::new(gap_morphism(), 0).unwrap().with_coding(gap_coding()).unwrap()
}

/// Berstel's fixed point over `{a,b,bh,c}`; its coding is the ternary word.
pub fn berstel_word() -> MorphicStream {
    MorphicStream::new(berstel_morphism(), 0).unwrap()
}

/// First `n` letters of the gap word of `10`, generated morphically as the
/// image of the preimage word under [`gaps10_blocks`].
pub fn gaps10_prefix(n: usize) -> Result<Word> {
    // image lengths are >= 1, so n source letters always suffice
    let src = gap_preimage().prefix(n.max(1))?;
    let img = gaps10_blocks().apply(&src)?;
    Ok(img.slice(0..n))
}

/// Concatenation `blocks(src_0) blocks(src_1) ...` truncated to `n` letters.
pub fn reconstruct_via(blocks: &Morphism, src: &MorphicStream, n: usize) -> Result<Word> {
    if n == 0 {
        return Ok(Word::empty(Arc::clone(blocks.target())));
    }
    // every image is nonempty, so n source letters are enough
    let prefix = src.prefix(n)?;
    let img = blocks.apply(&prefix)?;
    Ok(img.slice(0..n))
}

/// Inverse of [`gap_blocks`]: parses a gap word back onto `{a,b,c}` by the
/// unambiguous rule `33 -> a, 4 -> b, 2 -> c`.
pub fn invert_gap_blocks(w: &Word) -> Result<Word> {
    invert_gaps(w, &TERNARY, &[0])
}

/// Variant of [`invert_gap_blocks`] targeting the four-letter alphabet:
/// `33 -> aā, 4 -> b, 2 -> c`.
pub fn invert_gap_blocks_split(w: &Word) -> Result<Word> {
    invert_gaps(w, &BARRED, &[0, 1])
}

fn invert_gaps(w: &Word, target: &Arc<Alphabet>, pair_image: &[Symbol]) -> Result<Word> {
    if *w.alphabet() != *GAP_DIGITS {
        return Err(Error::AlphabetMismatch {
            expected: "{2,3,4}".into(),
            got: format!("{:?}", w.alphabet()),
        });
    }
    let b = target.index_of("b").unwrap();
    let c = target.index_of("c").unwrap();
    let three = GAP_DIGITS.index_of("3").unwrap();
    let four = GAP_DIGITS.index_of("4").unwrap();
    let two = GAP_DIGITS.index_of("2").unwrap();
    let mut out = Vec::new();
    let syms = w.symbols();
    let mut i = 0;
    while i < syms.len() {
        if syms[i] == three {
            if i + 1 >= syms.len() || syms[i + 1] != three {
                return Err(Error::Parse {
                    offset: i,
                    message: "letter 3 must occur in pairs".into(),
                });
            }
            out.extend_from_slice(pair_image);
            i += 2;
        } else if syms[i] == four {
            out.push(b);
            i += 1;
        } else {
            debug_assert_eq!(syms[i], two);
            out.push(c);
            i += 1;
        }
    }
    Word::from_symbols(Arc::clone(target), out)
}

/// Result of greedily parsing a prefix of Berstel's fixed point into a
/// leading `a` followed by bracket blocks `b c (a c)^e bh a (c a)^e'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// The `(e, e')` exponent pairs of the complete blocks, in order.
    pub blocks: Vec<(u8, u8)>,
    /// Trailing letters belonging to an incomplete block.
    pub remainder: Word,
}

/// Greedy left-to-right parse of a prefix of Berstel's fixed point into the
/// bracket blocks above. Input that contradicts the block grammar (and is
/// therefore not a prefix of the fixed point) is a parse error carrying the
/// offending offset; a trailing incomplete block is returned as remainder.
pub fn berstel_block_decompose(prefix: &Word) -> Result<BlockDecomposition> {
    if *prefix.alphabet() != *BERSTEL {
        return Err(Error::AlphabetMismatch {
            expected: "{a,b,bh,c}".into(),
            got: format!("{:?}", prefix.alphabet()),
        });
    }
    let sym = |name: &str| BERSTEL.index_of(name).unwrap();
    let (a, b, bh, c) = (sym("a"), sym("b"), sym("bh"), sym("c"));
    let s = prefix.symbols();

    // one block: b c (a c)^e bh a (c a)^e', with e' decided by whether the
    // next letter opens a new block
    enum Step {
        Complete { e: u8, ep: u8, next: usize },
        Incomplete,
        Fail { offset: usize, message: &'static str },
    }
    let parse_block = |start: usize| -> Step {
        let fail = |offset, message| Step::Fail { offset, message };
        let mut i = start;
        macro_rules! expect {
            ($want:expr, $msg:expr) => {
                if i == s.len() {
                    return Step::Incomplete;
                } else if s[i] != $want {
                    return fail(i, $msg);
                } else {
                    i += 1;
                }
            };
        }
        expect!(b, "block must start with 'b'");
        expect!(c, "expected 'c' after block-initial 'b'");
        if i == s.len() {
            return Step::Incomplete;
        }
        let e = if s[i] == a {
            i += 1;
            expect!(c, "expected 'c' in 'ac' infix");
            1
        } else {
            0
        };
        expect!(bh, "expected 'bh' inside block");
        expect!(a, "expected 'a' after 'bh'");
        if i == s.len() {
            return Step::Incomplete; // e' not yet determined
        }
        match s[i] {
            x if x == b => Step::Complete { e, ep: 0, next: i },
            x if x == c => {
                i += 1;
                expect!(a, "expected 'a' after trailing 'c'");
                Step::Complete { e, ep: 1, next: i }
            }
            _ => fail(i, "expected 'b' or 'c' after block core"),
        }
    };

    let mut blocks = Vec::new();
    if s.is_empty() {
        return Ok(BlockDecomposition { blocks, remainder: Word::empty(Arc::clone(&BERSTEL)) });
    }
    if s[0] != a {
        return Err(Error::Parse { offset: 0, message: "prefix must start with 'a'".into() });
    }
    let mut i = 1;
    while i < s.len() {
        match parse_block(i) {
            Step::Complete { e, ep, next } => {
                blocks.push((e, ep));
                i = next;
            }
            Step::Incomplete => break,
            Step::Fail { offset, message } => {
                return Err(Error::Parse { offset, message: message.into() })
            }
        }
    }
    Ok(BlockDecomposition { blocks, remainder: prefix.slice(i..s.len()) })
}

/// Sequence names understood by the command line and the verify suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceName {
    /// The Thue-Morse word.
    Tm,
    /// The ternary Thue-Morse word.
    Ternary,
    /// Berstel's four-letter presentation of the ternary word.
    Berstel,
    /// The decorated seven-letter word.
    Decorated,
    /// The gap word of `01`.
    Gaps01,
    /// The four-letter preimage of the gap word.
    GapPreimage,
    /// The gap word of `10`.
    Gaps10,
}

impl SequenceName {
    /// Parses the CLI spelling of a sequence name.
    pub fn from_cli(name: &str) -> Option<Self> {
        match name {
            "tm" => Some(Self::Tm),
            "A" => Some(Self::Ternary),
            "Abar" => Some(Self::Berstel),
            "Aplus" => Some(Self::Decorated),
            "B" => Some(Self::Gaps01),
            "Bbar" => Some(Self::GapPreimage),
            "Bcheck" => Some(Self::Gaps10),
            _ => None,
        }
    }

    /// All CLI spellings, for usage messages.
    pub const CLI_NAMES: &'static [&'static str] =
        &["tm", "A", "Abar", "Aplus", "B", "Bbar", "Bcheck"];
}

/// Backing stream of a named sequence; `None` for the gap word of `10`,
/// which is a morphic image rather than a coded fixed point.
pub fn stream_of(name: SequenceName) -> Option<MorphicStream> {
    match name {
        SequenceName::Tm => Some(thue_morse()),
        SequenceName::Ternary => Some(ternary_tm()),
        SequenceName::Berstel => Some(berstel_word()),
        SequenceName::Decorated => Some(crate::matching::decorated_word()),
        SequenceName::Gaps01 => Some(gaps01()),
        SequenceName::GapPreimage => Some(gap_preimage()),
        SequenceName::Gaps10 => None,
    }
}

/// First `n` letters of a named sequence.
pub fn prefix_of(name: SequenceName, n: usize) -> Result<Word> {
    match stream_of(name) {
        Some(stream) => stream.prefix(n),
        None => gaps10_prefix(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn ternary_prefix() {
        assert_eq!(ternary_tm().prefix(12).unwrap().to_string(), "abcacbabcbac");
        assert_eq!(gap_preimage().prefix(4).unwrap().to_string(), "aābc");
    }

    #[test]
    fn berstel_coding_gives_ternary() {
        let abar = berstel_word().prefix(1 << 12).unwrap();
        let coded = berstel_coding().apply(&abar).unwrap();
        assert_eq!(coded, ternary_tm().prefix(1 << 12).unwrap());
    }

    #[test]
    fn tm_from_ternary_blocks() {
        let t = reconstruct_via(&tm_blocks(), &ternary_tm(), 12).unwrap();
        assert_eq!(t.to_string(), "011010011001");
        assert!(reconstruct_via(&tm_blocks(), &ternary_tm(), 0).unwrap().is_empty());

        let t = reconstruct_via(&tm_return_blocks(), &gap_preimage(), 1 << 12).unwrap();
        assert_eq!(t, thue_morse().prefix(1 << 12).unwrap());
    }

    #[test]
    fn gap_word_matches_scan() {
        let n = 1 << 12;
        let tm = thue_morse();
        let b = gaps01().prefix(n).unwrap();
        let scanned = tm.gaps_by_scan(&tm.word_from_str("01").unwrap(), n).unwrap();
        assert_eq!(gap_values(&b), scanned);

        let c = gaps10_prefix(n).unwrap();
        let scanned = tm.gaps_by_scan(&tm.word_from_str("10").unwrap(), n).unwrap();
        assert_eq!(gap_values(&c), scanned);
    }

    #[test]
    fn gap_word_equals_blocks_of_ternary() {
        let b = gaps01().prefix(3 << 10).unwrap();
        let via_ternary = reconstruct_via(&gap_blocks(), &ternary_tm(), 3 << 10).unwrap();
        assert_eq!(b, via_ternary);
    }

    #[test]
    fn invert_gap_blocks_roundtrip() {
        let a64 = ternary_tm().prefix(64).unwrap();
        let gaps = gap_blocks().apply(&a64).unwrap();
        assert_eq!(invert_gap_blocks(&gaps).unwrap(), a64);

        let w = Word::parse(gap_alphabet(), "3342").unwrap();
        assert_eq!(invert_gap_blocks(&w).unwrap().to_string(), "abc");
        assert_eq!(invert_gap_blocks_split(&w).unwrap().to_string(), "aābc");

        let empty = Word::empty(gap_alphabet());
        assert!(invert_gap_blocks(&empty).unwrap().is_empty());

        // odd run of 3s
        let bad = Word::parse(gap_alphabet(), "342").unwrap();
        match invert_gap_blocks(&bad) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn berstel_concatenation_property() {
        // iterates of the berstel morphism on 'abc' split into {abc, ac, bh}
        let abc = Word::parse(berstel_alphabet(), "a b c").unwrap();
        let m = berstel_morphism();
        let mut s = abc;
        for _ in 0..=10 {
            let mut i = 0;
            let syms = s.symbols();
            let a = berstel_alphabet().index_of("a").unwrap();
            let b = berstel_alphabet().index_of("b").unwrap();
            let bh = berstel_alphabet().index_of("bh").unwrap();
            while i < syms.len() {
                if syms[i] == a {
                    assert!(i + 1 < syms.len());
                    if syms[i + 1] == b {
                        i += 3; // abc
                    } else {
                        i += 2; // ac
                    }
                } else {
                    assert_eq!(syms[i], bh);
                    i += 1;
                }
            }
            assert_eq!(i, syms.len());
            s = m.apply(&s).unwrap();
        }
    }

    #[test]
    fn block_decomposition_of_berstel_word() {
        let abar = berstel_word();
        let d = berstel_block_decompose(&abar.prefix(13).unwrap()).unwrap();
        assert_eq!(d.blocks, vec![(1, 0), (0, 1)]);
        assert!(d.remainder.is_empty());

        let d = berstel_block_decompose(&abar.prefix(1).unwrap()).unwrap();
        assert!(d.blocks.is_empty());
        assert!(d.remainder.is_empty());

        // blocks plus remainder re-concatenate to the input
        let p = abar.prefix(1 << 10).unwrap();
        let d = berstel_block_decompose(&p).unwrap();
        let mut tokens = vec!["a"];
        for (e, ep) in &d.blocks {
            tokens.extend(["b", "c"]);
            for _ in 0..*e {
                tokens.extend(["a", "c"]);
            }
            tokens.extend(["bh", "a"]);
            for _ in 0..*ep {
                tokens.extend(["c", "a"]);
            }
        }
        let rebuilt = Word::parse(berstel_alphabet(), &tokens.join(" ")).unwrap();
        let mut letters = rebuilt.symbols().to_vec();
        letters.extend_from_slice(d.remainder.symbols());
        let rebuilt = Word::from_symbols(berstel_alphabet(), letters).unwrap();
        assert_eq!(rebuilt, p);

        // not a prefix of the fixed point: parse failure with offset
        let junk = Word::parse(berstel_alphabet(), "a b b").unwrap();
        match berstel_block_decompose(&junk) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn conjugacy_identities_on_random_words() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let phi = ternary_morphism();
        let psi = gap_morphism();
        let q = doubling_conjugacy();
        let tau = tm_morphism();
        let fcheck = tm_return_blocks();
        for _ in 0..200 {
            let len = rng.gen_range(0..=64);
            let c: Vec<Symbol> = (0..len).map(|_| rng.gen_range(0..3)).collect();
            let c = Word::from_symbols(ternary_alphabet(), c).unwrap();
            let lhs = q.apply(&phi.apply(&c).unwrap()).unwrap();
            let rhs = psi.apply(&q.apply(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);

            let len = rng.gen_range(0..=64);
            let w: Vec<Symbol> = (0..len).map(|_| rng.gen_range(0..4)).collect();
            let w = Word::from_symbols(barred_alphabet(), w).unwrap();
            let lhs = tau.apply(&fcheck.apply(&w).unwrap()).unwrap();
            let rhs = fcheck.apply(&psi.apply(&w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sequence_names_roundtrip() {
        for name in SequenceName::CLI_NAMES {
            assert!(SequenceName::from_cli(name).is_some());
        }
        assert!(SequenceName::from_cli("nope").is_none());
        assert_eq!(prefix_of(SequenceName::Gaps01, 21).unwrap().to_string(), "334233243342433233423");
    }
}
