//! Alphabets, finite words, morphisms, and fixed-point streams.
//!
//! A [`Word`] is a sequence of symbol indices over a shared [`Alphabet`];
//! symbol identity is the index, display names are only for rendering and
//! parsing. A [`Morphism`] maps every source symbol to a nonempty word over
//! the target alphabet. A [`MorphicStream`] is the lazily extended fixed
//! point of a morphism that is prolongable on its seed letter, optionally
//! composed with a length-1 coding on read.
//!
//! Streams are single-writer/multi-reader: buffer extension happens under a
//! write lock, committed prefixes are immutable, and all other types are
//! plain values.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// Symbols are alphabet indices. All alphabets in this crate are tiny.
pub type Symbol = u8;

/// Initial value of the global scan budget: the number of letters a stream
/// may be extended to by scanning operations before reporting
/// [`Error::BudgetExceeded`].
pub const DEFAULT_SCAN_BUDGET: usize = 1 << 22;

static SCAN_BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_SCAN_BUDGET);

/// Budget newly created streams start with.
pub fn default_scan_budget() -> usize {
    SCAN_BUDGET.load(Ordering::Relaxed)
}

/// Overrides the budget for subsequently created streams (the CLI wires
/// this to an environment variable). Existing streams are unaffected.
pub fn set_default_scan_budget(budget: usize) {
    SCAN_BUDGET.store(budget, Ordering::Relaxed);
}

/// An ordered finite alphabet with pairwise distinct, nonempty display names.
#[derive(Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from display names, checking the invariants.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        if names.is_empty() {
            return Err(Error::Construction("alphabet must be nonempty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Construction(format!("symbol {i} has an empty name")));
            }
            if names[..i].contains(n) {
                return Err(Error::Construction(format!("duplicate symbol name '{n}'")));
            }
        }
        Ok(Arc::new(Alphabet { names }))
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True for the degenerate one-letter alphabet; kept for clippy's sake.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Display name of a symbol.
    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    /// Looks a symbol up by display name.
    pub fn index_of(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| i as Symbol)
    }

    /// True when every display name is a single `char`, in which case words
    /// render without separators.
    pub fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    fn describe(&self) -> String {
        format!("{{{}}}", self.names.join(","))
    }
}

/// A finite word over a shared alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Symbol>,
}

impl Word {
    /// Wraps raw symbols, checking that each index is in range.
    pub fn from_symbols(alphabet: Arc<Alphabet>, letters: Vec<Symbol>) -> Result<Self> {
        let size = alphabet.len();
        if let Some(&bad) = letters.iter().find(|&&s| s as usize >= size) {
            return Err(Error::Construction(format!(
                "symbol index {bad} out of range for alphabet {}",
                alphabet.describe()
            )));
        }
        Ok(Word { alphabet, letters })
    }

    /// The empty word.
    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        Word { alphabet, letters: Vec::new() }
    }

    /// Parses a word from text. For single-char alphabets each `char` is one
    /// letter; otherwise the text is split on whitespace.
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        if alphabet.single_char() {
            for (offset, ch) in text.char_indices() {
                let s = ch.to_string();
                match alphabet.index_of(&s) {
                    Some(sym) => letters.push(sym),
                    None => {
                        return Err(Error::Parse {
                            offset,
                            message: format!("'{ch}' is not in alphabet {}", alphabet.describe()),
                        })
                    }
                }
            }
        } else {
            for (i, tok) in text.split_whitespace().enumerate() {
                match alphabet.index_of(tok) {
                    Some(sym) => letters.push(sym),
                    None => {
                        return Err(Error::Parse {
                            offset: i,
                            message: format!("'{tok}' is not in alphabet {}", alphabet.describe()),
                        })
                    }
                }
            }
        }
        Ok(Word { alphabet, letters })
    }

    /// The alphabet this word is over.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Underlying symbol slice.
    pub fn symbols(&self) -> &[Symbol] {
        &self.letters
    }

    /// Length in letters.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True when the word has no letters.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Copy of the subword `range.start..range.end`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word { alphabet: Arc::clone(&self.alphabet), letters: self.letters[range].to_vec() }
    }

    /// True when `other` occurs at position `at`.
    pub fn matches_at(&self, at: usize, other: &Word) -> bool {
        at + other.len() <= self.len() && self.letters[at..at + other.len()] == other.letters[..]
    }

    /// True when `prefix` is a prefix of this word.
    pub fn has_prefix(&self, prefix: &Word) -> bool {
        self.matches_at(0, prefix)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet.single_char() {
            for &s in &self.letters {
                f.write_str(self.alphabet.name(s))?;
            }
        } else {
            for (i, &s) in self.letters.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(self.alphabet.name(s))?;
            }
        }
        Ok(())
    }
}

/// A total map from source symbols to nonempty words over the target.
#[derive(Debug, Clone)]
pub struct Morphism {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    images: Vec<Word>,
}

impl Morphism {
    /// Builds a morphism, checking that every source symbol has a nonempty
    /// image over the target alphabet.
    pub fn new(source: Arc<Alphabet>, target: Arc<Alphabet>, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Construction(format!(
                "expected {} images, got {}",
                source.len(),
                images.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::Construction(format!(
                    "image of '{}' is empty; only nonerasing morphisms are supported",
                    source.name(i as Symbol)
                )));
            }
            if *img.alphabet() != target {
                return Err(Error::AlphabetMismatch {
                    expected: target.describe(),
                    got: img.alphabet().describe(),
                });
            }
        }
        Ok(Morphism { source, target, images })
    }

    /// Convenience constructor from textual images, in source-symbol order.
    pub fn from_images<S: AsRef<str>>(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        images: &[S],
    ) -> Result<Self> {
        let imgs = images
            .iter()
            .map(|s| Word::parse(Arc::clone(&target), s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(source, target, imgs)
    }

    /// Source alphabet.
    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    /// Target alphabet.
    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    /// Image of a single symbol.
    pub fn image(&self, s: Symbol) -> &Word {
        &self.images[s as usize]
    }

    /// True when every image has length one.
    pub fn is_coding(&self) -> bool {
        self.images.iter().all(|w| w.len() == 1)
    }

    /// Applies the morphism to a word by concatenating letter images.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if *w.alphabet() != self.source {
            return Err(Error::AlphabetMismatch {
                expected: self.source.describe(),
                got: w.alphabet().describe(),
            });
        }
        let total: usize = w.symbols().iter().map(|&s| self.images[s as usize].len()).sum();
        let mut letters = Vec::with_capacity(total);
        for &s in w.symbols() {
            letters.extend_from_slice(self.images[s as usize].symbols());
        }
        Ok(Word { alphabet: Arc::clone(&self.target), letters })
    }

    /// Composition `other . self` on symbols, when the alphabets line up.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        let images = (0..self.source.len())
            .map(|s| other.apply(&self.images[s]))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(Arc::clone(&self.source), Arc::clone(&other.target), images)
    }
}

struct StreamBuf {
    letters: Vec<Symbol>,
    /// Letters `0..expanded` have had their images appended; the buffer is
    /// exactly the image of its own first `expanded` letters.
    expanded: usize,
}

/// Lazily extended prefix of the fixed point of a morphism, with an optional
/// coding applied on read.
pub struct MorphicStream {
    morphism: Morphism,
    seed: Symbol,
    coding: Option<Morphism>,
    budget: usize,
    buf: RwLock<StreamBuf>,
}

impl MorphicStream {
    /// Creates the stream for the fixed point of `morphism` starting at
    /// `seed`. Fails unless the image of `seed` begins with `seed` and has
    /// length at least two (prolongability), which guarantees the fixed
    /// point exists and every extension step makes progress.
    pub fn new(morphism: Morphism, seed: Symbol) -> Result<Self> {
        if morphism.source != morphism.target {
            return Err(Error::Construction(
                "fixed points need a morphism with source = target".into(),
            ));
        }
        let img = morphism.image(seed);
        if img.len() < 2 || img.symbols()[0] != seed {
            return Err(Error::NotProlongable { seed: morphism.source.name(seed).to_owned() });
        }
        let letters = img.symbols().to_vec();
        Ok(MorphicStream {
            morphism,
            seed,
            coding: None,
            budget: default_scan_budget(),
            buf: RwLock::new(StreamBuf { letters, expanded: 1 }),
        })
    }

    /// Attaches a length-1 coding applied to every letter on read.
    pub fn with_coding(mut self, coding: Morphism) -> Result<Self> {
        if !coding.is_coding() {
            return Err(Error::Construction("stream codings must have length-1 images".into()));
        }
        if coding.source != self.morphism.source {
            return Err(Error::AlphabetMismatch {
                expected: self.morphism.source.describe(),
                got: coding.source.describe(),
            });
        }
        self.coding = Some(coding);
        Ok(self)
    }

    /// Overrides the scan budget.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// The configured scan budget.
    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The generating morphism.
    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    /// Seed letter of the fixed point.
    pub fn seed(&self) -> Symbol {
        self.seed
    }

    /// Alphabet of the letters produced on read (after the coding, if any).
    pub fn output_alphabet(&self) -> Arc<Alphabet> {
        match &self.coding {
            Some(c) => Arc::clone(&c.target),
            None => Arc::clone(&self.morphism.target),
        }
    }

    /// Parses a word over the stream's output alphabet.
    pub fn word_from_str(&self, text: &str) -> Result<Word> {
        Word::parse(self.output_alphabet(), text)
    }

    fn ensure_len(&self, n: usize) -> Result<()> {
        if self.buf.read().unwrap().letters.len() >= n {
            return Ok(());
        }
        if n > self.budget {
            return Err(Error::BudgetExceeded { needed: n, budget: self.budget });
        }
        let mut buf = self.buf.write().unwrap();
        while buf.letters.len() < n {
            let next = buf.letters[buf.expanded];
            let img = self.morphism.image(next);
            // skip the redundant re-copy of the seed image prefix
            buf.letters.extend_from_slice(img.symbols());
            buf.expanded += 1;
        }
        Ok(())
    }

    fn code(&self, s: Symbol) -> Symbol {
        match &self.coding {
            Some(c) => c.image(s).symbols()[0],
            None => s,
        }
    }

    /// First `n` letters of the coded fixed point. Idempotent: repeated
    /// calls agree on overlaps.
    pub fn prefix(&self, n: usize) -> Result<Word> {
        self.ensure_len(n)?;
        let buf = self.buf.read().unwrap();
        let letters: Vec<Symbol> = buf.letters[..n].iter().map(|&s| self.code(s)).collect();
        Ok(Word { alphabet: self.output_alphabet(), letters })
    }

    /// First `n` letters of the fixed point itself, ignoring the coding.
    pub fn prefix_raw(&self, n: usize) -> Result<Word> {
        self.ensure_len(n)?;
        let buf = self.buf.read().unwrap();
        Ok(Word {
            alphabet: Arc::clone(&self.morphism.target),
            letters: buf.letters[..n].to_vec(),
        })
    }

    /// Single coded letter, extending the buffer as needed.
    pub fn letter(&self, i: usize) -> Result<Symbol> {
        self.ensure_len(i + 1)?;
        Ok(self.code(self.buf.read().unwrap().letters[i]))
    }

    /// Random access far beyond the buffer (and the scan budget) by
    /// descending through the expansion tree of the morphism. Image lengths
    /// are tracked in saturating `u128`, so any position that fits in a
    /// `u128` is reachable without materializing the prefix.
    pub fn letter_at(&self, n: u128) -> Result<Symbol> {
        {
            let buf = self.buf.read().unwrap();
            if n < buf.letters.len() as u128 {
                return Ok(self.code(buf.letters[n as usize]));
            }
        }
        let m = &self.morphism;
        let k = m.source.len();
        // lens[d][x] = |m^d(x)|, saturating
        let mut lens: Vec<Vec<u128>> = vec![vec![1; k]];
        let depth_of = |lens: &Vec<Vec<u128>>| lens.len() - 1;
        while *lens.last().unwrap().get(self.seed as usize).unwrap() <= n {
            let last = lens.last().unwrap().clone();
            let next: Vec<u128> = (0..k)
                .map(|x| {
                    m.image(x as Symbol)
                        .symbols()
                        .iter()
                        .fold(0u128, |acc, &y| acc.saturating_add(last[y as usize]))
                })
                .collect();
            lens.push(next);
            if depth_of(&lens) > 4096 {
                return Err(Error::InvalidArgument(format!(
                    "position {n} unreachable: expansion does not grow"
                )));
            }
        }
        let mut depth = depth_of(&lens);
        let mut sym = self.seed;
        let mut rest = n;
        while depth > 0 {
            for &y in m.image(sym).symbols() {
                let l = lens[depth - 1][y as usize];
                if rest < l {
                    sym = y;
                    break;
                }
                rest -= l;
            }
            depth -= 1;
        }
        debug_assert_eq!(rest, 0);
        Ok(self.code(sym))
    }

    /// All start indices `i` with `i + |w| <= horizon` at which `w` occurs,
    /// in ascending order. The empty factor is rejected; a horizon shorter
    /// than the factor yields no occurrences.
    pub fn occurrences(&self, w: &Word, horizon: usize) -> Result<Vec<usize>> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("occurrences of the empty factor".into()));
        }
        if *w.alphabet() != self.output_alphabet() {
            return Err(Error::AlphabetMismatch {
                expected: self.output_alphabet().describe(),
                got: w.alphabet().describe(),
            });
        }
        if horizon < w.len() {
            return Ok(Vec::new());
        }
        let prefix = self.prefix(horizon)?;
        let hay = prefix.symbols();
        let needle = w.symbols();
        Ok((0..=horizon - needle.len()).filter(|&i| hay[i..i + needle.len()] == *needle).collect())
    }

    /// First `count` gaps between consecutive occurrences of `w`, extending
    /// the stream on demand up to its budget. Needing more of the stream
    /// than the budget allows is reported as [`Error::BudgetExceeded`],
    /// distinct from the factor simply never occurring within it.
    pub fn gaps_by_scan(&self, w: &Word, count: usize) -> Result<Vec<u64>> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("gaps of the empty factor".into()));
        }
        let mut horizon = (4 * w.len().max(16)).next_power_of_two();
        loop {
            horizon = horizon.min(self.budget);
            let occ = self.occurrences(w, horizon)?;
            if occ.len() >= count + 1 {
                return Ok(occ.windows(2).take(count).map(|p| (p[1] - p[0]) as u64).collect());
            }
            if horizon == self.budget {
                if occ.is_empty() && self.occurrences(w, self.budget)?.is_empty() {
                    return Err(Error::NotAFactor { factor: w.to_string() });
                }
                return Err(Error::BudgetExceeded {
                    needed: self.budget + 1,
                    budget: self.budget,
                });
            }
            horizon *= 2;
        }
    }
}

impl fmt::Debug for MorphicStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let buf = self.buf.read().unwrap();
        f.debug_struct("MorphicStream")
            .field("seed", &self.morphism.source.name(self.seed))
            .field("buffered", &buf.letters.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn alphabet_invariants() {
        assert!(Alphabet::new(&["a", "b", "a"]).is_err());
        assert!(Alphabet::new(&["a", ""]).is_err());
        assert!(Alphabet::new::<&str>(&[]).is_err());
    }

    #[test]
    fn apply_concatenates_images() {
        let tau = catalog::tm_morphism();
        let w = Word::parse(Arc::clone(tau.source()), "01").unwrap();
        assert_eq!(tau.apply(&w).unwrap().to_string(), "0110");

        let phi = catalog::ternary_morphism();
        let w = Word::parse(Arc::clone(phi.source()), "abc").unwrap();
        assert_eq!(phi.apply(&w).unwrap().to_string(), "abcacb");

        let empty = Word::empty(Arc::clone(phi.source()));
        assert!(phi.apply(&empty).unwrap().is_empty());
    }

    #[test]
    fn apply_rejects_foreign_words() {
        let tau = catalog::tm_morphism();
        let phi = catalog::ternary_morphism();
        let w = Word::parse(Arc::clone(phi.source()), "ab").unwrap();
        assert!(matches!(tau.apply(&w), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn tm_prefix_32() {
        let tm = catalog::thue_morse();
        assert_eq!(tm.prefix(32).unwrap().to_string(), "01101001100101101001011001101001");
        assert!(tm.prefix(0).unwrap().is_empty());
    }

    #[test]
    fn bbar_prefix_16() {
        let bbar = catalog::gap_preimage();
        assert_eq!(bbar.prefix(16).unwrap().to_string(), "aābcaācbaābcbaāc");
    }

    #[test]
    fn prefix_is_idempotent() {
        let tm = catalog::thue_morse();
        let long = tm.prefix(512).unwrap();
        let short = tm.prefix(100).unwrap();
        assert!(long.has_prefix(&short));
    }

    #[test]
    fn fixed_point_property() {
        // applying the morphism to a prefix reproduces the prefix
        for s in [
            catalog::thue_morse(),
            catalog::ternary_tm(),
            catalog::gap_preimage(),
            catalog::berstel_word(),
        ] {
            let n = 1 << 14;
            let raw = s.prefix_raw(n).unwrap();
            let applied = s.morphism().apply(&raw).unwrap();
            assert!(applied.has_prefix(&raw));
        }
    }

    #[test]
    fn occurrences_of_01() {
        let tm = catalog::thue_morse();
        let w = tm.word_from_str("01").unwrap();
        assert_eq!(tm.occurrences(&w, 16).unwrap(), vec![0, 3, 6, 10, 12]);

        let whole = tm.prefix(16).unwrap();
        assert_eq!(tm.occurrences(&whole, 16).unwrap(), vec![0]);

        let w010 = tm.word_from_str("010").unwrap();
        assert_eq!(tm.occurrences(&w010, 32).unwrap(), vec![3, 10, 15, 18, 27]);
    }

    #[test]
    fn occurrences_monotone_in_horizon() {
        let tm = catalog::thue_morse();
        let w = tm.word_from_str("10").unwrap();
        let small = tm.occurrences(&w, 64).unwrap();
        let large = tm.occurrences(&w, 256).unwrap();
        assert_eq!(&large[..small.len()], &small[..]);
        assert!(small.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn gaps_by_scan_examples() {
        let tm = catalog::thue_morse();
        let w01 = tm.word_from_str("01").unwrap();
        let gaps = tm.gaps_by_scan(&w01, 21).unwrap();
        let expected: Vec<u64> =
            "334233243342433233423".chars().map(|c| c.to_digit(10).unwrap() as u64).collect();
        assert_eq!(gaps, expected);

        let w0 = tm.word_from_str("0").unwrap();
        assert_eq!(tm.gaps_by_scan(&w0, 3).unwrap(), vec![3, 2, 1]);

        // gaps of "11" double the gaps of "10" read in the complemented word,
        // i.e. equal 2B with the roles of the letters swapped; the scan is
        // the oracle here
        let w11 = tm.word_from_str("11").unwrap();
        assert_eq!(tm.gaps_by_scan(&w11, 5).unwrap(), vec![6, 6, 8, 4, 6]);
    }

    #[test]
    fn gap_occurrence_duality() {
        let tm = catalog::thue_morse();
        let w = tm.word_from_str("0110").unwrap();
        let occ = tm.occurrences(&w, 4096).unwrap();
        let gaps = tm.gaps_by_scan(&w, 40).unwrap();
        for (k, g) in gaps.iter().enumerate() {
            assert_eq!(occ[k + 1] - occ[k], *g as usize);
        }
    }

    #[test]
    fn budget_is_reported() {
        let tm = catalog::thue_morse_with_budget(64);
        assert!(matches!(tm.prefix(65), Err(Error::BudgetExceeded { .. })));
        let w = tm.word_from_str("01").unwrap();
        // 64 letters cannot contain 100 gaps
        assert!(matches!(tm.gaps_by_scan(&w, 100), Err(Error::BudgetExceeded { .. })));
        // a non-factor is reported distinctly
        let w = tm.word_from_str("000").unwrap();
        assert!(matches!(tm.gaps_by_scan(&w, 1), Err(Error::NotAFactor { .. })));
    }

    #[test]
    fn letter_at_agrees_with_prefix() {
        for s in [catalog::thue_morse(), catalog::gap_preimage(), catalog::gaps01()] {
            let p = s.prefix(2000).unwrap();
            for i in (0..2000).step_by(97) {
                assert_eq!(s.letter_at(i as u128).unwrap(), p.symbols()[i]);
            }
        }
    }

    #[test]
    fn letter_at_beyond_budget() {
        let tm = catalog::thue_morse_with_budget(64);
        // Thue-Morse letter = parity of ones in the binary expansion
        let n: u128 = 1 << 40;
        assert_eq!(tm.letter_at(n).unwrap(), 1);
        assert_eq!(tm.letter_at(n + 1).unwrap(), 0);
    }

    #[test]
    fn non_prolongable_seed_is_rejected() {
        let ab = Alphabet::new(&["a", "b"]).unwrap();
        let m = Morphism::from_images(Arc::clone(&ab), Arc::clone(&ab), &["ba", "ab"]).unwrap();
        assert!(matches!(MorphicStream::new(m, 0), Err(Error::NotProlongable { .. })));
    }
}
