//! Gap sequences of factors of the Thue-Morse word.
//!
//! Every factor `w` of length at least two embeds, for a minimal order `k`,
//! in one or two of the four level-k blocks `t^k(x) t^k(y)` (`t` the
//! Thue-Morse substitution, `xy` a two-letter block). Which ones, and at
//! which offsets, completely determines the gap sequence of `w`:
//!
//! * one block of the `01`/`10` family: the gap word of that block scaled
//!   by `2^k`;
//! * one block of the `00`/`11` family: the gap word of the halved block
//!   scaled by `2^(k+1)`;
//! * two blocks: each letter of the four-letter preimage word contributes a
//!   fixed pair of gaps, read off [`GapTable`].
//!
//! The classification and the tables are verified against direct scans by
//! the test suite; the scan is always the oracle.

use crate::catalog;
use crate::error::{Error, Result};
use crate::words::{Symbol, Word};

/// The four two-letter blocks, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockTag {
    /// `00`
    ZeroZero,
    /// `01`
    ZeroOne,
    /// `10`
    OneZero,
    /// `11`
    OneOne,
}

impl BlockTag {
    /// All tags in display order.
    pub const ALL: [BlockTag; 4] =
        [BlockTag::ZeroZero, BlockTag::ZeroOne, BlockTag::OneZero, BlockTag::OneOne];

    /// The two letters of the block.
    pub fn letters(self) -> (Symbol, Symbol) {
        match self {
            BlockTag::ZeroZero => (0, 0),
            BlockTag::ZeroOne => (0, 1),
            BlockTag::OneZero => (1, 0),
            BlockTag::OneOne => (1, 1),
        }
    }

    /// Display form `00`, `01`, `10`, `11`.
    pub fn as_str(self) -> &'static str {
        match self {
            BlockTag::ZeroZero => "00",
            BlockTag::ZeroOne => "01",
            BlockTag::OneZero => "10",
            BlockTag::OneOne => "11",
        }
    }
}

/// `k`-th iterate of the Thue-Morse substitution on a letter (length `2^k`).
pub fn tm_power(x: Symbol, k: u32) -> Word {
    let tau = catalog::tm_morphism();
    let mut w = Word::from_symbols(catalog::binary_alphabet(), vec![x]).unwrap();
    for _ in 0..k {
        w = tau.apply(&w).unwrap();
    }
    w
}

/// The level-k block of a tag: `t^k(x) t^k(y)`, length `2^(k+1)`.
pub fn paired_block(tag: BlockTag, k: u32) -> Word {
    let (x, y) = tag.letters();
    let mut letters = tm_power(x, k).symbols().to_vec();
    letters.extend_from_slice(tm_power(y, k).symbols());
    Word::from_symbols(catalog::binary_alphabet(), letters).unwrap()
}

/// Classification of a factor: the minimal block order, the blocks it
/// embeds in, and the occurrence offsets inside them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapClass {
    /// The classified factor.
    pub factor: Word,
    /// Minimal order `k` such that the factor embeds in a level-k block.
    pub k: u32,
    /// Blocks containing the factor, in display order. Always a subset of
    /// `{01, 10}` or of `{00, 11}`.
    pub members: Vec<BlockTag>,
    /// Occurrence offset in the `01` block (alternating family) or in the
    /// `11` block (doubled family); for a single member, its offset.
    pub sigma0: usize,
    /// Offset in the `10` (resp. `00`) block, present only with two members.
    pub sigma1: Option<usize>,
}

impl GapClass {
    /// True when the members lie in the `{00, 11}` family.
    pub fn doubled_family(&self) -> bool {
        matches!(self.members[0], BlockTag::ZeroZero | BlockTag::OneOne)
    }
}

fn occurrences_in(haystack: &Word, needle: &Word) -> Vec<usize> {
    if needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len()).filter(|&i| haystack.matches_at(i, needle)).collect()
}

fn hits_at(w: &Word, k: u32) -> Vec<(BlockTag, Vec<usize>)> {
    BlockTag::ALL
        .iter()
        .map(|&tag| (tag, occurrences_in(&paired_block(tag, k), w)))
        .filter(|(_, occ)| !occ.is_empty())
        .collect()
}

fn class_from_hits(w: &Word, k: u32, hits: &[(BlockTag, Vec<usize>)]) -> Option<GapClass> {
    if hits.is_empty() || hits.iter().any(|(_, occ)| occ.len() != 1) {
        return None;
    }
    let members: Vec<BlockTag> = hits.iter().map(|(t, _)| *t).collect();
    let alternating =
        members.iter().all(|t| matches!(t, BlockTag::ZeroOne | BlockTag::OneZero));
    let doubled = members.iter().all(|t| matches!(t, BlockTag::ZeroZero | BlockTag::OneOne));
    if !(alternating || doubled) {
        return None;
    }
    let offset =
        |tag: BlockTag| hits.iter().find(|(t, _)| *t == tag).map(|(_, occ)| occ[0]);
    let (sigma0, sigma1) = if members.len() == 2 {
        if alternating {
            (offset(BlockTag::ZeroOne).unwrap(), offset(BlockTag::OneZero))
        } else {
            (offset(BlockTag::OneOne).unwrap(), offset(BlockTag::ZeroZero))
        }
    } else {
        (hits[0].1[0], None)
    };
    Some(GapClass { factor: w.clone(), k, members, sigma0, sigma1 })
}

/// Classifies a factor of the Thue-Morse word.
///
/// Length-1 factors are rejected (serve those with
/// [`crate::words::MorphicStream::gaps_by_scan`]); words that never occur
/// are reported as [`Error::NotAFactor`] after a bounded scan.
///
/// The order is the minimal one with one exception: a two-member class of
/// the `00`/`11` family whose occurrence starts flush at a window boundary
/// is reported one level up in its equivalent `01`/`10` form, where both
/// offsets are interior. Both descriptions generate the same gaps.
pub fn classify(w: &Word) -> Result<GapClass> {
    if w.len() < 2 {
        return Err(Error::UnsupportedLength { len: w.len() });
    }
    let tm = catalog::thue_morse();
    // bounded factor check, one horizon then one retry at the full budget
    let horizon = (4 * w.len()).next_power_of_two() * 16;
    if tm.occurrences(w, horizon.min(tm.budget()))?.is_empty()
        && tm.occurrences(w, tm.budget())?.is_empty()
    {
        return Err(Error::NotAFactor { factor: w.to_string() });
    }

    for k in 0.. {
        let block_len = 2usize << k;
        if block_len < w.len() {
            continue;
        }
        let hits = hits_at(w, k);
        if hits.is_empty() {
            // every factor embeds once the half-block reaches its length
            assert!(block_len < 2 * w.len(), "factor {w} missed all level-{k} blocks");
            continue;
        }
        let class = class_from_hits(w, k, &hits)
            .expect("at the minimal order, occurrences are unique and in one family");
        if class.members.len() == 2
            && class.doubled_family()
            && (class.sigma0 == 0 || class.sigma1 == Some(0))
        {
            if let Some(lifted) = class_from_hits(w, k + 1, &hits_at(w, k + 1)) {
                if lifted.members == vec![BlockTag::ZeroOne, BlockTag::OneZero] {
                    return Ok(lifted);
                }
            }
        }
        return Ok(class);
    }
    unreachable!("the classification loop always terminates")
}

/// The two gaps contributed by each letter of the four-letter preimage
/// word, for a two-member class. Rows follow the preimage alphabet order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapTable {
    /// `(first gap, second gap)` per preimage letter.
    pub per_letter: [(u64, u64); 4],
}

/// Gap table of a two-member class; `None` for single-member classes.
pub fn gap_table(class: &GapClass) -> Option<GapTable> {
    let sigma1 = class.sigma1? as i64;
    let sigma0 = class.sigma0 as i64;
    let d = sigma1 - sigma0;
    let unit = 1i64 << class.k;
    let (long, short) = if class.doubled_family() {
        (4 * unit, 2 * unit)
    } else {
        (2 * unit, unit)
    };
    let rows = [(long, short), (short, long), (long, long), (short, short)];
    let per_letter = rows.map(|(g1, g2)| {
        let a = d + g1;
        let b = -d + g2;
        assert!(a > 0 && b > 0, "offsets must differ by less than a block half");
        (a as u64, b as u64)
    });
    Some(GapTable { per_letter })
}

/// First `n` gaps of the classified factor, generated morphically.
pub fn gap_stream(class: &GapClass, n: usize) -> Result<Vec<u64>> {
    let scale = 1u64 << class.k;
    if class.members.len() == 1 {
        let (word, scale) = match class.members[0] {
            BlockTag::ZeroOne => (catalog::gaps01().prefix(n)?, scale),
            BlockTag::OneZero => (catalog::gaps10_prefix(n)?, scale),
            // blocks of equal letters live at doubled positions of the
            // alternating block one level down
            BlockTag::OneOne => (catalog::gaps01().prefix(n)?, 2 * scale),
            BlockTag::ZeroZero => (catalog::gaps10_prefix(n)?, 2 * scale),
        };
        return Ok(catalog::gap_values(&word).into_iter().map(|g| g * scale).collect());
    }
    let table = gap_table(class).expect("two members imply a gap table");
    let letters = catalog::gap_preimage().prefix(n / 2 + 1)?;
    let mut out = Vec::with_capacity(n + 1);
    for &s in letters.symbols() {
        let (g1, g2) = table.per_letter[s as usize];
        out.push(g1);
        out.push(g2);
        if out.len() > n {
            break;
        }
    }
    out.truncate(n);
    Ok(out)
}

/// Ascending positions at which the level-k block of `tag` occurs in the
/// Thue-Morse word, up to `horizon`. These are exactly the positions of the
/// two-letter block scaled by `2^k`.
pub fn block_positions(tag: BlockTag, k: u32, horizon: usize) -> Result<Vec<u64>> {
    let tm = catalog::thue_morse();
    let pair = Word::from_symbols(
        catalog::binary_alphabet(),
        vec![tag.letters().0, tag.letters().1],
    )
    .unwrap();
    let inner = horizon >> k;
    if inner < 2 {
        return Ok(Vec::new());
    }
    let occ = tm.occurrences(&pair, inner)?;
    Ok(occ.into_iter().map(|j| (j as u64) << k).collect())
}

/// Distinct factors of a given length occurring in the Thue-Morse prefix of
/// `horizon` letters, in order of first occurrence.
pub fn tm_factors(len: usize, horizon: usize) -> Result<Vec<Word>> {
    let tm = catalog::thue_morse();
    let prefix = tm.prefix(horizon)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for i in 0..=horizon.saturating_sub(len) {
        let fact = prefix.slice(i..i + len);
        if seen.insert(fact.symbols().to_vec()) {
            out.push(fact);
        }
    }
    Ok(out)
}

/// Scan-based gap oracle for a factor, used to cross-check [`gap_stream`].
pub fn gaps_by_scan(w: &Word, n: usize) -> Result<Vec<u64>> {
    let tm = catalog::thue_morse();
    tm.gaps_by_scan(w, n)
}

/// Convenience parser for factors given as `0`/`1` strings.
pub fn parse_factor(text: &str) -> Result<Word> {
    let w = Word::parse(catalog::binary_alphabet(), text)?;
    if w.is_empty() {
        return Err(Error::InvalidArgument("empty factor".into()));
    }
    Ok(w)
}
