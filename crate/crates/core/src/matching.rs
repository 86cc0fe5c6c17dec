//! The decorated seven-letter word, non-crossing matchings, and degrees.
//!
//! The ternary Thue-Morse word lifts to a word over the seven-letter
//! alphabet `a, b̂<, b̂>, b<, b>, c<, c>` in which every letter of type `b`
//! or `c` carries a connector pointing left or right. [`find_matching`]
//! links matching free connectors, shortest spans first; on *closed* words
//! its output is the unique non-crossing matching. [`rotate_along_links`]
//! moves each `b`-type letter along its link, which reduces the underlying
//! ternary word to the periodic word `abcabc...`. The number of links of
//! each direction passing over a position is its degree, the quantity the
//! weighted transducers in [`crate::transducer`] compute from base-4 digits.
//!
//! The canonical order of the alphabet (`a` first, then the hatted letters,
//! then plain `b`, then `c`, left before right) is fixed here and reused by
//! the transducer matrices; do not reorder.

use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;

use crate::catalog::ternary_alphabet;
use crate::error::{Error, Result};
use crate::words::{Alphabet, MorphicStream, Morphism, Symbol, Word};

/// Connector direction on a decorated letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connector {
    /// Points to smaller indices.
    Left,
    /// Points to larger indices.
    Right,
}

/// Base type of a decorated letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseType {
    /// The undecorated letter `a`.
    A,
    /// The auxiliary hatted `b`.
    BHat,
    /// The plain `b`.
    B,
    /// The letter `c`.
    C,
}

/// The seven decorated letters, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum DecoratedSymbol {
    /// `a` — no connector.
    A = 0,
    /// `b̂` with a left connector.
    BHatLeft = 1,
    /// `b̂` with a right connector.
    BHatRight = 2,
    /// `b` with a left connector.
    BLeft = 3,
    /// `b` with a right connector.
    BRight = 4,
    /// `c` with a left connector.
    CLeft = 5,
    /// `c` with a right connector.
    CRight = 6,
}

use DecoratedSymbol::*;

/// All seven letters in canonical order.
pub const ALL_DECORATED: [DecoratedSymbol; 7] =
    [A, BHatLeft, BHatRight, BLeft, BRight, CLeft, CRight];

impl DecoratedSymbol {
    /// Canonical index, 0..7.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Letter at a canonical index.
    pub fn from_index(i: usize) -> Option<Self> {
        ALL_DECORATED.get(i).copied()
    }

    /// Base type with the decoration stripped.
    pub fn base(self) -> BaseType {
        match self {
            A => BaseType::A,
            BHatLeft | BHatRight => BaseType::BHat,
            BLeft | BRight => BaseType::B,
            CLeft | CRight => BaseType::C,
        }
    }

    /// Connector direction; only `a` has none.
    pub fn connector(self) -> Option<Connector> {
        match self {
            A => None,
            BHatLeft | BLeft | CLeft => Some(Connector::Left),
            BHatRight | BRight | CRight => Some(Connector::Right),
        }
    }

    /// ASCII rendering: `a`, `bh<`, `bh>`, `b<`, `b>`, `c<`, `c>`.
    pub fn ascii(self) -> &'static str {
        ASCII_NAMES[self.index()]
    }

    /// Inverse of [`DecoratedSymbol::ascii`].
    pub fn parse_ascii(s: &str) -> Option<Self> {
        ASCII_NAMES.iter().position(|&n| n == s).and_then(Self::from_index)
    }
}

impl fmt::Display for DecoratedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

const ASCII_NAMES: [&str; 7] = ["a", "bh<", "bh>", "b<", "b>", "c<", "c>"];

static DECORATED: Lazy<Arc<Alphabet>> = Lazy::new(|| Alphabet::new(&ASCII_NAMES).unwrap());

/// The seven-letter alphabet in canonical order, with ASCII names.
pub fn decorated_alphabet() -> Arc<Alphabet> {
    Arc::clone(&DECORATED)
}

/// Images of the decorated substitution, in canonical letter order.
const PHI_PLUS: [[DecoratedSymbol; 4]; 7] = [
    [A, BRight, CLeft, A],          // a
    [A, BLeft, CRight, BHatLeft],   // bh<
    [A, BRight, CLeft, BHatRight],  // bh>
    [CRight, BHatLeft, A, BLeft],   // b<
    [CRight, BHatLeft, A, BRight],  // b>
    [CLeft, BHatRight, A, CLeft],   // c<
    [CRight, BHatLeft, A, CRight],  // c>
];

/// Image of one decorated letter under the substitution.
pub fn phi_plus_image(s: DecoratedSymbol) -> [DecoratedSymbol; 4] {
    PHI_PLUS[s.index()]
}

/// The decorated substitution as a [`Morphism`] over the ASCII alphabet.
pub fn phi_plus() -> Morphism {
    let alphabet = decorated_alphabet();
    let images = PHI_PLUS
        .iter()
        .map(|img| {
            Word::from_symbols(
                Arc::clone(&alphabet),
                img.iter().map(|&d| d.index() as Symbol).collect(),
            )
            .unwrap()
        })
        .collect();
    Morphism::new(Arc::clone(&alphabet), alphabet, images).unwrap()
}

/// The decorated word: fixed point of the substitution starting at `a`.
pub fn decorated_word() -> MorphicStream {
    MorphicStream::new(phi_plus(), 0).unwrap()
}

/// `k`-th iterate of the substitution on `a`, as raw letters (length `4^k`).
pub fn phi_plus_iterate(k: u32) -> Vec<DecoratedSymbol> {
    let mut w = vec![A];
    for _ in 0..k {
        let mut next = Vec::with_capacity(w.len() * 4);
        for &s in &w {
            next.extend_from_slice(&PHI_PLUS[s.index()]);
        }
        w = next;
    }
    w
}

/// Coding erasing decorations and merging the hatted letter into `b`.
pub fn gamma(w: &[DecoratedSymbol]) -> Word {
    let letters = w
        .iter()
        .map(|s| match s.base() {
            BaseType::A => 0,
            BaseType::B | BaseType::BHat => 1,
            BaseType::C => 2,
        })
        .collect();
    Word::from_symbols(ternary_alphabet(), letters).unwrap()
}

/// View of a decorated letter sequence as a [`Word`] over the ASCII alphabet.
pub fn to_word(w: &[DecoratedSymbol]) -> Word {
    Word::from_symbols(decorated_alphabet(), w.iter().map(|s| s.index() as Symbol).collect())
        .unwrap()
}

/// Decodes a [`Word`] over the decorated alphabet.
pub fn from_word(w: &Word) -> Result<Vec<DecoratedSymbol>> {
    if *w.alphabet() != decorated_alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: "decorated 7-letter alphabet".into(),
            got: format!("{:?}", w.alphabet()),
        });
    }
    Ok(w.symbols().iter().map(|&s| DecoratedSymbol::from_index(s as usize).unwrap()).collect())
}

/// A link between two connector positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    /// Left endpoint.
    pub i: usize,
    /// Right endpoint.
    pub j: usize,
}

impl Link {
    /// `j - i`, the processing key of rotations.
    pub fn span(&self) -> usize {
        self.j - self.i
    }
}

/// A set of links over a decorated word, stored in nondecreasing span order
/// (ties by left endpoint), the order in which rotations process them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    links: Vec<Link>,
}

impl Matching {
    /// Builds a matching from raw pairs; the pairs are re-sorted into
    /// processing order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut links: Vec<Link> = pairs.into_iter().map(|(i, j)| Link { i, j }).collect();
        links.sort_by_key(|l| (l.j.wrapping_sub(l.i), l.i));
        Matching { links }
    }

    /// The links in processing order.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Number of links.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// True when there are no links.
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// True when every link of `self` also occurs in `other`.
    pub fn subset_of(&self, other: &Matching) -> bool {
        let mut sorted: Vec<Link> = other.links.clone();
        sorted.sort_by_key(|l| (l.i, l.j));
        self.links.iter().all(|l| sorted.binary_search_by_key(&(l.i, l.j), |o| (o.i, o.j)).is_ok())
    }

    /// Link dump in the CLI wire format: one line `i j dir` per link, where
    /// `dir` is `R` when the left endpoint is `c>` and `L` when the right
    /// endpoint is `c<`.
    pub fn dump_lines(&self, w: &[DecoratedSymbol]) -> Vec<String> {
        self.links
            .iter()
            .map(|l| {
                let dir = if w[l.i] == CRight { 'R' } else { 'L' };
                format!("{} {} {}", l.i, l.j, dir)
            })
            .collect()
    }
}

/// Links free matching connectors, shortest connections first.
///
/// For spans `n = 1, 2, ...` and left endpoints in ascending order, the pair
/// `(i, i+n)` is linked whenever the connector at `i` points right, the one
/// at `i+n` points left, and neither index has been used. Partial matchings
/// are legal outputs for words that are not closed.
pub fn find_matching(w: &[DecoratedSymbol]) -> Matching {
    let n = w.len();
    let mut used = vec![false; n];
    let mut rights: Vec<usize> =
        (0..n).filter(|&i| w[i].connector() == Some(Connector::Right)).collect();
    let is_free_left = |used: &[bool], j: usize| {
        j < n && !used[j] && w[j].connector() == Some(Connector::Left)
    };
    let mut links = Vec::new();
    for span in 1..n {
        if rights.is_empty() {
            break;
        }
        let mut linked = false;
        for idx in 0..rights.len() {
            let i = rights[idx];
            if used[i] {
                continue;
            }
            let j = i + span;
            if is_free_left(&used, j) {
                used[i] = true;
                used[j] = true;
                links.push(Link { i, j });
                linked = true;
            }
        }
        if linked {
            rights.retain(|&i| !used[i]);
        }
    }
    Matching { links }
}

/// Which clause of the non-crossing matching definition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// A link endpoint is outside the word.
    Range,
    /// A link has `i >= j`.
    IndexOrder,
    /// The letters at the link ends are not a right/left connector pair of
    /// types `b`/`c`.
    LetterPair,
    /// An index not covered by any link carries a letter other than `a`.
    UncoveredNonA,
    /// Two links cross or share an endpoint.
    Crossing,
}

/// First violated clause of a candidate matching, with offending indices.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("clause {clause:?} violated at indices {indices:?}")]
pub struct MatchingViolation {
    /// Which clause failed.
    pub clause: Clause,
    /// Indices witnessing the failure.
    pub indices: Vec<usize>,
}

/// Checks the four clauses of the non-crossing matching definition, in
/// order, reporting the first violation.
pub fn validate_matching(w: &[DecoratedSymbol], m: &Matching) -> Result<()> {
    let fail = |clause, indices: Vec<usize>| {
        Err(Error::InvalidMatching(MatchingViolation { clause, indices }))
    };
    let n = w.len();
    for l in &m.links {
        if l.i >= n || l.j >= n {
            return fail(Clause::Range, vec![l.i, l.j]);
        }
    }
    for l in &m.links {
        if l.i >= l.j {
            return fail(Clause::IndexOrder, vec![l.i, l.j]);
        }
    }
    for l in &m.links {
        let ok = matches!(
            (w[l.i], w[l.j]),
            (BRight, CLeft) | (BHatRight, CLeft) | (CRight, BLeft) | (CRight, BHatLeft)
        );
        if !ok {
            return fail(Clause::LetterPair, vec![l.i, l.j]);
        }
    }
    let mut covered = vec![false; n];
    for l in &m.links {
        covered[l.i] = true;
        covered[l.j] = true;
    }
    for i in 0..n {
        if !covered[i] && w[i] != A {
            return fail(Clause::UncoveredNonA, vec![i]);
        }
    }
    // crossing check: sweep with a stack of open right endpoints
    let mut by_left: Vec<Link> = m.links.clone();
    by_left.sort_by_key(|l| (l.i, l.j));
    by_left.dedup();
    for pair in by_left.windows(2) {
        // shared endpoints are neither nested, disjoint, nor equal
        if pair[0].i == pair[1].i {
            return fail(Clause::Crossing, vec![pair[0].i, pair[0].j, pair[1].j]);
        }
    }
    let mut open: Vec<Link> = Vec::new();
    for &l in &by_left {
        while let Some(top) = open.last() {
            if top.j < l.i {
                open.pop();
            } else {
                break;
            }
        }
        if let Some(top) = open.last() {
            // top.i < l.i <= top.j; nesting needs l.j < top.j strictly
            if l.j >= top.j {
                return fail(Clause::Crossing, vec![top.i, top.j, l.i, l.j]);
            }
        }
        open.push(l);
    }
    Ok(())
}

/// Transforms a closed word by rotating along each link, nondecreasing spans
/// first. A link starting at `c>` rotates `w[i..=j]` one step right; a link
/// ending at `c<` rotates `w[i..j]` one step left. The matching is
/// (re)validated before anything moves.
pub fn rotate_along_links(w: &[DecoratedSymbol], m: &Matching) -> Result<Vec<DecoratedSymbol>> {
    validate_matching(w, m)?;
    let mut out = w.to_vec();
    // nested shorter links only permute strictly inside longer ones, so the
    // endpoints still hold their original letters when a link is processed
    for l in &m.links {
        if out[l.i] == CRight {
            out[l.i..=l.j].rotate_right(1);
        } else {
            debug_assert_eq!(out[l.j], CLeft);
            out[l.i..l.j].rotate_left(1);
        }
    }
    Ok(out)
}

/// The rotation result computed without rotating: apply the coding, drop all
/// `b`s, and reinsert one `b` before each `c`.
pub fn rotate_shortcut(w: &[DecoratedSymbol]) -> Word {
    let mut letters = Vec::with_capacity(w.len());
    for s in w {
        match s.base() {
            BaseType::A => letters.push(0),
            BaseType::B | BaseType::BHat => {}
            BaseType::C => {
                letters.push(1);
                letters.push(2);
            }
        }
    }
    Word::from_symbols(ternary_alphabet(), letters).unwrap()
}

/// Signed and unsigned link counts over a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degree {
    /// Links `(k,l)` with `k < j < l` starting at `c>`.
    pub plus: usize,
    /// Links `(k,l)` with `k < j < l` ending at `c<`.
    pub minus: usize,
}

impl Degree {
    /// `plus - minus`.
    pub fn net(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }
}

/// Degree of position `j` inside a given word and matching.
pub fn degree_in(w: &[DecoratedSymbol], m: &Matching, j: usize) -> Degree {
    let mut plus = 0;
    let mut minus = 0;
    for l in m.links() {
        if l.i < j && j < l.j {
            if w[l.i] == CRight {
                plus += 1;
            } else {
                minus += 1;
            }
        }
    }
    Degree { plus, minus }
}

fn closed_prefix_order(j: usize) -> u32 {
    // smallest k with 4^k > 4(j+1); links over j then lie inside the prefix
    let mut k = 0;
    let mut len: u128 = 1;
    while len <= 4 * (j as u128 + 1) {
        len *= 4;
        k += 1;
    }
    k
}

/// Degree of position `j` in the infinite decorated word, computed on a
/// closed prefix large enough to contain every link over `j`.
pub fn degree(j: usize) -> Degree {
    let w = phi_plus_iterate(closed_prefix_order(j));
    let m = find_matching(&w);
    degree_in(&w, &m, j)
}

/// Net degrees of positions `0..n`, via one matching on a closed prefix.
pub fn degrees_up_to(n: usize) -> Vec<i64> {
    if n == 0 {
        return Vec::new();
    }
    let w = phi_plus_iterate(closed_prefix_order(n - 1));
    let m = find_matching(&w);
    let mut delta = vec![0i64; w.len() + 1];
    for l in m.links() {
        let sign = if w[l.i] == CRight { 1 } else { -1 };
        delta[l.i + 1] += sign;
        delta[l.j] -= sign;
    }
    let mut acc = 0;
    let mut out = Vec::with_capacity(n);
    for d in delta.into_iter().take(n) {
        acc += d;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use rand::{Rng, SeedableRng};

    #[test]
    fn decorated_word_projects_to_ternary() {
        let w = phi_plus_iterate(6);
        assert_eq!(gamma(&w), catalog::ternary_tm().prefix(w.len()).unwrap());
        assert!(gamma(&[]).is_empty());
        assert_eq!(to_word(&phi_plus_iterate(1)).to_string(), "a b> c< a");
    }

    #[test]
    fn stream_matches_iterates() {
        let s = decorated_word();
        let p = s.prefix(256).unwrap();
        assert_eq!(from_word(&p).unwrap(), phi_plus_iterate(4)[..256].to_vec());
    }

    #[test]
    fn local_structure() {
        let w = phi_plus_iterate(6);
        for j in 1..w.len() - 1 {
            let (x, y, z) = (w[j - 1], w[j], w[j + 1]);
            match y {
                BHatLeft => assert_eq!((x, z), (CRight, A)),
                BHatRight => assert_eq!((x, z), (CLeft, A)),
                BLeft => assert_eq!((x, z), (A, CRight)),
                BRight => assert_eq!((x, z), (A, CLeft)),
                _ => {}
            }
        }
    }

    #[test]
    fn trivial_matchings() {
        assert!(find_matching(&[A]).is_empty());
        assert!(find_matching(&[]).is_empty());
    }

    #[test]
    fn matching_on_closed_prefixes_is_total_and_valid() {
        for k in 0..=6 {
            let w = phi_plus_iterate(k);
            let m = find_matching(&w);
            validate_matching(&w, &m).unwrap();
            // bipartite b <-> c, perfect on the non-a letters
            let mut covered = vec![false; w.len()];
            for l in m.links() {
                let bases = (w[l.i].base(), w[l.j].base());
                assert!(matches!(
                    bases,
                    (BaseType::B | BaseType::BHat, BaseType::C)
                        | (BaseType::C, BaseType::B | BaseType::BHat)
                ));
                covered[l.i] = true;
                covered[l.j] = true;
            }
            for (i, &c) in covered.iter().enumerate() {
                assert_eq!(!c, w[i] == A, "index {i} in depth-{k} prefix");
            }
        }
    }

    #[test]
    fn drawn_links_at_depth_three() {
        // links among the first 48 letters, as drawn: note the long (39,44)
        let w = phi_plus_iterate(3);
        let m = find_matching(&w);
        let drawn = [
            (1, 2),
            (4, 5),
            (7, 8),
            (9, 11),
            (13, 14),
            (16, 17),
            (19, 21),
            (22, 23),
            (25, 26),
            (28, 29),
            (31, 32),
            (33, 35),
            (37, 38),
            (39, 44),
            (41, 42),
            (45, 47),
        ];
        assert!(Matching::from_pairs(drawn).subset_of(&m));
    }

    #[test]
    fn matching_is_monotone_under_extension() {
        let w = phi_plus_iterate(5);
        let full = find_matching(&w);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..24 {
            let cut = rng.gen_range(0..=w.len());
            let ext = rng.gen_range(cut..=w.len());
            let m1 = find_matching(&w[..cut]);
            let m2 = find_matching(&w[..ext]);
            assert!(m1.subset_of(&m2));
            assert!(m2.subset_of(&full));
        }
    }

    #[test]
    fn validation_reports_first_violation() {
        // b> b> c< c< with crossing links
        let w = [BRight, BRight, CLeft, CLeft];
        let m = Matching::from_pairs([(0, 2), (1, 3)]);
        match validate_matching(&w, &m) {
            Err(Error::InvalidMatching(v)) => assert_eq!(v.clause, Clause::Crossing),
            other => panic!("expected crossing violation, got {other:?}"),
        }

        // dropping one link on a closed word leaves a non-a letter uncovered
        let w = phi_plus_iterate(2);
        let full = find_matching(&w);
        let partial = Matching::from_pairs(
            full.links().iter().skip(1).map(|l| (l.i, l.j)).collect::<Vec<_>>(),
        );
        match validate_matching(&w, &partial) {
            Err(Error::InvalidMatching(v)) => assert_eq!(v.clause, Clause::UncoveredNonA),
            other => panic!("expected uncovered violation, got {other:?}"),
        }

        // wrong letter pair
        let w = [BRight, BRight, CLeft, CLeft];
        let m = Matching::from_pairs([(0, 1)]);
        match validate_matching(&w, &m) {
            Err(Error::InvalidMatching(v)) => assert_eq!(v.clause, Clause::LetterPair),
            other => panic!("expected letter-pair violation, got {other:?}"),
        }
    }

    #[test]
    fn rotation_yields_periodic_word() {
        for k in 0..=6 {
            let w = phi_plus_iterate(k);
            let m = find_matching(&w);
            let rotated = rotate_along_links(&w, &m).unwrap();
            let coded = gamma(&rotated);
            let abc: Vec<Symbol> = (0..w.len()).map(|i| (i % 3) as Symbol).collect();
            assert_eq!(coded.symbols(), &abc[..], "depth {k}");
            assert_eq!(rotate_shortcut(&w), coded, "shortcut at depth {k}");
        }
    }

    #[test]
    fn rotation_without_links_is_identity() {
        let w = [A, A, A];
        let rotated = rotate_along_links(&w, &Matching::default()).unwrap();
        assert_eq!(rotated, w);
    }

    #[test]
    fn rotation_is_order_independent_on_span_ties() {
        let w = phi_plus_iterate(5);
        let m = find_matching(&w);
        let forward = rotate_along_links(&w, &m).unwrap();

        // same spans processed with ties in reverse left-endpoint order
        let mut links: Vec<Link> = m.links().to_vec();
        links.sort_by(|a, b| a.span().cmp(&b.span()).then(b.i.cmp(&a.i)));
        let mut out = w.clone();
        for l in &links {
            if out[l.i] == CRight {
                out[l.i..=l.j].rotate_right(1);
            } else {
                out[l.i..l.j].rotate_left(1);
            }
        }
        assert_eq!(out, forward);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree(0).net(), 0);
        assert_eq!(degree(10).net(), -1);
        assert_eq!(degree(170).net(), -2);

        let expected: [i64; 48] = [
            0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
            0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, -1, -1, -1, -1, 0, 0, -1, 0,
        ];
        assert_eq!(degrees_up_to(48), expected);
    }

    #[test]
    fn degree_at_two_runs() {
        // position with base-4 digits 2 repeated 2k times has degree -k
        for k in 1..=5u32 {
            let j = 2 * (4u64.pow(2 * k) - 1) / 3;
            assert_eq!(degree(j as usize).net(), -(k as i64), "k={k}");
        }
    }
}
