//! Exact thirds, weighted base-k transducers, and the discrepancy of `01`.
//!
//! The discrepancy after `N` letters is the number of `01` blocks among the
//! first `N` positions of the Thue-Morse word minus `N/3`; it always lies in
//! (1/3)Z and is represented exactly by [`Third`]. This module computes it
//! by three independent routes and the test suite holds them against each
//! other:
//!
//! 1. [`discrepancy_brute`]: count occurrences directly.
//! 2. [`discrepancy_by_degree`]: read the base-4 digits of `N/4` through the
//!    seven-state degree transducer, then apply the per-letter correction
//!    tables.
//! 3. [`discrepancy_transducer`]: a single 196-state base-4 output-sum
//!    transducer whose path weight at `N` *is* the discrepancy; its
//!    [`base2_reduction`] gives the same values from binary digits.
//!
//! # Weight units
//!
//! The edge labels of the degree transducer are the integers `-1, 0, 1` and
//! sum along the digit path of `j` to exactly `deg(j)` (checked against the
//! matching-based degree for all `j < 4^6`). The blown-up discrepancy
//! transducer carries those same labels divided by 3, so that path sums land
//! directly on the discrepancy; the worked value `D(41) = 1/3` pins the
//! convention.

use std::collections::VecDeque;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::catalog;
use crate::error::{Error, Result};
use crate::matching::{phi_plus_image, DecoratedSymbol};

/// An exact multiple of one third, stored as three times its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Third(i64);

impl Third {
    /// Zero.
    pub const ZERO: Third = Third(0);

    /// The value `n/3`.
    pub fn thirds(n: i64) -> Third {
        Third(n)
    }

    /// The integer `n`.
    pub fn from_integer(n: i64) -> Third {
        Third(3 * n)
    }

    /// Three times the value, always an integer.
    pub fn as_thirds(self) -> i64 {
        self.0
    }

    /// The value as an integer, when it is one.
    pub fn as_integer(self) -> Option<i64> {
        (self.0 % 3 == 0).then_some(self.0 / 3)
    }

    /// Absolute value.
    pub fn abs(self) -> Third {
        Third(self.0.abs())
    }
}

impl Add for Third {
    type Output = Third;
    fn add(self, rhs: Third) -> Third {
        Third(self.0 + rhs.0)
    }
}

impl AddAssign for Third {
    fn add_assign(&mut self, rhs: Third) {
        self.0 += rhs.0;
    }
}

impl Sub for Third {
    type Output = Third;
    fn sub(self, rhs: Third) -> Third {
        Third(self.0 - rhs.0)
    }
}

impl Neg for Third {
    type Output = Third;
    fn neg(self) -> Third {
        Third(-self.0)
    }
}

impl Sum for Third {
    fn sum<I: Iterator<Item = Third>>(iter: I) -> Third {
        Third(iter.map(|t| t.0).sum())
    }
}

impl fmt::Display for Third {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 3 == 0 {
            write!(f, "{}", self.0 / 3)
        } else {
            write!(f, "{}/3", self.0)
        }
    }
}

/// A deterministic base-k transducer with [`Third`]-valued edge outputs.
///
/// The value at `n` is the sum of edge weights along the path driven by the
/// base-k digits of `n`, most significant digit first. Reading zeros from
/// the start state must return to it at weight zero in `digit_group` steps;
/// this is checked at construction and makes leading zeros (including the
/// padding inserted when `digit_group > 1`) weight-neutral.
pub struct WeightedTransducer {
    base: u32,
    states: Vec<String>,
    start: usize,
    /// `edges[s * base + d]` is the `(target, weight)` on digit `d` at `s`.
    edges: Vec<(usize, Third)>,
    /// Expansions are left-padded with zeros to a multiple of this length;
    /// 1 except for machines built by [`base2_reduction`].
    digit_group: u32,
}

impl WeightedTransducer {
    /// Builds a transducer and checks totality plus the start zero-loop.
    pub fn new(
        base: u32,
        states: Vec<String>,
        start: usize,
        edges: Vec<(usize, Third)>,
        digit_group: u32,
    ) -> Result<Self> {
        if base < 2 {
            return Err(Error::Construction("transducer base must be at least 2".into()));
        }
        if digit_group == 0 {
            return Err(Error::Construction("digit group must be positive".into()));
        }
        if states.is_empty() || start >= states.len() {
            return Err(Error::Construction("start state out of range".into()));
        }
        for (i, name) in states.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Construction(format!("bad state name {name:?}")));
            }
            if states[..i].contains(name) {
                return Err(Error::Construction(format!("duplicate state name {name:?}")));
            }
        }
        if edges.len() != states.len() * base as usize {
            return Err(Error::Construction(format!(
                "expected {} edges, got {}",
                states.len() * base as usize,
                edges.len()
            )));
        }
        if let Some((t, _)) = edges.iter().find(|(t, _)| *t >= states.len()) {
            return Err(Error::Construction(format!("edge target {t} out of range")));
        }
        let t = WeightedTransducer { base, states, start, edges, digit_group };
        // leading zeros must not contribute: the zero path of one digit
        // group returns to start with weight zero
        let mut state = t.start;
        let mut weight = Third::ZERO;
        for _ in 0..t.digit_group {
            let (next, w) = t.step(state, 0);
            state = next;
            weight += w;
        }
        if state != t.start || weight != Third::ZERO {
            return Err(Error::Construction(
                "start state does not absorb leading zeros at weight zero".into(),
            ));
        }
        Ok(t)
    }

    /// Digit base.
    pub fn base(&self) -> u32 {
        self.base
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Name of a state.
    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    /// Start state index.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Digit-group length (see [`base2_reduction`]).
    pub fn digit_group(&self) -> u32 {
        self.digit_group
    }

    /// One transition.
    pub fn step(&self, state: usize, digit: u32) -> (usize, Third) {
        self.edges[state * self.base as usize + digit as usize]
    }

    /// Base-k digits of `n`, most significant first, left-padded with zeros
    /// to a multiple of the digit group.
    pub fn digits(&self, n: u128) -> Vec<u32> {
        let mut ds = Vec::new();
        let mut n = n;
        while n > 0 {
            ds.push((n % self.base as u128) as u32);
            n /= self.base as u128;
        }
        while ds.len() % self.digit_group as usize != 0 {
            ds.push(0);
        }
        ds.reverse();
        ds
    }

    /// Runs the digit path of `n` and returns the final state and the sum
    /// of edge weights.
    pub fn run_with_state(&self, n: u128) -> (usize, Third) {
        let mut state = self.start;
        let mut weight = Third::ZERO;
        for d in self.digits(n) {
            let (next, w) = self.step(state, d);
            state = next;
            weight += w;
        }
        (state, weight)
    }

    /// Sum of edge weights along the digit path of `n`; `n = 0` reads the
    /// empty digit string and yields zero.
    pub fn run(&self, n: u128) -> Third {
        self.run_with_state(n).1
    }

    /// Largest absolute edge weight, in thirds. The output sum at `n` is
    /// bounded by this times the digit count of `n`.
    pub fn max_weight_thirds(&self) -> i64 {
        self.edges.iter().map(|(_, w)| w.as_thirds().abs()).max().unwrap_or(0)
    }

    /// Number of states reachable from the start.
    pub fn reachable_states(&self) -> usize {
        let mut seen = vec![false; self.states.len()];
        seen[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        let mut count = 1;
        while let Some(s) = queue.pop_front() {
            for d in 0..self.base {
                let (t, _) = self.step(s, d);
                if !seen[t] {
                    seen[t] = true;
                    count += 1;
                    queue.push_back(t);
                }
            }
        }
        count
    }

    /// Canonical text form: a `base` line, a `start` line, a `group` line
    /// when the digit group exceeds one, then one `from digit to num3` line
    /// per edge with num3 the weight times three. Parsing the dump and
    /// dumping again is byte-identical.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("base {}\n", self.base));
        out.push_str(&format!("start {}\n", self.states[self.start]));
        if self.digit_group > 1 {
            out.push_str(&format!("group {}\n", self.digit_group));
        }
        for s in 0..self.states.len() {
            for d in 0..self.base {
                let (t, w) = self.step(s, d);
                out.push_str(&format!(
                    "{} {} {} {}\n",
                    self.states[s],
                    d,
                    self.states[t],
                    w.as_thirds()
                ));
            }
        }
        out
    }

    /// Parses the text form. State indices follow the order in which states
    /// first appear as an edge source, so a dumped machine parses back with
    /// its original layout.
    pub fn parse(text: &str) -> Result<Self> {
        let mut base: Option<u32> = None;
        let mut start_name: Option<String> = None;
        let mut group: u32 = 1;
        let mut names: Vec<String> = Vec::new();
        let mut raw_edges: Vec<(String, u32, String, i64)> = Vec::new();
        let bad = |offset: usize, message: String| Error::Parse { offset, message };

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["base", b] => {
                    base = Some(
                        b.parse().map_err(|_| bad(lineno, format!("bad base {b:?}")))?,
                    );
                }
                ["start", s] => start_name = Some((*s).to_owned()),
                ["group", g] => {
                    group =
                        g.parse().map_err(|_| bad(lineno, format!("bad group {g:?}")))?;
                }
                [from, digit, to, num3] => {
                    let d: u32 = digit
                        .parse()
                        .map_err(|_| bad(lineno, format!("bad digit {digit:?}")))?;
                    let w: i64 = num3
                        .parse()
                        .map_err(|_| bad(lineno, format!("bad weight {num3:?}")))?;
                    if !names.iter().any(|n| n == from) {
                        names.push((*from).to_owned());
                    }
                    raw_edges.push(((*from).to_owned(), d, (*to).to_owned(), w));
                }
                _ => return Err(bad(lineno, format!("unrecognized line {line:?}"))),
            }
        }

        let base = base.ok_or_else(|| bad(0, "missing base line".into()))?;
        let start_name = start_name.ok_or_else(|| bad(0, "missing start line".into()))?;
        let index = |name: &str| names.iter().position(|n| n == name);
        let start = index(&start_name)
            .ok_or_else(|| bad(0, format!("start state {start_name:?} has no edges")))?;

        let mut edges = vec![None; names.len() * base as usize];
        for (from, d, to, w) in &raw_edges {
            if *d >= base {
                return Err(bad(0, format!("digit {d} out of range for base {base}")));
            }
            let f = index(from).unwrap();
            let t = index(to).ok_or_else(|| bad(0, format!("state {to:?} has no edges")))?;
            let slot = &mut edges[f * base as usize + *d as usize];
            if slot.is_some() {
                return Err(bad(0, format!("duplicate edge from {from:?} on digit {d}")));
            }
            *slot = Some((t, Third::thirds(*w)));
        }
        let edges: Vec<(usize, Third)> = edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| {
                    bad(
                        0,
                        format!(
                            "missing edge from {:?} on digit {}",
                            names[i / base as usize],
                            i % base as usize
                        ),
                    )
                })
            })
            .collect::<Result<_>>()?;

        WeightedTransducer::new(base, names, start, edges, group)
    }
}

impl fmt::Debug for WeightedTransducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedTransducer")
            .field("base", &self.base)
            .field("states", &self.states.len())
            .field("start", &self.states[self.start])
            .finish()
    }
}

/// Degree increment on the edge `from --digit-->` of the degree transducer.
///
/// The degree changes exactly when the substitution inserts letters into the
/// range of existing links (the images of `b<` and `bh<`) or creates a new
/// link with an `a` inside (the image of `c<`).
fn degree_weight(from: DecoratedSymbol, digit: u32) -> i64 {
    use DecoratedSymbol::*;
    match (from, digit) {
        (BLeft, 0..=2) => 1,
        (BHatLeft, 0) => 1,
        (CLeft, 2) => -1,
        _ => 0,
    }
}

/// The seven-state base-4 transducer computing degrees: feeding the base-4
/// digits of `j` (most significant first) ends at state `w(j)` of the
/// decorated word with output sum `deg(j)`.
pub fn degree_transducer() -> WeightedTransducer {
    let states: Vec<String> =
        crate::matching::ALL_DECORATED.iter().map(|s| s.ascii().to_owned()).collect();
    let mut edges = Vec::with_capacity(28);
    for &s in &crate::matching::ALL_DECORATED {
        for d in 0..4 {
            let target = phi_plus_image(s)[d as usize];
            edges.push((target.index(), Third::from_integer(degree_weight(s, d))));
        }
    }
    WeightedTransducer::new(4, states, 0, edges, 1).unwrap()
}

/// Decorated letter named by a degree-transducer state index.
pub fn state_symbol(i: usize) -> DecoratedSymbol {
    DecoratedSymbol::from_index(i).expect("degree transducer has 7 states")
}

/// Degree and decorated letter at position `j`, via the degree transducer.
pub fn degree_via_transducer(t: &WeightedTransducer, j: u128) -> (i64, DecoratedSymbol) {
    let (state, w) = t.run_with_state(j);
    (w.as_integer().expect("degree weights are integers"), state_symbol(state))
}

/// Discrepancy offset of each decorated letter, in thirds: for letters of
/// type `a`/`bh` this adjusts `D(4j)`, for the others `D(4j+2)`.
const LETTER_SHIFT_THIRDS: [i64; 7] = [0, 1, 0, 1, 0, -1, 0];

/// Quadruple pattern around `D(4j)` when the letter has type `a` or `bh`.
const QUAD_EVEN_THIRDS: [i64; 4] = [0, 2, 1, 0];
/// Quadruple pattern around `D(4j+2)` for the other letters.
const QUAD_ODD_THIRDS: [i64; 4] = [2, 1, 0, 2];

fn letter_is_even_type(s: DecoratedSymbol) -> bool {
    s.index() <= DecoratedSymbol::BHatRight.index()
}

/// Discrepancy after `n` letters, from the degree and decorated letter of
/// `n/4` plus the four-value correction tables.
pub fn discrepancy_by_degree(t1: &WeightedTransducer, n: u128) -> Third {
    let j = n / 4;
    let rem = (n % 4) as usize;
    let (deg, sym) = degree_via_transducer(t1, j);
    let delta = Third::thirds(deg + LETTER_SHIFT_THIRDS[sym.index()]);
    let quad = if letter_is_even_type(sym) { QUAD_EVEN_THIRDS } else { QUAD_ODD_THIRDS };
    delta + Third::thirds(quad[rem])
}

/// Discrepancy after `n` letters by direct count over the Thue-Morse prefix.
pub fn discrepancy_brute(n: usize) -> Third {
    *discrepancy_brute_upto(n).last().unwrap()
}

/// Discrepancies after `0..=n` letters, by one incremental count.
pub fn discrepancy_brute_upto(n: usize) -> Vec<Third> {
    let tm = catalog::thue_morse();
    let prefix = tm.prefix(n + 1).expect("discrepancy range within stream budget");
    let t = prefix.symbols();
    let mut out = Vec::with_capacity(n + 1);
    let mut count: i64 = 0;
    out.push(Third::ZERO);
    for i in 0..n {
        if t[i] == 0 && t[i + 1] == 1 {
            count += 1;
        }
        out.push(Third::thirds(3 * count - (i as i64 + 1)));
    }
    out
}

/// The 196-state base-4 transducer whose output sum at `n` is the
/// discrepancy after `n` letters.
///
/// States are triples `(current, digit, previous)` over the degree
/// transducer: the letter reached, the digit that led there, and the letter
/// before it. Each step cancels the final correction applied by the previous
/// step, pays out the previous step's degree weight, and applies the
/// correction for the new final digit. Unreachable states are kept; see
/// [`WeightedTransducer::reachable_states`].
pub fn discrepancy_transducer() -> WeightedTransducer {
    let t1 = degree_transducer();
    let step1 = |j: usize, l: u32| t1.step(j, l).0;

    // adjacency and weight matrices of the degree transducer, per digit
    let mut a = [[[false; 7]; 7]; 4];
    let mut w = [[[Third::ZERO; 7]; 7]; 4];
    for j in 0..7 {
        for l in 0..4usize {
            let i = step1(j, l as u32);
            a[l][i][j] = true;
            w[l][i][j] = Third::thirds(degree_weight(state_symbol(j), l as u32));
        }
    }
    // every column of each adjacency matrix must be a unit vector
    for (l, al) in a.iter().enumerate() {
        for j in 0..7 {
            let ones = (0..7).filter(|&i| al[i][j]).count();
            assert_eq!(ones, 1, "digit {l}, column {j} is not a unit vector");
        }
    }

    // final-correction matrices: the single nonzero entry per column sits at
    // the row the digit maps to
    let mut z = [[[Third::ZERO; 7]; 7]; 4];
    for (l, zl) in z.iter_mut().enumerate() {
        for j in 0..7 {
            let i = step1(j, l as u32);
            let q = if j <= 2 { QUAD_EVEN_THIRDS[l] } else { QUAD_ODD_THIRDS[l] };
            zl[i][j] = Third::thirds(q + LETTER_SHIFT_THIRDS[j]);
        }
    }

    let ascii = |i: usize| state_symbol(i).ascii();
    let state_index = |i: usize, l: u32, j: usize| (i * 4 + l as usize) * 7 + j;
    let mut states = Vec::with_capacity(196);
    for i in 0..7 {
        for l in 0..4u32 {
            for j in 0..7 {
                states.push(format!("{}.{}.{}", ascii(i), l, ascii(j)));
            }
        }
    }

    let mut edges = Vec::with_capacity(196 * 4);
    for j in 0..7 {
        for lp in 0..4u32 {
            for k in 0..7 {
                // at state (j, lp, k), reading digit l moves to (i, l, j)
                for l in 0..4u32 {
                    let i = step1(j, l);
                    let weight = z[l as usize][i][j] - z[lp as usize][j][k]
                        + w[lp as usize][j][k];
                    edges.push((state_index(i, l, j), weight));
                }
            }
        }
    }
    WeightedTransducer::new(4, states, state_index(0, 0, 0), edges, 1).unwrap()
}

/// Rewrites a base-4 transducer over base 2 by splitting each digit into a
/// depth-2 binary tree through two auxiliary states. The result reads
/// binary expansions left-padded to even length (`digit_group = 2`) and
/// agrees with the base-4 machine on every input.
pub fn base2_reduction(t: &WeightedTransducer) -> Result<WeightedTransducer> {
    if t.base() != 4 || t.digit_group() != 1 {
        return Err(Error::InvalidArgument(
            "base-2 reduction expects a plain base-4 transducer".into(),
        ));
    }
    let n = t.state_count();
    let mut states: Vec<String> = (0..n).map(|s| t.state_name(s).to_owned()).collect();
    for s in 0..n {
        states.push(format!("{}~0", t.state_name(s)));
        states.push(format!("{}~1", t.state_name(s)));
    }
    let aux = |s: usize, b: u32| n + 2 * s + b as usize;
    let mut edges = Vec::with_capacity(states.len() * 2);
    for s in 0..n {
        edges.push((aux(s, 0), Third::ZERO));
        edges.push((aux(s, 1), Third::ZERO));
    }
    for s in 0..n {
        for b in 0..2u32 {
            for b2 in 0..2u32 {
                edges.push(t.step(s, 2 * b + b2));
            }
        }
    }
    WeightedTransducer::new(2, states, t.start(), edges, 2)
}
