//! The cross-check suite: every module verified against every other.
//!
//! Each check returns a [`CheckOutcome`] with a deterministic detail string;
//! the CLI `verify` command prints one line per check and the acceptance
//! test target asserts them individually. Tolerances are pinned here, in
//! code: exact equality for all word and transducer identities, `1e-3` for
//! the exponential-sum decay, `1e-12` for the averaged-sum inequality.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::{catalog, gaps, kernel, matching, residue, transducer};
use transducer::Third;

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    /// Stable check name.
    pub name: &'static str,
    /// Whether the check passed.
    pub passed: bool,
    /// Deterministic one-line summary (counts, extremes, first mismatch).
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: false, detail }
    }
}

macro_rules! ensure {
    ($name:expr, $cond:expr, $($msg:tt)*) => {
        if !$cond {
            return CheckOutcome::fail($name, format!($($msg)*));
        }
    };
}

/// Thue-Morse and gap-word prefixes against their pinned values.
pub fn check_prefixes() -> CheckOutcome {
    const NAME: &str = "prefixes";
    let tm = catalog::thue_morse().prefix(32).map(|w| w.to_string()).ok();
    ensure!(
        NAME,
        tm.as_deref() == Some("01101001100101101001011001101001"),
        "thue-morse prefix 32 mismatch: {tm:?}"
    );
    let b = catalog::gaps01().prefix(21).map(|w| w.to_string()).ok();
    ensure!(
        NAME,
        b.as_deref() == Some("334233243342433233423"),
        "gap word prefix 21 mismatch: {b:?}"
    );
    CheckOutcome::pass(NAME, "thue-morse 32 letters, gap word 21 letters".into())
}

/// The block-substitution, coding, and projection identities on long
/// prefixes, against scan oracles where one exists.
pub fn check_identities() -> CheckOutcome {
    const NAME: &str = "identities";
    let n = 1 << 16;
    let tm = catalog::thue_morse();

    let rebuilt = catalog::reconstruct_via(&catalog::tm_blocks(), &catalog::ternary_tm(), n);
    ensure!(NAME, rebuilt.as_ref().ok() == tm.prefix(n).ok().as_ref(), "block rebuild != word");

    let b = catalog::gaps01().prefix(n).map(|w| catalog::gap_values(&w));
    let scan01 = tm.gaps_by_scan(&tm.word_from_str("01").unwrap(), n);
    ensure!(NAME, b.ok() == scan01.ok(), "gap word != scanned gaps of 01");

    let c = catalog::gaps10_prefix(n).map(|w| catalog::gap_values(&w));
    let scan10 = tm.gaps_by_scan(&tm.word_from_str("10").unwrap(), n);
    ensure!(NAME, c.ok() == scan10.ok(), "morphic gaps of 10 != scanned gaps");

    let coded = catalog::berstel_word()
        .prefix(n)
        .and_then(|w| catalog::berstel_coding().apply(&w));
    ensure!(NAME, coded.ok() == catalog::ternary_tm().prefix(n).ok(), "coding != ternary word");

    let decorated = matching::decorated_word().prefix(n).unwrap();
    let projected = matching::gamma(&matching::from_word(&decorated).unwrap());
    ensure!(
        NAME,
        projected == catalog::ternary_tm().prefix(n).unwrap(),
        "decorated projection != ternary word"
    );
    CheckOutcome::pass(NAME, format!("five identities exact on prefixes of {n}"))
}

/// Square content of the three central words.
pub fn check_squarefreeness() -> CheckOutcome {
    const NAME: &str = "squarefreeness";
    let n = 1 << 12;
    let a = catalog::ternary_tm().prefix(n).unwrap();
    ensure!(NAME, kernel::find_square(&a, 1, 512).is_none(), "square in ternary word");
    let bbar = catalog::gap_preimage().prefix(n).unwrap();
    ensure!(NAME, kernel::find_square(&bbar, 1, 512).is_none(), "square in preimage word");
    let b = catalog::gaps01().prefix(n).unwrap();
    let short = kernel::find_square(&b, 1, 512);
    ensure!(NAME, short.map(|s| s.len) == Some(1), "gap word should square only at length 1");
    ensure!(NAME, kernel::find_square(&b, 2, 512).is_none(), "gap word has a long square");
    CheckOutcome::pass(NAME, format!("prefixes of {n}, square lengths up to 512"))
}

/// FindMatching output on closed prefixes: valid, total, and rotation
/// reduces to the periodic word, in agreement with the shortcut.
pub fn check_matching() -> CheckOutcome {
    const NAME: &str = "matching";
    let mut links = 0;
    for k in 0..=6u32 {
        let w = matching::phi_plus_iterate(k);
        let m = matching::find_matching(&w);
        if let Err(e) = matching::validate_matching(&w, &m) {
            return CheckOutcome::fail(NAME, format!("depth {k}: {e}"));
        }
        let mut covered = vec![false; w.len()];
        for l in m.links() {
            covered[l.i] = true;
            covered[l.j] = true;
        }
        let total = w
            .iter()
            .zip(&covered)
            .all(|(s, &c)| c == (*s != matching::DecoratedSymbol::A));
        ensure!(NAME, total, "depth {k}: matching not total on connector letters");

        let rotated = match matching::rotate_along_links(&w, &m) {
            Ok(r) => r,
            Err(e) => return CheckOutcome::fail(NAME, format!("depth {k}: {e}")),
        };
        let coded = matching::gamma(&rotated);
        let periodic: Vec<u8> = (0..w.len()).map(|i| (i % 3) as u8).collect();
        ensure!(NAME, coded.symbols() == &periodic[..], "depth {k}: rotation not periodic");
        ensure!(
            NAME,
            matching::rotate_shortcut(&w) == coded,
            "depth {k}: shortcut disagrees with rotation"
        );
        links += m.len();
    }
    CheckOutcome::pass(NAME, format!("depths 0..=6 closed; {links} links checked"))
}

/// Degree values: the pinned list, the two worked positions, and agreement
/// between the matching and the transducer on a full range.
pub fn check_degrees() -> CheckOutcome {
    const NAME: &str = "degrees";
    let expected: [i64; 48] = [
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0,
        0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, -1, -1, -1, -1, 0, 0, -1, 0,
    ];
    let n = 1 << 12;
    let degrees = matching::degrees_up_to(n);
    ensure!(NAME, degrees[..48] == expected, "first 48 degrees mismatch");

    let t1 = transducer::degree_transducer();
    ensure!(NAME, transducer::degree_via_transducer(&t1, 10).0 == -1, "deg(10) != -1");
    ensure!(NAME, transducer::degree_via_transducer(&t1, 170).0 == -2, "deg(170) != -2");

    let word = matching::phi_plus_iterate(6);
    for (j, &deg) in degrees.iter().enumerate() {
        let (d, sym) = transducer::degree_via_transducer(&t1, j as u128);
        ensure!(NAME, d == deg, "transducer degree at {j}: {d} != {deg}");
        ensure!(NAME, sym == word[j], "transducer letter at {j}");
    }
    CheckOutcome::pass(NAME, format!("matching and transducer agree on 0..{n}"))
}

/// The four discrepancy routes against each other and the pinned values.
pub fn check_discrepancy() -> CheckOutcome {
    const NAME: &str = "discrepancy";
    let t1 = transducer::degree_transducer();
    let t2 = transducer::discrepancy_transducer();
    let t2b = match transducer::base2_reduction(&t2) {
        Ok(t) => t,
        Err(e) => return CheckOutcome::fail(NAME, format!("base-2 reduction failed: {e}")),
    };

    let n = 1 << 14;
    let brute = transducer::discrepancy_brute_upto(n);
    for (i, &b) in brute.iter().enumerate() {
        let m = i as u128;
        ensure!(NAME, transducer::discrepancy_by_degree(&t1, m) == b, "degree route at {i}");
        ensure!(NAME, t2.run(m) == b, "output-sum route at {i}");
        ensure!(NAME, t2b.run(m) == b, "base-2 route at {i}");
    }

    ensure!(NAME, t2.run(41) == Third::thirds(1), "D(41) != 1/3");
    let expected: [i64; 48] = [
        0, 2, 1, 0, 2, 1, 0, 2, 1, 0, -1, 1, 0, 2, 1, 0, 2, 1, 0, 2, 1, 3, 2, 1, 0, 2, 1, 0, 2,
        1, 0, 2, 1, 0, -1, 1, 0, 2, 1, 0, -1, 1, 0, -1, 1, 0, -1, 1,
    ];
    for (i, &e) in expected.iter().enumerate() {
        ensure!(NAME, brute[i].as_thirds() == e, "scaled discrepancy at {i}");
    }

    for k in 1..=5u32 {
        let neg = 8 * (16u128.pow(k) - 1) / 3;
        let pos = 80 * (64u128.pow(k) - 1) / 63;
        for (n, want) in [(neg, -(k as i64)), (pos, k as i64)] {
            ensure!(NAME, t2.run(n) == Third::thirds(want), "family value at {n}");
            ensure!(
                NAME,
                transducer::discrepancy_by_degree(&t1, n) == Third::thirds(want),
                "family value at {n} (degree route)"
            );
        }
    }
    CheckOutcome::pass(NAME, format!("four routes agree on 0..={n}; families to k=5"))
}

/// Gap classification of the two worked factors and morphic/scan agreement
/// for every short factor.
pub fn check_gap_classification() -> CheckOutcome {
    const NAME: &str = "gap-classification";
    let w010 = gaps::parse_factor("010").unwrap();
    let c = match gaps::classify(&w010) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::fail(NAME, format!("classify 010: {e}")),
    };
    ensure!(
        NAME,
        c.k == 2
            && c.members == vec![gaps::BlockTag::ZeroOne, gaps::BlockTag::OneZero]
            && (c.sigma0, c.sigma1) == (3, Some(2)),
        "classification of 010 mismatch: {c:?}"
    );
    let tm = catalog::thue_morse();
    let occ = tm.occurrences(&w010, 32).unwrap();
    ensure!(NAME, occ == vec![3, 10, 15, 18, 27], "occurrences of 010 mismatch: {occ:?}");

    let w00110 = gaps::parse_factor("00110").unwrap();
    let c = gaps::classify(&w00110).unwrap();
    ensure!(
        NAME,
        c.k == 2
            && c.members == vec![gaps::BlockTag::ZeroZero, gaps::BlockTag::OneOne]
            && (c.sigma0, c.sigma1) == (1, Some(3)),
        "classification of 00110 mismatch: {c:?}"
    );

    let mut checked = 0;
    for len in 2..=12 {
        for w in gaps::tm_factors(len, 1 << 13).unwrap() {
            let class = match gaps::classify(&w) {
                Ok(c) => c,
                Err(e) => return CheckOutcome::fail(NAME, format!("classify {w}: {e}")),
            };
            let morphic = gaps::gap_stream(&class, 256).unwrap();
            let scanned = tm.gaps_by_scan(&w, 256).unwrap();
            ensure!(NAME, morphic == scanned, "gap stream of {w} diverges from scan");
            checked += 1;
        }
    }
    CheckOutcome::pass(NAME, format!("{checked} factors of length 2..=12, 256 gaps each"))
}

/// Kernel closure for the automatic words, kernel growth witnesses for the
/// gap word.
pub fn check_kernel_evidence() -> CheckOutcome {
    const NAME: &str = "kernel-evidence";
    let fp = 1 << 10;
    let a = kernel::explore_kernel(&catalog::ternary_tm(), 2, 8, fp).unwrap();
    ensure!(NAME, a.closed, "ternary kernel did not close: {:?}", a.new_per_depth);
    let abar = kernel::explore_kernel(&catalog::berstel_word(), 2, 8, fp).unwrap();
    ensure!(NAME, abar.closed, "four-letter kernel did not close");

    let b = catalog::gaps01();
    let mut pairs = 0;
    for m in 2..=16usize {
        for l1 in 0..m {
            for l2 in l1 + 1..m {
                match kernel::distinct_arith_witness(&b, m, l1, l2, 100_000) {
                    Ok(Some(_)) => pairs += 1,
                    Ok(None) => {
                        return CheckOutcome::fail(
                            NAME,
                            format!("no witness for modulus {m}, offsets ({l1},{l2})"),
                        )
                    }
                    Err(e) => return CheckOutcome::fail(NAME, format!("witness search: {e}")),
                }
            }
        }
    }
    CheckOutcome::pass(
        NAME,
        format!(
            "closures at sizes {}/{}; {pairs} witness pairs up to modulus 16",
            a.distinct, abar.distinct
        ),
    )
}

/// Residue-class search, exponential-sum decay, the averaged-sum
/// inequality, and missing-digit counts.
pub fn check_residue_numerics() -> CheckOutcome {
    const NAME: &str = "residue-numerics";
    let mut found = 0;
    for m in 1..=12u64 {
        for a in 0..m {
            match residue::hit_residue_class(0, m, a, 24) {
                Ok(hit) => {
                    let v = hit.spec.value();
                    ensure!(NAME, v % m as u128 == a as u128, "wrong class for {a} mod {m}");
                    match hit.spec.verify() {
                        Ok(true) => found += 1,
                        Ok(false) => {
                            return CheckOutcome::fail(
                                NAME,
                                format!("position {v} does not carry the prefix ({a} mod {m})"),
                            )
                        }
                        Err(e) => return CheckOutcome::fail(NAME, format!("verify: {e}")),
                    }
                }
                Err(e) => return CheckOutcome::fail(NAME, format!("{a} mod {m}: {e}")),
            }
        }
    }

    let mut prev = f64::INFINITY;
    for nu in 0..=40 {
        let g = residue::g_product(1, 3, 0, nu).norm();
        ensure!(NAME, g <= prev + 1e-12, "exponential sum grew at level {nu}");
        prev = g;
    }
    ensure!(NAME, prev < 1e-3, "exponential sum at level 40 is {prev}");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xde1a);
    for i in 0..100_000 {
        let q = rng.gen_range(2..=4usize);
        let zs: Vec<Complex64> = (0..q - 1)
            .map(|_| {
                let r: f64 = rng.gen_range(0.0..=1.0);
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, theta)
            })
            .collect();
        ensure!(NAME, residue::delange_bound_holds(&zs, 1e-12), "sample {i} violates the bound");
    }

    for eta in 0..=8u32 {
        let count = residue::enumerate_missing_digit(0, eta).len();
        ensure!(NAME, count == 3usize.pow(eta), "missing-digit count at {eta}: {count}");
    }
    CheckOutcome::pass(
        NAME,
        format!("{found} residue classes hit; decay, averaged-sum and counts verified"),
    )
}

/// Logarithmic bound on the discrepancy, with the empirical extreme.
pub fn check_log_bound() -> CheckOutcome {
    const NAME: &str = "log-bound";
    let t2 = transducer::discrepancy_transducer();
    let c_thirds = t2.max_weight_thirds();
    let mut max_abs = 0i64;
    let mut arg = 0usize;
    for n in 0..(1usize << 16) {
        let v = t2.run(n as u128).as_thirds().abs();
        if v > max_abs {
            max_abs = v;
            arg = n;
        }
    }
    // |D(n)| <= C * digits(n) <= C * log2(range): scaled by 3 on both sides
    let bound = 16 * c_thirds;
    ensure!(NAME, max_abs <= bound, "max |3D| = {max_abs} exceeds {bound}");
    ensure!(NAME, max_abs >= 3, "extreme below the in-range family value: {max_abs}");
    CheckOutcome::pass(
        NAME,
        format!("max |3D| below 2^16 is {max_abs} at {arg}, bound {bound} (3C = {c_thirds})"),
    )
}

/// All checks, in fixed order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_prefixes(),
        check_identities(),
        check_squarefreeness(),
        check_matching(),
        check_degrees(),
        check_discrepancy(),
        check_gap_classification(),
        check_kernel_evidence(),
        check_residue_numerics(),
        check_log_bound(),
    ]
}

/// Named subset of the checks; `all` runs everything.
pub fn run_suite(suite: &str) -> Option<Vec<CheckOutcome>> {
    match suite {
        "all" => Some(run_all()),
        "prefixes" => Some(vec![check_prefixes()]),
        "identities" => Some(vec![check_identities()]),
        "squarefreeness" => Some(vec![check_squarefreeness()]),
        "matching" => Some(vec![check_matching()]),
        "degrees" => Some(vec![check_degrees()]),
        "discrepancy" => Some(vec![check_discrepancy()]),
        "gap-classification" => Some(vec![check_gap_classification()]),
        "kernel-evidence" => Some(vec![check_kernel_evidence()]),
        "residue-numerics" => Some(vec![check_residue_numerics()]),
        "log-bound" => Some(vec![check_log_bound()]),
        _ => None,
    }
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "all",
    "prefixes",
    "identities",
    "squarefreeness",
    "matching",
    "degrees",
    "discrepancy",
    "gap-classification",
    "kernel-evidence",
    "residue-numerics",
    "log-bound",
];
