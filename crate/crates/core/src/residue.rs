//! Positions of long prefixes of the gap preimage word in residue classes.
//!
//! The fourth iterate of the four-letter substitution expands every letter
//! by a factor 16, and the prefix of length `16^m` reappears at explicitly
//! computable positions: choosing one of four offsets per level `r` gives
//! the position `N = sum_r step_position(r, digit_r)`. Digits `0,1,2`
//! contribute multiples of `4*16^r`; digit `3` additionally contributes an
//! odd summand, which is what steers positions through the even part of a
//! modulus. The digit-`{0,1,2}` positions form a missing-digit set in base
//! 16, and an exponential-sum product shows they meet every residue class
//! of every odd modulus. [`hit_residue_class`] runs that two-phase
//! construction; [`PositionSpec::verify`] checks any claimed position by
//! direct comparison inside the word.
//!
//! Complex arithmetic is double precision; every floating-point claim in
//! this module is an inequality with tolerance around 1e-9, and exponents
//! are reduced exactly modulo the denominator before any float is formed.

use num_complex::Complex64;

use crate::catalog;
use crate::error::{Error, Result};

/// `16^k` as an exact `u128`.
pub fn pow16(k: u32) -> u128 {
    16u128.pow(k)
}

/// Lengths of the fourth-iterate images after `k` rounds: the images of
/// `a`/`ā`, of `b`, and of `c`, in closed form.
pub fn psi4_lengths(k: u32) -> (u128, u128, u128) {
    let p = pow16(k);
    (p, (4 * p - 1) / 3, (2 * p + 1) / 3)
}

/// Letter counts of the `k`-th power of the fourth-iterate substitution,
/// `k >= 1`: entry `[i][j]` counts letter `j` in the image of letter `i`,
/// rows and columns ordered `a, ā, b, c`.
pub fn letter_counts_matrix_power(k: u32) -> [[u128; 4]; 4] {
    assert!(k >= 1, "closed form starts at k = 1");
    let p = pow16(k);
    [
        [p / 4; 4],
        [p / 4; 4],
        [(p - 1) / 3, (p - 1) / 3, (p + 2) / 3, (p - 1) / 3],
        [(p + 2) / 6, (p + 2) / 6, (p - 4) / 6, (p + 2) / 6],
    ]
}

/// Offset of the `e`-th reappearance (0..=3) of the length-`16^nu` prefix
/// one level up.
pub fn step_position(nu: u32, e: u8) -> u128 {
    let p = pow16(nu);
    match e {
        0 => 0,
        1 => 4 * p,
        2 => 8 * p,
        3 => 12 * p + (4 * p - 1) / 3,
        _ => panic!("digit {e} out of range"),
    }
}

/// A position given by per-level digits: the prefix of length `16^mu`
/// occurs at `sum_i step_position(mu + i, digits[i])` in the preimage word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSpec {
    /// Order of the prefix being located.
    pub mu: u32,
    /// Digits in `0..=3`, one per level starting at `mu`.
    pub digits: Vec<u8>,
}

impl PositionSpec {
    /// The encoded position.
    pub fn value(&self) -> u128 {
        self.digits
            .iter()
            .enumerate()
            .map(|(i, &e)| step_position(self.mu + i as u32, e))
            .sum()
    }

    /// Checks by direct letter comparison that the length-`16^mu` prefix of
    /// the preimage word occurs at the encoded position.
    pub fn verify(&self) -> Result<bool> {
        let word = catalog::gap_preimage();
        let n = self.value();
        let len = pow16(self.mu);
        for t in 0..len {
            if word.letter_at(n + t)? != word.letter_at(t)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A successful residue-class search, recording how each digit was chosen.
#[derive(Debug, Clone)]
pub struct ResidueHit {
    /// The found position.
    pub spec: PositionSpec,
    /// Number of leading digits fixed to 3 by the even-modulus phase.
    pub phase1_digits: usize,
    /// True when the two-phase search failed and brute enumeration found
    /// the position instead.
    pub brute: bool,
}

fn split_modulus(m: u64) -> (u32, u64) {
    let k = m.trailing_zeros();
    (k, m >> k)
}

/// Finds digits placing the length-`16^mu` prefix at a position congruent
/// to `a` modulo `m`, preferring the constructive two-phase search (digit 3
/// repeated to steer modulo the power of two, then digits `0..=2` to steer
/// modulo the odd part) and falling back to brute enumeration.
pub fn hit_residue_class(mu: u32, m: u64, a: u64, bound: u32) -> Result<ResidueHit> {
    assert!(m >= 1, "modulus must be positive");
    let a = a % m;
    let (k2, d) = split_modulus(m);
    let pow2 = 1u128 << k2;
    let target2 = (a as u128) % pow2;
    // smallest level whose {0,1,2}-digit contribution vanishes mod 2^k2
    let lambda_min = k2.saturating_sub(2).div_ceil(4);

    for t3 in 0..=bound {
        let phase1 = PositionSpec { mu, digits: vec![3; t3 as usize] };
        let kappa1 = phase1.value();
        let lambda = mu + t3;
        if kappa1 % pow2 != target2 || lambda < lambda_min {
            continue;
        }
        let a2 = ((a as u128 + d as u128 - kappa1 % d as u128) % d as u128) as u64;
        if let Some(tail) = odd_part_digits(d, lambda, a2, bound) {
            let mut digits = vec![3u8; t3 as usize];
            digits.extend_from_slice(&tail);
            while digits.last() == Some(&0) && digits.len() > 1 {
                digits.pop();
            }
            if digits.is_empty() {
                digits.push(0);
            }
            let spec = PositionSpec { mu, digits };
            debug_assert_eq!(spec.value() % m as u128, a as u128);
            return Ok(ResidueHit { spec, phase1_digits: t3 as usize, brute: false });
        }
    }

    // brute enumeration over short digit strings
    for len in 1..=bound.min(10) {
        let mut digits = vec![0u8; len as usize];
        loop {
            let spec = PositionSpec { mu, digits: digits.clone() };
            if spec.value() % m as u128 == a as u128 {
                return Ok(ResidueHit { spec, phase1_digits: 0, brute: true });
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    break;
                }
                digits[i] += 1;
                if digits[i] < 4 {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    Err(Error::Exhausted(format!("no position found for {a} mod {m} within bound {bound}")))
}

/// Digits in `{0,1,2}` starting at level `lambda` whose contribution is
/// congruent to `a2` modulo the odd `d`; `None` if the level budget runs
/// out. Breadth-first over residues, so the digit string is shortest.
fn odd_part_digits(d: u64, lambda: u32, a2: u64, max_levels: u32) -> Option<Vec<u8>> {
    if d == 1 || a2 == 0 {
        return Some(Vec::new());
    }
    // came_from[r] = (previous residue, level, digit)
    let mut came_from: Vec<Option<(u64, u32, u8)>> = vec![None; d as usize];
    let mut known = vec![0u64];
    let mut seen = vec![false; d as usize];
    seen[0] = true;
    let mut weight = 4u64 * pow16_mod(lambda, d);
    for level in 0..max_levels.max(16) + 16 {
        let snapshot = known.clone();
        for &r in &snapshot {
            for e in 1..=2u64 {
                let r2 = (r + e * weight % d) % d;
                if !seen[r2 as usize] {
                    seen[r2 as usize] = true;
                    came_from[r2 as usize] = Some((r, level, e as u8));
                    known.push(r2);
                }
            }
        }
        if seen[a2 as usize] {
            // walk back through strictly decreasing levels
            let mut digits = Vec::new();
            let mut r = a2;
            while let Some((prev, lvl, e)) = came_from[r as usize] {
                if digits.len() <= lvl as usize {
                    digits.resize(lvl as usize + 1, 0);
                }
                digits[lvl as usize] = e;
                r = prev;
            }
            return Some(digits);
        }
        weight = weight * 16 % d;
    }
    None
}

fn pow16_mod(k: u32, d: u64) -> u64 {
    let mut acc = 1u64;
    for _ in 0..k {
        acc = acc * 16 % d;
    }
    acc
}

/// True when `n` is a nonnegative multiple of `16^lambda` whose base-16
/// digits all lie in `{0, 4, 8}`.
pub fn missing_digit_member(n: u128, lambda: u32) -> bool {
    if n % pow16(lambda) != 0 {
        return false;
    }
    let mut n = n;
    while n > 0 {
        if !matches!(n % 16, 0 | 4 | 8) {
            return false;
        }
        n /= 16;
    }
    true
}

/// All members of the missing-digit set below `16^eta`, ascending. There
/// are exactly `3^(eta - lambda)` of them.
pub fn enumerate_missing_digit(lambda: u32, eta: u32) -> Vec<u128> {
    assert!(eta >= lambda);
    let mut out = vec![0u128];
    for k in lambda..eta {
        let step = 4 * pow16(k);
        let mut next = Vec::with_capacity(out.len() * 3);
        for e in 0..3u128 {
            next.extend(out.iter().map(|&v| v + e * step));
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// `(1 + e(4a) + e(8a)) / 3` where `e(x) = exp(2 pi i x)`.
pub fn u_value(alpha: f64) -> Complex64 {
    let e = |x: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * x);
    (Complex64::new(1.0, 0.0) + e(4.0 * alpha) + e(8.0 * alpha)) / 3.0
}

/// Product of `u_value(16^r * ell / d)` over `lambda <= r < nu`, the
/// normalized exponential sum of the missing-digit set. The argument is
/// reduced modulo `d` in exact integer arithmetic before the float forms,
/// so large `r` loses no precision.
pub fn g_product(ell: u64, d: u64, lambda: u32, nu: u32) -> Complex64 {
    assert!(d >= 1 && d % 2 == 1, "modulus must be odd");
    assert!(ell < d);
    let mut acc = Complex64::new(1.0, 0.0);
    let mut pow = pow16_mod(lambda, d);
    for _ in lambda..nu {
        let alpha = (ell * pow % d) as f64 / d as f64;
        let u = u_value(alpha);
        debug_assert!(u.norm() <= 1.0 + 1e-12);
        acc *= u;
        pow = pow * 16 % d;
    }
    acc
}

/// Checks the averaged-sum bound `|(1 + z_1 + ... + z_{q-1}) / q| <=
/// 1 - (1/2q) max_j (1 - Re z_j)` up to `eps`, for unit-disk inputs.
pub fn delange_bound_holds(zs: &[Complex64], eps: f64) -> bool {
    let q = zs.len() + 1;
    debug_assert!(zs.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    let sum = zs.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc + z);
    let lhs = (sum / q as f64).norm();
    let worst = zs.iter().map(|z| 1.0 - z.re).fold(0.0f64, f64::max);
    lhs <= 1.0 - worst / (2.0 * q as f64) + eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Morphism, Word};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn psi4_on(letter: &str, rounds: u32) -> Word {
        let psi = catalog::gap_morphism();
        let mut w = Word::parse(catalog::barred_alphabet(), letter).unwrap();
        for _ in 0..4 * rounds {
            w = psi.apply(&w).unwrap();
        }
        w
    }

    #[test]
    fn lengths_match_literal_expansion() {
        assert_eq!(psi4_lengths(0), (1, 1, 1));
        assert_eq!(psi4_lengths(1), (16, 21, 11));
        for k in 0..=3 {
            let (a, b, c) = psi4_lengths(k);
            assert_eq!(psi4_on("a", k).len() as u128, a);
            assert_eq!(psi4_on("ā", k).len() as u128, a);
            assert_eq!(psi4_on("b", k).len() as u128, b);
            assert_eq!(psi4_on("c", k).len() as u128, c);
        }
    }

    fn literal_count_matrix() -> [[u128; 4]; 4] {
        let mut m = [[0u128; 4]; 4];
        for (i, letter) in ["a", "ā", "b", "c"].iter().enumerate() {
            let img = psi4_on(letter, 1);
            for &s in img.symbols() {
                m[i][s as usize] += 1;
            }
        }
        m
    }

    fn mat_mul(x: &[[u128; 4]; 4], y: &[[u128; 4]; 4]) -> [[u128; 4]; 4] {
        let mut out = [[0u128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|t| x[i][t] * y[t][j]).sum();
            }
        }
        out
    }

    #[test]
    fn count_matrix_closed_form() {
        let m1 = literal_count_matrix();
        assert_eq!(m1, [[4, 4, 4, 4], [4, 4, 4, 4], [5, 5, 6, 5], [3, 3, 2, 3]]);
        let mut power = m1;
        for k in 1..=4u32 {
            assert_eq!(letter_counts_matrix_power(k), power, "k = {k}");
            // row sums are the image lengths
            let (a, b, c) = psi4_lengths(k);
            let sums: Vec<u128> = power.iter().map(|row| row.iter().sum()).collect();
            assert_eq!(sums, vec![a, a, b, c]);
            power = mat_mul(&power, &m1);
        }
    }

    #[test]
    fn position_steps() {
        // at order zero the digit-3 offset is 12 + 1 = 13 and the letter
        // there is 'a'
        let spec = PositionSpec { mu: 0, digits: vec![3] };
        assert_eq!(spec.value(), 13);
        assert!(spec.verify().unwrap());

        let zero = PositionSpec { mu: 0, digits: vec![0, 0] };
        assert_eq!(zero.value(), 0);
        assert!(zero.verify().unwrap());

        let spec = PositionSpec { mu: 1, digits: vec![1, 2] };
        assert_eq!(spec.value(), 4 * 16 + 8 * 256);
        assert!(spec.verify().unwrap());
    }

    #[test]
    fn prefix_reappears_at_every_step_offset() {
        for nu in 0..=1u32 {
            for e in 0..4u8 {
                let spec = PositionSpec { mu: nu, digits: vec![e] };
                assert!(spec.verify().unwrap(), "offset {e} at order {nu}");
            }
        }
    }

    #[test]
    fn residue_search_small_moduli() {
        for m in 1..=12u64 {
            for a in 0..m {
                let hit = hit_residue_class(0, m, a, 24).unwrap();
                assert_eq!(hit.spec.value() % m as u128, a as u128, "m={m} a={a}");
                assert!(hit.spec.verify().unwrap(), "m={m} a={a}");
            }
        }
    }

    #[test]
    fn residue_search_trivial_modulus() {
        let hit = hit_residue_class(0, 1, 0, 4).unwrap();
        assert_eq!(hit.spec.value(), 0);
    }

    #[test]
    fn all_three_digit_positions_form_odd_progression() {
        // successive differences of the all-3 specs are odd and eventually
        // constant modulo 2^k
        for k in 1..=8u32 {
            let mu = k.div_ceil(4);
            let alphas: Vec<u128> = (0..=k + 4)
                .map(|t| PositionSpec { mu, digits: vec![3; t as usize] }.value())
                .collect();
            let m = 1u128 << k;
            let diffs: Vec<u128> =
                alphas.windows(2).map(|p| (p[1] - p[0]) % m).collect();
            for d in &diffs {
                assert_eq!(d % 2, 1, "difference must be odd (k={k})");
            }
            for pair in diffs.windows(2) {
                assert_eq!(pair[0], pair[1], "difference must be constant mod 2^{k}");
            }
        }
    }

    #[test]
    fn missing_digit_counts() {
        for eta in 0..=8u32 {
            let members = enumerate_missing_digit(0, eta);
            assert_eq!(members.len(), 3usize.pow(eta));
            assert!(members.windows(2).all(|p| p[0] < p[1]));
            assert!(members.iter().all(|&n| n < pow16(eta)));
            assert!(members.iter().all(|&n| missing_digit_member(n, 0)));
        }
        // predicate agrees with enumeration on a full small range
        let members = enumerate_missing_digit(1, 3);
        assert_eq!(members.len(), 9);
        let by_scan: Vec<u128> =
            (0..pow16(3)).filter(|&n| missing_digit_member(n, 1)).collect();
        assert_eq!(members, by_scan);
    }

    #[test]
    fn u_and_g_values() {
        assert!((u_value(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // empty product
        assert_eq!(g_product(1, 3, 5, 5), Complex64::new(1.0, 0.0));
        // 16^r = 1 mod 3, and 1 + e(1/3) + e(2/3) = 0: the product collapses
        assert!(g_product(1, 3, 0, 1).norm() < 1e-12);
        // nonincreasing decay with a nontrivial modulus
        let mut prev = f64::INFINITY;
        for nu in 0..=40 {
            let g = g_product(2, 7, 0, nu).norm();
            assert!(g <= prev + 1e-12, "not nonincreasing at nu={nu}");
            prev = g;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn orthogonality_bound() {
        for &d in &[3u64, 5, 7] {
            for lambda in 0..=1u32 {
                for nu in lambda..=6 {
                    let members = enumerate_missing_digit(lambda, nu);
                    let total = members.len() as f64;
                    for a in 0..d {
                        let count =
                            members.iter().filter(|&&n| n % d as u128 == a as u128).count();
                        let lhs = (count as f64 / total - 1.0 / d as f64).abs();
                        let rhs: f64 =
                            (1..d).map(|ell| g_product(ell, d, lambda, nu).norm()).sum();
                        assert!(
                            lhs <= rhs + 1e-9,
                            "d={d} lambda={lambda} nu={nu} a={a}: {lhs} > {rhs}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn delange_bound_cases() {
        use num_complex::Complex64 as C;
        assert!(delange_bound_holds(&[C::new(1.0, 0.0)], 1e-12));
        assert!(delange_bound_holds(&[C::new(-1.0, 0.0)], 1e-12));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let q = rng.gen_range(2..=4usize);
            let zs: Vec<C> = (0..q - 1)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.0..=1.0);
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    C::from_polar(r, theta)
                })
                .collect();
            assert!(delange_bound_holds(&zs, 1e-12));
        }
    }

    #[test]
    fn morphism_word_helper_builds() {
        // keep the barred alphabet order pinned: a, ā, b, c
        let alph = catalog::barred_alphabet();
        assert_eq!(alph.index_of("ā"), Some(1));
        let m = Morphism::from_images(Arc::clone(&alph), Arc::clone(&alph), &["aā", "bc", "aāc", "b"]);
        assert!(m.is_ok());
    }
}
