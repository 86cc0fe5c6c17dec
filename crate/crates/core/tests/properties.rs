//! Property tests for the algebraic plumbing.

use std::sync::Arc;

use proptest::prelude::*;

use gapseq::transducer::{Third, WeightedTransducer};
use gapseq::{catalog, Word};

fn ternary_word(letters: &[u8]) -> Word {
    Word::from_symbols(catalog::ternary_alphabet(), letters.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn morphism_application_is_concatenative(
        u in proptest::collection::vec(0u8..3, 0..40),
        v in proptest::collection::vec(0u8..3, 0..40),
    ) {
        let phi = catalog::ternary_morphism();
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let left = phi.apply(&ternary_word(&uv)).unwrap();
        let mut right = phi.apply(&ternary_word(&u)).unwrap().symbols().to_vec();
        right.extend_from_slice(phi.apply(&ternary_word(&v)).unwrap().symbols());
        prop_assert_eq!(left.symbols(), &right[..]);
    }

    #[test]
    fn gap_blocks_invert(letters in proptest::collection::vec(0u8..3, 0..64)) {
        let w = ternary_word(&letters);
        let gaps = catalog::gap_blocks().apply(&w).unwrap();
        prop_assert_eq!(catalog::invert_gap_blocks(&gaps).unwrap(), w);

        // the split variant lands on the four-letter alphabet consistently
        let split = catalog::invert_gap_blocks_split(&gaps).unwrap();
        let coded = catalog::gap_coding().apply(&split).unwrap();
        prop_assert_eq!(coded, gaps);
    }

    #[test]
    fn thirds_form_an_additive_group(a in -1000i64..1000, b in -1000i64..1000) {
        let (x, y) = (Third::thirds(a), Third::thirds(b));
        prop_assert_eq!(x + y, y + x);
        prop_assert_eq!(x - y, -(y - x));
        prop_assert_eq!(x + Third::ZERO, x);
        prop_assert_eq!(x + (-x), Third::ZERO);
        prop_assert_eq!(Third::from_integer(a).as_integer(), Some(a));
    }

    #[test]
    fn occurrences_are_stable_under_extension(
        start in 0usize..2000,
        len in 1usize..8,
        h1 in 64usize..1024,
        extra in 0usize..1024,
    ) {
        let tm = catalog::thue_morse();
        let w = tm.prefix(start + len).unwrap().slice(start..start + len);
        let small = tm.occurrences(&w, h1).unwrap();
        let large = tm.occurrences(&w, h1 + extra).unwrap();
        prop_assert!(small.len() <= large.len());
        prop_assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn random_transducers_roundtrip(
        base in 2u32..5,
        n_states in 1usize..5,
        seed in any::<u64>(),
        inputs in proptest::collection::vec(0u128..100_000, 4),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let states: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
        let mut edges = Vec::new();
        for s in 0..n_states {
            for d in 0..base {
                if s == 0 && d == 0 {
                    edges.push((0, Third::ZERO)); // keep the start zero-loop
                } else {
                    edges.push((rng.gen_range(0..n_states), Third::thirds(rng.gen_range(-3..=3))));
                }
            }
        }
        let t = WeightedTransducer::new(base, states, 0, edges, 1).unwrap();
        let text = t.dump();
        let parsed = WeightedTransducer::parse(&text).unwrap();
        prop_assert_eq!(parsed.dump(), text);
        for &n in &inputs {
            prop_assert_eq!(parsed.run(n), t.run(n));
        }
    }
}

#[test]
fn words_display_roundtrip() {
    // single-char alphabets render dense and reparse; multi-char ones split
    let tm = catalog::thue_morse().prefix(64).unwrap();
    let reparsed = Word::parse(catalog::binary_alphabet(), &tm.to_string()).unwrap();
    assert_eq!(reparsed, tm);

    let abar = catalog::berstel_word().prefix(64).unwrap();
    let reparsed = Word::parse(catalog::berstel_alphabet(), &abar.to_string()).unwrap();
    assert_eq!(reparsed, abar);

    let bbar = catalog::gap_preimage().prefix(64).unwrap();
    let reparsed = Word::parse(Arc::clone(bbar.alphabet()), &bbar.to_string()).unwrap();
    assert_eq!(reparsed, bbar);
}
