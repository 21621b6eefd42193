mod common;

use num_traits::One;
use proptest::prelude::*;

use cnr_core::cipher::{self, wire, SessionHeader};
use cnr_core::codec::{
    build_huffman, parse_space, trim_code, verify_prefix_free, write_space, wrap_external, Codebook, FnCompressor,
    MessageSpace,
};
use cnr_core::keystore::{KeyPool, SeededRandom};
use cnr_core::{BigRational, BitString, Error, FloatSpace, KeySource, SingleSpace};

use common::*;

fn weights() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..500, 1..40)
}

fn exact(ws: &[u32]) -> cnr_core::ExactSpace {
    let total: i64 = ws.iter().map(|&w| i64::from(w)).sum();
    MessageSpace::new(index_messages(ws.len()), ws.iter().map(|&w| q(i64::from(w), total)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn huffman_is_complete_and_prefix_free(ws in weights()) {
        let space = exact(&ws);
        let code = build_huffman(&space).unwrap();
        prop_assert!(verify_prefix_free(code.codewords()));
        prop_assert!(code.covers_exactly(&space));
        if ws.len() > 1 {
            prop_assert_eq!(code.kraft_sum(), BigRational::one());
        }
    }

    #[test]
    fn trimmed_never_longer_than_cap(ws in prop::collection::vec(1u32..500, 2..40)) {
        let space = exact(&ws);
        let huffman = build_huffman(&space).unwrap();
        let trimmed = trim_code(&huffman, &space).unwrap();
        prop_assert!(trimmed.verify_prefix_free());
        prop_assert!(trimmed.max_len() <= ceil_log2(ws.len()) + 1);
        let kraft = trimmed.kraft_sum();
        prop_assert!(kraft <= BigRational::one());
        for i in 0..ws.len() {
            prop_assert!(trimmed.codeword(i).len() <= huffman.codeword(i).len() + 1);
        }
    }

    #[test]
    fn scalar_types_agree_on_optimal_average(ws in weights()) {
        let total: u32 = ws.iter().sum();
        let space = exact(&ws);
        let e = build_huffman(&space).unwrap();
        let f = build_huffman(&FloatSpace::new(
            index_messages(ws.len()),
            ws.iter().map(|&w| f64::from(w) / f64::from(total)).collect(),
        ).unwrap()).unwrap();
        // rounding may break ties differently; both must still be optimal
        prop_assert_eq!(e.average_length(&space).unwrap(), f.average_length(&space).unwrap());
    }

    #[test]
    fn space_text_round_trips(ws in weights()) {
        let space = exact(&ws);
        let back: cnr_core::ExactSpace = parse_space(&write_space(&space)).unwrap();
        prop_assert_eq!(back.probs(), space.probs());
        prop_assert_eq!(back.messages(), space.messages());
    }

    #[test]
    fn codebook_text_round_trips(ws in weights()) {
        let space = exact(&ws);
        let book = Codebook::new("huffman", build_huffman(&space).unwrap());
        let back = Codebook::parse(&book.to_text()).unwrap();
        prop_assert_eq!(back.code.fingerprint(), book.code.fingerprint());
        prop_assert_eq!(back.to_text(), book.to_text());
    }

    #[test]
    fn session_files_round_trip(ws in prop::collection::vec(1u32..50, 2..20), seed in any::<u64>(), picks in prop::collection::vec(0usize..20, 1..10)) {
        let space = exact(&ws);
        let code = build_huffman(&space).unwrap();
        let mut key_rng = SeededRandom::insecure_from_seed(seed);
        let mut sender = KeyPool::generate(picks.len() * code.max_len(), &mut key_rng).unwrap();
        let mut receiver = sender.clone();
        let mut pad = SeededRandom::insecure_from_seed(seed ^ 1);
        let sent: Vec<Vec<u8>> = picks.iter().map(|&i| space.message(i % ws.len()).to_vec()).collect();
        let frames: Vec<_> = sent
            .iter()
            .map(|m| cipher::encrypt(m, &code, &mut sender, &mut pad).unwrap().ciphertext)
            .collect();
        let bytes = wire::write_session(&SessionHeader::for_code(&code), &frames, &mut pad).unwrap();
        let (header, back) = wire::read_session(&bytes).unwrap();
        header.check(&code).unwrap();
        for (c, m) in back.iter().zip(&sent) {
            prop_assert_eq!(cipher::decrypt(c, &code, &mut receiver).unwrap(), &m[..]);
        }
        prop_assert_eq!(receiver.cursor(), sender.cursor());
    }

    #[test]
    fn failed_decryption_consumes_nothing(ws in prop::collection::vec(1u32..50, 2..12), seed in any::<u64>()) {
        let space = exact(&ws);
        let code = build_huffman(&space).unwrap();
        let mut key_rng = SeededRandom::insecure_from_seed(seed);
        let mut pool = KeyPool::generate(4 * code.max_len(), &mut key_rng).unwrap();
        let wrong_length = cipher::Ciphertext::from_bits(BitString::zeros(code.max_len() + 1));
        prop_assert!(matches!(cipher::decrypt(&wrong_length, &code, &mut pool), Err(Error::DecryptionFailed(_))));
        prop_assert_eq!(pool.cursor(), 0);
    }

    #[test]
    fn external_wrapping_is_prefix_free(outputs in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..4), 2..12)) {
        let n = outputs.len();
        let space = MessageSpace::<f64>::uniform(index_messages(n)).unwrap();
        let table = outputs.clone();
        let c = FnCompressor::new("table", move |m: &[u8]| BitString::from_whole_bytes(&table[m[0] as usize]));
        let code = wrap_external(&c, &space).unwrap();
        prop_assert!(code.verify_prefix_free());
        prop_assert!(code.covers_exactly(&space));
    }
}

#[test]
fn single_precision_space_builds() {
    let space = SingleSpace::new(index_messages(4), vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let code = build_huffman(&space).unwrap();
    let lens: Vec<usize> = code.codewords().map(BitString::len).collect();
    assert_eq!(lens, [1, 2, 3, 3]);
}

#[test]
fn exhausted_pool_refuses_and_keeps_cursor() {
    let space = exact(&[1, 1]);
    let code = build_huffman(&space).unwrap();
    let mut pool = KeyPool::generate(1, &mut SeededRandom::insecure_from_seed(3)).unwrap();
    let mut pad = SeededRandom::insecure_from_seed(4);
    cipher::encrypt(&[0], &code, &mut pool, &mut pad).unwrap();
    let err = cipher::encrypt(&[1], &code, &mut pool, &mut pad).unwrap_err();
    assert!(matches!(err, Error::KeyExhausted { requested: 1, remaining: 0 }));
    assert_eq!(pool.cursor(), 1);
}
