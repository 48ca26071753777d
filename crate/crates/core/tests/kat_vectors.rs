//! Known-answer vectors run through the full compile and execute path.

mod common;

use common::{kat_path, LONG_KAT, SHORT_KAT, TEAM_KAT, ZERO_STATE_PERMUTED};
use pimhash::engine::{self, Geometry};
use pimhash::kat::parse_kat;
use pimhash::keccak::{self, KeccakState, LaneWidth};
use pimhash::subarray::CycleCostModel;

fn check_file(name: &str, expect_vectors: usize) {
    let text = std::fs::read_to_string(kat_path(name)).unwrap();
    let file = parse_kat(&text).unwrap();
    assert_eq!(file.vectors.len(), expect_vectors, "{name}");
    let msgs: Vec<&[u8]> = file.vectors.iter().map(|v| v.msg.as_slice()).collect();
    let digests = engine::hash_many(&msgs, 256, &CycleCostModel::default()).unwrap();
    for (v, d) in file.vectors.iter().zip(&digests) {
        assert_eq!(d.as_slice(), v.md.as_slice(), "{name} line {} (Len = {})", v.line, v.len_bits);
        assert_eq!(*d, keccak::sha3_256(&v.msg));
    }
}

#[test]
fn nist_short_messages() {
    check_file(SHORT_KAT, 137);
}

#[test]
fn nist_long_messages() {
    check_file(LONG_KAT, 100);
}

#[test]
fn keccak_team_short_messages() {
    check_file(TEAM_KAT, 256);
}

#[test]
fn zero_state_permutation() {
    let (out, _) = engine::permute_batch(
        &[KeccakState::zero(LaneWidth::W64)],
        Geometry { rows: 32, cols: 64 },
        &CycleCostModel::default(),
    )
    .unwrap();
    assert_eq!(out[0].lanes(), &ZERO_STATE_PERMUTED);
}

#[test]
fn single_message_reports_rows() {
    let run = engine::hash_message(&[0xa5; 271], 64, &CycleCostModel::default()).unwrap();
    assert_eq!(run.state_rows_used, 42);
    assert_eq!(run.digests[0], keccak::sha3_256(&[0xa5; 271]));
}
