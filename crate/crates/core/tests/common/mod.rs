#![allow(dead_code)]

use std::path::PathBuf;

use pimhash::compiler::{self, CompileOptions, StageSchedule};
use pimhash::engine;
use pimhash::isa::{BinaryKind, Command, MAX_SHIFT};
use pimhash::keccak::{self, KeccakState, LaneWidth};
use pimhash::layout::{Row, TileLayout};
use pimhash::subarray::{BitlineOp, CycleCostModel, Direction};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Keccak-f[1600] applied once to the all-zero state, lanes in x + 5y order.
pub const ZERO_STATE_PERMUTED: [u64; 25] = [
    0xF1258F7940E1DDE7,
    0x84D5CCF933C0478A,
    0xD598261EA65AA9EE,
    0xBD1547306F80494D,
    0x8B284E056253D057,
    0xFF97A42D7F8E6FD4,
    0x90FEE5A0A44647C4,
    0x8C5BDA0CD6192E76,
    0xAD30A6F71B19059C,
    0x30935AB7D08FFC64,
    0xEB5AA93F2317D635,
    0xA9A6E6260D712103,
    0x81A57C16DBCF555F,
    0x43B831CD0347C826,
    0x01F22F1A11A5569F,
    0x05E5635A21D9AE61,
    0x64BEFEF28CC970F2,
    0x613670957BC46611,
    0xB87C5A554FD00ECB,
    0x8C3EE88A1CCF32C8,
    0x940C7922AE3A2614,
    0x1841F924A2C509E4,
    0x16F53526E70465C2,
    0x75F644E97F30A13B,
    0xEAF1FF7B5CECA249,
];

pub const SHORT_KAT: &str = "SHA3_256ShortMsg.rsp";
pub const LONG_KAT: &str = "SHA3_256LongMsg.rsp";
pub const TEAM_KAT: &str = "ShortMsgKAT_SHA3-256.txt";

pub fn kat_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("kat").join(name)
}

pub fn random_state(rng: &mut impl Rng, width: LaneWidth) -> KeccakState {
    let mask = width.mask();
    KeccakState::from_lanes(width, std::array::from_fn(|_| rng.gen::<u64>() & mask))
}

pub fn arb_command(k: u8) -> impl Strategy<Value = Command> {
    let max_row = ((1u32 << k) - 1) as Row;
    let max_off = if k >= 6 { MAX_SHIFT } else { ((1u32 << k) - 1) as u8 };
    let binary = (0..=max_row, 0..=max_row, 0..=max_row, any::<bool>())
        .prop_filter("distinct operands", |(_, a, b, _)| a != b)
        .prop_map(|(result, lhs, rhs, and)| Command::Binary {
            result,
            lhs,
            rhs,
            kind: if and { BinaryKind::And } else { BinaryKind::Xor },
        });
    prop_oneof![
        (0..=max_row, any::<u64>()).prop_map(|(result, rc)| Command::Load { result, rc }),
        (0..=max_row, 0..=max_row).prop_map(|(result, operand)| Command::Unary { result, operand }),
        (0..=max_row, 0..=max_row, 0..=max_off, any::<bool>()).prop_map(
            |(result, operand, offset, right)| {
                Command::Shift {
                    result,
                    operand,
                    offset,
                    direction: if right { Direction::Right } else { Direction::Left },
                }
            }
        ),
        binary,
    ]
}

pub fn arb_k_and_command() -> impl Strategy<Value = (u8, Command)> {
    (5u8..=12).prop_flat_map(|k| (Just(k), arb_command(k)))
}

pub type Build = fn(&mut TileLayout, usize) -> StageSchedule;
pub type Oracle = fn(&KeccakState, usize) -> KeccakState;

pub fn stage_cases() -> Vec<(&'static str, Build, Oracle)> {
    vec![
        ("theta", |l, _| compiler::compile_theta(l).unwrap(), |s, _| keccak::theta(s)),
        ("rho", |l, _| compiler::compile_rho(l, CompileOptions::default()).unwrap(), |s, _| keccak::rho(s)),
        ("pi", |l, _| compiler::compile_pi(l).unwrap(), |s, _| keccak::pi(s)),
        ("chi", |l, _| compiler::compile_chi(l).unwrap(), |s, _| keccak::chi(s)),
        ("iota", |l, r| compiler::compile_iota(l, r).unwrap(), |s, r| keccak::iota(s, r).unwrap()),
    ]
}

/// Runs one compiled stage over `count` random states on a 32x256 subarray,
/// with the lane map advanced by a varying number of pi relabelings first.
pub fn check_stage(
    width: LaneWidth,
    name: &str,
    build: Build,
    oracle: Oracle,
    count: usize,
    seed: u64,
) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let cost = CycleCostModel::default();
    let mut done = 0;
    let mut batch_no = 0;
    while done < count {
        let mut before = TileLayout::build(32, 256, width).unwrap();
        for _ in 0..batch_no % 24 {
            before.apply_pi_remap();
        }
        let round = batch_no % width.rounds();
        let mut after = before.clone();
        let schedule = build(&mut after, round);
        let n = (count - done).min(before.tile_count());
        let states: Vec<_> = (0..n).map(|_| random_state(&mut rng, width)).collect();
        let out = engine::run_stream_on_states(&schedule.stream, &before, &after, &states, &cost)
            .map_err(|e| e.to_string())?;
        for (s, o) in states.iter().zip(&out) {
            if *o != oracle(s, round) {
                return Err(format!("{name} w={} differs in batch {batch_no}", width.bits()));
            }
        }
        done += n;
        batch_no += 1;
    }
    Ok(())
}

pub type BitOracle = fn(bool, bool) -> bool;

/// Bitline operations with their per-column boolean definitions.
pub const BITLINE_ORACLES: [(BitlineOp, BitOracle); 4] = [
    (BitlineOp::And, |x, y| x & y),
    (BitlineOp::Nor, |x, y| !(x | y)),
    (BitlineOp::Xor, |x, y| x ^ y),
    (BitlineOp::Not, |x, _| !x),
];
