//! Generates the controller command streams for each Keccak stage on a
//! [`TileLayout`].
//!
//! Intermediate rows are written in place wherever a value is no longer
//! needed, which keeps theta within six scratch rows and chi within five.
//! Pi emits nothing: it only relabels the layout's lane map, and the stages
//! after it address lanes through that map.

use std::collections::HashSet;

use thiserror::Error;

use crate::exec::{account, audit_dataflow, AuditContext, AuditViolation, CycleReport, OpCounts};
use crate::isa::{BinaryKind, Command, CommandStream, Stage};
use crate::keccak::{self, KeccakError, LaneWidth, RATE_LANES};
use crate::layout::{LayoutError, Row, TileLayout};
use crate::subarray::{CycleCostModel, Direction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Keccak(#[from] KeccakError),
    #[error("message block group {group} not allocated (layout has {available})")]
    MissingMessageRows { group: usize, available: usize },
    #[error("rotation by {offset} of a {width}-bit lane cannot be encoded with {index_bits}-bit fields")]
    UnencodableShift { offset: u32, width: u32, index_bits: u8 },
    #[error("SHA3-256 needs 64-bit lanes, layout uses {0}")]
    UnsupportedWidth(u32),
    #[error("compiled schedule failed the dataflow audit: {0}")]
    Audit(#[from] AuditViolation),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompileOptions {
    /// Skip the zero-offset rho shift of lane (0, 0): 24 shifts, 48 cycles.
    pub elide_zero_rho: bool,
}

/// One stage's command fragment plus its static properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSchedule {
    pub stage: Stage,
    pub stream: CommandStream,
    pub intermediate_live_max: usize,
    pub distinct_intermediates: usize,
    pub in_place_writes: usize,
    pub ops: OpCounts,
}

pub fn audit_context(layout: &TileLayout) -> AuditContext {
    let mut state_rows: HashSet<Row> = layout.lane_rows().iter().copied().collect();
    for group in layout.message_rows() {
        state_rows.extend(group.iter().copied());
    }
    AuditContext { state_rows, scratch_rows: layout.intermediate_rows().iter().copied().collect() }
}

fn finish(stage: Stage, stream: CommandStream, layout: &TileLayout) -> Result<StageSchedule, CompileError> {
    let mut ops = OpCounts::default();
    for cmd in stream.commands() {
        ops.add(cmd);
    }
    let audits = audit_dataflow(&stream, &audit_context(layout))?;
    let (live, distinct, in_place) = audits.iter().fold((0, 0, 0), |acc, (_, a)| {
        (acc.0.max(a.max_live_scratch), acc.1.max(a.distinct_scratch), acc.2 + a.in_place_writes)
    });
    Ok(StageSchedule {
        stage,
        stream,
        intermediate_live_max: live,
        distinct_intermediates: distinct,
        in_place_writes: in_place,
        ops,
    })
}

fn xor(result: Row, lhs: Row, rhs: Row) -> Command {
    Command::Binary { result, lhs, rhs, kind: BinaryKind::Xor }
}

/// Rotation command for `offset` bits toward higher z, switched to the
/// complementary right rotation when the offset does not fit the field.
fn rotate_left_cmd(
    layout: &TileLayout,
    result: Row,
    operand: Row,
    offset: u32,
) -> Result<Command, CompileError> {
    let w = layout.width().bits();
    let k = layout.index_bits();
    let field_max = if k >= 6 { 63 } else { (1u32 << k) - 1 };
    let (offset, direction) = if offset <= field_max {
        (offset, Direction::Left)
    } else if (w - offset) % w <= field_max {
        ((w - offset) % w, Direction::Right)
    } else {
        return Err(CompileError::UnencodableShift { offset, width: w, index_bits: k });
    };
    Ok(Command::Shift { result, operand, offset: offset as u8, direction })
}

/// Sheet parities, their one-bit rotations, and the 25 lane updates.
///
/// Scratch usage (`I0..I5`): C1 is rotated into I5 and combined with C4 to
/// give FT0. The other FT values are each produced by rotating a parity in
/// place once its unrotated use is finished, then XORing in place.
pub fn compile_theta(layout: &TileLayout) -> Result<StageSchedule, CompileError> {
    let i = *layout.intermediate_rows();
    let lane = |x: usize, y: usize| layout.lane_row(x, y);
    let mut s = CommandStream::new();
    let parity = |s: &mut CommandStream, x: usize, dst: Row| {
        s.push(Stage::Theta, xor(dst, lane(x, 0), lane(x, 1)));
        for y in 2..5 {
            s.push(Stage::Theta, xor(dst, dst, lane(x, y)));
        }
    };

    parity(&mut s, 1, i[1]);
    s.push(Stage::Theta, rotate_left_cmd(layout, i[5], i[1], 1)?);
    parity(&mut s, 4, i[4]);
    s.push(Stage::Theta, xor(i[5], i[4], i[5])); // FT0 = C4 ^ CT1
    parity(&mut s, 0, i[0]);
    parity(&mut s, 2, i[2]);
    parity(&mut s, 3, i[3]);
    // (rotate in place, plain partner) -> FT[x] = C[x-1] ^ CT[x+1]
    for (rotated, plain) in [(4, 2), (2, 0), (0, 3), (3, 1)] {
        s.push(Stage::Theta, rotate_left_cmd(layout, i[rotated], i[rotated], 1)?);
        s.push(Stage::Theta, xor(i[rotated], i[plain], i[rotated]));
    }
    // FT0..FT4 now sit in I5, I2, I3, I4, I0.
    let ft = [i[5], i[2], i[3], i[4], i[0]];
    for (x, &ft_row) in ft.iter().enumerate() {
        for y in 0..5 {
            let row = lane(x, y);
            s.push(Stage::Theta, xor(row, row, ft_row));
        }
    }
    finish(Stage::Theta, s, layout)
}

pub fn compile_rho(layout: &TileLayout, opts: CompileOptions) -> Result<StageSchedule, CompileError> {
    let w = layout.width();
    let mut s = CommandStream::new();
    for y in 0..5 {
        for x in 0..5 {
            let offset = keccak::rho_offset(w, x, y);
            if offset == 0 && opts.elide_zero_rho {
                continue;
            }
            let row = layout.lane_row(x, y);
            s.push(Stage::Rho, rotate_left_cmd(layout, row, row, offset)?);
        }
    }
    finish(Stage::Rho, s, layout)
}

/// No commands; relabels the lane map.
pub fn compile_pi(layout: &mut TileLayout) -> Result<StageSchedule, CompileError> {
    layout.apply_pi_remap();
    finish(Stage::Pi, CommandStream::new(), layout)
}

/// Plane by plane: NOT each lane into scratch, AND with the next lane in
/// place, then XOR back into the lane rows.
pub fn compile_chi(layout: &TileLayout) -> Result<StageSchedule, CompileError> {
    let i = *layout.intermediate_rows();
    let mut s = CommandStream::new();
    for y in 0..5 {
        let lane = |x: usize| layout.lane_row(x % 5, y);
        for (x, &scratch) in i.iter().take(5).enumerate() {
            s.push(Stage::Chi, Command::Unary { result: scratch, operand: lane(x) });
        }
        for (x, &scratch) in i.iter().take(5).enumerate() {
            // I[x] = !A[x] & A[x+1]
            s.push(
                Stage::Chi,
                Command::Binary { result: scratch, lhs: scratch, rhs: lane(x + 1), kind: BinaryKind::And },
            );
        }
        for x in 0..5 {
            s.push(Stage::Chi, xor(lane(x), lane(x), i[(x + 1) % 5]));
        }
    }
    finish(Stage::Chi, s, layout)
}

pub fn compile_iota(layout: &TileLayout, round: usize) -> Result<StageSchedule, CompileError> {
    let rc = keccak::round_constant(layout.width(), round)?;
    let scratch = layout.intermediate_rows()[0];
    let lane = layout.lane_row(0, 0);
    let mut s = CommandStream::new();
    s.push(Stage::Iota, Command::Load { result: scratch, rc });
    s.push(Stage::Iota, xor(lane, lane, scratch));
    finish(Stage::Iota, s, layout)
}

/// XORs message block group `group` into the 17 rate lanes.
pub fn compile_absorb(layout: &TileLayout, group: usize) -> Result<StageSchedule, CompileError> {
    let rows = layout
        .message_rows()
        .get(group)
        .ok_or(CompileError::MissingMessageRows { group, available: layout.message_rows().len() })?;
    let mut s = CommandStream::new();
    for (idx, &msg_row) in rows.iter().enumerate() {
        let lane = layout.lane_row(idx % 5, idx / 5);
        s.push(Stage::Absorb, xor(lane, lane, msg_row));
    }
    finish(Stage::Absorb, s, layout)
}

#[derive(Debug, Clone)]
pub struct CompiledRound {
    pub stream: CommandStream,
    pub report: CycleReport,
    /// Theta, rho, pi, chi, iota.
    pub stages: Vec<StageSchedule>,
}

pub fn compile_round(
    layout: &mut TileLayout,
    round: usize,
    cost: &CycleCostModel,
    opts: CompileOptions,
) -> Result<CompiledRound, CompileError> {
    let rounds = layout.width().rounds();
    if round >= rounds {
        return Err(KeccakError::RoundOutOfRange { index: round, rounds }.into());
    }
    let stages = vec![
        compile_theta(layout)?,
        compile_rho(layout, opts)?,
        compile_pi(layout)?,
        compile_chi(layout)?,
        compile_iota(layout, round)?,
    ];
    let mut stream = CommandStream::new();
    for st in &stages {
        stream.extend(&st.stream);
    }
    let report = account(&stream, cost);
    Ok(CompiledRound { stream, report, stages })
}

/// All rounds of Keccak-f for the layout's lane width.
pub fn compile_permutation(
    layout: &mut TileLayout,
    cost: &CycleCostModel,
    opts: CompileOptions,
) -> Result<(CommandStream, CycleReport), CompileError> {
    let mut stream = CommandStream::new();
    for round in 0..layout.width().rounds() {
        stream.extend(&compile_round(layout, round, cost, opts)?.stream);
    }
    let report = account(&stream, cost);
    Ok((stream, report))
}

/// Command stream and readout plan for hashing one message length.
#[derive(Debug, Clone)]
pub struct HashProgram {
    pub stream: CommandStream,
    pub report: CycleReport,
    pub blocks: usize,
    /// Physical rows of lanes (0,0), (1,0), (2,0), (3,0) after the last round.
    pub digest_rows: [Row; 4],
    /// Lane plus message rows occupied (intermediates excluded).
    pub state_rows_used: usize,
}

/// The first block is loaded straight into the lane rows (the initial state
/// is zero), later blocks into their own 17-row groups, absorbed before each
/// subsequent permutation.
pub fn compile_hash(
    layout: &mut TileLayout,
    message: &[u8],
    cost: &CycleCostModel,
    opts: CompileOptions,
) -> Result<HashProgram, CompileError> {
    compile_hash_for_len(layout, message.len(), cost, opts)
}

pub fn compile_hash_for_len(
    layout: &mut TileLayout,
    message_len: usize,
    cost: &CycleCostModel,
    opts: CompileOptions,
) -> Result<HashProgram, CompileError> {
    if layout.width() != LaneWidth::W64 {
        return Err(CompileError::UnsupportedWidth(layout.width().bits()));
    }
    let blocks = keccak::sha3_256_block_count(message_len);
    layout.reserve_message_blocks(blocks)?;
    let mut stream = CommandStream::new();
    let start_map = *layout.perm_map();
    let (perm, _) = compile_permutation(layout, cost, opts)?;
    // Pi has order 24, so every block's permutation sees the same lane map.
    let repeatable = *layout.perm_map() == start_map;
    for block in 0..blocks {
        if block > 0 {
            stream.extend(&compile_absorb(layout, block - 1)?.stream);
            if repeatable {
                stream.extend(&perm);
            } else {
                stream.extend(&compile_permutation(layout, cost, opts)?.0);
            }
        } else {
            stream.extend(&perm);
        }
    }
    let report = account(&stream, cost);
    Ok(HashProgram {
        stream,
        report,
        blocks,
        digest_rows: std::array::from_fn(|x| layout.lane_row(x, 0)),
        state_rows_used: layout.state_rows_used(),
    })
}

/// Lane index `x + 5y` of each rate word in a block, in block order.
pub fn rate_lane_coords() -> [(usize, usize); RATE_LANES] {
    std::array::from_fn(|i| (i % 5, i / 5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> TileLayout {
        TileLayout::build(256, 256, LaneWidth::W64).unwrap()
    }

    #[test]
    fn theta_counts_and_liveness() {
        let st = compile_theta(&layout()).unwrap();
        assert_eq!(st.ops.xor, 50);
        assert_eq!(st.ops.shift, 5);
        assert_eq!(st.ops.total(), 55);
        assert_eq!(st.intermediate_live_max, 6);
        assert!(st.in_place_writes >= 8);
    }

    #[test]
    fn rho_counts() {
        let l = layout();
        let st = compile_rho(&l, CompileOptions::default()).unwrap();
        assert_eq!(st.ops.shift, 25);
        let lane20 = l.lane_row(2, 0);
        let cmd = st.stream.commands().find(|c| c.result() == lane20).unwrap();
        assert_eq!(
            *cmd,
            Command::Shift { result: lane20, operand: lane20, offset: 62, direction: Direction::Left }
        );
        let elided = compile_rho(&l, CompileOptions { elide_zero_rho: true }).unwrap();
        assert_eq!(elided.ops.shift, 24);
    }

    #[test]
    fn rho_on_32_rows_uses_short_direction() {
        let l = TileLayout::build(32, 256, LaneWidth::W64).unwrap();
        let st = compile_rho(&l, CompileOptions::default()).unwrap();
        let lane20 = l.lane_row(2, 0);
        let cmd = st.stream.commands().find(|c| c.result() == lane20).unwrap();
        assert_eq!(
            *cmd,
            Command::Shift { result: lane20, operand: lane20, offset: 2, direction: Direction::Right }
        );
        assert!(st.stream.encode(5).is_ok());
    }

    #[test]
    fn pi_is_free() {
        let mut l = layout();
        let before = l.lane_row(1, 0);
        let st = compile_pi(&mut l).unwrap();
        assert!(st.stream.is_empty());
        assert_eq!(l.lane_row(0, 2), before);
    }

    #[test]
    fn chi_counts_and_liveness() {
        let st = compile_chi(&layout()).unwrap();
        assert_eq!((st.ops.unary, st.ops.and, st.ops.xor), (25, 25, 25));
        assert_eq!(st.intermediate_live_max, 5);
        assert_eq!(st.distinct_intermediates, 5);
    }

    #[test]
    fn iota_payload() {
        let st = compile_iota(&layout(), 0).unwrap();
        assert_eq!(st.stream.len(), 2);
        assert!(matches!(st.stream.entries()[0].command, Command::Load { rc: 1, .. }));
        assert!(compile_iota(&layout(), 24).is_err());
    }

    #[test]
    fn round_is_564_cycles() {
        let mut l = layout();
        let r = compile_round(&mut l, 0, &CycleCostModel::default(), CompileOptions::default()).unwrap();
        assert_eq!(
            (r.report.theta, r.report.rho, r.report.pi, r.report.chi, r.report.iota),
            (210, 50, 0, 300, 4)
        );
        assert_eq!(r.report.total, 564);
        assert_eq!(r.stream.len(), 157);
    }

    #[test]
    fn absorb_needs_rows() {
        let l = layout();
        assert_eq!(
            compile_absorb(&l, 0).unwrap_err(),
            CompileError::MissingMessageRows { group: 0, available: 0 }
        );
        let mut l = layout();
        l.reserve_message_blocks(3).unwrap();
        let st = compile_absorb(&l, 1).unwrap();
        assert_eq!(st.ops.xor, 17);
        assert_eq!(account(&st.stream, &CycleCostModel::default()).absorb, 68);
    }

    #[test]
    fn hash_program_shape() {
        let mut l = layout();
        let p =
            compile_hash(&mut l, &[0u8; 271], &CycleCostModel::default(), CompileOptions::default()).unwrap();
        assert_eq!(p.blocks, 2);
        assert_eq!(p.state_rows_used, 42);
        assert_eq!(p.report.absorb, 68);
        assert_eq!(p.report.round_cycles(), 2 * 24 * 564);
        let mut narrow = TileLayout::build(32, 256, LaneWidth::new(32).unwrap()).unwrap();
        assert_eq!(
            compile_hash(&mut narrow, b"", &CycleCostModel::default(), CompileOptions::default())
                .unwrap_err(),
            CompileError::UnsupportedWidth(32)
        );
        let mut small = TileLayout::build(32, 256, LaneWidth::W64).unwrap();
        assert!(matches!(
            compile_hash(&mut small, &[0u8; 271], &CycleCostModel::default(), CompileOptions::default()),
            Err(CompileError::Layout(LayoutError::CapacityExceeded { .. }))
        ));
    }
}
