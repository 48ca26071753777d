//! Broadcast executor: applies a command stream to a subarray and charges
//! cycles from a [`CycleCostModel`]. Every tile of a row is driven by the same
//! command in the same cycle.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::isa::{BinaryKind, Command, CommandStream, Opcode, Stage};
use crate::layout::Row;
use crate::subarray::{BitlineOp, CycleCostModel, Subarray, SubarrayError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("command {index} ({command}): {source}")]
    Subarray {
        index: usize,
        command: Command,
        #[source]
        source: SubarrayError,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub load: u64,
    pub unary: u64,
    pub shift: u64,
    pub xor: u64,
    pub and: u64,
}

impl OpCounts {
    pub fn add(&mut self, cmd: &Command) {
        match cmd {
            Command::Load { .. } => self.load += 1,
            Command::Unary { .. } => self.unary += 1,
            Command::Shift { .. } => self.shift += 1,
            Command::Binary { kind: BinaryKind::Xor, .. } => self.xor += 1,
            Command::Binary { kind: BinaryKind::And, .. } => self.and += 1,
        }
    }

    /// Bitline logic commands (NOT, AND, XOR).
    pub fn logic(&self) -> u64 {
        self.unary + self.xor + self.and
    }

    pub fn total(&self) -> u64 {
        self.load + self.unary + self.shift + self.xor + self.and
    }

    pub fn merge(&mut self, other: &OpCounts) {
        self.load += other.load;
        self.unary += other.unary;
        self.shift += other.shift;
        self.xor += other.xor;
        self.and += other.and;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub theta: u64,
    pub rho: u64,
    pub pi: u64,
    pub chi: u64,
    pub iota: u64,
    pub absorb: u64,
    pub total: u64,
    pub ops: OpCounts,
}

impl CycleReport {
    pub fn stage(&self, stage: Stage) -> u64 {
        match stage {
            Stage::Theta => self.theta,
            Stage::Rho => self.rho,
            Stage::Pi => self.pi,
            Stage::Chi => self.chi,
            Stage::Iota => self.iota,
            Stage::Absorb => self.absorb,
        }
    }

    fn stage_mut(&mut self, stage: Stage) -> &mut u64 {
        match stage {
            Stage::Theta => &mut self.theta,
            Stage::Rho => &mut self.rho,
            Stage::Pi => &mut self.pi,
            Stage::Chi => &mut self.chi,
            Stage::Iota => &mut self.iota,
            Stage::Absorb => &mut self.absorb,
        }
    }

    /// Permutation-round cycles, absorption excluded.
    pub fn round_cycles(&self) -> u64 {
        self.theta + self.rho + self.pi + self.chi + self.iota
    }

    pub fn charge(&mut self, stage: Stage, cmd: &Command, cost: &CycleCostModel) -> u64 {
        let c = command_cycles(cmd, cost);
        *self.stage_mut(stage) += c;
        self.total += c;
        self.ops.add(cmd);
        c
    }

    pub fn merge(&mut self, other: &CycleReport) {
        for s in Stage::ALL {
            *self.stage_mut(s) += other.stage(s);
        }
        self.total += other.total;
        self.ops.merge(&other.ops);
    }

    /// Sum of the per-stage counters; equals `total` for any report built by
    /// charging commands.
    pub fn sum_of_parts(&self) -> u64 {
        Stage::ALL.iter().map(|&s| self.stage(s)).sum()
    }
}

pub fn command_cycles(cmd: &Command, cost: &CycleCostModel) -> u64 {
    match cmd.opcode() {
        Opcode::Load => cost.load_cycles,
        Opcode::Shift => cost.shift_cycles,
        Opcode::Unary | Opcode::Binary => cost.logic_op_cycles,
    }
}

/// Cycle accounting for a stream without touching any subarray; the same
/// numbers `execute` reports, since costs never depend on data.
pub fn account(stream: &CommandStream, cost: &CycleCostModel) -> CycleReport {
    let mut report = CycleReport::default();
    for e in stream.entries() {
        report.charge(e.stage, &e.command, cost);
    }
    report
}

fn apply(sub: &mut Subarray, cmd: &Command) -> Result<(), SubarrayError> {
    match *cmd {
        Command::Load { result, rc } => sub.fill_segments(result as usize, rc),
        Command::Unary { result, operand } => {
            sub.bitline_op_into(BitlineOp::Not, operand as usize, None, result as usize)
        }
        Command::Shift { result, operand, offset, direction } => {
            sub.rotate_segmented(operand as usize, result as usize, offset as u32, direction)
        }
        Command::Binary { result, lhs, rhs, kind } => {
            let op = match kind {
                BinaryKind::Xor => BitlineOp::Xor,
                BinaryKind::And => BitlineOp::And,
            };
            sub.bitline_op_into(op, lhs as usize, Some(rhs as usize), result as usize)
        }
    }
}

/// Runs every command in order against `sub`.
pub fn execute(
    stream: &CommandStream,
    sub: &mut Subarray,
    cost: &CycleCostModel,
) -> Result<CycleReport, ExecError> {
    let mut report = CycleReport::default();
    for (index, e) in stream.entries().iter().enumerate() {
        apply(sub, &e.command).map_err(|source| ExecError::Subarray { index, command: e.command, source })?;
        report.charge(e.stage, &e.command, cost);
    }
    Ok(report)
}

/// One line per command: `cycle_start opcode result op1 op2/off stage`.
pub fn render_trace(stream: &CommandStream, cost: &CycleCostModel) -> String {
    let mut out = String::new();
    let mut cycle = 0u64;
    for e in stream.entries() {
        let _ = writeln!(out, "{cycle} {} {}", e.command, e.stage);
        cycle += command_cycles(&e.command, cost);
    }
    out
}

/// Which rows hold data going into a stream, and which are scratch.
#[derive(Debug, Clone)]
pub struct AuditContext {
    /// Lane and message rows; initialised before the stream starts.
    pub state_rows: HashSet<Row>,
    /// Intermediate rows; dead at every stage boundary.
    pub scratch_rows: HashSet<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditViolation {
    #[error("command {index} ({stage}) reads row {row} before anything was written to it in this stage")]
    UninitializedRead { index: usize, stage: Stage, row: Row },
    #[error("command {index} ({stage}) reads state row {row} after command {written_at} overwrote it")]
    ReadAfterOverwrite { index: usize, stage: Stage, row: Row, written_at: usize },
    #[error("command {index} ({stage}) touches row {row}, which is neither state nor scratch")]
    UnknownRow { index: usize, stage: Stage, row: Row },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageAudit {
    pub commands: usize,
    /// Largest number of scratch rows simultaneously holding a value that a
    /// later command reads.
    pub max_live_scratch: usize,
    pub distinct_scratch: usize,
    pub in_place_writes: usize,
}

/// Contiguous same-stage segments of a stream.
fn stage_segments(stream: &CommandStream) -> Vec<(Stage, std::ops::Range<usize>)> {
    let entries = stream.entries();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=entries.len() {
        if i == entries.len() || entries[i].stage != entries[start].stage {
            if start < entries.len() {
                out.push((entries[start].stage, start..i));
            }
            start = i;
        }
    }
    out
}

/// A scratch row is occupied from each write through the last read of that
/// value; returns the peak number of simultaneously occupied rows.
fn max_occupancy(
    entries: &[crate::isa::TaggedCommand],
    range: std::ops::Range<usize>,
    scratch: &HashSet<Row>,
) -> usize {
    // Per row: (write index, last read index) of the value currently held.
    let mut open: HashMap<Row, (usize, usize)> = HashMap::new();
    let mut intervals: Vec<(Row, usize, usize)> = Vec::new();
    for index in range.clone() {
        let cmd = &entries[index].command;
        for row in cmd.sources() {
            if let Some(iv) = open.get_mut(&row) {
                iv.1 = index;
            }
        }
        let dst = cmd.result();
        if scratch.contains(&dst) {
            if let Some((start, end)) = open.insert(dst, (index, index)) {
                intervals.push((dst, start, end));
            }
        }
    }
    intervals.extend(open.into_iter().map(|(row, (s, e))| (row, s, e)));
    range
        .map(|i| {
            intervals
                .iter()
                .filter(|&&(_, s, e)| s <= i && i <= e)
                .map(|&(row, _, _)| row)
                .collect::<HashSet<_>>()
                .len()
        })
        .max()
        .unwrap_or(0)
}

/// Checks that each stage segment of the stream only reads defined values:
/// scratch rows must be written earlier in the same segment, and a state row
/// overwritten in a segment is never read again in that segment. Returns one
/// audit per segment, in order.
pub fn audit_dataflow(
    stream: &CommandStream,
    ctx: &AuditContext,
) -> Result<Vec<(Stage, StageAudit)>, AuditViolation> {
    let entries = stream.entries();
    let mut audits = Vec::new();
    for (stage, range) in stage_segments(stream) {
        let mut written_scratch: HashSet<Row> = HashSet::new();
        let mut overwritten_state: HashMap<Row, usize> = HashMap::new();
        let mut audit = StageAudit { commands: range.len(), ..Default::default() };

        for index in range.clone() {
            let cmd = &entries[index].command;
            for row in cmd.sources() {
                if ctx.scratch_rows.contains(&row) {
                    if !written_scratch.contains(&row) {
                        return Err(AuditViolation::UninitializedRead { index, stage, row });
                    }
                } else if ctx.state_rows.contains(&row) {
                    if let Some(&written_at) = overwritten_state.get(&row) {
                        return Err(AuditViolation::ReadAfterOverwrite { index, stage, row, written_at });
                    }
                } else {
                    return Err(AuditViolation::UnknownRow { index, stage, row });
                }
            }
            let dst = cmd.result();
            if ctx.scratch_rows.contains(&dst) {
                written_scratch.insert(dst);
            } else if ctx.state_rows.contains(&dst) {
                overwritten_state.insert(dst, index);
            } else {
                return Err(AuditViolation::UnknownRow { index, stage, row: dst });
            }
            if cmd.is_in_place() {
                audit.in_place_writes += 1;
            }
        }
        audit.distinct_scratch = written_scratch.len();

        audit.max_live_scratch = max_occupancy(entries, range, &ctx.scratch_rows);
        audits.push((stage, audit));
    }
    Ok(audits)
}
