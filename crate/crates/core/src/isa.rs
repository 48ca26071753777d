//! Controller command set and its bit-exact serialized form.
//!
//! # Command word layout
//!
//! `k` is the row-index width, `ceil(log2(rows))` of the target subarray
//! (5 for 32 rows, 8 for 256 rows). Bit `i` of a command is bit `i % 8` of
//! byte `i / 8` of its serialization, and every multi-bit field stores its
//! least significant bit at the lowest bit index.
//!
//! | bits                | LOAD        | UNARY   | SHIFT        | BINARY        |
//! |---------------------|-------------|---------|--------------|---------------|
//! | `[0:1]` opcode      | `0`         | `1`     | `2`          | `3`           |
//! | `[2 : 2+k)`         | result row  | result  | result       | result        |
//! | `[2+k : 2+2k)`      | -           | operand | operand      | first operand |
//! | `[2+2k : 2+3k)`     | -           | 0       | offset       | second operand|
//! | bit `2+3k`          | -           | 0       | 0=left 1=right | 0=XOR 1=AND |
//!
//! For `k = 8` this gives opcode `[0:1]`, result `[2:9]`, operand `[10:17]`,
//! second operand or offset `[18:25]`, and the flag at bit 26. Non-LOAD
//! commands occupy `ceil((3k+3)/8)` bytes (4 bytes for `k = 8`, 3 for
//! `k = 5`); unused bits are zero. LOAD stores its `2+k`-bit header in
//! `ceil((2+k)/8)` bytes followed by the 64-bit round constant in
//! little-endian byte order.
//!
//! # Stream file
//!
//! `"INHL"`, a version byte (`1`), the `k` byte, then the commands back to
//! back until end of file.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::layout::Row;
use crate::subarray::Direction;

pub const STREAM_MAGIC: &[u8; 4] = b"INHL";
pub const STREAM_VERSION: u8 = 1;
pub const MAX_SHIFT: u8 = 63;
pub const MAX_INDEX_BITS: u8 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Opcode {
    Load = 0,
    Unary = 1,
    Shift = 2,
    Binary = 3,
}

impl Opcode {
    fn from_bits(v: u64) -> Opcode {
        match v & 0b11 {
            0 => Opcode::Load,
            1 => Opcode::Unary,
            2 => Opcode::Shift,
            _ => Opcode::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinaryKind {
    Xor,
    And,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    /// Deliver a round constant, replicated into every tile of `result`.
    Load {
        result: Row,
        rc: u64,
    },
    /// Bitwise NOT of `operand`, written to `result`.
    Unary {
        result: Row,
        operand: Row,
    },
    /// Barrel-shift every tile segment of `operand` and write to `result`.
    Shift {
        result: Row,
        operand: Row,
        offset: u8,
        direction: Direction,
    },
    Binary {
        result: Row,
        lhs: Row,
        rhs: Row,
        kind: BinaryKind,
    },
}

impl Command {
    pub fn opcode(&self) -> Opcode {
        match self {
            Command::Load { .. } => Opcode::Load,
            Command::Unary { .. } => Opcode::Unary,
            Command::Shift { .. } => Opcode::Shift,
            Command::Binary { .. } => Opcode::Binary,
        }
    }

    pub fn result(&self) -> Row {
        match *self {
            Command::Load { result, .. }
            | Command::Unary { result, .. }
            | Command::Shift { result, .. }
            | Command::Binary { result, .. } => result,
        }
    }

    /// Rows activated for reading.
    pub fn sources(&self) -> Vec<Row> {
        match *self {
            Command::Load { .. } => vec![],
            Command::Unary { operand, .. } | Command::Shift { operand, .. } => vec![operand],
            Command::Binary { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }

    /// The result overwrites one of the command's own source rows.
    pub fn is_in_place(&self) -> bool {
        self.sources().contains(&self.result())
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Command::Load { .. } => "LOAD",
            Command::Unary { .. } => "UNARY.NOT",
            Command::Shift { direction: Direction::Left, .. } => "SHIFT.L",
            Command::Shift { direction: Direction::Right, .. } => "SHIFT.R",
            Command::Binary { kind: BinaryKind::Xor, .. } => "BINARY.XOR",
            Command::Binary { kind: BinaryKind::And, .. } => "BINARY.AND",
        }
    }
}

impl fmt::Display for Command {
    /// `opcode result op1 op2/off`, with `-` for absent fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.mnemonic();
        match *self {
            Command::Load { result, rc } => write!(f, "{m} {result} - {rc:#018x}"),
            Command::Unary { result, operand } => write!(f, "{m} {result} {operand} -"),
            Command::Shift { result, operand, offset, .. } => write!(f, "{m} {result} {operand} {offset}"),
            Command::Binary { result, lhs, rhs, .. } => write!(f, "{m} {result} {lhs} {rhs}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("{field} value {value} does not fit in {bits} bits")]
    FieldOverflow { field: &'static str, value: u64, bits: u8 },
    #[error("shift offset {0} exceeds {MAX_SHIFT}")]
    OffsetOutOfRange(u8),
    #[error("BINARY operands must be distinct rows, both are {0}")]
    SameOperands(Row),
    #[error("row index width {0} outside 1..={MAX_INDEX_BITS}")]
    BadIndexWidth(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("truncated {opcode:?} command at byte {at}: need {needed} bytes, {available} left")]
    Truncated { opcode: Opcode, at: usize, needed: usize, available: usize },
    #[error("nonzero padding in {opcode:?} command at byte {at}")]
    NonZeroPadding { opcode: Opcode, at: usize },
    #[error("invalid field in command at byte {at}: {reason}")]
    InvalidField { at: usize, reason: String },
    #[error("row index width {0} outside 1..={MAX_INDEX_BITS}")]
    BadIndexWidth(u8),
    #[error("missing or wrong stream header")]
    BadHeader,
    #[error("unsupported stream version {0}")]
    UnsupportedVersion(u8),
}

fn check_k(k: u8) -> bool {
    (1..=MAX_INDEX_BITS).contains(&k)
}

/// Serialized size of a command of this opcode for index width `k`.
pub fn encoded_len(opcode: Opcode, k: u8) -> usize {
    let k = k as usize;
    match opcode {
        Opcode::Load => (2 + k).div_ceil(8) + 8,
        _ => (3 * k + 3).div_ceil(8),
    }
}

struct BitWriter {
    value: u64,
    pos: u32,
}

impl BitWriter {
    fn put(&mut self, field: &'static str, v: u64, bits: u8) -> Result<(), EncodeError> {
        if bits < 64 && v >> bits != 0 {
            return Err(EncodeError::FieldOverflow { field, value: v, bits });
        }
        self.value |= v << self.pos;
        self.pos += bits as u32;
        Ok(())
    }
}

pub fn encode(cmd: &Command, k: u8) -> Result<Vec<u8>, EncodeError> {
    let mut out = Vec::with_capacity(encoded_len(cmd.opcode(), k));
    encode_into(cmd, k, &mut out)?;
    Ok(out)
}

pub fn encode_into(cmd: &Command, k: u8, out: &mut Vec<u8>) -> Result<(), EncodeError> {
    if !check_k(k) {
        return Err(EncodeError::BadIndexWidth(k));
    }
    let mut w = BitWriter { value: 0, pos: 0 };
    w.put("opcode", cmd.opcode() as u64, 2)?;
    w.put("result", cmd.result() as u64, k)?;
    match *cmd {
        Command::Load { rc, .. } => {
            let header = (2 + k as usize).div_ceil(8);
            out.extend_from_slice(&w.value.to_le_bytes()[..header]);
            out.extend_from_slice(&rc.to_le_bytes());
            return Ok(());
        }
        Command::Unary { operand, .. } => {
            w.put("operand", operand as u64, k)?;
            w.put("operand2", 0, k)?;
            w.put("flag", 0, 1)?;
        }
        Command::Shift { operand, offset, direction, .. } => {
            if offset > MAX_SHIFT {
                return Err(EncodeError::OffsetOutOfRange(offset));
            }
            w.put("operand", operand as u64, k)?;
            w.put("offset", offset as u64, k)?;
            w.put("flag", (direction == Direction::Right) as u64, 1)?;
        }
        Command::Binary { lhs, rhs, kind, .. } => {
            if lhs == rhs {
                return Err(EncodeError::SameOperands(lhs));
            }
            w.put("operand", lhs as u64, k)?;
            w.put("operand2", rhs as u64, k)?;
            w.put("flag", (kind == BinaryKind::And) as u64, 1)?;
        }
    }
    let len = encoded_len(cmd.opcode(), k);
    out.extend_from_slice(&w.value.to_le_bytes()[..len]);
    Ok(())
}

fn read_le(bytes: &[u8]) -> u64 {
    let mut buf = [0u8; 8];
    buf[..bytes.len()].copy_from_slice(bytes);
    u64::from_le_bytes(buf)
}

/// Decodes one command starting at `bytes[0]`; returns it with the number of
/// bytes consumed. `at` is only used in error messages.
pub fn decode_at(bytes: &[u8], k: u8, at: usize) -> Result<(Command, usize), DecodeError> {
    if !check_k(k) {
        return Err(DecodeError::BadIndexWidth(k));
    }
    let Some(&first) = bytes.first() else {
        return Err(DecodeError::Truncated { opcode: Opcode::Load, at, needed: 1, available: 0 });
    };
    let opcode = Opcode::from_bits(first as u64);
    let needed = encoded_len(opcode, k);
    if bytes.len() < needed {
        return Err(DecodeError::Truncated { opcode, at, needed, available: bytes.len() });
    }
    let kk = k as u32;
    let mask = (1u64 << kk) - 1;

    if opcode == Opcode::Load {
        let header_len = needed - 8;
        let header = read_le(&bytes[..header_len]);
        if header >> (2 + kk) != 0 {
            return Err(DecodeError::NonZeroPadding { opcode, at });
        }
        let rc = u64::from_le_bytes(bytes[header_len..needed].try_into().unwrap());
        let result = ((header >> 2) & mask) as Row;
        return Ok((Command::Load { result, rc }, needed));
    }

    let word = read_le(&bytes[..needed]);
    let total = 3 * kk + 3;
    if word >> total != 0 {
        return Err(DecodeError::NonZeroPadding { opcode, at });
    }
    let result = ((word >> 2) & mask) as Row;
    let op1 = ((word >> (2 + kk)) & mask) as Row;
    let op2 = (word >> (2 + 2 * kk)) & mask;
    let flag = (word >> (2 + 3 * kk)) & 1 == 1;
    let cmd = match opcode {
        Opcode::Unary => {
            if op2 != 0 || flag {
                return Err(DecodeError::NonZeroPadding { opcode, at });
            }
            Command::Unary { result, operand: op1 }
        }
        Opcode::Shift => {
            if op2 > MAX_SHIFT as u64 {
                return Err(DecodeError::InvalidField { at, reason: format!("shift offset {op2}") });
            }
            let direction = if flag { Direction::Right } else { Direction::Left };
            Command::Shift { result, operand: op1, offset: op2 as u8, direction }
        }
        Opcode::Binary => {
            if op2 as Row == op1 {
                return Err(DecodeError::InvalidField {
                    at,
                    reason: format!("BINARY operands both row {op1}"),
                });
            }
            let kind = if flag { BinaryKind::And } else { BinaryKind::Xor };
            Command::Binary { result, lhs: op1, rhs: op2 as Row, kind }
        }
        Opcode::Load => unreachable!(),
    };
    Ok((cmd, needed))
}

pub fn decode(bytes: &[u8], k: u8) -> Result<(Command, usize), DecodeError> {
    decode_at(bytes, k, 0)
}

/// Decodes a headerless concatenation of commands.
pub fn decode_all(bytes: &[u8], k: u8) -> Result<Vec<Command>, DecodeError> {
    let mut at = 0;
    let mut out = Vec::new();
    while at < bytes.len() {
        let (cmd, used) = decode_at(&bytes[at..], k, at)?;
        out.push(cmd);
        at += used;
    }
    Ok(out)
}

/// Pipeline stage a command belongs to, for cycle accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Theta,
    Rho,
    Pi,
    Chi,
    Iota,
    Absorb,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Theta, Stage::Rho, Stage::Pi, Stage::Chi, Stage::Iota, Stage::Absorb];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Theta => "theta",
            Stage::Rho => "rho",
            Stage::Pi => "pi",
            Stage::Chi => "chi",
            Stage::Iota => "iota",
            Stage::Absorb => "absorb",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaggedCommand {
    pub stage: Stage,
    pub command: Command,
}

/// Ordered commands with their stage tags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandStream {
    entries: Vec<TaggedCommand>,
}

impl CommandStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stage: Stage, command: Command) {
        self.entries.push(TaggedCommand { stage, command });
    }

    pub fn extend(&mut self, other: &CommandStream) {
        self.entries.extend_from_slice(&other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TaggedCommand] {
        &self.entries
    }

    pub fn commands(&self) -> impl Iterator<Item = &Command> + '_ {
        self.entries.iter().map(|e| &e.command)
    }

    pub fn count(&self, pred: impl Fn(&TaggedCommand) -> bool) -> usize {
        self.entries.iter().filter(|e| pred(e)).count()
    }

    /// Concatenated command encodings, no header.
    pub fn encode(&self, k: u8) -> Result<Vec<u8>, EncodeError> {
        let mut out = Vec::new();
        for e in &self.entries {
            encode_into(&e.command, k, &mut out)?;
        }
        Ok(out)
    }

    pub fn to_file_bytes(&self, k: u8) -> Result<Vec<u8>, EncodeError> {
        let mut out = Vec::with_capacity(6 + self.len() * 4);
        out.extend_from_slice(STREAM_MAGIC);
        out.push(STREAM_VERSION);
        out.push(k);
        for e in &self.entries {
            encode_into(&e.command, k, &mut out)?;
        }
        Ok(out)
    }
}

impl FromIterator<TaggedCommand> for CommandStream {
    fn from_iter<I: IntoIterator<Item = TaggedCommand>>(iter: I) -> Self {
        CommandStream { entries: iter.into_iter().collect() }
    }
}

/// Parses a stream file; returns the row-index width and the commands.
pub fn read_stream_file(bytes: &[u8]) -> Result<(u8, Vec<Command>), DecodeError> {
    if bytes.len() < 6 || &bytes[..4] != STREAM_MAGIC {
        return Err(DecodeError::BadHeader);
    }
    if bytes[4] != STREAM_VERSION {
        return Err(DecodeError::UnsupportedVersion(bytes[4]));
    }
    let k = bytes[5];
    let mut at = 6;
    let mut cmds = Vec::new();
    while at < bytes.len() {
        let (cmd, used) = decode_at(&bytes[at..], k, at)?;
        cmds.push(cmd);
        at += used;
    }
    Ok((k, cmds))
}

/// Where one command sits in the control subarray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FetchEntry {
    pub row: usize,
    pub byte_offset: usize,
    pub len: usize,
}

/// Commands packed row-major into a control subarray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlImage {
    pub k: u8,
    pub row_bytes: usize,
    pub rows: Vec<Vec<u8>>,
    pub schedule: Vec<FetchEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlStoreError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("stream needs {required_rows} control rows of {row_bytes} bytes, subarray has {available_rows}")]
    Overflow { required_rows: usize, available_rows: usize, row_bytes: usize },
    #[error("control row width {0} columns is not a whole number of bytes")]
    RowWidth(usize),
}

impl ControlImage {
    pub fn used_bytes(&self) -> usize {
        self.schedule.last().map_or(0, |e| e.row * self.row_bytes + e.byte_offset + e.len)
    }

    /// Replays the fetch schedule and decodes every command in order.
    pub fn fetch(&self) -> Result<Vec<Command>, DecodeError> {
        let flat: Vec<u8> = self.rows.iter().flatten().copied().collect();
        let mut out = Vec::with_capacity(self.schedule.len());
        for e in &self.schedule {
            let start = e.row * self.row_bytes + e.byte_offset;
            let (cmd, used) = decode_at(&flat[start..start + e.len], self.k, start)?;
            debug_assert_eq!(used, e.len);
            out.push(cmd);
        }
        Ok(out)
    }
}

/// Packs the serialized stream into rows of `cols / 8` bytes. Commands may
/// straddle row boundaries; the fetch schedule records each start position.
pub fn store_control(
    stream: &CommandStream,
    k: u8,
    cols: usize,
    max_rows: usize,
) -> Result<ControlImage, ControlStoreError> {
    if !cols.is_multiple_of(8) || cols == 0 {
        return Err(ControlStoreError::RowWidth(cols));
    }
    let row_bytes = cols / 8;
    let mut flat = Vec::new();
    let mut schedule = Vec::with_capacity(stream.len());
    for e in stream.entries() {
        let at = flat.len();
        encode_into(&e.command, k, &mut flat)?;
        schedule.push(FetchEntry { row: at / row_bytes, byte_offset: at % row_bytes, len: flat.len() - at });
    }
    let required_rows = flat.len().div_ceil(row_bytes);
    if required_rows > max_rows {
        return Err(ControlStoreError::Overflow { required_rows, available_rows: max_rows, row_bytes });
    }
    flat.resize(required_rows * row_bytes, 0);
    let rows = flat.chunks(row_bytes).map(|c| c.to_vec()).collect();
    Ok(ControlImage { k, row_bytes, rows, schedule })
}
