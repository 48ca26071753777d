//! Functional model of one compute-capable SRAM subarray.
//!
//! Cells are stored row-major as packed `u64` words; column `c` of a row is bit
//! `c % 64` of word `c / 64`. Logic results are produced by activating one or
//! two wordlines and sensing the shared bitlines, so every op here is a pure
//! function of the activated rows. Writing a result back is a separate step.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_ROWS: usize = 32;
pub const MIN_COLS: usize = 64;
pub const DEFAULT_SHIFTER_WIDTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubarrayError {
    #[error("subarray {rows}x{cols} is below the {MIN_ROWS}x{MIN_COLS} minimum")]
    TooSmall { rows: usize, cols: usize },
    #[error("shifter width {width} must be a power of two <= 64 dividing {cols} columns")]
    BadShifterWidth { width: u32, cols: usize },
    #[error("row {row} out of range (subarray has {rows} rows)")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("row data has {got} bits, subarray has {expected} columns")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{op:?} needs two distinct rows, both operands are row {row}")]
    SameRow { op: BitlineOp, row: usize },
    #[error("{0:?} needs a second operand row")]
    MissingOperand(BitlineOp),
    #[error("NOT takes a single row")]
    UnexpectedOperand,
    #[error("shift offset {offset} must be below shifter width {width}")]
    OffsetOutOfRange { offset: u32, width: u32 },
}

/// Logic evaluated on the bitlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BitlineOp {
    And,
    Nor,
    Xor,
    /// Single-row NOR: the complement bitline of one activated row.
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

/// A row-wide bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        Self::from_words(len, vec![u64::MAX; words_for(len)])
    }

    /// Bits past `len` in the last word are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitRow { len, words }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            row.set(i, b);
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Cycle charges applied by the controller per command kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCostModel {
    /// Two-row activation, sense, and write-back of the result.
    pub logic_op_cycles: u64,
    /// Read through the barrel shifter plus write.
    pub shift_cycles: u64,
    /// Round-constant delivery; overlapped with command prefetch by default.
    pub load_cycles: u64,
}

impl Default for CycleCostModel {
    fn default() -> Self {
        CycleCostModel { logic_op_cycles: 4, shift_cycles: 2, load_cycles: 0 }
    }
}

/// Repeats `pattern` (of `width` bits) across a 64-bit word.
fn replicate(pattern: u64, width: u32) -> u64 {
    if width == 64 {
        return pattern;
    }
    let mut out = 0u64;
    let mut shift = 0;
    while shift < 64 {
        out |= pattern << shift;
        shift += width;
    }
    out
}

/// Rotates every `width`-bit segment of `word` left by `k`.
fn rotate_segments_left(word: u64, width: u32, k: u32) -> u64 {
    if k == 0 {
        return word;
    }
    if width == 64 {
        return word.rotate_left(k);
    }
    let seg_mask = (1u64 << width) - 1;
    let high = replicate(seg_mask & !((1u64 << k) - 1), width);
    let low = replicate((1u64 << k) - 1, width);
    ((word << k) & high) | ((word >> (width - k)) & low)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Subarray {
    rows: usize,
    cols: usize,
    shifter_width: u32,
    words_per_row: usize,
    cells: Vec<u64>,
}

impl Subarray {
    pub fn new(rows: usize, cols: usize) -> Result<Self, SubarrayError> {
        Self::with_shifter(rows, cols, DEFAULT_SHIFTER_WIDTH)
    }

    pub fn with_shifter(rows: usize, cols: usize, shifter_width: u32) -> Result<Self, SubarrayError> {
        if rows < MIN_ROWS || cols < MIN_COLS {
            return Err(SubarrayError::TooSmall { rows, cols });
        }
        if !shifter_width.is_power_of_two()
            || shifter_width > 64
            || !cols.is_multiple_of(shifter_width as usize)
        {
            return Err(SubarrayError::BadShifterWidth { width: shifter_width, cols });
        }
        let words_per_row = words_for(cols);
        Ok(Subarray { rows, cols, shifter_width, words_per_row, cells: vec![0; rows * words_per_row] })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shifter_width(&self) -> u32 {
        self.shifter_width
    }

    pub fn segments(&self) -> usize {
        self.cols / self.shifter_width as usize
    }

    fn check_row(&self, row: usize) -> Result<(), SubarrayError> {
        if row >= self.rows {
            Err(SubarrayError::RowOutOfRange { row, rows: self.rows })
        } else {
            Ok(())
        }
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.cells[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub fn write_row(&mut self, row: usize, data: &BitRow) -> Result<(), SubarrayError> {
        self.check_row(row)?;
        if data.len() != self.cols {
            return Err(SubarrayError::LengthMismatch { expected: self.cols, got: data.len() });
        }
        let start = row * self.words_per_row;
        self.cells[start..start + self.words_per_row].copy_from_slice(data.words());
        Ok(())
    }

    pub fn read_row(&self, row: usize) -> Result<BitRow, SubarrayError> {
        self.check_row(row)?;
        Ok(BitRow { len: self.cols, words: self.row_words(row).to_vec() })
    }

    fn segment_location(&self, segment: usize) -> (usize, u32) {
        let bit = segment * self.shifter_width as usize;
        (bit / 64, (bit % 64) as u32)
    }

    fn segment_mask(&self) -> u64 {
        if self.shifter_width == 64 {
            u64::MAX
        } else {
            (1u64 << self.shifter_width) - 1
        }
    }

    /// Value held in one shifter-width segment (one tile's lane) of a row.
    pub fn read_segment(&self, row: usize, segment: usize) -> Result<u64, SubarrayError> {
        self.check_row(row)?;
        assert!(segment < self.segments(), "segment {segment} out of range");
        let (word, shift) = self.segment_location(segment);
        Ok((self.cells[row * self.words_per_row + word] >> shift) & self.segment_mask())
    }

    pub fn write_segment(&mut self, row: usize, segment: usize, value: u64) -> Result<(), SubarrayError> {
        self.check_row(row)?;
        assert!(segment < self.segments(), "segment {segment} out of range");
        let (word, shift) = self.segment_location(segment);
        let mask = self.segment_mask() << shift;
        let cell = &mut self.cells[row * self.words_per_row + word];
        *cell = (*cell & !mask) | ((value << shift) & mask);
        Ok(())
    }

    /// Writes `value` into every segment of `row`.
    pub fn fill_segments(&mut self, row: usize, value: u64) -> Result<(), SubarrayError> {
        self.check_row(row)?;
        let pattern = replicate(value & self.segment_mask(), self.shifter_width);
        let start = row * self.words_per_row;
        let last = self.words_per_row - 1;
        for (i, cell) in self.cells[start..start + self.words_per_row].iter_mut().enumerate() {
            *cell = if i == last { pattern & tail_mask(self.cols) } else { pattern };
        }
        Ok(())
    }

    fn check_operands(&self, op: BitlineOp, row_a: usize, row_b: Option<usize>) -> Result<(), SubarrayError> {
        self.check_row(row_a)?;
        match (op, row_b) {
            (BitlineOp::Not, None) => Ok(()),
            (BitlineOp::Not, Some(_)) => Err(SubarrayError::UnexpectedOperand),
            (_, None) => Err(SubarrayError::MissingOperand(op)),
            (_, Some(b)) => {
                self.check_row(b)?;
                if b == row_a {
                    Err(SubarrayError::SameRow { op, row: b })
                } else {
                    Ok(())
                }
            }
        }
    }

    #[inline]
    fn sense(op: BitlineOp, a: u64, b: u64) -> u64 {
        match op {
            BitlineOp::And => a & b,
            BitlineOp::Nor => !(a | b),
            BitlineOp::Xor => a ^ b,
            BitlineOp::Not => !a,
        }
    }

    /// Senses the bitlines with `row_a` (and `row_b`) activated. Source rows
    /// are left untouched and nothing is written.
    pub fn bitline_op(
        &self,
        op: BitlineOp,
        row_a: usize,
        row_b: Option<usize>,
    ) -> Result<BitRow, SubarrayError> {
        self.check_operands(op, row_a, row_b)?;
        let a = self.row_words(row_a);
        let b = row_b.map(|r| self.row_words(r));
        let words = (0..self.words_per_row).map(|i| Self::sense(op, a[i], b.map_or(0, |b| b[i]))).collect();
        Ok(BitRow::from_words(self.cols, words))
    }

    /// Bitline op followed by write-back into `dst`, without materialising the
    /// intermediate row. `dst` may equal a source row.
    pub fn bitline_op_into(
        &mut self,
        op: BitlineOp,
        row_a: usize,
        row_b: Option<usize>,
        dst: usize,
    ) -> Result<(), SubarrayError> {
        self.check_operands(op, row_a, row_b)?;
        self.check_row(dst)?;
        let wpr = self.words_per_row;
        let tail = tail_mask(self.cols);
        for i in 0..wpr {
            let a = self.cells[row_a * wpr + i];
            let b = row_b.map_or(0, |r| self.cells[r * wpr + i]);
            let mut v = Self::sense(op, a, b);
            if i == wpr - 1 {
                v &= tail;
            }
            self.cells[dst * wpr + i] = v;
        }
        Ok(())
    }

    /// Reads `src` through the per-segment barrel shifters and writes the
    /// rotated row to `dst`. Bits never cross segment boundaries.
    pub fn rotate_segmented(
        &mut self,
        src: usize,
        dst: usize,
        offset: u32,
        direction: Direction,
    ) -> Result<(), SubarrayError> {
        self.check_row(src)?;
        self.check_row(dst)?;
        let width = self.shifter_width;
        if offset >= width {
            return Err(SubarrayError::OffsetOutOfRange { offset, width });
        }
        let left = match direction {
            Direction::Left => offset,
            Direction::Right => (width - offset) % width,
        };
        let wpr = self.words_per_row;
        let tail = tail_mask(self.cols);
        for i in 0..wpr {
            let mut v = rotate_segments_left(self.cells[src * wpr + i], width, left);
            if i == wpr - 1 {
                v &= tail;
            }
            self.cells[dst * wpr + i] = v;
        }
        Ok(())
    }

    /// One line per row, most significant nibble of each 64-column word
    /// first, words in ascending column order.
    pub fn hex_dump(&self) -> String {
        let mut out = String::new();
        for row in 0..self.rows {
            for (i, word) in self.row_words(row).iter().enumerate() {
                let bits = (self.cols - i * 64).min(64);
                let digits = bits.div_ceil(4);
                let _ = write!(out, "{:0width$x}", word, width = digits);
            }
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Debug for Subarray {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subarray")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("shifter_width", &self.shifter_width)
            .finish_non_exhaustive()
    }
}
