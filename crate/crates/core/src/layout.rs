//! Placement of Keccak states on subarray rows.
//!
//! Each lane occupies one row, and each tile is a `w`-column slice holding one
//! independent state. The 25 lane rows are addressed through a logical to
//! physical map, so the pi permutation is a relabelling of rows rather than a
//! data movement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keccak::{lane_index, LaneWidth, RATE_LANES, SHA3_256_RATE_BYTES};
use crate::subarray::{MIN_COLS, MIN_ROWS};

pub const LANE_ROWS: usize = 25;
pub const INTERMEDIATE_ROWS: usize = 6;
/// Lanes outside the rate, shared by every block of a message.
pub const CAPACITY_LANES: usize = LANE_ROWS - RATE_LANES;

pub type Row = u16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("subarray {rows}x{cols} too small: need at least {MIN_ROWS} rows and {MIN_COLS} columns")]
    TooSmall { rows: usize, cols: usize },
    #[error("{cols} columns is not a multiple of the {width}-bit lane width")]
    ColumnsNotMultiple { cols: usize, width: u32 },
    #[error("{rows} rows exceed the 16-bit row index range")]
    TooManyRows { rows: usize },
    #[error("need {needed} rows for {blocks} message blocks, subarray has {rows}")]
    CapacityExceeded { needed: usize, rows: usize, blocks: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileLayout {
    rows: usize,
    cols: usize,
    width: LaneWidth,
    tile_count: usize,
    /// Physical rows of the state; fixed set, order irrelevant.
    lane_rows: [Row; LANE_ROWS],
    intermediate_rows: [Row; INTERMEDIATE_ROWS],
    /// One 17-row group per message block after the first.
    message_rows: Vec<[Row; RATE_LANES]>,
    /// Logical lane `x + 5y` -> physical row.
    perm_map: [Row; LANE_ROWS],
}

/// `ceil(log2(rows))`, the row-index field width for a subarray.
pub fn index_bits_for_rows(rows: usize) -> u8 {
    (usize::BITS - (rows.max(2) - 1).leading_zeros()) as u8
}

impl TileLayout {
    pub fn build(rows: usize, cols: usize, width: LaneWidth) -> Result<Self, LayoutError> {
        if rows < MIN_ROWS || cols < MIN_COLS || cols < width.bits() as usize {
            return Err(LayoutError::TooSmall { rows, cols });
        }
        if !cols.is_multiple_of(width.bits() as usize) {
            return Err(LayoutError::ColumnsNotMultiple { cols, width: width.bits() });
        }
        if rows > Row::MAX as usize + 1 {
            return Err(LayoutError::TooManyRows { rows });
        }
        let lane_rows: [Row; LANE_ROWS] = std::array::from_fn(|i| i as Row);
        Ok(TileLayout {
            rows,
            cols,
            width,
            tile_count: cols / width.bits() as usize,
            lane_rows,
            intermediate_rows: std::array::from_fn(|i| (LANE_ROWS + i) as Row),
            message_rows: Vec::new(),
            perm_map: lane_rows,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn width(&self) -> LaneWidth {
        self.width
    }

    pub fn tile_count(&self) -> usize {
        self.tile_count
    }

    pub fn index_bits(&self) -> u8 {
        index_bits_for_rows(self.rows)
    }

    pub fn lane_rows(&self) -> &[Row; LANE_ROWS] {
        &self.lane_rows
    }

    pub fn intermediate_rows(&self) -> &[Row; INTERMEDIATE_ROWS] {
        &self.intermediate_rows
    }

    pub fn message_rows(&self) -> &[[Row; RATE_LANES]] {
        &self.message_rows
    }

    pub fn perm_map(&self) -> &[Row; LANE_ROWS] {
        &self.perm_map
    }

    /// Physical row currently holding logical lane `(x, y)`.
    pub fn lane_row(&self, x: usize, y: usize) -> Row {
        assert!(x < 5 && y < 5, "lane ({x}, {y}) out of range");
        self.perm_map[lane_index(x, y)]
    }

    /// Composes the map with pi: logical `(y, 2x + 3y)` now names the row that
    /// held logical `(x, y)`. No cells are touched.
    pub fn apply_pi_remap(&mut self) {
        let old = self.perm_map;
        for y in 0..5 {
            for x in 0..5 {
                self.perm_map[lane_index(y, 2 * x + 3 * y)] = old[lane_index(x, y)];
            }
        }
    }

    /// Column range of tile `t`.
    pub fn tile_columns(&self, t: usize) -> std::ops::Range<usize> {
        let w = self.width.bits() as usize;
        t * w..(t + 1) * w
    }

    /// Rows holding the state plus message blocks (excludes intermediates).
    pub fn state_rows_used(&self) -> usize {
        LANE_ROWS + RATE_LANES * self.message_rows.len()
    }

    pub fn total_rows_used(&self) -> usize {
        self.state_rows_used() + INTERMEDIATE_ROWS
    }

    /// Allocates 17-row groups so that a message of `blocks` rate blocks fits;
    /// the first block lives in the lane rows themselves.
    pub fn reserve_message_blocks(&mut self, blocks: usize) -> Result<(), LayoutError> {
        let extra = blocks.saturating_sub(1);
        let needed = LANE_ROWS + INTERMEDIATE_ROWS + RATE_LANES * extra;
        if needed > self.rows {
            return Err(LayoutError::CapacityExceeded { needed, rows: self.rows, blocks });
        }
        let first = LANE_ROWS + INTERMEDIATE_ROWS;
        self.message_rows =
            (0..extra).map(|g| std::array::from_fn(|i| (first + g * RATE_LANES + i) as Row)).collect();
        Ok(())
    }

    pub fn is_perm_bijective(&self) -> bool {
        let mut seen = [false; LANE_ROWS];
        for &row in &self.perm_map {
            match self.lane_rows.iter().position(|&r| r == row) {
                Some(i) if !seen[i] => seen[i] = true,
                _ => return false,
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LayoutDump::from(self)).expect("layout serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let dump: LayoutDump = serde_json::from_str(text)?;
        let mut layout =
            TileLayout::build(dump.rows, dump.cols, dump.width).map_err(serde::de::Error::custom)?;
        layout.reserve_message_blocks(dump.message_rows.len() + 1).map_err(serde::de::Error::custom)?;
        for y in 0..5 {
            for x in 0..5 {
                layout.perm_map[lane_index(x, y)] = dump.perm_map[y][x];
            }
        }
        if !layout.is_perm_bijective() {
            return Err(serde::de::Error::custom("perm_map is not a bijection onto the lane rows"));
        }
        Ok(layout)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TileSpan {
    index: usize,
    first_col: usize,
    last_col: usize,
}

/// JSON shape of a layout: `perm_map[y][x]` is the physical row of lane (x, y).
#[derive(Debug, Serialize, Deserialize)]
struct LayoutDump {
    rows: usize,
    cols: usize,
    width: LaneWidth,
    perm_map: [[Row; 5]; 5],
    lane_rows: Vec<Row>,
    intermediate_rows: Vec<Row>,
    message_rows: Vec<Vec<Row>>,
    #[serde(default)]
    tiles: Vec<TileSpan>,
}

impl From<&TileLayout> for LayoutDump {
    fn from(l: &TileLayout) -> Self {
        LayoutDump {
            rows: l.rows,
            cols: l.cols,
            width: l.width,
            perm_map: std::array::from_fn(|y| std::array::from_fn(|x| l.lane_row(x, y))),
            lane_rows: l.lane_rows.to_vec(),
            intermediate_rows: l.intermediate_rows.to_vec(),
            message_rows: l.message_rows.iter().map(|g| g.to_vec()).collect(),
            tiles: (0..l.tile_count)
                .map(|t| {
                    let cols = l.tile_columns(t);
                    TileSpan { index: t, first_col: cols.start, last_col: cols.end - 1 }
                })
                .collect(),
        }
    }
}

/// Row budget of one SHA3-256 message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CapacityReport {
    /// Lane and message rows, intermediates excluded.
    pub rows_needed: usize,
    pub blocks: usize,
    /// Messages of this size that fit in one tile of the given subarray when
    /// they share a single intermediate pool.
    pub parallel_messages: usize,
}

pub fn capacity(message_bits: u64, subarray_rows: usize) -> CapacityReport {
    let rate_bits = (SHA3_256_RATE_BYTES * 8) as u64;
    // Two domain-suffix bits plus the two ends of pad10*1.
    let blocks = (message_bits + 4).div_ceil(rate_bits) as usize;
    let rows_needed = RATE_LANES * blocks + CAPACITY_LANES;
    CapacityReport {
        rows_needed,
        blocks,
        parallel_messages: subarray_rows.saturating_sub(INTERMEDIATE_ROWS) / rows_needed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("need at least two subarrays per bank pair (one holds control), got {0}")]
pub struct TooFewSubarrays(pub usize);

/// Independent messages hashed at once across `banks` bank pairs.
pub fn parallel_messages(
    banks: usize,
    subarrays_per_two_banks: usize,
    cols: usize,
    width: LaneWidth,
) -> Result<usize, TooFewSubarrays> {
    if subarrays_per_two_banks < 2 {
        return Err(TooFewSubarrays(subarrays_per_two_banks));
    }
    Ok(banks * (subarrays_per_two_banks - 1) * cols.div_ceil(width.bits() as usize))
}
