//! Loads messages or states into tiles, runs compiled streams on a simulated
//! subarray, and reads results back through the lane map.

use thiserror::Error;

use crate::compiler::{self, CompileError, CompileOptions};
use crate::exec::{self, CycleReport, ExecError};
use crate::isa::CommandStream;
use crate::keccak::{self, KeccakState, LaneWidth, DIGEST_BYTES, RATE_LANES};
use crate::layout::{LayoutError, TileLayout, INTERMEDIATE_ROWS, LANE_ROWS};
use crate::subarray::{CycleCostModel, Subarray, SubarrayError, MIN_ROWS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Subarray(#[from] SubarrayError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("batch of {given} exceeds the {tiles} tiles of the subarray")]
    TooManyItems { given: usize, tiles: usize },
    #[error("messages in one batch must share a block count ({expected} vs {found})")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("state lane width {found} does not match layout width {expected}")]
    WidthMismatch { expected: u32, found: u32 },
    #[error("empty batch")]
    EmptyBatch,
}

/// Geometry of the simulated subarray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
}

impl Geometry {
    /// Smallest row count that holds a message of `len` bytes, never below
    /// the hardware minimum.
    pub fn rows_for_message(len: usize) -> usize {
        let blocks = keccak::sha3_256_block_count(len);
        (LANE_ROWS + INTERMEDIATE_ROWS + RATE_LANES * (blocks - 1)).max(MIN_ROWS)
    }
}

/// Output of one hashing run.
#[derive(Debug, Clone)]
pub struct HashRun {
    pub digests: Vec<[u8; DIGEST_BYTES]>,
    pub report: CycleReport,
    pub blocks: usize,
    pub state_rows_used: usize,
    pub stream: CommandStream,
    pub layout: TileLayout,
    pub subarray: Subarray,
}

fn write_lane(sub: &mut Subarray, row: usize, tile: usize, value: u64) -> Result<(), SubarrayError> {
    sub.write_segment(row, tile, value)
}

/// Writes `state` into tile `tile`, lane (x, y) to its current physical row.
pub fn load_state(
    sub: &mut Subarray,
    layout: &TileLayout,
    tile: usize,
    state: &KeccakState,
) -> Result<(), EngineError> {
    if state.width() != layout.width() {
        return Err(EngineError::WidthMismatch {
            expected: layout.width().bits(),
            found: state.width().bits(),
        });
    }
    for y in 0..5 {
        for x in 0..5 {
            write_lane(sub, layout.lane_row(x, y) as usize, tile, state.lane(x, y))?;
        }
    }
    Ok(())
}

pub fn read_state(sub: &Subarray, layout: &TileLayout, tile: usize) -> Result<KeccakState, EngineError> {
    let mut state = KeccakState::zero(layout.width());
    for y in 0..5 {
        for x in 0..5 {
            state.set_lane(x, y, sub.read_segment(layout.lane_row(x, y) as usize, tile)?);
        }
    }
    Ok(state)
}

/// Places the padded blocks of `message` in tile `tile`: block 0 into the
/// rate lanes, block `b > 0` into message group `b - 1`. Capacity lanes are
/// zeroed.
pub fn load_message(
    sub: &mut Subarray,
    layout: &TileLayout,
    tile: usize,
    message: &[u8],
) -> Result<(), EngineError> {
    for y in 0..5 {
        for x in 0..5 {
            write_lane(sub, layout.lane_row(x, y) as usize, tile, 0)?;
        }
    }
    for (b, block) in keccak::pad_sha3_256(message).iter().enumerate() {
        let lanes = keccak::block_lanes(block);
        for (i, &lane) in lanes.iter().enumerate() {
            let row = if b == 0 { layout.lane_row(i % 5, i / 5) } else { layout.message_rows()[b - 1][i] };
            write_lane(sub, row as usize, tile, lane)?;
        }
    }
    Ok(())
}

/// Hashes up to one message per tile in a single broadcast run. All
/// messages must pad to the same number of blocks.
pub fn hash_batch(
    messages: &[&[u8]],
    geometry: Geometry,
    cost: &CycleCostModel,
    opts: CompileOptions,
) -> Result<HashRun, EngineError> {
    let first = messages.first().ok_or(EngineError::EmptyBatch)?;
    let blocks = keccak::sha3_256_block_count(first.len());
    for m in messages {
        let found = keccak::sha3_256_block_count(m.len());
        if found != blocks {
            return Err(EngineError::BlockCountMismatch { expected: blocks, found });
        }
    }
    let mut layout = TileLayout::build(geometry.rows, geometry.cols, LaneWidth::W64)?;
    if messages.len() > layout.tile_count() {
        return Err(EngineError::TooManyItems { given: messages.len(), tiles: layout.tile_count() });
    }
    let load_layout = {
        let mut l = layout.clone();
        l.reserve_message_blocks(blocks)?;
        l
    };
    let program = compiler::compile_hash_for_len(&mut layout, first.len(), cost, opts)?;
    let mut sub = Subarray::with_shifter(geometry.rows, geometry.cols, LaneWidth::W64.bits())?;
    for (tile, m) in messages.iter().enumerate() {
        load_message(&mut sub, &load_layout, tile, m)?;
    }
    let report = exec::execute(&program.stream, &mut sub, cost)?;
    let mut digests = Vec::with_capacity(messages.len());
    for tile in 0..messages.len() {
        let mut lanes = [0u64; 4];
        for (lane, &row) in lanes.iter_mut().zip(program.digest_rows.iter()) {
            *lane = sub.read_segment(row as usize, tile)?;
        }
        digests.push(keccak::extract_digest(lanes));
    }
    Ok(HashRun {
        digests,
        report,
        blocks,
        state_rows_used: program.state_rows_used,
        stream: program.stream,
        layout,
        subarray: sub,
    })
}

/// Hashes one message on a subarray sized to fit it.
pub fn hash_message(message: &[u8], cols: usize, cost: &CycleCostModel) -> Result<HashRun, EngineError> {
    let geometry = Geometry { rows: Geometry::rows_for_message(message.len()), cols };
    hash_batch(&[message], geometry, cost, CompileOptions::default())
}

/// Hashes any number of messages, grouping them by block count and packing
/// each group into tile-wide batches. Digests come back in input order.
pub fn hash_many(
    messages: &[&[u8]],
    cols: usize,
    cost: &CycleCostModel,
) -> Result<Vec<[u8; DIGEST_BYTES]>, EngineError> {
    let tiles = cols / LaneWidth::W64.bits() as usize;
    let mut by_blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, m) in messages.iter().enumerate() {
        by_blocks.entry(keccak::sha3_256_block_count(m.len())).or_default().push(i);
    }
    let mut out = vec![[0u8; DIGEST_BYTES]; messages.len()];
    for indices in by_blocks.values() {
        let rows = Geometry::rows_for_message(messages[indices[0]].len());
        for chunk in indices.chunks(tiles.max(1)) {
            let batch: Vec<&[u8]> = chunk.iter().map(|&i| messages[i]).collect();
            let run = hash_batch(&batch, Geometry { rows, cols }, cost, CompileOptions::default())?;
            for (&i, d) in chunk.iter().zip(run.digests) {
                out[i] = d;
            }
        }
    }
    Ok(out)
}

/// Runs every round of Keccak-f on up to one state per tile.
pub fn permute_batch(
    states: &[KeccakState],
    geometry: Geometry,
    cost: &CycleCostModel,
) -> Result<(Vec<KeccakState>, CycleReport), EngineError> {
    let width = states.first().ok_or(EngineError::EmptyBatch)?.width();
    let mut layout = TileLayout::build(geometry.rows, geometry.cols, width)?;
    if states.len() > layout.tile_count() {
        return Err(EngineError::TooManyItems { given: states.len(), tiles: layout.tile_count() });
    }
    let mut sub = Subarray::with_shifter(geometry.rows, geometry.cols, width.bits())?;
    for (tile, s) in states.iter().enumerate() {
        load_state(&mut sub, &layout, tile, s)?;
    }
    let (stream, _) = compiler::compile_permutation(&mut layout, cost, CompileOptions::default())?;
    let report = exec::execute(&stream, &mut sub, cost)?;
    let out = (0..states.len()).map(|t| read_state(&sub, &layout, t)).collect::<Result<_, _>>()?;
    Ok((out, report))
}

/// Runs `stream` once over `states` loaded through `layout`, reading back
/// through `after` (the layout as it stands once the stream has run).
pub fn run_stream_on_states(
    stream: &CommandStream,
    layout: &TileLayout,
    after: &TileLayout,
    states: &[KeccakState],
    cost: &CycleCostModel,
) -> Result<Vec<KeccakState>, EngineError> {
    let width = layout.width();
    let mut sub = Subarray::with_shifter(layout.rows(), layout.cols(), width.bits())?;
    for (tile, s) in states.iter().enumerate() {
        load_state(&mut sub, layout, tile, s)?;
    }
    exec::execute(stream, &mut sub, cost)?;
    (0..states.len()).map(|t| read_state(&sub, after, t)).collect()
}
