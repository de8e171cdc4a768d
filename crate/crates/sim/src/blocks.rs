//! Plain-text trajectory matrices.
//!
//! A schedule is written stage by stage. Each stage opens with a
//! `# loop_count = n` header and each of its blocks with `# duration = T`,
//! followed by the block's 12 rows of control points (FR x, y, z, BR x, ...,
//! one whitespace-separated row per coordinate). Other `#` lines are
//! comments.

use std::fmt::Write;

use hrom_core::gait::{GaitError, GaitSchedule, SequenceBlock, TrajectoryBlock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BlockFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Block { line: usize, source: GaitError },
}

pub fn render_schedule(schedule: &GaitSchedule) -> String {
    let mut out = String::new();
    let stages = schedule.stages.len();
    for (si, stage) in schedule.stages.iter().enumerate() {
        writeln!(out, "# stage {} of {stages}", si + 1).unwrap();
        writeln!(out, "# loop_count = {}", stage.loop_count()).unwrap();
        let blocks = stage.blocks().len();
        for (bi, block) in stage.blocks().iter().enumerate() {
            writeln!(out, "# block {} of {blocks}", bi + 1).unwrap();
            writeln!(out, "# duration = {}", block.duration()).unwrap();
            for row in block.to_rows() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
        }
    }
    out
}

struct PendingBlock {
    line: usize,
    duration: f64,
    rows: Vec<Vec<f64>>,
}

struct PendingStage {
    line: usize,
    loop_count: u32,
    blocks: Vec<TrajectoryBlock>,
}

pub fn parse_schedule(text: &str) -> Result<GaitSchedule, BlockFormatError> {
    let mut schedule = GaitSchedule::default();
    let mut stage: Option<PendingStage> = None;
    let mut block: Option<PendingBlock> = None;

    let close_block = |block: &mut Option<PendingBlock>, stage: &mut Option<PendingStage>| -> Result<(), BlockFormatError> {
        if let Some(b) = block.take() {
            let Some(s) = stage else {
                return Err(BlockFormatError::Syntax { line: b.line, message: "block before any `# loop_count`".into() });
            };
            let built = TrajectoryBlock::from_rows(&b.rows, b.duration).map_err(|source| BlockFormatError::Block { line: b.line, source })?;
            s.blocks.push(built);
        }
        Ok(())
    };
    let close_stage = |stage: &mut Option<PendingStage>, schedule: &mut GaitSchedule| -> Result<(), BlockFormatError> {
        if let Some(s) = stage.take() {
            let seq = SequenceBlock::new(s.blocks, s.loop_count).map_err(|source| BlockFormatError::Block { line: s.line, source })?;
            schedule.stages.push(seq);
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let header = comment.split_once('=').map(|(k, v)| (k.trim(), v.trim()));
            match header {
                Some(("loop_count", v)) => {
                    close_block(&mut block, &mut stage)?;
                    close_stage(&mut stage, &mut schedule)?;
                    let loop_count =
                        v.parse().map_err(|_| BlockFormatError::Syntax { line, message: format!("bad loop_count `{v}`") })?;
                    stage = Some(PendingStage { line, loop_count, blocks: Vec::new() });
                }
                Some(("duration", v)) => {
                    close_block(&mut block, &mut stage)?;
                    let duration = v.parse().map_err(|_| BlockFormatError::Syntax { line, message: format!("bad duration `{v}`") })?;
                    block = Some(PendingBlock { line, duration, rows: Vec::new() });
                }
                _ => {}
            }
            continue;
        }
        let row: Result<Vec<f64>, _> = trimmed.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| BlockFormatError::Syntax { line, message: format!("not a row of numbers: `{trimmed}`") })?;
        match &mut block {
            Some(b) => b.rows.push(row),
            None => return Err(BlockFormatError::Syntax { line, message: "matrix row before any `# duration`".into() }),
        }
    }
    close_block(&mut block, &mut stage)?;
    close_stage(&mut stage, &mut schedule)?;
    Ok(schedule)
}
