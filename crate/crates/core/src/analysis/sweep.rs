//! Parallel cell sweeps with deterministic aggregation and optional checkpointing.
//!
//! Cells are evaluated by index on a worker pool and stored by index, so the
//! result never depends on the number of workers or on scheduling. All values are
//! rounded to the CSV precision as soon as they are produced; a sweep resumed from
//! a checkpoint therefore yields bit-identical results to an uninterrupted one.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::output::{fmt, quantize};

#[derive(Debug, Clone, PartialEq)]
pub enum CellResult {
    Ok(Vec<f64>),
    Failed(Error),
}

impl CellResult {
    pub fn values(&self) -> Option<&[f64]> {
        match self {
            CellResult::Ok(v) => Some(v),
            CellResult::Failed(_) => None,
        }
    }
}

/// Partial results flushed to `path` every `every` cells. `fingerprint` identifies
/// the sweep; a checkpoint with a different fingerprint is discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub path: PathBuf,
    pub every: usize,
    pub fingerprint: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOptions {
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
    pub checkpoint: Option<Checkpoint>,
}

impl SweepOptions {
    pub fn with_workers(workers: usize) -> Self {
        SweepOptions { workers: Some(workers), checkpoint: None }
    }
}

const HEADER_TAG: &str = "#sweep";

fn load_checkpoint(cp: &Checkpoint, n_cells: usize, width: usize) -> BTreeMap<usize, CellResult> {
    let mut done = BTreeMap::new();
    let Ok(mut bytes) = std::fs::read(&cp.path) else {
        return done;
    };
    // only newline-terminated records were completely written
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    bytes.truncate(complete);
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(bytes.as_slice());
    let mut records = rdr.records();
    let header_ok = match records.next() {
        Some(Ok(h)) => {
            h.len() == 4
                && &h[0] == HEADER_TAG
                && h[1] == *cp.fingerprint
                && h[2].parse() == Ok(n_cells)
                && h[3].parse() == Ok(width)
        }
        _ => false,
    };
    if !header_ok {
        return done;
    }
    for rec in records {
        let Ok(rec) = rec else { break };
        let Some(Ok(index)) = rec.get(0).map(str::parse::<usize>) else { break };
        if index >= n_cells {
            break;
        }
        let cell = match rec.get(1) {
            Some("ok") if rec.len() == width + 2 => {
                let vals: std::result::Result<Vec<f64>, _> = rec.iter().skip(2).map(str::parse::<f64>).collect();
                match vals {
                    Ok(v) => CellResult::Ok(v),
                    Err(_) => break,
                }
            }
            _ => break,
        };
        done.insert(index, cell);
    }
    done
}

fn start_checkpoint(cp: &Checkpoint, n_cells: usize, width: usize, done: &BTreeMap<usize, CellResult>) -> Result<csv::Writer<BufWriter<File>>> {
    // rewrite from what was recovered, dropping any torn tail
    let file = OpenOptions::new().create(true).write(true).truncate(true).open(&cp.path)?;
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record([HEADER_TAG, &cp.fingerprint, &n_cells.to_string(), &width.to_string()])?;
    for (index, cell) in done {
        write_cell(&mut w, *index, cell)?;
    }
    w.flush()?;
    Ok(w)
}

// failed cells are not persisted; a resumed run recomputes them
fn write_cell<W: Write>(w: &mut csv::Writer<W>, index: usize, cell: &CellResult) -> Result<()> {
    if let CellResult::Ok(v) = cell {
        let mut rec = vec![index.to_string(), "ok".into()];
        rec.extend(v.iter().map(|x| fmt(*x)));
        w.write_record(&rec)?;
    }
    Ok(())
}

/// Evaluate `f` on cells `0..n_cells`; each successful cell yields `width` values.
/// A failing cell is recorded, not fatal.
pub fn run_sweep<F>(n_cells: usize, width: usize, f: F, opts: &SweepOptions) -> Result<Vec<CellResult>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    if opts.workers == Some(0) {
        return Err(Error::InvalidParameter("worker count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let eval = |i: usize| -> CellResult {
        match f(i) {
            Ok(v) if v.len() == width => CellResult::Ok(v.into_iter().map(quantize).collect()),
            Ok(v) => CellResult::Failed(Error::InvalidParameter(format!(
                "cell produced {} values, expected {width}",
                v.len()
            ))),
            Err(e) => CellResult::Failed(e),
        }
    };

    let Some(cp) = &opts.checkpoint else {
        return Ok(pool.install(|| (0..n_cells).into_par_iter().map(eval).collect()));
    };
    if cp.every == 0 {
        return Err(Error::InvalidParameter("checkpoint interval must be positive".into()));
    }

    let mut done = load_checkpoint(cp, n_cells, width);
    let mut writer = start_checkpoint(cp, n_cells, width, &done)?;
    let pending: Vec<usize> = (0..n_cells).filter(|i| !done.contains_key(i)).collect();
    for chunk in pending.chunks(cp.every) {
        let results: Vec<CellResult> = pool.install(|| chunk.par_iter().map(|&i| eval(i)).collect());
        for (&i, cell) in chunk.iter().zip(results) {
            write_cell(&mut writer, i, &cell)?;
            done.insert(i, cell);
        }
        writer.flush()?;
    }
    Ok(done.into_values().collect())
}
