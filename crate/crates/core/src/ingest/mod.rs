//! File formats, loaders and the pluggable chain-source interface.
//!
//! Snapshots travel as JSON (nested, human-editable); block streams travel
//! as CSV (flat, potentially huge) and are read incrementally. Both
//! formats carry a `format_version` marker. Built-in reference datasets
//! live in [`fixtures`].

pub mod fixtures;

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attribution::BlockRecord;
use crate::error::{Error, Result};
use crate::ledger::{Account, ConversionRates, LedgerSnapshot, PowerDownSchedule};

/// Version written into snapshot documents and block-stream headers.
pub const FORMAT_VERSION: u32 = 1;

const BLOCKS_HEADER: [&str; 3] = ["height", "generator", "timestamp"];

// ---------------------------------------------------------------------------
// Snapshot files (JSON)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotDoc {
    #[serde(default = "default_version")]
    format_version: u32,
    block_height: u64,
    #[serde(default)]
    rates: RatesDoc,
    accounts: Vec<AccountDoc>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Serialize, Deserialize)]
struct RatesDoc {
    steem_per_sbd: f64,
    vests_per_sp: f64,
}

impl Default for RatesDoc {
    fn default() -> Self {
        let rates = ConversionRates::default();
        RatesDoc {
            steem_per_sbd: rates.steem_per_sbd,
            vests_per_sp: rates.vests_per_sp,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AccountDoc {
    id: String,
    pure_vests: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    proxy: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    votes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power_down: Option<PowerDownDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    witness: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct PowerDownDoc {
    weekly_portion: f64,
    weeks_remaining: u32,
}

/// Loads and validates a snapshot file. Any validation violation fails
/// the load with the full violation list attached.
pub fn load_snapshot(path: impl AsRef<Path>) -> Result<LedgerSnapshot> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| annotate_io(e, path))?;
    let doc: SnapshotDoc =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    snapshot_from_doc(doc, &path.display().to_string())
}

/// Parses a snapshot from an in-memory JSON string.
pub fn snapshot_from_json(json: &str) -> Result<LedgerSnapshot> {
    let doc: SnapshotDoc = serde_json::from_str(json)?;
    snapshot_from_doc(doc, "<memory>")
}

fn snapshot_from_doc(doc: SnapshotDoc, path: &str) -> Result<LedgerSnapshot> {
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Format {
            path: path.to_string(),
            message: format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            ),
        });
    }
    let rates = ConversionRates::new(doc.rates.steem_per_sbd, doc.rates.vests_per_sp)?;
    let mut snapshot = LedgerSnapshot::new(doc.block_height, rates);
    for account_doc in doc.accounts {
        if snapshot.accounts.contains_key(&account_doc.id) {
            return Err(Error::Format {
                path: path.to_string(),
                message: format!("duplicate account id `{}`", account_doc.id),
            });
        }
        let account = Account {
            id: account_doc.id,
            pure_vests: account_doc.pure_vests,
            proxy: account_doc.proxy,
            witness_votes: account_doc.votes.into_iter().collect(),
            power_down: account_doc.power_down.map(|p| PowerDownSchedule {
                weekly_portion: p.weekly_portion,
                weeks_remaining: p.weeks_remaining,
            }),
            witness: account_doc.witness,
        };
        snapshot.insert(account);
    }
    let violations = snapshot.validate();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(snapshot)
}

/// Writes a snapshot as pretty-printed JSON, accounts in id order.
pub fn save_snapshot(snapshot: &LedgerSnapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| annotate_io(e, path))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, &snapshot_to_doc(snapshot))?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Serializes a snapshot to the JSON document format.
pub fn snapshot_to_json(snapshot: &LedgerSnapshot) -> Result<String> {
    Ok(serde_json::to_string_pretty(&snapshot_to_doc(snapshot))?)
}

fn snapshot_to_doc(snapshot: &LedgerSnapshot) -> SnapshotDoc {
    SnapshotDoc {
        format_version: FORMAT_VERSION,
        block_height: snapshot.block_height,
        rates: RatesDoc {
            steem_per_sbd: snapshot.rates.steem_per_sbd,
            vests_per_sp: snapshot.rates.vests_per_sp,
        },
        accounts: snapshot
            .accounts
            .values()
            .map(|a| AccountDoc {
                id: a.id.clone(),
                pure_vests: a.pure_vests,
                proxy: a.proxy.clone(),
                votes: a.witness_votes.iter().cloned().collect(),
                power_down: a.power_down.map(|p| PowerDownDoc {
                    weekly_portion: p.weekly_portion,
                    weeks_remaining: p.weeks_remaining,
                }),
                witness: a.witness,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Block stream files (CSV)
// ---------------------------------------------------------------------------

/// Streaming reader over a block CSV. Rows are parsed one at a time, so a
/// multi-gigabyte stream never has to fit in memory; duplicate heights are
/// rejected as they appear.
pub struct BlockStream<R: Read> {
    records: csv::ByteRecordsIntoIter<R>,
    seen: HashSet<u64>,
    path: String,
    row: u64,
    done: bool,
}

impl BlockStream<BufReader<File>> {
    /// Opens a block CSV file for streaming iteration.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| annotate_io(e, path))?;
        BlockStream::from_reader(BufReader::new(file), &path.display().to_string())
    }
}

impl<R: Read> BlockStream<R> {
    /// Builds a stream over any reader; `path` is used in diagnostics.
    pub fn from_reader(reader: R, path: &str) -> Result<Self> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = csv_reader.headers().map_err(|e| Error::Format {
            path: path.to_string(),
            message: format!("missing or unreadable header: {e}"),
        })?;
        let got: Vec<&str> = headers.iter().collect();
        if got != BLOCKS_HEADER {
            return Err(Error::Format {
                path: path.to_string(),
                message: format!(
                    "expected header `{}`, found `{}`",
                    BLOCKS_HEADER.join(","),
                    got.join(",")
                ),
            });
        }
        Ok(BlockStream {
            records: csv_reader.into_byte_records(),
            seen: HashSet::new(),
            path: path.to_string(),
            row: 1,
            done: false,
        })
    }

    fn parse_record(&mut self, record: csv::ByteRecord) -> Result<BlockRecord> {
        self.row += 1;
        let malformed = |message: String| Error::MalformedRow {
            path: self.path.clone(),
            row: self.row,
            message,
        };
        if record.len() != 3 {
            return Err(malformed(format!(
                "expected 3 fields, found {}",
                record.len()
            )));
        }
        let field = |idx: usize, name: &str| -> Result<String> {
            String::from_utf8(record[idx].to_vec())
                .map_err(|_| malformed(format!("{name} is not valid UTF-8")))
        };
        let height: u64 = field(0, "height")?
            .trim()
            .parse()
            .map_err(|e| malformed(format!("bad height: {e}")))?;
        let generator = field(1, "generator")?;
        if generator.is_empty() {
            return Err(malformed("empty generator".to_string()));
        }
        let ts_raw = field(2, "timestamp")?;
        let timestamp = if ts_raw.trim().is_empty() {
            None
        } else {
            Some(
                ts_raw
                    .trim()
                    .parse()
                    .map_err(|e| malformed(format!("bad timestamp: {e}")))?,
            )
        };
        if !self.seen.insert(height) {
            return Err(Error::DuplicateHeight(height));
        }
        Ok(BlockRecord {
            height,
            generator,
            timestamp,
        })
    }
}

impl<R: Read> Iterator for BlockStream<R> {
    type Item = Result<BlockRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.records.next()? {
            Ok(record) => {
                let parsed = self.parse_record(record);
                if parsed.is_err() {
                    self.done = true;
                }
                Some(parsed)
            }
            Err(e) => {
                self.done = true;
                Some(Err(Error::MalformedRow {
                    path: self.path.clone(),
                    row: self.row + 1,
                    message: e.to_string(),
                }))
            }
        }
    }
}

/// Opens a block CSV for streaming iteration. Order is preserved and rows
/// are never silently dropped: every row becomes a record or an error.
pub fn load_blocks(path: impl AsRef<Path>) -> Result<BlockStream<BufReader<File>>> {
    BlockStream::open(path)
}

/// Writes a block stream CSV with the version comment and header.
pub fn write_blocks<I>(path: impl AsRef<Path>, blocks: I) -> Result<()>
where
    I: IntoIterator<Item = BlockRecord>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| annotate_io(e, path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# format_version: {FORMAT_VERSION}")?;
    writeln!(out, "{}", BLOCKS_HEADER.join(","))?;
    for block in blocks {
        let ts = block.timestamp.map(|t| t.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{}",
            block.height,
            escape_csv(&block.generator),
            ts
        )?;
    }
    out.flush()?;
    Ok(())
}

fn escape_csv(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn annotate_io(e: io::Error, path: &Path) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Chain sources
// ---------------------------------------------------------------------------

/// A place snapshots and block streams come from. The file-backed
/// implementation is the default; a live RPC adapter can implement the
/// same interface without touching the pipeline.
pub trait ChainSource {
    fn snapshot(&self) -> Result<LedgerSnapshot>;
    fn blocks(&self) -> Result<Box<dyn Iterator<Item = Result<BlockRecord>> + Send>>;
}

/// Chain source backed by a snapshot JSON file and a block CSV file.
#[derive(Debug, Clone)]
pub struct FileSource {
    pub snapshot_path: PathBuf,
    pub blocks_path: PathBuf,
}

impl FileSource {
    pub fn new(snapshot_path: impl Into<PathBuf>, blocks_path: impl Into<PathBuf>) -> Self {
        FileSource {
            snapshot_path: snapshot_path.into(),
            blocks_path: blocks_path.into(),
        }
    }
}

impl ChainSource for FileSource {
    fn snapshot(&self) -> Result<LedgerSnapshot> {
        load_snapshot(&self.snapshot_path)
    }

    fn blocks(&self) -> Result<Box<dyn Iterator<Item = Result<BlockRecord>> + Send>> {
        Ok(Box::new(load_blocks(&self.blocks_path)?))
    }
}
