use std::io::Read;

use csv::{ByteRecord, ReaderBuilder};
use serde::{Deserialize, Serialize};

use super::ParseMode;
use crate::digits::FsdHistogram;
use crate::error::IngestError;

/// Drops rows whose listed columns are zero.
///
/// Missing cells never count as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "drop", content = "columns", rename_all = "snake_case")]
pub enum RowFilter {
    /// Drop the row when every listed column is zero.
    AllZero(Vec<String>),
    /// Drop the row when any listed column is zero.
    AnyZero(Vec<String>),
}

#[derive(Debug, Clone)]
enum ResolvedFilter {
    AllZero(Vec<usize>),
    AnyZero(Vec<usize>),
}

impl ResolvedFilter {
    fn drops(&self, values: &[Option<u64>]) -> bool {
        let zero = |&i: &usize| values[i] == Some(0);
        match self {
            ResolvedFilter::AllZero(cols) => cols.iter().all(zero),
            ResolvedFilter::AnyZero(cols) => cols.iter().any(zero),
        }
    }
}

/// A borrowed row: the id cell and the selected columns' values.
pub type RowRef<'a> = (&'a str, &'a [Option<u64>]);

/// One owned row of selected columns. `values[i]` belongs to the i-th
/// selected column; `None` marks an empty cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeRow {
    pub row: u64,
    pub id: String,
    pub values: Vec<Option<u64>>,
}

/// Streaming reader over a headered CSV attribute file.
///
/// The first column is the user id; the requested columns must appear in the
/// header and hold nonnegative integers or nothing. Only one record is held
/// in memory at a time.
pub struct AttributeReader<R: Read> {
    reader: csv::Reader<R>,
    record: ByteRecord,
    columns: Vec<String>,
    indices: Vec<usize>,
    values: Vec<Option<u64>>,
    filter: Option<ResolvedFilter>,
    mode: ParseMode,
    rows_read: u64,
    skipped: u64,
    filtered: u64,
    exhausted: bool,
}

impl<R: Read> AttributeReader<R> {
    /// Reads the header and resolves `columns` against it.
    ///
    /// A completely empty source is accepted and yields no rows.
    pub fn new(source: R, columns: &[&str], mode: ParseMode) -> Result<Self, IngestError> {
        let mut reader = ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(source);
        let header = reader.byte_headers().map_err(|e| csv_error(e, 0))?.clone();
        let exhausted = header.is_empty();
        let mut indices = Vec::with_capacity(columns.len());
        if !exhausted {
            for &name in columns {
                let idx = header
                    .iter()
                    .position(|h| trim(h) == name.as_bytes())
                    .ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
                indices.push(idx);
            }
        }
        Ok(Self {
            reader,
            record: ByteRecord::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            values: vec![None; columns.len()],
            indices,
            filter: None,
            mode,
            rows_read: 0,
            skipped: 0,
            filtered: 0,
            exhausted,
        })
    }

    /// Installs a row filter. Filter columns must be among the selected ones.
    pub fn with_filter(mut self, filter: RowFilter) -> Result<Self, IngestError> {
        let resolve = |names: &[String]| -> Result<Vec<usize>, IngestError> {
            names
                .iter()
                .map(|n| {
                    self.columns
                        .iter()
                        .position(|c| c == n)
                        .ok_or_else(|| IngestError::MissingColumn(n.clone()))
                })
                .collect()
        };
        self.filter = Some(match &filter {
            RowFilter::AllZero(c) => ResolvedFilter::AllZero(resolve(c)?),
            RowFilter::AnyZero(c) => ResolvedFilter::AnyZero(resolve(c)?),
        });
        Ok(self)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Data rows read so far, including skipped and filtered ones.
    pub fn rows_read(&self) -> u64 {
        self.rows_read
    }

    /// Malformed rows dropped in skip mode.
    pub fn skipped_rows(&self) -> u64 {
        self.skipped
    }

    /// Rows dropped by the row filter.
    pub fn filtered_rows(&self) -> u64 {
        self.filtered
    }

    /// Advances to the next accepted row and returns its id and values.
    ///
    /// Borrowed from the reader's buffers; nothing is allocated per row.
    pub fn next_row(&mut self) -> Result<Option<RowRef<'_>>, IngestError> {
        loop {
            if self.exhausted {
                return Ok(None);
            }
            let more = match self.reader.read_byte_record(&mut self.record) {
                Ok(more) => more,
                Err(e) => {
                    self.rows_read += 1;
                    let err = csv_error(e, self.rows_read);
                    if matches!(err, IngestError::Io(_)) || self.mode == ParseMode::Strict {
                        return Err(err);
                    }
                    self.skipped += 1;
                    continue;
                }
            };
            if !more {
                self.exhausted = true;
                return Ok(None);
            }
            self.rows_read += 1;
            match self.decode() {
                Ok(()) => {}
                Err(e) if self.mode == ParseMode::Strict => return Err(e),
                Err(_) => {
                    self.skipped += 1;
                    continue;
                }
            }
            if self.filter.as_ref().is_some_and(|f| f.drops(&self.values)) {
                self.filtered += 1;
                continue;
            }
            let id = std::str::from_utf8(trim(self.record.get(0).unwrap_or_default()))
                .unwrap_or_default();
            return Ok(Some((id, &self.values)));
        }
    }

    fn decode(&mut self) -> Result<(), IngestError> {
        if std::str::from_utf8(self.record.as_slice()).is_err() {
            return Err(IngestError::BadRow {
                row: self.rows_read,
                message: "not valid UTF-8".into(),
            });
        }
        for (k, &idx) in self.indices.iter().enumerate() {
            let cell = trim(self.record.get(idx).unwrap_or_default());
            self.values[k] = if cell.is_empty() {
                None
            } else {
                Some(parse_u64(cell).ok_or_else(|| IngestError::BadCell {
                    row: self.rows_read,
                    column: self.columns[k].clone(),
                    text: String::from_utf8_lossy(cell).into_owned(),
                })?)
            };
        }
        Ok(())
    }

    /// Owned-row iterator.
    pub fn rows(self) -> Rows<R> {
        Rows { reader: self }
    }
}

pub struct Rows<R: Read> {
    reader: AttributeReader<R>,
}

impl<R: Read> Iterator for Rows<R> {
    type Item = Result<AttributeRow, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.reader.next_row() {
            Ok(Some((id, values))) => {
                let (id, values) = (id.to_string(), values.to_vec());
                Some(Ok(AttributeRow {
                    row: self.reader.rows_read,
                    id,
                    values,
                }))
            }
            Ok(None) => None,
            Err(e) => {
                self.reader.exhausted = true;
                Some(Err(e))
            }
        }
    }
}

fn trim(bytes: &[u8]) -> &[u8] {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(bytes.len());
    let end = bytes.iter().rposition(|b| !b.is_ascii_whitespace()).map_or(start, |e| e + 1);
    &bytes[start..end]
}

fn parse_u64(bytes: &[u8]) -> Option<u64> {
    if bytes.is_empty() || !bytes.iter().all(u8::is_ascii_digit) {
        return None;
    }
    bytes.iter().try_fold(0u64, |acc, &b| {
        acc.checked_mul(10)?.checked_add(u64::from(b - b'0'))
    })
}

fn csv_error(e: csv::Error, row: u64) -> IngestError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            _ => unreachable!(),
        }
    } else {
        IngestError::BadRow {
            row,
            message: e.to_string(),
        }
    }
}

/// Digit histogram for one selected column, plus how many of its cells were
/// empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnTally {
    pub column: String,
    pub histogram: FsdHistogram,
    pub missing: u64,
}

/// Drains `reader`, accumulating every selected column.
pub fn column_histograms<R: Read>(reader: &mut AttributeReader<R>) -> Result<Vec<ColumnTally>, IngestError> {
    let mut tallies: Vec<ColumnTally> = reader
        .columns()
        .iter()
        .map(|c| ColumnTally {
            column: c.clone(),
            histogram: FsdHistogram::new(),
            missing: 0,
        })
        .collect();
    while let Some((_, values)) = reader.next_row()? {
        for (t, v) in tallies.iter_mut().zip(values) {
            match v {
                Some(v) => t.histogram.accumulate(*v),
                None => t.missing += 1,
            }
        }
    }
    Ok(tallies)
}

/// Drains `reader`, accumulating only `column`.
pub fn column_histogram<R: Read>(reader: &mut AttributeReader<R>, column: &str) -> Result<ColumnTally, IngestError> {
    let idx = reader
        .columns()
        .iter()
        .position(|c| c == column)
        .ok_or_else(|| IngestError::MissingColumn(column.to_string()))?;
    let mut tally = ColumnTally {
        column: column.to_string(),
        histogram: FsdHistogram::new(),
        missing: 0,
    };
    while let Some((_, values)) = reader.next_row()? {
        match values[idx] {
            Some(v) => tally.histogram.accumulate(v),
            None => tally.missing += 1,
        }
    }
    Ok(tally)
}
