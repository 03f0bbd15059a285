//! Streaming readers for edge lists and attribute tables.

mod attributes;
mod edges;

pub use attributes::{column_histogram, column_histograms, AttributeReader, AttributeRow, ColumnTally, RowFilter};
pub use edges::{parse_edge_list, parse_graph, DegreeKind, DegreeTable, Graph};

use serde::{Deserialize, Serialize};

/// How parsers react to a malformed line or row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Stop at the first malformed record.
    #[default]
    Strict,
    /// Count and drop malformed records.
    Skip,
}
