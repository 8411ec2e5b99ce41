//! Deterministic file output: CSV tables and JSON documents written through a
//! temporary file and renamed into place.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rumorgame::emergence::IterationReport;
use rumorgame::engine::{KnowledgeHistogram, StepEvent};

/// Bumped whenever a column is added, removed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

pub const KNOWLEDGE_HEADER: [&str; 4] = ["time", "bin_lo", "bin_hi", "count"];
pub const DEGREE_HEADER: [&str; 3] = ["iteration", "degree", "count"];
pub const FIT_HEADER: [&str; 6] = ["iteration", "exponent", "intercept", "r_squared", "d_min", "d_max"];
pub const EDGE_HEADER: [&str; 6] = ["iteration", "node_a", "node_b", "utility_a", "utility_b", "kept"];
pub const EVENT_HEADER: [&str; 7] = [
    "game",
    "speaker",
    "partner",
    "row_strategy",
    "col_strategy",
    "du_speaker",
    "du_partner",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp: PathBuf = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// In-memory CSV table with `\n` line endings.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

pub fn knowledge_table(series: &[KnowledgeHistogram]) -> Table {
    let mut t = Table::new(&KNOWLEDGE_HEADER);
    for h in series {
        for (i, count) in h.counts.iter().enumerate() {
            t.row([
                fmt_float(h.time),
                fmt_float(h.edges[i]),
                fmt_float(h.edges[i + 1]),
                count.to_string(),
            ]);
        }
    }
    t
}

pub fn event_row(t: &mut Table, game: u64, ev: &StepEvent) {
    t.row([
        game.to_string(),
        ev.speaker.to_string(),
        ev.partner.to_string(),
        ev.game.row_strategy.index().to_string(),
        ev.game.col_strategy.index().to_string(),
        fmt_float(ev.game.outcome.du_a),
        fmt_float(ev.game.outcome.du_b),
    ]);
}

/// Degree histograms for the initial graph (iteration 0) and every round.
pub fn degree_table(initial: &rumorgame::emergence::DegreeHistogram, reports: &[IterationReport]) -> Table {
    let mut t = Table::new(&DEGREE_HEADER);
    let rounds = std::iter::once((0, initial)).chain(reports.iter().map(|r| (r.iteration, &r.histogram)));
    for (iteration, hist) in rounds {
        for (d, c) in &hist.counts {
            t.row([iteration.to_string(), d.to_string(), c.to_string()]);
        }
    }
    t
}

/// One row per round; fit columns are empty when the range had too few
/// degrees to fit.
pub fn fit_table(reports: &[IterationReport], d_min: usize, d_max: usize) -> Table {
    let mut t = Table::new(&FIT_HEADER);
    for r in reports {
        let (e, i, r2) = match r.fit {
            Some(f) => (fmt_float(f.exponent), fmt_float(f.intercept), fmt_float(f.r_squared)),
            None => (String::new(), String::new(), String::new()),
        };
        t.row([r.iteration.to_string(), e, i, r2, d_min.to_string(), d_max.to_string()]);
    }
    t
}

pub fn edge_table(reports: &[IterationReport], rule: rumorgame::emergence::PruneRule) -> Table {
    let mut t = Table::new(&EDGE_HEADER);
    for r in reports {
        for e in r.played.edges() {
            let kept = !rule.severs(e.utility_a, e.utility_b);
            t.row([
                r.iteration.to_string(),
                e.a.to_string(),
                e.b.to_string(),
                fmt_float(e.utility_a),
                fmt_float(e.utility_b),
                (kept as u8).to_string(),
            ]);
        }
    }
    t
}
