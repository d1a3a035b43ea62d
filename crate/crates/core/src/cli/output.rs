//! CSV, JSON and per-tic trace emitters.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::handover::TraceRow;
use crate::harness::{Provenance, SweepResult};
use crate::kpi::KpiCell;

/// Column order of the results CSV.
pub const CSV_HEADER: [&str; 10] = [
    "case",
    "ttt_tics",
    "den_gnb",
    "velocity_kmh",
    "iterations",
    "mean_ho_rate",
    "ho_avg_geo_db",
    "pooled_ho_avg_geo_db",
    "failure",
    "connection_losses_mean",
];

pub const TRACE_HEADER: [&str; 9] = [
    "tic",
    "x_m",
    "y_m",
    "serving",
    "best",
    "serving_geo_db",
    "best_geo_db",
    "ho_timer",
    "event",
];

/// One flattened result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub case: String,
    pub ttt_tics: u32,
    pub den_gnb: u32,
    pub velocity_kmh: f64,
    pub iterations: u32,
    pub mean_ho_rate: f64,
    pub ho_avg_geo_db: Option<f64>,
    pub pooled_ho_avg_geo_db: Option<f64>,
    pub failure: bool,
    pub connection_losses_mean: f64,
}

impl From<&KpiCell> for OutputRecord {
    fn from(c: &KpiCell) -> Self {
        Self {
            case: c.point.case.to_string(),
            ttt_tics: c.point.ttt_tics,
            den_gnb: c.point.den_gnb,
            velocity_kmh: c.point.velocity_kmh,
            iterations: c.iterations,
            mean_ho_rate: c.mean_ho_rate,
            ho_avg_geo_db: c.ho_avg_geo_db,
            pooled_ho_avg_geo_db: c.pooled_ho_avg_geo_db,
            failure: c.failure,
            connection_losses_mean: c.connection_losses_mean,
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| x.to_string())
}

fn parse_opt(s: &str) -> Result<Option<f64>, String> {
    if s == "nan" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|e| format!("`{s}`: {e}"))
    }
}

impl OutputRecord {
    fn to_fields(&self) -> [String; 10] {
        [
            self.case.clone(),
            self.ttt_tics.to_string(),
            self.den_gnb.to_string(),
            self.velocity_kmh.to_string(),
            self.iterations.to_string(),
            self.mean_ho_rate.to_string(),
            fmt_opt(self.ho_avg_geo_db),
            fmt_opt(self.pooled_ho_avg_geo_db),
            self.failure.to_string(),
            self.connection_losses_mean.to_string(),
        ]
    }

    fn from_fields(rec: &csv::StringRecord) -> Result<Self, String> {
        if rec.len() != CSV_HEADER.len() {
            return Err(format!("expected {} columns, got {}", CSV_HEADER.len(), rec.len()));
        }
        let num = |i: usize| -> Result<f64, String> {
            rec[i].parse().map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        let int = |i: usize| -> Result<u32, String> {
            rec[i].parse().map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        Ok(Self {
            case: rec[0].to_string(),
            ttt_tics: int(1)?,
            den_gnb: int(2)?,
            velocity_kmh: num(3)?,
            iterations: int(4)?,
            mean_ho_rate: num(5)?,
            ho_avg_geo_db: parse_opt(&rec[6])?,
            pooled_ho_avg_geo_db: parse_opt(&rec[7])?,
            failure: rec[8].parse().map_err(|e| format!("failure: {e}"))?,
            connection_losses_mean: num(9)?,
        })
    }
}

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::new(io::ErrorKind::InvalidData, format!("{other:?}")),
    }
}

pub fn write_records<W: Write>(records: &[OutputRecord], sink: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(r.to_fields()).map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_csv<W: Write>(result: &SweepResult, sink: W) -> io::Result<()> {
    let records: Vec<OutputRecord> = result.cells.iter().map(OutputRecord::from).collect();
    write_records(&records, sink)
}

pub fn read_csv<R: Read>(source: R) -> io::Result<Vec<OutputRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "unexpected CSV header"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            OutputRecord::from_fields(&rec).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
        })
        .collect()
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    provenance: &'a Provenance,
    rows: Vec<OutputRecord>,
}

pub fn write_json<W: Write>(result: &SweepResult, mut sink: W) -> io::Result<()> {
    let doc = JsonDoc {
        provenance: &result.provenance,
        rows: result.cells.iter().map(OutputRecord::from).collect(),
    };
    serde_json::to_writer_pretty(&mut sink, &doc)?;
    sink.write_all(b"\n")?;
    sink.flush()
}

/// Streams [`TraceRow`]s as CSV.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(sink: W) -> io::Result<Self> {
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        inner.write_record(TRACE_HEADER).map_err(csv_err)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, row: &TraceRow) -> io::Result<()> {
        let id = |v: Option<usize>| v.map(|i| i.to_string()).unwrap_or_default();
        let geo = |v: Option<f64>| v.map(|g| g.to_string()).unwrap_or_default();
        self.inner
            .write_record([
                row.tic.to_string(),
                row.x_m.to_string(),
                row.y_m.to_string(),
                id(row.serving),
                id(row.best),
                geo(row.serving_geo_db),
                geo(row.best_geo_db),
                row.ho_timer.to_string(),
                row.event.map(|e| e.as_str().to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
