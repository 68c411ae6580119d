//! CSV and JSON emission of traces, snapshots, metrics and summaries.
//!
//! Floating-point CSV fields carry 9 significant digits (`%.9g` style).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{RunOutput, RunSummary, Snapshot, TickMetrics};
use crate::geometry::{ParticleId, Vec2};
use crate::metrics::{Decision, TickRecord};
use crate::qlearning::ActionId;

pub const TRACE_HEADER: [&str; 8] = [
    "tick",
    "particle",
    "x",
    "y",
    "state",
    "action",
    "reward",
    "neighbor_count",
];
pub const SNAPSHOT_HEADER: [&str; 3] = ["particle", "x", "y"];

/// Renders `x` with 9 significant digits, switching to exponent notation
/// for very small or very large magnitudes and trimming trailing zeros.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `tick,particle,x,y,state,action,reward,neighbor_count`, one row per record.
pub fn write_trace_csv(trace: &[TickRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(TRACE_HEADER).map_err(csv_err(path))?;
    for r in trace {
        w.write_record([
            r.tick.to_string(),
            r.particle.to_string(),
            format_float(r.position.x),
            format_float(r.position.y),
            r.state.map(|s| s.name().to_string()).unwrap_or_default(),
            r.action.map(|a| a.index().to_string()).unwrap_or_default(),
            r.reward.map(format_float).unwrap_or_default(),
            r.neighbor_count.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Parses a trace written by [`write_trace_csv`].
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TickRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    if headers.iter().ne(TRACE_HEADER) {
        return Err(Error::TraceFormat {
            path: path.to_path_buf(),
            reason: format!("unexpected header {:?}", headers),
        });
    }
    let bad = |reason: String| Error::TraceFormat {
        path: path.to_path_buf(),
        reason,
    };
    let mut trace = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err(path))?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k)
                .parse::<f64>()
                .map_err(|e| bad(format!("column {}: {e}", TRACE_HEADER[k])))
        };
        let int = |k: usize| -> Result<u64> {
            field(k)
                .parse::<u64>()
                .map_err(|e| bad(format!("column {}: {e}", TRACE_HEADER[k])))
        };
        trace.push(TickRecord {
            tick: int(0)?,
            particle: ParticleId(int(1)? as usize),
            position: Vec2::new(num(2)?, num(3)?),
            state: match field(4) {
                "" => None,
                s => Some(s.parse().map_err(bad)?),
            },
            action: match field(5) {
                "" => None,
                _ => Some(ActionId(int(5)? as usize)),
            },
            reward: match field(6) {
                "" => None,
                _ => Some(num(6)?),
            },
            neighbor_count: int(7)? as usize,
        });
    }
    Ok(trace)
}

/// `particle,x,y`, one row per particle.
pub fn write_snapshot_csv(snapshot: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(SNAPSHOT_HEADER).map_err(csv_err(path))?;
    for (i, p) in snapshot.positions.iter().enumerate() {
        w.write_record([i.to_string(), format_float(p.x), format_float(p.y)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Per-tick swarm metrics.
pub fn write_metrics_csv(metrics: &[TickMetrics], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record([
        "tick",
        "connected_fraction",
        "dispersion",
        "largest_component",
        "overlap_fraction",
    ])
    .map_err(csv_err(path))?;
    for m in metrics {
        w.write_record([
            m.tick.to_string(),
            format_float(m.connected_fraction),
            format_float(m.dispersion),
            m.largest_component.to_string(),
            format_float(m.overlap_fraction),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Per-tick good/bad judgements of the observed particles.
pub fn write_decisions_csv(summary: &RunSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["tick", "particle", "decision"])
        .map_err(csv_err(path))?;
    let longest = summary
        .decision_series
        .iter()
        .map(|s| s.decisions.len())
        .max()
        .unwrap_or(0);
    for t in 0..longest {
        for series in &summary.decision_series {
            if let Some(d) = series.decisions.get(t) {
                let label = match d {
                    Decision::Good => "good",
                    Decision::Bad => "bad",
                    Decision::Idle => "idle",
                };
                w.write_record([
                    t.to_string(),
                    series.particle.to_string(),
                    label.to_string(),
                ])
                .map_err(csv_err(path))?;
            }
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn write_summary_json(summary: &RunSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, summary).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn write_text(text: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(io_err(path))
}

/// Writes every artefact of one run into `dir` (created if missing):
/// `trace.csv`, `metrics.csv`, `summary.json`, `config.toml`,
/// `snapshot_<tick>.csv` and, when decision series exist, `decisions.csv`.
pub fn write_run(output: &RunOutput, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_trace_csv(&output.trace, dir.join("trace.csv"))?;
    write_metrics_csv(&output.metrics, dir.join("metrics.csv"))?;
    for s in &output.snapshots {
        write_snapshot_csv(s, dir.join(format!("snapshot_{}.csv", s.tick)))?;
    }
    if !output.summary.decision_series.is_empty() {
        write_decisions_csv(&output.summary, dir.join("decisions.csv"))?;
    }
    write_text(
        &output.summary.config.to_toml_string()?,
        dir.join("config.toml"),
    )?;
    write_summary_json(&output.summary, dir.join("summary.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mql::StateId;
    use proptest::prelude::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-3.0), "-3");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(2.0 / 3.0 * 100.0), "66.6666667");
        assert_eq!(format_float(123_456_789.0), "123456789");
        assert_eq!(format_float(1_234_567_890.0), "1.23456789e9");
        assert_eq!(format_float(0.000_123_456_789_9), "0.00012345679");
        assert_eq!(format_float(0.000_012_5), "1.25e-5");
        assert_eq!(format_float(9.999_999_999_6), "10");
    }

    #[test]
    fn trace_round_trip_at_printed_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let trace = vec![
            TickRecord {
                tick: 0,
                particle: ParticleId(0),
                position: Vec2::new(1.0 / 7.0, 99.123_456_789_123),
                state: Some(StateId::Near),
                action: Some(ActionId(11)),
                reward: Some(-3.456_789_012_345_6),
                neighbor_count: 2,
            },
            TickRecord {
                tick: 0,
                particle: ParticleId(1),
                position: Vec2::new(0.0, 100.0),
                state: None,
                action: None,
                reward: None,
                neighbor_count: 0,
            },
        ];
        write_trace_csv(&trace, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tick,particle,x,y,state,action,reward,neighbor_count"
        );
        assert_eq!(
            lines.next().unwrap(),
            "0,0,0.142857143,99.1234568,NEAR,11,-3.45678901,2"
        );
        assert_eq!(lines.next().unwrap(), "0,1,0,100,,,,0");

        let back = read_trace_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].state, Some(StateId::Near));
        assert_eq!(back[0].action, Some(ActionId(11)));
        assert_eq!(back[0].position.x, 0.142857143);
        assert_eq!(back[1], trace[1]);
    }

    #[test]
    fn write_to_missing_directory_names_path() {
        let err = write_trace_csv(&[], "/no/such/dir/trace.csv").unwrap_err();
        assert!(err.to_string().contains("/no/such/dir/trace.csv"));
    }

    proptest! {
        #[test]
        fn formatted_float_reparses_within_precision(x in prop::num::f64::NORMAL) {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs());
            prop_assert_eq!(format_float(back), s);
        }
    }
}
