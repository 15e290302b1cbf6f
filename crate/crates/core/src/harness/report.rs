//! Metrics CSV and trajectory JSON-lines files.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use crate::error::{Error, Result};
use crate::planner::PlannerKind;

use super::sim::{Comparison, EpochMetrics, RunResult};

const METRICS_NOTE: &str = "# rows cover estimate epochs 0..=N (N moves, N+1 estimates); \
empty mean_crlb_trace_m2 means the information matrix was singular in every run";

/// Writes `epoch,rmse_m,mean_det_fim,mean_crlb_trace_m2` with `#` comment lines.
pub fn write_metrics_csv<W: Write>(
    out: W,
    planner: PlannerKind,
    scenario: &str,
    metrics: &[EpochMetrics],
) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "# scenario={scenario} planner={planner}")?;
    writeln!(out, "{METRICS_NOTE}")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for m in metrics {
            w.serialize(m)?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_metrics_csv`].
pub fn parse_metrics_csv<R: Read>(input: R) -> Result<Vec<EpochMetrics>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Wide table: `epoch` then one `rmse_m_<planner>` column per planner.
pub fn write_comparison_csv<W: Write>(out: W, scenario: &str, cmp: &Comparison) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "# scenario={scenario} paired seeds across planners")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["epoch".to_string()];
        header.extend(cmp.planners.iter().map(|p| format!("rmse_m_{p}")));
        w.write_record(&header)?;
        let n = cmp.metrics.first().map_or(0, Vec::len);
        for t in 0..n {
            let mut row = vec![cmp.metrics[0][t].epoch.to_string()];
            row.extend(cmp.metrics.iter().map(|m| m[t].rmse_m.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(())
}

/// One JSON object per run, one run per line.
pub fn write_run_results<W: Write>(out: W, runs: &[RunResult]) -> Result<()> {
    let mut out = BufWriter::new(out);
    for r in runs {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_run_results<R: Read>(input: R) -> Result<Vec<RunResult>> {
    let mut runs = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        runs.push(serde_json::from_str(&line)?);
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn metric() -> impl Strategy<Value = EpochMetrics> {
        (
            0usize..100,
            0.0f64..1e4,
            0.0f64..1e3,
            prop::option::of(0.0f64..1e6),
        )
            .prop_map(
                |(epoch, rmse_m, mean_det_fim, mean_crlb_trace_m2)| EpochMetrics {
                    epoch,
                    rmse_m,
                    mean_det_fim,
                    mean_crlb_trace_m2,
                },
            )
    }

    #[test]
    fn missing_trace_is_empty_field() {
        let m = vec![EpochMetrics {
            epoch: 0,
            rmse_m: 1.5,
            mean_det_fim: 0.0,
            mean_crlb_trace_m2: None,
        }];
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, PlannerKind::Greedy, "t", &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# scenario=t planner=greedy\n"));
        assert!(text.contains("epoch,rmse_m,mean_det_fim,mean_crlb_trace_m2\n"));
        assert!(text.contains("0,1.5,0.0,\n"), "{text}");
    }

    proptest! {
        #[test]
        fn metrics_csv_round_trip(rows in prop::collection::vec(metric(), 0..20)) {
            let mut buf = Vec::new();
            write_metrics_csv(&mut buf, PlannerKind::Hybrid { switch_epoch: 10 }, "x", &rows).unwrap();
            prop_assert_eq!(parse_metrics_csv(buf.as_slice()).unwrap(), rows);
        }
    }
}
