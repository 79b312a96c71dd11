use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::IterationRecord;

pub const TRACE_HEADER: &str = "k,beta,psi,lyapunov,dh_prev_cur,dh_cur_y,rel_change,fallback_y";

fn num(out: &mut String, v: f64) {
    // 17 significant digits round-trip any f64.
    let _ = write!(out, "{v:.16e}");
}

fn opt(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        num(out, v);
    }
}

/// Renders a trace as CSV. Absent Ψ/H values are empty fields.
pub fn trace_to_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::with_capacity(64 + trace.len() * 160);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let _ = write!(out, "{},", r.k);
        num(&mut out, r.beta_accepted);
        out.push(',');
        opt(&mut out, r.psi);
        out.push(',');
        opt(&mut out, r.lyapunov);
        out.push(',');
        num(&mut out, r.dh_prev_cur);
        out.push(',');
        num(&mut out, r.dh_cur_y);
        out.push(',');
        num(&mut out, r.rel_change);
        let _ = writeln!(out, ",{}", r.fallback_y);
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(crate::error::create_file(path)?);
    f.write_all(trace_to_csv(trace).as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn read_trace_csv(reader: impl BufRead, source_name: &str) -> Result<Vec<IterationRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line: Some(line),
        message,
    };
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == TRACE_HEADER => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(err(1, "missing trace header".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 8 {
            return Err(err(lineno, format!("expected 8 fields, found {}", f.len())));
        }
        let real = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| err(lineno, format!("`{s}`: {e}")))
        };
        let maybe = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                real(s).map(Some)
            }
        };
        out.push(IterationRecord {
            k: f[0].parse().map_err(|e| err(lineno, format!("`{}`: {e}", f[0])))?,
            beta_accepted: real(f[1])?,
            psi: maybe(f[2])?,
            lyapunov: maybe(f[3])?,
            dh_prev_cur: real(f[4])?,
            dh_cur_y: real(f[5])?,
            rel_change: real(f[6])?,
            fallback_y: f[7]
                .parse()
                .map_err(|e| err(lineno, format!("`{}`: {e}", f[7])))?,
        });
    }
    Ok(out)
}
