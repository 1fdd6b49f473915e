//! Residual histories and region maps as CSV.

use crate::classify::FlowType;
use crate::solver::{RegionRecord, Solution};
use crate::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};

pub const RESIDUAL_HEADER: &str = "iteration,r_mass,r_mom1,r_mom2,r_mom_r,r_energy";
pub const REGION_HEADER: &str = "cell,i,j,xi1,xi2,q_c,c,margin,label";

/// Per-equation relative residuals, one row per iteration (1-based).
pub fn write_residuals<W: Write>(w: W, sol: &Solution) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{RESIDUAL_HEADER}")?;
    for (k, r) in sol.history.iter().enumerate() {
        writeln!(
            w,
            "{},{:?},{:?},{:?},{:?},{:?}",
            k + 1,
            r[0],
            r[1],
            r[2],
            r[3],
            r[4]
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_regions<W: Write>(w: W, records: &[RegionRecord]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{REGION_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{:?},{:?},{:?},{:?},{:?},{}",
            r.cell,
            r.i,
            r.j,
            r.xi[0],
            r.xi[1],
            r.q_c,
            r.c,
            r.margin,
            r.label.as_str()
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_regions<R: Read>(r: R) -> Result<Vec<RegionRecord>> {
    let mut lines = BufReader::new(r).lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == REGION_HEADER => {}
        _ => return Err(Error::FieldFormat("missing region header".into())),
    }
    let mut out = Vec::new();
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| Error::FieldFormat(format!("line {}: {m}", n + 1));
        let t: Vec<&str> = line.split(',').map(str::trim).collect();
        if t.len() != 9 {
            return Err(bad(format!("expected 9 values, got {}", t.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(e.to_string()));
        let real = |s: &str| s.parse::<f64>().map_err(|e| bad(e.to_string()));
        out.push(RegionRecord {
            cell: int(t[0])?,
            i: int(t[1])?,
            j: int(t[2])?,
            xi: [real(t[3])?, real(t[4])?],
            q_c: real(t[5])?,
            c: real(t[6])?,
            margin: real(t[7])?,
            label: t[8].parse::<FlowType>().map_err(|e| bad(e.to_string()))?,
        });
    }
    Ok(out)
}
