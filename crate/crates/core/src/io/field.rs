//! Field files: one row per cell, row-major (`i·n2 + j`).
//!
//! Text: a `# conical-field version=1 n1=.. n2=..` line, a CSV header, then the
//! values printed with shortest round-trip formatting. Binary: the magic
//! `CONICFLD`, `u32` version, `u64` n1, `u64` n2, `u32` column count and the
//! little-endian `f64` values. Both formats read back bit for bit.

use super::config::FieldFormat;
use crate::classify::classify_speeds;
use crate::gas::GasModel;
use crate::solver::{Mesh, Solution};
use crate::state::{crossflow_speed, PrimitiveState};
use crate::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const FIELD_VERSION: u32 = 1;
pub const FIELD_COLUMNS: [&str; 11] = [
    "xi1", "xi2", "rho", "v1", "v2", "V3", "e", "P", "q_c", "c", "margin",
];
const MAGIC: &[u8; 8] = b"CONICFLD";

/// Cell-center data of one field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub n1: usize,
    pub n2: usize,
    /// `n1·n2` rows in [`FIELD_COLUMNS`] order.
    pub rows: Vec<[f64; 11]>,
}

impl FieldFile {
    pub fn from_solution<G: GasModel + ?Sized>(
        mesh: &Mesh,
        sol: &Solution,
        gas: &G,
    ) -> Result<Self> {
        let prims = sol.primitives(mesh)?;
        let rows = prims
            .iter()
            .zip(mesh.centers())
            .enumerate()
            .map(|(k, (p, xi))| {
                let pe = gas.pressure(p.rho, p.e)?;
                let c = gas.sound_speed(p.rho, p.e)?;
                let q_c = crossflow_speed(p.v(), mesh.cell_metric(k));
                let margin = classify_speeds(q_c, c, 0.0).margin;
                Ok([
                    xi[0], xi[1], p.rho, p.v1, p.v2, p.v3, p.e, pe.p, q_c, c, margin,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n1: mesh.n1,
            n2: mesh.n2,
            rows,
        })
    }

    pub fn primitives(&self) -> Vec<PrimitiveState> {
        self.rows
            .iter()
            .map(|r| PrimitiveState::new(r[2], r[3], r[4], r[5], r[6]))
            .collect()
    }

    /// Conserved field on `mesh`, which must have the same shape.
    pub fn to_solution(&self, mesh: &Mesh) -> Result<Solution> {
        if (self.n1, self.n2) != (mesh.n1, mesh.n2) {
            return Err(Error::Config(format!(
                "field is {}x{}, mesh is {}x{}",
                self.n1, self.n2, mesh.n1, mesh.n2
            )));
        }
        Solution::from_primitives(mesh, &self.primitives())
    }

    pub fn write_text<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(
            w,
            "# conical-field version={FIELD_VERSION} n1={} n2={}",
            self.n1, self.n2
        )?;
        writeln!(w, "{}", FIELD_COLUMNS.join(","))?;
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|x| format!("{x:?}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&FIELD_VERSION.to_le_bytes())?;
        w.write_all(&(self.n1 as u64).to_le_bytes())?;
        w.write_all(&(self.n2 as u64).to_le_bytes())?;
        w.write_all(&(FIELD_COLUMNS.len() as u32).to_le_bytes())?;
        for r in &self.rows {
            for x in r {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path, format: FieldFormat) -> Result<()> {
        let f = std::fs::File::create(path)?;
        match format {
            FieldFormat::Text => self.write_text(f),
            FieldFormat::Binary => self.write_binary(f),
        }
    }

    /// Either format, told apart by the leading bytes.
    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let head = r.fill_buf()?;
        if head.starts_with(MAGIC) {
            Self::read_binary(r)
        } else {
            Self::read_text(r)
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(f).map_err(|e| match e {
            Error::FieldFormat(m) => Error::FieldFormat(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
            let mut b = [0u8; N];
            r.read_exact(&mut b)
                .map_err(|_| Error::FieldFormat("truncated binary field".into()))?;
            Ok(b)
        }
        take::<8, _>(&mut r)?;
        let version = u32::from_le_bytes(take(&mut r)?);
        if version != FIELD_VERSION {
            return Err(Error::FieldFormat(format!("unsupported version {version}")));
        }
        let n1 = u64::from_le_bytes(take(&mut r)?) as usize;
        let n2 = u64::from_le_bytes(take(&mut r)?) as usize;
        let ncols = u32::from_le_bytes(take(&mut r)?) as usize;
        if ncols != FIELD_COLUMNS.len() {
            return Err(Error::FieldFormat(format!(
                "expected {} columns, header says {ncols}",
                FIELD_COLUMNS.len()
            )));
        }
        let n = n1
            .checked_mul(n2)
            .ok_or_else(|| Error::FieldFormat("absurd mesh size".into()))?;
        let mut rows = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            let mut row = [0.0; 11];
            for x in &mut row {
                *x = f64::from_le_bytes(take(&mut r)?);
            }
            rows.push(row);
        }
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(Error::FieldFormat(
                "trailing bytes after binary field".into(),
            ));
        }
        Ok(Self { n1, n2, rows })
    }

    fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let bad = |n: usize, m: String| Error::FieldFormat(format!("line {}: {m}", n + 1));
        let (n, first) = lines
            .next()
            .ok_or_else(|| Error::FieldFormat("empty field file".into()))?;
        let first = first?;
        let meta = first
            .strip_prefix("# conical-field ")
            .ok_or_else(|| bad(n, "missing '# conical-field' line".into()))?;
        let (mut version, mut n1, mut n2) = (None, None, None);
        for kv in meta.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(n, format!("bad metadata '{kv}'")))?;
            let v: usize = v
                .parse()
                .map_err(|_| bad(n, format!("bad metadata value '{kv}'")))?;
            match k {
                "version" => version = Some(v),
                "n1" => n1 = Some(v),
                "n2" => n2 = Some(v),
                _ => return Err(bad(n, format!("unknown metadata key '{k}'"))),
            }
        }
        if version != Some(FIELD_VERSION as usize) {
            return Err(bad(n, format!("unsupported version {version:?}")));
        }
        let (n1, n2) = match (n1, n2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(bad(n, "n1 and n2 are required".into())),
        };
        let (n, header) = lines
            .next()
            .ok_or_else(|| Error::FieldFormat("missing column header".into()))?;
        if header?.trim() != FIELD_COLUMNS.join(",") {
            return Err(bad(n, "unexpected column header".into()));
        }
        let mut rows = Vec::new();
        for (n, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(n, e.to_string()))?;
            let row: [f64; 11] = vals
                .try_into()
                .map_err(|v: Vec<f64>| bad(n, format!("expected 11 values, got {}", v.len())))?;
            rows.push(row);
        }
        if rows.len() != n1 * n2 {
            return Err(Error::FieldFormat(format!(
                "expected {} rows, found {}",
                n1 * n2,
                rows.len()
            )));
        }
        Ok(Self { n1, n2, rows })
    }
}
