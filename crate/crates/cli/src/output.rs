//! Output files: sensor CSV, grid snapshots and the step-system report.

use std::io::{self, BufRead, Write};

use biharmonic_core::mesh::Rect;
use biharmonic_core::time::StepCounts;

/// Writes `t,u_c` rows.
pub fn write_sensor_csv<W: Write>(out: W, samples: &[(f64, f64)]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["t", "u_c"])?;
    for &(t, u) in samples {
        w.write_record([t.to_string(), format!("{u:e}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sensor_csv<R: io::Read>(input: R) -> csv::Result<Vec<(f64, f64)>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Nodal values of the displacement on the full grid, boundary included.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub domain: Rect,
    pub time: f64,
    /// Row-major from the bottom row, `(ny + 1) × (nx + 1)`.
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.nx + 1) + i]
    }

    /// Header lines `nx`, `ny`, `domain x0 x1 y0 y1`, `t`, then one line per
    /// grid row with 17 significant digits.
    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        let d = &self.domain;
        writeln!(out, "nx {}", self.nx)?;
        writeln!(out, "ny {}", self.ny)?;
        writeln!(out, "domain {} {} {} {}", d.x_min, d.x_max, d.y_min, d.y_max)?;
        writeln!(out, "t {}", self.time)?;
        for row in self.values.chunks(self.nx + 1) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> io::Result<Snapshot> {
        let invalid = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut lines = input.lines();
        let mut header = |key: &str| -> io::Result<Vec<f64>> {
            let line = lines.next().ok_or_else(|| invalid("truncated header"))??;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(invalid(&format!("expected `{key}`")));
            }
            parts.map(|p| p.parse::<f64>().map_err(|_| invalid("bad number"))).collect()
        };
        let nx = header("nx")?[0] as usize;
        let ny = header("ny")?[0] as usize;
        let d = header("domain")?;
        if d.len() != 4 {
            return Err(invalid("domain needs four bounds"));
        }
        let time = header("t")?[0];
        let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
        for line in lines {
            for p in line?.split_whitespace() {
                values.push(p.parse().map_err(|_| invalid("bad number"))?);
            }
        }
        if values.len() != (nx + 1) * (ny + 1) {
            return Err(invalid("grid has the wrong number of values"));
        }
        Ok(Snapshot { nx, ny, domain: Rect::new(d[0], d[1], d[2], d[3]), time, values })
    }
}

/// `key = value` lines describing the per-step linear system.
pub fn write_report<W: Write>(mut out: W, counts: &StepCounts, steps: usize) -> io::Result<()> {
    writeln!(out, "scheme = {}", counts.scheme)?;
    writeln!(out, "dof = {}", counts.dof_total)?;
    writeln!(out, "dof_free = {}", counts.dof_free)?;
    writeln!(out, "nnz = {}", counts.nnz)?;
    writeln!(out, "steps = {steps}")
}
