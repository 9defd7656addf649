//! Convergence studies on the manufactured solution.

use std::fmt::Write as _;
use std::io::Write;
use std::thread;

use biharmonic_core::cases::ManufacturedCase;
use biharmonic_core::harness::{run_level, EocTable, StudyPlan};
use biharmonic_core::time::SchemeKind;

use crate::CliError;

/// Runs all levels of `plan`, one thread per level.
pub fn run_converge(scheme: SchemeKind, case: &(dyn ManufacturedCase + Sync), plan: &StudyPlan) -> Result<EocTable, CliError> {
    let results = thread::scope(|scope| {
        let handles: Vec<_> =
            (0..plan.levels).map(|level| scope.spawn(move || run_level(scheme, case, plan, level))).collect();
        handles.into_iter().map(|h| h.join().expect("study thread panicked")).collect::<Vec<_>>()
    });
    let levels = results.into_iter().collect::<biharmonic_core::Result<Vec<_>>>()?;
    Ok(EocTable::from_levels(scheme, levels))
}

const HEADER: [&str; 9] = ["level", "tau", "h", "err_linf_tau", "eoc", "err_linf", "eoc", "err_l2l2", "eoc"];

fn eoc_field(e: Option<f64>) -> String {
    e.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_eoc_csv<W: Write>(out: W, table: &EocTable) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in &table.rows {
        let e = r.errors.as_array();
        w.write_record([
            r.level.to_string(),
            r.tau.to_string(),
            r.h.to_string(),
            e[0].to_string(),
            eoc_field(r.eoc[0]),
            e[1].to_string(),
            eoc_field(r.eoc[1]),
            e[2].to_string(),
            eoc_field(r.eoc[2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text table in the layout of the CSV.
pub fn format_table(table: &EocTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme {}", table.scheme);
    let _ = writeln!(
        s,
        "{:>5} {:>10} {:>10} {:>12} {:>6} {:>12} {:>6} {:>12} {:>6}",
        HEADER[0], HEADER[1], HEADER[2], HEADER[3], HEADER[4], HEADER[5], HEADER[6], HEADER[7], HEADER[8]
    );
    for r in &table.rows {
        let e = r.errors.as_array();
        let eoc = r.eoc.map(|v| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "--".into()));
        let _ = writeln!(
            s,
            "{:>5} {:>10.4e} {:>10.4e} {:>12.3e} {:>6} {:>12.3e} {:>6} {:>12.3e} {:>6}",
            r.level, r.tau, r.h, e[0], eoc[0], e[1], eoc[1], e[2], eoc[2]
        );
    }
    s
}
