//! Config-driven runs: sensor signal, snapshots and step counts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use biharmonic_core::assembly::{assemble, AssembledOperators};
use biharmonic_core::mesh::TensorMesh;
use biharmonic_core::sensor::Sensor;
use biharmonic_core::time::{initial_state, integrate, report_counts, Component, Problem, StepCounts};

use crate::config::ScenarioConfig;
use crate::output::{write_report, write_sensor_csv, Snapshot};
use crate::CliError;

/// Everything a run produces, before it is written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub counts: StepCounts,
    pub steps: usize,
    /// `(t, u_c(t))`, empty without a sensor.
    pub sensor: Vec<(f64, f64)>,
    pub snapshots: Vec<Snapshot>,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun, CliError> {
    let mesh = config.mesh()?;
    let ops = assemble(&mesh, &config.coefficient_field())?;
    let partition = config.partition()?;
    let forcing = config.forcing();
    let data = config.initial_data();
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: forcing.as_ref() };
    let init = initial_state(&problem, data.as_ref(), partition.tau(1), config.slope())?;

    let sensor = config.sensor_region().map(|r| Sensor::new(&mesh, &r)).transpose()?;
    let per_step = config.sensor.as_ref().map_or(1, |s| s.samples_per_step);
    // snapshot k is taken on interval `wanted[k].0` at local time `wanted[k].1`
    let wanted =
        config.output.snapshots.iter().map(|&t| partition.locate(t)).collect::<biharmonic_core::Result<Vec<_>>>()?;
    let mut snapshots: Vec<Option<Snapshot>> = vec![None; wanted.len()];
    let mut samples = Vec::new();
    let mut buf = vec![0.0; ops.dofs.num_free()];
    let nodes = partition.nodes();

    integrate(&problem, config.scheme.kind, &partition, &init, |seg| {
        if let Some(sensor) = &sensor {
            let first = if seg.index == 1 { 0 } else { 1 };
            for j in first..=per_step {
                let s = j as f64 / per_step as f64;
                let t = if j == per_step { nodes[seg.index] } else { seg.start + s * seg.tau };
                seg.evaluate_into(s, Component::Displacement, 0, &mut buf)?;
                samples.push((t, sensor.value(&mesh, &ops.cell_dofs, &buf)));
            }
        }
        for (k, &(n, s)) in wanted.iter().enumerate() {
            if n == seg.index {
                seg.evaluate_into(s, Component::Displacement, 0, &mut buf)?;
                snapshots[k] = Some(grid_values(&mesh, &ops, &buf, config.output.snapshots[k]));
            }
        }
        Ok(())
    })?;

    Ok(ScenarioRun {
        counts: report_counts(&ops, config.scheme.kind)?,
        steps: partition.num_intervals(),
        sensor: samples,
        snapshots: snapshots.into_iter().map(|s| s.expect("every snapshot time lies in some interval")).collect(),
    })
}

fn grid_values(mesh: &TensorMesh, ops: &AssembledOperators, free: &[f64], time: f64) -> Snapshot {
    let global = ops.dofs.extend(free);
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            values.push(global[4 * mesh.node_index(i, j)]);
        }
    }
    Snapshot { nx, ny, domain: mesh.rect(), time, values }
}

impl ScenarioRun {
    /// Writes the report, the sensor CSV (if any) and the snapshots into
    /// `dir`, returning the paths written.
    pub fn write(&self, config: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::new();
        let create = |name: &Path| -> Result<(PathBuf, BufWriter<File>), CliError> {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
            Ok((path, BufWriter::new(file)))
        };

        let (path, mut out) = create(&config.output.report)?;
        write_report(&mut out, &self.counts, self.steps).and_then(|_| out.flush()).map_err(|e| CliError::io(&path, e))?;
        written.push(path);

        if config.sensor.is_some() {
            let (path, out) = create(&config.output.sensor)?;
            write_sensor_csv(out, &self.sensor).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            written.push(path);
        }

        for (k, snap) in self.snapshots.iter().enumerate() {
            let name = format!("{}_{k}.txt", config.output.snapshot_prefix);
            let (path, mut out) = create(Path::new(&name))?;
            snap.write(&mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
