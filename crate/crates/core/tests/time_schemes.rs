use biharmonic_core::assembly::{assemble, AssembledOperators};
use biharmonic_core::bfs::CoefficientField;
use biharmonic_core::mesh::TensorMesh;
use biharmonic_core::sparse::CsrMatrix;
use biharmonic_core::time::{
    energy, initial_state, integrate, report_counts, solve, step_matrix, Component, DataSlope, InitialData, Problem, SchemeKind,
    State, TimePartition, ZeroForcing,
};
use proptest::prelude::*;

struct Bump;

fn p(s: f64) -> [f64; 2] {
    // (1 - s²)² on [-1, 1] mapped to the unit square: s ↦ 2s - 1
    let z = 2.0 * s - 1.0;
    let w = 1.0 - z * z;
    [w * w, 2.0 * w * (-2.0 * z) * 2.0]
}

impl InitialData for Bump {
    fn displacement(&self, x: f64, y: f64) -> [f64; 4] {
        let (px, py) = (p(x), p(y));
        [px[0] * py[0], px[1] * py[0], px[0] * py[1], px[1] * py[1]]
    }
    fn velocity(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }
    fn acceleration(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }
}

fn operators(n: usize) -> (TensorMesh, AssembledOperators) {
    let mesh = TensorMesh::unit_square(n).unwrap();
    let ops = assemble(&mesh, &CoefficientField::Constant(1.0)).unwrap();
    (mesh, ops)
}

/// Operators whose `M` and `A` are identities: every component is the
/// scalar oscillator `u'' + u = 0`.
fn scalar_operators() -> (TensorMesh, AssembledOperators) {
    let (mesh, mut ops) = operators(2);
    let n = ops.dofs.num_free();
    ops.mass = CsrMatrix::identity(n);
    ops.stiffness = CsrMatrix::identity(n);
    (mesh, ops)
}

fn scalar_state(n: usize, tau: f64, u: f64, v: f64) -> State {
    State {
        time: 0.0,
        tau,
        displacement: vec![u; n],
        velocity: vec![v; n],
        displacement_slope: vec![tau * v; n],
        velocity_slope: vec![-tau * u; n],
    }
}

fn run_scalar(scheme: SchemeKind, tau: f64, steps: usize) -> State {
    let (mesh, ops) = scalar_operators();
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::uniform(tau * steps as f64, steps).unwrap();
    let init = scalar_state(ops.dofs.num_free(), part.tau(1), 1.0, 0.0);
    integrate(&problem, scheme, &part, &init, |_| Ok(())).unwrap()
}

#[test]
fn collocation_matrix_of_the_scalar_toy() {
    let one = CsrMatrix::identity(1);
    let s = step_matrix(SchemeKind::Gc3, &one, &one, 1.0).unwrap();
    let expected = [
        [1.0, 0.0, -0.5, 1.0 / 12.0],
        [0.5, -1.0 / 12.0, 1.0, 0.0],
        [0.0, 1.0, -1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
    ];
    for (r, row) in expected.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            assert_eq!(s.get(r, c), v, "entry ({r}, {c})");
        }
    }
    let doubled = step_matrix(SchemeKind::Gc3, &one, &one, 2.0).unwrap();
    assert_eq!(doubled.get(0, 2), 2.0 * s.get(0, 2));
    assert_eq!(doubled.get(2, 1), 0.5 * s.get(2, 1));
}

#[test]
fn collocation_step_of_the_scalar_toy() {
    // exact rational solution of the 4×4 system: (85, -132, -132, -85) / 157
    let end = run_scalar(SchemeKind::Gc3, 1.0, 1);
    let expected = [85.0 / 157.0, -132.0 / 157.0, -132.0 / 157.0, -85.0 / 157.0];
    let got = [end.displacement[0], end.displacement_slope[0], end.velocity[0], end.velocity_slope[0]];
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-14, "{got:?}");
    }
}

#[test]
fn crank_nicolson_step_of_the_scalar_toy() {
    let tau: f64 = 0.1;
    let end = run_scalar(SchemeKind::Cgp1, tau, 1);
    let d = 1.0 + tau * tau / 4.0;
    assert!((end.displacement[0] - (1.0 - tau * tau / 4.0) / d).abs() < 1e-15);
    assert!((end.velocity[0] + tau / d).abs() < 1e-15);
}

#[test]
fn quadratic_step_of_the_scalar_toy() {
    let end = run_scalar(SchemeKind::Cgp2, 0.1, 1);
    assert!((end.displacement[0] - 0.995_004_166_663_775_6).abs() < 1e-15);
    assert!((end.velocity[0] + 0.099_833_402_835_551_74).abs() < 1e-15);
}

/// Dense Cholesky solve for the reference Crank–Nicolson update.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = if i == j { s.sqrt() } else { s / l[j][j] };
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

fn dense(m: &CsrMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m.get(r, c)).collect()).collect()
}

#[test]
fn cgp1_is_crank_nicolson() {
    let (mesh, ops) = operators(5);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    // τ = 0.1 as on the coarsest level of the convergence study
    let steps = 20;
    let part = TimePartition::uniform(2.0, steps).unwrap();
    let tau = part.tau(1);
    let init = initial_state(&problem, &Bump, tau, DataSlope::Interpolated).unwrap();
    let end = integrate(&problem, SchemeKind::Cgp1, &part, &init, |_| Ok(())).unwrap();

    // (M + τ²/4 A) v⁺ = M v - τ A u - τ²/4 A v,  u⁺ = u + τ/2 (v + v⁺)
    let (m, a) = (dense(&ops.mass), dense(&ops.stiffness));
    let n = m.len();
    let lhs: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[i][j] + tau * tau / 4.0 * a[i][j]).collect()).collect();
    let (mut u, mut v) = (init.displacement.clone(), init.velocity.clone());
    for _ in 0..steps {
        let mv = ops.mass.mul_vec(&v);
        let au = ops.stiffness.mul_vec(&u);
        let av = ops.stiffness.mul_vec(&v);
        let rhs: Vec<f64> = (0..n).map(|i| mv[i] - tau * au[i] - tau * tau / 4.0 * av[i]).collect();
        let v_next = cholesky_solve(&lhs, &rhs);
        for i in 0..n {
            u[i] += tau / 2.0 * (v[i] + v_next[i]);
        }
        v = v_next;
    }
    let scale = u.iter().chain(&v).fold(0.0f64, |m, x| m.max(x.abs()));
    for (x, y) in end.displacement.iter().zip(&u).chain(end.velocity.iter().zip(&v)) {
        assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
    }
}

#[test]
fn energy_is_conserved_without_forcing() {
    let (mesh, ops) = operators(6);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::uniform(0.05, 50).unwrap();
    let init = initial_state(&problem, &Bump, part.tau(1), DataSlope::Discrete).unwrap();
    let e0 = energy(&ops, &init.displacement, &init.velocity);
    assert!(e0 > 0.0);
    for scheme in SchemeKind::ALL {
        let mut drift = 0.0f64;
        integrate(&problem, scheme, &part, &init, |seg| {
            // coefficient holding the value at the right end
            let end = if scheme == SchemeKind::Gc3 { 2 } else { seg.displacement.len() - 1 };
            let e = energy(&ops, &seg.displacement[end], &seg.velocity[end]);
            drift = drift.max((e - e0).abs() / e0);
            Ok(())
        })
        .unwrap();
        assert!(drift < 1e-10, "{scheme}: {drift}");
    }
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let (mesh, ops) = operators(4);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::uniform(0.1, 5).unwrap();
    let init = State::zeros(ops.dofs.num_free(), part.tau(1));
    for scheme in SchemeKind::ALL {
        let traj = solve(&problem, scheme, &part, &init).unwrap();
        for seg in &traj.segments {
            assert!(seg.displacement.iter().chain(&seg.velocity).flatten().all(|&v| v == 0.0));
        }
    }
}

#[test]
fn collocation_solution_is_c1_at_nodes() {
    let (mesh, ops) = operators(5);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::uniform(0.1, 8).unwrap();
    let init = initial_state(&problem, &Bump, part.tau(1), DataSlope::Interpolated).unwrap();
    let traj = solve(&problem, SchemeKind::Gc3, &part, &init).unwrap();
    for pair in traj.segments.windows(2) {
        for which in [Component::Displacement, Component::Velocity] {
            for deriv in 0..2 {
                let left = pair[0].evaluate(1.0, which, deriv).unwrap();
                let right = pair[1].evaluate(0.0, which, deriv).unwrap();
                assert_eq!(left, right);
            }
        }
        assert!(pair[0].residual <= 1e-9);
    }
}

#[test]
fn nonuniform_steps_rescale_slopes() {
    let (mesh, ops) = operators(4);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::from_nodes(vec![0.0, 0.01, 0.03, 0.035]).unwrap();
    let init = initial_state(&problem, &Bump, part.tau(1), DataSlope::Interpolated).unwrap();
    let traj = solve(&problem, SchemeKind::Gc3, &part, &init).unwrap();
    for pair in traj.segments.windows(2) {
        let left = pair[0].evaluate(1.0, Component::Velocity, 1).unwrap();
        let right = pair[1].evaluate(0.0, Component::Velocity, 1).unwrap();
        let scale = left.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (l, r) in left.iter().zip(&right) {
            assert!((l - r).abs() <= 1e-13 * scale);
        }
    }
}

fn step_once(scheme: SchemeKind, init: &State) -> State {
    let (mesh, ops) = operators(3);
    let problem = Problem { mesh: &mesh, ops: &ops, forcing: &ZeroForcing };
    let part = TimePartition::uniform(0.1, 1).unwrap();
    integrate(&problem, scheme, &part, init, |_| Ok(())).unwrap()
}

fn state_from(v: &[f64], tau: f64) -> State {
    let n = v.len() / 4;
    State {
        time: 0.0,
        tau,
        displacement: v[..n].to_vec(),
        velocity: v[n..2 * n].to_vec(),
        displacement_slope: v[2 * n..3 * n].to_vec(),
        velocity_slope: v[3 * n..].to_vec(),
    }
}

fn flatten(s: &State) -> Vec<f64> {
    [&s.displacement, &s.velocity, &s.displacement_slope, &s.velocity_slope].into_iter().flatten().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn steps_are_linear(
        x in proptest::collection::vec(-1.0f64..1.0, 64),
        y in proptest::collection::vec(-1.0f64..1.0, 64),
        alpha in -2.0f64..2.0,
    ) {
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
        for scheme in SchemeKind::ALL {
            let sx = flatten(&step_once(scheme, &state_from(&x, 0.1)));
            let sy = flatten(&step_once(scheme, &state_from(&y, 0.1)));
            let sc = flatten(&step_once(scheme, &state_from(&combo, 0.1)));
            let scale = sc.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..sc.len() {
                prop_assert!((alpha * sx[i] + sy[i] - sc[i]).abs() <= 1e-12 * scale);
            }
        }
    }
}


#[test]
fn step_counts_follow_the_block_layout() {
    let mesh = TensorMesh::unit_square(16).unwrap();
    let ops = assemble(&mesh, &CoefficientField::Constant(1.0)).unwrap();
    let per_block = ops.mass.nnz();
    let counts = SchemeKind::ALL.map(|s| report_counts(&ops, s).unwrap());
    assert_eq!(counts.map(|c| c.dof_total), [2312, 4624, 4624]);
    assert_eq!(counts.map(|c| c.dof_free), [1800, 3600, 3600]);
    // nonzero blocks: 4 for Crank-Nicolson, 12 for cGP(2), 10 for the collocation scheme
    assert_eq!(counts.map(|c| c.nnz), [4 * per_block, 12 * per_block, 10 * per_block]);
}
