//! Self-check suite against the statevector oracle.

use std::fmt;

use pauliprop::circuit::{sample_haar_u2, RotationPattern};
use pauliprop::error_analysis::{mse_from_trials, sample_trials};
use pauliprop::rng::stream_rng;
use pauliprop::{
    build_brickwork_1d, build_staircase_2d, build_transfer, estimate_expectation, gate_ptm, mc_mse_estimate, mse_bound,
    ptm_reference, sample_circuit, sample_haar_su4, statevector_expectation, AngleCorrelation, CliffordKind,
    EnsembleSpec, Error, Gate, PauliSumF64, ProductState, TruncationPolicy, ORACLE_MAX_QUBITS,
};
use rand::Rng;

use crate::error::BenchError;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation, in the check's own units.
    pub max_deviation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub n_qubits: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "validate n={} trials={} seed={}",
            self.n_qubits, self.trials, self.seed
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<22} max_dev={:.3e} tol={:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "some checks failed"
            }
        )
    }
}

fn check(name: &'static str, max_deviation: f64, tolerance: f64) -> Check {
    Check {
        name,
        passed: max_deviation <= tolerance,
        max_deviation,
        tolerance,
    }
}

fn rotations(layering: pauliprop::Layering, reps: usize) -> EnsembleSpec {
    let patterns = ["X", "Z", "ZZ"]
        .iter()
        .map(|g| RotationPattern::uniform(g).expect("valid generator"))
        .collect();
    EnsembleSpec::rotations(layering, patterns, AngleCorrelation::IndependentUniform, reps)
}

fn ensembles(n: usize) -> Result<Vec<EnsembleSpec>, Error> {
    Ok(vec![
        EnsembleSpec::haar(build_brickwork_1d(n, 4)?, 1),
        EnsembleSpec::haar(build_staircase_2d(1, n, 1)?, 2),
        rotations(build_brickwork_1d(n, 2)?, 2),
    ])
}

fn tilted_state(n: usize, seed: u64) -> ProductState {
    let mut rng = stream_rng(seed, u64::MAX);
    let bloch = (0..n)
        .map(|_| {
            let (t, p): (f64, f64) = (rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..6.3));
            [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
        })
        .collect();
    ProductState::new(bloch).expect("unit Bloch vectors")
}

/// Runs the invariant suite on `n` qubits with `trials` random instances per check.
pub fn run_validation(n: usize, trials: usize, seed: u64) -> Result<ValidationReport, BenchError> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleCap {
            n_qubits: n,
            cap: ORACLE_MAX_QUBITS,
        }
        .into());
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("validation needs n >= 2, got {n}")).into());
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()).into());
    }
    let specs = ensembles(n)?;
    let rho = tilted_state(n, seed);
    let o = PauliSumF64::parse_literal(&format!("0.1 + Z0 + 0.5*X{} + -0.3*Y0*Z1", n - 1), n)?;
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for t in 0..trials {
        let spec = &specs[t % specs.len()];
        let c = sample_circuit(spec, &mut stream_rng(seed, t as u64))?;
        let exact = statevector_expectation(&c, &o, &rho)?;
        let est = estimate_expectation(&o, &c, &TruncationPolicy::exact(n), &rho)?;
        worst = worst.max((exact - est).abs());
    }
    checks.push(check("exact_cutoff", worst, 1e-9));

    let mut rng = stream_rng(seed, u64::MAX - 1);
    let (mut diff, mut orth) = (0.0f64, 0.0f64);
    let mut gates: Vec<Gate> = CliffordKind::ALL
        .iter()
        .map(|&k| Gate::clifford(k, &(0..k.arity()).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()?;
    for _ in 0..trials {
        let angle = rng.random_range(-7.0..7.0);
        gates.push(Gate::unitary(&[0, 1], sample_haar_su4(&mut rng))?);
        gates.push(Gate::unitary(&[0], sample_haar_u2(&mut rng))?);
        gates.push(Gate::rotation(&[0], ["X", "Y", "Z"][rng.random_range(0..3)], angle)?);
        gates.push(Gate::rotation(
            &[0, 1],
            ["XX", "YZ", "ZZ", "XI"][rng.random_range(0..4)],
            angle,
        )?);
    }
    for g in &gates {
        let t = gate_ptm::<f64>(g)?;
        diff = diff.max(t.max_abs_diff(&ptm_reference(g)));
        orth = orth.max(t.orthogonality_deviation());
    }
    checks.push(check("ptm_reference", diff, 1e-10));
    checks.push(check("ptm_orthogonality", orth, 1e-10));

    let mut rows = 0.0f64;
    for spec in &specs {
        rows = rows.max(build_transfer(spec)?.max_row_deviation());
    }
    checks.push(check("transfer_row_sums", rows, 1e-12));

    // Path sampling against oracle statistics, in combined standard errors.
    let spec = EnsembleSpec::haar(build_brickwork_1d(n, 3)?, 1);
    let z = PauliSumF64::parse_literal("Z0", n)?;
    let records = sample_trials(&spec, &z, &rho, &[1], trials, seed)?;
    let empirical = mse_from_trials(&records, 0, mse_bound(1, 1.0));
    let mc = mc_mse_estimate(&spec, &z, &rho, 1, 20_000, seed)?;
    let sigma = (empirical.stderr.powi(2) + mc.stderr.powi(2)).sqrt();
    let z_score = if sigma > 0.0 {
        (empirical.mean - mc.mean).abs() / sigma
    } else {
        0.0
    };
    checks.push(check("estimator_consistency", z_score, 4.0));

    Ok(ValidationReport {
        n_qubits: n,
        trials,
        seed,
        checks,
    })
}
