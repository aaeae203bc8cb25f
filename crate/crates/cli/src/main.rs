use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use puosc::brackets::models::{equal_extended, unequal_extended, ExtendedModel};
use puosc::classical::{
    equal_freq_evolution_defect, integrate, lagrangian_identity_residual, EqualFreqTransform,
    IntegratorConfig,
};
use puosc::cosc::{propagator_p, propagator_p_via_transform, propagator_q, Epsilon, KernelRecord};
use puosc::oracle;
use puosc::puq::{self, CoeffRecord, KernelArgs};
use puosc::quadrature::GaussHermite;
use puosc::report::{csv_field, sorted_json, CheckRecord, Report};
use puosc::verify::{self, anchor, Suite};
use puosc::{
    build_m, compute_coefficients, symplectic_residual, to_complex, ComplexMatrix4, Frequencies,
    RealPhasePoint, Sign,
};

#[derive(Parser)]
#[command(
    name = "puosc",
    version,
    about = "Pais-Uhlenbeck oscillator toolkit: computations and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Copy)]
struct FreqArgs {
    /// Larger frequency ω1.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2, allow_hyphen_values = true)]
    w1: f64,
    /// Smaller frequency ω2.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    w2: f64,
}

#[derive(Args, Clone, Copy)]
struct SignArg {
    /// Sign branch of b: +1 or -1.
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_sign)]
    sign: Sign,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelModel {
    Pu,
    Cosc,
    Momentum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BracketModel {
    Unequal,
    Equal,
}

#[derive(Subcommand)]
enum Command {
    /// Transformation coefficients a, b, c and the matrix M.
    Coeffs {
        #[command(flatten)]
        freqs: FreqArgs,
        #[command(flatten)]
        sign: SignArg,
    },
    /// Integrate the classical PU flow and check it against two oscillators.
    Classical {
        #[command(flatten)]
        freqs: FreqArgs,
        #[command(flatten)]
        sign: SignArg,
        /// Time step; defaults to a 200th of the fast period.
        #[arg(long, allow_hyphen_values = true)]
        dt: Option<f64>,
        /// Number of steps; defaults to ten fast periods.
        #[arg(long)]
        steps: Option<usize>,
        /// Initial oscillator point ξ1,ξ2,P1,P2.
        #[arg(long, default_value = "1,0.5,-0.3,0.7", allow_hyphen_values = true)]
        xi: String,
    },
    /// PU energy levels, compared against a dense diagonalization.
    Spectrum {
        #[command(flatten)]
        freqs: FreqArgs,
        /// Number of levels.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Hermite functions per oscillator in the dense check.
        #[arg(long, default_value_t = oracle::DEFAULT_BASIS)]
        basis: usize,
    },
    /// Evaluate a propagator kernel.
    Kernel {
        #[arg(long, value_enum, default_value_t = KernelModel::Pu)]
        model: KernelModel,
        #[command(flatten)]
        freqs: FreqArgs,
        #[command(flatten)]
        sign: SignArg,
        /// Deformation parameter ε of the complexified oscillator.
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        eps: f64,
        /// Elapsed time T.
        #[arg(long = "T", default_value_t = 1.0, allow_hyphen_values = true)]
        t: f64,
        /// Final coordinate (cosc).
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        q2: f64,
        /// Initial coordinate (cosc).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        q1: f64,
        /// Final momentum p2* as re[,im] (momentum).
        #[arg(long, default_value = "0.4", allow_hyphen_values = true)]
        p2: String,
        /// Initial momentum as re[,im] (momentum).
        #[arg(long, default_value = "-0.2", allow_hyphen_values = true)]
        p1: String,
        /// Bra x* as re[,im] (pu).
        #[arg(long, default_value = "0.2,-0.1", allow_hyphen_values = true)]
        x2: String,
        /// Bra Πz* as re[,im] (pu).
        #[arg(long, default_value = "0.5,0.1", allow_hyphen_values = true)]
        piz2: String,
        /// Ket x as re[,im] (pu).
        #[arg(long, default_value = "0.3,0.2", allow_hyphen_values = true)]
        x1: String,
        /// Ket Πz as re[,im] (pu).
        #[arg(long, default_value = "-0.1,0.4", allow_hyphen_values = true)]
        piz1: String,
    },
    /// Dirac bracket tables of the extended Lagrangians.
    Brackets {
        #[arg(long, value_enum, default_value_t = BracketModel::Unequal)]
        model: BracketModel,
    },
    /// Degenerate equal-frequency case ω1 = ω2 = ω.
    Equalfreq {
        /// The common frequency ω.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        w1: f64,
        /// Free parameter b of the equal-frequency map.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Run check groups on separate threads.
        #[arg(long)]
        parallel: bool,
    },
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "1" | "+1" | "plus" | "+" => Ok(Sign::Plus),
        "-1" | "minus" | "-" => Ok(Sign::Minus),
        _ => Err("expected +1 or -1".into()),
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: puosc::Error| e.to_string())
}

/// A usage error: the offending flag and its expected domain.
struct Usage {
    flag: &'static str,
    message: String,
}

fn usage(flag: &'static str, message: impl ToString) -> Usage {
    Usage {
        flag,
        message: message.to_string(),
    }
}

fn frequencies(f: FreqArgs) -> Result<Frequencies, Usage> {
    let freqs = Frequencies::new(f.w1, f.w2)
        .map_err(|e| usage("--w1/--w2", format!("{e}; expected finite ω1 ≥ ω2 > 0")))?;
    if freqs.is_degenerate() {
        return Err(usage(
            "--w1/--w2",
            "ω1 and ω2 coincide; use `equalfreq` for the degenerate case",
        ));
    }
    Ok(freqs)
}

fn complex_arg(flag: &'static str, s: &str) -> Result<Complex64, Usage> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().ok().filter(|v| v.is_finite());
    match parts.as_slice() {
        [re] => num(re).map(|r| Complex64::new(r, 0.0)),
        [re, im] => num(re).zip(num(im)).map(|(r, i)| Complex64::new(r, i)),
        _ => None,
    }
    .ok_or_else(|| {
        usage(
            flag,
            format!("`{s}` is not a complex number; expected re or re,im"),
        )
    })
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &ComplexMatrix4) -> Value {
    Value::Array(
        (0..4)
            .map(|r| Value::Array((0..4).map(|c| pair(m[(r, c)])).collect()))
            .collect(),
    )
}

/// Checks plus the command-specific payload.
struct Outcome {
    checks: Vec<CheckRecord>,
    result: Map<String, Value>,
    csv: Option<String>,
}

impl Outcome {
    fn new(checks: Vec<CheckRecord>) -> Self {
        Self {
            checks,
            result: Map::new(),
            csv: None,
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.result.insert(key.to_string(), value);
        self
    }
}

fn coeffs(f: FreqArgs, sign: Sign) -> Result<Outcome, Usage> {
    let freqs = frequencies(f)?;
    let k = compute_coefficients(freqs, sign).map_err(|e| usage("--w1/--w2", e))?;
    let m = build_m(&k);
    let prod = freqs.prod_sq() * k.b * k.b;
    let checks = vec![
        CheckRecord::at_most(
            "b(c - a) = 1",
            anchor::COEFFICIENTS,
            (k.unimodularity() - 1.0).abs(),
            1e-12,
        ),
        CheckRecord::at_most(
            "ac = w1^2 w2^2 b^2",
            anchor::COEFFICIENTS,
            (k.a * k.c - prod).abs() / prod.max(1.0),
            1e-12,
        ),
        CheckRecord::at_most(
            "M^T Omega M = Omega",
            anchor::SYMPLECTIC,
            symplectic_residual(&m),
            1e-12,
        ),
        CheckRecord::at_most(
            "det M = 1",
            anchor::SYMPLECTIC,
            (m.det() - 1.0).norm(),
            1e-12,
        ),
    ];
    let mut out = Outcome::new(checks)
        .with("a", json!(k.a))
        .with("b", json!(k.b))
        .with("c", json!(k.c))
        .with("sign", json!(sign.value()))
        .with("M", matrix_json(&m));
    out.csv = Some(format!(
        "a,b,c,sign\n{:e},{:e},{:e},{}\n",
        k.a,
        k.b,
        k.c,
        sign.value()
    ));
    Ok(out)
}

fn classical(
    f: FreqArgs,
    sign: Sign,
    dt: Option<f64>,
    steps: Option<usize>,
    xi: &str,
) -> Result<Outcome, Usage> {
    let freqs = frequencies(f)?;
    let k = compute_coefficients(freqs, sign).map_err(|e| usage("--w1/--w2", e))?;
    let parts: Vec<f64> = xi
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage("--xi", "expected four comma-separated numbers"))?;
    let [a, b, c, d] = parts[..] else {
        return Err(usage("--xi", "expected four comma-separated numbers"));
    };
    let xi0 = RealPhasePoint::new(a, b, c, d);
    let mut cfg = IntegratorConfig::periods(freqs, 200, 10);
    if let Some(dt) = dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(usage("--dt", format!("{dt} is not a positive time step")));
        }
        let span = cfg.dt * cfg.steps as f64;
        cfg.dt = dt;
        cfg.steps = (span / dt).round().max(1.0) as usize;
    }
    if let Some(n) = steps {
        cfg.steps = n;
    }
    let traj = integrate(&to_complex(&xi0, &k), freqs, cfg).map_err(|e| usage("--dt", e))?;
    let mut checks = vec![CheckRecord::at_most(
        "H_PU drift",
        anchor::CLASSICAL,
        traj.energy_drift(freqs),
        1e-8,
    )];
    checks.push(match lagrangian_identity_residual(&traj, freqs, &k) {
        Ok(r) => CheckRecord::at_most("L_PU = L_xi + total derivative", anchor::CLASSICAL, r, 1e-8),
        Err(e) => CheckRecord::errored("L_PU = L_xi + total derivative", anchor::CLASSICAL, e),
    });
    checks.push(CheckRecord::at_most(
        "xi projection solves two decoupled oscillators",
        anchor::CLASSICAL,
        traj.decoupled_deviation(&xi0, freqs, &k),
        1e-6,
    ));
    let last = traj.states.last().copied().unwrap_or_default();
    let mut out = Outcome::new(checks)
        .with("dt", json!(cfg.dt))
        .with("steps", json!(cfg.steps))
        .with(
            "final_time",
            json!(traj.times.last().copied().unwrap_or(0.0)),
        )
        .with(
            "final_state",
            Value::Array(last.to_array().into_iter().map(pair).collect()),
        );
    out.csv = Some(traj.to_csv(freqs, &k));
    Ok(out)
}

fn spectrum(f: FreqArgs, count: usize, basis: usize) -> Result<Outcome, Usage> {
    let freqs = frequencies(f)?;
    if count == 0 {
        return Err(usage("--count", "expected at least one level"));
    }
    if basis * basis < count {
        return Err(usage("--basis", format!("basis² must hold {count} levels")));
    }
    let levels = puq::spectrum_table(freqs, count);
    let dense = oracle::lowest_levels(freqs, basis, count).map_err(|e| usage("--basis", e))?;
    let worst = dense
        .iter()
        .zip(&levels)
        .map(|(a, b)| (a - b.energy).abs())
        .fold(0.0f64, f64::max);
    let checks = vec![CheckRecord::at_most(
        &format!(
            "lowest {count} levels of the {}-dimensional diagonalization",
            basis * basis
        ),
        anchor::PU_SPECTRUM,
        worst,
        1e-8,
    )];
    let mut out =
        Outcome::new(checks).with("levels", serde_json::to_value(&levels).unwrap_or_default());
    out.csv = Some(puq::spectrum_csv(&levels));
    Ok(out)
}

struct KernelInput<'a> {
    model: KernelModel,
    freqs: FreqArgs,
    sign: Sign,
    eps: f64,
    t: f64,
    q: (f64, f64),
    p: (&'a str, &'a str),
    pu: [&'a str; 4],
}

fn kernel(input: KernelInput<'_>) -> Result<Outcome, Usage> {
    if !input.t.is_finite() {
        return Err(usage("--T", "expected a finite time"));
    }
    match input.model {
        KernelModel::Pu => kernel_pu(&input),
        KernelModel::Cosc | KernelModel::Momentum => kernel_cosc(&input),
    }
}

fn kernel_pu(input: &KernelInput<'_>) -> Result<Outcome, Usage> {
    let freqs = frequencies(input.freqs)?;
    let coeffs = compute_coefficients(freqs, input.sign).map_err(|e| usage("--w1/--w2", e))?;
    let args = KernelArgs::new(
        complex_arg("--x2", input.pu[0])?,
        complex_arg("--piz2", input.pu[1])?,
        complex_arg("--x1", input.pu[2])?,
        complex_arg("--piz1", input.pu[3])?,
    );
    let t = input.t;
    let k = match puq::kernel_coeffs(t, freqs) {
        Ok(k) => k,
        Err(e) => {
            return Ok(Outcome::new(vec![CheckRecord::errored(
                "kernel coefficients",
                anchor::PU_KERNEL,
                e,
            )]))
        }
    };
    let (s1, s2) = ((freqs.omega1 * t).sin(), (freqs.omega2 * t).sin());
    let mut checks = vec![CheckRecord::at_most(
        "Q^2 sin(w1 T) sin(w2 T) = 1",
        anchor::PU_KERNEL,
        (k.q * k.q * s1 * s2 - 1.0).norm(),
        1e-12,
    )];
    checks.push(match puq::schrodinger_residual_pu(&args, t, freqs) {
        Ok(r) => CheckRecord::at_most(
            "Schrodinger equation in bra and ket variables",
            anchor::PU_KERNEL,
            r.ket.max(r.bra),
            1e-5,
        ),
        Err(e) => CheckRecord::errored(
            "Schrodinger equation in bra and ket variables",
            anchor::PU_KERNEL,
            e,
        ),
    });
    let mut out = Outcome::new(checks)
        .with("model", json!("pu"))
        .with(
            "coefficients",
            serde_json::to_value(CoeffRecord::new(t, freqs, &k)).unwrap_or_default(),
        )
        .with("normalization", pair(puq::kernel_normalization(freqs)))
        .with(
            "measure_jacobian",
            json!(puq::PuMeasure::new(coeffs).jacobian()),
        );
    match puq::propagator_pu(&args, t, freqs) {
        Ok(v) => {
            out.csv = Some(format!(
                "T,w1,w2,re,im,branch_note\n{t},{},{},{:e},{:e},{}\n",
                freqs.omega1,
                freqs.omega2,
                v.value.re,
                v.value.im,
                csv_field(&v.branch_note)
            ));
            out = out
                .with("value", pair(v.value))
                .with("branch_note", json!(v.branch_note));
        }
        Err(e) => out
            .checks
            .push(CheckRecord::errored("kernel value", anchor::PU_KERNEL, e)),
    }
    Ok(out)
}

fn kernel_cosc(input: &KernelInput<'_>) -> Result<Outcome, Usage> {
    let eps = Epsilon::new(input.eps).map_err(|e| usage("--eps", e))?;
    let t = input.t;
    if input.model == KernelModel::Cosc {
        let (q2, q1) = input.q;
        return Ok(match propagator_q(q2, q1, t, eps) {
            Ok(k) => {
                let base =
                    propagator_q(q2, q1, t, Epsilon::new(0.0).map_err(|e| usage("--eps", e))?)
                        .map(|b| b.value)
                        .unwrap_or_default();
                let want = base * (0.5 * input.eps * (q2 * q2 - q1 * q1)).exp();
                let record = KernelRecord::new(q2, q1, t, eps, &k);
                let mut out = Outcome::new(vec![CheckRecord::at_most(
                    "K_eps = exp(eps(q2^2 - q1^2)/2) K_0",
                    anchor::COSC_KERNEL,
                    (k.value - want).norm() / k.value.norm(),
                    1e-15,
                )])
                .with("model", json!("cosc"))
                .with("record", serde_json::to_value(&record).unwrap_or_default());
                out.csv = Some(format!(
                    "q1,q2,T,eps,re,im,branch_note\n{q1},{q2},{t},{},{:e},{:e},{}\n",
                    input.eps,
                    k.value.re,
                    k.value.im,
                    csv_field(&k.branch_note)
                ));
                out
            }
            Err(e) => Outcome::new(vec![CheckRecord::errored(
                "coordinate kernel",
                anchor::COSC_KERNEL,
                e,
            )]),
        });
    }
    let p2 = complex_arg("--p2", input.p.0)?;
    let p1 = complex_arg("--p1", input.p.1)?;
    Ok(match propagator_p(p2, p1, t, eps) {
        Ok(k) => {
            let mut checks = Vec::new();
            if input.eps > 0.0 {
                let quad = GaussHermite::new(120).map_err(|e| usage("--eps", e))?;
                checks.push(match propagator_p_via_transform(p2, p1, t, eps, &quad) {
                    Ok(via) => CheckRecord::at_most(
                        "momentum kernel equals the double transform",
                        anchor::COSC_KERNEL,
                        (via - k.value).norm(),
                        1e-6,
                    ),
                    Err(e) => CheckRecord::errored(
                        "momentum kernel equals the double transform",
                        anchor::COSC_KERNEL,
                        e,
                    ),
                });
            }
            let mut out = Outcome::new(checks)
                .with("model", json!("momentum"))
                .with("value", pair(k.value))
                .with("branch_note", json!(k.branch_note));
            out.csv = Some(format!(
                "p2_re,p2_im,p1_re,p1_im,T,eps,re,im,branch_note\n{},{},{},{},{t},{},{:e},{:e},{}\n",
                p2.re,
                p2.im,
                p1.re,
                p1.im,
                input.eps,
                k.value.re,
                k.value.im,
                csv_field(&k.branch_note)
            ));
            out
        }
        Err(e) => Outcome::new(vec![CheckRecord::errored(
            "momentum kernel",
            anchor::COSC_KERNEL,
            e,
        )]),
    })
}

fn bracket_table(
    model: &ExtendedModel,
    vars: &[(String, puosc::brackets::PhasePoly)],
) -> Result<Vec<(String, String, String)>, puosc::Error> {
    let table = model.dirac_table(vars)?;
    let mut rows = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            rows.push((
                vars[i].0.clone(),
                vars[j].0.clone(),
                table[i][j].to_string(),
            ));
        }
    }
    Ok(rows)
}

fn brackets(model: BracketModel) -> Result<Outcome, Usage> {
    let (built, group) = match model {
        BracketModel::Unequal => (unequal_extended(), "dirac_unequal"),
        BracketModel::Equal => (equal_extended(), "dirac_equal"),
    };
    let checks = verify::group_by_name(group)
        .map(|g| g.run(0))
        .unwrap_or_default();
    let m = match built {
        Ok(m) => m,
        Err(e) => {
            return Ok(Outcome::new(vec![CheckRecord::errored(
                "extended model",
                anchor::DIRAC,
                e,
            )]))
        }
    };
    let mut out = Outcome::new(checks);
    let tables =
        bracket_table(&m, &m.reduced).and_then(|r| Ok((r, bracket_table(&m, &m.canonical)?)));
    let ((reduced, canonical), h) = match tables.and_then(|t| Ok((t, m.pu_hamiltonian()?))) {
        Ok(v) => v,
        Err(e) => {
            out.checks
                .push(CheckRecord::errored("bracket tables", anchor::DIRAC, e));
            return Ok(out);
        }
    };
    let as_map = |rows: &[(String, String, String)]| {
        Value::Object(
            rows.iter()
                .map(|(a, b, v)| (format!("{{{a},{b}}}*"), json!(v)))
                .collect(),
        )
    };
    let cmat: Vec<Vec<String>> = m
        .constraints
        .bracket_matrix()
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect();
    let cinv: Vec<Vec<String>> = m
        .constraints
        .inverse()
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect();
    let mut csv = String::from("table,a,b,bracket\n");
    for (name, rows) in [("reduced", &reduced), ("canonical", &canonical)] {
        for (a, b, v) in rows {
            csv.push_str(&format!("{name},{a},{b},{}\n", csv_field(v)));
        }
    }
    out = out
        .with(
            "model",
            json!(if model == BracketModel::Unequal {
                "unequal"
            } else {
                "equal"
            }),
        )
        .with("lagrangian", json!(m.lagrangian.to_string()))
        .with(
            "constraints",
            json!(m
                .constraints
                .constraints()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()),
        )
        .with("constraint_brackets", json!(cmat))
        .with("constraint_inverse", json!(cinv))
        .with("dirac_reduced", as_map(&reduced))
        .with("dirac_canonical", as_map(&canonical))
        .with("hamiltonian", json!(h.to_string()));
    out.csv = Some(csv);
    Ok(out)
}

fn equalfreq(omega: f64, b: f64) -> Result<Outcome, Usage> {
    let e = equal_freq_evolution_defect(omega).map_err(|e| usage("--w1", e))?;
    let t = EqualFreqTransform::new(omega, b).map_err(|e| usage("--b", e))?;
    let ok = e.eigenvalues.len() == 2
        && (e.eigenvalues[0] - Complex64::new(0.0, omega)).norm() < 1e-12
        && (e.eigenvalues[1] - Complex64::new(0.0, -omega)).norm() < 1e-12
        && e.algebraic_mult == [2, 2]
        && e.geometric_mult == [1, 1];
    let forward = symplectic_residual(&t.forward());
    let fb = (t.forward() * t.backward()).max_abs_diff(&ComplexMatrix4::identity());
    let inv = t
        .invariant_residuals()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let checks = vec![
        CheckRecord::holds(
            "eigenvalues +-iw with algebraic multiplicity 2 and geometric 1",
            anchor::EQUAL_FREQUENCY,
            usize::from(!ok),
        ),
        CheckRecord::exceeds(
            "equal-frequency map is not symplectic",
            anchor::EQUAL_FREQUENCY,
            forward,
            0.1,
        ),
        CheckRecord::at_most(
            "forward times backward map is the identity",
            anchor::EQUAL_FREQUENCY,
            fb,
            1e-12,
        ),
        CheckRecord::at_most(
            "equal-frequency coefficient relations",
            anchor::EQUAL_FREQUENCY,
            inv,
            1e-12,
        ),
    ];
    let mut out = Outcome::new(checks)
        .with(
            "eigenvalues",
            Value::Array(e.eigenvalues.iter().copied().map(pair).collect()),
        )
        .with("algebraic_multiplicity", json!(e.algebraic_mult))
        .with("geometric_multiplicity", json!(e.geometric_mult))
        .with("defective", json!(e.defective))
        .with("symplectic_residual", json!(forward))
        .with(
            "coefficients",
            json!({"a": t.a, "b": t.b, "c": t.c, "d": t.d}),
        );
    let mut csv = String::from("re,im,algebraic,geometric\n");
    for ((l, a), g) in e
        .eigenvalues
        .iter()
        .zip(&e.algebraic_mult)
        .zip(&e.geometric_mult)
    {
        csv.push_str(&format!("{},{},{a},{g}\n", l.re, l.im));
    }
    out.csv = Some(csv);
    Ok(out)
}

fn run(command: &Command) -> Result<Outcome, Usage> {
    match command {
        Command::Coeffs { freqs, sign } => coeffs(*freqs, sign.sign),
        Command::Classical {
            freqs,
            sign,
            dt,
            steps,
            xi,
        } => classical(*freqs, sign.sign, *dt, *steps, xi),
        Command::Spectrum {
            freqs,
            count,
            basis,
        } => spectrum(*freqs, *count, *basis),
        Command::Kernel {
            model,
            freqs,
            sign,
            eps,
            t,
            q2,
            q1,
            p2,
            p1,
            x2,
            piz2,
            x1,
            piz1,
        } => kernel(KernelInput {
            model: *model,
            freqs: *freqs,
            sign: sign.sign,
            eps: *eps,
            t: *t,
            q: (*q2, *q1),
            p: (p2, p1),
            pu: [x2, piz2, x1, piz1],
        }),
        Command::Brackets { model } => brackets(*model),
        Command::Equalfreq { w1, b } => equalfreq(*w1, *b),
        Command::Verify {
            suite,
            seed,
            parallel,
        } => Ok(Outcome::new(verify::run_suite(*suite, *seed, *parallel))
            .with("suite", json!(suite.to_string()))
            .with("seed", json!(seed))),
    }
}

fn render(report: &Report, outcome: &Outcome, format: Format, verify: bool) -> String {
    match format {
        Format::Json => {
            let mut value = report.to_value();
            if let Value::Object(m) = &mut value {
                for (k, v) in &outcome.result {
                    m.insert(k.clone(), v.clone());
                }
            }
            sorted_json(&value)
        }
        Format::Csv => match (&outcome.csv, verify) {
            (Some(csv), false) => csv.clone(),
            _ => report.to_csv(),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(u) => {
            eprintln!("error: invalid value for {}: {}", u.flag, u.message);
            return ExitCode::from(2);
        }
    };
    let report = Report::new(echo, outcome.checks.clone());
    for failed in report.failures() {
        match &failed.detail {
            Some(d) => eprintln!("error: {}: {d}", failed.name),
            None => eprintln!(
                "check failed: {} (measured {:e}, tolerance {:e})",
                failed.name, failed.measured, failed.tolerance
            ),
        }
    }
    let text = render(
        &report,
        &outcome,
        cli.output.format,
        matches!(cli.command, Command::Verify { .. }),
    );
    match &cli.output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!(
                    "error: invalid value for --out: cannot write {}: {e}",
                    path.display()
                );
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
