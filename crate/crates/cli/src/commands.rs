//! Subcommand implementations and the exit-code contract.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sbprk::error::Error;
use sbprk::io;
use sbprk::linalg::Vector;
use sbprk::ode::experiments::{contractivity_experiment_with, convergence_study_with};
use sbprk::ode::solver::integrate_with;
use sbprk::ode::problem_by_name;
use sbprk::quadrature::{quadrature, Family};
use sbprk::rk::report::full_report_with;
use sbprk::rk::{classical_tableau, reconstruct_sbp_with, tableau_from_sbp_sat_with, ButcherTableau, ClassicalKind};
use sbprk::sbp::{check_assumption_with, verify_sbp_with, SbpOperator, SbpVerification};
use sbprk::tolerance::Tolerances;

use crate::output::{emit, g6, list, yes};
use crate::{Command, EquivalenceFamily, Format, OperatorFamily, OutputArgs, ProblemArgs, TableauKind};

pub const OK: u8 = 0;
pub const MISMATCH: u8 = 1;
pub const USAGE: u8 = 2;
pub const VERIFICATION: u8 = 3;
pub const SINGULAR_SAT: u8 = 4;
pub const DIVERGENCE: u8 = 5;

pub const TOLERANCE_ENV: &str = "SBPRK_TOL_OVERRIDE";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, message) = match &e {
            Error::SingularSatMatrix { min_abs_eigenvalue } => (
                SINGULAR_SAT,
                format!("SAT matrix singular (Assumption 1 fails): min |eigenvalue| = {min_abs_eigenvalue:e}"),
            ),
            Error::NewtonDivergence { .. } => (DIVERGENCE, e.to_string()),
            Error::SbpViolation { .. } => (VERIFICATION, e.to_string()),
            _ => (USAGE, e.to_string()),
        };
        Failure { code, message }
    }
}

type Outcome = Result<u8, Failure>;

/// Default tolerances scaled by `SBPRK_TOL_OVERRIDE` when it is set.
fn tolerances() -> Result<Tolerances, Failure> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(Tolerances::DEFAULT),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(f) if f > 0.0 && f.is_finite() => Ok(Tolerances::DEFAULT.scaled(f)),
            _ => Err(Failure::usage(format!("{TOLERANCE_ENV} must be a positive number, got {raw:?}"))),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_operator(path: &Path) -> Result<SbpOperator, Failure> {
    io::operator_from_json(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_tableau(path: &Path) -> Result<ButcherTableau, Failure> {
    io::tableau_from_json(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn stages(stages: Option<usize>, what: &str) -> Result<usize, Failure> {
    stages.ok_or_else(|| Failure::usage(format!("--stages is required for {what}")))
}

/// Text unless a file is requested, in which case JSON.
fn format_or(output: &OutputArgs, fallback: Format) -> Format {
    output.format.unwrap_or(if output.out.is_some() { Format::Json } else { fallback })
}

pub fn run(command: Command) -> Outcome {
    let tol = tolerances()?;
    match command {
        Command::Operator {
            family,
            stages,
            interval,
            out,
        } => operator(family, stages, interval, out.as_deref(), &tol),
        Command::Tableau {
            operator,
            classical,
            stages,
            out,
        } => tableau(operator.as_deref(), classical, stages, out.as_deref(), &tol),
        Command::Analyze {
            tableau,
            eta,
            zeta,
            output,
        } => analyze(&tableau, eta, zeta, &output, &tol),
        Command::Assumption {
            operator,
            sigma_min,
            sigma_max,
            samples,
            output,
        } => assumption(&operator, sigma_min, sigma_max, samples, &output, &tol),
        Command::Equivalence { family, stages } => equivalence(family, stages, &tol),
        Command::Integrate {
            tableau,
            problem,
            blocks,
            output,
        } => integrate(&tableau, &problem, blocks, &output, &tol),
        Command::Convergence {
            tableau,
            problem,
            blocks,
            output,
        } => convergence(&tableau, &problem, &blocks, &output, &tol),
        Command::Contractivity {
            tableau,
            problem,
            dts,
            u0,
            v0,
            output,
        } => contractivity(&tableau, &problem, &dts, u0, v0, &output, &tol),
        Command::Reconstruct {
            tableau,
            starts,
            seed,
            output,
        } => reconstruct(&tableau, starts, seed, &output, &tol),
    }
}

fn order(o: Option<usize>) -> String {
    o.map_or_else(|| "none".into(), |k| k.to_string())
}

fn verification_text(v: &SbpVerification, passes: bool) -> String {
    format!(
        "SBP residual: {}\nsymmetry defect: {}\nmin norm eigenvalue: {}\norders: D {}, tL {}, tR {} (claimed {})\nverification: {}\n",
        g6(v.sbp_residual),
        g6(v.symmetry_defect),
        g6(v.min_norm_eigenvalue),
        order(v.derivative_order),
        order(v.left_order),
        order(v.right_order),
        v.claimed_order,
        if passes { "PASS" } else { "FAIL" }
    )
}

fn operator(family: OperatorFamily, s: Option<usize>, interval: f64, out: Option<&Path>, tol: &Tolerances) -> Outcome {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(Failure::usage(format!("--T must be positive, got {interval}")));
    }
    let quad = |f: Family| -> Result<SbpOperator, Failure> {
        let rule = quadrature(f, stages(s, f.name())?)?;
        Ok(SbpOperator::from_quadrature(&rule, interval)?)
    };
    let (op, builtin) = match family {
        OperatorFamily::Gauss => (quad(Family::Gauss)?, false),
        OperatorFamily::RadauLeft => (quad(Family::RadauLeft)?, false),
        OperatorFamily::RadauRight => (quad(Family::RadauRight)?, false),
        OperatorFamily::Lobatto => (quad(Family::Lobatto)?, false),
        OperatorFamily::Fd2 => (SbpOperator::fd2(stages(s, "fd2")?, interval)?, false),
        OperatorFamily::ZeroEigenvalue => (SbpOperator::zero_eigenvalue_example(), true),
        OperatorFamily::SspExample => (SbpOperator::ssp_example(), true),
    };
    let report = verify_sbp_with(&op, tol);
    let passes = report.passes(tol);
    let summary = verification_text(&report, passes);
    emit(&io::operator_to_json(&op)?, out)?;
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(if passes || builtin { OK } else { VERIFICATION })
}

fn tableau(
    operator: Option<&Path>,
    classical: Option<TableauKind>,
    s: Option<usize>,
    out: Option<&Path>,
    tol: &Tolerances,
) -> Outcome {
    let t = match (operator, classical) {
        (Some(path), None) => tableau_from_sbp_sat_with(&read_operator(path)?, tol)?,
        (None, Some(kind)) => {
            let family = |k: ClassicalKind| -> Result<ButcherTableau, Failure> {
                Ok(classical_tableau(k, stages(s, k.name())?)?)
            };
            match kind {
                TableauKind::RadauIa => family(ClassicalKind::RadauIA)?,
                TableauKind::RadauIia => family(ClassicalKind::RadauIIA)?,
                TableauKind::LobattoIiic => family(ClassicalKind::LobattoIIIC)?,
                TableauKind::Gauss => family(ClassicalKind::Gauss)?,
                TableauKind::NonSbp => ButcherTableau::algebraically_stable_non_sbp(),
                TableauKind::ImplicitEuler => ButcherTableau::implicit_euler(),
                TableauKind::ExplicitEuler => ButcherTableau::explicit_euler(),
                TableauKind::ImplicitMidpoint => ButcherTableau::implicit_midpoint(),
                TableauKind::ExplicitMidpoint => ButcherTableau::explicit_midpoint(),
            }
        }
        _ => return Err(Failure::usage("give exactly one of --operator and --classical")),
    };
    emit(&io::tableau_to_json(&t)?, out)?;
    Ok(OK)
}

fn analyze(path: &Path, eta: Option<usize>, zeta: Option<usize>, output: &OutputArgs, tol: &Tolerances) -> Outcome {
    let t = read_tableau(path)?;
    let (eta, zeta) = (eta.unwrap_or(t.s()), zeta.unwrap_or(t.s()));
    if eta == 0 || zeta == 0 {
        return Err(Failure::usage("--eta and --zeta must be at least 1"));
    }
    let r = full_report_with(&t, eta, zeta, tol);
    let text = match format_or(output, Format::Text) {
        Format::Json => io::to_json(&r)?,
        Format::Text => {
            let oc = &r.order_conditions;
            let mut s = String::new();
            let _ = writeln!(s, "tableau: {} (s = {})", r.label, t.s());
            let _ = writeln!(s, "A-stable: {}", yes(r.a_stable));
            let _ = writeln!(s, "L-stable: {}", yes(r.l_stable));
            let _ = writeln!(s, "algebraically stable: {}", yes(r.algebraically_stable));
            let _ = writeln!(s, "algebraic stability eigenvalues: {}", list(&r.alg_stability_eigenvalues));
            let _ = writeln!(s, "b non-negative: {}", yes(r.b_nonneg));
            let _ = writeln!(s, "A non-negative: {}", yes(r.a_entries_nonneg));
            let _ = writeln!(s, "SSP coefficient: {}", g6(r.ssp_coefficient));
            let _ = writeln!(s, "C({}): {}", oc.eta, yes(oc.c_holds));
            let _ = writeln!(s, "D({}): {}", oc.zeta, yes(oc.d_holds));
            let _ = writeln!(s, "quadrature order: {}", oc.quadrature_order);
            s
        }
        Format::Csv => return Err(Failure::usage("analyze writes json or text")),
    };
    emit(&text, output.out.as_deref())?;
    Ok(OK)
}

fn assumption(
    path: &Path,
    sigma_min: f64,
    sigma_max: f64,
    samples: usize,
    output: &OutputArgs,
    tol: &Tolerances,
) -> Outcome {
    if !(sigma_min > 0.5) {
        return Err(Failure::usage(format!("--sigma-min must exceed 1/2, got {sigma_min}")));
    }
    if sigma_max < sigma_min {
        return Err(Failure::usage("--sigma-max must not be below --sigma-min"));
    }
    let op = read_operator(path)?;
    let r = check_assumption_with(&op, sigma_min, sigma_max, samples, tol)?;
    let text = match format_or(output, Format::Text) {
        Format::Json => io::to_json(&r)?,
        Format::Text => {
            let mut s = String::from("sigma min_real_part\n");
            for (sigma, re) in r.sigma_samples.iter().zip(&r.min_real_part_per_sigma) {
                let _ = writeln!(s, "{} {}", g6(*sigma), g6(*re));
            }
            let w = r.witness_eigenvalue;
            let _ = writeln!(s, "witness: sigma {}, eigenvalue {} {} {}i", g6(r.witness_sigma), g6(w.re), if w.im < 0.0 { '-' } else { '+' }, g6(w.im.abs()));
            let _ = writeln!(s, "verdict: {}", if r.satisfied { "PASS" } else { "FAIL" });
            s
        }
        Format::Csv => return Err(Failure::usage("assumption writes json or text")),
    };
    emit(&text, output.out.as_deref())?;
    Ok(OK)
}

fn equivalence(family: EquivalenceFamily, s: usize, tol: &Tolerances) -> Outcome {
    let (family, kind) = match family {
        EquivalenceFamily::RadauLeft => (Family::RadauLeft, ClassicalKind::RadauIA),
        EquivalenceFamily::RadauRight => (Family::RadauRight, ClassicalKind::RadauIIA),
        EquivalenceFamily::Lobatto => (Family::Lobatto, ClassicalKind::LobattoIIIC),
    };
    let op = SbpOperator::from_quadrature(&quadrature(family, s)?, 1.0)?;
    let sbp = tableau_from_sbp_sat_with(&op, tol)?;
    let classical = classical_tableau(kind, s)?;
    let da = (sbp.a() - classical.a()).amax();
    let db = (sbp.b() - classical.b()).amax();
    let dc = (sbp.c() - classical.c()).amax();
    let matches = da < tol.equivalence && db < tol.equivalence && dc < tol.equivalence;
    println!("{family} s={s} vs {kind} s={s}");
    println!("|dA|inf: {}", g6(da));
    println!("|db|inf: {}", g6(db));
    println!("|dc|inf: {}", g6(dc));
    println!("{}", if matches { "match" } else { "mismatch" });
    Ok(if matches { OK } else { MISMATCH })
}

fn problem(args: &ProblemArgs) -> Result<sbprk::ode::OdeProblem, Failure> {
    if !args.lambda.is_finite() {
        return Err(Failure::usage("--lambda must be finite"));
    }
    Ok(problem_by_name(&args.problem, args.lambda)?)
}

fn integrate(path: &Path, args: &ProblemArgs, blocks: usize, output: &OutputArgs, tol: &Tolerances) -> Outcome {
    if blocks == 0 {
        return Err(Failure::usage("--blocks must be at least 1"));
    }
    let t = read_tableau(path)?;
    let p = problem(args)?;
    let r = integrate_with(&t, &p, blocks, tol)?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_trajectory_csv(&r, &mut buf).map_err(|e| Failure::usage(e.to_string()))?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => io::to_json(&r)?,
        Format::Text => {
            let mut s = String::new();
            for (time, u) in r.times.iter().zip(&r.states) {
                let _ = writeln!(s, "{} {}", g6(*time), list(u));
            }
            s
        }
    };
    emit(&text, output.out.as_deref())?;
    Ok(OK)
}

fn convergence(path: &Path, args: &ProblemArgs, blocks: &[usize], output: &OutputArgs, tol: &Tolerances) -> Outcome {
    if blocks.contains(&0) {
        return Err(Failure::usage("block counts must be positive"));
    }
    let t = read_tableau(path)?;
    let p = problem(args)?;
    let study = convergence_study_with(&t, &p, blocks, tol)?;
    let text = match format_or(output, Format::Text) {
        Format::Json => io::to_json(&study)?,
        Format::Text | Format::Csv => {
            let sep = if output.format == Some(Format::Csv) { "," } else { " " };
            let mut s = format!("blocks{sep}dt{sep}error\n");
            for x in &study.samples {
                let _ = writeln!(s, "{}{sep}{}{sep}{}", x.blocks, g6(x.dt), g6(x.error));
            }
            let _ = writeln!(
                s,
                "fitted order: {} (blocks {} to {})",
                g6(study.order),
                study.samples[study.window.0].blocks,
                study.samples[study.window.1].blocks
            );
            s
        }
    };
    emit(&text, output.out.as_deref())?;
    Ok(OK)
}

#[allow(clippy::too_many_arguments)]
fn contractivity(
    path: &Path,
    args: &ProblemArgs,
    dts: &[f64],
    u0: Option<Vec<f64>>,
    v0: Option<Vec<f64>>,
    output: &OutputArgs,
    tol: &Tolerances,
) -> Outcome {
    if dts.iter().any(|dt| !(*dt > 0.0 && dt.is_finite())) {
        return Err(Failure::usage("step sizes must be positive"));
    }
    let t = read_tableau(path)?;
    let p = problem(args)?;
    let u = u0.map_or_else(|| p.u0.clone(), Vector::from_vec);
    let v = v0.map_or_else(|| &u * 0.5, Vector::from_vec);
    if u.len() != p.dimension() || v.len() != p.dimension() {
        return Err(Failure::usage(format!("initial states must have {} components", p.dimension())));
    }
    let ratios = contractivity_experiment_with(&t, &p, &u, &v, dts, tol)?;
    let text = match format_or(output, Format::Text) {
        Format::Json => io::to_json(&ratios)?,
        Format::Text | Format::Csv => {
            let sep = if output.format == Some(Format::Csv) { "," } else { " " };
            let mut s = format!("dt{sep}ratio\n");
            for r in &ratios {
                let _ = writeln!(s, "{}{sep}{}", g6(r.dt), g6(r.ratio));
            }
            s
        }
    };
    emit(&text, output.out.as_deref())?;
    Ok(OK)
}

fn reconstruct(path: &Path, starts: usize, seed: u64, output: &OutputArgs, tol: &Tolerances) -> Outcome {
    let t = read_tableau(path)?;
    let r = reconstruct_sbp_with(&t, starts, seed, tol)?;
    let verdict = format!(
        "SBP form with positive definite M: {}",
        if r.sbp_exists_with_pd_norm { "YES" } else { "NO" }
    );
    match format_or(output, Format::Text) {
        Format::Json => {
            emit(&io::to_json(&r)?, output.out.as_deref())?;
            if output.out.is_some() {
                println!("{verdict}");
            }
        }
        Format::Text | Format::Csv => {
            let s = t.s();
            let mut text = String::new();
            let _ = writeln!(text, "tR: {}", list(&r.t_right));
            let _ = writeln!(text, "tL: {}", list(&r.t_left));
            let _ = writeln!(text, "M:");
            for row in r.m.chunks(s) {
                let _ = writeln!(text, "  {}", list(row));
            }
            let _ = writeln!(text, "residual: {}", g6(r.residual));
            let _ = writeln!(text, "M eigenvalues: {}", list(&r.m_eigenvalues));
            let _ = writeln!(text, "best start: {}", r.best_start);
            let _ = writeln!(text, "{verdict}");
            emit(&text, output.out.as_deref())?;
        }
    }
    Ok(OK)
}
