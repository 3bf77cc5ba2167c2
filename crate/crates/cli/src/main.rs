//! Command-line interface: constructs graded algebras, computes symmetry
//! algebras and normalization data, runs the moving-frame pipeline on
//! sampled curves, and analyzes ODE solution spaces.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical rank ambiguity.

use clap::{Args, Parser, Subcommand};
use flagframes_core::algebra::{parse_coeff_list, AlgebraJson, GradedAlgebra, Parity};
use flagframes_core::cohomology::h1_plus;
use flagframes_core::duality::{
    find_compatible_bilinear, find_compatible_three_form, g2_case_report,
};
use flagframes_core::error::{CoreError, DualityError, ExprError};
use flagframes_core::frames::{fix_projective_parameter, ProjectiveContext, ProjectiveCurve};
use flagframes_core::g2::{build_g2, G2Case, G2Parabolic};
use flagframes_core::normalization::{
    generic_complement, invariant_complement_certificate, ComplementCertificate, NoneWitness,
};
use flagframes_core::ode::{structure_verdict, OdeProblem, VerdictConfig};
use flagframes_core::rat::format_rat;
use flagframes_core::structure::{symmetry_algebra, SymmetryMode};
use flagframes_core::subspace::{GradedSubspace, SubspaceJson};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "flagframes",
    about = "Symmetry algebras and moving-frame invariants of curves in flag varieties",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a graded algebra and print its JSON description
    Algebra(AlgebraArgs),
    /// Symmetry algebra of the flat curve of type x
    Symmetry(SymmetryArgs),
    /// Normalization space W (generic or invariant certificate)
    Complement(ComplementArgs),
    /// Wilczynski invariant traces of a sampled projective curve
    Invariants(InvariantsArgs),
    /// Bilinear and 3-form compatibility of curves
    #[command(subcommand)]
    Duality(DualityCommand),
    /// G2 curve-type reports
    #[command(subcommand)]
    G2(G2Command),
    /// ODE solution-space analysis
    #[command(subcommand)]
    Ode(OdeCommand),
    /// First Lie algebra cohomology H^1_+ of an abelian tangent type
    Cohom(CohomArgs),
}

#[derive(Args)]
struct AlgebraArgs {
    /// sl | so | sp | g2
    #[arg(long)]
    kind: String,
    /// block sizes for sl, e.g. 1,1,1
    #[arg(long)]
    blocks: Option<String>,
    /// dimension for so/sp
    #[arg(long)]
    n: Option<usize>,
    /// isotropic flag for so/sp, e.g. 1,2
    #[arg(long)]
    flag: Option<String>,
    /// parabolic for g2: B | P1 | P2
    #[arg(long)]
    parabolic: Option<String>,
}

#[derive(Args)]
struct SymmetryArgs {
    /// path to an algebra JSON file
    #[arg(long)]
    algebra: PathBuf,
    /// comma-separated exact coefficients of x
    #[arg(long)]
    x: String,
    #[arg(long)]
    parametrized: bool,
}

#[derive(Args)]
struct ComplementArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long)]
    x: String,
    /// search for an invariant complement instead of the generic one
    #[arg(long)]
    invariant: bool,
}

#[derive(Args)]
struct InvariantsArgs {
    /// path to a curve JSON file {k, t0, dt, values, derivatives?}
    #[arg(long)]
    curve: PathBuf,
    #[arg(long)]
    parametrized: bool,
    /// also integrate the projective parameter and report tau traces
    #[arg(long)]
    fix_parameter: bool,
    /// write the trace CSV here; stdout carries the JSON summary
    #[arg(long)]
    csv: Option<PathBuf>,
    /// flatness verdict tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Subcommand)]
enum DualityCommand {
    /// Self-duality: compatible bilinear form of a curve
    Bilinear {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Compatible split 3-form of a curve in P^6
    G2form {
        #[arg(long)]
        curve: PathBuf,
    },
}

#[derive(Subcommand)]
enum G2Command {
    /// Symmetry/normalization report for a named curve type
    Report {
        /// B-nondeg | P2-orbit2 | P2-orbit3 | P2-orbit4
        #[arg(long)]
        case: String,
    },
}

#[derive(Subcommand)]
enum OdeCommand {
    /// Detect conformal / symplectic / G2 structures on the solution space
    Analyze {
        /// equation order k+1 >= 3
        #[arg(long)]
        order: usize,
        /// right-hand side f(x, y, y', ..., y^(k)) (see grammar below)
        ///
        /// Grammar: numbers, x, y (= y0), y', y'', ..., or y0..yk;
        /// functions sin cos exp log sqrt; operators + - * / ^ with ^
        /// right-associative above unary minus above * / above + -.
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        #[arg(long, default_value_t = 3)]
        solutions: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// write per-solution Theta traces here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CohomArgs {
    #[arg(long)]
    algebra: PathBuf,
    /// one or more generators of the abelian subspace xg (degree -1)
    #[arg(long, required = true)]
    x: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}

fn exit_code_of(e: &CoreError) -> u8 {
    match e {
        CoreError::Duality(DualityError::KernelAmbiguous { .. }) => 3,
        CoreError::Expr(ExprError::Duality(DualityError::KernelAmbiguous { .. })) => 3,
        _ => 2,
    }
}

fn load_algebra(path: &PathBuf) -> Result<Arc<GradedAlgebra>, CoreError> {
    let text = std::fs::read_to_string(path)?;
    let json: AlgebraJson = serde_json::from_str(&text)?;
    Ok(GradedAlgebra::from_json(&json)?)
}

fn load_curve(path: &PathBuf) -> Result<ProjectiveCurve, CoreError> {
    let text = std::fs::read_to_string(path)?;
    // a declared node count, when present, must match the data
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(n) = raw.get("n").and_then(|v| v.as_u64()) {
        let len = raw
            .get("values")
            .and_then(|v| v.as_array())
            .map(|a| a.len())
            .unwrap_or(0);
        if n as usize != len {
            return Err(CoreError::Input(format!(
                "declared n = {n} but values has {len} rows"
            )));
        }
    }
    let curve: ProjectiveCurve = serde_json::from_str(&text)?;
    if curve.n() < 16 {
        return Err(CoreError::Input(format!(
            "curve grid has {} nodes, need at least 16",
            curve.n()
        )));
    }
    if curve.dt <= 0.0 {
        return Err(CoreError::Input("curve dt must be positive".into()));
    }
    Ok(curve)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CoreError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CoreError> {
    match cli.command {
        Command::Algebra(args) => {
            let algebra = match args.kind.as_str() {
                "sl" => {
                    let blocks = parse_usize_list(
                        args.blocks
                            .as_deref()
                            .ok_or_else(|| CoreError::Input("--blocks required for sl".into()))?,
                    )?;
                    GradedAlgebra::sl_flag(&blocks)?
                }
                "so" | "sp" => {
                    let n = args
                        .n
                        .ok_or_else(|| CoreError::Input("--n required for so/sp".into()))?;
                    let flag = match args.flag.as_deref() {
                        Some(s) if !s.is_empty() => parse_usize_list(s)?,
                        _ => Vec::new(),
                    };
                    let parity = if args.kind == "so" {
                        Parity::Symmetric
                    } else {
                        Parity::Skew
                    };
                    GradedAlgebra::slb(n, parity, &flag)?
                }
                "g2" => {
                    let p = match args.parabolic.as_deref() {
                        Some("B") => G2Parabolic::B,
                        Some("P1") => G2Parabolic::P1,
                        Some("P2") => G2Parabolic::P2,
                        other => {
                            return Err(CoreError::Input(format!(
                                "--parabolic must be B, P1 or P2 (got {other:?})"
                            )))
                        }
                    };
                    build_g2(p)
                }
                other => {
                    return Err(CoreError::Input(format!(
                        "unknown algebra kind {other:?} (want sl, so, sp or g2)"
                    )))
                }
            };
            print_json(&algebra.to_json())
        }
        Command::Symmetry(args) => {
            let algebra = load_algebra(&args.algebra)?;
            let coeffs = parse_coeff_list(&args.x, algebra.dim())?;
            let x = algebra.element(coeffs)?;
            let mode = if args.parametrized {
                SymmetryMode::Parametrized
            } else {
                SymmetryMode::Unparametrized
            };
            let sg = symmetry_algebra(&algebra, &x, mode)?;
            #[derive(Serialize)]
            struct SymmetryReport {
                algebra: String,
                mode: SymmetryMode,
                dimension: usize,
                graded_dims: Vec<(i64, usize)>,
                reductive: bool,
                basis_labels: Vec<String>,
                subspace: SubspaceJson,
            }
            print_json(&SymmetryReport {
                algebra: algebra.name.clone(),
                mode,
                dimension: sg.subspace.dim(),
                graded_dims: sg.subspace.graded_dims(),
                reductive: sg.reductive_flag,
                basis_labels: sg.subspace.basis_labels(),
                subspace: sg.subspace.to_json(),
            })
        }
        Command::Complement(args) => {
            let algebra = load_algebra(&args.algebra)?;
            let coeffs = parse_coeff_list(&args.x, algebra.dim())?;
            let x = algebra.element(coeffs)?;
            let sg = symmetry_algebra(&algebra, &x, SymmetryMode::Unparametrized)?;
            #[derive(Serialize)]
            struct ComplementReport {
                outcome: String,
                construction: Option<String>,
                invariant: Option<bool>,
                dimension: Option<usize>,
                graded_dims: Option<Vec<(i64, usize)>>,
                w: Option<SubspaceJson>,
                witness: Option<NoneWitness>,
                reason: Option<String>,
            }
            let report = if args.invariant {
                match invariant_complement_certificate(&sg) {
                    ComplementCertificate::Exists(ws) => ComplementReport {
                        outcome: "exists".into(),
                        construction: Some(format!("{:?}", ws.construction)),
                        invariant: Some(ws.invariant_flag),
                        dimension: Some(ws.w.dim()),
                        graded_dims: Some(ws.w.graded_dims()),
                        w: Some(ws.w.to_json()),
                        witness: None,
                        reason: None,
                    },
                    ComplementCertificate::None(witness) => ComplementReport {
                        outcome: "none".into(),
                        construction: None,
                        invariant: None,
                        dimension: None,
                        graded_dims: None,
                        w: None,
                        witness: Some(witness),
                        reason: None,
                    },
                    ComplementCertificate::Unknown(reason) => ComplementReport {
                        outcome: "unknown".into(),
                        construction: None,
                        invariant: None,
                        dimension: None,
                        graded_dims: None,
                        w: None,
                        witness: None,
                        reason: Some(reason),
                    },
                }
            } else {
                let ws = generic_complement(&sg);
                ComplementReport {
                    outcome: "generic".into(),
                    construction: Some(format!("{:?}", ws.construction)),
                    invariant: Some(ws.invariant_flag),
                    dimension: Some(ws.w.dim()),
                    graded_dims: Some(ws.w.graded_dims()),
                    w: Some(ws.w.to_json()),
                    witness: None,
                    reason: None,
                }
            };
            print_json(&report)
        }
        Command::Invariants(args) => {
            if args.tol <= 0.0 {
                return Err(CoreError::Input("--tol must be positive".into()));
            }
            let curve = load_curve(&args.curve)?;
            let mode = if args.parametrized {
                SymmetryMode::Parametrized
            } else {
                SymmetryMode::Unparametrized
            };
            let ctx = ProjectiveContext::new(curve.k, mode)?;
            let inv = ctx.invariants(&curve)?;
            let mut csv = inv.to_csv();
            let mut tau = None;
            if args.fix_parameter {
                if mode == SymmetryMode::Parametrized {
                    return Err(CoreError::Input(
                        "--fix-parameter applies to unparametrized mode".into(),
                    ));
                }
                let pp = fix_projective_parameter(&ctx, &inv)?;
                let mut out = String::from("t,tau");
                for name in &pp.names {
                    out.push_str(&format!(",{name}_tau"));
                }
                out.push('\n');
                for (i, &t) in inv.t.iter().enumerate() {
                    out.push_str(&format!("{t:.12e},{:.12e}", pp.tau[i]));
                    for c in 0..pp.names.len() {
                        out.push_str(&format!(",{:.12e}", pp.traces[i][c]));
                    }
                    out.push('\n');
                }
                csv = out;
                tau = Some(pp.tau.clone());
            }
            #[derive(Serialize)]
            struct InvariantSummary {
                k: usize,
                nodes: usize,
                names: Vec<String>,
                max_abs: Vec<f64>,
                flat: bool,
                residual: f64,
                type_deviation: f64,
                tau_range: Option<(f64, f64)>,
            }
            let summary = InvariantSummary {
                k: curve.k,
                nodes: curve.n(),
                names: inv.names.clone(),
                max_abs: (0..inv.names.len()).map(|c| inv.max_abs(c)).collect(),
                flat: inv.max_abs_all() <= args.tol,
                residual: inv.result.residual,
                type_deviation: inv.result.type_deviation,
                tau_range: tau.map(|t| (t[0], *t.last().unwrap())),
            };
            match &args.csv {
                Some(path) => {
                    std::fs::write(path, csv)?;
                    print_json(&summary)?;
                }
                None => {
                    print!("{csv}");
                }
            }
            Ok(())
        }
        Command::Duality(DualityCommand::Bilinear { curve }) => {
            let curve = load_curve(&curve)?;
            let form = find_compatible_bilinear(&curve)?;
            #[derive(Serialize)]
            struct BilinearReport {
                compatible: bool,
                form: Option<flagframes_core::duality::BilinearForm>,
            }
            print_json(&BilinearReport {
                compatible: form.is_some(),
                form,
            })
        }
        Command::Duality(DualityCommand::G2form { curve }) => {
            let curve = load_curve(&curve)?;
            let form = find_compatible_three_form(&curve)?;
            #[derive(Serialize)]
            struct ThreeFormReport {
                compatible: bool,
                form: Option<flagframes_core::duality::ThreeForm>,
            }
            print_json(&ThreeFormReport {
                compatible: form.is_some(),
                form,
            })
        }
        Command::G2(G2Command::Report { case }) => {
            let case = G2Case::parse(&case)
                .ok_or_else(|| CoreError::Input(format!("unknown case {case:?}")))?;
            print_json(&g2_case_report(case))
        }
        Command::Ode(OdeCommand::Analyze {
            order,
            f,
            t0,
            t1,
            dt,
            solutions,
            tol,
            csv,
        }) => {
            if dt <= 0.0 || t1 <= t0 {
                return Err(CoreError::Input("need t1 > t0 and dt > 0".into()));
            }
            if tol <= 0.0 {
                return Err(CoreError::Input("--tol must be positive".into()));
            }
            let n = ((t1 - t0) / dt).round() as usize + 1;
            if n < 16 {
                return Err(CoreError::Input(format!(
                    "grid has {n} nodes, need at least 16"
                )));
            }
            let problem = OdeProblem::parse(order, &f)?;
            let config = VerdictConfig {
                t0,
                t1,
                dt,
                solutions,
                tol,
            };
            let verdict = structure_verdict(&problem, &config)?;
            if let Some(path) = csv {
                // Theta traces of the first sampled solution
                let init: Vec<f64> = (0..order)
                    .map(|i| 0.2 * ((1.7 + 0.9 * i as f64).sin()))
                    .collect();
                let sol = flagframes_core::ode::integrate_ode(&problem, &init, t0, dt, n, true)?;
                let inv = flagframes_core::ode::generalized_wilczynski(&problem, &sol)?;
                std::fs::write(path, inv.to_csv())?;
            }
            print_json(&verdict)
        }
        Command::Cohom(args) => {
            let algebra = load_algebra(&args.algebra)?;
            let mut generators = Vec::new();
            for g in &args.x {
                generators.push(parse_coeff_list(g, algebra.dim())?);
            }
            let xg = GradedSubspace::span(&algebra, &generators)?;
            let h1 = h1_plus(&algebra, &xg, None)?;
            #[derive(Serialize)]
            struct CohomReport {
                algebra: String,
                xg_dim: usize,
                dimension: usize,
                cocycle_dim: usize,
                coboundary_dim: usize,
                representatives: Vec<Vec<Vec<String>>>,
            }
            print_json(&CohomReport {
                algebra: algebra.name.clone(),
                xg_dim: xg.dim(),
                dimension: h1.dimension,
                cocycle_dim: h1.z_dim,
                coboundary_dim: h1.b_dim,
                representatives: h1
                    .representatives
                    .iter()
                    .map(|c| {
                        c.values
                            .iter()
                            .map(|v| v.iter().map(format_rat).collect())
                            .collect()
                    })
                    .collect(),
            })
        }
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, CoreError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CoreError::Input(format!("bad list entry {p:?}")))
        })
        .collect()
}
