//! Command-line front end: parse problem specs, build operators, compute
//! kernels, transfer disc data, and run the theorem-keyed verification
//! suites.
//!
//! Exit codes: 0 success, 1 failed verification task, 2 parse error,
//! 3 violated mathematical precondition.

use atto::inner::InnerFunction;
use atto::modelspace::ModelSpace;
use atto::operators::{
    build_a, build_b, finite_rank_symbol, rank_one_symbol, FiniteRankKind, RankOneKind,
    RankOneParam, Symbol,
};
use atto::rational::Rational;
use atto::spectral::{analytic_kernel, kernel_correspondence, numeric_kernel, MatrixSymbol};
use atto::transfer::{diagram_check, transfer_inner, transfer_rational};
use atto::verify::{report, Suite, Tolerances};
use atto::wire::{matrix_json, InnerJson, RationalJson, SymbolJson};
use atto::C64;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "atto", about = "model spaces and truncated Toeplitz operators, exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// problem description file (JSON); use '-' for stdin
    #[arg(long)]
    spec: String,
    /// write the result here instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the matrix of A_g^{α,θ} (and B_g^{α,θ} when α ⪯ θ)
    Matrix(SpecArgs),
    /// Numeric kernel of A_g^{α,θ}, with the GCD prediction for analytic symbols
    Kernel(SpecArgs),
    /// Transfer disc data to the half-plane and check the commuting square
    Transfer(SpecArgs),
    /// Run a theorem-keyed verification suite
    Verify {
        /// projections | conjugations | zero_symbol | rank_one | defect |
        /// factorization | kernels | lattice | transfer | oracle | all
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        degree_max: usize,
        /// tolerance override NAME=VALUE (repeatable), e.g. tau_ker=1e-6
        #[arg(long = "tol")]
        tol: Vec<String>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
}

enum MathOrParse {
    Parse(String),
    Math(String),
}

impl MathOrParse {
    fn math(e: atto::Error) -> MathOrParse {
        match e {
            atto::Error::Parse(m) => MathOrParse::Parse(m),
            other => MathOrParse::Math(other.to_string()),
        }
    }
}

fn read_spec(path: &str) -> Result<Value, String> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

struct Problem {
    theta: InnerFunction,
    alpha: InnerFunction,
    symbol: Symbol,
}

fn parse_inner(v: &Value, field: &str) -> Result<InnerFunction, String> {
    let j: InnerJson = serde_json::from_value(v.clone()).map_err(|e| format!("{field}: {e}"))?;
    j.to_inner().map_err(|e| format!("{field}: {e}"))
}

fn parse_point(v: &Value, field: &str) -> Result<C64, String> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or(format!("{field}: expected [re, im]"))?;
    Ok(C64::new(
        arr[0].as_f64().ok_or(format!("{field}: bad number"))?,
        arr[1].as_f64().ok_or(format!("{field}: bad number"))?,
    ))
}

fn parse_problem(v: &Value) -> Result<Problem, MathOrParse> {
    let theta =
        parse_inner(v.get("theta").ok_or(MathOrParse::Parse("missing theta".into()))?, "theta")
            .map_err(MathOrParse::Parse)?;
    let alpha = match v.get("alpha") {
        Some(a) => parse_inner(a, "alpha").map_err(MathOrParse::Parse)?,
        None => theta.clone(),
    };
    let symv = v
        .get("symbol")
        .ok_or(MathOrParse::Parse("missing symbol".into()))?;
    let symbol = if let Some(ctor) = symv.get("constructor") {
        let kind = ctor
            .as_str()
            .ok_or(MathOrParse::Parse("constructor must be a string".into()))?;
        let n = symv.get("n").and_then(|x| x.as_u64()).unwrap_or(1) as usize;
        let point = |key: &str| -> Result<C64, MathOrParse> {
            parse_point(
                symv.get(key)
                    .ok_or(MathOrParse::Parse(format!("{kind} needs {key}")))?,
                key,
            )
            .map_err(MathOrParse::Parse)
        };
        let xi0 = || -> Result<f64, MathOrParse> {
            symv.get("xi0")
                .and_then(|x| x.as_f64())
                .ok_or(MathOrParse::Parse(format!("{kind} needs xi0")))
        };
        match kind {
            "f2a" => rank_one_symbol(RankOneKind::F2a, &alpha, &theta, RankOneParam::Point(point("z")?))
                .map_err(MathOrParse::math)?,
            "f2b" => rank_one_symbol(RankOneKind::F2b, &alpha, &theta, RankOneParam::Point(point("z")?))
                .map_err(MathOrParse::math)?,
            "f4" => rank_one_symbol(RankOneKind::F4, &alpha, &theta, RankOneParam::Boundary(xi0()?))
                .map_err(MathOrParse::math)?,
            "f6" => rank_one_symbol(RankOneKind::F6, &alpha, &theta, RankOneParam::None)
                .map_err(MathOrParse::math)?,
            "pole_alpha" => {
                finite_rank_symbol(FiniteRankKind::PoleAlpha(point("z")?), n, &alpha, &theta)
                    .map_err(MathOrParse::math)?
            }
            "pole_theta_bar" => {
                finite_rank_symbol(FiniteRankKind::PoleThetaBar(point("z")?), n, &alpha, &theta)
                    .map_err(MathOrParse::math)?
            }
            "boundary" => finite_rank_symbol(FiniteRankKind::Boundary(xi0()?), n, &alpha, &theta)
                .map_err(MathOrParse::math)?,
            "infinity" => finite_rank_symbol(FiniteRankKind::Infinity, n, &alpha, &theta)
                .map_err(MathOrParse::math)?,
            other => return Err(MathOrParse::Parse(format!("unknown constructor {other:?}"))),
        }
    } else {
        let j: SymbolJson = serde_json::from_value(symv.clone())
            .map_err(|e| MathOrParse::Parse(format!("symbol: {e}")))?;
        j.to_symbol(&theta, &alpha).map_err(MathOrParse::math)?
    };
    Ok(Problem {
        theta,
        alpha,
        symbol,
    })
}

fn emit(out: &Option<String>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_matrix(args: &SpecArgs) -> Result<Value, MathOrParse> {
    let spec = read_spec(&args.spec).map_err(MathOrParse::Parse)?;
    let p = parse_problem(&spec)?;
    let sa = ModelSpace::new(&p.alpha).map_err(MathOrParse::math)?;
    let st = ModelSpace::new(&p.theta).map_err(MathOrParse::math)?;
    let a = build_a(&p.symbol, &sa, &st).map_err(MathOrParse::math)?;
    let b = if p.alpha.divides(&p.theta).map_err(MathOrParse::math)? {
        let bo = build_b(&p.symbol, &p.alpha, &st).map_err(MathOrParse::math)?;
        Some(json!({
            "matrix": matrix_json(&bo.matrix),
            "basis": bo
                .basis
                .iter()
                .map(|r| serde_json::to_value(RationalJson::from_rational(r)).unwrap())
                .collect::<Vec<_>>(),
            "route_residual": bo.route_residual,
        }))
    } else {
        None
    };
    Ok(json!({
        "schema": "1",
        "a": {
            "matrix": matrix_json(&a.matrix),
            "domain": InnerJson::from_inner(&p.theta),
            "codomain": InnerJson::from_inner(&p.alpha),
        },
        "b": b,
        "symbol_flat": RationalJson::from_rational(&a.symbol_flat),
    }))
}

fn cmd_kernel(args: &SpecArgs) -> Result<Value, MathOrParse> {
    let spec = read_spec(&args.spec).map_err(MathOrParse::Parse)?;
    let p = parse_problem(&spec)?;
    let sa = ModelSpace::new(&p.alpha).map_err(MathOrParse::math)?;
    let st = ModelSpace::new(&p.theta).map_err(MathOrParse::math)?;
    let flat = p.symbol.flatten();
    let analytic = flat.boundary_bounded(atto::tol::TAU_REAL)
        && flat.poles().iter().all(|(z, _)| z.im < 0.0)
        && p.alpha.divides(&p.theta).unwrap_or(false)
        && !flat.is_zero();
    let rep = if analytic {
        analytic_kernel(&flat, &sa, &st).map_err(MathOrParse::math)?
    } else {
        let a = build_a(&p.symbol, &sa, &st).map_err(MathOrParse::math)?;
        numeric_kernel(&a)
    };
    let a = build_a(&p.symbol, &sa, &st).map_err(MathOrParse::math)?;
    let ms = MatrixSymbol::new(&p.symbol, &p.alpha, &p.theta);
    let witnesses = kernel_correspondence(&a, &ms).map_err(MathOrParse::math)?;
    Ok(json!({
        "schema": "1",
        "dimension": rep.dimension,
        "prediction": if analytic {
            json!({
                "status": "computed",
                "dimension": rep.predicted_dimension,
                "gamma": rep.predicted_gamma.as_ref().map(InnerJson::from_inner),
                "principal_angle": rep.principal_angle,
            })
        } else {
            json!({"status": "skip", "reason": "symbol is not analytic"})
        },
        "null_basis": rep
            .null_basis
            .iter()
            .map(|r| serde_json::to_value(RationalJson::from_rational(r)).unwrap())
            .collect::<Vec<_>>(),
        "witnesses": witnesses.len(),
    }))
}

fn cmd_transfer(args: &SpecArgs) -> Result<Value, MathOrParse> {
    let spec = read_spec(&args.spec).map_err(MathOrParse::Parse)?;
    let theta = parse_inner(
        spec.get("theta")
            .ok_or(MathOrParse::Parse("missing theta".into()))?,
        "theta",
    )
    .map_err(MathOrParse::Parse)?;
    let alpha = match spec.get("alpha") {
        Some(a) => parse_inner(a, "alpha").map_err(MathOrParse::Parse)?,
        None => theta.clone(),
    };
    let g = match spec.get("symbol") {
        Some(sv) => {
            let j: RationalJson = serde_json::from_value(sv.clone())
                .map_err(|e| MathOrParse::Parse(format!("symbol: {e}")))?;
            j.to_rational().map_err(MathOrParse::math)?
        }
        None => Rational::one(),
    };
    let theta_hp = transfer_inner(&theta).map_err(MathOrParse::math)?;
    let alpha_hp = transfer_inner(&alpha).map_err(MathOrParse::math)?;
    let g_hp = transfer_rational(&g).map_err(MathOrParse::math)?;
    let rep = diagram_check(&g, &alpha, &theta).map_err(MathOrParse::math)?;
    Ok(json!({
        "schema": "1",
        "theta_half_plane": InnerJson::from_inner(&theta_hp),
        "alpha_half_plane": InnerJson::from_inner(&alpha_hp),
        "symbol_half_plane": RationalJson::from_rational(&g_hp),
        "diagram_residual": rep.diagram_residual,
        "intertwine_residual": rep.intertwine_residual,
        "membership_residual": rep.membership_residual,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Matrix(args) | Command::Kernel(args) | Command::Transfer(args) => {
            let result = match &cli.command {
                Command::Matrix(_) => cmd_matrix(args),
                Command::Kernel(_) => cmd_kernel(args),
                _ => cmd_transfer(args),
            };
            match result {
                Ok(v) => {
                    let text = serde_json::to_string_pretty(&v).expect("serialize");
                    if let Err(e) = emit(&args.out, &text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                    ExitCode::SUCCESS
                }
                Err(MathOrParse::Parse(m)) => {
                    eprintln!("parse error: {m}");
                    ExitCode::from(2)
                }
                Err(MathOrParse::Math(m)) => {
                    eprintln!("precondition violated: {m}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Verify {
            suite,
            seed,
            degree_max,
            tol,
            format,
            out,
        } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("parse error: {e}");
                    return ExitCode::from(2);
                }
            };
            let mut tols = Tolerances::default();
            for t in tol {
                let Some((name, value)) = t.split_once('=') else {
                    eprintln!("parse error: --tol expects NAME=VALUE, got {t:?}");
                    return ExitCode::from(2);
                };
                let Ok(value) = value.parse::<f64>() else {
                    eprintln!("parse error: bad tolerance value {value:?}");
                    return ExitCode::from(2);
                };
                if let Err(e) = tols.set(name, value) {
                    eprintln!("parse error: {e}");
                    return ExitCode::from(2);
                }
            }
            let rep = report(suite, *seed, *degree_max, &tols);
            let text = match format.as_str() {
                "json" => rep.to_json(),
                "csv" => rep.to_csv(),
                other => {
                    eprintln!("parse error: unknown format {other:?}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = emit(out, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if rep.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
