//! `bottforge` command-line front end.
//!
//! Exit codes: 0 success, 1 validation or numerical failure, 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bottforge::bott::suspend;
use bottforge::clifford::verify_generator_set_with_tol;
use bottforge::examples::{
    build_d_to_diii, build_diii_to_aii, doubled_kitaev_diii, sphere_angles, undouble_kitaev_diii,
};
use bottforge::invariants::{
    class_d_1d_invariant, diii_spin_sector_invariant, face_fluxes, kane_mele_zero_locus,
    pfaffian_map, sector_frames, winding_of_bundle, QSH_VALENCE_DOWN, QSH_VALENCE_UP,
};
use bottforge::io::validate;
use bottforge::tables::{
    render_changes_table, render_periodic_table, render_unstable_table, stability_bounds,
    unstable_cases, TableFormat,
};
use bottforge::{
    check_bundle_with, load_bundle, save_bundle, AxisKind, BottContext, BundleFile, CheckOptions,
    Error, InvariantResult, SampledBundle, Sector, SymmetryClass,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bottforge",
    version,
    about = "Sampled classifying maps of free-fermion ground states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a bundle file and print the report.
    Verify { bundle: PathBuf },
    /// Apply the diagonal map along a new momentum or position coordinate.
    Suspend {
        bundle: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Grid resolution of the result (default: that of the input).
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a topological invariant.
    Invariant {
        bundle: PathBuf,
        #[arg(long, value_enum)]
        kind: InvariantArg,
        /// Sub-bundle for Chern numbers: all, valence, up, down, or coordinate indices `i,j,..`.
        #[arg(long, default_value = "valence")]
        sector: String,
        /// Write the Berry flux per face (chern) or |Pf| per point (kane-mele) as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print a classification table.
    Table {
        #[arg(long, default_value = "txt")]
        format: String,
        #[arg(long, value_enum, default_value_t = Which::Periodic)]
        which: Which,
    },
    /// Stability bounds for a class and band count.
    Bounds {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Write one of the worked example bundles.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long, default_value_t = 32)]
        res: usize,
        #[arg(long)]
        out: PathBuf,
        /// kitaev-diii only: `doubled` (8-dim, ready for a momentum suspension) or `plain` (4-dim).
        #[arg(long, value_enum, default_value_t = Form::Doubled)]
        form: Form,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Momentum,
    Position,
}

/// Periodic table, potentially unstable cases, or changes of the classification at `dx = 0`.
#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Periodic,
    Unstable,
    Changes,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvariantArg {
    Chern,
    Winding,
    KaneMele,
    ClassD,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    KitaevDiii,
    Qsh,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Doubled,
    Plain,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match options() {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &opts) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn options() -> Result<CheckOptions, String> {
    let mut opts = CheckOptions::default();
    if let Ok(v) = std::env::var("BOTTFORGE_TOL") {
        opts.tol = v
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| format!("BOTTFORGE_TOL must be a positive number, got {v:?}"))?;
    }
    Ok(opts)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cmd: Command, opts: &CheckOptions) -> Outcome {
    match cmd {
        Command::Verify { bundle } => verify(&bundle, opts),
        Command::Suspend {
            bundle,
            kind,
            res,
            out,
        } => suspend_cmd(&bundle, kind, res, &out, opts),
        Command::Invariant {
            bundle,
            kind,
            sector,
            csv,
        } => invariant(&bundle, kind, &sector, csv.as_deref(), opts),
        Command::Table { format, which } => {
            let fmt = TableFormat::parse(&format).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(match which {
                Which::Periodic => render_periodic_table(fmt),
                Which::Unstable => render_unstable_table(fmt)?,
                Which::Changes => render_changes_table(fmt),
            })
        }
        Command::Bounds { class, n, p, q } => bounds(&class, n, p, q),
        Command::Example {
            name,
            res,
            out,
            form,
        } => example(name, res, &out, form),
    }
}

fn verify(path: &Path, opts: &CheckOptions) -> Outcome {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Check(format!("cannot read {}: {e}", path.display())))?;
    let b = BundleFile::from_json(&text)?.to_bundle_unchecked()?;
    let generators = verify_generator_set_with_tol(&b.gens, opts.tol.max(1e-10));
    let report = check_bundle_with(&b, opts);
    let passed = generators.passed() && report.passed();
    let out = pretty(&json!({
        "passed": passed,
        "generators": generators,
        "bundle": report,
    }));
    if passed {
        Ok(out)
    } else {
        print!("{out}");
        // name the first failing check
        let msg = match validate(&b, opts) {
            Err(e) => e.to_string(),
            Ok(()) => generators
                .failures
                .first()
                .cloned()
                .unwrap_or_else(|| "generator relations fail".into()),
        };
        Err(Failure::Check(msg))
    }
}

fn suspend_cmd(
    path: &Path,
    kind: Kind,
    res: Option<usize>,
    out: &Path,
    opts: &CheckOptions,
) -> Outcome {
    let b = load_bundle(path, opts)?;
    let want = match kind {
        Kind::Momentum => AxisKind::Momentum,
        Kind::Position => AxisKind::Position,
    };
    // the last generator of the requested kind drives the map
    let ctx = (0..b.gens.len())
        .rev()
        .filter_map(|i| BottContext::new(b.gens.clone(), i).ok())
        .find(|c| c.kind() == want)
        .ok_or_else(|| {
            Failure::Check(format!(
                "no generator of {} gives a {want:?}-like diagonal map",
                b.gens.class()
            ))
        })?;
    let res = res.unwrap_or(b.space.resolution());
    let s = suspend(&b, &ctx, res)?;
    save_bundle(&s, out)?;
    Ok(format!(
        "wrote {} (class {}, S^({},{}), {} points)\n",
        out.display(),
        s.gens.class(),
        s.space.dx(),
        s.space.dk(),
        s.space.len()
    ))
}

fn parse_sector(s: &str) -> Result<Sector, Failure> {
    Ok(match s {
        "all" => Sector::All,
        "valence" => Sector::Valence,
        "up" => Sector::Coordinates(QSH_VALENCE_UP.to_vec()),
        "down" => Sector::Coordinates(QSH_VALENCE_DOWN.to_vec()),
        other => Sector::Coordinates(
            other
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage(format!("unknown sector {other:?}")))?,
        ),
    })
}

fn class_d_like(b: &SampledBundle) -> Result<InvariantResult, Failure> {
    if b.gens.class() == SymmetryClass::Real(0) {
        return Ok(class_d_1d_invariant(b)?);
    }
    // the doubled line goes back to the 4-dim form first
    let plain = if b.gens.space().dim() == 8 {
        undouble_kitaev_diii(b)?
    } else {
        b.clone()
    };
    Ok(diii_spin_sector_invariant(&plain)?)
}

fn invariant(
    path: &Path,
    kind: InvariantArg,
    sector: &str,
    csv: Option<&Path>,
    opts: &CheckOptions,
) -> Outcome {
    let b = load_bundle(path, opts)?;
    let result = match kind {
        InvariantArg::Chern => {
            let sector = parse_sector(sector)?;
            let frames = sector_frames(&b, &sector)?;
            if let Some(p) = csv {
                let mut text = String::from("face,k0,k1,flux\n");
                for (f, (flux, _)) in face_fluxes(&b.space, &frames)?.iter().enumerate() {
                    let (k0, k1) = sphere_angles(&b.space, b.space.faces()[f][0]);
                    writeln!(text, "{f},{k0},{k1},{flux}").unwrap();
                }
                write_csv(p, &text)?;
            }
            bottforge::invariants::chern_from_frames(&b.space, &frames)?
        }
        InvariantArg::Winding => winding_of_bundle(&b)?,
        InvariantArg::KaneMele => {
            if let Some(p) = csv {
                let mut text = String::from("point,k0,k1,abs_pfaffian\n");
                for (i, v) in pfaffian_map(&b)?.iter().enumerate() {
                    let (k0, k1) = sphere_angles(&b.space, i);
                    writeln!(text, "{i},{k0},{k1},{v}").unwrap();
                }
                write_csv(p, &text)?;
            }
            kane_mele_zero_locus(&b)?
        }
        InvariantArg::ClassD => class_d_like(&b)?,
    };
    if csv.is_some() && matches!(kind, InvariantArg::Winding | InvariantArg::ClassD) {
        return Err(Failure::Usage(
            "--csv applies to chern and kane-mele".into(),
        ));
    }
    let angles: Vec<[f64; 2]> = if b.space.dim() == 2 {
        result
            .points
            .iter()
            .map(|&i| {
                let (k0, k1) = sphere_angles(&b.space, i);
                [k0, k1]
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(pretty(&json!({ "result": result, "point_angles": angles })))
}

fn write_csv(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))
}

fn bounds(class: &str, n: usize, p: Option<usize>, q: Option<usize>) -> Outcome {
    let class = SymmetryClass::parse(class).map_err(|e| Failure::Usage(e.to_string()))?;
    if p.is_some() != q.is_some() {
        return Err(Failure::Usage("--p and --q go together".into()));
    }
    let b = stability_bounds(class, n, p, q)?;
    let slice: Vec<_> = unstable_cases(3)?
        .into_iter()
        .filter(|c| c.class == class.cartan_name())
        .collect();
    Ok(pretty(&json!({ "bounds": b, "unstable_cases": slice })))
}

fn example(name: ExampleName, res: usize, out: &Path, form: Form) -> Outcome {
    let b = match (name, form) {
        (ExampleName::KitaevDiii, Form::Doubled) => doubled_kitaev_diii(res)?,
        (ExampleName::KitaevDiii, Form::Plain) => build_d_to_diii(res)?.bundle,
        (ExampleName::Qsh, Form::Doubled) => build_diii_to_aii(res)?.bundle,
        (ExampleName::Qsh, Form::Plain) => {
            return Err(Failure::Usage("--form plain applies to kitaev-diii".into()))
        }
    };
    save_bundle(&b, out)?;
    Ok(format!(
        "wrote {} (class {}, {} points)\n",
        out.display(),
        b.gens.class(),
        b.space.len()
    ))
}
