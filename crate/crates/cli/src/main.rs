use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyrigid::gallery::{generate, GeneratorSpec};
use polyrigid::mesh::write_off;
use polyrigid::report::{
    cmd_analyze, cmd_hat, load_file, load_generated, report_schema, resolve_hat, AnalysisReport, ApexChoice,
    HatOptions, LoadedInput, ShapeSummary, EXIT_INPUT, EXIT_PASS,
};
use polyrigid::Tolerances;

/// Infinitesimal rigidity and curvature-matrix checks for star-shaped polyhedra.
#[derive(Parser, Debug)]
#[command(name = "polyrigid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weak convexity, rigidity and Λ_P per apex of a closed polyhedron.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Vertex index, or `auto` for every vertex.
        #[arg(long, default_value = "auto")]
        apex: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hat of a polyhedron (or a generated hat): Λ_H, completion, homotopy.
    Hat {
        #[command(flatten)]
        input: InputArgs,
        /// Apex sent to infinity; defaults to the generator's designated apex.
        #[arg(long)]
        apex: Option<usize>,
        /// Glue simplices until the hat is convex and certify each step.
        #[arg(long)]
        complete: bool,
        /// Comma-separated homotopy parameters in [0, 1).
        #[arg(long, value_delimiter = ',')]
        homotopy: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Emits a gallery shape as JSON or OFF.
    Generate {
        /// `name` or `name:key=value,...`
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Prints the field description of the report.
    ReportSchema {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Mesh file (.off or .obj).
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    input: Option<PathBuf>,
    /// Gallery generator spec.
    #[arg(long)]
    generate: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct TolArgs {
    #[arg(long)]
    tol_area: Option<f64>,
    #[arg(long)]
    tol_vol: Option<f64>,
    #[arg(long)]
    tol_hull: Option<f64>,
    #[arg(long)]
    tol_angle: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    tol_len: Option<f64>,
    #[arg(long)]
    tol_normal: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_eig: Option<f64>,
    #[arg(long)]
    tol_sym: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerances, String> {
        let mut t = Tolerances::default();
        let fields = [
            (self.tol_area, &mut t.area, "area"),
            (self.tol_vol, &mut t.vol, "vol"),
            (self.tol_hull, &mut t.hull, "hull"),
            (self.tol_angle, &mut t.angle, "angle"),
            (self.tol_rel, &mut t.rel, "rel"),
            (self.tol_len, &mut t.len, "len"),
            (self.tol_normal, &mut t.normal, "normal"),
            (self.tol_rank, &mut t.rank, "rank"),
            (self.tol_eig, &mut t.eig, "eig"),
            (self.tol_sym, &mut t.sym, "sym"),
        ];
        for (given, slot, name) in fields {
            if let Some(v) = given {
                if !(v.is_finite() && v > 0.0) {
                    return Err(format!("--tol-{name} must be positive and finite (got {v})"));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Off,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn load(args: &InputArgs, tol: &Tolerances) -> polyrigid::Result<LoadedInput> {
    match (&args.input, &args.generate) {
        (Some(path), _) => load_file(path, tol),
        (None, Some(spec)) => load_generated(spec, args.seed, tol),
        (None, None) => unreachable!("clap requires an input"),
    }
}

fn input_failure(msg: &str) -> ExitCode {
    eprintln!("polyrigid: {msg}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn finish(report: &AnalysisReport, out: Option<&PathBuf>) -> ExitCode {
    if let Err(e) = emit(out, &(report.to_json() + "\n")) {
        return input_failure(&e);
    }
    for f in &report.outcome.failures {
        eprintln!("polyrigid: {f}");
    }
    ExitCode::from(report.outcome.exit_code as u8)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Analyze { input, apex, output } => {
            if output.format != Format::Json {
                return input_failure("analyze only writes JSON");
            }
            let tol = match input.tol.resolve() {
                Ok(t) => t,
                Err(e) => return input_failure(&e),
            };
            let apex = match apex.as_str() {
                "auto" => ApexChoice::Auto,
                s => match s.parse() {
                    Ok(k) => ApexChoice::Index(k),
                    Err(_) => return input_failure(&format!("--apex must be an index or auto (got {s:?})")),
                },
            };
            let report = match load(&input, &tol) {
                Ok(loaded) => cmd_analyze(&loaded, apex, &tol),
                Err(e) => AnalysisReport::input_error("analyze", &tol, &e),
            };
            finish(&report, output.out.as_ref())
        }
        Command::Hat { input, apex, complete, homotopy, output } => {
            let tol = match input.tol.resolve() {
                Ok(t) => t,
                Err(e) => return input_failure(&e),
            };
            let loaded = match load(&input, &tol) {
                Ok(l) => l,
                Err(e) => return finish(&AnalysisReport::input_error("hat", &tol, &e), output.out.as_ref()),
            };
            if output.format == Format::Off {
                return match resolve_hat(&loaded, apex, &tol) {
                    Ok((hat, _)) => match emit(output.out.as_ref(), &write_off(hat.mesh())) {
                        Ok(()) => ExitCode::from(EXIT_PASS as u8),
                        Err(e) => input_failure(&e),
                    },
                    Err((code, msg)) => {
                        eprintln!("polyrigid: {msg}");
                        ExitCode::from(code as u8)
                    }
                };
            }
            let opts = HatOptions { apex, complete, homotopy };
            finish(&cmd_hat(&loaded, &opts, &tol), output.out.as_ref())
        }
        Command::Generate { spec, seed, tol, output } => {
            let tol = match tol.resolve() {
                Ok(t) => t,
                Err(e) => return input_failure(&e),
            };
            let shape = match spec.parse::<GeneratorSpec>().and_then(|s| generate(&s, seed, &tol)) {
                Ok(s) => s,
                Err(e) => return input_failure(&e.to_string()),
            };
            let text = match output.format {
                Format::Off => write_off(&shape.mesh),
                Format::Json => {
                    serde_json::to_string_pretty(&ShapeSummary::of(&shape)).expect("summary serializes") + "\n"
                }
            };
            match emit(output.out.as_ref(), &text) {
                Ok(()) => ExitCode::from(EXIT_PASS as u8),
                Err(e) => input_failure(&e),
            }
        }
        Command::ReportSchema { out } => {
            let text = serde_json::to_string_pretty(&report_schema()).expect("schema serializes") + "\n";
            match emit(out.as_ref(), &text) {
                Ok(()) => ExitCode::from(EXIT_PASS as u8),
                Err(e) => input_failure(&e),
            }
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
