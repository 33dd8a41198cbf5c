//! Command-line front end: load symmetric matrices, certify and solve
//! perturbation problems, and run the two-electron pipeline.
//!
//! Exit codes: 0 success, 1 input error, 2 certification failure,
//! 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use schurbound::certify::{self, CertifyParams};
use schurbound::densela::{self, SymMatrix};
use schurbound::fsmap::{Lam0Select, PerturbationProblem, SolveOpts};
use schurbound::helium::{self, HeliumConstants, Rounding, Symmetry};
use schurbound::quadrature::{self, Grid, GridSpec, SphereRule};

const EXIT_INPUT: u8 = 1;
const EXIT_CERT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "schurbound", version, about = "Certified eigenvalue enclosures via Schur-complement reduction", long_about = None)]
struct Cli {
    /// Cap the rayon worker count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the smallness conditions and print the certificate block.
    Certify(CertifyArgs),
    /// Solve the fixed-point equations for every branch and print a table.
    Solve(SolveArgs),
    /// Two-electron ion pipeline.
    #[command(subcommand)]
    Helium(HeliumCmd),
}

#[derive(Args)]
struct ProblemArgs {
    /// Path to the unperturbed matrix (text format: n, then n rows).
    #[arg(long)]
    h0: PathBuf,
    /// Path to the perturbation matrix (same format).
    #[arg(long)]
    w: PathBuf,
    /// Select the i-th distinct eigenvalue of H0, ascending, 0-based.
    #[arg(long, conflicts_with = "lam0_value")]
    lam0_index: Option<usize>,
    /// Select the eigenvalue cluster nearest this value.
    #[arg(long)]
    lam0_value: Option<f64>,
    /// Relative tolerance for merging near-degenerate eigenvalues.
    #[arg(long, default_value_t = 1e-9)]
    cluster_tol: f64,
    /// Condition parameter a in (0, 1-b).
    #[arg(long, default_value_t = 0.1)]
    a: f64,
    /// Condition parameter b in (0, 1).
    #[arg(long, default_value_t = 0.8)]
    b: f64,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Also write the certificate block to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Solve even when the certificate conditions fail.
    #[arg(long)]
    force: bool,
    /// Add a brute-force eigenvalue column from a direct decomposition of H.
    #[arg(long)]
    check: bool,
    /// Emit CSV instead of the aligned text table.
    #[arg(long)]
    csv: bool,
    /// Also write the output to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HeliumCmd {
    /// Compute w1, w2, w1_as, w2_as on a quadrature grid.
    Constants(HeliumGridArgs),
    /// Ground-state energy bracket for a given charge.
    Bounds(BoundsArgs),
    /// Reference comparison table (CSV with --csv).
    Table1(Table1Args),
    /// Constants per grid index, as CSV.
    Convergence(ConvergenceArgs),
}

#[derive(Args, Clone)]
struct HeliumGridArgs {
    /// Grid table index (1..=12).
    #[arg(long, default_value_t = 3)]
    index: usize,
    /// Radial point count (overrides --index together with --rmax).
    #[arg(long, requires = "rmax")]
    nr: Option<usize>,
    /// Outer radius (overrides --index together with --nr).
    #[arg(long, requires = "nr")]
    rmax: Option<f64>,
    /// Sphere rule: `product:L` or `lebedev:PATH`.
    #[arg(long)]
    sphere: Option<String>,
    /// Refuse table indices above this without --allow-large.
    #[arg(long, default_value_t = 5)]
    max_index: usize,
    /// Lift the resource guard on large indices.
    #[arg(long)]
    allow_large: bool,
    /// Emit CSV.
    #[arg(long)]
    csv: bool,
    /// Also write the output to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Nuclear charge z > 0.
    #[arg(long)]
    z: f64,
    /// Which permutation sector.
    #[arg(long, value_enum)]
    symmetry: SymmetryArg,
    /// Constants source: display-rounded reference values or computed.
    #[arg(long, value_enum, default_value_t = RoundingArg::Paper)]
    rounding: RoundingArg,
    #[command(flatten)]
    grid: HeliumGridArgs,
}

#[derive(Args)]
struct Table1Args {
    /// Constants source for the bounds columns.
    #[arg(long, value_enum, default_value_t = RoundingArg::Paper)]
    rounding: RoundingArg,
    #[command(flatten)]
    grid: HeliumGridArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Run grid indices 1..=this.
    #[arg(long, default_value_t = 5)]
    max_index: usize,
    /// Lift the resource guard on indices above 5.
    #[arg(long)]
    allow_large: bool,
    /// Sphere rule override: `product:L` or `lebedev:PATH`.
    #[arg(long)]
    sphere: Option<String>,
    /// Also write the CSV to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymmetryArg {
    Sym,
    Antisym,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum RoundingArg {
    Paper,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // ignore failure if a pool already exists (tests call main repeatedly)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let code = match cli.command {
        Command::Certify(args) => cmd_certify(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Helium(cmd) => cmd_helium(cmd),
    };
    ExitCode::from(code)
}

fn load_matrix(path: &Path) -> Result<SymMatrix, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SymMatrix::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn build_problem(args: &ProblemArgs) -> Result<(PerturbationProblem, CertifyParams), String> {
    let h0 = load_matrix(&args.h0)?;
    let w = load_matrix(&args.w)?;
    let select = match (args.lam0_index, args.lam0_value) {
        (_, Some(v)) => Lam0Select::Value(v),
        (Some(i), None) => Lam0Select::Index(i),
        (None, None) => Lam0Select::Index(0),
    };
    let prob = PerturbationProblem::new(h0, w, select, Some(args.cluster_tol))
        .map_err(|e| e.to_string())?;
    let params = CertifyParams::new(args.a, args.b).map_err(|e| e.to_string())?;
    Ok((prob, params))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> u8 {
    let (prob, params) = match build_problem(&args.problem) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let cert = certify::check_conditions(&prob, &params);
    let block = cert.to_kv_block();
    if let Err(e) = emit(&args.out, &block) {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    if cert.valid {
        0
    } else {
        EXIT_CERT
    }
}

fn cmd_solve(args: &SolveArgs) -> u8 {
    let (prob, params) = match build_problem(&args.problem) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let cert = certify::check_conditions(&prob, &params);
    if !cert.valid && !args.force {
        eprint!("{}", cert.to_kv_block());
        eprintln!("error: certificate conditions fail (rerun with --force to solve anyway)");
        return EXIT_CERT;
    }
    let opts = SolveOpts {
        a: args.problem.a,
        b: args.problem.b,
        force: args.force,
        tol: None,
        max_iter: 200,
    };
    let (lo, hi) = cert.eig_interval;
    let brute: Option<Vec<f64>> = if args.check {
        match densela::sym_eig(&prob.h0().add(prob.w())) {
            Ok(e) => {
                let inside: Vec<f64> =
                    e.values.iter().copied().filter(|&v| v >= lo && v <= hi).collect();
                if inside.len() == prob.multiplicity() {
                    Some(inside)
                } else {
                    // fall back to the m eigenvalues nearest the cluster
                    let mut vals = e.values.clone();
                    vals.sort_by(|x, y| {
                        (x - prob.lam0())
                            .abs()
                            .partial_cmp(&(y - prob.lam0()).abs())
                            .unwrap()
                    });
                    let mut m: Vec<f64> = vals[..prob.multiplicity()].to_vec();
                    m.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    Some(m)
                }
            }
            Err(e) => {
                eprintln!("error: brute-force check failed: {e}");
                return EXIT_SOLVER;
            }
        }
    } else {
        None
    };

    let mut text = String::new();
    if args.csv {
        text.push_str("i,lam_i,iterations,residual,interval_low,interval_high");
        if args.check {
            text.push_str(",brute_force_lam");
        }
        text.push_str(",in_interval\n");
    } else {
        text.push_str("i lam_i iterations residual interval_low interval_high");
        if args.check {
            text.push_str(" brute_force_lam");
        }
        text.push_str(" in_interval\n");
    }
    let mut failed = false;
    for i in 1..=prob.multiplicity() {
        match schurbound::fsmap::solve_fixed_point(&prob, i, &opts) {
            Ok(sol) => {
                let inside = sol.lam >= lo && sol.lam <= hi;
                let sep = if args.csv { "," } else { " " };
                text.push_str(&format!(
                    "{i}{sep}{}{sep}{}{sep}{:e}{sep}{}{sep}{}",
                    sol.lam, sol.iterations, sol.residual, lo, hi
                ));
                if let Some(b) = &brute {
                    text.push_str(&format!("{sep}{}", b[i - 1]));
                }
                text.push_str(&format!("{sep}{inside}\n"));
            }
            Err(e) => {
                failed = true;
                text.push_str(&format!("{i} failed: {e}\n"));
            }
        }
    }
    if let Err(e) = emit(&args.out, &text) {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    if failed {
        EXIT_SOLVER
    } else {
        0
    }
}

fn parse_sphere(spec: &str) -> Result<SphereRule, String> {
    if let Some(l) = spec.strip_prefix("product:") {
        let l: u32 = l.parse().map_err(|e| format!("bad product order: {e}"))?;
        SphereRule::product(l).map_err(|e| e.to_string())
    } else if let Some(path) = spec.strip_prefix("lebedev:") {
        SphereRule::from_lebedev_file(Path::new(path)).map_err(|e| e.to_string())
    } else {
        Err(format!("unknown sphere rule {spec:?}; use product:L or lebedev:PATH"))
    }
}

/// Build the grid from the common helium flags; errors are input errors.
fn helium_grid(args: &HeliumGridArgs) -> Result<(Grid, String), String> {
    if let (Some(nr), Some(rmax)) = (args.nr, args.rmax) {
        let sphere = match &args.sphere {
            Some(s) => parse_sphere(s)?,
            None => SphereRule::product(12).map_err(|e| e.to_string())?,
        };
        let label = format!("custom nr={nr} rmax={rmax} sphere={}", sphere.count());
        let spec = GridSpec::new(nr, rmax, sphere).map_err(|e| e.to_string())?;
        return Ok((quadrature::build_grid(&spec), label));
    }
    let (rmax, nr, nleb) = quadrature::table_entry(args.index)
        .ok_or_else(|| format!("index {} out of range 1..=12", args.index))?;
    if args.index > args.max_index && !args.allow_large {
        return Err(format!(
            "index {} exceeds --max-index {} (grid would hold {} points); pass --allow-large to proceed",
            args.index,
            args.max_index,
            nr * nleb
        ));
    }
    let sphere = match &args.sphere {
        Some(s) => parse_sphere(s)?,
        None => SphereRule::product(quadrature::product_order_matching(nleb))
            .map_err(|e| e.to_string())?,
    };
    let label = format!("index={} nr={nr} rmax={rmax} sphere={}", args.index, sphere.count());
    let spec = GridSpec::new(nr, rmax, sphere).map_err(|e| e.to_string())?;
    Ok((quadrature::build_grid(&spec), label))
}

fn constants_text(c: &HeliumConstants, csv: bool) -> String {
    if csv {
        format!("w1,w2,w1_as,w2_as\n{},{},{},{}\n", c.w1, c.w2, c.w1_as, c.w2_as)
    } else {
        format!(
            "grid: {}\nw1={}\nw2={}\nw1_as={}\nw2_as={}\n# note: published values for w1_as disagree (0.20 vs 0.3); the computed value is reported as-is\n",
            c.grid_label, c.w1, c.w2, c.w1_as, c.w2_as
        )
    }
}

fn cmd_helium(cmd: HeliumCmd) -> u8 {
    match cmd {
        HeliumCmd::Constants(args) => {
            let (grid, label) = match helium_grid(&args) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let c = match helium::compute_constants(&grid, &label) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            match emit(&args.out, &constants_text(&c, args.csv)) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        HeliumCmd::Bounds(args) => {
            if !(args.z > 0.0) {
                eprintln!("error: z must be positive");
                return EXIT_INPUT;
            }
            let symmetry = match args.symmetry {
                SymmetryArg::Sym => Symmetry::Sym,
                SymmetryArg::Antisym => Symmetry::Antisym,
            };
            let (constants, rounding) = match args.rounding {
                RoundingArg::Paper => (HeliumConstants::nominal(), Rounding::Paper),
                RoundingArg::Full => {
                    let (grid, label) = match helium_grid(&args.grid) {
                        Ok(g) => g,
                        Err(e) => {
                            eprintln!("error: {e}");
                            return EXIT_INPUT;
                        }
                    };
                    match helium::compute_constants(&grid, &label) {
                        Ok(c) => (c, Rounding::Full),
                        Err(e) => {
                            eprintln!("error: {e}");
                            return EXIT_INPUT;
                        }
                    }
                }
            };
            let enc = helium::energy_bounds(args.z, symmetry, &constants, rounding);
            let text = if args.grid.csv {
                format!(
                    "z,symmetry,lower,upper,w1,w2,gamma0,k,valid_z\n{},{},{},{},{},{},{},{},{}\n",
                    enc.z,
                    enc.symmetry,
                    enc.lower,
                    enc.upper,
                    enc.w1_used,
                    enc.w2_used,
                    enc.gamma0,
                    enc.k,
                    enc.valid_z
                )
            } else {
                format!(
                    "z={}\nsymmetry={}\nlower={}\nupper={}\nw1={}\nw2={}\ngamma0={}\nk={}\nvalid_z={}\n",
                    enc.z,
                    enc.symmetry,
                    enc.lower,
                    enc.upper,
                    enc.w1_used,
                    enc.w2_used,
                    enc.gamma0,
                    enc.k,
                    enc.valid_z
                )
            };
            match emit(&args.grid.out, &text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        HeliumCmd::Table1(args) => {
            let (constants, rounding) = match args.rounding {
                RoundingArg::Paper => (HeliumConstants::nominal(), Rounding::Paper),
                RoundingArg::Full => {
                    let (grid, label) = match helium_grid(&args.grid) {
                        Ok(g) => g,
                        Err(e) => {
                            eprintln!("error: {e}");
                            return EXIT_INPUT;
                        }
                    };
                    match helium::compute_constants(&grid, &label) {
                        Ok(c) => (c, Rounding::Full),
                        Err(e) => {
                            eprintln!("error: {e}");
                            return EXIT_INPUT;
                        }
                    }
                }
            };
            let rows = helium::table1(rounding, &constants);
            let text = if args.grid.csv {
                helium::table1_csv(&rows)
            } else {
                let mut s = String::from(
                    "z  -E_lead  delta_pct  err_pct  lower  upper  in_interval\n",
                );
                for r in &rows {
                    s.push_str(&format!(
                        "{}  {}  {:.2}  {:.3}  {}  {}  {}\n",
                        r.z, -r.e_lead, r.delta_pct, r.err_pct, r.lower, r.upper, r.in_interval
                    ));
                }
                s
            };
            match emit(&args.grid.out, &text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        HeliumCmd::Convergence(args) => {
            if args.max_index > 5 && !args.allow_large {
                eprintln!(
                    "error: --max-index {} exceeds the desk-scale guard (5); pass --allow-large",
                    args.max_index
                );
                return EXIT_INPUT;
            }
            if quadrature::table_entry(args.max_index).is_none() {
                eprintln!("error: --max-index {} out of range 1..=12", args.max_index);
                return EXIT_INPUT;
            }
            let mut rows = Vec::new();
            for idx in 1..=args.max_index {
                let grid_args = HeliumGridArgs {
                    index: idx,
                    nr: None,
                    rmax: None,
                    sphere: args.sphere.clone(),
                    max_index: args.max_index,
                    allow_large: args.allow_large,
                    csv: true,
                    out: None,
                };
                let (grid, label) = match helium_grid(&grid_args) {
                    Ok(g) => g,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                };
                match helium::compute_constants(&grid, &label) {
                    Ok(c) => rows.push((idx, c)),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                }
            }
            let text = helium::convergence_csv(&rows);
            match emit(&args.out, &text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
    }
}
