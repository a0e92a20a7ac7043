//! Command-line surface: validate data files, classify interference, run the
//! inverse solver, rebuild the reference example, and drive the oracle and
//! sweep suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qlra_core::basis_family::sweep::{oracle_check, run_sweep, OracleTolerances, ParamRanges};
use qlra_core::basis_family::{reproduce_example, WorkedExample};
use qlra_core::context_data::{pair_label, validate, ContextData};
use qlra_core::interference::table;
use qlra_core::qlra::{represent, AnyRepresentation, RepresentError, Tolerances};
use qlra_core::scalars::{Amplitude, Field, PhaseKind};

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 1;
const EXIT_CONSTRAINT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_ORACLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "qlra",
    about = "Quantum-like representation of trichotomous statistical data",
    version
)]
struct Cli {
    /// Report format: human tables or full-precision JSON.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Table,
    Machine,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FieldArg {
    Complex,
    Hyperbolic,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::Complex => Field::Complex,
            FieldArg::Hyperbolic => Field::Hyperbolic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FieldChoice {
    Auto,
    Complex,
    Hyperbolic,
}

#[derive(Args)]
struct RangeArgs {
    /// Lower magnitude bound for the free basis parameters.
    #[arg(long, default_value_t = 0.2)]
    mag_min: f64,
    /// Upper magnitude bound for the free basis parameters.
    #[arg(long, default_value_t = 5.0)]
    mag_max: f64,
    /// Phases are drawn from [-phase-bound, phase-bound].
    #[arg(long, default_value_t = 1.5)]
    phase_bound: f64,
    /// Lower bound on |v| components of the state.
    #[arg(long, default_value_t = 0.1)]
    v_min: f64,
    /// Upper bound on |v| components of the state.
    #[arg(long, default_value_t = 5.0)]
    v_max: f64,
    /// Interior margin every generated probability must respect.
    #[arg(long, default_value_t = 1e-8)]
    margin: f64,
    /// Give up on an instance after this many rejected draws.
    #[arg(long, default_value_t = 10_000)]
    max_attempts: u32,
}

impl RangeArgs {
    fn ranges(&self) -> ParamRanges {
        ParamRanges {
            magnitude: (self.mag_min, self.mag_max),
            phase: (-self.phase_bound, self.phase_bound),
            v_abs: (self.v_min, self.v_max),
            margin: self.margin,
            min_denominator: 1e-6,
            max_attempts: self.max_attempts,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a context-data file against all constraints.
    Validate {
        file: PathBuf,
        /// Constraint tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print the interference table and its classification.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Solve the inverse problem for a context-data file.
    Represent {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol_validate: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol_phase: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol_unitary: f64,
        /// Expected amplitude field; `auto` follows the classification.
        #[arg(long, value_enum, default_value_t = FieldChoice::Auto)]
        field: FieldChoice,
    },
    /// Rebuild the bundled worked example and compare it against its
    /// reference values.
    PaperExample {
        /// Where to write the generated context-data file.
        #[arg(long, default_value = "paper_example.json")]
        out: PathBuf,
    },
    /// Cross-check closed forms against direct computation and run the
    /// solver round trip over random instances.
    OracleCheck {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FieldArg::Hyperbolic)]
        field: FieldArg,
        #[command(flatten)]
        ranges: RangeArgs,
    },
    /// Sample random instances and record class, admissibility and residuals.
    Sweep {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        count: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FieldArg::Hyperbolic)]
        field: FieldArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record encoding.
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
        #[command(flatten)]
        ranges: RangeArgs,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { ref file, tol } => cmd_validate(file, tol, cli.output),
        Command::Classify { ref file, tol } => cmd_classify(file, tol, cli.output),
        Command::Represent { ref file, tol_validate, tol_phase, tol_unitary, field } => {
            let tols =
                Tolerances { validate: tol_validate, phase: tol_phase, unitary: tol_unitary };
            cmd_represent(file, tols, field, cli.output)
        }
        Command::PaperExample { ref out } => cmd_paper_example(out, cli.output),
        Command::OracleCheck { trials, seed, field, ref ranges } => {
            cmd_oracle_check(trials, seed, field.into(), &ranges.ranges(), cli.output)
        }
        Command::Sweep { count, seed, field, ref out, format, ref ranges } => {
            cmd_sweep(count, seed, field.into(), out.as_deref(), format, &ranges.ranges())
        }
    };
    ExitCode::from(code)
}

fn load_data(path: &std::path::Path) -> Result<ContextData, u8> {
    ContextData::load(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })
}

fn cmd_validate(file: &std::path::Path, tol: f64, output: OutputFormat) -> u8 {
    let data = match load_data(file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let report = validate(&data, tol);
    match output {
        OutputFormat::Table => println!("{report}"),
        OutputFormat::Machine => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "report": report,
                "pass": report.pass(),
            }))
            .expect("report serializes")
        ),
    }
    if report.pass() {
        EXIT_OK
    } else {
        EXIT_CONSTRAINT
    }
}

fn cmd_classify(file: &std::path::Path, tol: f64, output: OutputFormat) -> u8 {
    let data = match load_data(file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let report = validate(&data, tol);
    if !report.pass() {
        eprintln!("error: data fails validation");
        for c in report.failures() {
            eprintln!("  {} (residual {:.3e})", c.id, c.residual);
        }
        return EXIT_CONSTRAINT;
    }
    let tbl = match table(&data) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONSTRAINT;
        }
    };
    match output {
        OutputFormat::Table => {
            println!("coefficients of interference (rows b1..b3, pairs 12, 13, 23):");
            for row in &tbl.coefficients {
                println!("  {:>10.6} {:>10.6} {:>10.6}", row[0], row[1], row[2]);
            }
            println!("class: {}", tbl.class);
            if !tbl.near_boundary.is_empty() {
                let list: Vec<String> = tbl
                    .near_boundary
                    .iter()
                    .map(|&(l, s)| format!("(b{}, {{{}}})", l + 1, pair_label(s)))
                    .collect();
                println!("near |lambda| = 1: {}", list.join(", "));
            }
        }
        OutputFormat::Machine => {
            println!("{}", serde_json::to_string_pretty(&tbl).expect("table serializes"));
        }
    }
    EXIT_OK
}

fn scalar_json<S: Amplitude>(z: S) -> serde_json::Value {
    let (a, b) = z.components();
    json!([a, b])
}

fn representation_json<S: Amplitude>(
    rep: &qlra_core::qlra::Representation<S>,
) -> serde_json::Value {
    let phases: Vec<_> = rep
        .phases
        .rows
        .iter()
        .map(|r| {
            json!({
                "phi": r.phi,
                "eps": [r.eps[0].value(), r.eps[1].value(), r.eps[2].value()],
            })
        })
        .collect();
    let mat = |m: &[[S; 3]; 3]| -> serde_json::Value {
        json!(m
            .iter()
            .map(|row| row.iter().map(|&z| scalar_json(z)).collect::<Vec<_>>())
            .collect::<Vec<_>>())
    };
    json!({
        "field": S::FIELD,
        "class": rep.interference.class,
        "interference": rep.interference,
        "kind": match rep.phases.kind { PhaseKind::Trig => "trig", PhaseKind::Hyper => "hyper" },
        "phases": phases,
        "subamplitudes": mat(&rep.amplitudes.sub),
        "state": rep.amplitudes.row_sums.iter().map(|&z| scalar_json(z)).collect::<Vec<_>>(),
        "transition_matrix": mat(&rep.transition.entries),
        "reconstructed_b": rep.reconstructed_b,
        "diagnostics": rep.diagnostics,
    })
}

fn print_representation_table<S: Amplitude>(rep: &qlra_core::qlra::Representation<S>) {
    println!("class: {}", rep.interference.class);
    println!("coefficients of interference (rows b1..b3, pairs 12, 13, 23):");
    for row in &rep.interference.coefficients {
        println!("  {:>10.6} {:>10.6} {:>10.6}", row[0], row[1], row[2]);
    }
    println!("solved phases (gauge phi_l1 = 0):");
    for (l, r) in rep.phases.rows.iter().enumerate() {
        println!(
            "  b{}: phi = [{:>9.6}, {:>9.6}, {:>9.6}]  eps = [{}, {}, {}]",
            l + 1,
            r.phi[0],
            r.phi[1],
            r.phi[2],
            r.eps[0],
            r.eps[1],
            r.eps[2]
        );
    }
    println!("transition matrix ({} field, entries as components):", S::FIELD);
    for row in &rep.transition.entries {
        let cells: Vec<String> = row
            .iter()
            .map(|z| {
                let (a, b) = z.components();
                format!("({a:>9.6}, {b:>9.6})")
            })
            .collect();
        println!("  {}", cells.join("  "));
    }
    let d = rep.diagnostics;
    println!(
        "unitarity residual: {:.3e} (matrix route), {:.3e} (transition sums)",
        d.unitarity, d.transition_sums
    );
    println!(
        "reconstructed p_b: [{:.6}, {:.6}, {:.6}]",
        rep.reconstructed_b[0], rep.reconstructed_b[1], rep.reconstructed_b[2]
    );
    println!(
        "residuals: amplitude law {:.3e}, pair law {:.3e}, born-vs-ftp {:.3e}",
        d.amplitude_law, d.pair_law, d.born_ftp
    );
    if let Some(gap) = d.born_input {
        println!("gap to supplied b_priors: {gap:.3e}");
    }
}

fn cmd_represent(
    file: &std::path::Path,
    tols: Tolerances,
    field: FieldChoice,
    output: OutputFormat,
) -> u8 {
    let data = match load_data(file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let rep = match represent(&data, tols) {
        Ok(rep) => rep,
        Err(e @ RepresentError::Validation { .. }) => {
            eprintln!("error: {e}");
            return EXIT_CONSTRAINT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INFEASIBLE;
        }
    };
    let expected = match field {
        FieldChoice::Auto => None,
        FieldChoice::Complex => Some(Field::Complex),
        FieldChoice::Hyperbolic => Some(Field::Hyperbolic),
    };
    if let Some(want) = expected {
        if want != rep.field() {
            eprintln!(
                "error: data classifies as {} which requires the {} field, not {}",
                rep.class(),
                rep.field(),
                want
            );
            return EXIT_INFEASIBLE;
        }
    }
    match (&rep, output) {
        (AnyRepresentation::Complex(r), OutputFormat::Table) => print_representation_table(r),
        (AnyRepresentation::Hyperbolic(r), OutputFormat::Table) => print_representation_table(r),
        (AnyRepresentation::Complex(r), OutputFormat::Machine) => {
            println!("{}", serde_json::to_string_pretty(&representation_json(r)).unwrap());
        }
        (AnyRepresentation::Hyperbolic(r), OutputFormat::Machine) => {
            println!("{}", serde_json::to_string_pretty(&representation_json(r)).unwrap());
        }
    }
    EXIT_OK
}

fn cmd_paper_example(out: &std::path::Path, output: OutputFormat) -> u8 {
    let example: WorkedExample = match reproduce_example() {
        Ok(ex) => ex,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MISMATCH;
        }
    };
    let tol = 1e-6;
    let priors_sum: f64 = example.data.priors.iter().sum();
    match output {
        OutputFormat::Table => {
            println!(
                "{:<14} {:>12} {:>12} {:>12} {:>10}",
                "value", "reference", "direct", "closed-form", "|diff|"
            );
            for row in &example.rows {
                println!(
                    "{:<14} {:>12.6} {:>12.6} {:>12.6} {:>10.2e}",
                    row.name,
                    row.reference,
                    row.direct,
                    row.closed_form,
                    row.deviation()
                );
            }
            println!("priors sum: {priors_sum:.6}");
            println!("t-invariance (t = 0 vs 0.7): {:.3e}", example.t_invariance);
            println!(
                "(b3,{{13}}) closed form vs direct (b3,{{12}}): gap {:.6} (the slots share no expression)",
                example.duplicate_form_gap
            );
        }
        OutputFormat::Machine => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "rows": example.rows,
                    "priors_sum": priors_sum,
                    "t_invariance": example.t_invariance,
                    "duplicate_form_gap": example.duplicate_form_gap,
                    "max_deviation": example.max_deviation(),
                    "pass": example.pass(tol),
                }))
                .unwrap()
            );
        }
    }
    if let Err(e) = example.data.save(out) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return EXIT_PARSE;
    }
    eprintln!("context data written to {}", out.display());
    if example.pass(tol) {
        EXIT_OK
    } else {
        eprintln!("error: worst deviation {:.3e} exceeds {tol:e}", example.max_deviation());
        EXIT_MISMATCH
    }
}

fn cmd_oracle_check(
    trials: u32,
    seed: u64,
    field: Field,
    ranges: &ParamRanges,
    output: OutputFormat,
) -> u8 {
    let summary = match oracle_check(
        trials,
        seed,
        field,
        ranges,
        OracleTolerances::default(),
        Tolerances::default(),
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ORACLE;
        }
    };
    match output {
        OutputFormat::Table => {
            println!("oracle check: {trials} {field} instances, seed {seed}");
            println!("  closed-form vs direct, worst rel: {:.3e}", summary.max_closed_vs_direct);
            println!("  gram residual, worst:             {:.3e}", summary.max_gram_residual);
            println!("  born round trip, worst:           {:.3e}", summary.max_born_residual);
            println!("  unitarity residual, worst:        {:.3e}", summary.max_unitarity_residual);
            println!("  verdict: {}", if summary.pass() { "pass" } else { "FAIL" });
        }
        OutputFormat::Machine => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
        }
    }
    if let Some(f) = &summary.failure {
        eprintln!("first failure: instance {} (seed {}): {}", f.index, f.seed, f.detail);
        eprintln!("  basis params: {:?}", f.basis);
        eprintln!("  state params: {:?}", f.state);
        return EXIT_ORACLE;
    }
    EXIT_OK
}

fn cmd_sweep(
    count: u32,
    seed: u64,
    field: Field,
    out: Option<&std::path::Path>,
    format: SweepFormat,
    ranges: &ParamRanges,
) -> u8 {
    let report = match run_sweep(count, seed, ranges, field, Tolerances::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let body = match format {
        SweepFormat::Csv => {
            let mut text =
                String::from(qlra_core::basis_family::sweep::SweepRecord::csv_header());
            text.push('\n');
            for r in &report.records {
                text.push_str(&r.to_csv());
                text.push('\n');
            }
            text
        }
        SweepFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_PARSE;
            }
        }
        None => print!("{body}"),
    }
    let hyperbolic = report
        .records
        .iter()
        .filter(|r| r.class == qlra_core::InterferenceClass::Hyperbolic)
        .count();
    eprintln!(
        "{count} records ({} admissible, {hyperbolic} Hyperbolic), acceptance rate {:.3}",
        report.records.iter().filter(|r| r.admissible).count(),
        report.acceptance_rate
    );
    EXIT_OK
}
