//! Command-line front end. `run` parses argv, executes one pipeline and maps
//! the outcome to an exit code: 0 ok, 1 failed check, 2 usage, 3 refusal.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cayley::{with_workers, CayleyGraph};
use crate::error::{LabError, Result};
use crate::group::unitriangular_element;
use crate::growth::{
    approximate_group_witness, ball_growth, doubling_scan, doubling_window, flatness, GrowthProfile,
};
use crate::mixing::{check_items, mixing_times_with, ItemStatus};
use crate::nilprog::{
    commutator_depth, enumerate_progression, generalised_commutators, hall_basis, verify_nesting,
    verify_power_laws, verify_properness, ProgressionKind, ProgressionSpec,
};
use crate::report::{fmt_f64, to_json, value_table, Format, Table};
use crate::spectral::{
    chain_from, cheeger, lambda1_with, Laplacian, SolverChoice, DEFAULT_EXACT_CAP,
};
use crate::zoo::{construct_family, families, verify_lgg};
use crate::GroupHandle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cayley-lab",
    version,
    about = "Exact laboratory for finite Cayley graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    /// Accepted for reproducible property runs; engines ignore it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "inf")]
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArg {
    /// Group spec, e.g. cyclic:12, heis:7, symfp:n=4,p=5,variant=G.
    #[arg(short = 'g', long = "group")]
    pub group: String,
}

#[derive(Debug, Clone, Args)]
pub struct ProgressionArgs {
    /// Rank of the free nilpotent group.
    #[arg(short = 'r', long)]
    pub rank: usize,
    /// Nilpotency step.
    #[arg(short = 's', long)]
    pub step: usize,
    /// Side lengths, one per generator.
    #[arg(short = 'L', long = "lengths", value_delimiter = ',')]
    pub lengths: Vec<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ball and sphere sizes with doubling ratios.
    Grow {
        #[command(flatten)]
        g: GroupArg,
        /// Radius; defaults to the diameter for finite groups.
        #[arg(short = 'r', long)]
        radius: Option<usize>,
    },
    /// Diameter of the Cayley graph.
    Diam {
        #[command(flatten)]
        g: GroupArg,
    },
    /// Spectral gap of the Laplacian.
    Spectrum {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Cheeger constant, exact for small groups and bracketed otherwise.
    Cheeger {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
    },
    /// Convolution powers and mixing times.
    Mix {
        #[command(flatten)]
        g: GroupArg,
        /// Restrict the curve output to one norm.
        #[arg(long, value_enum)]
        p: Option<Norm>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Commutator lists and progressions in free nilpotent groups.
    #[command(subcommand)]
    Nilprog(NilprogCommand),
    /// The example families.
    #[command(subcommand)]
    Zoo(ZooCommand),
    /// Named verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum NilprogCommand {
    /// Basic commutators in the fixed order.
    Basis {
        #[arg(short = 'r', long)]
        rank: usize,
        #[arg(short = 's', long)]
        step: usize,
    },
    /// Generalised commutators with inverse letters.
    Gen {
        #[arg(short = 'r', long)]
        rank: usize,
        #[arg(short = 's', long)]
        step: usize,
    },
    /// Enumerate one progression.
    Enum {
        #[command(flatten)]
        prog: ProgressionArgs,
        #[arg(long, value_enum, default_value_t = KindArg::Nilpotent)]
        kind: KindArg,
    },
    /// Ordered ⊆ nilprogression ⊆ nilpotent ⊆ nilcomplete.
    Nest {
        #[command(flatten)]
        prog: ProgressionArgs,
    },
    /// Properness of the nilpotent progression.
    Proper {
        #[command(flatten)]
        prog: ProgressionArgs,
    },
    /// Power laws of the nilcomplete progression.
    Powers {
        #[command(flatten)]
        prog: ProgressionArgs,
        #[arg(short = 'n', long, default_value_t = 2)]
        n: u64,
        #[arg(short = 'M', long = "scale", default_value_t = 2)]
        scale: u64,
        #[arg(long, default_value_t = 8)]
        max_power: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ordered,
    Nilprogression,
    Nilpotent,
    Nilcomplete,
}

impl From<KindArg> for ProgressionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ordered => ProgressionKind::Ordered,
            KindArg::Nilprogression => ProgressionKind::Nilprogression,
            KindArg::Nilpotent => ProgressionKind::Nilpotent,
            KindArg::Nilcomplete => ProgressionKind::Nilcomplete,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ZooCommand {
    /// Families, parameter ranges and default generators.
    List,
    /// Diameters of the permutation-vector groups.
    Lgg {
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(short = 'p', long)]
        p: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Growth invariants, flatness, doubling window and Ruzsa covering.
    Growth {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Nesting of the four progression models.
    Nesting {
        #[command(flatten)]
        prog: ProgressionArgs,
    },
    /// Power laws of nilcomplete progressions.
    Powers {
        #[command(flatten)]
        prog: ProgressionArgs,
        #[arg(short = 'n', long, default_value_t = 2)]
        n: u64,
        #[arg(short = 'M', long = "scale", default_value_t = 2)]
        scale: u64,
    },
    /// Spectral gap, Cheeger constant, diameter and relaxation time.
    Spectral {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
        /// Inflates λ₁ before checking, to exercise the failure path.
        #[arg(long, hide = true)]
        falsify: bool,
    },
    /// The basic facts on mixing times.
    Mixing {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Lower bounds on the diameters of the permutation-vector groups.
    Lgg {
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(short = 'p', long)]
        p: u64,
    },
    /// Commutator depth in a Heisenberg group.
    Commdepth {
        #[arg(short = 'p', long)]
        p: u64,
    },
}

/// A finished pipeline: the report and the names of any failed checks.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub table: Option<Table>,
    pub failures: Vec<String>,
}

impl Outcome {
    fn of<T: Serialize>(report: &T) -> Result<Outcome> {
        Ok(Outcome {
            report: serde_json::to_value(report)?,
            table: None,
            failures: Vec::new(),
        })
    }

    fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    fn failing(mut self, failures: Vec<String>) -> Self {
        self.failures = failures;
        self
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }

    /// Serializes the report in `format`.
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_json(&self.report),
            Format::Csv => match &self.table {
                Some(t) => t.to_csv(),
                None => value_table(&self.report).to_csv(),
            },
            Format::Table => Ok(match &self.table {
                Some(t) => t.to_text(),
                None => value_table(&self.report).to_text(),
            }),
        }
    }
}

#[derive(Serialize)]
struct Suite<T: Serialize> {
    suite: &'static str,
    anchor: &'static str,
    holds: bool,
    failures: Vec<String>,
    report: T,
}

fn suite<T: Serialize>(
    name: &'static str,
    anchor: &'static str,
    failures: Vec<String>,
    report: T,
) -> Result<Outcome> {
    let s = Suite {
        suite: name,
        anchor,
        holds: failures.is_empty(),
        failures: failures.clone(),
        report,
    };
    Ok(Outcome::of(&s)?.failing(failures))
}

fn graph_of(spec: &str) -> Result<CayleyGraph> {
    construct_family(spec)?.graph()
}

fn solver(choice: SolverArg) -> SolverChoice {
    match choice {
        SolverArg::Auto => SolverChoice::Auto,
        SolverArg::Dense => SolverChoice::Dense,
        SolverArg::Iterative => SolverChoice::Iterative,
    }
}

fn free_spec(kind: ProgressionKind, p: &ProgressionArgs) -> Result<ProgressionSpec> {
    ProgressionSpec::free(kind, p.rank, p.step, &p.lengths)
}

fn profile_of(spec: &str, radius: Option<usize>) -> Result<GrowthProfile> {
    let f = construct_family(spec)?;
    let profile = ball_growth(&f.group, &f.generators, radius)?;
    if profile.truncated {
        return Err(LabError::Refused {
            what: format!("ball enumeration of {spec}"),
            size: profile.group_order.unwrap_or(u128::MAX),
            cap: crate::group::order_cap(),
        });
    }
    Ok(profile)
}

fn commutator_table(list: &crate::nilprog::CommutatorList, rank: usize) -> Table {
    let mut t = Table::new(&["index", "commutator", "weight"]);
    for (i, c) in list.items.iter().enumerate() {
        let w: Vec<String> = c
            .weight_vector(rank)
            .iter()
            .map(|x| x.to_string())
            .collect();
        t.push(vec![(i + 1).to_string(), c.to_string(), w.join(" ")]);
    }
    t
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Grow { g, radius } => {
            let profile = profile_of(&g.group, *radius)?;
            profile.check_invariants()?;
            let table = profile.table();
            Ok(Outcome::of(&profile)?.with_table(table))
        }
        Command::Diam { g } => {
            let graph = graph_of(&g.group)?;
            let d = graph.diameter();
            let mut t = Table::new(&["diameter"]);
            t.push(vec![d.to_string()]);
            Ok(Outcome::of(&json!({ "group": g.group, "order": graph.order(), "k": graph.degree(), "diameter": d }))?
                .with_table(t))
        }
        Command::Spectrum { g, solver: s, tol } => {
            let graph = graph_of(&g.group)?;
            let rep = lambda1_with(&Laplacian::of(&graph), *tol, solver(*s))?;
            Outcome::of(&rep)
        }
        Command::Cheeger { g, exact_cap } => {
            let graph = graph_of(&g.group)?;
            Outcome::of(&cheeger(&graph, *exact_cap)?)
        }
        Command::Mix { g, p, n_max } => {
            let graph = graph_of(&g.group)?;
            let rep = mixing_times_with(&graph, *n_max)?;
            let cols: Vec<(&str, &Vec<f64>)> = match p {
                Some(Norm::One) => vec![("d1", &rep.curves.d1)],
                Some(Norm::Two) => vec![("d2", &rep.curves.d2)],
                Some(Norm::Inf) => vec![("dinf", &rep.curves.dinf)],
                None => vec![
                    ("d1", &rep.curves.d1),
                    ("d2", &rep.curves.d2),
                    ("dinf", &rep.curves.dinf),
                ],
            };
            let mut header = vec!["n"];
            header.extend(cols.iter().map(|c| c.0));
            let mut t = Table::new(&header);
            for n in 0..rep.curves.len() {
                let mut row = vec![n.to_string()];
                row.extend(cols.iter().map(|c| fmt_f64(c.1[n])));
                t.push(row);
            }
            Ok(Outcome::of(&rep)?.with_table(t))
        }
        Command::Nilprog(n) => nilprog(n),
        Command::Zoo(ZooCommand::List) => {
            let fams = families();
            let mut t = Table::new(&["family", "example", "parameters", "generators"]);
            for f in &fams {
                t.push(vec![
                    f.family.into(),
                    f.example.into(),
                    f.parameters.into(),
                    f.generators.into(),
                ]);
            }
            Ok(Outcome::of(&fams)?.with_table(t))
        }
        Command::Zoo(ZooCommand::Lgg { n, p }) => Outcome::of(&verify_lgg(*n, *p)?),
        Command::Verify(v) => verify(v),
    }
}

fn nilprog(cmd: &NilprogCommand) -> Result<Outcome> {
    match cmd {
        NilprogCommand::Basis { rank, step } => {
            let list = hall_basis(*rank, *step)?;
            let names: Vec<String> = list.items.iter().map(|c| c.to_string()).collect();
            Ok(Outcome::of(&json!({ "rank": rank, "step": step, "basis": names, "weight_counts": list.weight_counts() }))?
                .with_table(commutator_table(&list, *rank)))
        }
        NilprogCommand::Gen { rank, step } => {
            let list = generalised_commutators(*rank, *step)?;
            let names: Vec<String> = list.items.iter().map(|c| c.to_string()).collect();
            Ok(
                Outcome::of(&json!({ "rank": rank, "step": step, "commutators": names }))?
                    .with_table(commutator_table(&list, *rank)),
            )
        }
        NilprogCommand::Enum { prog, kind } => {
            let set = enumerate_progression(&free_spec((*kind).into(), prog)?)?;
            Outcome::of(&json!({
                "kind": set.kind.name(),
                "cardinality": set.len(),
                "box_size": set.box_size.map(|b| b.to_string()),
                "proper": set.proper,
            }))
        }
        NilprogCommand::Nest { prog } => {
            let rep = verify_nesting(&free_spec(ProgressionKind::Ordered, prog)?)?;
            let failures = containment_failures(&rep.containments);
            Ok(Outcome::of(&rep)?.failing(failures))
        }
        NilprogCommand::Proper { prog } => {
            let rep = verify_properness(&free_spec(ProgressionKind::Nilpotent, prog)?)?;
            Outcome::of(&rep)
        }
        NilprogCommand::Powers {
            prog,
            n,
            scale,
            max_power,
        } => {
            let rep = verify_power_laws(
                &free_spec(ProgressionKind::Nilcomplete, prog)?,
                *n,
                *scale,
                *max_power,
            )?;
            let mut failures = containment_failures(&rep.containments);
            if !rep.cover_verified {
                failures.push("cover certificate".into());
            }
            Ok(Outcome::of(&rep)?.failing(failures))
        }
    }
}

fn containment_failures(cs: &[crate::nilprog::Containment]) -> Vec<String> {
    cs.iter()
        .filter(|c| !c.holds)
        .map(|c| format!("{} ⊆ {}", c.lhs, c.rhs))
        .collect()
}

fn verify(cmd: &VerifyCommand) -> Result<Outcome> {
    match cmd {
        VerifyCommand::Growth { g, eps, delta } => {
            let f = construct_family(&g.group)?;
            let profile = profile_of(&g.group, None)?;
            let mut failures = Vec::new();
            if let Err(e) = profile.check_invariants() {
                failures.push(e.to_string());
            }
            let flat = flatness(&profile)?;
            if !flat.freiman_holds {
                failures.push("diameter at most 2(|G|/k)^(7/4)".into());
            }
            let window = doubling_window(&profile, *eps, *delta)?;
            if window.flat && !window.empty && window.scale.is_none() {
                failures.push("doubling at some scale in the window".into());
            }
            let witness = approximate_group_witness(&f.group, &f.generators, 1)?;
            if !(witness.disjoint && witness.covers && witness.within_bound) {
                failures.push("Ruzsa covering at n = 1".into());
            }
            let scan = doubling_scan(&profile)?;
            suite(
                "growth",
                "ball growth invariants; almost-flat groups double at some scale; Ruzsa covering",
                failures,
                json!({ "profile": profile, "flatness": flat, "window": window, "ruzsa": witness, "scan": scan }),
            )
        }
        VerifyCommand::Nesting { prog } => {
            let rep = verify_nesting(&free_spec(ProgressionKind::Ordered, prog)?)?;
            let failures = containment_failures(&rep.containments);
            suite(
                "nesting",
                "ordered ⊆ nilprogression ⊆ nilpotent ⊆ nilcomplete progression",
                failures,
                rep,
            )
        }
        VerifyCommand::Powers { prog, n, scale } => {
            let rep = verify_power_laws(
                &free_spec(ProgressionKind::Nilcomplete, prog)?,
                *n,
                *scale,
                8,
            )?;
            let mut failures = containment_failures(&rep.containments);
            if !rep.cover_verified {
                failures.push("cover certificate".into());
            }
            suite(
                "powers",
                "power laws of nilcomplete progressions",
                failures,
                rep,
            )
        }
        VerifyCommand::Spectral {
            g,
            exact_cap,
            falsify,
        } => {
            let graph = graph_of(&g.group)?;
            let lap = Laplacian::of(&graph);
            let mut spectrum = lambda1_with(&lap, 1e-10, SolverChoice::Auto)?;
            let h = cheeger(&graph, *exact_cap)?;
            if *falsify {
                spectrum.lambda1 *= 100.0;
            }
            let chain = chain_from(&graph, spectrum, h);
            let failures = chain.violations().iter().map(|i| i.name.clone()).collect();
            suite(
                "spectral",
                "spectral gap, Cheeger constant and diameter chain; Cheeger-Buser; diameter versus expansion",
                failures,
                chain,
            )
        }
        VerifyCommand::Mixing { g, n_max } => {
            let graph = graph_of(&g.group)?;
            let rep = mixing_times_with(&graph, *n_max)?;
            let v = check_items(rep);
            let failures = v
                .items
                .iter()
                .filter(|i| i.status == ItemStatus::Violated)
                .map(|i| format!("item {}: {}", i.item, i.name))
                .collect();
            suite("mixing", "basic facts on mixing times", failures, v)
        }
        VerifyCommand::Lgg { n, p } => {
            let rep = verify_lgg(*n, *p)?;
            let mut failures: Vec<String> = rep
                .lower_bounds
                .iter()
                .filter(|b| !b.holds)
                .map(|b| b.name.to_string())
                .collect();
            if !rep.c_holds {
                failures.push("(gamma - np)/n^2 <= 8".into());
            }
            if !rep.schreier.holds() {
                failures.push("Reidemeister-Schreier contract".into());
            }
            suite(
                "lgg",
                "diameters of Sym(n) acting on F_p^n and its subgroups",
                failures,
                rep,
            )
        }
        VerifyCommand::Commdepth { p } => {
            let g = GroupHandle::from_text(&format!("heis:{p}"))?;
            let x = unitriangular_element(3, &[(0, 1, 1)], *p);
            let y = unitriangular_element(3, &[(1, 2, 1)], *p);
            let spec = ProgressionSpec::new(
                ProgressionKind::Nilprogression,
                g.clone(),
                vec![x, y],
                &[1, 1],
                2,
            )?;
            let set = enumerate_progression(&spec)?.set;
            let d = commutator_depth(&g, &set)?;
            let mut failures = Vec::new();
            if d.m as f64 > 10.0 * (d.gamma as f64).sqrt() {
                failures.push("m <= 10 sqrt(gamma)".into());
            }
            suite(
                "commdepth",
                "small commutators: [G,G] inside a bounded power of a progression",
                failures,
                d,
            )
        }
    }
}

/// Parses `args`, runs the command and returns the rendered report and exit code.
pub fn run_captured<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return if code == EXIT_OK {
                (e.to_string(), String::new(), code)
            } else {
                (String::new(), e.to_string(), code)
            };
        }
    };
    let common = cli.common.clone();
    let result = with_workers(common.workers, || execute(&cli.command));
    match result.and_then(|o| Ok((o.render(common.format)?, o))) {
        Ok((text, outcome)) => {
            let code = outcome.exit_code();
            let err = if code == EXIT_OK {
                String::new()
            } else {
                format!("check failed: {}\n", outcome.failures.join("; "))
            };
            match &common.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => (String::new(), err, code),
                    Err(e) => (String::new(), error_fragment(&e.into()), EXIT_FAILED),
                },
                None => (text, err, code),
            }
        }
        Err(e) => (String::new(), error_fragment(&e), e.exit_code()),
    }
}

fn error_fragment(e: &LabError) -> String {
    let v = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
    to_json(&v).unwrap_or_else(|_| format!("{e}\n"))
}

/// Entry point for the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (out, err, code) = run_captured(args);
    print!("{out}");
    eprint!("{err}");
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diam_cyclic() {
        let (out, _, code) = run_captured(["cayley-lab", "diam", "-g", "cyclic:12"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1).unwrap().trim(), "6");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_captured(["cayley-lab", "diam", "-g", "cyclc:12"]).2,
            EXIT_USAGE
        );
        assert_eq!(run_captured(["cayley-lab", "frobnicate"]).2, EXIT_USAGE);
        assert_eq!(
            run_captured(["cayley-lab", "diam", "-g", "freenil:r=2,s=2"]).2,
            EXIT_USAGE
        );
        assert_eq!(
            run_captured(["cayley-lab", "verify", "spectral", "-g", "cyclic:12"]).2,
            EXIT_OK
        );
        let (_, err, code) = run_captured([
            "cayley-lab",
            "verify",
            "spectral",
            "-g",
            "cyclic:12",
            "--falsify",
        ]);
        assert_eq!(code, EXIT_FAILED);
        assert!(err.contains("check failed"));
    }
}
