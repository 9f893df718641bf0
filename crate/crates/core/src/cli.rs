//! Command-line front end. [`run`] produces the full output as a string so
//! that it can be tested without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::autgroup::{brute_force_automorphisms, verify_product_formula};
use crate::group_spec::TowerGroupSpec;
use crate::lattice::Lattice;
use crate::perm_oracle::{concrete_lattice, differential_validate, lemma_lattices, ConcreteGroup};
use crate::tower::{run_tower, TowerNode};
use crate::{Bounds, Error};

#[derive(Debug, Parser)]
#[command(
    name = "lattower",
    version,
    about = "Normal subgroup lattices of products of symmetric groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Group literal such as `S4^2*S3^2`.
    #[arg(long, global = true)]
    pub spec: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Largest group order the permutation oracle will build.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_order: Option<u64>,

    /// Largest number of factors accepted for enumeration.
    #[arg(long = "max-T", global = true, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub max_t: Option<u64>,

    /// Largest lattice the automorphism search will accept.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_lattice: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Census of N(G); `--elements` or JSON lists every element.
    Enumerate {
        #[arg(long)]
        elements: bool,
    },
    /// Compare the brute-force lattice automorphism group with S_{a4} x S_B.
    Aut,
    /// Run the LatAut tower to the trivial group.
    Tower,
    /// Check the enumeration against concrete permutation groups.
    OracleDiff,
    /// Hasse diagram of N(G) or of a lemma lattice such as `C2^2`.
    Hasse {
        #[arg(long, conflicts_with = "spec")]
        lemma: Option<String>,
    },
    /// Automorphism counts of the small lattices used by the tower.
    Lemmas,
}

/// Rendered output plus an optional failure that still has something to show.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub failure: Option<Error>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            output,
            failure: None,
        }
    }
}

impl Cli {
    pub fn bounds(&self) -> Bounds {
        let mut b = Bounds::default();
        if let Some(v) = self.max_order {
            b.max_order = v.into();
        }
        if let Some(v) = self.max_t {
            b.max_slots = v as usize;
        }
        if let Some(v) = self.max_lattice {
            b.max_lattice = v as usize;
        }
        b
    }

    fn spec(&self) -> Result<TowerGroupSpec, Error> {
        let literal = self
            .spec
            .as_deref()
            .ok_or_else(|| Error::Usage("--spec is required".into()))?;
        Ok(TowerGroupSpec::parse_with_max_degree(
            literal,
            self.bounds().max_degree,
        )?)
    }

    fn reject_dot(&self) -> Result<(), Error> {
        if self.format == Format::Dot {
            return Err(Error::Usage(
                "--format dot is only available for hasse".into(),
            ));
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let bounds = cli.bounds();
    match &cli.command {
        Command::Enumerate { elements } => {
            cli.reject_dot()?;
            let lattice = Lattice::enumerate_bounded(&cli.spec()?, bounds.max_slots)?;
            if cli.format == Format::Json {
                let hasse = lattice.to_abstract().hasse_edges();
                return json(&lattice.export(&hasse)).map(Outcome::ok);
            }
            let mut out = format!("{}\n", lattice.census());
            if *elements {
                for (i, e) in lattice.elements().iter().enumerate() {
                    let t = &e.triple;
                    let positions: Vec<String> = t
                        .positions()
                        .iter()
                        .map(|(s, p)| format!("{s}:{}", p.as_str()))
                        .collect();
                    let _ = writeln!(
                        out,
                        "{i} {} order={} J={:?} P={{{}}} H={}",
                        e.family.label(),
                        e.order,
                        t.coupled(),
                        positions.join(","),
                        t.signs()
                    );
                }
            }
            Ok(Outcome::ok(out))
        }
        Command::Aut => {
            cli.reject_dot()?;
            let spec = cli.spec()?;
            let report = verify_product_formula(&spec, bounds.max_slots, bounds.max_lattice)?;
            let output = match cli.format {
                Format::Json => json(&report)?,
                _ => format!(
                    "{}: |LatAut| = {} (brute force), {} (constructive), {}!*{}! = {} (predicted){}\ngenerators: {}\n",
                    report.spec,
                    report.brute_force_order,
                    report.constructive_order,
                    spec.a4(),
                    spec.b(),
                    report.predicted_order,
                    if report.matches { ", ok" } else { ", MISMATCH" },
                    if report.generators.is_empty() { "none".to_string() } else { report.generators.join(" ") },
                ),
            };
            let failure = (!report.matches).then(|| {
                Error::Mismatch(format!("automorphism counts disagree for {}", report.spec))
            });
            Ok(Outcome { output, failure })
        }
        Command::Tower => {
            cli.reject_dot()?;
            let run = run_tower(TowerNode::Start(cli.spec()?))?;
            match cli.format {
                Format::Json => json(&run).map(Outcome::ok),
                _ => Ok(Outcome::ok(run.format_line() + "\n")),
            }
        }
        Command::OracleDiff => {
            cli.reject_dot()?;
            let spec = cli.spec()?;
            let report = differential_validate(&spec, bounds.max_order, bounds.max_slots)?;
            let output = if report.is_ok() && cli.format == Format::Text {
                format!(
                    "ok {}: {} = {} normal subgroups, {} pairs agree\n",
                    report.spec, report.concrete_count, report.lattice_count, report.pairs_checked
                )
            } else {
                json(&report)?
            };
            let failure = report.ensure_ok().err().map(Error::from);
            Ok(Outcome { output, failure })
        }
        Command::Hasse { lemma } => {
            let (name, lattice, labels) = match lemma {
                Some(name) => {
                    let group = ConcreteGroup::parse(name, bounds.max_order)?;
                    let subgroups = group.all_normal_subgroups();
                    let labels = subgroups
                        .iter()
                        .map(|n| format!("normal:{}", n.order()))
                        .collect();
                    (name.clone(), concrete_lattice(&subgroups), labels)
                }
                None => {
                    let spec = cli.spec()?;
                    let lattice = Lattice::enumerate_bounded(&spec, bounds.max_slots)?;
                    let labels = lattice
                        .elements()
                        .iter()
                        .map(|e| format!("{}:{}", e.family.label(), e.order))
                        .collect();
                    (spec.to_string(), lattice.to_abstract(), labels)
                }
            };
            if lattice.len() > bounds.max_lattice {
                return Err(crate::autgroup::AutError::TooLarge {
                    elements: lattice.len(),
                    max: bounds.max_lattice,
                }
                .into());
            }
            if cli.format == Format::Json {
                #[derive(Serialize)]
                struct Hasse {
                    name: String,
                    labels: Vec<String>,
                    edges: Vec<(usize, usize)>,
                }
                let edges = lattice.hasse_edges();
                return json(&Hasse {
                    name,
                    labels,
                    edges,
                })
                .map(Outcome::ok);
            }
            Ok(Outcome::ok(lattice.to_dot(&name, &labels)))
        }
        Command::Lemmas => {
            cli.reject_dot()?;
            #[derive(Serialize)]
            struct Row {
                name: String,
                elements: usize,
                automorphisms: usize,
            }
            let mut rows = Vec::new();
            for n in 3..=6u32 {
                let spec = TowerGroupSpec::from_degrees(&[n])?;
                let lattice = Lattice::enumerate(&spec)?.to_abstract();
                let autos = brute_force_automorphisms(&lattice, bounds.max_lattice)?;
                rows.push(Row {
                    name: spec.to_string(),
                    elements: lattice.len(),
                    automorphisms: autos.len(),
                });
            }
            for (name, lattice) in lemma_lattices() {
                let autos = brute_force_automorphisms(&lattice, bounds.max_lattice)?;
                rows.push(Row {
                    name,
                    elements: lattice.len(),
                    automorphisms: autos.len(),
                });
            }
            match cli.format {
                Format::Json => json(&rows).map(Outcome::ok),
                _ => Ok(Outcome::ok(
                    rows.iter()
                        .map(|r| {
                            let unit = if r.automorphisms == 1 {
                                "automorphism"
                            } else {
                                "automorphisms"
                            };
                            format!(
                                "{}: {} elements, {} {unit}\n",
                                r.name, r.elements, r.automorphisms
                            )
                        })
                        .collect(),
                )),
            }
        }
    }
}

/// Parses `args`, runs the command, writes the output, and returns the exit
/// status. Errors go to stderr as a single line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "error: {}",
                msg.lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
            );
            return 2;
        }
    };
    let outcome = run(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => std::fs::write(path, &o.output)?,
            None => print!("{}", o.output),
        }
        Ok(o)
    });
    let failure = match outcome {
        Ok(o) => o.failure,
        Err(e) => Some(e),
    };
    match failure {
        None => 0,
        Some(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}
