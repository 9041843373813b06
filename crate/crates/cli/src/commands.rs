use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use pfqn::basis::{is_complete_orthonormal, is_unambiguous, is_weakly_unambiguous, repair_rotation};
use pfqn::catalog::{self, CatalogEntry, EntryKind};
use pfqn::causality::{
    best_causal_value_capped, causal_bound, classify_with, swap_value_capped, GameValue, Verdict,
};
use pfqn::correspondence::{basis_to_pf, classify_basis, default_unitaries, pf_to_basis};
use pfqn::linalg::DEFAULT_TOL;
use pfqn::validate::{Validator, ValidityReport, DEFAULT_CAP};
use pfqn::ProcessTable;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::docs::{labels_to_docs, BasisDocument, PfDocument, UnitariesDocument};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "pfqn", version, about = "Process functions and unambiguous product bases")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Global {
    /// Tolerance for orthogonality and phase-equality tests [default: 1e-9]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest number of joint interventions an exhaustive scan may visit
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Process tables
    #[command(subcommand)]
    Pf(PfCommand),
    /// Product bases
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Built-in reference instances
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Recursive,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum PfCommand {
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    Classify {
        file: PathBuf,
    },
    Game {
        file: PathBuf,
    },
    ToBasis {
        file: PathBuf,
        /// Unitary family; defaults to the seeded standard family
        #[arg(long)]
        unitaries: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BasisCommand {
    Check { file: PathBuf },
    ToPf { file: PathBuf },
    Classify { file: PathBuf },
    Repair { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    List,
    Show {
        name: String,
        /// Write the entry's documents into this directory
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// Result of a subcommand: the JSON payload and its human rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub text: String,
}

impl Output {
    fn document<T: Serialize>(doc: &T) -> Self {
        let json = to_value(doc);
        let text = serde_json::to_string_pretty(&json).expect("serializable");
        Self { json, text }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable"),
            Format::Text => self.text.clone(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: display.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: display,
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn fraction(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn tol(&self, doc: Option<f64>) -> f64 {
        self.global.tol.or(doc).unwrap_or(DEFAULT_TOL)
    }

    fn validator(&self) -> Validator {
        Validator::with_cap(self.global.cap)
    }

    fn table(&self, path: &Path) -> Result<ProcessTable, CliError> {
        read_json::<PfDocument>(path)?.to_table()
    }

    fn basis(&self, path: &Path) -> Result<(pfqn::ProductBasis, f64), CliError> {
        let doc: BasisDocument = read_json(path)?;
        let tol = self.tol(doc.tol);
        Ok((doc.to_basis()?, tol))
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let ctx = Ctx {
        global: cli.global.clone(),
    };
    match &cli.command {
        Command::Pf(c) => pf(&ctx, c),
        Command::Basis(c) => basis(&ctx, c),
        Command::Catalog(c) => catalog_cmd(c),
    }
}

fn report_line(r: &ValidityReport) -> String {
    let mut s = format!(
        "{:?}: {} ({} interventions, {} nodes)",
        r.method,
        if r.valid { "valid" } else { "invalid" },
        r.stats.interventions,
        r.stats.nodes
    )
    .to_lowercase();
    if let Some(w) = &r.witness {
        s += &format!(
            "\n  witness maps {:?} give {} fixed points {:?}",
            w.intervention.maps,
            w.fixed_points.len(),
            w.fixed_points
        );
    }
    if let Some(f) = &r.failure {
        s += &format!("\n  failing reduction path {:?}: {:?}", f.path, f.cause);
    }
    if r.fallback_used {
        s += "\n  exhaustive fallback used at a node without injective maps";
    }
    s
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = format!(
        "validity: {:?}\ncausality: {:?}\nglobal past: {}\ngenuinely non-causal: {}\nconstant-input parties: {:?}",
        v.validity,
        v.causality,
        yes(v.has_global_past),
        yes(v.genuinely_non_causal),
        v.constant_input_parties
    );
    match &v.causal_witness {
        Some(w) if w.no_constant_input() => s += "\nno party has a constant input",
        Some(w) => s += &format!("\nno constant input after output reductions {:?}", w.path),
        None => {}
    }
    if let Some(w) = &v.validity_witness {
        s += &format!("\nwitness maps {:?}, fixed points {:?}", w.intervention.maps, w.fixed_points);
    }
    s + &format!("\ncross-check: {:?}", v.cross_check)
}

fn pf(ctx: &Ctx, c: &PfCommand) -> Result<Output, CliError> {
    match c {
        PfCommand::Validate { file, method } => {
            let w = ctx.table(file)?;
            let v = ctx.validator();
            let brute = match method {
                MethodArg::Brute | MethodArg::Both => Some(v.bruteforce(&w)?),
                MethodArg::Recursive => None,
            };
            let rec = match method {
                MethodArg::Recursive | MethodArg::Both => Some(v.recursive(&w)?),
                MethodArg::Brute => None,
            };
            let valid = brute.as_ref().or(rec.as_ref()).map(|r| r.valid).expect("one method ran");
            let agree = match (&brute, &rec) {
                (Some(b), Some(r)) => Some(b.valid == r.valid),
                _ => None,
            };
            let text = [&brute, &rec]
                .into_iter()
                .flatten()
                .map(report_line)
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                json: json!({
                    "valid": valid,
                    "agree": agree,
                    "bruteforce": brute,
                    "recursive": rec,
                }),
                text,
            })
        }
        PfCommand::Classify { file } => {
            let v = classify_with(&ctx.table(file)?, &ctx.validator())?;
            Ok(Output {
                json: to_value(&v),
                text: verdict_text(&v),
            })
        }
        PfCommand::Game { file } => {
            let w = ctx.table(file)?;
            let i_sizes: Vec<usize> = w.shapes().iter().map(|s| s.i_size).collect();
            let bound = causal_bound(&i_sizes);
            let GameValue { value, strategy } = best_causal_value_capped(&w, ctx.global.cap)?;
            let swap = swap_value_capped(&w, ctx.global.cap)?;
            Ok(Output {
                json: json!({
                    "causal_bound": fraction(bound),
                    "best_causal_value": fraction(value),
                    "swap_value": fraction(swap),
                    "strategy": strategy,
                }),
                text: format!(
                    "causal bound: {}\nbest causal value: {}\nswap value: {}",
                    fraction(bound),
                    fraction(value),
                    fraction(swap)
                ),
            })
        }
        PfCommand::ToBasis { file, unitaries } => {
            let w = ctx.table(file)?;
            let tol = ctx.tol(None);
            let u = match unitaries {
                Some(p) => read_json::<UnitariesDocument>(p)?.to_family(tol)?,
                None => default_unitaries(w.shapes(), ctx.global.seed)?,
            };
            let s = pf_to_basis(&w, &u, tol)?;
            Ok(Output::document(&BasisDocument::from_basis(&s, ctx.global.tol)))
        }
    }
}

fn witnesses_text(ws: &[pfqn::basis::AmbiguityWitness]) -> String {
    ws.iter()
        .map(|w| {
            format!(
                "\n  party {}: local vector of state {} ({:?})",
                w.party, w.state, w.kind
            )
        })
        .collect()
}

fn basis(ctx: &Ctx, c: &BasisCommand) -> Result<Output, CliError> {
    match c {
        BasisCommand::Check { file } => {
            let (s, tol) = ctx.basis(file)?;
            let completeness = is_complete_orthonormal(&s, tol);
            let (unambiguous, witnesses) = if completeness.complete {
                let r = is_unambiguous(&s, tol)?;
                (Some(r.unambiguous), r.witnesses)
            } else {
                (None, vec![])
            };
            let weak = match &s.labels {
                Some(_) if completeness.complete => Some(is_weakly_unambiguous(&s, tol)?),
                _ => None,
            };
            let mut text = format!(
                "complete: {} ({} of {} states, deviation {:e})",
                yes(completeness.complete),
                completeness.count,
                completeness.expected,
                completeness.max_deviation
            );
            if let Some(u) = unambiguous {
                text += &format!("\nunambiguous: {}{}", yes(u), witnesses_text(&witnesses));
            }
            if let Some(w) = &weak {
                text += &format!("\nweakly unambiguous: {}", yes(w.weakly_unambiguous));
                if let Some((j, l)) = w.exclusivity_violation {
                    text += &format!("\n  states {j} and {l} are not exclusive");
                }
            }
            Ok(Output {
                json: json!({
                    "complete": completeness.complete,
                    "completeness": completeness,
                    "unambiguous": unambiguous,
                    "weakly_unambiguous": weak.as_ref().map(|w| w.weakly_unambiguous),
                    "weak": weak,
                    "witnesses": witnesses,
                }),
                text,
            })
        }
        BasisCommand::ToPf { file } => {
            let (s, tol) = ctx.basis(file)?;
            let (w, labels) = basis_to_pf(&s, tol)?;
            let doc = PfDocument::from_table(&w);
            let labels = labels_to_docs(&labels);
            Ok(Output::document(&json!({ "pf": doc, "labels": labels })))
        }
        BasisCommand::Classify { file } => {
            let (s, tol) = ctx.basis(file)?;
            let v = classify_basis(&s, tol)?;
            let mut text = format!("kind: {:?}", v.kind);
            if let Some(pv) = &v.pf_verdict {
                text += &format!("\n{}", verdict_text(pv));
            }
            text += &witnesses_text(&v.witnesses);
            let json = json!({
                "kind": v.kind,
                "completeness": v.completeness,
                "derived_pf": v.derived_pf.as_ref().map(PfDocument::from_table),
                "labels": v.labels.as_ref().map(labels_to_docs),
                "pf_verdict": v.pf_verdict,
                "witnesses": v.witnesses,
            });
            Ok(Output { json, text })
        }
        BasisCommand::Repair { file } => {
            let (s, tol) = ctx.basis(file)?;
            let r = repair_rotation(&s, ctx.global.seed, tol)?;
            Ok(Output::document(&BasisDocument::from_basis(&r, ctx.global.tol)))
        }
    }
}

fn kind_name(k: EntryKind) -> &'static str {
    match k {
        EntryKind::Pf => "pf",
        EntryKind::Basis => "basis",
        EntryKind::Labeling => "labeling",
        EntryKind::Unitaries => "unitaries",
    }
}

fn expected_json(e: &CatalogEntry) -> Value {
    let x = &e.expected;
    json!({
        "validity": x.validity,
        "causality": x.causality,
        "constant_input_parties": x.constant_inputs,
        "best_causal_value": x.best_causal.map(fraction),
        "basis_kind": x.basis_kind,
        "weakly_unambiguous": x.weakly_unambiguous,
        "labelled_validity": x.labelled_validity,
    })
}

fn catalog_cmd(c: &CatalogCommand) -> Result<Output, CliError> {
    match c {
        CatalogCommand::List => {
            let entries: Vec<CatalogEntry> =
                catalog::list().into_iter().map(catalog::get).collect::<Result<_, _>>()?;
            let json = entries
                .iter()
                .map(|e| json!({ "name": e.name, "kind": kind_name(e.kind), "provenance": e.provenance }))
                .collect();
            let text = entries
                .iter()
                .map(|e| format!("{:<18} {:<10} {}", e.name, kind_name(e.kind), e.provenance))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                json: Value::Array(json),
                text,
            })
        }
        CatalogCommand::Show { name, export } => {
            let e = catalog::get(name)?;
            let pf = e.table.as_ref().map(PfDocument::from_table);
            let basis = e.basis.as_ref().map(|b| BasisDocument::from_basis(b, None));
            let unitaries = e.unitaries.as_ref().map(UnitariesDocument::from_family);
            let mut written = vec![];
            if let Some(dir) = export {
                fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
                let mut put = |suffix: &str, doc: Value| -> Result<(), CliError> {
                    let path = dir.join(format!("{}.{suffix}.json", e.name));
                    write_json(&path, &doc)?;
                    written.push(path.display().to_string());
                    Ok(())
                };
                if let Some(d) = &pf {
                    put("pf", to_value(d))?;
                }
                if let Some(d) = &basis {
                    put("basis", to_value(d))?;
                }
                if let Some(d) = &unitaries {
                    put("unitaries", to_value(d))?;
                }
            }
            let mut text = format!(
                "{} ({})\n{}",
                e.name,
                kind_name(e.kind),
                e.provenance
            );
            if let Some(d) = &pf {
                text += &format!("\ntable: {} parties, {} rows", d.parties.len(), d.table.len());
            }
            if let Some(d) = &basis {
                text += &format!("\nbasis: dims {:?}, {} states", d.dims, d.states.len());
            }
            for path in &written {
                text += &format!("\nwrote {path}");
            }
            Ok(Output {
                json: json!({
                    "name": e.name,
                    "kind": kind_name(e.kind),
                    "provenance": e.provenance,
                    "expected": expected_json(&e),
                    "pf": pf,
                    "basis": basis,
                    "unitaries": unitaries,
                    "written": written,
                }),
                text,
            })
        }
    }
}
