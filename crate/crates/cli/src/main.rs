use std::fs;
use std::process::ExitCode;

use bdk2::bd::{bd_baer_sum, bd_morphisms, first_invariant, second_invariant, third_invariant_solve, BDTriple};
use bdk2::fields::{Field, Place};
use bdk2::ktheory::{symbol_coordinates, tame_symbol};
use bdk2::lattice::{matrix_from_rows, BilinearIncarnation, RootDatum};
use bdk2::presets::{names, preset};
use bdk2::residue_functors::{decide_integral_model, residual_extension, sign_incarnation, val_bd};
use bdk2::schema::{
    from_json, to_json, CochainJson, CoordJson, ExtensionJson, EzJson, IncarnationJson, ModelReportJson,
    QuadraticFormJson, ResidualJson, RootDatumJson, SymbolJson, TripleJson,
};
use bdk2::verify;
use bdk2::{Error, Result};
use clap::{ArgAction, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bdk2",
    version,
    about = "Invariants of K2-central extensions of tori and reductive groups"
)]
struct Cli {
    /// Exit with status 1 when the answer is an obstruction.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tame coordinates of the symbol {u, v}.
    Symbol {
        #[arg(long, default_value = "F5t")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Print only the coordinate at this place.
        #[arg(long)]
        place: Option<String>,
    },
    /// The incarnation C with its form Q and extension D_C.
    Incarnate {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "F5t")]
        field: String,
    },
    /// The triple (Q, D, f) of an incarnation on a root datum.
    Invariants {
        /// `presets:NAME` or a root datum JSON file.
        #[arg(long)]
        root_datum: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "F5t")]
        field: String,
    },
    /// Baer sum of two triples.
    BaerSum {
        /// Given twice.
        #[arg(long, required = true, action = ArgAction::Append)]
        triple: Vec<String>,
    },
    /// A morphism between two triples, or the reason there is none.
    Morphism {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The residual extension at a place.
    Residual {
        #[arg(long)]
        triple: String,
        #[arg(long, default_value = "t")]
        place: String,
        /// Incarnation to use instead of the sign terms of D.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// The valuation image of a triple at a place.
    Val {
        #[arg(long)]
        triple: String,
        #[arg(long, default_value = "t")]
        place: String,
    },
    /// Decide whether a triple has an integral model at a place.
    DecideModel {
        #[arg(long)]
        triple: String,
        #[arg(long, default_value = "t")]
        place: String,
    },
    /// Run seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
    /// List presets, or print one as JSON.
    Presets { name: Option<String> },
}

enum Outcome {
    Done,
    Obstructed,
    Failed,
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(path, e.to_string()))
}

fn load_triple(path: &str) -> Result<BDTriple> {
    from_json::<TripleJson>(&read(path)?)?.build()
}

fn load_root_datum(source: &str) -> Result<RootDatum> {
    match source.strip_prefix("presets:") {
        Some(name) => preset(name),
        None => from_json::<RootDatumJson>(&read(source)?)?.build(),
    }
}

fn parse_matrix(s: &str, rd: Option<&RootDatum>) -> Result<BilinearIncarnation> {
    let rows: Vec<Vec<i64>> = from_json(s)?;
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::parse(
            format!("{r:?}"),
            format!("matrix rows must have length {n}"),
        ));
    }
    let lattice = match rd {
        Some(rd) => rd.y_lattice().clone(),
        None => bdk2::lattice::Lattice::new(n, "Y"),
    };
    if lattice.rank() != n {
        return Err(Error::parse(s, format!("expected a {0}×{0} matrix", lattice.rank())));
    }
    BilinearIncarnation::new(lattice, matrix_from_rows(&rows, n)?)
}

fn emit(value: &impl serde::Serialize) {
    print!("{}", to_json(value));
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Symbol { field, u, v, place } => {
            let f = Field::parse(&field)?;
            let (u, v) = (f.parse_element(&u)?, f.parse_element(&v)?);
            match place {
                Some(place) => {
                    let place = f.parse_place(&place)?;
                    let value = tame_symbol(&u, &v, &place)?;
                    emit(&CoordJson {
                        place: place.to_string(),
                        value: value.to_string(),
                    });
                }
                None => emit(&SymbolJson::from_coordinates(&symbol_coordinates(&u, &v)?)),
            }
        }
        Command::Incarnate { matrix, field } => {
            let f = Field::parse(&field)?;
            let c = parse_matrix(&matrix, None)?;
            emit(&json!({
                "incarnation": IncarnationJson::from_incarnation(&c),
                "Q": QuadraticFormJson::from_form(&first_invariant(&c)),
                "D": ExtensionJson::from_extension(&second_invariant(&c, f)),
            }));
        }
        Command::Invariants {
            root_datum,
            matrix,
            field,
        } => {
            let f = Field::parse(&field)?;
            let rd = load_root_datum(&root_datum)?;
            let c = parse_matrix(&matrix, Some(&rd))?;
            emit(&TripleJson::from_triple(&third_invariant_solve(&rd, &c, f)?));
        }
        Command::BaerSum { triple } => {
            if triple.len() != 2 {
                return Err(Error::parse(
                    "--triple",
                    format!("expected two triples, found {}", triple.len()),
                ));
            }
            let (a, b) = (load_triple(&triple[0])?, load_triple(&triple[1])?);
            emit(&TripleJson::from_triple(&bd_baer_sum(&a, &b)?));
        }
        Command::Morphism { from, to } => {
            let (a, b) = (load_triple(&from)?, load_triple(&to)?);
            return Ok(match bd_morphisms(&a, &b)? {
                Ok(psi) => {
                    emit(&json!({ "exists": true, "psi": CochainJson::from_cochain(&psi) }));
                    Outcome::Done
                }
                Err(failure) => {
                    emit(&json!({ "exists": false, "failure": failure.to_string() }));
                    Outcome::Obstructed
                }
            });
        }
        Command::Residual { triple, place, matrix } => {
            let t = load_triple(&triple)?;
            let place = t.field().parse_place(&place)?;
            let c = match matrix {
                Some(m) => parse_matrix(&m, Some(t.root_datum()))?,
                None => sign_incarnation(&t)?,
            };
            let r = residual_extension(&c, t.field(), &place)?;
            emit(&ResidualJson::from_residual(&r)?);
            if !r.is_split()? {
                return Ok(Outcome::Obstructed);
            }
        }
        Command::Val { triple, place } => {
            let t = load_triple(&triple)?;
            let place = t.field().parse_place(&place)?;
            emit(&EzJson::from_ez(&val_bd(&t, &place)?));
        }
        Command::DecideModel { triple, place } => {
            let t = load_triple(&triple)?;
            let place: Place = t.field().parse_place(&place)?;
            let report = decide_integral_model(&t, &place)?;
            emit(&ModelReportJson::from_report(&place, &report));
            if !report.exists {
                return Ok(Outcome::Obstructed);
            }
        }
        Command::Verify { suite, seed } => {
            let reports = verify::run(&suite, seed)?;
            let mut all = true;
            for r in &reports {
                println!("{r}");
                for f in r.failures.iter().take(5) {
                    println!("  {f}");
                }
                all &= r.passed();
            }
            if !all {
                return Ok(Outcome::Failed);
            }
        }
        Command::Presets { name } => match name {
            Some(name) => emit(&RootDatumJson::from_root_datum(&preset(&name)?)),
            None => {
                for name in names() {
                    println!("{name}");
                }
            }
        },
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict;
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Obstructed) if strict => ExitCode::from(1),
        Ok(Outcome::Obstructed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bdk2: {e}");
            ExitCode::from(2)
        }
    }
}
