use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use gplab::cbset::SetExpr;
use gplab::constructions::{
    build_f1, mather_setup, ConstructionConfig, ConstructionResolver, DiagonalData, DiagonalEntry, DiagonalSequence,
    TheoremASetup,
};
use gplab::gpl::{GplMap, SetsFromMaps};
use serde_json::{json, Value};

use crate::report::{config_err, CliError, Report};
use crate::verify::load_config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Mather's `F` fed with the rank-`n` diagonal-trick pieces.
    FTilde,
    /// The rank-`n` map `f1`.
    F1,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "builtin"])))]
pub struct RankArgs {
    /// A set document, or a map document (one with a `scaffold` field).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Rank parameter of the built-in construction.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Construction parameters as JSON; defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the document that was ranked.
    #[arg(long)]
    emit: Option<PathBuf>,
}

enum Subject {
    Set(SetExpr),
    Map(GplMap),
}

fn load(path: &PathBuf) -> Result<Subject, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{} is not JSON: {e}", path.display())))?;
    if value.get("scaffold").is_some() {
        GplMap::from_json(value, &ConstructionResolver).map(Subject::Map).map_err(config_err)
    } else {
        SetExpr::from_json(value, &SetsFromMaps(&ConstructionResolver)).map(Subject::Set).map_err(config_err)
    }
}

fn builtin(which: Builtin, n: usize, config: &ConstructionConfig) -> Result<GplMap, CliError> {
    let fail = |e: gplab::constructions::ConstructionError| CliError::Config(e.to_string());
    match which {
        Builtin::F1 => build_f1(n, &config.interval).map_err(fail),
        Builtin::FTilde => {
            let setup = TheoremASetup::new(n, config).map_err(fail)?;
            let data = Arc::new(DiagonalData::new(&setup, config.h.clone()).map_err(fail)?);
            let seq = |e| DiagonalSequence::shared(data.clone(), e, config.index, config.clone());
            let mather = mather_setup(&config.mather, seq(DiagonalEntry::A), seq(DiagonalEntry::B), 1).map_err(fail)?;
            Ok(mather.big_f)
        }
    }
}

pub fn run(a: &RankArgs) -> Result<Report, CliError> {
    let config = load_config(a.config.as_ref())?;
    let subject = match (&a.input, a.builtin) {
        (Some(path), _) => load(path)?,
        (None, Some(b)) => Subject::Map(builtin(b, a.n, &config)?),
        (None, None) => return Err(CliError::Config("give --input or --builtin".into())),
    };
    let (kind, doc, set) = match subject {
        Subject::Set(s) => ("set", s.to_json(), s),
        Subject::Map(m) => {
            let set = m.breakset().map_err(|e| CliError::Failed(e.to_string()))?;
            ("map", m.to_json(), set)
        }
    };
    if let Some(path) = &a.emit {
        let text = serde_json::to_string_pretty(&doc).map_err(config_err)?;
        fs::write(path, text + "\n").map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }

    let fail = |e: gplab::cbset::CbError| CliError::Failed(e.to_string());
    let rank = set.rank().map_err(fail)?;
    let mut r = Report::new("rank", &["level", "cardinality"]);
    for k in 0..=rank.rank {
        r.push(vec![k.to_string(), set.nth_derived_cardinality(k).map_err(fail)?.to_string()]);
    }
    r.details = json!({
        "subject": kind,
        "rank": rank.rank,
        "final_cardinality": rank.final_cardinality,
    });
    Ok(r)
}
