use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use gplab::constructions::{
    certificate_undistorted, diagonal_trick, mather_commutators, theorem_a_report, ConstructionConfig,
    ConstructionError, DiagonalData, Pipeline, TheoremASetup,
};
use gplab::grouplab::examples::{bs_generators, bs_realization, verify_bs_identity, verify_h5_identities};
use gplab::grouplab::{bfs_ball, GroupElement, GroupError};
use gplab::rational::format_rational;
use rayon::prelude::*;
use serde_json::json;

use crate::report::{config_err, CliError, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    H5,
    Bs,
    Mather,
    Diagonal,
    Certificate,
    TheoremA,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Largest n for the h5 (default 50) and bs (default 20) suites.
    #[arg(long)]
    n_max: Option<u64>,
    /// Rank of `f1` for the construction suites.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Largest m: 30 for mather, 5 for diagonal, 12 for theorem-a.
    #[arg(long)]
    m_max: Option<u64>,
    /// Largest m whose identities are checked map by map (mather: 2, theorem-a: 1).
    #[arg(long)]
    verify_up_to: Option<u64>,
    /// Largest power in the undistortion certificate.
    #[arg(long, default_value_t = 20)]
    k_max: u64,
    /// Construction parameters as JSON; defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pointwise samples, overriding the config.
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn load_config(path: Option<&PathBuf>) -> Result<ConstructionConfig, CliError> {
    let Some(path) = path else {
        return Ok(ConstructionConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
}

/// Parameter problems are configuration errors; everything else is a failed check.
fn construction_err(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::InvalidParameters(_) => CliError::Config(e.to_string()),
        _ => CliError::Failed(e.to_string()),
    }
}

fn positive(name: &str, v: u64) -> Result<u64, CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("--{name} must be positive")));
    }
    Ok(v)
}

pub fn run(a: &VerifyArgs) -> Result<Report, CliError> {
    let mut config = load_config(a.config.as_ref())?;
    if let Some(s) = a.samples {
        config.samples = s;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let mut r = match a.suite {
        Suite::H5 => h5(positive("n-max", a.n_max.unwrap_or(50))?)?,
        Suite::Bs => bs(a.n_max.unwrap_or(20))?,
        Suite::Mather => mather(a.n, positive("m-max", a.m_max.unwrap_or(30))?, a.verify_up_to.unwrap_or(2), &config)?,
        Suite::Diagonal => diagonal(a.n, a.m_max.unwrap_or(5), &config)?,
        Suite::Certificate => certificate(a.n, positive("k-max", a.k_max)?, &config)?,
        Suite::TheoremA => theorem_a(
            a.n,
            positive("m-max", a.m_max.unwrap_or(12))?,
            a.verify_up_to.unwrap_or(1),
            positive("k-max", a.k_max)?,
            &config,
        )?,
    };
    let suite = serde_json::to_value(a.suite.to_possible_value().map(|v| v.get_name().to_string())).map_err(config_err)?;
    match &mut r.details {
        serde_json::Value::Object(m) => {
            m.insert("suite".into(), suite);
        }
        d => *d = json!({ "suite": suite }),
    }
    Ok(r)
}

fn h5(n_max: u64) -> Result<Report, CliError> {
    if n_max > 50_000 {
        return Err(CliError::Config("--n-max above 50000 overflows the matrix entries".into()));
    }
    let mut r = Report::new(
        "verify",
        &["n", "e35_letters", "e35_bound", "e25_letters", "e25_bound", "e15_letters", "e15_bound", "l1", "l2"],
    );
    let reports = (1..=n_max).into_par_iter().map(verify_h5_identities).collect::<Vec<_>>();
    for (n, rep) in (1..=n_max).zip(reports) {
        match rep {
            Ok(h) => {
                if h.e35_word_length as u64 > h.bound_e35
                    || h.e25_word_length as u64 > h.bound_e25
                    || h.e15_word_length as u64 > h.bound_e15
                {
                    r.fail(format!("a word is longer than its bound at n = {n}"));
                }
                if h.l1 != n * n || h.l2 != n.pow(4) {
                    r.fail(format!("length functions disagree at n = {n}"));
                }
                r.push(vec![
                    n.to_string(),
                    h.e35_word_length.to_string(),
                    h.bound_e35.to_string(),
                    h.e25_word_length.to_string(),
                    h.bound_e25.to_string(),
                    h.e15_word_length.to_string(),
                    h.bound_e15.to_string(),
                    h.l1.to_string(),
                    h.l2.to_string(),
                ]);
            }
            Err(e) => r.fail(format!("n = {n}: {e}")),
        }
    }
    Ok(r)
}

fn bs(n_max: u64) -> Result<Report, CliError> {
    if !(1..=62).contains(&n_max) {
        return Err(CliError::Config("--n-max must be in 1..=62 for bs".into()));
    }
    // exact lengths of f^(2^n) from one ball, kept small
    let ball = bfs_ball(&bs_generators(), 7, 1 << 20).map_err(|e: GroupError| CliError::Failed(e.to_string()))?;
    let (f, _) = bs_realization();
    let mut r = Report::new("verify", &["n", "word_letters", "bound", "image_of_zero", "bfs_length"]);
    for n in 1..=n_max {
        match verify_bs_identity(n) {
            Ok(b) => {
                let exact = if n <= 3 { ball.length_of(&f.pow(1 << n)) } else { None };
                if b.word_length as u64 > b.bound || exact.is_some_and(|l| l as u64 > b.bound) {
                    r.fail(format!("l(f^(2^{n})) exceeds 2n + 1"));
                }
                if n <= 3 && exact.is_none() {
                    r.fail(format!("f^(2^{n}) not found in the radius-7 ball"));
                }
                r.push(vec![
                    n.to_string(),
                    b.word_length.to_string(),
                    b.bound.to_string(),
                    b.image_of_zero,
                    exact.map(|l| l.to_string()).unwrap_or_default(),
                ]);
            }
            Err(e) => r.fail(format!("n = {n}: {e}")),
        }
    }
    Ok(r)
}

fn mather(n: usize, m_max: u64, verify_up_to: u64, config: &ConstructionConfig) -> Result<Report, CliError> {
    let p = Pipeline::new(n, config).map_err(construction_err)?;
    let mut r = Report::new(
        "verify",
        &["m", "k_m", "letters_first", "letters_second", "unreduced", "commutator_checked"],
    );
    let checks: Vec<(u64, Result<(bool, bool), String>)> = (1..=verify_up_to.min(m_max))
        .into_par_iter()
        .map(|m| {
            let run = |d: &gplab::constructions::MatherData| d.verify_commutator(m, config.samples, config.seed);
            let res = match (run(&p.first), run(&p.second)) {
                (Ok(a), Ok(b)) => Ok((a.is_exact(), b.is_exact())),
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            };
            (m, res)
        })
        .collect();
    for m in 1..=m_max {
        let first = mather_commutators(&p.first, m).map_err(construction_err)?;
        let second = mather_commutators(&p.second, m).map_err(construction_err)?;
        let k_m = 28 * m + 2 * p.first.m0 + 14;
        if first.bound as u64 != k_m || first.letters as u64 > k_m || second.letters as u64 > k_m {
            r.fail(format!("H_{m} exceeds k_m = {k_m}"));
        }
        let checked = match checks.iter().find(|(k, _)| *k == m) {
            None => String::new(),
            Some((_, Ok((a, b)))) => if *a && *b { "exact" } else { "excluded-points" }.to_string(),
            Some((_, Err(e))) => {
                r.fail(e.clone());
                "failed".to_string()
            }
        };
        r.push(vec![
            m.to_string(),
            k_m.to_string(),
            first.letters.to_string(),
            second.letters.to_string(),
            first.unreduced_letters.to_string(),
            checked,
        ]);
    }
    r.details = json!({ "n": n, "m0": p.first.m0, "checked_up_to": p.first.checked_up_to });
    Ok(r)
}

fn diagonal(n: usize, m_max: u64, config: &ConstructionConfig) -> Result<Report, CliError> {
    let setup = TheoremASetup::new(n, config).map_err(construction_err)?;
    let data = Arc::new(DiagonalData::new(&setup, config.h.clone()).map_err(construction_err)?);
    let reports: Vec<_> =
        (0..=m_max).into_par_iter().map(|m| (m, diagonal_trick(&data, m, config.samples, config.seed))).collect();
    let mut r = Report::new(
        "verify",
        &["m", "f_letters", "a_letters", "b_letters", "c_letters", "d_letters", "exact", "compared_cells", "samples"],
    );
    for (m, rep) in reports {
        match rep {
            Ok(d) => {
                let mut row = vec![m.to_string()];
                row.extend(d.word_lengths.iter().map(|l| l.to_string()));
                row.extend([d.exact.to_string(), d.compared_cells.to_string(), d.samples.to_string()]);
                r.push(row);
            }
            Err(e) => r.fail(format!("m = {m}: {e}")),
        }
    }
    r.details = json!({ "n": n });
    Ok(r)
}

fn certificate(n: usize, k_max: u64, config: &ConstructionConfig) -> Result<Report, CliError> {
    let setup = TheoremASetup::new(n, config).map_err(construction_err)?;
    let mut r = Report::new("verify", &["k", "length", "expected"]);
    match certificate_undistorted(&setup.f1, n, k_max) {
        Ok(c) => {
            for (k, l) in (1..).zip(&c.lengths) {
                r.push(vec![k.to_string(), l.to_string(), (k * c.l_n).to_string()]);
            }
            r.details = json!({ "n": n, "l_n": c.l_n, "fekete_estimate": format_rational(&c.fekete_estimate) });
        }
        Err(e @ ConstructionError::CertificateFailed { .. }) => {
            r.fail(e.to_string());
            r.details = json!({ "n": n });
        }
        Err(e) => return Err(construction_err(e)),
    }
    Ok(r)
}

fn theorem_a(n: usize, m_max: u64, verify_up_to: u64, k_max: u64, config: &ConstructionConfig) -> Result<Report, CliError> {
    let t = theorem_a_report(n, m_max, verify_up_to, k_max, config).map_err(construction_err)?;
    let mut r = Report::new("verify", &["m", "k_m", "i_m_plus_1", "ratio", "letters_first", "letters_second"]);
    for row in &t.rows {
        r.push(vec![
            row.m.to_string(),
            row.k_m.to_string(),
            row.i_m_plus_1.to_string(),
            format_rational(&row.ratio),
            row.letters[0].to_string(),
            row.letters[1].to_string(),
        ]);
    }
    if t.decreasing_from.is_none() || !t.tail_below_half {
        r.fail("the ratio column does not fall below half its first value");
    }
    if let Some(e) = &t.certificate_error {
        r.fail(e.clone());
    }
    r.details = json!({
        "n": n,
        "m0": t.m0,
        "decreasing_from": t.decreasing_from,
        "tail_below_half": t.tail_below_half,
        "diagonal": t.diagonal,
        "commutators": t.commutators,
        "certificate": t.certificate,
        "certificate_error": t.certificate_error,
    });
    Ok(r)
}
