use clap::{Args, ValueEnum};
use gplab::grouplab::examples::{
    bs_generators, bs_realization, e, gamma1_generators, gamma2_generators, h5_generators, in_gamma1, in_gamma2,
};
use gplab::grouplab::{bfs_ball, distortion_table, GenSet, GroupElement, GroupError, UniTri5};
use serde_json::json;

use crate::report::{CliError, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    H5Gamma1,
    H5Gamma2,
    H5Full,
    Bs,
}

impl Group {
    fn name(self) -> &'static str {
        match self {
            Group::H5Gamma1 => "h5-gamma1",
            Group::H5Gamma2 => "h5-gamma2",
            Group::H5Full => "h5-full",
            Group::Bs => "bs",
        }
    }

    fn h5(self) -> Option<(GenSet<UniTri5>, fn(&UniTri5) -> bool)> {
        match self {
            Group::H5Gamma1 => Some((gamma1_generators(), in_gamma1)),
            Group::H5Gamma2 => Some((gamma2_generators(), in_gamma2)),
            Group::H5Full => Some((h5_generators(), |_| true)),
            Group::Bs => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct DistortionArgs {
    #[arg(long, value_enum)]
    group: Group,
    /// `eIJ` (1 <= I < J <= 5) for the matrix groups, `f` or `g` for bs.
    #[arg(long)]
    element: String,
    #[arg(long, default_value_t = 6)]
    radius: usize,
    /// Largest ball the search may build.
    #[arg(long, default_value_t = 1 << 22)]
    budget: usize,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long, value_enum)]
    group: Group,
    #[arg(long, default_value_t = 5)]
    radius: usize,
    #[arg(long, default_value_t = 1 << 22)]
    budget: usize,
}

fn group_err(e: GroupError) -> CliError {
    CliError::Failed(e.to_string())
}

fn parse_elementary(s: &str) -> Option<(usize, usize)> {
    let digits = s.strip_prefix('e').or_else(|| s.strip_prefix('E'))?;
    let b = digits.as_bytes();
    if b.len() != 2 {
        return None;
    }
    let (i, j) = ((b[0] as char).to_digit(10)? as usize, (b[1] as char).to_digit(10)? as usize);
    (1 <= i && i < j && j <= 5).then_some((i, j))
}

fn distortion_report<E: GroupElement>(f: &E, gens: &GenSet<E>, a: &DistortionArgs) -> Result<Report, CliError> {
    let table = distortion_table(f, gens, a.radius, a.budget).map_err(group_err)?;
    let mut r = Report::new("distortion", &["n", "distortion"]);
    for (n, d) in table.iter().enumerate() {
        r.push(vec![n.to_string(), d.to_string()]);
    }
    r.details = json!({
        "group": a.group.name(),
        "element": a.element,
        "radius": a.radius,
        "generators": gens.named().into_iter().map(|(n, _)| n).collect::<Vec<_>>(),
    });
    Ok(r)
}

pub fn distortion(a: &DistortionArgs) -> Result<Report, CliError> {
    if let Some((gens, member)) = a.group.h5() {
        let (i, j) = parse_elementary(&a.element)
            .ok_or_else(|| CliError::Config(format!("`{}` is not an element eIJ with 1 <= I < J <= 5", a.element)))?;
        let f = e(i, j);
        if !member(&f) {
            return Err(CliError::Config(format!("{} is not in {}", a.element, a.group.name())));
        }
        return distortion_report(&f, &gens, a);
    }
    let (f, g) = bs_realization();
    let x = match a.element.as_str() {
        "f" => f,
        "g" => g,
        other => return Err(CliError::Config(format!("bs elements are `f` and `g`, not `{other}`"))),
    };
    distortion_report(&x, &bs_generators(), a)
}

fn ball_report<E: GroupElement>(gens: &GenSet<E>, a: &BallArgs) -> Result<Report, CliError> {
    let ball = bfs_ball(gens, a.radius, a.budget).map_err(group_err)?;
    let mut r = Report::new("ball", &["radius", "sphere", "ball"]);
    let mut total = 0;
    for (k, s) in ball.sphere_sizes().into_iter().enumerate() {
        total += s;
        r.push(vec![k.to_string(), s.to_string(), total.to_string()]);
    }
    r.details = json!({ "group": a.group.name(), "radius": a.radius });
    Ok(r)
}

pub fn ball(a: &BallArgs) -> Result<Report, CliError> {
    match a.group.h5() {
        Some((gens, _)) => ball_report(&gens, a),
        None => ball_report(&bs_generators(), a),
    }
}
