use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::diagonal::{diagonal_trick, DiagonalData, DiagonalEntry, DiagonalReport, DiagonalSequence};
use super::mather::{mather_commutators, mather_setup, CommutatorCheck, MatherData};
use super::{certificate_undistorted, CertificateReport, ConstructionConfig, ConstructionError, TheoremASetup};
use crate::rational::{q, Rational};

/// Number of `m` for which the interval bookkeeping of each Mather instance
/// is re-verified.
pub const MATHER_CHECK: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub m: u64,
    /// `28m + 2m₀ + 14`.
    pub k_m: u64,
    pub i_m_plus_1: u64,
    /// `2k_m / (i_m + 1)`.
    #[serde(with = "crate::rational")]
    pub ratio: Rational,
    /// Reduced lengths of `H_m` in the two Mather instances.
    pub letters: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremAReport {
    pub n: usize,
    pub m0: u64,
    pub rows: Vec<RatioRow>,
    /// Least `m` from which the ratio column strictly decreases to the end.
    pub decreasing_from: Option<u64>,
    /// Last ratio is below half of the first.
    pub tail_below_half: bool,
    pub diagonal: Vec<DiagonalReport>,
    pub commutators: Vec<CommutatorCheck>,
    pub certificate: Option<CertificateReport>,
    pub certificate_error: Option<String>,
}

impl TheoremAReport {
    pub fn passed(&self) -> bool {
        self.decreasing_from.is_some() && self.tail_below_half && self.certificate_error.is_none()
    }
}

/// `f`, its diagonal-trick data and the two Mather instances fed with
/// `[a_{i_m}, b_{i_m}]` and `[c_{i_m}, d_{i_m}]`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub setup: TheoremASetup,
    pub diagonal: Arc<DiagonalData>,
    pub first: MatherData,
    pub second: MatherData,
}

impl Pipeline {
    pub fn new(n: usize, config: &ConstructionConfig) -> Result<Self, ConstructionError> {
        let setup = TheoremASetup::new(n, config)?;
        let diagonal = Arc::new(DiagonalData::new(&setup, config.h.clone())?);
        let seq = |e| DiagonalSequence::shared(diagonal.clone(), e, config.index, config.clone());
        let first = mather_setup(&config.mather, seq(DiagonalEntry::A), seq(DiagonalEntry::B), MATHER_CHECK)?;
        let second = mather_setup(&config.mather, seq(DiagonalEntry::C), seq(DiagonalEntry::D), MATHER_CHECK)?;
        Ok(Pipeline { setup, diagonal, first, second })
    }
}

/// Runs the whole pipeline at rank `n`: builds `f`, feeds the diagonal-trick
/// entries into two Mather instances, tabulates `2k_m/(i_m+1)` for
/// `m ≤ big_m`, fully verifies the identities for `m ≤ verify_up_to`, and
/// runs the undistortion certificate up to `certificate_k`.
pub fn theorem_a_report(
    n: usize,
    big_m: u64,
    verify_up_to: u64,
    certificate_k: u64,
    config: &ConstructionConfig,
) -> Result<TheoremAReport, ConstructionError> {
    let Pipeline { setup, diagonal: data, first, second } = Pipeline::new(n, config)?;
    let m0 = first.m0;

    let rows = (1..=big_m)
        .map(|m| {
            let k_m = 28 * m + 2 * m0 + 14;
            let i_m_plus_1 = config.index.index(m) + 1;
            Ok(RatioRow {
                m,
                k_m,
                i_m_plus_1,
                ratio: q(2 * k_m as i64, i_m_plus_1 as i64),
                letters: [mather_commutators(&first, m)?.letters, mather_commutators(&second, m)?.letters],
            })
        })
        .collect::<Result<Vec<_>, ConstructionError>>()?;

    let diagonal = (1..=verify_up_to)
        .into_par_iter()
        .map(|m| diagonal_trick(&data, config.index.index(m), config.samples, config.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let commutators = (1..=verify_up_to)
        .into_par_iter()
        .flat_map(|m| [(&first, m), (&second, m)])
        .map(|(d, m): (&MatherData, u64)| d.verify_commutator(m, config.samples, config.seed))
        .collect::<Result<Vec<_>, _>>()?;

    let (certificate, certificate_error) = match certificate_undistorted(&setup.f1, n, certificate_k) {
        Ok(c) => (Some(c), None),
        Err(e @ ConstructionError::CertificateFailed { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };

    Ok(TheoremAReport {
        n,
        m0,
        decreasing_from: decreasing_from(&rows),
        tail_below_half: match (rows.first(), rows.last()) {
            (Some(a), Some(b)) => b.ratio.clone() * q(2, 1) < a.ratio,
            _ => false,
        },
        rows,
        diagonal,
        commutators,
        certificate,
        certificate_error,
    })
}

fn decreasing_from(rows: &[RatioRow]) -> Option<u64> {
    let mut start = rows.last()?.m;
    for w in rows.windows(2).rev() {
        if w[1].ratio < w[0].ratio {
            start = w[0].m;
        } else {
            break;
        }
    }
    Some(start)
}
