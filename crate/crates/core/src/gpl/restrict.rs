use super::{GplError, GplMap, MapFamily};
use crate::cbset::Direction;
use crate::plcore::{Interval, PlError, PlGraph};

/// Joins graphs on interior-disjoint subintervals of `domain`, filling the
/// gaps with the identity.
pub fn glue(mut segments: Vec<PlGraph>, domain: &Interval) -> Result<PlGraph, PlError> {
    segments.sort_by(|a, b| a.domain().lo.cmp(&b.domain().lo));
    let mut parts = Vec::with_capacity(2 * segments.len() + 1);
    let mut cursor = domain.lo.clone();
    for s in segments {
        let d = s.domain();
        if d.lo > cursor {
            parts.push(PlGraph::identity(&Interval::new(cursor.clone(), d.lo.clone())));
        }
        cursor = d.hi.clone();
        parts.push(s);
    }
    if cursor < domain.hi || parts.is_empty() {
        parts.push(PlGraph::identity(&Interval::new(cursor, domain.hi.clone())));
    }
    PlGraph::concat(parts)
}

impl MapFamily {
    /// Does `j` reach the accumulation side of the limit?
    fn straddles_limit(&self, j: &Interval) -> bool {
        match self.direction {
            Direction::Above => j.lo <= self.limit && self.limit < j.hi,
            Direction::Below => j.lo < self.limit && self.limit <= j.hi,
        }
    }

    fn segments_on(&self, j: &Interval, fuel: &mut usize, out: &mut Vec<PlGraph>) -> Result<(), GplError> {
        match self.envelope().intersection(j) {
            Some(k) if !k.is_degenerate() => {}
            _ => return Ok(()),
        }
        if self.cofinal && self.straddles_limit(j) {
            return Err(GplError::NotPiecewiseLinearHere { point: self.limit.clone() });
        }
        let mut m = self.scheme.first();
        loop {
            let hull = self.hull(m);
            let beyond = match self.direction {
                Direction::Above => hull.hi <= j.lo,
                Direction::Below => hull.lo >= j.hi,
            };
            if beyond {
                return Ok(());
            }
            if let Some(k) = hull.intersection(j) {
                if !k.is_degenerate() {
                    if *fuel == 0 {
                        return Err(GplError::FuelExhausted(out.len()));
                    }
                    *fuel -= 1;
                    out.push(self.piece_graph(m, &k, fuel)?);
                }
            }
            m += 1;
        }
    }
}

impl GplMap {
    pub(crate) fn restrict_with(&self, j: &Interval, fuel: &mut usize) -> Result<PlGraph, GplError> {
        let mut segments = Vec::new();
        for f in &self.families {
            f.segments_on(j, fuel, &mut segments)?;
        }
        let p = if segments.is_empty() { PlGraph::identity(j) } else { glue(segments, j)? };
        let s = PlGraph::from_map(self.scaffold(), &p.range());
        Ok(s.after(&p)?)
    }
}
