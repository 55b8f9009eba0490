use std::fmt;

use super::{fmt_q, interpolate, locate, prune_collinear, Interval, PlError, PlMap};
use crate::rational::Rational;

/// An increasing PL bijection between two closed intervals, given by its
/// graph points. Canonical: first and last points are the domain endpoints
/// and no interior point is collinear with its neighbours. A degenerate
/// graph has a single point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlGraph {
    points: Vec<(Rational, Rational)>,
}

impl PlGraph {
    pub fn identity(j: &Interval) -> Self {
        if j.is_degenerate() {
            return PlGraph { points: vec![(j.lo.clone(), j.lo.clone())] };
        }
        PlGraph {
            points: vec![(j.lo.clone(), j.lo.clone()), (j.hi.clone(), j.hi.clone())],
        }
    }

    pub(crate) fn from_points(points: Vec<(Rational, Rational)>) -> Self {
        debug_assert!(!points.is_empty());
        debug_assert!(points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        PlGraph { points: prune_collinear(points) }
    }

    pub fn from_map(f: &PlMap, j: &Interval) -> Self {
        let mut pts = vec![(j.lo.clone(), f.eval_unchecked(&j.lo))];
        if !j.is_degenerate() {
            pts.extend(
                f.points()
                    .iter()
                    .filter(|(x, _)| *x > j.lo && *x < j.hi)
                    .cloned(),
            );
            pts.push((j.hi.clone(), f.eval_unchecked(&j.hi)));
        }
        PlGraph::from_points(pts)
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.points[0].0.clone(), self.points[self.points.len() - 1].0.clone())
    }

    pub fn range(&self) -> Interval {
        Interval::new(self.points[0].1.clone(), self.points[self.points.len() - 1].1.clone())
    }

    /// Interior break points of the graph.
    pub fn breakpoints(&self) -> Vec<Rational> {
        if self.points.len() <= 2 {
            return Vec::new();
        }
        self.points[1..self.points.len() - 1].iter().map(|p| p.0.clone()).collect()
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational, PlError> {
        if !self.domain().contains(x) {
            return Err(PlError::OutsideDomain { lo: fmt_q(x), hi: fmt_q(x) });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Rational) -> Rational {
        if self.points.len() == 1 {
            return self.points[0].1.clone();
        }
        let i = locate(&self.points, x, false);
        interpolate(&self.points[i], &self.points[i + 1], x)
    }

    fn eval_inverse_unchecked(&self, y: &Rational) -> Rational {
        if self.points.len() == 1 {
            return self.points[0].0.clone();
        }
        let i = locate(&self.points, y, true);
        let a = (self.points[i].1.clone(), self.points[i].0.clone());
        let b = (self.points[i + 1].1.clone(), self.points[i + 1].0.clone());
        interpolate(&a, &b, y)
    }

    pub fn invert(&self) -> PlGraph {
        PlGraph {
            points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// `self ∘ inner`; `inner`'s range must equal `self`'s domain.
    pub fn after(&self, inner: &PlGraph) -> Result<PlGraph, PlError> {
        let dom = self.domain();
        let rng = inner.range();
        if dom != rng {
            return Err(PlError::Mismatch {
                range: format!("{:?}", rng),
                domain: format!("{:?}", dom),
            });
        }
        if inner.points.len() == 1 {
            return Ok(PlGraph {
                points: vec![(inner.points[0].0.clone(), self.points[0].1.clone())],
            });
        }
        let mut xs: Vec<Rational> = inner.points.iter().map(|p| p.0.clone()).collect();
        xs.extend(self.breakpoints().iter().map(|y| inner.eval_inverse_unchecked(y)));
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_unchecked(&inner.eval_unchecked(&x));
                (x, y)
            })
            .collect();
        Ok(PlGraph::from_points(pts))
    }

    /// Restriction to a sub-interval of the domain.
    pub fn restrict(&self, j: &Interval) -> Result<PlGraph, PlError> {
        if !self.domain().contains_interval(j) {
            return Err(PlError::OutsideDomain { lo: fmt_q(&j.lo), hi: fmt_q(&j.hi) });
        }
        let mut pts = vec![(j.lo.clone(), self.eval_unchecked(&j.lo))];
        if !j.is_degenerate() {
            pts.extend(self.points.iter().filter(|(x, _)| *x > j.lo && *x < j.hi).cloned());
            pts.push((j.hi.clone(), self.eval_unchecked(&j.hi)));
        }
        Ok(PlGraph::from_points(pts))
    }

    /// Joins graphs on consecutive, touching domains into one graph.
    pub fn concat(parts: Vec<PlGraph>) -> Result<PlGraph, PlError> {
        let mut pts: Vec<(Rational, Rational)> = Vec::new();
        for part in parts {
            for p in part.points {
                match pts.last() {
                    Some(last) if *last == p => continue,
                    Some(last) if last.0 >= p.0 || last.1 >= p.1 => {
                        return Err(PlError::Mismatch {
                            range: format!("({}, {})", last.0, last.1),
                            domain: format!("({}, {})", p.0, p.1),
                        })
                    }
                    _ => pts.push(p),
                }
            }
        }
        Ok(PlGraph::from_points(pts))
    }

    /// The graph as a map of `[0,1]`, when its domain and range are both `[0,1]`.
    pub fn to_map(&self) -> Option<PlMap> {
        let unit = Interval::new(Rational::from_integer(0.into()), Rational::from_integer(1.into()));
        if self.domain() != unit || self.range() != unit {
            return None;
        }
        Some(PlMap::from_full_unchecked(self.points.clone()))
    }

    pub fn is_identity(&self) -> bool {
        self.points.iter().all(|(x, y)| x == y)
    }

    pub fn slope_norm(&self) -> Rational {
        self.points
            .windows(2)
            .map(|w| {
                let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let r = s.recip();
                if s > r {
                    s
                } else {
                    r
                }
            })
            .max()
            .unwrap_or_else(|| Rational::from_integer(1.into()))
    }
}

impl fmt::Debug for PlGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlGraph[")?;
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", x, y)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plcore::mather_r;
    use crate::rational::q;

    #[test]
    fn restrict_and_compose() {
        let r = mather_r();
        let j = Interval::new(q(1, 4), q(1, 2));
        let g = r.restrict(&j);
        assert_eq!(g.range(), Interval::new(q(1, 2), q(4, 5)));
        assert_eq!(g.breakpoints(), vec![q(3, 8)]);
        let back = PlGraph::from_map(&r.invert(), &g.range());
        assert!(back.after(&g).unwrap().is_identity());
        assert!(g.after(&g).is_err());
    }

    #[test]
    fn concat_glues_touching_parts() {
        let a = PlGraph::identity(&Interval::new(q(0, 1), q(1, 4)));
        let b = PlGraph::from_map(&mather_r(), &Interval::new(q(1, 4), q(1, 2)));
        assert!(PlGraph::concat(vec![a.clone(), b.clone()]).is_err());
        let c = PlGraph::identity(&Interval::new(q(0, 1), q(1, 2)));
        let d = PlGraph::identity(&Interval::new(q(1, 2), q(1, 1)));
        let joined = PlGraph::concat(vec![c, d]).unwrap();
        assert_eq!(joined.points().len(), 2);
    }
}
