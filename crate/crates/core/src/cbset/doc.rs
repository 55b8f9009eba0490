//! JSON form of [`SetExpr`], tagged by `"kind"`.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AccumFamily, CbError, Direction, SequenceDescriptor, SetExpr, SetPieces, SetSequence};
use crate::plcore::{ConjugationScheme, Interval, PlMap};
use crate::rational::Rational;

/// Looks up catalog sequences by descriptor.
pub trait SetResolver {
    fn resolve_set(&self, descriptor: &SequenceDescriptor) -> Option<Arc<dyn SetSequence>>;
}

/// Resolves nothing; enough for expressions built from constant pieces.
pub struct NoSequences;

impl SetResolver for NoSequences {
    fn resolve_set(&self, _: &SequenceDescriptor) -> Option<Arc<dyn SetSequence>> {
        None
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetDoc {
    Finite {
        points: Vec<String>,
    },
    Family {
        #[serde(with = "crate::rational")]
        limit: Rational,
        direction: Direction,
        scheme: ConjugationScheme,
        core_hull: Interval,
        pieces: PiecesDoc,
        cofinal_nonempty: bool,
    },
    Union {
        parts: Vec<SetDoc>,
    },
    Image {
        map: PlMap,
        inner: Box<SetDoc>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PiecesDoc {
    Constant {
        set: Box<SetDoc>,
    },
    Sequence {
        #[serde(flatten)]
        descriptor: SequenceDescriptor,
        #[serde(default)]
        derivations: usize,
    },
}

impl From<&SetExpr> for SetDoc {
    fn from(x: &SetExpr) -> Self {
        match x {
            SetExpr::Finite(pts) => SetDoc::Finite {
                points: pts.iter().map(crate::rational::format_rational).collect(),
            },
            SetExpr::Family(f) => SetDoc::Family {
                limit: f.limit.clone(),
                direction: f.direction,
                scheme: f.scheme.clone(),
                core_hull: f.core_hull.clone(),
                pieces: match &f.pieces {
                    SetPieces::Constant(core) => PiecesDoc::Constant {
                        set: Box::new(SetDoc::from(&**core)),
                    },
                    SetPieces::Sequence { source, derivations } => PiecesDoc::Sequence {
                        descriptor: source.descriptor(),
                        derivations: *derivations,
                    },
                },
                cofinal_nonempty: f.cofinal_nonempty,
            },
            SetExpr::Union(parts) => SetDoc::Union {
                parts: parts.iter().map(SetDoc::from).collect(),
            },
            SetExpr::Image(g, inner) => SetDoc::Image {
                map: g.clone(),
                inner: Box::new(SetDoc::from(&**inner)),
            },
        }
    }
}

impl SetDoc {
    pub fn resolve(self, resolver: &dyn SetResolver) -> Result<SetExpr, CbError> {
        Ok(match self {
            SetDoc::Finite { points } => {
                let pts = points
                    .iter()
                    .map(|s| crate::rational::parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CbError::MalformedExpr(e.to_string()))?;
                SetExpr::finite(pts)
            }
            SetDoc::Family { limit, direction, scheme, core_hull, pieces, cofinal_nonempty } => {
                let pieces = match pieces {
                    PiecesDoc::Constant { set } => SetPieces::Constant(Box::new(set.resolve(resolver)?)),
                    PiecesDoc::Sequence { descriptor, derivations } => SetPieces::Sequence {
                        source: resolver
                            .resolve_set(&descriptor)
                            .ok_or_else(|| CbError::UnknownSequence(descriptor.tag.clone()))?,
                        derivations,
                    },
                };
                let family = AccumFamily { limit, direction, scheme, core_hull, pieces, cofinal_nonempty };
                family.validate(super::DEFAULT_WINDOW)?;
                SetExpr::Family(family)
            }
            SetDoc::Union { parts } => SetExpr::Union(
                parts.into_iter().map(|p| p.resolve(resolver)).collect::<Result<_, _>>()?,
            ),
            SetDoc::Image { map, inner } => SetExpr::Image(map, Box::new(inner.resolve(resolver)?)),
        })
    }
}

impl SetExpr {
    pub fn from_json(value: serde_json::Value, resolver: &dyn SetResolver) -> Result<SetExpr, CbError> {
        let doc: SetDoc =
            serde_json::from_value(value).map_err(|e| CbError::MalformedExpr(e.to_string()))?;
        doc.resolve(resolver)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SetDoc::from(self)).expect("set documents always serialize")
    }
}

impl Serialize for SetExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SetDoc::from(self).serialize(s)
    }
}

/// Deserializes expressions whose families all use constant pieces.
impl<'de> Deserialize<'de> for SetExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        SetDoc::deserialize(d)?
            .resolve(&NoSequences)
            .map_err(serde::de::Error::custom)
    }
}
