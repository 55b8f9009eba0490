//! JSON form of generalized maps.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sequence::resolve_map;
use super::{GplError, GplMap, MapFamily, MapPieces, MapResolver, NoMapSequences, Piece};
use crate::cbset::{Direction, SequenceDescriptor};
use crate::plcore::{ConjugationScheme, Interval, PlMap};
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GplDoc {
    pub scaffold: PlMap,
    #[serde(default)]
    pub families: Vec<FamilyDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDoc {
    #[serde(with = "crate::rational")]
    pub limit: Rational,
    pub direction: Direction,
    pub scheme: ConjugationScheme,
    pub core_hull: Interval,
    pub pieces: PiecesDoc,
    pub cofinal: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PiecesDoc {
    Constant { piece: PieceDoc },
    Sequence(SequenceDescriptor),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PieceDoc {
    Gpl(Box<GplDoc>),
    Pl(PlMap),
}

impl From<&GplMap> for GplDoc {
    fn from(g: &GplMap) -> Self {
        GplDoc {
            scaffold: g.scaffold().clone(),
            families: g
                .families()
                .iter()
                .map(|f| FamilyDoc {
                    limit: f.limit.clone(),
                    direction: f.direction,
                    scheme: f.scheme.clone(),
                    core_hull: f.core_hull.clone(),
                    pieces: match &f.pieces {
                        MapPieces::Constant(p) => PiecesDoc::Constant { piece: PieceDoc::from(&**p) },
                        MapPieces::Sequence(s) => PiecesDoc::Sequence(s.descriptor()),
                    },
                    cofinal: f.cofinal,
                })
                .collect(),
        }
    }
}

impl From<&Piece> for PieceDoc {
    fn from(p: &Piece) -> Self {
        match p {
            Piece::Pl(p) => PieceDoc::Pl(p.clone()),
            Piece::Gpl(g) => PieceDoc::Gpl(Box::new(GplDoc::from(g))),
        }
    }
}

impl PieceDoc {
    pub fn resolve(self, resolver: &dyn MapResolver) -> Result<Piece, GplError> {
        Ok(match self {
            PieceDoc::Pl(p) => Piece::Pl(p),
            PieceDoc::Gpl(g) => Piece::from(g.resolve(resolver)?),
        })
    }
}

impl GplDoc {
    pub fn resolve(self, resolver: &dyn MapResolver) -> Result<GplMap, GplError> {
        let mut families = Vec::with_capacity(self.families.len());
        for f in self.families {
            let pieces = match f.pieces {
                PiecesDoc::Constant { piece } => MapPieces::Constant(Arc::new(piece.resolve(resolver)?)),
                PiecesDoc::Sequence(d) => MapPieces::Sequence(
                    resolve_map(resolver, &d)
                        .ok_or_else(|| GplError::Malformed(format!("unknown sequence `{}`", d.tag)))?,
                ),
            };
            families.push(MapFamily {
                limit: f.limit,
                direction: f.direction,
                scheme: f.scheme,
                core_hull: f.core_hull,
                pieces,
                cofinal: f.cofinal,
            });
        }
        GplMap::new(self.scaffold, families)
    }
}

impl GplMap {
    pub fn from_json(value: serde_json::Value, resolver: &dyn MapResolver) -> Result<GplMap, GplError> {
        let doc: GplDoc = serde_json::from_value(value).map_err(|e| GplError::Malformed(e.to_string()))?;
        doc.resolve(resolver)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GplDoc::from(self)).expect("map documents always serialize")
    }
}

impl Serialize for GplMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GplDoc::from(self).serialize(s)
    }
}

/// Deserializes maps whose families all use constant pieces.
impl<'de> Deserialize<'de> for GplMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GplDoc::deserialize(d)?
            .resolve(&NoMapSequences)
            .map_err(serde::de::Error::custom)
    }
}
