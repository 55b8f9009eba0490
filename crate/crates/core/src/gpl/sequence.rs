//! Index-dependent core pieces and their adapters.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::json;

use super::Piece;
use crate::cbset::{SequenceDescriptor, SetExpr, SetResolver, SetSequence};

/// Core pieces indexed by `m`, all supported in the family's core hull.
pub trait PieceSequence: Send + Sync + fmt::Debug {
    fn piece(&self, m: u64) -> Arc<Piece>;
    /// Cantor–Bendixson rank of every piece's break set.
    fn uniform_rank(&self) -> usize;
    fn descriptor(&self) -> SequenceDescriptor;
}

/// Thread-safe memo table for sequence implementations.
#[derive(Default)]
pub struct PieceCache(Mutex<HashMap<u64, Arc<Piece>>>);

impl PieceCache {
    pub fn get_or_build(&self, m: u64, build: impl FnOnce() -> Piece) -> Arc<Piece> {
        if let Some(p) = self.0.lock().expect("cache lock").get(&m) {
            return p.clone();
        }
        // built outside the lock; a racing duplicate is equal anyway
        let p = Arc::new(build());
        self.0.lock().expect("cache lock").entry(m).or_insert(p).clone()
    }
}

impl fmt::Debug for PieceCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.lock().map(|c| c.len()).unwrap_or(0);
        write!(f, "PieceCache({n} entries)")
    }
}

/// Pointwise inverses of another sequence.
#[derive(Debug)]
pub struct InverseSequence {
    source: Arc<dyn PieceSequence>,
    cache: PieceCache,
}

impl InverseSequence {
    pub fn wrap(source: Arc<dyn PieceSequence>) -> Arc<dyn PieceSequence> {
        Arc::new(InverseSequence { source, cache: PieceCache::default() })
    }
}

impl PieceSequence for InverseSequence {
    fn piece(&self, m: u64) -> Arc<Piece> {
        self.cache.get_or_build(m, || self.source.piece(m).inverse())
    }

    fn uniform_rank(&self) -> usize {
        self.source.uniform_rank()
    }

    fn descriptor(&self) -> SequenceDescriptor {
        SequenceDescriptor {
            tag: "inverse".into(),
            params: json!({ "source": self.source.descriptor() }),
        }
    }
}

/// Break sets of a piece sequence.
#[derive(Debug)]
pub struct BreaksetSequence {
    source: Arc<dyn PieceSequence>,
}

impl BreaksetSequence {
    pub fn new(source: Arc<dyn PieceSequence>) -> Self {
        BreaksetSequence { source }
    }
}

impl SetSequence for BreaksetSequence {
    fn piece(&self, m: u64) -> SetExpr {
        self.source
            .piece(m)
            .breakset()
            .expect("catalog pieces have well-formed break sets")
    }

    fn uniform_rank(&self) -> usize {
        self.source.uniform_rank()
    }

    fn descriptor(&self) -> SequenceDescriptor {
        SequenceDescriptor {
            tag: "breakset".into(),
            params: json!({ "source": self.source.descriptor() }),
        }
    }
}

/// Looks up piece sequences by descriptor.
pub trait MapResolver {
    fn resolve_map(&self, descriptor: &SequenceDescriptor) -> Option<Arc<dyn PieceSequence>>;
}

pub struct NoMapSequences;

impl MapResolver for NoMapSequences {
    fn resolve_map(&self, _: &SequenceDescriptor) -> Option<Arc<dyn PieceSequence>> {
        None
    }
}

fn source_of(d: &SequenceDescriptor) -> Option<SequenceDescriptor> {
    serde_json::from_value(d.params.get("source")?.clone()).ok()
}

/// Resolves `inverse` wrappers, deferring everything else to `base`.
pub fn resolve_map(base: &dyn MapResolver, d: &SequenceDescriptor) -> Option<Arc<dyn PieceSequence>> {
    if d.tag == "inverse" {
        return Some(InverseSequence::wrap(resolve_map(base, &source_of(d)?)?));
    }
    base.resolve_map(d)
}

/// Set resolver for `breakset` sequences over a map resolver.
pub struct SetsFromMaps<'a>(pub &'a dyn MapResolver);

impl SetResolver for SetsFromMaps<'_> {
    fn resolve_set(&self, d: &SequenceDescriptor) -> Option<Arc<dyn SetSequence>> {
        if d.tag != "breakset" {
            return None;
        }
        let source = resolve_map(self.0, &source_of(d)?)?;
        Some(Arc::new(BreaksetSequence::new(source)))
    }
}
