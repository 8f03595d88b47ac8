//! Method- and type-level refactoring detection between two commits.

mod augment;
mod body;
mod classes;

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use augment::{augment_models, AugmentTarget, Augmented};
pub use body::{detect_body_refactorings, is_inverted, BodyRefactoring, BodyRefactoringKind};
pub use classes::{detect_class_level, detect_inter_file, ClassPairing, ClassPairingKind};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::srcmodel::{MethodDeclarationInfo, NodePath, StatementNode, TypeDeclarationInfo};
use crate::stmtmap::{map_bodies, map_masked, MapConfig, MappingSet, StatementMapping};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingKind {
    IdenticalSignature,
    SignatureChanged,
    Extracted,
    Inlined,
    Merged,
    Split,
    Moved,
    PulledUp,
    PushedDown,
    ExtractedAndMoved,
}

impl PairingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairingKind::IdenticalSignature => "identical-signature",
            PairingKind::SignatureChanged => "signature-changed",
            PairingKind::Extracted => "extracted",
            PairingKind::Inlined => "inlined",
            PairingKind::Merged => "merged",
            PairingKind::Split => "split",
            PairingKind::Moved => "moved",
            PairingKind::PulledUp => "pulled-up",
            PairingKind::PushedDown => "pushed-down",
            PairingKind::ExtractedAndMoved => "extracted-and-moved",
        }
    }

    /// The right method continues the left one as a whole.
    pub fn is_continuation(self) -> bool {
        matches!(
            self,
            PairingKind::IdenticalSignature
                | PairingKind::SignatureChanged
                | PairingKind::Moved
                | PairingKind::PulledUp
                | PairingKind::PushedDown
        )
    }
}

/// A left method and a right method related by some refactoring, with the
/// statement mapping between their bodies.
#[derive(Debug, Clone)]
pub struct MethodPairing<'a> {
    pub kind: PairingKind,
    pub left: &'a MethodDeclarationInfo,
    pub right: &'a MethodDeclarationInfo,
    pub mapping: MappingSet,
}

/// Mapping of a body onto itself, without running the mapper.
pub fn identity_mapping(body: &StatementNode) -> MappingSet {
    MappingSet {
        mappings: body
            .descendants()
            .into_iter()
            .map(|(p, _)| StatementMapping {
                left: p.clone(),
                right: p,
                replacements: Vec::new(),
                transformation: None,
            })
            .collect(),
        ..MappingSet::default()
    }
}

fn map_pair(l: &MethodDeclarationInfo, r: &MethodDeclarationInfo, cfg: &MapConfig) -> Result<MappingSet> {
    if l.body_hash == r.body_hash && l.body.text == r.body.text {
        return Ok(identity_mapping(&l.body));
    }
    map_bodies(l, r, cfg)
}

/// Same as [`map_pair`], but oversize pairs count as unrelated.
pub(crate) fn try_map(l: &MethodDeclarationInfo, r: &MethodDeclarationInfo, cfg: &MapConfig) -> Result<Option<MappingSet>> {
    match map_pair(l, r, cfg) {
        Ok(m) => Ok(Some(m)),
        Err(Error::SizeLimit { nodes, limit }) => {
            tracing::debug!(left = %l.qualified_signature(), nodes, limit, "skipping oversize pair");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Pairs the methods of two versions of a type.
pub fn match_methods<'a>(
    left: &'a TypeDeclarationInfo,
    right: &'a TypeDeclarationInfo,
    cfg: &Config,
) -> Result<Vec<MethodPairing<'a>>> {
    let l: Vec<_> = left.methods.iter().collect();
    let r: Vec<_> = right.methods.iter().collect();
    match_method_sets(&l, &r, cfg)
}

/// Pairs two method sets: equal signatures first, then the best-scoring
/// body matches above the configured threshold.
pub fn match_method_sets<'a>(
    left: &[&'a MethodDeclarationInfo],
    right: &[&'a MethodDeclarationInfo],
    cfg: &Config,
) -> Result<Vec<MethodPairing<'a>>> {
    let mc = cfg.map_config();
    let mut out = Vec::new();
    let mut lused = vec![false; left.len()];
    let mut rused = vec![false; right.len()];
    for (i, l) in left.iter().enumerate() {
        let Some(j) = (0..right.len()).find(|&j| !rused[j] && right[j].signature == l.signature) else {
            continue;
        };
        let mapping = try_map(l, right[j], &mc)?.unwrap_or_default();
        lused[i] = true;
        rused[j] = true;
        out.push(MethodPairing {
            kind: PairingKind::IdenticalSignature,
            left: l,
            right: right[j],
            mapping,
        });
    }

    struct Cand {
        score: f64,
        reps: usize,
        key: (String, String),
        i: usize,
        j: usize,
        mapping: MappingSet,
    }
    let mut cands = Vec::new();
    for (i, l) in left.iter().enumerate().filter(|(i, _)| !lused[*i]) {
        for (j, r) in right.iter().enumerate().filter(|(j, _)| !rused[*j]) {
            let empty = l.body.children.is_empty() || r.body.children.is_empty();
            let (score, mapping) = if empty {
                // bodies carry no evidence; only the name can
                if l.body.children.is_empty() && r.body.children.is_empty() && l.name() == r.name() {
                    (1.0, MappingSet::default())
                } else {
                    continue;
                }
            } else {
                match try_map(l, r, &mc)? {
                    Some(m) => (m.matched_fraction(), m),
                    None => continue,
                }
            };
            if score >= cfg.method_match_threshold {
                cands.push(Cand {
                    score,
                    reps: mapping.replacement_count(),
                    key: (l.qualified_signature(), r.qualified_signature()),
                    i,
                    j,
                    mapping,
                });
            }
        }
    }
    cands.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then(a.reps.cmp(&b.reps))
            .then_with(|| a.key.cmp(&b.key))
    });
    for c in cands {
        if lused[c.i] || rused[c.j] {
            continue;
        }
        lused[c.i] = true;
        rused[c.j] = true;
        out.push(MethodPairing {
            kind: PairingKind::SignatureChanged,
            left: left[c.i],
            right: right[c.j],
            mapping: c.mapping,
        });
    }
    Ok(out)
}

/// Runs [`match_methods`] for every type present on both sides with the
/// same identity.
pub fn match_files<'a>(
    left: &'a [TypeDeclarationInfo],
    right: &'a [TypeDeclarationInfo],
    cfg: &Config,
) -> Result<Vec<MethodPairing<'a>>> {
    let mut out = Vec::new();
    for r in right {
        if let Some(l) = left.iter().find(|l| l.key.identity() == r.key.identity()) {
            out.extend(match_methods(l, r, cfg)?);
        }
    }
    Ok(out)
}

/// True if `caller`'s body contains a call to a method named `name`.
pub fn calls(caller: &MethodDeclarationInfo, name: &str) -> bool {
    let needle = format!(" {name} (");
    format!(" {}", caller.body.text).contains(&needle)
}

fn body_nodes(m: &MethodDeclarationInfo) -> usize {
    m.body.size() - 1
}

fn same_method(a: &MethodDeclarationInfo, b: &MethodDeclarationInfo) -> bool {
    a.container == b.container && a.signature == b.signature && a.path == b.path
}

/// Extract, inline, merge and split among methods left over by the given
/// pairings, within one file pair.
pub fn detect_intra_file<'a>(
    left: &'a [TypeDeclarationInfo],
    right: &'a [TypeDeclarationInfo],
    pairings: &[MethodPairing<'a>],
    cfg: &Config,
) -> Result<Vec<MethodPairing<'a>>> {
    let mc = cfg.map_config();
    let left_over: Vec<&MethodDeclarationInfo> = left
        .iter()
        .flat_map(|t| t.methods.iter())
        .filter(|m| !pairings.iter().any(|p| same_method(p.left, m)))
        .collect();
    let right_over: Vec<&MethodDeclarationInfo> = right
        .iter()
        .flat_map(|t| t.methods.iter())
        .filter(|m| !pairings.iter().any(|p| same_method(p.right, m)))
        .collect();
    let all_right: Vec<&MethodDeclarationInfo> = right.iter().flat_map(|t| t.methods.iter()).collect();
    let all_left: Vec<&MethodDeclarationInfo> = left.iter().flat_map(|t| t.methods.iter()).collect();
    let mut out = Vec::new();
    let mut extracted = HashSet::new();
    let mut inlined = HashSet::new();

    for (ri, r) in right_over.iter().enumerate() {
        if r.body.children.is_empty() {
            continue;
        }
        let called = all_right.iter().any(|c| !same_method(c, r) && calls(c, r.name()));
        if !called {
            continue;
        }
        for p in pairings {
            if p.mapping.unmatched_left.is_empty() {
                continue;
            }
            let mask: HashSet<NodePath> = p.mapping.unmatched_left.iter().cloned().collect();
            let m = match map_masked(&p.left.body, &r.body, Some(&mask), None, &mc) {
                Ok(m) => m,
                Err(Error::SizeLimit { .. }) => continue,
                Err(e) => return Err(e),
            };
            if m.mappings.is_empty() && m.multi.is_empty() {
                continue;
            }
            extracted.insert(ri);
            out.push(MethodPairing {
                kind: PairingKind::Extracted,
                left: p.left,
                right: r,
                mapping: m,
            });
        }
    }

    for (li, l) in left_over.iter().enumerate() {
        if l.body.children.is_empty() {
            continue;
        }
        let called = all_left.iter().any(|c| !same_method(c, l) && calls(c, l.name()));
        if !called {
            continue;
        }
        for p in pairings {
            if p.mapping.unmatched_right.is_empty() {
                continue;
            }
            let mask: HashSet<NodePath> = p.mapping.unmatched_right.iter().cloned().collect();
            let m = match map_masked(&l.body, &p.right.body, None, Some(&mask), &mc) {
                Ok(m) => m,
                Err(Error::SizeLimit { .. }) => continue,
                Err(e) => return Err(e),
            };
            if m.mappings.is_empty() && m.multi.is_empty() {
                continue;
            }
            inlined.insert(li);
            out.push(MethodPairing {
                kind: PairingKind::Inlined,
                left: l,
                right: p.right,
                mapping: m,
            });
        }
    }

    let lrest: Vec<&MethodDeclarationInfo> = left_over
        .iter()
        .enumerate()
        .filter(|(i, _)| !inlined.contains(i))
        .map(|(_, m)| *m)
        .collect();
    let rrest: Vec<&MethodDeclarationInfo> = right_over
        .iter()
        .enumerate()
        .filter(|(i, _)| !extracted.contains(i))
        .map(|(_, m)| *m)
        .collect();
    out.extend(merges_and_splits(&lrest, &rrest, pairings, &mc)?);
    Ok(out)
}

/// Methods whose bodies are largely contained in one method of the other
/// side, grouped into merges (several left, one right) and splits. A group
/// may include one method already paired by signature or body; only the
/// leftover members are reported.
fn merges_and_splits<'a>(
    left: &[&'a MethodDeclarationInfo],
    right: &[&'a MethodDeclarationInfo],
    pairings: &[MethodPairing<'a>],
    mc: &MapConfig,
) -> Result<Vec<MethodPairing<'a>>> {
    let mut out = Vec::new();
    let covered = |n: usize, matched: usize| n > 0 && matched * 2 >= n;
    let continuing = || pairings.iter().filter(|p| p.kind.is_continuation());

    let mut targets: Vec<(&'a MethodDeclarationInfo, Option<&MethodPairing<'a>>)> =
        right.iter().map(|r| (*r, None)).collect();
    targets.extend(continuing().map(|p| (p.right, Some(p))));
    for (r, paired) in targets {
        if r.body.children.is_empty() {
            continue;
        }
        let mut parts = Vec::new();
        for l in left {
            if l.body.children.is_empty() {
                continue;
            }
            if let Some(m) = try_map(l, r, mc)? {
                if covered(body_nodes(l), m.matched_left()) {
                    parts.push((*l, m));
                }
            }
        }
        let mut total: usize = parts.iter().map(|(_, m)| m.matched_right()).sum();
        let mut members = parts.len();
        if let Some(p) = paired {
            total += p.mapping.matched_right();
            members += 1;
        }
        if members < 2 || parts.is_empty() || !covered(body_nodes(r), total.min(body_nodes(r))) {
            continue;
        }
        for (l, mapping) in parts {
            out.push(MethodPairing {
                kind: PairingKind::Merged,
                left: l,
                right: r,
                mapping,
            });
        }
    }

    let mut sources: Vec<(&'a MethodDeclarationInfo, Option<&MethodPairing<'a>>)> =
        left.iter().map(|l| (*l, None)).collect();
    sources.extend(continuing().map(|p| (p.left, Some(p))));
    for (l, paired) in sources {
        if l.body.children.is_empty() || out.iter().any(|p| std::ptr::eq(p.left, l)) {
            continue;
        }
        let mut parts = Vec::new();
        for r in right {
            if r.body.children.is_empty() {
                continue;
            }
            if let Some(m) = try_map(l, r, mc)? {
                if covered(body_nodes(r), m.matched_right()) {
                    parts.push((*r, m));
                }
            }
        }
        let mut total: usize = parts.iter().map(|(_, m)| m.matched_left()).sum();
        let mut members = parts.len();
        if let Some(p) = paired {
            total += p.mapping.matched_left();
            members += 1;
        }
        if members < 2 || parts.is_empty() || !covered(body_nodes(l), total.min(body_nodes(l))) {
            continue;
        }
        for (r, mapping) in parts {
            if out.iter().any(|p| std::ptr::eq(p.right, r)) {
                continue;
            }
            out.push(MethodPairing {
                kind: PairingKind::Split,
                left: l,
                right: r,
                mapping,
            });
        }
    }
    Ok(out)
}
