use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{match_method_sets, match_methods, try_map, MethodPairing, PairingKind};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::srcmodel::{MethodDeclarationInfo, NodePath, SourceModel, TypeDeclarationInfo};
use crate::stmtmap::map_masked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassPairingKind {
    Moved,
    Renamed,
    Extracted,
    Merged,
    Split,
}

impl ClassPairingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassPairingKind::Moved => "moved",
            ClassPairingKind::Renamed => "renamed",
            ClassPairingKind::Extracted => "extracted",
            ClassPairingKind::Merged => "merged",
            ClassPairingKind::Split => "split",
        }
    }
}

/// A type on the right that continues (part of) a type on the left.
#[derive(Debug, Clone)]
pub struct ClassPairing<'a> {
    pub kind: ClassPairingKind,
    pub left: &'a TypeDeclarationInfo,
    pub right: &'a TypeDeclarationInfo,
    pub methods: Vec<MethodPairing<'a>>,
}

fn same_place(l: &TypeDeclarationInfo, r: &TypeDeclarationInfo) -> bool {
    l.key.identity() == r.key.identity() && l.path == r.path
}

/// Type-level refactorings: moved/renamed files, extracted, merged and
/// split classes.
pub fn detect_class_level<'a>(
    left: &'a SourceModel,
    right: &'a SourceModel,
    cfg: &Config,
) -> Result<Vec<ClassPairing<'a>>> {
    let lt: Vec<&TypeDeclarationInfo> = left.types().collect();
    let rt: Vec<&TypeDeclarationInfo> = right.types().collect();
    let mut lfree: Vec<bool> = lt.iter().map(|l| !rt.iter().any(|r| same_place(l, r))).collect();
    let mut rfree: Vec<bool> = rt.iter().map(|r| !lt.iter().any(|l| same_place(l, r))).collect();
    let mut out = Vec::new();

    // moved: same identity, or same simple name under another package
    for (j, r) in rt.iter().enumerate() {
        if !rfree[j] {
            continue;
        }
        let pick = (0..lt.len())
            .filter(|&i| lfree[i])
            .find(|&i| lt[i].key.identity() == r.key.identity())
            .or_else(|| {
                (0..lt.len()).filter(|&i| lfree[i]).find(|&i| {
                    let (l, r) = (&lt[i].key, &r.key);
                    l.name == r.name && l.nesting_chain == r.nesting_chain && l.package != r.package
                })
            });
        if let Some(i) = pick {
            lfree[i] = false;
            rfree[j] = false;
            out.push(ClassPairing {
                kind: ClassPairingKind::Moved,
                left: lt[i],
                right: r,
                methods: match_methods(lt[i], r, cfg)?,
            });
        }
    }

    // renamed: same package, most members carried over
    for (j, r) in rt.iter().enumerate() {
        if !rfree[j] {
            continue;
        }
        let mut best: Option<(f64, usize, Vec<MethodPairing<'a>>)> = None;
        for (i, l) in lt.iter().enumerate() {
            if !lfree[i] || l.key.package != r.key.package || l.key.name == r.key.name {
                continue;
            }
            let smaller = l.methods.len().min(r.methods.len());
            if smaller == 0 {
                continue;
            }
            let ms = match_methods(l, r, cfg)?;
            let overlap = ms.len() as f64 / smaller as f64;
            if overlap > cfg.class_rename_overlap && best.as_ref().is_none_or(|b| overlap > b.0) {
                best = Some((overlap, i, ms));
            }
        }
        if let Some((_, i, methods)) = best {
            lfree[i] = false;
            rfree[j] = false;
            out.push(ClassPairing {
                kind: ClassPairingKind::Renamed,
                left: lt[i],
                right: r,
                methods,
            });
        }
    }

    // extracted: a surviving type lost methods that reappear in a new one
    let mut removed: Vec<(usize, Vec<&'a MethodDeclarationInfo>)> = Vec::new();
    for (i, l) in lt.iter().enumerate() {
        let Some(r) = rt.iter().find(|r| same_place(l, r)) else {
            continue;
        };
        let kept = match_methods(l, r, cfg)?;
        let gone: Vec<_> = l
            .methods
            .iter()
            .filter(|m| !kept.iter().any(|p| std::ptr::eq(p.left, *m)))
            .collect();
        if !gone.is_empty() {
            removed.push((i, gone));
        }
    }
    for (j, r) in rt.iter().enumerate() {
        if !rfree[j] {
            continue;
        }
        let rm: Vec<_> = r.methods.iter().collect();
        let mut best: Option<(usize, Vec<MethodPairing<'a>>)> = None;
        for (i, gone) in &removed {
            let ms = match_method_sets(gone, &rm, cfg)?;
            if !ms.is_empty() && best.as_ref().is_none_or(|b| ms.len() > b.1.len()) {
                best = Some((*i, ms));
            }
        }
        if let Some((i, methods)) = best {
            rfree[j] = false;
            out.push(ClassPairing {
                kind: ClassPairingKind::Extracted,
                left: lt[i],
                right: r,
                methods,
            });
        }
    }

    // merged and split among whatever is left
    let mut links: HashMap<(usize, usize), Vec<MethodPairing<'a>>> = HashMap::new();
    for (i, l) in lt.iter().enumerate().filter(|(i, _)| lfree[*i]) {
        for (j, r) in rt.iter().enumerate().filter(|(j, _)| rfree[*j]) {
            let ms = match_methods(l, r, cfg)?;
            if !ms.is_empty() {
                links.insert((i, j), ms);
            }
        }
    }
    let mut merged_r = HashSet::new();
    for j in 0..rt.len() {
        let parts: Vec<usize> = (0..lt.len()).filter(|&i| links.contains_key(&(i, j))).collect();
        if parts.len() < 2 {
            continue;
        }
        merged_r.insert(j);
        for i in parts {
            out.push(ClassPairing {
                kind: ClassPairingKind::Merged,
                left: lt[i],
                right: rt[j],
                methods: links[&(i, j)].clone(),
            });
        }
    }
    for i in 0..lt.len() {
        let parts: Vec<usize> = (0..rt.len())
            .filter(|&j| !merged_r.contains(&j) && links.contains_key(&(i, j)))
            .collect();
        if parts.len() < 2 {
            continue;
        }
        for j in parts {
            out.push(ClassPairing {
                kind: ClassPairingKind::Split,
                left: lt[i],
                right: rt[j],
                methods: links[&(i, j)].clone(),
            });
        }
    }
    Ok(out)
}

/// Finds where `target` (a right-side method not matched so far) came from
/// in another pre-existing file: a moved, pulled-up or pushed-down method,
/// or a part of a surviving method that was extracted and moved.
pub fn detect_inter_file<'a>(
    left: &'a SourceModel,
    right: &'a SourceModel,
    target: &'a MethodDeclarationInfo,
    cfg: &Config,
) -> Result<Vec<MethodPairing<'a>>> {
    let mc = cfg.map_config();
    let target_type = right.types().find(|t| t.key == target.container && t.path == target.path);
    let mut whole = Vec::new();
    let mut partial = Vec::new();
    for l in left.types() {
        let counterpart = right.types().find(|r| same_place(l, r));
        for m in &l.methods {
            let survivor = counterpart.and_then(|r| r.methods.iter().find(|x| x.signature == m.signature));
            match survivor {
                None => {
                    if m.body.children.is_empty() || target.body.children.is_empty() {
                        continue;
                    }
                    let Some(mapping) = try_map(m, target, &mc)? else {
                        continue;
                    };
                    let score = mapping.matched_fraction();
                    if score < cfg.method_match_threshold {
                        continue;
                    }
                    let kind = match target_type {
                        Some(t) if l.superclass.as_deref() == Some(t.key.name.as_str()) => PairingKind::PulledUp,
                        Some(t) if t.superclass.as_deref() == Some(l.key.name.as_str()) => PairingKind::PushedDown,
                        _ => PairingKind::Moved,
                    };
                    whole.push((score, mapping.replacement_count(), m.qualified_signature(), MethodPairing {
                        kind,
                        left: m,
                        right: target,
                        mapping,
                    }));
                }
                Some(after) => {
                    if after.body_hash == m.body_hash || !super::calls(after, target.name()) {
                        continue;
                    }
                    let Some(kept) = try_map(m, after, &mc)? else {
                        continue;
                    };
                    if kept.unmatched_left.is_empty() {
                        continue;
                    }
                    let mask: HashSet<NodePath> = kept.unmatched_left.into_iter().collect();
                    let mapping = match map_masked(&m.body, &target.body, Some(&mask), None, &mc) {
                        Ok(x) => x,
                        Err(Error::SizeLimit { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    if mapping.mappings.is_empty() && mapping.multi.is_empty() {
                        continue;
                    }
                    partial.push(MethodPairing {
                        kind: PairingKind::ExtractedAndMoved,
                        left: m,
                        right: target,
                        mapping,
                    });
                }
            }
        }
    }
    whole.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    let mut out: Vec<MethodPairing<'a>> = whole.into_iter().take(1).map(|w| w.3).collect();
    if out.is_empty() {
        out = partial;
    }
    Ok(out)
}
