use std::sync::Arc;

use crate::config::Config;
use crate::error::Result;
use crate::gitio::{CommitRef, FileChangeKind};
use crate::srcmodel::{
    essential_text, MethodDeclarationInfo, MethodSignature, ModelCache, SourceModel, TypeDeclarationInfo,
};

/// The method whose block is being followed, and facts about its type.
#[derive(Debug, Clone, Copy)]
pub struct AugmentTarget<'a> {
    pub method: &'a MethodDeclarationInfo,
    pub superclass: Option<&'a str>,
}

#[derive(Debug, Clone, Default)]
pub struct Augmented {
    pub left: SourceModel,
    pub right: SourceModel,
    /// Files that could not be parsed and were left out.
    pub diagnostics: Vec<String>,
}

fn is_java(p: &str) -> bool {
    p.ends_with(".java")
}

/// Builds the partial models used when the tracked method cannot be found
/// in the same file of the parent commit.
///
/// The parent side holds every Java file the commit modified, deleted or
/// renamed away (files whose change is only comments or imports are
/// skipped). The child side holds the tracked file plus changed files that
/// look related to the tracked method by text scanning.
pub fn augment_models(
    cache: &ModelCache<'_>,
    commit: &CommitRef,
    parent: &str,
    tracked_path: &str,
    target: AugmentTarget<'_>,
    cfg: &Config,
) -> Result<Augmented> {
    let repo = cache.repo();
    let mut out = Augmented {
        left: SourceModel::new(parent),
        right: SourceModel::new(commit.id.clone()),
        diagnostics: Vec::new(),
    };
    let changes = repo.changed_files(commit)?;

    let add = |model: &mut SourceModel, diags: &mut Vec<String>, rev: &str, path: &str| -> Result<()> {
        match cache.load(rev, path)? {
            Some(Ok(types)) => model.insert(path, types),
            Some(Err(e)) => diags.push(format!("skipped unparsable {path}: {e}")),
            None => {}
        }
        Ok(())
    };

    for c in &changes {
        let Some(before) = c.path_before.as_deref().filter(|p| is_java(p)) else {
            continue;
        };
        if c.kind == FileChangeKind::Modified {
            let old = repo.read_file(parent, before)?;
            let new = repo.read_file(&commit.id, before)?;
            if let (Some(a), Some(b)) = (old, new) {
                let ea = essential_text(&a);
                if ea.is_some() && ea == essential_text(&b) {
                    continue;
                }
            }
        }
        add(&mut out.left, &mut out.diagnostics, parent, before)?;
    }

    add(&mut out.right, &mut out.diagnostics, &commit.id, tracked_path)?;
    let m = target.method;
    let ty = m.container.name.as_str();
    let sup = target.superclass.unwrap_or("");
    let h = &cfg.heuristics;
    let mut patterns = vec![
        cfg.heuristic(&h.deprecated_method_link, m.name(), ty, sup)?,
        cfg.heuristic(&h.deprecated_type_link, m.name(), ty, sup)?,
        cfg.heuristic(&h.instantiation, m.name(), ty, sup)?,
        cfg.heuristic(&h.extends_type, m.name(), ty, sup)?,
        cfg.heuristic(&h.method_call, m.name(), ty, sup)?,
    ];
    if !sup.is_empty() {
        patterns.push(cfg.heuristic(&h.type_declaration, m.name(), sup, sup)?);
    }
    let same_name = cfg.heuristic(&h.type_declaration, m.name(), ty, sup)?;
    let package = regex::Regex::new(&h.package_declaration).map_err(|e| crate::Error::Config(e.to_string()))?;
    for c in &changes {
        let Some(after) = c.path_after.as_deref().filter(|p| is_java(p) && *p != tracked_path) else {
            continue;
        };
        let Some(text) = repo.read_file(&commit.id, after)? else {
            continue;
        };
        let other_package = || {
            let pkg = package
                .captures(&text)
                .and_then(|c| c.get(1))
                .map_or("", |g| g.as_str());
            pkg != m.container.package
        };
        let hit = patterns.iter().any(|p| p.is_match(&text)) || (same_name.is_match(&text) && other_package());
        if hit {
            add(&mut out.right, &mut out.diagnostics, &commit.id, after)?;
        }
    }

    if cfg.prune_identical_methods {
        prune_identical(&mut out.left, &mut out.right, m);
    }
    Ok(out)
}

fn same_body(a: &MethodDeclarationInfo, b: &MethodDeclarationInfo) -> bool {
    a.body_hash == b.body_hash && a.body.text == b.body.text && a.has_body == b.has_body
}

/// Drops method pairs that are identical in both models (same file, type,
/// signature and body). They cannot be the origin of anything that moved.
pub(crate) fn prune_identical(left: &mut SourceModel, right: &mut SourceModel, keep: &MethodDeclarationInfo) {
    let paths: Vec<String> = left
        .files
        .keys()
        .filter(|p| right.files.contains_key(*p))
        .cloned()
        .collect();
    for path in paths {
        let lt = left.files[&path].clone();
        let rt = right.files[&path].clone();
        // decide first so that files without twins are never copied
        let mut drop: Vec<(usize, Vec<MethodSignature>)> = Vec::new();
        for (li, l) in lt.iter().enumerate() {
            let Some(r) = rt.iter().find(|r| r.key.identity() == l.key.identity()) else {
                continue;
            };
            let sigs: Vec<MethodSignature> = l
                .methods
                .iter()
                .filter(|lm| {
                    let protected = lm.signature == keep.signature && l.key == keep.container;
                    !protected
                        && r.methods
                            .iter()
                            .any(|rm| rm.signature == lm.signature && same_body(lm, rm))
                })
                .map(|lm| lm.signature.clone())
                .collect();
            if !sigs.is_empty() {
                drop.push((li, sigs));
            }
        }
        if drop.is_empty() {
            continue;
        }
        let mut nl: Vec<TypeDeclarationInfo> = lt.as_ref().clone();
        let mut nr: Vec<TypeDeclarationInfo> = rt.as_ref().clone();
        for (li, sigs) in drop {
            let id = nl[li].key.identity();
            nl[li].methods.retain(|x| !sigs.contains(&x.signature));
            if let Some(r) = nr.iter_mut().find(|r| r.key.identity() == id) {
                r.methods.retain(|x| !sigs.contains(&x.signature));
            }
        }
        left.files.insert(path.clone(), Arc::new(nl));
        right.files.insert(path, Arc::new(nr));
    }
}
