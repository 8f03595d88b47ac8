use serde::{Deserialize, Serialize};

use crate::srcmodel::{Token, TokenCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplacementKind {
    Identifier,
    Literal,
    Type,
    MethodCall,
    Expression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    pub before: String,
    pub after: String,
    pub kind: ReplacementKind,
}

fn non_punct(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| !t.is_punctuation()).count()
}

/// Most positional differences a pair of statements may have and still match.
pub fn replacement_budget(tokens: &[Token]) -> usize {
    (non_punct(tokens) / 2).max(1)
}

fn kind_of(cat: TokenCategory) -> Option<ReplacementKind> {
    match cat {
        TokenCategory::Identifier => Some(ReplacementKind::Identifier),
        TokenCategory::Literal => Some(ReplacementKind::Literal),
        TokenCategory::TypeName => Some(ReplacementKind::Type),
        TokenCategory::MethodName => Some(ReplacementKind::MethodCall),
        TokenCategory::Other => None,
    }
}

fn text(tokens: &[Token]) -> String {
    crate::srcmodel::tokens::join(tokens)
}

/// Replacements turning `a` into `b`, or `None` if the two leaves are not
/// related by a legal replacement sequence.
pub fn leaf_replacements(a: &[Token], b: &[Token]) -> Option<Vec<Replacement>> {
    if a.len() == b.len() {
        let mut out = Vec::new();
        for (x, y) in a.iter().zip(b) {
            if x.text == y.text {
                continue;
            }
            if x.category != y.category {
                return None;
            }
            let kind = kind_of(x.category)?;
            out.push(Replacement {
                before: x.text.clone(),
                after: y.text.clone(),
                kind,
            });
        }
        if out.len() > replacement_budget(a) {
            return None;
        }
        return Some(out);
    }
    argument_edit(a, b).map(|r| vec![r])
}

/// A single contiguous edit inside a call's argument list, e.g.
/// `f(a)` to `f(a, b)`.
fn argument_edit(a: &[Token], b: &[Token]) -> Option<Replacement> {
    let max_prefix = a.len().min(b.len());
    let mut prefix = 0;
    while prefix < max_prefix && a[prefix].text == b[prefix].text {
        prefix += 1;
    }
    let mut suffix = 0;
    while suffix < max_prefix - prefix
        && a[a.len() - 1 - suffix].text == b[b.len() - 1 - suffix].text
    {
        suffix += 1;
    }
    // shrink to argument delimiters, keeping both middles balanced
    let prefixes = (2..=prefix)
        .rev()
        .filter(|&p| matches!(a[p - 1].text.as_str(), "(" | ","));
    for p in prefixes {
        let suffixes = (1..=suffix)
            .rev()
            .filter(|&s| matches!(a[a.len() - s].text.as_str(), ")" | ","));
        for s in suffixes {
            let am = &a[p..a.len() - s];
            let bm = &b[p..b.len() - s];
            if balanced(am) && balanced(bm) {
                return Some(Replacement {
                    before: text(am),
                    after: text(bm),
                    kind: ReplacementKind::Expression,
                });
            }
        }
    }
    None
}

fn balanced(tokens: &[Token]) -> bool {
    let mut depth = 0i32;
    for t in tokens {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}
