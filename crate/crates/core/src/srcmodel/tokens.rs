use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

/// Lexical class of a token, used to decide which replacements are legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenCategory {
    Identifier,
    MethodName,
    TypeName,
    Literal,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub category: TokenCategory,
}

impl Token {
    pub fn new(text: impl Into<String>, category: TokenCategory) -> Self {
        Token {
            text: text.into(),
            category,
        }
    }

    pub fn is_punctuation(&self) -> bool {
        self.category == TokenCategory::Other
            && !self.text.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_')
    }
}

/// Joins tokens with single spaces.
pub fn join(tokens: &[Token]) -> String {
    let mut out = String::with_capacity(tokens.len() * 4);
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

/// 64-bit FNV-1a over the UTF-8 bytes of normalized text.
pub fn content_hash(normalized: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(normalized.as_bytes());
    h.finish()
}
