use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MethodDeclarationInfo, MethodSignature, StatementKind, TypeKey};

/// Child-index path from a method body root to a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn parent(&self) -> Option<NodePath> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

/// Where a block lives: source folder, package, type chain and method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContainerChain {
    pub source_folder: String,
    pub package: String,
    /// Type names outermost first, the declaring type last.
    pub types: Vec<String>,
    pub method: MethodSignature,
}

impl fmt::Display for ContainerChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.source_folder.is_empty() {
            write!(f, "{}/", self.source_folder)?;
        }
        if !self.package.is_empty() {
            write!(f, "{}.", self.package)?;
        }
        write!(f, "{}::{}", self.types.join("."), self.method)
    }
}

/// Version-qualified identity of a code block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockIdentifier {
    pub version: String,
    pub container: ContainerChain,
    pub block_type: StatementKind,
    /// Position among ancestors, e.g. `body[1]/if[0]`.
    pub parent_signature: String,
    pub body_hash: u64,
}

impl BlockIdentifier {
    /// Identity without the commit, stable for unchanged blocks.
    pub fn signature(&self) -> String {
        format!(
            "{}|{}|{}|{:016x}",
            self.container, self.parent_signature, self.block_type, self.body_hash
        )
    }
}

impl fmt::Display for BlockIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.signature(), self.version)
    }
}

/// Builds the identifier of the node at `path` in `method`.
///
/// Panics if `path` does not point inside the method body.
pub fn block_identifier(version: &str, method: &MethodDeclarationInfo, path: &NodePath) -> BlockIdentifier {
    let node = method
        .node_at(path)
        .unwrap_or_else(|| panic!("no node at {:?} in {}", path.0, method.signature));
    let mut sig = String::new();
    let mut cur = &method.body;
    for (depth, &i) in path.0.iter().enumerate() {
        if depth == 0 {
            sig.push_str(&format!("body[{i}]"));
        } else {
            sig.push_str(&format!("/{}[{i}]", cur.kind));
        }
        cur = &cur.children[i];
    }
    BlockIdentifier {
        version: version.to_string(),
        container: container_chain(&method.container, &method.signature),
        block_type: node.kind,
        parent_signature: sig,
        body_hash: node.body_hash(),
    }
}

fn container_chain(key: &TypeKey, sig: &MethodSignature) -> ContainerChain {
    let mut types = key.nesting_chain.clone();
    types.push(key.name.clone());
    ContainerChain {
        source_folder: key.source_folder.clone(),
        package: key.package.clone(),
        types,
        method: sig.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srcmodel::parse_file;

    #[test]
    fn parent_signature_paths() {
        let src = "package p;\nclass A {\n  void f() {\n    x();\n    if (a) {\n      while (b) { y(); }\n    }\n  }\n}\n";
        let types = parse_file("src/p/A.java", src).unwrap();
        let m = &types[0].methods[0];
        let id = block_identifier("c1", m, &NodePath(vec![1, 0]));
        assert_eq!(id.parent_signature, "body[1]/if[0]");
        assert_eq!(id.block_type, StatementKind::While);
        assert_eq!(id.container.to_string(), "src/p.A::f(): void");
        let top = block_identifier("c1", m, &NodePath(vec![1]));
        assert_eq!(top.parent_signature, "body[1]");
        assert_ne!(id.signature(), top.signature());
        assert!(id.to_string().ends_with("@c1"));
    }

    #[test]
    fn body_hash_ignores_formatting() {
        let a = parse_file("A.java", "class A { void f() { if (a) { x(); } } }").unwrap();
        let b = parse_file("A.java", "class A {\n void f() {\n  if (a) {\n   x(); // c\n  }\n }\n}").unwrap();
        let p = NodePath(vec![0]);
        assert_eq!(
            block_identifier("1", &a[0].methods[0], &p).signature(),
            block_identifier("2", &b[0].methods[0], &p).signature()
        );
    }
}
