use std::cell::RefCell;

use tree_sitter::{Node, Parser};

use super::tokens::{content_hash, join, Token, TokenCategory};
use super::{
    MethodDeclarationInfo, MethodSignature, StatementKind, StatementNode, TypeDeclarationInfo,
    TypeKey, TypeKind,
};
use crate::error::ParseError;

thread_local! {
    static PARSER: RefCell<Parser> = RefCell::new({
        let mut p = Parser::new();
        p.set_language(&tree_sitter_java::LANGUAGE.into())
            .expect("bundled java grammar is compatible");
        p
    });
}

/// Parses one compilation unit. Fails on the first syntax error instead of
/// returning a partial model.
pub fn parse_file(path: &str, text: &str) -> Result<Vec<TypeDeclarationInfo>, ParseError> {
    let tree = PARSER
        .with(|p| p.borrow_mut().parse(text, None))
        .ok_or_else(|| ParseError {
            path: path.to_string(),
            line: 1,
            column: 1,
            message: "parser gave up".into(),
        })?;
    let root = tree.root_node();
    if root.has_error() {
        return Err(first_error(root, path));
    }
    let src = text.as_bytes();
    let package = root
        .named_children(&mut root.walk())
        .find(|n| n.kind() == "package_declaration")
        .map(|n| {
            let mut toks = Vec::new();
            collect_tokens(n, src, &mut toks);
            toks.iter()
                .filter(|t| t.text != "package" && t.text != ";" && !t.text.starts_with('@'))
                .map(|t| t.text.as_str())
                .collect::<String>()
        })
        .unwrap_or_default();
    let ctx = Ctx {
        src,
        path,
        source_folder: source_folder(path, &package),
        package,
    };
    let mut out = Vec::new();
    for child in root.named_children(&mut root.walk()) {
        ctx.visit_type(child, &[], &mut out);
    }
    Ok(out)
}

/// Parses a bare sequence of statements as if it were a method body.
pub fn parse_snippet(body: &str) -> Result<StatementNode, ParseError> {
    let text = format!("class Snippet {{\nvoid snippet() {{\n{body}\n}}\n}}\n");
    let types = parse_file("Snippet.java", &text)?;
    let m = types
        .into_iter()
        .next()
        .and_then(|t| t.methods.into_iter().next())
        .ok_or_else(|| ParseError {
            path: "Snippet.java".into(),
            line: 1,
            column: 1,
            message: "snippet is not a statement list".into(),
        })?;
    Ok(shift_lines(m.body, 2))
}

/// Token text of a file without comments, package and import declarations;
/// `None` if the file does not parse.
pub fn essential_text(text: &str) -> Option<String> {
    let tree = PARSER.with(|p| p.borrow_mut().parse(text, None))?;
    let root = tree.root_node();
    if root.has_error() {
        return None;
    }
    let mut toks = Vec::new();
    for c in root.children(&mut root.walk()) {
        if !matches!(c.kind(), "package_declaration" | "import_declaration") {
            collect_tokens(c, text.as_bytes(), &mut toks);
        }
    }
    Some(join(&toks))
}

fn shift_lines(mut n: StatementNode, by: usize) -> StatementNode {
    n.start_line = n.start_line.saturating_sub(by).max(1);
    n.end_line = n.end_line.saturating_sub(by).max(1);
    n.children = n.children.into_iter().map(|c| shift_lines(c, by)).collect();
    n
}

fn first_error(root: Node<'_>, path: &str) -> ParseError {
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if n.is_error() || n.is_missing() {
            let pos = n.start_position();
            let message = if n.is_missing() {
                format!("missing `{}`", n.kind())
            } else {
                "unexpected syntax".to_string()
            };
            return ParseError {
                path: path.to_string(),
                line: pos.row + 1,
                column: pos.column + 1,
                message,
            };
        }
        let mut cursor = n.walk();
        let children: Vec<_> = n.children(&mut cursor).filter(|c| c.has_error() || c.is_missing()).collect();
        stack.extend(children.into_iter().rev());
    }
    let pos = root.start_position();
    ParseError {
        path: path.to_string(),
        line: pos.row + 1,
        column: pos.column + 1,
        message: "unexpected syntax".into(),
    }
}

fn source_folder(path: &str, package: &str) -> String {
    let dir = path.rsplit_once('/').map(|(d, _)| d).unwrap_or("");
    if package.is_empty() {
        return dir.to_string();
    }
    let pkg = package.replace('.', "/");
    if dir == pkg {
        String::new()
    } else if let Some(prefix) = dir.strip_suffix(&format!("/{pkg}")) {
        prefix.to_string()
    } else {
        dir.to_string()
    }
}

fn is_comment(n: Node<'_>) -> bool {
    matches!(n.kind(), "line_comment" | "block_comment")
}

fn collect_tokens(node: Node<'_>, src: &[u8], out: &mut Vec<Token>) {
    if is_comment(node) {
        return;
    }
    let kind = node.kind();
    if matches!(kind, "string_literal" | "character_literal" | "text_block") || node.child_count() == 0 {
        let text = node.utf8_text(src).unwrap_or_default();
        if text.is_empty() {
            return;
        }
        out.push(Token::new(text, categorize(node)));
        return;
    }
    let mut cursor = node.walk();
    for c in node.children(&mut cursor) {
        collect_tokens(c, src, out);
    }
}

fn categorize(node: Node<'_>) -> TokenCategory {
    match node.kind() {
        "identifier" => {
            let parent = node.parent();
            let is_call_name = parent.is_some_and(|p| {
                p.kind() == "method_invocation"
                    && p.child_by_field_name("name").map(|n| n.id()) == Some(node.id())
            });
            if is_call_name {
                TokenCategory::MethodName
            } else {
                TokenCategory::Identifier
            }
        }
        "type_identifier" | "boolean_type" | "void_type" => TokenCategory::TypeName,
        "string_literal"
        | "character_literal"
        | "text_block"
        | "decimal_integer_literal"
        | "hex_integer_literal"
        | "octal_integer_literal"
        | "binary_integer_literal"
        | "decimal_floating_point_literal"
        | "hex_floating_point_literal"
        | "true"
        | "false"
        | "null_literal" => TokenCategory::Literal,
        _ => {
            if node
                .parent()
                .is_some_and(|p| matches!(p.kind(), "integral_type" | "floating_point_type"))
            {
                TokenCategory::TypeName
            } else {
                TokenCategory::Other
            }
        }
    }
}

struct Ctx<'a> {
    src: &'a [u8],
    path: &'a str,
    source_folder: String,
    package: String,
}

impl Ctx<'_> {
    fn tokens(&self, node: Node<'_>) -> Vec<Token> {
        let mut out = Vec::new();
        collect_tokens(node, self.src, &mut out);
        out
    }

    fn text(&self, node: Node<'_>) -> String {
        join(&self.tokens(node))
    }

    fn compact(&self, node: Node<'_>) -> String {
        self.tokens(node).iter().map(|t| t.text.as_str()).collect()
    }

    fn visit_type(&self, node: Node<'_>, chain: &[String], out: &mut Vec<TypeDeclarationInfo>) {
        let kind = match node.kind() {
            "class_declaration" => TypeKind::Class,
            "interface_declaration" => TypeKind::Interface,
            "enum_declaration" => TypeKind::Enum,
            "record_declaration" => TypeKind::Record,
            "annotation_type_declaration" => TypeKind::Annotation,
            _ => return,
        };
        let Some(name) = node.child_by_field_name("name") else {
            return;
        };
        let name = self.text(name);
        let key = TypeKey {
            source_folder: self.source_folder.clone(),
            package: self.package.clone(),
            nesting_chain: chain.to_vec(),
            name: name.clone(),
        };
        let superclass = node
            .child_by_field_name("superclass")
            .and_then(|s| s.named_child(0))
            .map(|t| self.simple_type_name(t));
        let slot = out.len();
        out.push(TypeDeclarationInfo {
            key: key.clone(),
            kind,
            path: self.path.to_string(),
            superclass,
            methods: Vec::new(),
            start_line: node.start_position().row + 1,
            end_line: node.end_position().row + 1,
        });
        let mut inner_chain = chain.to_vec();
        inner_chain.push(name);
        let mut methods = Vec::new();
        if let Some(body) = node.child_by_field_name("body") {
            let mut members: Vec<Node<'_>> = Vec::new();
            for m in body.named_children(&mut body.walk()) {
                if m.kind() == "enum_body_declarations" {
                    members.extend(m.named_children(&mut m.walk()));
                } else {
                    members.push(m);
                }
            }
            for m in members {
                match m.kind() {
                    "method_declaration" | "constructor_declaration" | "compact_constructor_declaration" => {
                        methods.push(self.method(m, &key));
                    }
                    _ => self.visit_type(m, &inner_chain, out),
                }
            }
        }
        out[slot].methods = methods;
    }

    fn simple_type_name(&self, t: Node<'_>) -> String {
        match t.kind() {
            "generic_type" => t
                .named_child(0)
                .map(|n| self.simple_type_name(n))
                .unwrap_or_default(),
            "scoped_type_identifier" => {
                let last = t.named_child(t.named_child_count().saturating_sub(1));
                last.map(|n| self.simple_type_name(n)).unwrap_or_default()
            }
            _ => self.compact(t),
        }
    }

    fn method(&self, node: Node<'_>, container: &TypeKey) -> MethodDeclarationInfo {
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n))
            .unwrap_or_default();
        let mut parameter_types = Vec::new();
        if let Some(params) = node.child_by_field_name("parameters") {
            for p in params.named_children(&mut params.walk()) {
                match p.kind() {
                    "formal_parameter" => {
                        let mut ty = p
                            .child_by_field_name("type")
                            .map(|t| self.compact(t))
                            .unwrap_or_default();
                        if let Some(d) = p.child_by_field_name("dimensions") {
                            ty.push_str(&self.compact(d));
                        }
                        parameter_types.push(ty);
                    }
                    "spread_parameter" => {
                        let ty = p
                            .named_children(&mut p.walk())
                            .find(|c| {
                                !matches!(
                                    c.kind(),
                                    "modifiers" | "annotation" | "marker_annotation" | "variable_declarator"
                                )
                            })
                            .map(|t| self.compact(t))
                            .unwrap_or_default();
                        parameter_types.push(format!("{ty}..."));
                    }
                    _ => {}
                }
            }
        }
        let return_type = match node.kind() {
            "method_declaration" => {
                let mut ty = node
                    .child_by_field_name("type")
                    .map(|t| self.compact(t))
                    .unwrap_or_default();
                if let Some(d) = node.child_by_field_name("dimensions") {
                    ty.push_str(&self.compact(d));
                }
                Some(ty)
            }
            _ => None,
        };
        let body_node = node.child_by_field_name("body");
        let body = match body_node {
            Some(b) => self.block_node(b, StatementKind::Block, Vec::new(), self.statements_of_block(b)),
            None => StatementNode {
                kind: StatementKind::Block,
                expressions: Vec::new(),
                children: Vec::new(),
                start_line: node.end_position().row + 1,
                end_line: node.end_position().row + 1,
                text: String::new(),
                text_hash: content_hash(""),
                tokens: Vec::new(),
                is_else: false,
            },
        };
        let body_hash = body.body_hash();
        MethodDeclarationInfo {
            signature: MethodSignature {
                name,
                parameter_types,
                return_type,
            },
            container: container.clone(),
            path: self.path.to_string(),
            has_body: body_node.is_some(),
            body,
            body_hash,
            start_line: node.start_position().row + 1,
            end_line: node.end_position().row + 1,
        }
    }

    fn block_node(
        &self,
        node: Node<'_>,
        kind: StatementKind,
        expressions: Vec<String>,
        children: Vec<StatementNode>,
    ) -> StatementNode {
        let text = self.text(node);
        StatementNode {
            kind,
            expressions,
            children,
            start_line: node.start_position().row + 1,
            end_line: node.end_position().row + 1,
            text_hash: content_hash(&text),
            text,
            tokens: Vec::new(),
            is_else: false,
        }
    }

    fn leaf(&self, node: Node<'_>) -> StatementNode {
        let tokens = self.tokens(node);
        self.leaf_from_tokens(node, tokens)
    }

    fn leaf_from_tokens(&self, node: Node<'_>, tokens: Vec<Token>) -> StatementNode {
        let text = join(&tokens);
        StatementNode {
            kind: StatementKind::Leaf,
            expressions: Vec::new(),
            children: Vec::new(),
            start_line: node.start_position().row + 1,
            end_line: node.end_position().row + 1,
            text_hash: content_hash(&text),
            text,
            tokens,
            is_else: false,
        }
    }

    fn statements_of_block(&self, block: Node<'_>) -> Vec<StatementNode> {
        block
            .named_children(&mut block.walk())
            .filter(|c| !is_comment(*c))
            .filter_map(|c| self.statement(c))
            .collect()
    }

    /// Statements of a loop/if body: a block is flattened, a single
    /// statement stands alone.
    fn body_statements(&self, body: Option<Node<'_>>) -> Vec<StatementNode> {
        match body {
            Some(b) if b.kind() == "block" => self.statements_of_block(b),
            Some(b) => self.statement(b).into_iter().collect(),
            None => Vec::new(),
        }
    }

    fn paren_inner(&self, node: Option<Node<'_>>) -> String {
        let Some(node) = node else {
            return String::new();
        };
        let toks = self.tokens(node);
        if node.kind() == "parenthesized_expression" && toks.len() >= 2 {
            join(&toks[1..toks.len() - 1])
        } else {
            join(&toks)
        }
    }

    fn statement(&self, node: Node<'_>) -> Option<StatementNode> {
        let field = |name: &str| node.child_by_field_name(name);
        let n = match node.kind() {
            "if_statement" => {
                let cond = self.paren_inner(field("condition"));
                let mut children = self.body_statements(field("consequence"));
                if let Some(alt) = field("alternative") {
                    let branch = match alt.kind() {
                        "block" => Some(self.block_node(
                            alt,
                            StatementKind::Block,
                            Vec::new(),
                            self.statements_of_block(alt),
                        )),
                        _ => self.statement(alt),
                    };
                    if let Some(mut b) = branch {
                        b.is_else = true;
                        children.push(b);
                    }
                }
                self.block_node(node, StatementKind::If, vec![cond], children)
            }
            "while_statement" => {
                let cond = self.paren_inner(field("condition"));
                let children = self.body_statements(field("body"));
                self.block_node(node, StatementKind::While, vec![cond], children)
            }
            "do_statement" => {
                let cond = self.paren_inner(field("condition"));
                let children = self.body_statements(field("body"));
                self.block_node(node, StatementKind::DoWhile, vec![cond], children)
            }
            "for_statement" => {
                let body = field("body");
                let mut header = Vec::new();
                let mut cursor = node.walk();
                for c in node.children(&mut cursor) {
                    if Some(c.id()) == body.map(|b| b.id()) {
                        break;
                    }
                    collect_tokens(c, self.src, &mut header);
                }
                // drop `for (` and the closing `)`
                let inner = if header.len() >= 3 {
                    &header[2..header.len() - 1]
                } else {
                    &header[..0]
                };
                let expressions = split_top_level(inner, ";");
                let children = self.body_statements(body);
                self.block_node(node, StatementKind::For, expressions, children)
            }
            "enhanced_for_statement" => {
                let mut decl = Vec::new();
                if let Some(t) = field("type") {
                    collect_tokens(t, self.src, &mut decl);
                }
                if let Some(n) = field("name") {
                    collect_tokens(n, self.src, &mut decl);
                }
                if let Some(d) = field("dimensions") {
                    collect_tokens(d, self.src, &mut decl);
                }
                let value = field("value").map(|v| self.text(v)).unwrap_or_default();
                let children = self.body_statements(field("body"));
                self.block_node(node, StatementKind::EnhancedFor, vec![join(&decl), value], children)
            }
            "try_statement" | "try_with_resources_statement" => {
                let mut expressions = Vec::new();
                if let Some(res) = field("resources") {
                    for r in res.named_children(&mut res.walk()) {
                        if !is_comment(r) {
                            expressions.push(self.text(r));
                        }
                    }
                }
                let mut children = field("body")
                    .map(|b| self.statements_of_block(b))
                    .unwrap_or_default();
                let mut cursor = node.walk();
                for c in node.named_children(&mut cursor) {
                    match c.kind() {
                        "catch_clause" => {
                            let param = c
                                .named_children(&mut c.walk())
                                .find(|p| p.kind() == "catch_formal_parameter")
                                .map(|p| self.text(p))
                                .unwrap_or_default();
                            let body = c
                                .child_by_field_name("body")
                                .map(|b| self.statements_of_block(b))
                                .unwrap_or_default();
                            children.push(self.block_node(c, StatementKind::Catch, vec![param], body));
                        }
                        "finally_clause" => {
                            let body = c
                                .named_children(&mut c.walk())
                                .find(|b| b.kind() == "block")
                                .map(|b| self.statements_of_block(b))
                                .unwrap_or_default();
                            children.push(self.block_node(c, StatementKind::Finally, Vec::new(), body));
                        }
                        _ => {}
                    }
                }
                self.block_node(node, StatementKind::Try, expressions, children)
            }
            "switch_expression" => {
                let cond = self.paren_inner(field("condition"));
                let mut children = Vec::new();
                if let Some(body) = field("body") {
                    for group in body.named_children(&mut body.walk()) {
                        self.switch_group(group, &mut children);
                    }
                }
                self.block_node(node, StatementKind::Switch, vec![cond], children)
            }
            "synchronized_statement" => {
                let lock = node
                    .named_children(&mut node.walk())
                    .find(|c| c.kind() == "parenthesized_expression");
                let lock = self.paren_inner(lock);
                let children = field("body")
                    .map(|b| self.statements_of_block(b))
                    .unwrap_or_default();
                self.block_node(node, StatementKind::Synchronized, vec![lock], children)
            }
            "block" => {
                let children = self.statements_of_block(node);
                self.block_node(node, StatementKind::Block, Vec::new(), children)
            }
            "labeled_statement" => {
                let inner = node
                    .named_children(&mut node.walk())
                    .filter(|c| c.kind() != "identifier" && !is_comment(*c))
                    .last()?;
                return self.statement(inner);
            }
            "class_declaration"
            | "interface_declaration"
            | "enum_declaration"
            | "record_declaration"
            | "annotation_type_declaration"
            | ";" => return None,
            _ => self.leaf(node),
        };
        Some(n)
    }

    fn switch_group(&self, group: Node<'_>, out: &mut Vec<StatementNode>) {
        let mut cursor = group.walk();
        let children: Vec<Node<'_>> = group.children(&mut cursor).collect();
        let mut i = 0;
        while i < children.len() {
            let c = children[i];
            if c.kind() == "switch_label" {
                let mut toks = self.tokens(c);
                if let Some(sep) = children.get(i + 1).filter(|s| matches!(s.kind(), ":" | "->")) {
                    collect_tokens(*sep, self.src, &mut toks);
                    i += 1;
                }
                out.push(self.leaf_from_tokens(c, toks));
            } else if c.is_named() && !is_comment(c) {
                if group.kind() == "switch_rule" && c.kind() == "block" {
                    out.extend(self.statements_of_block(c));
                } else if let Some(s) = self.statement(c) {
                    out.push(s);
                }
            }
            i += 1;
        }
    }
}

/// Splits tokens on `sep` at parenthesis depth zero; yields joined text of
/// each part (empty parts kept).
fn split_top_level(tokens: &[Token], sep: &str) -> Vec<String> {
    let mut parts = vec![Vec::new()];
    let mut depth = 0i32;
    for t in tokens {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            s if s == sep && depth == 0 => {
                parts.push(Vec::new());
                continue;
            }
            _ => {}
        }
        parts.last_mut().expect("non-empty").push(t.clone());
    }
    parts.iter().map(|p| join(p)).collect()
}
