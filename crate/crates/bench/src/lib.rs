//! Inputs shared by the benchmarks.

/// A method body of `n` statements with nested blocks every few lines.
/// `variant` perturbs some statements so that two variants map partially.
pub fn body(n: usize, variant: usize) -> String {
    let mut s = String::new();
    for i in 0..n {
        let arg = if (i + variant).is_multiple_of(5) { format!("v{variant}") } else { format!("x{i}") };
        match i % 6 {
            0 => s.push_str(&format!("if ({arg} > {i}) {{\n    emit({arg}, {i});\n}}\n")),
            3 => s.push_str(&format!("for (int k = 0; k < {i}; k++) {{\n    store(k, {arg});\n}}\n")),
            _ => s.push_str(&format!("update({arg}, {i});\n")),
        }
    }
    s
}
