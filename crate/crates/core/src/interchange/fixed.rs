//! Deterministic JSON rendering with fixed six-decimal floats.
//!
//! serde_json prints the shortest round-trip representation of a float, which
//! makes diffs noisy. Manifests and configs go through this writer instead.

use std::fmt::Write;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Num(f64),
    Str(String),
    Arr(Vec<Node>),
    Obj(Vec<(&'static str, Node)>),
}

pub(crate) fn fmt_fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

impl Node {
    pub(crate) fn obj(fields: Vec<(&'static str, Node)>) -> Self {
        Node::Obj(fields)
    }

    pub(crate) fn nums(xs: &[f64]) -> Self {
        Node::Arr(xs.iter().copied().map(Node::Num).collect())
    }

    pub(crate) fn str(s: impl Into<String>) -> Self {
        Node::Str(s.into())
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Node::Arr(_) | Node::Obj(_))
    }

    fn is_flat(&self) -> bool {
        match self {
            Node::Arr(xs) => xs.iter().all(Node::is_scalar),
            Node::Obj(fs) => fs.iter().all(|(_, v)| v.is_scalar() || v.is_flat_array()),
            _ => true,
        }
    }

    fn is_flat_array(&self) -> bool {
        matches!(self, Node::Arr(xs) if xs.iter().all(Node::is_scalar))
    }

    pub(crate) fn render(&self) -> String {
        let mut out = String::new();
        self.write_block(&mut out, 0);
        out.push('\n');
        out
    }

    fn write_inline(&self, out: &mut String) {
        match self {
            Node::Num(x) => out.push_str(&fmt_fixed(*x)),
            Node::Str(s) => out.push_str(&serde_json::to_string(s).expect("string serialization")),
            Node::Arr(xs) => {
                out.push('[');
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    x.write_inline(out);
                }
                out.push(']');
            }
            Node::Obj(fs) => {
                out.push('{');
                for (i, (k, v)) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "\"{k}\": ");
                    v.write_inline(out);
                }
                out.push('}');
            }
        }
    }

    fn write_block(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth + 1);
        let close = "  ".repeat(depth);
        match self {
            Node::Obj(fs) if !fs.is_empty() => {
                out.push_str("{\n");
                for (i, (k, v)) in fs.iter().enumerate() {
                    let _ = write!(out, "{pad}\"{k}\": ");
                    v.write_block(out, depth + 1);
                    if i + 1 < fs.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&close);
                out.push('}');
            }
            Node::Arr(xs) if !xs.is_empty() && !self.is_flat() => {
                out.push_str("[\n");
                for (i, x) in xs.iter().enumerate() {
                    out.push_str(&pad);
                    if x.is_flat() {
                        x.write_inline(out);
                    } else {
                        x.write_block(out, depth + 1);
                    }
                    if i + 1 < xs.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&close);
                out.push(']');
            }
            other => other.write_inline(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_six_decimals() {
        assert_eq!(fmt_fixed(1.0), "1.000000");
        assert_eq!(fmt_fixed(2.5), "2.500000");
        assert_eq!(fmt_fixed(-0.0), "0.000000");
        assert_eq!(fmt_fixed(-1e-9), "0.000000");
        assert_eq!(fmt_fixed(1.2345675), "1.234568");
    }

    #[test]
    fn renders_nested_layout() {
        let n = Node::obj(vec![
            ("id", Node::str("a")),
            ("xs", Node::nums(&[1.0, 2.5, 0.0])),
            (
                "rows",
                Node::Arr(vec![Node::obj(vec![("t", Node::Num(0.5)), ("k", Node::str("x"))])]),
            ),
        ]);
        let s = n.render();
        assert_eq!(
            s,
            "{\n  \"id\": \"a\",\n  \"xs\": [1.000000, 2.500000, 0.000000],\n  \"rows\": [\n    {\"t\": 0.500000, \"k\": \"x\"}\n  ]\n}\n"
        );
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0]["k"], "x");
    }
}
