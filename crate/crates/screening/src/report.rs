//! Structured command output.
//!
//! A report is an ordered tree of string leaves. Field order is insertion
//! order, so rendering the same report twice gives the same bytes.

use std::fmt::Write;

use screening_core::equilibrium::SeqSet;
use screening_core::{Horizon, Rational};

/// Output flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Indented `key: value` text.
    Plain,
    /// One `dotted.path=value` line per leaf.
    Machine,
}

/// A report node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// Leaf value.
    Value(String),
    /// Ordered list.
    List(Vec<Node>),
    /// Ordered map.
    Map(Vec<(String, Node)>),
}

impl From<String> for Node {
    fn from(v: String) -> Self {
        Node::Value(v)
    }
}

impl From<&str> for Node {
    fn from(v: &str) -> Self {
        Node::Value(v.to_string())
    }
}

impl From<Rational> for Node {
    fn from(v: Rational) -> Self {
        Node::Value(v.to_string())
    }
}

impl From<Map> for Node {
    fn from(v: Map) -> Self {
        Node::Map(v.0)
    }
}

macro_rules! display_node {
    ($($t:ty),*) => {$(
        impl From<$t> for Node {
            fn from(v: $t) -> Self {
                Node::Value(v.to_string())
            }
        }
    )*};
}
display_node!(usize, u64, u128, i64, bool);

impl<T: Into<Node>> From<Vec<T>> for Node {
    fn from(v: Vec<T>) -> Self {
        Node::List(v.into_iter().map(Into::into).collect())
    }
}

/// Builder for an ordered map node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Map(Vec<(String, Node)>);

impl Map {
    /// Empty map.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a field.
    pub fn field(mut self, key: &str, value: impl Into<Node>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    /// Appends a field in place.
    pub fn push(&mut self, key: &str, value: impl Into<Node>) {
        self.0.push((key.to_string(), value.into()));
    }

    /// Appends every field of `other`.
    pub fn extend(mut self, other: Map) -> Self {
        self.0.extend(other.0);
        self
    }

    /// Renders the map as a whole document.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Plain => plain_fields(&self.0, 0, &mut out),
            Format::Machine => {
                for (k, v) in &self.0 {
                    machine(k, v, &mut out);
                }
            }
        }
        out
    }
}

fn plain_fields(fields: &[(String, Node)], indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for (key, node) in fields {
        match node {
            Node::Value(v) => {
                let _ = writeln!(out, "{pad}{key}: {v}");
            }
            Node::List(items) if items.is_empty() => {
                let _ = writeln!(out, "{pad}{key}: []");
            }
            Node::Map(m) if m.is_empty() => {
                let _ = writeln!(out, "{pad}{key}: {{}}");
            }
            Node::List(items) => {
                let _ = writeln!(out, "{pad}{key}:");
                plain_items(items, indent + 1, out);
            }
            Node::Map(m) => {
                let _ = writeln!(out, "{pad}{key}:");
                plain_fields(m, indent + 1, out);
            }
        }
    }
}

fn plain_items(items: &[Node], indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for item in items {
        match item {
            Node::Value(v) => {
                let _ = writeln!(out, "{pad}- {v}");
            }
            Node::List(inner) => {
                let _ = writeln!(out, "{pad}-");
                plain_items(inner, indent + 1, out);
            }
            Node::Map(m) => {
                let _ = writeln!(out, "{pad}-");
                plain_fields(m, indent + 1, out);
            }
        }
    }
}

fn machine(path: &str, node: &Node, out: &mut String) {
    match node {
        Node::Value(v) => {
            let _ = writeln!(out, "{path}={v}");
        }
        Node::List(items) => {
            if items.is_empty() {
                let _ = writeln!(out, "{path}=[]");
            }
            for (i, item) in items.iter().enumerate() {
                machine(&format!("{path}.{i}"), item, out);
            }
        }
        Node::Map(m) => {
            for (k, v) in m {
                machine(&format!("{path}.{k}"), v, out);
            }
        }
    }
}

/// Real number with 12 significant digits, trailing zeros trimmed.
pub fn real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `{a, b, c}` using sequence labels.
pub fn set(h: &Horizon<'_>, members: &SeqSet) -> String {
    let labels: Vec<String> = members.iter().map(|&x| h.label(x)).collect();
    format!("{{{}}}", labels.join(", "))
}
