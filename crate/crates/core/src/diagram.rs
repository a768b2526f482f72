//! Black/white dot wiring diagrams of the basis elements `C_π`.
//!
//! Left nodes are the column (input) legs of `σ(π)`, right nodes the row
//! (output) legs; leg `j` input feeds output `π(j)`, so the bare permutation
//! has wires `L_j – R_π(j)`. Transposing leg `j` swaps its row and column
//! index, which moves every wire end at leg `j` to the other side. Left legs
//! `0..=a` are black and the rest white; right legs `0..=a` are white and
//! the rest black. Every wire then joins a black node to a white one.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::equivariant::{choi_basis_element, EquivariantSpec};
use crate::error::{ensure, Result};
use crate::perm::Permutation;
use crate::scalar::Real;
use crate::tensor::TensorShape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }

    fn tag(self) -> char {
        match self {
            Self::Left => 'L',
            Self::Right => 'R',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub side: Side,
    /// 0-based leg.
    pub leg: usize,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.tag(), self.leg + 1)
    }
}

impl Serialize for Node {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WiringDiagram {
    pub a: usize,
    pub b: usize,
    pub left: Vec<Color>,
    pub right: Vec<Color>,
    /// `(black, white)` endpoint pairs, sorted.
    pub edges: Vec<(Node, Node)>,
}

impl WiringDiagram {
    pub fn legs(&self) -> usize {
        self.a + self.b + 1
    }

    pub fn color(&self, node: Node) -> Color {
        match node.side {
            Side::Left => self.left[node.leg],
            Side::Right => self.right[node.leg],
        }
    }

    /// Every node appears in exactly one edge and every edge is black–white.
    pub fn is_valid_matching(&self) -> bool {
        let k1 = self.legs();
        let mut seen = vec![[false; 2]; k1];
        for &(u, v) in &self.edges {
            for node in [u, v] {
                if node.leg >= k1 {
                    return false;
                }
                let slot = &mut seen[node.leg][node.side as usize];
                if *slot {
                    return false;
                }
                *slot = true;
            }
            if self.color(u) != Color::Black || self.color(v) != Color::White {
                return false;
            }
        }
        seen.iter().all(|s| s[0] && s[1])
    }
}

fn colors(a: usize, legs: usize) -> (Vec<Color>, Vec<Color>) {
    let left = (0..legs).map(|j| if j <= a { Color::Black } else { Color::White }).collect();
    let right = (0..legs).map(|j| if j <= a { Color::White } else { Color::Black }).collect();
    (left, right)
}

pub fn wiring(pi: &Permutation, a: usize, b: usize) -> Result<WiringDiagram> {
    let legs = a + b + 1;
    ensure!(
        pi.degree() == legs,
        Shape,
        "permutation {pi} has degree {}, signature ({a},{b}) needs {legs}",
        pi.degree()
    );
    let (left, right) = colors(a, legs);
    let bend = |node: Node| {
        if node.leg <= a {
            Node {
                side: node.side.flip(),
                leg: node.leg,
            }
        } else {
            node
        }
    };
    let mut d = WiringDiagram {
        a,
        b,
        left,
        right,
        edges: Vec::with_capacity(legs),
    };
    for j in 0..legs {
        let u = bend(Node { side: Side::Left, leg: j });
        let v = bend(Node {
            side: Side::Right,
            leg: pi.apply(j),
        });
        let edge = if d.color(u) == Color::Black { (u, v) } else { (v, u) };
        d.edges.push(edge);
    }
    d.edges.sort();
    Ok(d)
}

/// Rebuilds the 0/1 matrix encoded by the wires (left leg `j` ↔ column digit
/// `j`, right leg `j` ↔ row digit `j`, one Kronecker delta per wire) and
/// compares it entrywise with `C_π` at leg dimension `n`.
pub fn verify_wiring(d: &WiringDiagram, pi: &Permutation, n: usize) -> bool {
    if !d.is_valid_matching() || pi.degree() != d.legs() {
        return false;
    }
    let Ok(target) = choi_basis_element::<f64>(n, d.a, d.b, pi) else {
        return false;
    };
    let shape = TensorShape::new(d.legs(), n);
    let digit = |node: Node, r: &[usize], c: &[usize]| match node.side {
        Side::Left => c[node.leg],
        Side::Right => r[node.leg],
    };
    for row in 0..shape.total() {
        let r = shape.unflatten(row);
        for col in 0..shape.total() {
            let c = shape.unflatten(col);
            let on = d.edges.iter().all(|&(u, v)| digit(u, &r, &c) == digit(v, &r, &c));
            let want = target[(row, col)];
            let expected = if on { 1.0 } else { 0.0 };
            if want.re != expected || want.im != 0.0 {
                return false;
            }
        }
    }
    true
}

fn wire_kind(u: Node, v: Node) -> &'static str {
    match (u.side, v.side) {
        (Side::Left, Side::Left) => "cup",
        (Side::Right, Side::Right) => "cap",
        _ if u.leg == v.leg => "straight",
        _ => "cross",
    }
}

fn color_tag(c: Color) -> char {
    match c {
        Color::Black => 'B',
        Color::White => 'W',
    }
}

/// Fixed-width table: one row per leg with color and wire letter on each side,
/// then the wire list.
pub fn render_text(d: &WiringDiagram, pi: &Permutation) -> String {
    let mut label = std::collections::HashMap::new();
    for (i, &(u, v)) in d.edges.iter().enumerate() {
        let letter = (b'a' + i as u8) as char;
        label.insert(u, letter);
        label.insert(v, letter);
    }
    let mut out = String::new();
    let _ = writeln!(out, "pi = {pi}  (a,b) = ({},{})", d.a, d.b);
    let _ = writeln!(out, "leg  left  right");
    for leg in 0..d.legs() {
        let l = Node { side: Side::Left, leg };
        let r = Node { side: Side::Right, leg };
        let _ = writeln!(
            out,
            "{:>3}  {}:{}   {}:{}",
            leg + 1,
            color_tag(d.left[leg]),
            label[&l],
            color_tag(d.right[leg]),
            label[&r]
        );
    }
    let _ = writeln!(out, "wires");
    for (i, &(u, v)) in d.edges.iter().enumerate() {
        let _ = writeln!(out, "  {}: {u} - {v}  {}", (b'a' + i as u8) as char, wire_kind(u, v));
    }
    out
}

fn dot_nodes(out: &mut String, d: &WiringDiagram, prefix: &str, indent: &str) {
    for side in [Side::Left, Side::Right] {
        let _ = write!(out, "{indent}{{ rank=same;");
        for leg in 0..d.legs() {
            let node = Node { side, leg };
            let fill = match d.color(node) {
                Color::Black => "black",
                Color::White => "white",
            };
            let _ = write!(out, " {prefix}{node} [fillcolor={fill}, xlabel=\"{}\"];", leg + 1);
        }
        let _ = writeln!(out, " }}");
    }
    // Invisible spine keeps legs in order within each column.
    for side in [Side::Left, Side::Right] {
        let chain: Vec<String> = (0..d.legs())
            .map(|leg| format!("{prefix}{}", Node { side, leg }))
            .collect();
        if chain.len() > 1 {
            let _ = writeln!(out, "{indent}{} [style=invis];", chain.join(" -- "));
        }
    }
    for &(u, v) in &d.edges {
        let _ = writeln!(out, "{indent}{prefix}{u} -- {prefix}{v};");
    }
}

const DOT_HEADER: &str = "  rankdir=LR;\n  node [shape=circle, style=filled, label=\"\", width=0.25, color=black];\n";

/// A single diagram as an undirected DOT graph.
pub fn render_dot(d: &WiringDiagram, pi: &Permutation) -> String {
    let mut out = String::from("graph wiring {\n");
    out.push_str(DOT_HEADER);
    let _ = writeln!(out, "  label=\"C_pi, pi = {pi}, (a,b) = ({},{})\";", d.a, d.b);
    dot_nodes(&mut out, d, "", "  ");
    out.push_str("}\n");
    out
}

/// A labeled sum of diagrams, one cluster per term.
pub fn render_dot_sum(terms: &[(String, Permutation, WiringDiagram)]) -> String {
    let mut out = String::from("graph wiring_sum {\n");
    out.push_str(DOT_HEADER);
    for (i, (coeff, pi, d)) in terms.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let escaped = coeff.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "    label=\"{}{escaped} · {pi}\";", if i == 0 { "" } else { "+ " });
        dot_nodes(&mut out, d, &format!("t{i}_"), "    ");
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn format_coeff(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else {
        format!("({re}{:+}i)", im)
    }
}

/// Nonzero terms of a coefficient list with numeric labels.
pub fn spec_terms<T: Real>(spec: &EquivariantSpec<T>) -> Result<Vec<(String, Permutation, WiringDiagram)>> {
    spec.terms()
        .into_iter()
        .map(|(pi, v)| {
            let d = wiring(&pi, spec.a, spec.b)?;
            Ok((format_coeff(v.re.to_f64_lossy(), v.im.to_f64_lossy()), pi, d))
        })
        .collect()
}

/// The four terms of the collins family `Aᵗ⊗1 + 1⊗A + Tr(A)(α·1 + β·B)`,
/// labeled `1, 1, α, β`.
pub fn collins_terms() -> Vec<(String, Permutation, WiringDiagram)> {
    [("1", "(1 2)"), ("1", "(1 3)"), ("α", "()"), ("β", "(2 3)")]
        .into_iter()
        .map(|(label, cyc)| {
            let pi = Permutation::parse_cycles(cyc, 3).expect("fixed cycle text");
            let d = wiring(&pi, 1, 1).expect("degree 3 matches (1,1)");
            (label.to_string(), pi, d)
        })
        .collect()
}
