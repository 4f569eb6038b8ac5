//! The Bruhat covering graph and its quantum analogue, the transition
//! graph, with the labelled cyclic-invariance check and DOT export.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::Error;
use crate::perm::Permutation;

/// Largest rank for which the graphs are enumerated.
pub const MAX_GRAPH_RANK: usize = 7;

/// A digraph on all of S_n with (a, b)-labelled edges; an edge
/// (u, w, (a, b)) always satisfies w = u·s_ab.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    n: usize,
    edges: BTreeSet<(Permutation, Permutation, (u8, u8))>,
}

impl LabeledDigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: &Permutation, w: &Permutation, label: (u8, u8)) -> bool {
        self.edges.contains(&(u.clone(), w.clone(), label))
    }

    pub fn edges(&self) -> impl Iterator<Item = &(Permutation, Permutation, (u8, u8))> {
        self.edges.iter()
    }

    /// Labelled invariance under u ↦ o∘u: every edge must map to an edge
    /// with the same (a, b) label. Edge counts are preserved by the shift
    /// bijection, so checking membership of every image suffices.
    pub fn cyclic_invariance_check(&self) -> bool {
        self.shift_violation().is_none()
    }

    /// The first edge (in canonical order) whose shift image is missing.
    pub fn shift_violation(&self) -> Option<(Permutation, Permutation, (u8, u8))> {
        let o = Permutation::cycle(self.n);
        self.edges
            .iter()
            .find(|(u, w, label)| !self.edges.contains(&(o.compose(u), o.compose(w), *label)))
            .cloned()
    }

    /// DOT text ranked by length, longest permutation on top, edges
    /// labelled "ab" as in hand-drawn pictures of these graphs.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph {name} {{\n"));
        out.push_str("  rankdir=BT;\n  node [shape=ellipse];\n");
        let mut by_length: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
        for w in Permutation::all(self.n) {
            by_length.entry(w.length()).or_default().push(w);
        }
        for (_, group) in by_length {
            out.push_str("  { rank=same;");
            for w in group {
                out.push_str(&format!(" \"{w}\";"));
            }
            out.push_str(" }\n");
        }
        for (u, w, (a, b)) in &self.edges {
            out.push_str(&format!("  \"{u}\" -> \"{w}\" [label=\"{a}{b}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    /// JSON edge list: {n, edges: [{from, to, label: [a, b]}, …]}.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "edges": self
                .edges
                .iter()
                .map(|(u, w, (a, b))| json!({
                    "from": u.to_string(),
                    "to": w.to_string(),
                    "label": [a, b],
                }))
                .collect::<Vec<_>>(),
        })
    }
}

fn build_graph(
    n: usize,
    keep: impl Fn(&Permutation, usize, usize) -> bool,
) -> Result<LabeledDigraph, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if n > MAX_GRAPH_RANK {
        return Err(Error::SizeGuard(format!(
            "graphs support n <= {MAX_GRAPH_RANK}, got {n}"
        )));
    }
    let mut edges = BTreeSet::new();
    for u in Permutation::all(n) {
        for a in 1..n {
            for b in a + 1..=n {
                if keep(&u, a, b) {
                    let w = u.right_multiply_transposition(a, b);
                    edges.insert((u.clone(), w, (a as u8, b as u8)));
                }
            }
        }
    }
    Ok(LabeledDigraph { n, edges })
}

/// The Bruhat covering digraph: u → u·s_ab when the length rises by one.
pub fn bruhat_graph(n: usize) -> Result<LabeledDigraph, Error> {
    build_graph(n, |u, a, b| u.is_cover_up(a, b))
}

/// The transition graph: Bruhat covers plus the deep-drop edges, i.e. the
/// support of multiplication by the generators σ_{s_k}.
pub fn transition_graph(n: usize) -> Result<LabeledDigraph, Error> {
    build_graph(n, |u, a, b| u.is_cover_up(a, b) || u.is_deep_drop(a, b))
}

/// Orbits of S_n under w ↦ o∘w, each listed from its lexicographically
/// smallest unvisited representative.
pub fn orbits(n: usize) -> Vec<Vec<Permutation>> {
    let o = Permutation::cycle(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in Permutation::all(n) {
        if seen.contains(&w) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut current = w;
        while seen.insert(current.clone()) {
            orbit.push(current.clone());
            current = o.compose(&current);
        }
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::QHClass;
    use crate::monk::{monk_multiply, t_op};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn edge(g: &LabeledDigraph, u: &str, w: &str, a: u8, b: u8) -> bool {
        g.has_edge(&p(u), &p(w), (a, b))
    }

    #[test]
    fn bruhat_rank_three_matches_the_picture() {
        let g = bruhat_graph(3).unwrap();
        assert_eq!(g.edge_count(), 8);
        for (u, w, a, b) in [
            ("123", "213", 1, 2),
            ("123", "132", 2, 3),
            ("213", "231", 2, 3),
            ("213", "312", 1, 3),
            ("132", "312", 1, 2),
            ("132", "231", 1, 3),
            ("231", "321", 1, 2),
            ("312", "321", 2, 3),
        ] {
            assert!(
                edge(&g, u, w, a, b),
                "missing Bruhat edge {u}->{w} ({a}{b})"
            );
        }
    }

    #[test]
    fn bruhat_rank_two_is_a_single_edge() {
        let g = bruhat_graph(2).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(edge(&g, "12", "21", 1, 2));
    }

    #[test]
    fn bruhat_edge_count_matches_brute_force() {
        for n in 2..=5 {
            let g = bruhat_graph(n).unwrap();
            let mut count = 0;
            for u in Permutation::all(n) {
                for a in 1..n {
                    for b in a + 1..=n {
                        if u.right_multiply_transposition(a, b).length() == u.length() + 1 {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(g.edge_count(), count);
        }
    }

    #[test]
    fn transition_rank_three_matches_the_picture() {
        let g = transition_graph(3).unwrap();
        assert_eq!(g.edge_count(), 15);
        let bruhat = bruhat_graph(3).unwrap();
        for e in bruhat.edges() {
            assert!(g.has_edge(&e.0, &e.1, e.2), "Bruhat edge missing from Tr");
        }
        for (u, w, a, b) in [
            ("321", "231", 1, 2),
            ("321", "312", 2, 3),
            ("321", "123", 1, 3),
            ("231", "213", 2, 3),
            ("312", "132", 1, 2),
            ("213", "123", 1, 2),
            ("132", "123", 2, 3),
        ] {
            assert!(edge(&g, u, w, a, b), "missing drop edge {u}->{w} ({a}{b})");
        }
    }

    #[test]
    fn transition_edges_are_exactly_the_monk_support() {
        for n in 2..=4 {
            let g = transition_graph(n).unwrap();
            let mut from_monk = BTreeSet::new();
            for u in Permutation::all(n) {
                let x = QHClass::basis(&u);
                for k in 1..n {
                    for (w, _) in monk_multiply(k, &x).iter() {
                        from_monk.insert((u.clone(), w.clone()));
                    }
                }
            }
            let from_graph: BTreeSet<(Permutation, Permutation)> =
                g.edges().map(|(u, w, _)| (u.clone(), w.clone())).collect();
            assert_eq!(from_graph, from_monk);
            // and every labelled edge is a nonzero T_ij application
            for (u, w, (a, b)) in g.edges() {
                let image = t_op(&QHClass::basis(u), *a as usize, *b as usize);
                assert!(!image.coefficient(w).is_zero());
            }
        }
    }

    #[test]
    fn transition_graphs_are_cyclically_invariant() {
        for n in 2..=5 {
            let g = transition_graph(n).unwrap();
            assert!(g.cyclic_invariance_check(), "Tr_{n} not shift-invariant");
        }
    }

    #[test]
    fn bruhat_graph_is_not_cyclically_invariant() {
        let g = bruhat_graph(3).unwrap();
        assert!(!g.cyclic_invariance_check());
        // the image of 231 -> 321 (12) is 312 -> 132 (12), which drops
        let o = Permutation::cycle(3);
        assert!(g.has_edge(&p("231"), &p("321"), (1, 2)));
        assert_eq!(o.compose(&p("231")), p("312"));
        assert_eq!(o.compose(&p("321")), p("132"));
        assert!(!g.has_edge(&p("312"), &p("132"), (1, 2)));
    }

    #[test]
    fn edge_count_is_divisible_by_n() {
        for n in 2..=6 {
            let g = transition_graph(n).unwrap();
            assert_eq!(
                g.edge_count() % n,
                0,
                "Tr_{n} edge count {}",
                g.edge_count()
            );
        }
    }

    #[test]
    fn degrees_are_constant_on_orbits() {
        for n in 2..=5 {
            let g = transition_graph(n).unwrap();
            let mut out_deg: BTreeMap<Permutation, usize> = BTreeMap::new();
            let mut in_deg: BTreeMap<Permutation, usize> = BTreeMap::new();
            for (u, w, _) in g.edges() {
                *out_deg.entry(u.clone()).or_default() += 1;
                *in_deg.entry(w.clone()).or_default() += 1;
            }
            for orbit in orbits(n) {
                let o0 = out_deg.get(&orbit[0]).copied().unwrap_or(0);
                let i0 = in_deg.get(&orbit[0]).copied().unwrap_or(0);
                for w in &orbit {
                    assert_eq!(out_deg.get(w).copied().unwrap_or(0), o0);
                    assert_eq!(in_deg.get(w).copied().unwrap_or(0), i0);
                }
            }
        }
    }

    #[test]
    fn orbit_example() {
        let orbits = orbits(3);
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[0], vec![p("123"), p("231"), p("312")]);
        assert_eq!(orbits[1], vec![p("132"), p("213"), p("321")]);
    }

    #[test]
    fn dot_export_shape() {
        let g = transition_graph(3).unwrap();
        let dot = g.to_dot("Tr3");
        assert!(dot.starts_with("digraph Tr3 {"));
        assert_eq!(dot.matches("->").count(), 15);
        assert!(dot.contains("rank=same"));
        assert!(dot.contains("\"123\" -> \"213\" [label=\"12\"];"));
        assert!(dot.contains("\"321\" -> \"123\" [label=\"13\"];"));
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn json_export_shape() {
        let g = bruhat_graph(2).unwrap();
        let v = g.to_json();
        assert_eq!(v["n"], 2);
        assert_eq!(v["edges"].as_array().unwrap().len(), 1);
        assert_eq!(v["edges"][0]["from"], "12");
        assert_eq!(v["edges"][0]["label"][1], 2);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(bruhat_graph(8), Err(Error::SizeGuard(_))));
        assert!(matches!(
            transition_graph(0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
