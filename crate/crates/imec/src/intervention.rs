//! Intervention target multisets, interventional graphs, perfect
//! interventions and symmetric-difference targets.

use crate::error::{Error, Result};
use crate::graph_core::{EdgeKind, MixedGraph, VertexKind, V};
use crate::vset::VSet;

/// Ordered multiset of intervention targets; position is the occurrence index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TargetMultiset {
    targets: Vec<VSet>,
}

impl TargetMultiset {
    pub fn new(targets: Vec<VSet>) -> TargetMultiset {
        TargetMultiset { targets }
    }

    /// Targets given by 1-based labels, e.g. `&[&[1, 4], &[]]`.
    pub fn from_labels(targets: &[&[usize]]) -> TargetMultiset {
        TargetMultiset::new(
            targets
                .iter()
                .map(|t| t.iter().map(|&x| x - 1).collect())
                .collect(),
        )
    }

    pub fn targets(&self) -> &[VSet] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn contains_empty(&self) -> bool {
        self.targets.iter().any(|t| t.is_empty())
    }

    pub fn support(&self) -> VSet {
        self.targets.iter().fold(VSet::EMPTY, |a, &t| a | t)
    }

    /// Number of earlier occurrences of the same set as occurrence `k`.
    pub fn repeat_index(&self, k: usize) -> usize {
        self.targets[..k]
            .iter()
            .filter(|&&t| t == self.targets[k])
            .count()
    }

    /// Label of the interventional vertex for occurrence `k`, e.g. `w{1,4}#0`.
    pub fn omega_label(&self, g: &MixedGraph, k: usize) -> String {
        let names: Vec<&str> = self.targets[k].iter().map(|v| g.label(v)).collect();
        format!("w{{{}}}#{}", names.join(","), self.repeat_index(k))
    }

    /// Vertex id of each occurrence's interventional vertex in `g^I`, where
    /// `base_n` is the vertex count of `g`. Empty targets have none.
    pub fn omega_ids(&self, base_n: usize) -> Vec<Option<V>> {
        let mut next = base_n;
        self.targets
            .iter()
            .map(|t| {
                if t.is_empty() {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    }

    /// Parses one target per line (`{}` or `{1,4}`), labels resolved in `g`.
    pub fn parse(text: &str, g: &MixedGraph) -> Result<TargetMultiset> {
        let mut targets = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let inner = line
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("target must look like {{1,4}}: {raw}")))?;
            let mut t = VSet::EMPTY;
            for tok in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let v = g
                    .find(tok)
                    .ok_or_else(|| Error::Parse(format!("unknown vertex in target: {tok}")))?;
                t.insert(v);
            }
            targets.push(t);
        }
        let out = TargetMultiset::new(targets);
        out.check(g)?;
        Ok(out)
    }

    pub fn to_text(&self, g: &MixedGraph) -> String {
        self.targets.iter().map(|&t| g.fmt_set(t) + "\n").collect()
    }

    pub fn render(&self, g: &MixedGraph) -> String {
        let parts: Vec<String> = self.targets.iter().map(|&t| g.fmt_set(t)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn check(&self, g: &MixedGraph) -> Result<()> {
        let subst = g.substantive();
        for &t in &self.targets {
            if !t.is_subset(subst) {
                return Err(Error::Invalid(format!(
                    "target {:?} references vertices that are not substantive",
                    t.to_vec()
                )));
            }
        }
        Ok(())
    }
}

/// `g^I`: one source vertex per nonempty target occurrence, pointing into its targets.
pub fn interventional_graph(g: &MixedGraph, targets: &TargetMultiset) -> Result<MixedGraph> {
    targets.check(g)?;
    let mut out = g.clone();
    for (k, &t) in targets.targets().iter().enumerate() {
        if t.is_empty() {
            continue;
        }
        let w = out.add_vertex(VertexKind::Interventional, targets.omega_label(g, k));
        for i in t.iter() {
            out.insert_edge(w, i, EdgeKind::Directed);
        }
    }
    Ok(out)
}

/// Vertices contained in at least two target occurrences.
pub fn doubly_intervened(targets: &TargetMultiset) -> VSet {
    let mut once = VSet::EMPTY;
    let mut twice = VSet::EMPTY;
    for &t in targets.targets() {
        twice |= once & t;
        once |= t;
    }
    twice
}

/// Endpoints of undirected edges.
pub fn selection_adjacent(g: &MixedGraph) -> VSet {
    g.selection_adjacent()
}

pub fn doubly_intervened_selection_adjacent(g: &MixedGraph, targets: &TargetMultiset) -> VSet {
    doubly_intervened(targets) & selection_adjacent(g)
}

/// Removes every edge with an arrowhead at a target vertex. Undirected edges stay.
pub fn perfect_intervention(g: &MixedGraph, target: VSet) -> Result<MixedGraph> {
    if !target.is_subset(g.substantive()) {
        return Err(Error::Invalid(
            "perfect intervention targets must be substantive".into(),
        ));
    }
    let mut out = g.clone();
    for t in target.iter() {
        for p in g.pa(t).iter() {
            out.remove_edge(p, t, EdgeKind::Directed);
        }
        for s in g.sp(t).iter() {
            out.remove_edge(s, t, EdgeKind::Bidirected);
        }
    }
    Ok(out)
}

/// Distinct pairwise symmetric differences, ordered by (size, elements). The
/// empty set is always present.
pub fn symmetric_difference_targets(targets: &TargetMultiset) -> TargetMultiset {
    let mut out: Vec<VSet> = vec![VSet::EMPTY];
    let ts = targets.targets();
    for a in ts {
        for b in ts {
            let d = (*a - *b) | (*b - *a);
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out.sort_by_key(|t| (t.len(), t.to_vec()));
    TargetMultiset::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::EdgeKind::*;

    fn fig1() -> MixedGraph {
        MixedGraph::from_edges(
            7,
            &[
                (1, 2, Undirected),
                (2, 3, Directed),
                (4, 3, Directed),
                (4, 5, Directed),
                (5, 6, Directed),
                (6, 7, Directed),
                (7, 4, Directed),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fig1_interventional_graph() {
        let g = fig1();
        let t = TargetMultiset::from_labels(&[&[1], &[4], &[1, 4]]);
        let gi = interventional_graph(&g, &t).unwrap();
        assert_eq!(gi.n(), 10);
        let w1 = gi.find("w{1}#0").unwrap();
        let w4 = gi.find("w{4}#0").unwrap();
        let w14 = gi.find("w{1,4}#0").unwrap();
        assert_eq!(gi.ch(w1), VSet::from_slice(&[0]));
        assert_eq!(gi.ch(w4), VSet::from_slice(&[3]));
        assert_eq!(gi.ch(w14), VSet::from_slice(&[0, 3]));
        for w in [w1, w4, w14] {
            assert!(gi.arrow_in(w).is_empty() && gi.ne(w).is_empty());
        }
        assert_eq!(gi.induced_subgraph(gi.substantive()).unwrap(), g);
        assert_eq!(t.omega_ids(7), vec![Some(7), Some(8), Some(9)]);
    }

    #[test]
    fn empty_and_repeated_targets() {
        let g = fig1();
        assert_eq!(
            interventional_graph(&g, &TargetMultiset::from_labels(&[&[]])).unwrap(),
            g
        );
        let t = TargetMultiset::from_labels(&[&[2], &[2]]);
        let gi = interventional_graph(&g, &t).unwrap();
        assert!(gi.find("w{2}#0").is_some() && gi.find("w{2}#1").is_some());
        assert_eq!(doubly_intervened(&t), VSet::single(1));
        assert!(interventional_graph(&g, &TargetMultiset::new(vec![VSet::single(9)])).is_err());
    }

    #[test]
    fn doubly_intervened_fig2() {
        let g = MixedGraph::from_edges(
            5,
            &[
                (1, 2, Undirected),
                (2, 3, Directed),
                (3, 4, Directed),
                (3, 5, Directed),
            ],
        )
        .unwrap();
        let t = TargetMultiset::from_labels(&[&[1, 4], &[1, 5]]);
        assert_eq!(doubly_intervened(&t), VSet::single(0));
        assert_eq!(selection_adjacent(&g), VSet::from_slice(&[0, 1]));
        assert_eq!(
            doubly_intervened_selection_adjacent(&g, &t),
            VSet::single(0)
        );
        let singles = TargetMultiset::from_labels(&[&[1], &[2], &[3]]);
        assert!(doubly_intervened(&singles).is_empty());
        assert_eq!(selection_adjacent(&fig1()), VSet::from_slice(&[0, 1]));
    }

    #[test]
    fn symmetric_differences() {
        let t = TargetMultiset::from_labels(&[&[], &[1, 3], &[3]]);
        assert_eq!(
            symmetric_difference_targets(&t),
            TargetMultiset::from_labels(&[&[], &[1], &[3], &[1, 3]])
        );
        let t = TargetMultiset::from_labels(&[&[], &[2, 3], &[2, 4]]);
        assert_eq!(
            symmetric_difference_targets(&t),
            TargetMultiset::from_labels(&[&[], &[2, 3], &[2, 4], &[3, 4]])
        );
        let t = TargetMultiset::from_labels(&[&[]]);
        assert_eq!(symmetric_difference_targets(&t), t);
    }

    #[test]
    fn perfect_intervention_fig8() {
        let g = MixedGraph::from_edges(
            4,
            &[
                (1, 2, Bidirected),
                (2, 3, Bidirected),
                (3, 4, Bidirected),
                (2, 4, Directed),
                (3, 1, Directed),
            ],
        )
        .unwrap();
        let cut = perfect_intervention(&g, VSet::single(1)).unwrap();
        let expected =
            MixedGraph::from_edges(4, &[(3, 4, Bidirected), (2, 4, Directed), (3, 1, Directed)])
                .unwrap();
        assert_eq!(cut, expected);
        let src = MixedGraph::from_edges(2, &[(1, 2, Directed)]).unwrap();
        assert_eq!(perfect_intervention(&src, VSet::single(0)).unwrap(), src);
    }

    #[test]
    fn targets_text_roundtrip() {
        let g = fig1();
        let t = TargetMultiset::parse("# t\n{}\n{1,4}\n{ 2 }\n", &g).unwrap();
        assert_eq!(t, TargetMultiset::from_labels(&[&[], &[1, 4], &[2]]));
        assert_eq!(t.to_text(&g), "{}\n{1,4}\n{2}\n");
        assert!(TargetMultiset::parse("{9}", &g).is_err());
        assert!(TargetMultiset::parse("1,4", &g).is_err());
    }
}
