//! Loopless mixed graphs: storage, neighborhood and ancestry queries, the
//! text format, class predicates, ribbons, and graph enumerators.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vset::VSet;

/// Dense vertex index inside one graph.
pub type V = usize;

/// Hard cap on vertices per graph; vertex sets are 64-bit masks.
pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mark {
    Tail,
    Arrow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    Undirected,
    Directed,
    Bidirected,
}

impl EdgeKind {
    pub fn token(self) -> &'static str {
        match self {
            EdgeKind::Undirected => "--",
            EdgeKind::Directed => "->",
            EdgeKind::Bidirected => "<->",
        }
    }
}

/// An edge with one mark per endpoint, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: V,
    pub v: V,
    pub mark_u: Mark,
    pub mark_v: Mark,
}

impl Edge {
    pub fn new(a: V, b: V, mark_a: Mark, mark_b: Mark) -> Edge {
        if a < b {
            Edge {
                u: a,
                v: b,
                mark_u: mark_a,
                mark_v: mark_b,
            }
        } else {
            Edge {
                u: b,
                v: a,
                mark_u: mark_b,
                mark_v: mark_a,
            }
        }
    }

    pub fn kind(&self) -> EdgeKind {
        match (self.mark_u, self.mark_v) {
            (Mark::Tail, Mark::Tail) => EdgeKind::Undirected,
            (Mark::Arrow, Mark::Arrow) => EdgeKind::Bidirected,
            _ => EdgeKind::Directed,
        }
    }

    pub fn mark_at(&self, x: V) -> Mark {
        if x == self.u {
            self.mark_u
        } else {
            debug_assert_eq!(x, self.v);
            self.mark_v
        }
    }

    pub fn other(&self, x: V) -> V {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexKind {
    Substantive,
    Interventional,
    Latent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub kind: VertexKind,
    pub label: String,
}

/// A loopless mixed graph with at most one edge of each type per vertex pair.
///
/// Edges live in four adjacency masks per vertex, so every query is a few
/// bit operations. Two graphs compare equal when they have the same vertex
/// list (kinds and labels, in id order) and the same edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MixedGraph {
    vertices: Vec<Vertex>,
    und: Vec<VSet>,
    ch: Vec<VSet>,
    pa: Vec<VSet>,
    sp: Vec<VSet>,
}

impl MixedGraph {
    pub fn new() -> MixedGraph {
        MixedGraph::default()
    }

    /// Graph with substantive vertices labelled `1..=n`.
    pub fn with_vertices(n: usize) -> MixedGraph {
        let mut g = MixedGraph::new();
        for i in 1..=n {
            g.add_vertex(VertexKind::Substantive, i.to_string());
        }
        g
    }

    pub fn add_vertex(&mut self, kind: VertexKind, label: impl Into<String>) -> V {
        assert!(
            self.vertices.len() < MAX_VERTICES,
            "graph exceeds {MAX_VERTICES} vertices"
        );
        self.vertices.push(Vertex {
            kind,
            label: label.into(),
        });
        self.und.push(VSet::EMPTY);
        self.ch.push(VSet::EMPTY);
        self.pa.push(VSet::EMPTY);
        self.sp.push(VSet::EMPTY);
        self.vertices.len() - 1
    }

    /// Adds `a -- b`, `a -> b` or `a <-> b`.
    pub fn add_edge(&mut self, a: V, b: V, kind: EdgeKind) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::Invalid(format!("loop at vertex {}", self.label(a))));
        }
        let dup = match kind {
            EdgeKind::Undirected => self.und[a].contains(b),
            EdgeKind::Directed => self.ch[a].contains(b) || self.ch[b].contains(a),
            EdgeKind::Bidirected => self.sp[a].contains(b),
        };
        if dup {
            return Err(Error::Invalid(format!(
                "duplicate {} edge between {} and {}",
                kind.token(),
                self.label(a),
                self.label(b)
            )));
        }
        self.insert_edge(a, b, kind);
        Ok(())
    }

    pub(crate) fn insert_edge(&mut self, a: V, b: V, kind: EdgeKind) {
        match kind {
            EdgeKind::Undirected => {
                self.und[a].insert(b);
                self.und[b].insert(a);
            }
            EdgeKind::Directed => {
                self.ch[a].insert(b);
                self.pa[b].insert(a);
            }
            EdgeKind::Bidirected => {
                self.sp[a].insert(b);
                self.sp[b].insert(a);
            }
        }
    }

    pub(crate) fn remove_edge(&mut self, a: V, b: V, kind: EdgeKind) {
        match kind {
            EdgeKind::Undirected => {
                self.und[a].remove(b);
                self.und[b].remove(a);
            }
            EdgeKind::Directed => {
                self.ch[a].remove(b);
                self.pa[b].remove(a);
            }
            EdgeKind::Bidirected => {
                self.sp[a].remove(b);
                self.sp[b].remove(a);
            }
        }
    }

    /// Builds a graph on `1..=n` from `(a, b, kind)` triples using 1-based labels.
    pub fn from_edges(n: usize, edges: &[(usize, usize, EdgeKind)]) -> Result<MixedGraph> {
        let mut g = MixedGraph::with_vertices(n);
        for &(a, b, k) in edges {
            if a == 0 || b == 0 {
                return Err(Error::Invalid("labels are 1-based".into()));
            }
            g.add_edge(a - 1, b - 1, k)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn all(&self) -> VSet {
        VSet::full(self.n())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: V) -> &Vertex {
        &self.vertices[v]
    }

    pub fn label(&self, v: V) -> &str {
        &self.vertices[v].label
    }

    pub fn kind(&self, v: V) -> VertexKind {
        self.vertices[v].kind
    }

    pub fn of_kind(&self, kind: VertexKind) -> VSet {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, x)| x.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn substantive(&self) -> VSet {
        self.of_kind(VertexKind::Substantive)
    }

    pub fn find(&self, label: &str) -> Option<V> {
        self.vertices.iter().position(|x| x.label == label)
    }

    pub fn find_or_err(&self, label: &str) -> Result<V> {
        self.find(label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn check(&self, v: V) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    pub fn check_set(&self, s: VSet) -> Result<()> {
        if s.is_subset(self.all()) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("{:?}", s.to_vec())))
        }
    }

    /// Renders a vertex set with labels, e.g. `{1,4}`.
    pub fn fmt_set(&self, s: VSet) -> String {
        let parts: Vec<&str> = s.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", parts.join(","))
    }

    // Unchecked neighborhood masks.
    pub fn pa(&self, v: V) -> VSet {
        self.pa[v]
    }
    pub fn ch(&self, v: V) -> VSet {
        self.ch[v]
    }
    pub fn sp(&self, v: V) -> VSet {
        self.sp[v]
    }
    pub fn ne(&self, v: V) -> VSet {
        self.und[v]
    }
    pub fn adj(&self, v: V) -> VSet {
        self.pa[v] | self.ch[v] | self.sp[v] | self.und[v]
    }
    /// Neighbors whose edge to `v` carries an arrowhead at `v`.
    pub fn arrow_in(&self, v: V) -> VSet {
        self.pa[v] | self.sp[v]
    }

    pub fn parents(&self, v: V) -> Result<VSet> {
        self.check(v)?;
        Ok(self.pa[v])
    }
    pub fn children(&self, v: V) -> Result<VSet> {
        self.check(v)?;
        Ok(self.ch[v])
    }
    pub fn spouses(&self, v: V) -> Result<VSet> {
        self.check(v)?;
        Ok(self.sp[v])
    }
    pub fn neighbors(&self, v: V) -> Result<VSet> {
        self.check(v)?;
        Ok(self.und[v])
    }
    pub fn adjacents(&self, v: V) -> Result<VSet> {
        self.check(v)?;
        Ok(self.adj(v))
    }

    pub fn is_adjacent(&self, a: V, b: V) -> bool {
        self.adj(a).contains(b)
    }

    pub fn has_edge(&self, a: V, b: V, kind: EdgeKind) -> bool {
        match kind {
            EdgeKind::Undirected => self.und[a].contains(b),
            EdgeKind::Directed => self.ch[a].contains(b),
            EdgeKind::Bidirected => self.sp[a].contains(b),
        }
    }

    /// Edges between `a` and `b`, each oriented as stored.
    pub fn edges_between(&self, a: V, b: V) -> Vec<Edge> {
        let mut out = Vec::with_capacity(1);
        if self.und[a].contains(b) {
            out.push(Edge::new(a, b, Mark::Tail, Mark::Tail));
        }
        if self.ch[a].contains(b) {
            out.push(Edge::new(a, b, Mark::Tail, Mark::Arrow));
        }
        if self.ch[b].contains(a) {
            out.push(Edge::new(a, b, Mark::Arrow, Mark::Tail));
        }
        if self.sp[a].contains(b) {
            out.push(Edge::new(a, b, Mark::Arrow, Mark::Arrow));
        }
        out
    }

    /// Edges incident to `v`.
    pub fn incident(&self, v: V) -> Vec<Edge> {
        let mut out = Vec::new();
        for w in self.adj(v).iter() {
            out.extend(self.edges_between(v, w));
        }
        out
    }

    /// All edges in canonical order: (min endpoint, max endpoint, kind).
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in self.adj(a).iter().filter(|&b| b > a) {
                out.extend(self.edges_between(a, b));
            }
        }
        out.sort_by_key(|e| (e.u, e.v, e.kind()));
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_simple(&self) -> bool {
        (0..self.n()).all(|a| {
            self.adj(a)
                .iter()
                .filter(|&b| b > a)
                .all(|b| self.edges_between(a, b).len() == 1)
        })
    }

    fn closure(&self, s: VSet, step: impl Fn(V) -> VSet) -> VSet {
        let mut seen = s;
        let mut frontier = s;
        while !frontier.is_empty() {
            let mut next = VSet::EMPTY;
            for v in frontier.iter() {
                next |= step(v);
            }
            frontier = next - seen;
            seen |= next;
        }
        seen
    }

    /// an(S) including S.
    pub fn an(&self, s: VSet) -> VSet {
        self.closure(s, |v| self.pa[v])
    }

    /// de(S) including S.
    pub fn de(&self, s: VSet) -> VSet {
        self.closure(s, |v| self.ch[v])
    }

    /// Anteriors of S including S: paths of undirected edges and directed
    /// edges pointing toward S.
    pub fn ant(&self, s: VSet) -> VSet {
        self.closure(s, |v| self.pa[v] | self.und[v])
    }

    /// Vertices with a directed path of length at least one into S.
    pub fn proper_an(&self, s: VSet) -> VSet {
        let mut step = VSet::EMPTY;
        for v in s.iter() {
            step |= self.pa[v];
        }
        self.an(step)
    }

    pub fn ancestors(&self, s: VSet, proper: bool) -> Result<VSet> {
        self.check_set(s)?;
        let a = self.an(s);
        Ok(if proper { a - s } else { a })
    }

    pub fn descendants(&self, s: VSet, proper: bool) -> Result<VSet> {
        self.check_set(s)?;
        let d = self.de(s);
        Ok(if proper { d - s } else { d })
    }

    pub fn anteriors(&self, s: VSet, proper: bool) -> Result<VSet> {
        self.check_set(s)?;
        let a = self.ant(s);
        Ok(if proper { a - s } else { a })
    }

    /// Vertices that lie on a directed cycle.
    pub fn cyclic_vertices(&self) -> VSet {
        (0..self.n())
            .filter(|&v| self.proper_an(VSet::single(v)).contains(v))
            .collect()
    }

    pub fn has_directed_cycle(&self) -> bool {
        !self.cyclic_vertices().is_empty()
    }

    pub fn has_undirected(&self) -> bool {
        self.und.iter().any(|s| !s.is_empty())
    }

    pub fn has_bidirected(&self) -> bool {
        self.sp.iter().any(|s| !s.is_empty())
    }

    pub fn has_directed(&self) -> bool {
        self.ch.iter().any(|s| !s.is_empty())
    }

    /// Endpoints of undirected edges.
    pub fn selection_adjacent(&self) -> VSet {
        (0..self.n()).filter(|&v| !self.und[v].is_empty()).collect()
    }

    /// Induced subgraph on `a`, renumbered densely in id order.
    pub fn induced_subgraph(&self, a: VSet) -> Result<MixedGraph> {
        self.check_set(a)?;
        let keep = a.to_vec();
        let mut pos = vec![usize::MAX; self.n()];
        let mut g = MixedGraph::new();
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
            g.add_vertex(self.vertices[v].kind, self.vertices[v].label.clone());
        }
        for e in self.edges() {
            if a.contains(e.u) && a.contains(e.v) {
                let (x, y) = (pos[e.u], pos[e.v]);
                match (e.mark_u, e.mark_v) {
                    (Mark::Tail, Mark::Arrow) => g.insert_edge(x, y, EdgeKind::Directed),
                    (Mark::Arrow, Mark::Tail) => g.insert_edge(y, x, EdgeKind::Directed),
                    _ => g.insert_edge(x, y, e.kind()),
                }
            }
        }
        Ok(g)
    }

    /// Same graph without any edges.
    pub fn without_edges(&self) -> MixedGraph {
        let mut g = MixedGraph::new();
        for v in &self.vertices {
            g.add_vertex(v.kind, v.label.clone());
        }
        g
    }

    pub fn render_edge(&self, e: &Edge) -> String {
        match (e.mark_u, e.mark_v) {
            (Mark::Arrow, Mark::Tail) => format!("{} -> {}", self.label(e.v), self.label(e.u)),
            _ => format!(
                "{} {} {}",
                self.label(e.u),
                e.kind().token(),
                self.label(e.v)
            ),
        }
    }

    /// Deterministic text serialization.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let labels: Vec<&str> = self.vertices.iter().map(|v| v.label.as_str()).collect();
        s.push_str("nodes:");
        for l in labels {
            s.push(' ');
            s.push_str(l);
        }
        s.push('\n');
        for e in self.edges() {
            s.push_str("edge: ");
            s.push_str(&self.render_edge(&e));
            s.push('\n');
        }
        s
    }

    /// Parses the text format. Substantive vertices are numbered in ascending
    /// label order (numeric when every label is an integer); interventional
    /// (`w{..}#k`) and latent (`l{..}`) vertices follow in listed order.
    pub fn parse(text: &str) -> Result<MixedGraph> {
        let mut labels: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, EdgeKind)> = Vec::new();
        let mut saw_nodes = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {raw}", lineno + 1));
            if let Some(rest) = line.strip_prefix("nodes:") {
                saw_nodes = true;
                for tok in rest.split_whitespace() {
                    if labels.iter().any(|l| l == tok) {
                        return Err(err("duplicate node"));
                    }
                    labels.push(tok.to_string());
                }
            } else if let Some(rest) = line.strip_prefix("edge:") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err("expected `edge: a OP b`"));
                }
                let kind = match toks[1] {
                    "--" => EdgeKind::Undirected,
                    "->" => EdgeKind::Directed,
                    "<-" => {
                        edges.push((toks[2].into(), toks[0].into(), EdgeKind::Directed));
                        continue;
                    }
                    "<->" => EdgeKind::Bidirected,
                    _ => return Err(err("unknown edge operator")),
                };
                edges.push((toks[0].into(), toks[2].into(), kind));
            } else {
                return Err(err("unrecognized line"));
            }
        }
        if !saw_nodes {
            return Err(Error::Parse("missing `nodes:` line".into()));
        }
        let kind_of = |l: &str| {
            if l.starts_with("w{") {
                VertexKind::Interventional
            } else if l.starts_with("l{") {
                VertexKind::Latent
            } else {
                VertexKind::Substantive
            }
        };
        let mut subst: Vec<String> = labels
            .iter()
            .filter(|l| kind_of(l) == VertexKind::Substantive)
            .cloned()
            .collect();
        if subst.iter().all(|l| l.parse::<i64>().is_ok()) {
            subst.sort_by_key(|l| l.parse::<i64>().unwrap());
        } else {
            subst.sort();
        }
        let mut g = MixedGraph::new();
        for l in &subst {
            g.add_vertex(VertexKind::Substantive, l.clone());
        }
        for l in labels
            .iter()
            .filter(|l| kind_of(l) != VertexKind::Substantive)
        {
            g.add_vertex(kind_of(l), l.clone());
        }
        for (a, b, k) in edges {
            let x = g
                .find(&a)
                .ok_or_else(|| Error::Parse(format!("edge uses undeclared node {a}")))?;
            let y = g
                .find(&b)
                .ok_or_else(|| Error::Parse(format!("edge uses undeclared node {b}")))?;
            g.add_edge(x, y, k)?;
        }
        Ok(g)
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassLabel {
    #[serde(rename = "LMG")]
    Lmg,
    #[serde(rename = "simple")]
    Simple,
    #[serde(rename = "DAG")]
    Dag,
    #[serde(rename = "ADMG")]
    Admg,
    #[serde(rename = "directed-AG")]
    DirectedAg,
    #[serde(rename = "AG")]
    Ag,
    #[serde(rename = "MAG")]
    Mag,
    #[serde(rename = "RG")]
    Rg,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Lmg => "LMG",
            ClassLabel::Simple => "simple",
            ClassLabel::Dag => "DAG",
            ClassLabel::Admg => "ADMG",
            ClassLabel::DirectedAg => "directed-AG",
            ClassLabel::Ag => "AG",
            ClassLabel::Mag => "MAG",
            ClassLabel::Rg => "RG",
        })
    }
}

pub fn is_dag(g: &MixedGraph) -> bool {
    !g.has_undirected() && !g.has_bidirected() && !g.has_directed_cycle()
}

pub fn is_admg(g: &MixedGraph) -> bool {
    !g.has_undirected() && !g.has_directed_cycle()
}

/// The three ancestral conditions.
pub fn is_ag(g: &MixedGraph) -> bool {
    if g.has_directed_cycle() {
        return false;
    }
    for v in 0..g.n() {
        // No bidirected edge whose endpoints are joined by a directed path.
        if !(g.sp(v) & g.proper_an(VSet::single(v))).is_empty() {
            return false;
        }
        // No arrowhead into an endpoint of an undirected edge.
        if !g.ne(v).is_empty() && !g.arrow_in(v).is_empty() {
            return false;
        }
    }
    true
}

pub fn is_directed_ag(g: &MixedGraph) -> bool {
    !g.has_undirected() && is_ag(g)
}

pub fn is_rg(g: &MixedGraph) -> bool {
    find_ribbons(g).is_empty()
}

pub fn is_mag(g: &MixedGraph) -> bool {
    is_ag(g) && crate::maximality::is_maximal(g).unwrap_or(false)
}

pub fn classify(g: &MixedGraph) -> BTreeSet<ClassLabel> {
    let mut out = BTreeSet::new();
    out.insert(ClassLabel::Lmg);
    if g.is_simple() {
        out.insert(ClassLabel::Simple);
    }
    if is_dag(g) {
        out.insert(ClassLabel::Dag);
    }
    if is_admg(g) {
        out.insert(ClassLabel::Admg);
    }
    let ag = is_ag(g);
    if ag {
        out.insert(ClassLabel::Ag);
        if !g.has_undirected() {
            out.insert(ClassLabel::DirectedAg);
        }
        if crate::maximality::is_maximal(g).unwrap_or(false) {
            out.insert(ClassLabel::Mag);
        }
    }
    if is_rg(g) {
        out.insert(ClassLabel::Rg);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RibbonWitness {
    /// Collider path `<i, j, k>` with `i < k`.
    pub triple: (V, V, V),
    /// Marks of the path at `i` and at `k`.
    pub end_marks: (Mark, Mark),
    /// `j` or a descendant is an endpoint of an undirected edge.
    pub via_selection: bool,
    /// `j` or a descendant lies on a directed cycle.
    pub via_cycle: bool,
}

pub fn find_ribbons(g: &MixedGraph) -> Vec<RibbonWitness> {
    let sa = g.selection_adjacent();
    let cyc = g.cyclic_vertices();
    let mut out = Vec::new();
    for j in 0..g.n() {
        let de = g.de(VSet::single(j));
        let via_selection = de.intersects(sa);
        let via_cycle = de.intersects(cyc);
        if !via_selection && !via_cycle {
            continue;
        }
        // Edges with an arrowhead at j, keyed by the mark at the far end.
        let mut ends: Vec<(V, Mark)> = Vec::new();
        for i in g.pa(j).iter() {
            ends.push((i, Mark::Tail));
        }
        for i in g.sp(j).iter() {
            ends.push((i, Mark::Arrow));
        }
        for (x, &(i, mi)) in ends.iter().enumerate() {
            for &(k, mk) in &ends[x + 1..] {
                if i == k {
                    continue;
                }
                let (i, mi, k, mk) = if i < k {
                    (i, mi, k, mk)
                } else {
                    (k, mk, i, mi)
                };
                let identical = g
                    .edges_between(i, k)
                    .iter()
                    .any(|e| e.mark_at(i) == mi && e.mark_at(k) == mk);
                if !identical {
                    out.push(RibbonWitness {
                        triple: (i, j, k),
                        end_marks: (mi, mk),
                        via_selection,
                        via_cycle,
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// Per-pair choices used by the simple-graph enumerator.
const SIMPLE_CHOICES: usize = 5;

fn apply_simple_choice(g: &mut MixedGraph, a: V, b: V, choice: usize) {
    match choice {
        0 => {}
        1 => g.insert_edge(a, b, EdgeKind::Undirected),
        2 => g.insert_edge(a, b, EdgeKind::Directed),
        3 => g.insert_edge(b, a, EdgeKind::Directed),
        4 => g.insert_edge(a, b, EdgeKind::Bidirected),
        _ => unreachable!(),
    }
}

fn pairs(n: usize) -> Vec<(V, V)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

/// Every simple LMG on `1..=n` (at most one edge per pair), `5^(n(n-1)/2)` graphs.
pub fn all_simple_graphs(n: usize) -> impl Iterator<Item = MixedGraph> {
    let ps = pairs(n);
    let total = SIMPLE_CHOICES.pow(ps.len() as u32);
    (0..total).map(move |mut code| {
        let mut g = MixedGraph::with_vertices(n);
        for &(a, b) in &ps {
            apply_simple_choice(&mut g, a, b, code % SIMPLE_CHOICES);
            code /= SIMPLE_CHOICES;
        }
        g
    })
}

/// Every LMG on `1..=n` under the one-edge-per-type rule: each pair takes a
/// subset of {`--`, `->`, `<-`, `<->`} with at most one directed edge.
pub fn all_lmgs(n: usize) -> impl Iterator<Item = MixedGraph> {
    const OPTIONS: [u8; 12] = [0, 1, 2, 3, 4, 5, 8, 9, 10, 11, 12, 13];
    let ps = pairs(n);
    let total = OPTIONS.len().pow(ps.len() as u32);
    (0..total).map(move |mut code| {
        let mut g = MixedGraph::with_vertices(n);
        for &(a, b) in &ps {
            let bits = OPTIONS[code % OPTIONS.len()];
            code /= OPTIONS.len();
            if bits & 1 != 0 {
                g.insert_edge(a, b, EdgeKind::Undirected);
            }
            if bits & 2 != 0 {
                g.insert_edge(a, b, EdgeKind::Directed);
            }
            if bits & 4 != 0 {
                g.insert_edge(b, a, EdgeKind::Directed);
            }
            if bits & 8 != 0 {
                g.insert_edge(a, b, EdgeKind::Bidirected);
            }
        }
        g
    })
}

/// All ancestral graphs on `1..=n`.
pub fn all_ags(n: usize) -> Vec<MixedGraph> {
    all_simple_graphs(n).filter(is_ag).collect()
}

/// All DAGs on `1..=n`.
pub fn all_dags(n: usize) -> Vec<MixedGraph> {
    all_simple_graphs(n).filter(is_dag).collect()
}

/// Edge probabilities for [`random_graph`].
#[derive(Clone, Copy, Debug)]
pub struct EdgeProbs {
    pub undirected: f64,
    pub directed: f64,
    pub bidirected: f64,
}

impl Default for EdgeProbs {
    fn default() -> Self {
        EdgeProbs {
            undirected: 0.15,
            directed: 0.3,
            bidirected: 0.15,
        }
    }
}

/// Random LMG; each pair independently receives each edge type with the given
/// probability (directed edges get a uniform orientation).
pub fn random_graph<R: Rng>(n: usize, p: EdgeProbs, rng: &mut R) -> MixedGraph {
    let mut g = MixedGraph::with_vertices(n);
    for (a, b) in pairs(n) {
        if rng.gen_bool(p.undirected) {
            g.insert_edge(a, b, EdgeKind::Undirected);
        }
        if rng.gen_bool(p.directed) {
            if rng.gen_bool(0.5) {
                g.insert_edge(a, b, EdgeKind::Directed);
            } else {
                g.insert_edge(b, a, EdgeKind::Directed);
            }
        }
        if rng.gen_bool(p.bidirected) {
            g.insert_edge(a, b, EdgeKind::Bidirected);
        }
    }
    g
}

/// Random simple LMG: each pair gets no edge or one of the four edge choices.
pub fn random_simple_graph<R: Rng>(n: usize, p_edge: f64, rng: &mut R) -> MixedGraph {
    let mut g = MixedGraph::with_vertices(n);
    for (a, b) in pairs(n) {
        if rng.gen_bool(p_edge) {
            apply_simple_choice(&mut g, a, b, rng.gen_range(1..SIMPLE_CHOICES));
        }
    }
    g
}

fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Vec<V> {
    use rand::seq::SliceRandom;
    let mut order: Vec<V> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Random DAG: edges follow a random topological order.
pub fn random_dag<R: Rng>(n: usize, p_edge: f64, rng: &mut R) -> MixedGraph {
    let order = random_perm(n, rng);
    let mut g = MixedGraph::with_vertices(n);
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(p_edge) {
                g.insert_edge(order[x], order[y], EdgeKind::Directed);
            }
        }
    }
    g
}

/// Random ADMG: a random DAG plus independent bidirected edges.
pub fn random_admg<R: Rng>(n: usize, p_dir: f64, p_bi: f64, rng: &mut R) -> MixedGraph {
    let mut g = random_dag(n, p_dir, rng);
    for (a, b) in pairs(n) {
        if rng.gen_bool(p_bi) {
            g.insert_edge(a, b, EdgeKind::Bidirected);
        }
    }
    g
}

/// Random AG by rejection from random simple graphs.
pub fn random_ag<R: Rng>(n: usize, p_edge: f64, rng: &mut R) -> MixedGraph {
    loop {
        let g = random_simple_graph(n, p_edge, rng);
        if is_ag(&g) {
            return g;
        }
    }
}
