//! m-separation: connecting-path enumeration, a reachability search, and
//! canonical independence models.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph_core::{is_dag, Edge, Mark, MixedGraph, V};
use crate::vset::VSet;

/// Default vertex bound for exhaustive independence models.
pub const DEFAULT_BOUND: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<V>,
    pub edges: Vec<Edge>,
}

impl Path {
    pub fn render(&self, g: &MixedGraph) -> String {
        let mut s = g.label(self.vertices[0]).to_string();
        for (k, e) in self.edges.iter().enumerate() {
            let (a, b) = (self.vertices[k], self.vertices[k + 1]);
            let op = match (e.mark_at(a), e.mark_at(b)) {
                (Mark::Tail, Mark::Tail) => "--",
                (Mark::Tail, Mark::Arrow) => "->",
                (Mark::Arrow, Mark::Tail) => "<-",
                (Mark::Arrow, Mark::Arrow) => "<->",
            };
            s.push_str(&format!(" {op} {}", g.label(b)));
        }
        s
    }
}

/// True when reachability over (vertex, arrival mark) states decides
/// m-separation exactly: no vertex both receives an arrowhead and touches an
/// undirected edge. Otherwise a walk such as `i -> v -- x -- y -- v <- j`
/// connects while every path is blocked.
pub fn walk_search_exact(g: &MixedGraph) -> bool {
    (0..g.n()).all(|v| g.ne(v).is_empty() || g.arrow_in(v).is_empty())
}

/// Vertices reachable from `src` by m-connecting walks given `c`, where
/// `anc = an(c)`. Assumes `src` and `c` are disjoint.
fn walk_reach(g: &MixedGraph, src: VSet, c: VSet, anc: VSet) -> VSet {
    let mut by_arrow = VSet::EMPTY;
    let mut by_tail = VSet::EMPTY;
    let mut stack: Vec<(V, bool)> = Vec::new();
    let push = |x: V, arrow: bool, ba: &mut VSet, bt: &mut VSet, st: &mut Vec<(V, bool)>| {
        let seen = if arrow { ba } else { bt };
        if !seen.contains(x) {
            seen.insert(x);
            st.push((x, arrow));
        }
    };
    for s in src.iter() {
        for x in (g.ch(s) | g.sp(s)).iter() {
            push(x, true, &mut by_arrow, &mut by_tail, &mut stack);
        }
        for x in (g.pa(s) | g.ne(s)).iter() {
            push(x, false, &mut by_arrow, &mut by_tail, &mut stack);
        }
    }
    while let Some((v, arrow)) = stack.pop() {
        let open = !c.contains(v);
        // Leaving through a tail at v never makes v a collider.
        if open {
            for x in g.ch(v).iter() {
                push(x, true, &mut by_arrow, &mut by_tail, &mut stack);
            }
            for x in g.ne(v).iter() {
                push(x, false, &mut by_arrow, &mut by_tail, &mut stack);
            }
        }
        // Leaving through an arrowhead at v: collider iff we arrived on one.
        if (arrow && anc.contains(v)) || (!arrow && open) {
            for x in g.sp(v).iter() {
                push(x, true, &mut by_arrow, &mut by_tail, &mut stack);
            }
            for x in g.pa(v).iter() {
                push(x, false, &mut by_arrow, &mut by_tail, &mut stack);
            }
        }
    }
    by_arrow | by_tail
}

/// What a simple path needs from a conditioning set to be m-connecting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct PathReq {
    pub noncolliders: VSet,
    pub colliders: VSet,
}

impl PathReq {
    pub fn open_given(&self, c: VSet, anc: VSet) -> bool {
        !self.noncolliders.intersects(c) && self.colliders.is_subset(anc)
    }
}

/// Depth-first enumeration of simple paths from `i` to `j`. `visit` receives
/// each completed path and returns `false` to stop early. `prune` rejects an
/// interior vertex given its collider status.
pub(crate) fn for_each_path(
    g: &MixedGraph,
    i: V,
    j: V,
    prune: &dyn Fn(V, bool) -> bool,
    visit: &mut dyn FnMut(&[V], &[Edge], PathReq) -> bool,
) {
    struct Ctx<'a> {
        g: &'a MixedGraph,
        j: V,
        verts: Vec<V>,
        edges: Vec<Edge>,
        visited: VSet,
    }
    fn rec(
        cx: &mut Ctx,
        v: V,
        in_mark: Mark,
        req: PathReq,
        prune: &dyn Fn(V, bool) -> bool,
        visit: &mut dyn FnMut(&[V], &[Edge], PathReq) -> bool,
    ) -> bool {
        for w in (cx.g.adj(v) - cx.visited).iter() {
            for e in cx.g.edges_between(v, w) {
                let collider = in_mark == Mark::Arrow && e.mark_at(v) == Mark::Arrow;
                if prune(v, collider) {
                    continue;
                }
                let mut r = req;
                if collider {
                    r.colliders.insert(v);
                } else {
                    r.noncolliders.insert(v);
                }
                cx.verts.push(w);
                cx.edges.push(e);
                let keep_going = if w == cx.j {
                    visit(&cx.verts, &cx.edges, r)
                } else {
                    cx.visited.insert(w);
                    let k = rec(cx, w, e.mark_at(w), r, prune, visit);
                    cx.visited.remove(w);
                    k
                };
                cx.verts.pop();
                cx.edges.pop();
                if !keep_going {
                    return false;
                }
            }
        }
        true
    }
    let mut cx = Ctx {
        g,
        j,
        verts: vec![i],
        edges: Vec::new(),
        visited: VSet::single(i),
    };
    let empty = PathReq {
        noncolliders: VSet::EMPTY,
        colliders: VSet::EMPTY,
    };
    for w in g.adj(i).iter() {
        for e in g.edges_between(i, w) {
            cx.verts.push(w);
            cx.edges.push(e);
            let keep_going = if w == j {
                visit(&cx.verts, &cx.edges, empty)
            } else {
                cx.visited.insert(w);
                let k = rec(&mut cx, w, e.mark_at(w), empty, prune, visit);
                cx.visited.remove(w);
                k
            };
            cx.verts.pop();
            cx.edges.pop();
            if !keep_going {
                return;
            }
        }
    }
}

/// Requirement sets of all simple paths between `i` and `j`, with dominated
/// entries removed.
pub(crate) fn path_requirements(g: &MixedGraph, i: V, j: V) -> Vec<PathReq> {
    let mut reqs: Vec<PathReq> = Vec::new();
    for_each_path(g, i, j, &|_, _| false, &mut |_, _, r| {
        if !reqs.contains(&r) {
            reqs.push(r);
        }
        true
    });
    let dominated = |a: &PathReq, b: &PathReq| {
        a != b && a.noncolliders.is_subset(b.noncolliders) && a.colliders.is_subset(b.colliders)
    };
    let keep: Vec<PathReq> = reqs
        .iter()
        .filter(|b| !reqs.iter().any(|a| dominated(a, b)))
        .copied()
        .collect();
    keep
}

fn check_query(g: &MixedGraph, a: VSet, b: VSet, c: VSet) -> Result<()> {
    g.check_set(a | b | c)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("separation sets must be nonempty".into()));
    }
    if a.intersects(b) {
        return Err(Error::Invalid("A and B overlap".into()));
    }
    if (a | b).intersects(c) {
        return Err(Error::EndpointConditioned);
    }
    Ok(())
}

/// All simple m-connecting paths from `i` to `j` given `c`.
pub fn m_connecting_paths(g: &MixedGraph, i: V, j: V, c: VSet) -> Result<Vec<Path>> {
    g.check(i)?;
    g.check(j)?;
    g.check_set(c)?;
    if i == j {
        return Err(Error::Invalid("endpoints must differ".into()));
    }
    if c.contains(i) || c.contains(j) {
        return Err(Error::EndpointConditioned);
    }
    let anc = g.an(c);
    let mut out = Vec::new();
    let prune = |v: V, collider: bool| {
        if collider {
            !anc.contains(v)
        } else {
            c.contains(v)
        }
    };
    for_each_path(g, i, j, &prune, &mut |vs, es, _| {
        out.push(Path {
            vertices: vs.to_vec(),
            edges: es.to_vec(),
        });
        true
    });
    Ok(out)
}

/// Exhaustive simple-path test; the oracle for the faster search.
pub fn m_separated_by_paths(g: &MixedGraph, a: VSet, b: VSet, c: VSet) -> Result<bool> {
    check_query(g, a, b, c)?;
    let anc = g.an(c);
    let prune = |v: V, collider: bool| {
        if collider {
            !anc.contains(v)
        } else {
            c.contains(v)
        }
    };
    for i in a.iter() {
        for j in b.iter() {
            let mut found = false;
            for_each_path(g, i, j, &prune, &mut |_, _, _| {
                found = true;
                false
            });
            if found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Vertices outside `src ∪ c` that are m-connected to some member of `src` given `c`.
pub fn m_connected_set(g: &MixedGraph, src: VSet, c: VSet) -> VSet {
    let anc = g.an(c);
    let rest = g.all() - src - c;
    if walk_search_exact(g) {
        return walk_reach(g, src, c, anc) & rest;
    }
    let prune = |v: V, collider: bool| {
        if collider {
            !anc.contains(v)
        } else {
            c.contains(v)
        }
    };
    let mut out = VSet::EMPTY;
    for j in rest.iter() {
        'src: for i in src.iter() {
            let mut found = false;
            for_each_path(g, i, j, &prune, &mut |_, _, _| {
                found = true;
                false
            });
            if found {
                out.insert(j);
                break 'src;
            }
        }
    }
    out
}

pub fn m_separated(g: &MixedGraph, a: VSet, b: VSet, c: VSet) -> Result<bool> {
    check_query(g, a, b, c)?;
    if walk_search_exact(g) {
        let reach = walk_reach(g, a, c, g.an(c));
        return Ok(!reach.intersects(b));
    }
    m_separated_by_paths(g, a, b, c)
}

/// d-separation; the same criterion restricted to DAGs.
pub fn d_separated(g: &MixedGraph, a: VSet, b: VSet, c: VSet) -> Result<bool> {
    if !is_dag(g) {
        return Err(Error::Precondition("d-separation requires a DAG".into()));
    }
    m_separated(g, a, b, c)
}

/// Elementary separation statement `<i, j | C>` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SepTriple {
    pub i: V,
    pub j: V,
    pub c: VSet,
}

impl SepTriple {
    pub fn new(a: V, b: V, c: VSet) -> SepTriple {
        SepTriple {
            i: a.min(b),
            j: a.max(b),
            c,
        }
    }

    fn sort_key(&self) -> (V, V, Vec<V>) {
        (self.i, self.j, self.c.to_vec())
    }

    pub fn render(&self, g: &MixedGraph) -> String {
        render_triple(|v| g.label(v).to_string(), self)
    }
}

fn render_triple(label: impl Fn(V) -> String, t: &SepTriple) -> String {
    let cs: Vec<String> = t.c.iter().map(&label).collect();
    let c = cs.join(",");
    if c.is_empty() {
        format!("{} _||_ {} |", label(t.i), label(t.j))
    } else {
        format!("{} _||_ {} | {}", label(t.i), label(t.j), c)
    }
}

/// Bitset form of an independence model over an ordered vertex list. Bit
/// `pair * 2^m + cmask` is set when `<i, j | C>` holds, with `C` encoded as a
/// mask over positions in `verts`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelBits {
    pub verts: Vec<V>,
    pub bits: Vec<u64>,
}

impl ModelBits {
    fn index(m: usize, pi: usize, pj: usize, cmask: u64) -> usize {
        // Pair index for pi < pj in row-major upper-triangle order.
        let pair = pi * m - pi * (pi + 1) / 2 + (pj - pi - 1);
        (pair << m) | cmask as usize
    }

    pub fn get(&self, pi: usize, pj: usize, cmask: u64) -> bool {
        let k = ModelBits::index(self.verts.len(), pi, pj, cmask);
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    fn set(&mut self, pi: usize, pj: usize, cmask: u64) {
        let k = ModelBits::index(self.verts.len(), pi, pj, cmask);
        self.bits[k / 64] |= 1 << (k % 64);
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn expand(verts: &[V], cmask: u64) -> VSet {
    VSet(cmask).iter().map(|p| verts[p]).collect()
}

/// Computes the model bits of `g` over `over` (all vertices when `None`).
pub fn model_bits(g: &MixedGraph, over: Option<VSet>, bound: usize) -> Result<ModelBits> {
    let over = over.unwrap_or(g.all());
    g.check_set(over)?;
    let verts = over.to_vec();
    let m = verts.len();
    if m > bound {
        return Err(Error::TooLarge(m, bound));
    }
    let npairs = m * m.saturating_sub(1) / 2;
    let nbits = npairs << m;
    let mut mb = ModelBits {
        verts: verts.clone(),
        bits: vec![0; nbits.div_ceil(64)],
    };
    if m < 2 {
        return Ok(mb);
    }
    let full = (1u64 << m) - 1;
    if walk_search_exact(g) {
        for cmask in VSet(full).subsets() {
            let c = expand(&verts, cmask.0);
            let anc = g.an(c);
            for pi in 0..m {
                if cmask.contains(pi) {
                    continue;
                }
                let reach = walk_reach(g, VSet::single(verts[pi]), c, anc);
                for pj in pi + 1..m {
                    if !cmask.contains(pj) && !reach.contains(verts[pj]) {
                        mb.set(pi, pj, cmask.0);
                    }
                }
            }
        }
    } else {
        let ancs: Vec<VSet> = VSet(full)
            .subsets()
            .map(|cm| g.an(expand(&verts, cm.0)))
            .collect();
        for pi in 0..m {
            for pj in pi + 1..m {
                let reqs = path_requirements(g, verts[pi], verts[pj]);
                let free = full & !(1 << pi) & !(1 << pj);
                for cmask in VSet(free).subsets() {
                    let c = expand(&verts, cmask.0);
                    let anc = ancs[cmask.0 as usize];
                    if !reqs.iter().any(|r| r.open_given(c, anc)) {
                        mb.set(pi, pj, cmask.0);
                    }
                }
            }
        }
    }
    Ok(mb)
}

/// Canonical set of elementary separation statements of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependenceModel {
    labels: Vec<String>,
    triples: Vec<SepTriple>,
}

impl IndependenceModel {
    pub fn from_bits(g: &MixedGraph, mb: &ModelBits) -> IndependenceModel {
        let m = mb.verts.len();
        let mut triples = Vec::new();
        for pi in 0..m {
            for pj in pi + 1..m {
                let free = ((1u64 << m) - 1) & !(1 << pi) & !(1 << pj);
                for cmask in VSet(free).subsets() {
                    if mb.get(pi, pj, cmask.0) {
                        triples.push(SepTriple::new(
                            mb.verts[pi],
                            mb.verts[pj],
                            expand(&mb.verts, cmask.0),
                        ));
                    }
                }
            }
        }
        triples.sort_by_key(|t| t.sort_key());
        IndependenceModel {
            labels: g.vertices().iter().map(|v| v.label.clone()).collect(),
            triples,
        }
    }

    pub fn triples(&self) -> &[SepTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, i: V, j: V, c: VSet) -> bool {
        let t = SepTriple::new(i, j, c);
        self.triples
            .binary_search_by_key(&t.sort_key(), |x| x.sort_key())
            .is_ok()
    }

    pub fn render(&self, t: &SepTriple) -> String {
        render_triple(|v| self.labels[v].clone(), t)
    }

    /// One triple per line, sorted.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.triples {
            s.push_str(&self.render(t));
            s.push('\n');
        }
        s
    }

    /// First statement (in canonical order) held by exactly one model, with
    /// `true` when it belongs to `self`.
    pub fn first_difference(&self, other: &IndependenceModel) -> Option<(SepTriple, bool)> {
        let mut a = self.triples.iter().peekable();
        let mut b = other.triples.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return None,
                (Some(x), None) => return Some((**x, true)),
                (None, Some(y)) => return Some((**y, false)),
                (Some(x), Some(y)) => match x.sort_key().cmp(&y.sort_key()) {
                    std::cmp::Ordering::Equal => {
                        a.next();
                        b.next();
                    }
                    std::cmp::Ordering::Less => return Some((**x, true)),
                    std::cmp::Ordering::Greater => return Some((**y, false)),
                },
            }
        }
    }
}

impl fmt::Display for IndependenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// All elementary statements `<i, j | C>` holding in `g`, with `i`, `j`, `C`
/// drawn from `over` (all vertices by default).
pub fn independence_model(g: &MixedGraph, over: Option<VSet>) -> Result<IndependenceModel> {
    independence_model_bounded(g, over, DEFAULT_BOUND)
}

pub fn independence_model_bounded(
    g: &MixedGraph,
    over: Option<VSet>,
    bound: usize,
) -> Result<IndependenceModel> {
    let mb = model_bits(g, over, bound)?;
    Ok(IndependenceModel::from_bits(g, &mb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{random_graph, EdgeKind::*, EdgeProbs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[usize]) -> VSet {
        VSet::from_slice(v)
    }

    #[test]
    fn chain_and_collider() {
        let chain = MixedGraph::from_edges(3, &[(1, 2, Directed), (2, 3, Directed)]).unwrap();
        assert!(m_separated(&chain, s(&[0]), s(&[2]), s(&[1])).unwrap());
        let coll = MixedGraph::from_edges(3, &[(1, 2, Directed), (3, 2, Directed)]).unwrap();
        assert!(m_separated(&coll, s(&[0]), s(&[2]), VSet::EMPTY).unwrap());
        assert!(!m_separated(&coll, s(&[0]), s(&[2]), s(&[1])).unwrap());
    }

    #[test]
    fn endpoint_conditioned_is_error() {
        let g = MixedGraph::from_edges(3, &[(1, 2, Directed)]).unwrap();
        assert!(matches!(
            m_connecting_paths(&g, 0, 1, s(&[0])),
            Err(Error::EndpointConditioned)
        ));
        assert!(m_separated(&g, s(&[0]), s(&[0, 1]), VSet::EMPTY).is_err());
    }

    #[test]
    fn walks_overcount_when_arrowheads_meet_lines() {
        // A cycle of lines through the collider lets a walk re-enter it by a tail.
        let g = MixedGraph::from_edges(
            5,
            &[
                (1, 2, Directed),
                (5, 2, Directed),
                (2, 3, Undirected),
                (3, 4, Undirected),
                (4, 2, Undirected),
            ],
        )
        .unwrap();
        assert!(!walk_search_exact(&g));
        assert!(m_separated_by_paths(&g, s(&[0]), s(&[4]), VSet::EMPTY).unwrap());
        assert!(m_separated(&g, s(&[0]), s(&[4]), VSet::EMPTY).unwrap());
        assert!(walk_reach(&g, s(&[0]), VSet::EMPTY, VSet::EMPTY).contains(4));
    }

    #[test]
    fn small_models() {
        let e = MixedGraph::from_edges(2, &[(1, 2, Directed)]).unwrap();
        assert!(independence_model(&e, None).unwrap().is_empty());
        let iso = MixedGraph::with_vertices(2);
        assert_eq!(
            independence_model(&iso, None).unwrap().to_text(),
            "1 _||_ 2 |\n"
        );
        let chain = MixedGraph::from_edges(3, &[(1, 2, Directed), (2, 3, Directed)]).unwrap();
        assert_eq!(
            independence_model(&chain, None).unwrap().to_text(),
            "1 _||_ 3 | 2\n"
        );
    }

    #[test]
    fn bound_is_enforced() {
        let g = MixedGraph::with_vertices(5);
        assert!(matches!(
            independence_model_bounded(&g, None, 4),
            Err(Error::TooLarge(5, 4))
        ));
    }

    #[test]
    fn fast_search_matches_path_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let probs = EdgeProbs {
            undirected: 0.12,
            directed: 0.3,
            bidirected: 0.15,
        };
        for _ in 0..300 {
            let g = random_graph(6, probs, &mut rng);
            for i in 0..6 {
                for j in i + 1..6 {
                    let free = g.all().without(i).without(j);
                    for c in free.subsets() {
                        let fast = m_separated(&g, s(&[i]), s(&[j]), c).unwrap();
                        let slow = m_separated_by_paths(&g, s(&[i]), s(&[j]), c).unwrap();
                        assert_eq!(fast, slow, "{}\n{i} {j} {c:?}", g.to_text());
                        let paths = m_connecting_paths(&g, i, j, c).unwrap();
                        assert_eq!(paths.is_empty(), slow);
                    }
                }
            }
        }
    }

    #[test]
    fn model_paths_match_walks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let g = random_graph(5, EdgeProbs::default(), &mut rng);
            let m = independence_model(&g, None).unwrap();
            for t in m.triples() {
                assert!(
                    m_separated_by_paths(&g, VSet::single(t.i), VSet::single(t.j), t.c).unwrap()
                );
            }
            let mut count = 0;
            for i in 0..5 {
                for j in i + 1..5 {
                    for c in g.all().without(i).without(j).subsets() {
                        if m_separated_by_paths(&g, s(&[i]), s(&[j]), c).unwrap() {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(count, m.len());
        }
    }
}
