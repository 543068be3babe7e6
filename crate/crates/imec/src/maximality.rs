//! Inducing paths, maximality, maximal completion and the anterior graph.

use crate::error::{Error, Result};
use crate::graph_core::{is_ag, is_rg, EdgeKind, MixedGraph, V};
use crate::separation::{for_each_path, m_separated, Path, DEFAULT_BOUND};
use crate::vset::VSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducingPathWitness {
    pub endpoints: (V, V),
    pub path: Path,
}

/// All simple paths between `i` and `j` whose interior vertices are colliders
/// and ancestors of `i` or `j`. A single edge qualifies.
pub fn inducing_paths(g: &MixedGraph, i: V, j: V) -> Result<Vec<InducingPathWitness>> {
    g.check(i)?;
    g.check(j)?;
    if i == j {
        return Err(Error::Invalid("endpoints must differ".into()));
    }
    let anc = g.an(VSet::single(i).with(j));
    let mut out = Vec::new();
    for_each_path(
        g,
        i,
        j,
        &|v, collider| !collider || !anc.contains(v),
        &mut |vs, es, _| {
            out.push(InducingPathWitness {
                endpoints: (i, j),
                path: Path {
                    vertices: vs.to_vec(),
                    edges: es.to_vec(),
                },
            });
            true
        },
    );
    Ok(out)
}

/// Whether some inducing path joins `i` and `j`. Searches collider walks,
/// which shorten to collider paths by cutting loops.
pub fn has_inducing_path(g: &MixedGraph, i: V, j: V) -> bool {
    if g.is_adjacent(i, j) {
        return true;
    }
    let eligible = g.an(VSet::single(i).with(j)).without(i).without(j);
    let mut seen = (g.ch(i) | g.sp(i)) & eligible;
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = VSet::EMPTY;
        for v in frontier.iter() {
            if g.arrow_in(v).contains(j) {
                return true;
            }
            next |= g.sp(v) & eligible;
        }
        frontier = next - seen;
        seen |= next;
    }
    false
}

/// Brute force: every nonadjacent pair is separated by some subset of the
/// remaining vertices.
pub fn is_maximal(g: &MixedGraph) -> Result<bool> {
    if g.n() > DEFAULT_BOUND {
        return Err(Error::TooLarge(g.n(), DEFAULT_BOUND));
    }
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            if g.is_adjacent(i, j) {
                continue;
            }
            let rest = g.all().without(i).without(j);
            let mut separable = false;
            for c in rest.subsets() {
                if m_separated(g, VSet::single(i), VSet::single(j), c)? {
                    separable = true;
                    break;
                }
            }
            if !separable {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Maximality via inducing paths; agrees with [`is_maximal`] on ancestral graphs.
pub fn is_maximal_by_inducing_paths(g: &MixedGraph) -> bool {
    (0..g.n()).all(|i| (i + 1..g.n()).all(|j| g.is_adjacent(i, j) || !has_inducing_path(g, i, j)))
}

/// Adds `i <-> j` for nonadjacent endpoints of inducing paths until none remain.
pub fn maximal_completion(g: &MixedGraph) -> Result<MixedGraph> {
    if !is_ag(g) && !is_rg(g) {
        return Err(Error::Precondition(
            "completion defined only for ribbonless graphs".into(),
        ));
    }
    let mut cur = g.clone();
    for _ in 0..=g.n() {
        let mut added = Vec::new();
        for i in 0..cur.n() {
            for j in i + 1..cur.n() {
                if !cur.is_adjacent(i, j) && has_inducing_path(&cur, i, j) {
                    added.push((i, j));
                }
            }
        }
        if added.is_empty() {
            return Ok(cur);
        }
        for (i, j) in added {
            let an_i = cur.an(VSet::single(i));
            let an_j = cur.an(VSet::single(j));
            if an_i.contains(j) || an_j.contains(i) {
                return Err(Error::Invariant(format!(
                    "completion between ancestrally related {} and {} would need a non-bidirected edge",
                    cur.label(i),
                    cur.label(j)
                )));
            }
            cur.insert_edge(i, j, EdgeKind::Bidirected);
        }
    }
    Err(Error::Invariant(
        "maximal completion did not converge".into(),
    ))
}

/// Rewrites `i <-> j -- k` to `i <- j -- k` and `i -> j -- k` to `i -- j -- k`
/// until no arrowhead points into an endpoint of an undirected edge.
pub fn anterior_graph(g: &MixedGraph) -> MixedGraph {
    let mut cur = g.clone();
    loop {
        let Some(j) = (0..cur.n()).find(|&v| !cur.ne(v).is_empty() && !cur.arrow_in(v).is_empty())
        else {
            return cur;
        };
        for i in cur.pa(j).iter() {
            cur.remove_edge(i, j, EdgeKind::Directed);
            cur.insert_edge(i, j, EdgeKind::Undirected);
        }
        for i in cur.sp(j).iter() {
            cur.remove_edge(i, j, EdgeKind::Bidirected);
            if !cur.pa(j).contains(i) {
                cur.insert_edge(j, i, EdgeKind::Directed);
            }
        }
    }
}
