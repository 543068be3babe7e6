//! Districts, barren sets, heads and tails of ancestrally closed sets, latent
//! projection and the canonical DAG of an ADMG.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_core::{is_admg, is_dag, EdgeKind, MixedGraph, VertexKind, V};
use crate::vset::VSet;

/// Largest vertex count for subset enumeration over all vertices.
pub const SUBSET_BOUND: usize = 20;

fn require_admg(g: &MixedGraph) -> Result<()> {
    if !is_admg(g) {
        return Err(Error::Precondition("graph is not an ADMG".into()));
    }
    Ok(())
}

/// District of `i` within `within`: bidirected-connected component.
pub fn district_of(g: &MixedGraph, within: VSet, i: V) -> VSet {
    let mut seen = VSet::single(i);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = VSet::EMPTY;
        for v in frontier.iter() {
            next |= g.sp(v) & within;
        }
        frontier = next - seen;
        seen |= next;
    }
    seen
}

/// Districts of `g` (or of the subgraph induced by `within`), ordered by least member.
pub fn districts(g: &MixedGraph, within: Option<VSet>) -> Result<Vec<VSet>> {
    require_admg(g)?;
    let within = within.unwrap_or(g.all());
    g.check_set(within)?;
    let mut out = Vec::new();
    let mut left = within;
    while let Some(v) = left.min() {
        let d = district_of(g, within, v);
        left -= d;
        out.push(d);
    }
    Ok(out)
}

/// Members of `a` with no proper descendant in `a`.
pub fn barren(g: &MixedGraph, a: VSet) -> VSet {
    a.iter()
        .filter(|&x| (g.de(VSet::single(x)) & a) == VSet::single(x))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Head {
    pub head: Vec<V>,
    pub tail: Vec<V>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadPartition {
    pub base: VSet,
    /// `(head, tail)` in the order the recursion produces them.
    pub heads: Vec<(VSet, VSet)>,
}

impl HeadPartition {
    /// Lines `A | H <- tail(H)`.
    pub fn render(&self, g: &MixedGraph) -> Vec<String> {
        self.heads
            .iter()
            .map(|&(h, t)| {
                format!(
                    "{} | {} <- {}",
                    g.fmt_set(self.base),
                    g.fmt_set(h),
                    g.fmt_set(t)
                )
            })
            .collect()
    }
}

/// Every nonempty `H` within `cur` with `H = ∩_{i∈H} barren(an(dis_cur(i)))`.
fn phi(g: &MixedGraph, cur: VSet) -> Result<Vec<VSet>> {
    let mut found: Vec<VSet> = Vec::new();
    for h in cur.subsets().filter(|h| !h.is_empty()) {
        let meet = h
            .iter()
            .fold(cur, |acc, i| acc & barren(g, g.an(district_of(g, cur, i))));
        if meet == h {
            found.push(h);
        }
    }
    for (x, a) in found.iter().enumerate() {
        if found[x + 1..].iter().any(|b| a.intersects(*b)) {
            return Err(Error::Invariant(format!(
                "overlapping heads found in {}",
                g.fmt_set(cur)
            )));
        }
    }
    Ok(found)
}

/// Tail of a head: `(D \ H) ∪ pa(D)` for the district `D` of `H` in `g⟨an(H)⟩`.
pub fn tail(g: &MixedGraph, h: VSet) -> VSet {
    let anc = g.an(h);
    let d = h
        .iter()
        .fold(VSet::EMPTY, |acc, i| acc | district_of(g, anc, i));
    let pa = d.iter().fold(VSet::EMPTY, |acc, v| acc | g.pa(v));
    (d - h) | pa
}

/// The partition `[A]` of an ancestrally closed set into heads, with tails.
pub fn head_partition(g: &MixedGraph, a: VSet) -> Result<HeadPartition> {
    require_admg(g)?;
    g.check_set(a)?;
    if g.an(a) != a {
        return Err(Error::Precondition(format!(
            "{} is not ancestrally closed",
            g.fmt_set(a)
        )));
    }
    let mut heads = Vec::new();
    let mut cur = a;
    while !cur.is_empty() {
        let stage = phi(g, cur)?;
        if stage.is_empty() {
            return Err(Error::Invariant(format!(
                "no head found in {}",
                g.fmt_set(cur)
            )));
        }
        for h in stage {
            let t = tail(g, h);
            if t.intersects(h) {
                return Err(Error::Invariant(format!(
                    "head {} meets its tail",
                    g.fmt_set(h)
                )));
            }
            cur -= h;
            heads.push((h, t));
        }
    }
    Ok(HeadPartition { base: a, heads })
}

/// All `A` with `A = an(A)`, ordered by size then members; includes ∅ and V.
pub fn ancestrally_closed_sets(g: &MixedGraph) -> Result<Vec<VSet>> {
    require_admg(g)?;
    if g.n() > SUBSET_BOUND {
        return Err(Error::TooLarge(g.n(), SUBSET_BOUND));
    }
    let mut out: Vec<VSet> = g.all().subsets().filter(|&a| g.an(a) == a).collect();
    out.sort_by_key(|a| (a.len(), a.to_vec()));
    Ok(out)
}

/// Vertices reachable from `v` by directed paths whose interior is latent.
fn reach_through(g: &MixedGraph, v: V, latent: VSet) -> VSet {
    let mut out = VSet::EMPTY;
    let mut seen = VSet::single(v);
    let mut frontier = g.ch(v);
    while !frontier.is_empty() {
        let mut next = VSet::EMPTY;
        for w in (frontier - seen).iter() {
            seen.insert(w);
            out.insert(w);
            if latent.contains(w) {
                next |= g.ch(w);
            }
        }
        frontier = next;
    }
    out
}

/// Projection of a DAG onto `observed`: `i -> j` for directed paths through
/// latents, `i <-> j` when some latent reaches both through latents.
pub fn latent_projection(g: &MixedGraph, observed: VSet) -> Result<MixedGraph> {
    if !is_dag(g) {
        return Err(Error::Precondition(
            "latent projection requires a DAG".into(),
        ));
    }
    g.check_set(observed)?;
    let latent = g.all() - observed;
    let obs = observed.to_vec();
    let pos = |v: V| obs.iter().position(|&x| x == v).expect("observed");
    let mut out = g.induced_subgraph(observed)?.without_edges();
    for &i in &obs {
        for j in (reach_through(g, i, latent) & observed).iter() {
            out.insert_edge(pos(i), pos(j), EdgeKind::Directed);
        }
    }
    for l in latent.iter() {
        let hit = (reach_through(g, l, latent) & observed).to_vec();
        for (x, &a) in hit.iter().enumerate() {
            for &b in &hit[x + 1..] {
                if !out.has_edge(pos(a), pos(b), EdgeKind::Bidirected) {
                    out.insert_edge(pos(a), pos(b), EdgeKind::Bidirected);
                }
            }
        }
    }
    Ok(out)
}

/// Replaces each `i <-> j` with `i <- l{i,j} -> j`. Latent vertices are
/// appended after the vertices of `g`; their set is returned alongside.
pub fn canonical_dag(g: &MixedGraph) -> Result<(MixedGraph, VSet)> {
    require_admg(g)?;
    let mut out = g.clone();
    let mut latents = VSet::EMPTY;
    for e in g.edges() {
        if e.kind() != EdgeKind::Bidirected {
            continue;
        }
        let l = out.add_vertex(
            VertexKind::Latent,
            format!("l{{{},{}}}", g.label(e.u), g.label(e.v)),
        );
        out.remove_edge(e.u, e.v, EdgeKind::Bidirected);
        out.insert_edge(l, e.u, EdgeKind::Directed);
        out.insert_edge(l, e.v, EdgeKind::Directed);
        latents.insert(l);
    }
    if latent_projection(&out, g.all())? != *g {
        return Err(Error::Invariant(
            "canonical DAG does not project back onto the input".into(),
        ));
    }
    Ok((out, latents))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{all_dags, random_admg, random_dag, EdgeKind::*};
    use crate::separation::for_each_path;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(vs: &[usize]) -> VSet {
        vs.iter().map(|v| v - 1).collect()
    }

    #[test]
    fn districts_small() {
        let g = MixedGraph::from_edges(
            4,
            &[(1, 2, Bidirected), (2, 3, Bidirected), (4, 1, Directed)],
        )
        .unwrap();
        assert_eq!(
            districts(&g, None).unwrap(),
            vec![set(&[1, 2, 3]), set(&[4])]
        );
        let fig5 =
            MixedGraph::from_edges(4, &[(1, 2, Directed), (2, 3, Directed), (2, 4, Directed)])
                .unwrap();
        assert!(districts(&fig5, None).unwrap().iter().all(|d| d.len() == 1));
        let ug = MixedGraph::from_edges(2, &[(1, 2, Undirected)]).unwrap();
        assert!(districts(&ug, None).is_err());
    }

    #[test]
    fn barren_and_closed_sets() {
        let chain = MixedGraph::from_edges(3, &[(1, 2, Directed), (2, 3, Directed)]).unwrap();
        assert_eq!(barren(&chain, set(&[1, 2, 3])), set(&[3]));
        assert_eq!(
            ancestrally_closed_sets(&chain).unwrap(),
            vec![VSet::EMPTY, set(&[1]), set(&[1, 2]), set(&[1, 2, 3])]
        );
        let anti = MixedGraph::with_vertices(3);
        assert_eq!(barren(&anti, anti.all()), anti.all());
        assert_eq!(ancestrally_closed_sets(&anti).unwrap().len(), 8);
    }

    #[test]
    fn barren_matches_topological_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = random_admg(6, 0.35, 0.25, &mut rng);
            for a in g.all().subsets() {
                // A member is barren iff none of its children leads back into A.
                let scan: VSet = a
                    .iter()
                    .filter(|&x| !(g.de(g.ch(x)) & a).intersects(a))
                    .collect();
                assert_eq!(barren(&g, a), scan);
            }
        }
    }

    #[test]
    fn dag_heads_are_singletons_with_parent_tails() {
        for g in all_dags(4).iter().step_by(7) {
            for a in ancestrally_closed_sets(g).unwrap() {
                let hp = head_partition(g, a).unwrap();
                assert_eq!(hp.heads.len(), a.len());
                for (h, t) in hp.heads {
                    assert_eq!(h.len(), 1);
                    assert_eq!(t, g.pa(h.min().unwrap()));
                }
            }
        }
    }

    #[test]
    fn bidirected_pair_is_one_head() {
        let g = MixedGraph::from_edges(2, &[(1, 2, Bidirected)]).unwrap();
        let hp = head_partition(&g, g.all()).unwrap();
        assert_eq!(hp.heads, vec![(set(&[1, 2]), VSet::EMPTY)]);
        let bow = MixedGraph::from_edges(2, &[(1, 2, Directed), (1, 2, Bidirected)]).unwrap();
        let hp = head_partition(&bow, bow.all()).unwrap();
        assert_eq!(
            hp.heads,
            vec![(set(&[2]), set(&[1])), (set(&[1]), VSet::EMPTY)]
        );
        assert!(head_partition(&bow, set(&[2])).is_err());
    }

    #[test]
    fn heads_partition_and_are_barren_districts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let g = random_admg(6, 0.3, 0.3, &mut rng);
            for a in ancestrally_closed_sets(&g).unwrap() {
                let hp = head_partition(&g, a).unwrap();
                let union = hp.heads.iter().fold(VSet::EMPTY, |acc, &(h, _)| {
                    assert!(!acc.intersects(h));
                    acc | h
                });
                assert_eq!(union, a);
                for &(h, t) in &hp.heads {
                    assert_eq!(barren(&g, g.an(h)), h);
                    assert!(h.is_subset(district_of(&g, g.an(h), h.min().unwrap())));
                    assert!(!h.intersects(t));
                }
            }
        }
    }

    /// Projection edges by exhaustive path enumeration.
    fn projection_oracle(g: &MixedGraph, observed: VSet) -> (Vec<(V, V)>, Vec<(V, V)>) {
        let latent = g.all() - observed;
        let (mut dir, mut bi) = (Vec::new(), Vec::new());
        for i in observed.iter() {
            for j in observed.iter().filter(|&j| j != i) {
                for_each_path(
                    g,
                    i,
                    j,
                    &|v, collider| !latent.contains(v) || collider,
                    &mut |vs, es, _| {
                        let first = es[0].mark_at(vs[0]);
                        let last = es[es.len() - 1].mark_at(j);
                        let all_forward = es
                            .iter()
                            .zip(vs.windows(2))
                            .all(|(e, w)| e.mark_at(w[1]) == crate::graph_core::Mark::Arrow);
                        if all_forward && !dir.contains(&(i, j)) {
                            dir.push((i, j));
                        }
                        if i < j
                            && first == crate::graph_core::Mark::Arrow
                            && last == crate::graph_core::Mark::Arrow
                            && !bi.contains(&(i, j))
                        {
                            bi.push((i, j));
                        }
                        true
                    },
                );
            }
        }
        dir.sort();
        bi.sort();
        (dir, bi)
    }

    #[test]
    fn projection_matches_path_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let g = random_dag(7, 0.35, &mut rng);
            let observed: VSet = (0..7)
                .filter(|_| rand::Rng::gen_bool(&mut rng, 0.6))
                .collect();
            let p = latent_projection(&g, observed).unwrap();
            let obs = observed.to_vec();
            let (dir, bi) = projection_oracle(&g, observed);
            let mut pdir = Vec::new();
            let mut pbi = Vec::new();
            for e in p.edges() {
                match e.kind() {
                    Directed if e.mark_u == crate::graph_core::Mark::Tail => {
                        pdir.push((obs[e.u], obs[e.v]))
                    }
                    Directed => pdir.push((obs[e.v], obs[e.u])),
                    Bidirected => pbi.push((obs[e.u], obs[e.v])),
                    Undirected => panic!("undirected edge in projection"),
                }
            }
            pdir.sort();
            pbi.sort();
            assert_eq!(pdir, dir);
            assert_eq!(pbi, bi);
            assert!(is_admg(&p));
        }
    }

    #[test]
    fn canonical_dag_shapes() {
        let g = MixedGraph::from_edges(2, &[(1, 2, Bidirected)]).unwrap();
        let (d, l) = canonical_dag(&g).unwrap();
        assert_eq!(l.len(), 1);
        let lv = l.min().unwrap();
        assert_eq!(d.label(lv), "l{1,2}");
        assert_eq!(d.ch(lv), set(&[1, 2]));
        let dag = MixedGraph::from_edges(3, &[(1, 2, Directed)]).unwrap();
        assert_eq!(canonical_dag(&dag).unwrap(), (dag.clone(), VSet::EMPTY));
        let fig6 = MixedGraph::from_edges(
            3,
            &[(1, 2, Bidirected), (2, 3, Bidirected), (1, 3, Directed)],
        )
        .unwrap();
        let (d, l) = canonical_dag(&fig6).unwrap();
        assert_eq!(l.len(), 2);
        assert!(is_dag(&d));
        assert_eq!(latent_projection(&d, fig6.all()).unwrap(), fig6);
    }

    #[test]
    fn projection_rejects_cycles() {
        let g = MixedGraph::from_edges(2, &[(1, 2, Directed), (2, 1, Bidirected)]).unwrap();
        assert!(latent_projection(&g, g.all()).is_err());
    }
}
