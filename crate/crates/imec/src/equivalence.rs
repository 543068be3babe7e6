//! Colliders with order, discriminating paths, and the Markov, I-Markov and
//! controlled I-Markov equivalence checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_core::{is_admg, is_ag, is_mag, EdgeKind, MixedGraph, V};
use crate::intervention::{
    doubly_intervened_selection_adjacent, interventional_graph, symmetric_difference_targets,
    TargetMultiset,
};
use crate::maximality::maximal_completion;
use crate::separation::{independence_model, m_separated, model_bits, SepTriple, DEFAULT_BOUND};
use crate::vset::VSet;

/// Collider triple `<i, j, k>` stored with `i < k`.
pub type Triple = (V, V, V);

fn canon(i: V, j: V, k: V) -> Triple {
    if i < k {
        (i, j, k)
    } else {
        (k, j, i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedCollider {
    pub triple: Triple,
    pub order: usize,
    /// Discriminating path `<v0, .., vm, b, c>` for orders above zero.
    pub witness: Option<Vec<V>>,
}

impl OrderedCollider {
    pub fn render(&self, g: &MixedGraph) -> String {
        let (i, j, k) = self.triple;
        let mut s = format!(
            "<{},{},{}> order {}",
            g.label(i),
            g.label(j),
            g.label(k),
            self.order
        );
        if let Some(w) = &self.witness {
            let names: Vec<&str> = w.iter().map(|&v| g.label(v)).collect();
            s.push_str(&format!(" via <{}>", names.join(",")));
        }
        s
    }
}

/// All collider triples: both edges carry an arrowhead at the middle vertex.
pub fn collider_triples(g: &MixedGraph) -> Vec<Triple> {
    let mut out = Vec::new();
    for j in 0..g.n() {
        let ins = g.arrow_in(j).to_vec();
        for (x, &i) in ins.iter().enumerate() {
            for &k in &ins[x + 1..] {
                out.push((i, j, k));
            }
        }
    }
    out.sort();
    out
}

/// Order-zero colliders (unshielded collider triples).
pub fn v_structures(g: &MixedGraph) -> BTreeSet<Triple> {
    collider_triples(g)
        .into_iter()
        .filter(|&(i, _, k)| !g.is_adjacent(i, k))
        .collect()
}

/// Adjacent pairs `(a, b)` with `a < b`.
pub fn skeleton(g: &MixedGraph) -> BTreeSet<(V, V)> {
    let mut out = BTreeSet::new();
    for a in 0..g.n() {
        for b in g.adj(a).iter().filter(|&b| b > a) {
            out.insert((a, b));
        }
    }
    out
}

/// Searches a discriminating path `<v0, .., vm, b, c>` for the triple
/// `<vm, b, c>` whose consecutive collider triples all lie in `ordered`.
fn find_discriminating(
    g: &MixedGraph,
    vm: V,
    b: V,
    c: V,
    ordered: &dyn Fn(Triple) -> bool,
) -> Option<Vec<V>> {
    fn rec(
        g: &MixedGraph,
        prev: V,
        cur: V,
        c: V,
        visited: VSet,
        stack: &mut Vec<V>,
        ordered: &dyn Fn(Triple) -> bool,
    ) -> bool {
        for x in (g.adj(cur) - visited).iter() {
            if !ordered(canon(x, cur, prev)) {
                continue;
            }
            if !g.is_adjacent(x, c) {
                stack.push(x);
                return true;
            }
            if g.pa(c).contains(x) {
                stack.push(x);
                if rec(g, cur, x, c, visited.with(x), stack, ordered) {
                    return true;
                }
                stack.pop();
            }
        }
        false
    }
    if !g.pa(c).contains(vm) {
        return None;
    }
    let mut stack = vec![vm];
    let visited = VSet::single(vm).with(b).with(c);
    if rec(g, b, vm, c, visited, &mut stack, ordered) {
        stack.reverse();
        stack.push(b);
        stack.push(c);
        Some(stack)
    } else {
        None
    }
}

fn colliders_with_order_from(g: &MixedGraph, triples: Vec<Triple>) -> Vec<OrderedCollider> {
    let mut order: BTreeMap<Triple, (usize, Option<Vec<V>>)> = BTreeMap::new();
    for &(i, j, k) in &triples {
        if !g.is_adjacent(i, k) {
            order.insert((i, j, k), (0, None));
        }
    }
    let is_collider: HashSet<Triple> = triples.iter().copied().collect();
    let mut t = 0;
    loop {
        let snapshot: HashSet<Triple> = order.keys().copied().collect();
        let ordered = |x: Triple| snapshot.contains(&x) && is_collider.contains(&x);
        let mut added = Vec::new();
        for &(i, j, k) in &triples {
            if snapshot.contains(&(i, j, k)) {
                continue;
            }
            let found = find_discriminating(g, i, j, k, &ordered)
                .or_else(|| find_discriminating(g, k, j, i, &ordered));
            if let Some(path) = found {
                added.push(((i, j, k), path));
            }
        }
        if added.is_empty() {
            break;
        }
        t += 1;
        for (tr, path) in added {
            order.insert(tr, (t, Some(path)));
        }
    }
    order
        .into_iter()
        .map(|(triple, (order, witness))| OrderedCollider {
            triple,
            order,
            witness,
        })
        .collect()
}

/// Colliders with order, each with its least order and one witness path,
/// sorted by triple.
pub fn colliders_with_order(g: &MixedGraph) -> Vec<OrderedCollider> {
    colliders_with_order_from(g, collider_triples(g))
}

/// Same computation with the candidate triples visited in a caller-chosen order.
pub fn colliders_with_order_permuted(g: &MixedGraph, perm: &[usize]) -> Vec<OrderedCollider> {
    let base = collider_triples(g);
    let triples = perm.iter().map(|&p| base[p]).collect();
    colliders_with_order_from(g, triples)
}

/// Colliders with order in `g^I` whose triple is not a collider with order in `g`.
pub fn i_colliders_with_order(
    g: &MixedGraph,
    targets: &TargetMultiset,
) -> Result<Vec<OrderedCollider>> {
    let gi = interventional_graph(g, targets)?;
    let base: HashSet<Triple> = colliders_with_order(g)
        .into_iter()
        .map(|c| c.triple)
        .collect();
    Ok(colliders_with_order(&gi)
        .into_iter()
        .filter(|c| !base.contains(&c.triple))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Separation {
        statement: String,
        holds_in: Side,
    },
    Adjacency {
        pair: (String, String),
        adjacent_in: Side,
    },
    Collider {
        collider: String,
        present_in: Side,
    },
    DiscriminatingPath {
        path: Vec<String>,
        collider_in: Side,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Graphical,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub method: String,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub const METHOD_BRUTE: &str = "brute-force-J";
pub const METHOD_GRAPHICAL: &str = "graphical";

fn same_vertices(g: &MixedGraph, h: &MixedGraph) -> Result<()> {
    if g.vertices() != h.vertices() {
        return Err(Error::Invalid("graphs have different vertex sets".into()));
    }
    Ok(())
}

/// Compares independence models of two graphs on the same vertex list. A
/// distinguishing statement is re-checked on both graphs before returning.
pub fn brute_force_verdict(g: &MixedGraph, h: &MixedGraph) -> Result<EquivalenceVerdict> {
    same_vertices(g, h)?;
    let jg = independence_model(g, None)?;
    let jh = independence_model(h, None)?;
    let witness = match jg.first_difference(&jh) {
        None => None,
        Some((t, in_g)) => {
            let (a, b, c) = (VSet::single(t.i), VSet::single(t.j), t.c);
            if m_separated(g, a, b, c)? != in_g || m_separated(h, a, b, c)? == in_g {
                return Err(Error::Invariant(
                    "separation witness failed re-check".into(),
                ));
            }
            Some(Witness::Separation {
                statement: t.render(g),
                holds_in: if in_g { Side::First } else { Side::Second },
            })
        }
    };
    Ok(EquivalenceVerdict {
        equivalent: witness.is_none(),
        method: METHOD_BRUTE.into(),
        witness,
        note: None,
    })
}

fn first_difference<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Option<(T, Side)> {
    let x = a.difference(b).next().map(|t| (t.clone(), Side::First));
    let y = b.difference(a).next().map(|t| (t.clone(), Side::Second));
    match (x, y) {
        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
        (x, y) => x.or(y),
    }
}

fn adjacency_witness(g: &MixedGraph, h: &MixedGraph) -> Option<Witness> {
    first_difference(&skeleton(g), &skeleton(h)).map(|((a, b), side)| Witness::Adjacency {
        pair: (g.label(a).to_string(), g.label(b).to_string()),
        adjacent_in: side,
    })
}

fn collider_witness(
    g: &MixedGraph,
    h: &MixedGraph,
    cg: &[OrderedCollider],
    ch: &[OrderedCollider],
) -> Option<Witness> {
    let sg: BTreeSet<Triple> = cg.iter().map(|c| c.triple).collect();
    let sh: BTreeSet<Triple> = ch.iter().map(|c| c.triple).collect();
    first_difference(&sg, &sh).map(|(t, side)| {
        let (graph, list) = if side == Side::First {
            (g, cg)
        } else {
            (h, ch)
        };
        let oc = list
            .iter()
            .find(|c| c.triple == t)
            .expect("collider listed");
        Witness::Collider {
            collider: oc.render(graph),
            present_in: side,
        }
    })
}

/// Same adjacencies and same colliders with order (compared by triple).
fn mag_criterion(g: &MixedGraph, h: &MixedGraph) -> Option<Witness> {
    adjacency_witness(g, h)
        .or_else(|| collider_witness(g, h, &colliders_with_order(g), &colliders_with_order(h)))
}

fn graphical_verdict(witness: Option<Witness>) -> EquivalenceVerdict {
    EquivalenceVerdict {
        equivalent: witness.is_none(),
        method: METHOD_GRAPHICAL.into(),
        witness,
        note: None,
    }
}

fn combine(brute: EquivalenceVerdict, graphical: EquivalenceVerdict) -> Result<EquivalenceVerdict> {
    if brute.equivalent != graphical.equivalent {
        return Err(Error::Invariant(format!(
            "methods disagree: brute force says {}, graphical says {}",
            brute.equivalent, graphical.equivalent
        )));
    }
    Ok(EquivalenceVerdict {
        method: "both".into(),
        witness: graphical.witness.or(brute.witness),
        ..brute
    })
}

pub fn markov_equivalent(
    g: &MixedGraph,
    h: &MixedGraph,
    method: Method,
) -> Result<EquivalenceVerdict> {
    same_vertices(g, h)?;
    let graphical = || -> Result<EquivalenceVerdict> {
        if !is_mag(g) || !is_mag(h) {
            return Err(Error::Precondition(
                "graphical criterion requires MAGs".into(),
            ));
        }
        Ok(graphical_verdict(mag_criterion(g, h)))
    };
    match method {
        Method::Brute => brute_force_verdict(g, h),
        Method::Graphical => graphical(),
        Method::Both => combine(brute_force_verdict(g, h)?, graphical()?),
    }
}

/// Why the graphical I-Markov criterion does not apply, if it does not.
pub fn graphical_precondition(
    g: &MixedGraph,
    h: &MixedGraph,
    targets: &TargetMultiset,
) -> Option<String> {
    for (name, x) in [("first", g), ("second", h)] {
        if !is_ag(x) {
            return Some(format!("{name} graph is not ancestral"));
        }
        let bad = doubly_intervened_selection_adjacent(x, targets);
        if !bad.is_empty() {
            return Some(format!(
                "doubly-intervened selection node {} in {name} graph",
                x.fmt_set(bad)
            ));
        }
    }
    None
}

/// Everything the graphical criterion compares, as a hashable value: the
/// skeleton and collider triples of the completion, and the triples of its
/// I-colliders with order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphicalKey {
    pub skeleton: Vec<(V, V)>,
    pub colliders: Vec<Triple>,
    pub i_colliders: Vec<Triple>,
}

pub fn graphical_key(g: &MixedGraph, targets: &TargetMultiset) -> Result<GraphicalKey> {
    let bar = maximal_completion(g)?;
    let c = colliders_with_order(&bar);
    let ic = i_colliders_with_order(&bar, targets)?;
    Ok(GraphicalKey {
        skeleton: skeleton(&bar).into_iter().collect(),
        colliders: c.into_iter().map(|x| x.triple).collect(),
        i_colliders: ic.into_iter().map(|x| x.triple).collect(),
    })
}

fn i_graphical(
    g: &MixedGraph,
    h: &MixedGraph,
    targets: &TargetMultiset,
) -> Result<EquivalenceVerdict> {
    let gb = maximal_completion(g)?;
    let hb = maximal_completion(h)?;
    if let Some(w) = mag_criterion(&gb, &hb) {
        return Ok(graphical_verdict(Some(w)));
    }
    let gi = interventional_graph(&gb, targets)?;
    let hi = interventional_graph(&hb, targets)?;
    let cg = i_colliders_with_order(&gb, targets)?;
    let ch = i_colliders_with_order(&hb, targets)?;
    Ok(graphical_verdict(collider_witness(&gi, &hi, &cg, &ch)))
}

pub fn i_markov_equivalent(
    g: &MixedGraph,
    h: &MixedGraph,
    targets: &TargetMultiset,
    method: Method,
) -> Result<EquivalenceVerdict> {
    same_vertices(g, h)?;
    let brute = || {
        brute_force_verdict(
            &interventional_graph(g, targets)?,
            &interventional_graph(h, targets)?,
        )
    };
    if method == Method::Brute {
        return brute();
    }
    if let Some(why) = graphical_precondition(g, h, targets) {
        let mut v = brute()?;
        v.note = Some(format!(
            "precondition violated ({why}), fell back to brute force"
        ));
        return Ok(v);
    }
    match method {
        Method::Graphical => i_graphical(g, h, targets),
        _ => combine(brute()?, i_graphical(g, h, targets)?),
    }
}

/// MAG with the same independence model and ancestral relations as an ADMG.
pub fn mag_of(g: &MixedGraph) -> Result<MixedGraph> {
    if !is_admg(g) {
        return Err(Error::Precondition("mag_of requires an ADMG".into()));
    }
    let mb = model_bits(g, None, DEFAULT_BOUND)?;
    let n = g.n();
    let mut out = g.without_edges();
    for i in 0..n {
        for j in i + 1..n {
            let free = VSet::full(n).without(i).without(j);
            if free.subsets().any(|c| mb.get(i, j, c.0)) {
                continue;
            }
            if g.an(VSet::single(j)).contains(i) {
                out.insert_edge(i, j, EdgeKind::Directed);
            } else if g.an(VSet::single(i)).contains(j) {
                out.insert_edge(j, i, EdgeKind::Directed);
            } else {
                out.insert_edge(i, j, EdgeKind::Bidirected);
            }
        }
    }
    Ok(out)
}

/// All discriminating paths `<v0, .., vm, b, c>` (m >= 1): `v0` and `c`
/// nonadjacent, each of `v1..vm` a collider on the path and a parent of `c`.
pub fn discriminating_paths(g: &MixedGraph) -> Vec<Vec<V>> {
    fn rec(
        g: &MixedGraph,
        prev: V,
        cur: V,
        c: V,
        visited: VSet,
        stack: &mut Vec<V>,
        out: &mut Vec<Vec<V>>,
    ) {
        // `cur` must be a collider between `prev` and the next vertex.
        if !g.arrow_in(cur).contains(prev) {
            return;
        }
        for x in (g.arrow_in(cur) - visited).iter() {
            stack.push(x);
            if !g.is_adjacent(x, c) {
                let mut p = stack.clone();
                p.reverse();
                out.push(p);
            }
            if g.pa(c).contains(x) {
                rec(g, cur, x, c, visited.with(x), stack, out);
            }
            stack.pop();
        }
    }
    let mut out = Vec::new();
    for c in 0..g.n() {
        for b in g.adj(c).iter() {
            for vm in (g.pa(c) & g.adj(b)).iter() {
                if vm == b {
                    continue;
                }
                // stack holds c, b, vm, .. in reverse path order.
                let mut stack = vec![c, b, vm];
                rec(
                    g,
                    b,
                    vm,
                    c,
                    VSet::single(c).with(b).with(vm),
                    &mut stack,
                    &mut out,
                );
            }
        }
    }
    out.sort();
    out
}

fn is_collider_at(g: &MixedGraph, a: V, b: V, c: V) -> bool {
    g.arrow_in(b).contains(a) && g.arrow_in(b).contains(c)
}

/// Skeleton, v-structures, and collider status on shared discriminating paths.
fn kjsb_criterion(mg: &MixedGraph, mh: &MixedGraph) -> Option<Witness> {
    if let Some(w) = adjacency_witness(mg, mh) {
        return Some(w);
    }
    let vg = v_structures(mg);
    let vh = v_structures(mh);
    if let Some((t, side)) = first_difference(&vg, &vh) {
        let oc = OrderedCollider {
            triple: t,
            order: 0,
            witness: None,
        };
        return Some(Witness::Collider {
            collider: oc.render(mg),
            present_in: side,
        });
    }
    let ph: HashSet<Vec<V>> = discriminating_paths(mh).into_iter().collect();
    for p in discriminating_paths(mg) {
        if !ph.contains(&p) {
            continue;
        }
        let m = p.len();
        let (a, b, c) = (p[m - 3], p[m - 2], p[m - 1]);
        let in_g = is_collider_at(mg, a, b, c);
        if in_g != is_collider_at(mh, a, b, c) {
            return Some(Witness::DiscriminatingPath {
                path: p.iter().map(|&v| mg.label(v).to_string()).collect(),
                collider_in: if in_g { Side::First } else { Side::Second },
            });
        }
    }
    None
}

/// Controlled I-Markov equivalence of two ADMGs. Builds the MAGs of `g^K` and
/// `h^K` for `K = I△I` and applies the skeleton / v-structure /
/// discriminating-path criterion; the exhaustive comparison of `J(g^K)` and
/// `J(h^K)` runs alongside and must agree.
pub fn controlled_i_markov_equivalent(
    g: &MixedGraph,
    h: &MixedGraph,
    targets: &TargetMultiset,
) -> Result<EquivalenceVerdict> {
    same_vertices(g, h)?;
    if !is_admg(g) || !is_admg(h) {
        return Err(Error::Precondition(
            "controlled equivalence requires ADMGs".into(),
        ));
    }
    let k = symmetric_difference_targets(targets);
    let gk = interventional_graph(g, &k)?;
    let hk = interventional_graph(h, &k)?;
    let mg = mag_of(&gk)?;
    let mh = mag_of(&hk)?;
    let graphical = graphical_verdict(kjsb_criterion(&mg, &mh));
    let brute = brute_force_verdict(&gk, &hk)?;
    let mut v = combine(brute, graphical)?;
    v.method = METHOD_GRAPHICAL.into();
    Ok(v)
}

/// Renders a separation statement of `g` for messages.
pub fn render_statement(g: &MixedGraph, t: &SepTriple) -> String {
    t.render(g)
}
