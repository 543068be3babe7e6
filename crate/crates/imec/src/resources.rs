//! Embedded figure graphs and target files, and the figure reproductions
//! checked by `repro`.

use serde::Serialize;

use crate::admg_factor::districts;
use crate::equivalence::{
    colliders_with_order, controlled_i_markov_equivalent, i_colliders_with_order,
    i_markov_equivalent, markov_equivalent, Method, Triple,
};
use crate::error::{Error, Result};
use crate::graph_core::{classify, find_ribbons, is_rg, ClassLabel, MixedGraph, V};
use crate::intervention::{
    interventional_graph, perfect_intervention, symmetric_difference_targets, TargetMultiset,
};
use crate::maximality::{is_maximal, maximal_completion};
use crate::separation::{independence_model, m_separated};
use crate::vset::VSet;

const GRAPHS: &[(&str, &str)] = &[
    ("fig1", include_str!("../resources/fig1.lmg")),
    ("fig2-g", include_str!("../resources/fig2-g.lmg")),
    ("fig2-h", include_str!("../resources/fig2-h.lmg")),
    ("fig3", include_str!("../resources/fig3.lmg")),
    ("fig5", include_str!("../resources/fig5.lmg")),
    ("fig6-left", include_str!("../resources/fig6-left.lmg")),
    ("fig6-right", include_str!("../resources/fig6-right.lmg")),
    ("fig7", include_str!("../resources/fig7.lmg")),
];

const TARGETS: &[(&str, &str)] = &[
    ("fig1", include_str!("../resources/fig1.targets")),
    ("fig2", include_str!("../resources/fig2.targets")),
    ("fig3", include_str!("../resources/fig3.targets")),
    ("fig5", include_str!("../resources/fig5.targets")),
    ("fig6", include_str!("../resources/fig6.targets")),
    ("fig8", include_str!("../resources/fig8.targets")),
];

const GOLDEN: &[(&str, &str)] = &[
    ("fig1", include_str!("../resources/golden/fig1.txt")),
    ("fig2", include_str!("../resources/golden/fig2.txt")),
    ("fig3", include_str!("../resources/golden/fig3.txt")),
    ("fig5", include_str!("../resources/golden/fig5.txt")),
    ("fig6", include_str!("../resources/golden/fig6.txt")),
    ("fig7", include_str!("../resources/golden/fig7.txt")),
    ("fig8", include_str!("../resources/golden/fig8.txt")),
];

pub const FIGURES: &[&str] = &["fig1", "fig2", "fig3", "fig5", "fig6", "fig7", "fig8"];

pub fn graph_names() -> Vec<&'static str> {
    GRAPHS.iter().map(|g| g.0).collect()
}

pub fn graph_text(name: &str) -> Result<&'static str> {
    GRAPHS
        .iter()
        .find(|g| g.0 == name)
        .map(|g| g.1)
        .ok_or_else(|| Error::Invalid(format!("no embedded graph named {name}")))
}

pub fn graph(name: &str) -> Result<MixedGraph> {
    MixedGraph::parse(graph_text(name)?)
}

pub fn targets(name: &str, g: &MixedGraph) -> Result<TargetMultiset> {
    let text = TARGETS
        .iter()
        .find(|t| t.0 == name)
        .map(|t| t.1)
        .ok_or_else(|| Error::Invalid(format!("no embedded targets named {name}")))?;
    TargetMultiset::parse(text, g)
}

pub fn golden(fig: &str) -> Result<&'static str> {
    GOLDEN
        .iter()
        .find(|g| g.0 == fig)
        .map(|g| g.1)
        .ok_or_else(|| Error::Invalid(format!("no reproduction for {fig}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub claim: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reproduction {
    pub figure: String,
    pub claims: Vec<Claim>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.ok)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.figure);
        for c in &self.claims {
            s.push_str(&format!(
                "  [{}] {}\n",
                if c.ok { "ok" } else { "FAIL" },
                c.claim
            ));
        }
        s
    }
}

struct Claims(Vec<Claim>);

impl Claims {
    fn check(&mut self, claim: impl Into<String>, ok: bool) {
        self.0.push(Claim {
            claim: claim.into(),
            ok,
        });
    }
}

fn id(g: &MixedGraph, label: &str) -> Result<V> {
    g.find_or_err(label)
}

fn set(g: &MixedGraph, labels: &[&str]) -> Result<VSet> {
    labels.iter().map(|l| id(g, l)).collect()
}

fn ordered(g: &MixedGraph, triples: &[(Triple, usize)]) -> String {
    let parts: Vec<String> = triples
        .iter()
        .map(|&((i, j, k), o)| format!("<{},{},{}>:{}", g.label(i), g.label(j), g.label(k), o))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn fig1() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig1")?;
    let cls = classify(&g);
    c.check("G is a ribbonless graph", cls.contains(&ClassLabel::Rg));
    c.check(
        "G is not ancestral (directed cycle 4 -> 5 -> 6 -> 7 -> 4)",
        !cls.contains(&ClassLabel::Ag),
    );
    c.check(
        "selection-adjacent vertices of G are {1,2}",
        g.selection_adjacent() == set(&g, &["1", "2"])?,
    );
    let t = targets("fig1", &g)?;
    let gi = interventional_graph(&g, &t)?;
    let (w1, w4, w14) = (id(&gi, "w{1}#0")?, id(&gi, "w{4}#0")?, id(&gi, "w{1,4}#0")?);
    c.check(
        "G^I for I = {{1},{4},{1,4}} adds w{1} -> 1, w{4} -> 4, w{1,4} -> 1, w{1,4} -> 4",
        gi.ch(w1) == VSet::single(0)
            && gi.ch(w4) == VSet::single(3)
            && gi.ch(w14) == set(&g, &["1", "4"])?,
    );
    let ribbon = |gi: &MixedGraph, a: V, b: V| {
        find_ribbons(gi)
            .iter()
            .any(|r| r.triple == (a.min(b), 3, a.max(b)) && r.via_cycle)
    };
    c.check(
        "G^I has the cyclic ribbon <w{1,4},4,w{4}>",
        ribbon(&gi, w14, w4),
    );
    c.check("G^I is not ribbonless", !is_rg(&gi));
    let t2 = TargetMultiset::from_labels(&[&[4], &[1, 4]]);
    let gi2 = interventional_graph(&g, &t2)?;
    let (a, b) = (id(&gi2, "w{1,4}#0")?, id(&gi2, "w{4}#0")?);
    c.check(
        "for I = {{4},{1,4}}, G^I has the cyclic ribbon <w{1,4},4,w{4}>",
        ribbon(&gi2, a, b),
    );
    c.check("for I = {{4},{1,4}}, G^I is not ribbonless", !is_rg(&gi2));
    Ok(c.0)
}

fn fig2() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig2-g")?;
    let h = graph("fig2-h")?;
    let t = targets("fig2", &g)?;
    let gi = interventional_graph(&g, &t)?;
    let hi = interventional_graph(&h, &t)?;
    let (w14, w15) = (id(&gi, "w{1,4}#0")?, id(&gi, "w{1,5}#0")?);
    let two = set(&g, &["2"])?;
    let sep = |x: &MixedGraph| m_separated(x, VSet::single(w15), VSet::single(w14), two);
    c.check(
        "G and H are Markov equivalent",
        markov_equivalent(&g, &h, Method::Brute)?.equivalent,
    );
    c.check("<w{1,5}, w{1,4} | 2> holds in J(G^I)", sep(&gi)?);
    c.check("<w{1,5}, w{1,4} | 2> fails in J(H^I)", !sep(&hi)?);
    let v = i_markov_equivalent(&g, &h, &t, Method::Both)?;
    c.check("G and H are not I-Markov equivalent", !v.equivalent);
    c.check(
        "graphical method reports doubly-intervened selection node 1",
        v.note
            .as_deref()
            .is_some_and(|n| n.contains("doubly-intervened selection node {1}")),
    );
    Ok(c.0)
}

fn fig3() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig3")?;
    let t = targets("fig3", &g)?;
    let gi = interventional_graph(&g, &t)?;
    let w = id(&gi, "w{1}#0")?;
    let cwo: Vec<(Triple, usize)> = colliders_with_order(&gi)
        .iter()
        .map(|x| (x.triple, x.order))
        .collect();
    let expected = vec![((0, 1, 2), 1), ((1, 0, w), 0)];
    c.check(
        format!(
            "colliders with order of G^I are {}",
            ordered(&gi, &expected)
        ),
        cwo == expected,
    );
    c.check(
        "G has no colliders with order",
        colliders_with_order(&g).is_empty(),
    );
    let ic: Vec<(Triple, usize)> = i_colliders_with_order(&g, &t)?
        .iter()
        .map(|x| (x.triple, x.order))
        .collect();
    c.check("both are I-colliders with order", ic == expected);
    Ok(c.0)
}

fn fig5() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig5")?;
    let t = targets("fig5", &g)?;
    c.check(
        "districts of G are singletons",
        districts(&g, None)?.iter().all(|d| d.len() == 1),
    );
    let k = symmetric_difference_targets(&t);
    c.check(
        "I△I = {{}, {2,3}, {2,4}, {3,4}}",
        k == TargetMultiset::from_labels(&[&[], &[2, 3], &[2, 4], &[3, 4]]),
    );
    let gk = interventional_graph(&g, &k)?;
    let gi = interventional_graph(&g, &t)?;
    let w = |x: &MixedGraph, l: &str| id(x, l);
    let rest_k = gk.all() - gk.substantive();
    let w34 = w(&gk, "w{3,4}#0")?;
    let one = VSet::single(0);
    let two = VSet::single(1);
    c.check(
        "<1, w{3,4} | 2> holds in J(G^(I△I)) with the other interventional vertices conditioned on",
        m_separated(&gk, one, VSet::single(w34), two | rest_k.without(w34))?,
    );
    let rest_i = gi.all() - gi.substantive();
    let w23 = w(&gi, "w{2,3}#0")?;
    c.check(
        "<1, w{2,3} | 2> fails in J(G^I) with the other interventional vertices conditioned on",
        !m_separated(&gi, one, VSet::single(w23), two | rest_i.without(w23))?,
    );
    Ok(c.0)
}

fn fig6() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig6-left")?;
    let h = graph("fig6-right")?;
    let t = targets("fig6", &g)?;
    c.check(
        "both graphs are MAGs",
        classify(&g).contains(&ClassLabel::Mag) && classify(&h).contains(&ClassLabel::Mag),
    );
    c.check(
        "G and H are I-Markov equivalent",
        i_markov_equivalent(&g, &h, &t, Method::Both)?.equivalent,
    );
    let k = symmetric_difference_targets(&t);
    c.check(
        "I△I adds the target {1}",
        k.targets().contains(&VSet::single(0)) && !t.targets().contains(&VSet::single(0)),
    );
    let tri = (0, 1, 2);
    let in_g = i_colliders_with_order(&g, &k)?
        .iter()
        .any(|x| x.triple == tri);
    let in_h = i_colliders_with_order(&h, &k)?
        .iter()
        .any(|x| x.triple == tri);
    c.check(
        "<1,2,3> is an I△I-collider with order in exactly one graph",
        in_g != in_h,
    );
    c.check(
        "G and H are not I△I-Markov equivalent",
        !i_markov_equivalent(&g, &h, &k, Method::Both)?.equivalent,
    );
    c.check(
        "controlled I-Markov equivalence fails",
        !controlled_i_markov_equivalent(&g, &h, &t)?.equivalent,
    );
    Ok(c.0)
}

fn fig7() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig7")?;
    let bar = maximal_completion(&g)?;
    c.check(
        "G is a directed ancestral graph",
        classify(&g).contains(&ClassLabel::DirectedAg),
    );
    c.check("G is not maximal", !is_maximal(&g)?);
    let mut expected = g.clone();
    expected.add_edge(0, 3, crate::graph_core::EdgeKind::Bidirected)?;
    c.check(
        "the maximal completion adds exactly 1 <-> 4",
        bar == expected,
    );
    c.check("the completion is maximal", is_maximal(&bar)?);
    c.check(
        "J(G) = J(Ḡ)",
        independence_model(&g, None)? == independence_model(&bar, None)?,
    );
    Ok(c.0)
}

fn fig8() -> Result<Vec<Claim>> {
    let mut c = Claims(Vec::new());
    let g = graph("fig7")?;
    let bar = maximal_completion(&g)?;
    let t = targets("fig8", &g)?;
    let gi = interventional_graph(&g, &t)?;
    let bi = interventional_graph(&bar, &t)?;
    c.check(
        "J(G^I) = J(Ḡ^I) for I = {{2}}",
        independence_model(&gi, None)? == independence_model(&bi, None)?,
    );
    let pg = perfect_intervention(&g, VSet::single(1))?;
    let pb = perfect_intervention(&bar, VSet::single(1))?;
    let e = |x: &MixedGraph, a: V, b: V, k| x.has_edge(a, b, k);
    use crate::graph_core::EdgeKind::{Bidirected, Directed};
    c.check(
        "perfect intervention on {2} leaves G with 3 -> 1, 2 -> 4, 3 <-> 4",
        pg.edge_count() == 3
            && e(&pg, 2, 0, Directed)
            && e(&pg, 1, 3, Directed)
            && e(&pg, 2, 3, Bidirected),
    );
    let jg = independence_model(&pg, None)?;
    let jb = independence_model(&pb, None)?;
    c.check(
        "after perfect intervention on {2} the independence models differ",
        jg != jb,
    );
    let c34 = set(&g, &["3", "4"])?;
    c.check(
        "<1, 2 | 3,4> holds in the intervened G but not in the intervened completion",
        jg.contains(0, 1, c34) && !jb.contains(0, 1, c34),
    );
    Ok(c.0)
}

pub fn reproduce(fig: &str) -> Result<Reproduction> {
    let claims = match fig {
        "fig1" => fig1()?,
        "fig2" => fig2()?,
        "fig3" => fig3()?,
        "fig5" => fig5()?,
        "fig6" => fig6()?,
        "fig7" => fig7()?,
        "fig8" => fig8()?,
        _ => {
            return Err(Error::Invalid(format!(
                "no reproduction for {fig}; known: {}",
                FIGURES.join(", ")
            )))
        }
    };
    Ok(Reproduction {
        figure: fig.to_string(),
        claims,
    })
}
