//! Strictly positive joint tables over binary variables, Markov and
//! factorization checks, interventional settings and their membership tests.
//!
//! A state is the set of variables taking value 1. Dense tables index states
//! lexicographically with the first variable as the most significant bit.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admg_factor::{
    ancestrally_closed_sets, canonical_dag, district_of, head_partition, latent_projection,
};
use crate::error::{Error, Result};
use crate::graph_core::{is_admg, is_dag, MixedGraph, V};
use crate::intervention::{interventional_graph, symmetric_difference_targets, TargetMultiset};
use crate::separation::{independence_model, m_connected_set};
use crate::vset::VSet;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const POSITIVITY_EPS: f64 = 1e-12;
const ROW_MIN: f64 = 0.05;
const ROW_MAX: f64 = 0.95;
const MAX_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    vars: Vec<V>,
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl JointTable {
    /// `vars` strictly increasing; `probs` has `2^vars.len()` positive entries summing to 1.
    pub fn new(vars: Vec<V>, labels: Vec<String>, probs: Vec<f64>) -> Result<JointTable> {
        if vars.windows(2).any(|w| w[0] >= w[1]) || labels.len() != vars.len() {
            return Err(Error::Invalid(
                "table variables must be increasing and labelled".into(),
            ));
        }
        if vars.len() > MAX_VARS {
            return Err(Error::TooLarge(vars.len(), MAX_VARS));
        }
        if probs.len() != 1 << vars.len() {
            return Err(Error::Invalid(format!(
                "expected {} probabilities, got {}",
                1 << vars.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|&&p| !(p > POSITIVITY_EPS)) {
            return Err(Error::Invalid(format!(
                "table is not strictly positive (entry {p})"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 * probs.len().max(1) as f64 {
            return Err(Error::Invalid(format!("table sums to {total}")));
        }
        Ok(JointTable {
            vars,
            labels,
            probs,
        })
    }

    /// Table over the substantive vertices of `g`.
    pub fn for_graph(g: &MixedGraph, probs: Vec<f64>) -> Result<JointTable> {
        let vars = g.substantive().to_vec();
        let labels = vars.iter().map(|&v| g.label(v).to_string()).collect();
        JointTable::new(vars, labels, probs)
    }

    pub fn vars(&self) -> &[V] {
        &self.vars
    }

    pub fn var_set(&self) -> VSet {
        VSet::from_slice(&self.vars)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn state_at(&self, idx: usize) -> VSet {
        let n = self.vars.len();
        self.vars
            .iter()
            .enumerate()
            .filter(|&(k, _)| idx >> (n - 1 - k) & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn index_of(&self, x: VSet) -> usize {
        let n = self.vars.len();
        self.vars
            .iter()
            .enumerate()
            .filter(|&(_, &v)| x.contains(v))
            .fold(0, |acc, (k, _)| acc | 1 << (n - 1 - k))
    }

    /// Probability of the state `x` restricted to this table's variables.
    pub fn get(&self, x: VSet) -> f64 {
        self.probs[self.index_of(x)]
    }

    fn check_vars(&self, s: VSet) -> Result<()> {
        if !s.is_subset(self.var_set()) {
            return Err(Error::Invalid(format!(
                "variables {:?} not in table",
                (s - self.var_set()).to_vec()
            )));
        }
        Ok(())
    }

    pub fn marginal(&self, s: VSet) -> Result<JointTable> {
        self.check_vars(s)?;
        let (vars, labels): (Vec<V>, Vec<String>) = self
            .vars
            .iter()
            .zip(&self.labels)
            .filter(|(v, _)| s.contains(**v))
            .map(|(&v, l)| (v, l.clone()))
            .unzip();
        let mut out = JointTable {
            vars,
            labels,
            probs: vec![0.0; 1 << s.len()],
        };
        for (idx, &p) in self.probs.iter().enumerate() {
            let k = out.index_of(self.state_at(idx));
            out.probs[k] += p;
        }
        Ok(out)
    }

    /// `f(x_B | x_C)`.
    pub fn conditional(&self, b: VSet, c: VSet) -> Result<ConditionalTable> {
        if b.is_empty() {
            return Err(Error::Invalid("conditional needs a nonempty B".into()));
        }
        if b.intersects(c) {
            return Err(Error::Invalid("B and C overlap".into()));
        }
        Ok(ConditionalTable {
            b,
            c,
            joint: self.marginal(b | c)?,
            given: self.marginal(c)?,
        })
    }

    /// Adds `eps` to one entry and renormalizes.
    pub fn perturbed(&self, idx: usize, eps: f64) -> JointTable {
        let mut probs = self.probs.clone();
        probs[idx] += eps;
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        JointTable {
            probs,
            ..self.clone()
        }
    }

    /// Header `vars: 1 2 3`, then one `state prob` line per state.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars: {}\n", self.labels.join(" "));
        let n = self.vars.len();
        for (idx, p) in self.probs.iter().enumerate() {
            let bits: String = (0..n)
                .map(|k| {
                    if idx >> (n - 1 - k) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            s.push_str(&format!("{bits} {p}\n"));
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output; labels resolve in `g`.
    pub fn parse(text: &str, g: &MixedGraph) -> Result<JointTable> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table file".into()))?;
        let names = header
            .strip_prefix("vars:")
            .ok_or_else(|| Error::Parse("missing `vars:` header".into()))?;
        let mut pairs: Vec<(V, String)> = Vec::new();
        for name in names.split_whitespace() {
            pairs.push((g.find_or_err(name)?, name.to_string()));
        }
        let order: Vec<V> = pairs.iter().map(|p| p.0).collect();
        if order.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(
                "table variables must be listed in vertex order".into(),
            ));
        }
        let n = order.len();
        let mut probs = vec![f64::NAN; 1 << n];
        for line in lines {
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("bad table line: {line}")));
            };
            if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse(format!("bad state: {bits}")));
            }
            let idx = usize::from_str_radix(bits, 2).unwrap_or(0);
            probs[idx] = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad probability: {p}")))?;
        }
        if probs.iter().any(|p| p.is_nan()) {
            return Err(Error::Parse("table is missing states".into()));
        }
        let (vars, labels) = pairs.into_iter().unzip();
        JointTable::new(vars, labels, probs)
    }
}

#[derive(Clone, Debug)]
pub struct ConditionalTable {
    pub b: VSet,
    pub c: VSet,
    joint: JointTable,
    given: JointTable,
}

impl ConditionalTable {
    pub fn get(&self, x: VSet) -> f64 {
        self.joint.get(x) / self.given.get(x)
    }

    /// Entries indexed by `(c_state, b_state)` flattened row-major, each
    /// state in lexicographic order of its variables.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let bs: Vec<VSet> = self.b.subsets().collect();
        let mut cs: Vec<VSet> = self.c.subsets().collect();
        cs.sort_by_key(|x| self.given.index_of(*x));
        let mut bs_sorted = bs;
        let bt = self.joint.marginal(self.b).expect("b within joint");
        bs_sorted.sort_by_key(|x| bt.index_of(*x));
        cs.iter()
            .map(|&c| bs_sorted.iter().map(|&b| self.get(b | c)).collect())
            .collect()
    }

    /// Largest absolute difference to another conditional over the same sets.
    pub fn max_diff(&self, other: &ConditionalTable) -> f64 {
        (self.b | self.c)
            .subsets()
            .map(|x| (self.get(x) - other.get(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// Largest `|f(a,b|c) - f(a|c) f(b|c)|` over states.
pub fn ci_deviation(t: &JointTable, a: VSet, b: VSet, c: VSet) -> Result<f64> {
    if a.intersects(b) || (a | b).intersects(c) {
        return Err(Error::Invalid("CI sets must be disjoint".into()));
    }
    let abc = t.marginal(a | b | c)?;
    let ac = t.marginal(a | c)?;
    let bc = t.marginal(b | c)?;
    let cc = t.marginal(c)?;
    let mut worst: f64 = 0.0;
    for x in (a | b | c).subsets() {
        let pc = cc.get(x);
        let d = abc.get(x) / pc - (ac.get(x) / pc) * (bc.get(x) / pc);
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

pub fn ci_holds(t: &JointTable, a: VSet, b: VSet, c: VSet, tol: f64) -> Result<bool> {
    Ok(ci_deviation(t, a, b, c)? <= tol)
}

/// Outcome of a numeric check: the largest deviation seen and, on failure,
/// a description of where it happened.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub worst: f64,
    pub witness: Option<String>,
}

impl CheckReport {
    fn new() -> CheckReport {
        CheckReport {
            passed: true,
            worst: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, dev: f64, tol: f64, what: impl FnOnce() -> String) {
        if dev > tol && self.passed {
            self.passed = false;
            self.witness = Some(what());
        }
        if dev > self.worst {
            self.worst = dev;
        }
    }

    fn merge(&mut self, other: CheckReport) {
        if !other.passed && self.passed {
            self.passed = false;
            self.witness = other.witness;
        }
        self.worst = self.worst.max(other.worst);
    }
}

fn check_table_matches(t: &JointTable, g: &MixedGraph) -> Result<()> {
    if t.var_set() != g.substantive() {
        return Err(Error::Invalid(
            "table variables differ from the graph's substantive vertices".into(),
        ));
    }
    Ok(())
}

/// Every elementary statement of `J(g)` holds in `t` within `tol`.
pub fn markov_report(t: &JointTable, g: &MixedGraph, tol: f64) -> Result<CheckReport> {
    check_table_matches(t, g)?;
    let model = independence_model(g, Some(g.substantive()))?;
    let mut r = CheckReport::new();
    for s in model.triples() {
        let dev = ci_deviation(t, VSet::single(s.i), VSet::single(s.j), s.c)?;
        r.record(dev, tol, || format!("{} fails", s.render(g)));
    }
    Ok(r)
}

pub fn is_markov(t: &JointTable, g: &MixedGraph, tol: f64) -> Result<bool> {
    Ok(markov_report(t, g, tol)?.passed)
}

/// `f(x_A) = prod_H f(x_H | x_tail(H))` for every ancestrally closed `A`.
pub fn factorization_check(t: &JointTable, g: &MixedGraph, tol: f64) -> Result<CheckReport> {
    if !is_admg(g) {
        return Err(Error::Precondition("factorization requires an ADMG".into()));
    }
    check_table_matches(t, g)?;
    let mut r = CheckReport::new();
    for a in ancestrally_closed_sets(g)? {
        if a.is_empty() {
            continue;
        }
        let fa = t.marginal(a)?;
        let factors: Vec<ConditionalTable> = head_partition(g, a)?
            .heads
            .iter()
            .map(|&(h, tl)| t.conditional(h, tl))
            .collect::<Result<_>>()?;
        let mut dev: f64 = 0.0;
        for x in a.subsets() {
            let prod: f64 = factors.iter().map(|f| f.get(x)).product();
            dev = dev.max((fa.get(x) - prod).abs());
        }
        r.record(dev, tol, || format!("A = {}", g.fmt_set(a)));
    }
    Ok(r)
}

/// Indexed family of tables, one per target occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct InterventionalSetting {
    pub targets: TargetMultiset,
    pub tables: Vec<JointTable>,
}

impl InterventionalSetting {
    pub fn new(targets: TargetMultiset, tables: Vec<JointTable>) -> Result<InterventionalSetting> {
        if targets.len() != tables.len() || tables.is_empty() {
            return Err(Error::Invalid(
                "one table per target occurrence is required".into(),
            ));
        }
        if tables.iter().any(|t| t.vars() != tables[0].vars()) {
            return Err(Error::Invalid(
                "tables of a setting must share variables".into(),
            ));
        }
        Ok(InterventionalSetting { targets, tables })
    }

    /// Writes `targets.txt` and `target_<k>.tbl` files into `dir`.
    pub fn save(&self, dir: &Path, g: &MixedGraph) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("targets.txt"), self.targets.to_text(g))?;
        for (k, t) in self.tables.iter().enumerate() {
            fs::write(dir.join(format!("target_{k}.tbl")), t.to_text())?;
        }
        Ok(())
    }

    pub fn load(dir: &Path, g: &MixedGraph) -> Result<InterventionalSetting> {
        let targets = TargetMultiset::parse(&fs::read_to_string(dir.join("targets.txt"))?, g)?;
        let tables = (0..targets.len())
            .map(|k| {
                JointTable::parse(&fs::read_to_string(dir.join(format!("target_{k}.tbl")))?, g)
            })
            .collect::<Result<Vec<_>>>()?;
        InterventionalSetting::new(targets, tables)
    }

    fn check_graph(&self, g: &MixedGraph) -> Result<()> {
        self.targets.check(g)?;
        check_table_matches(&self.tables[0], g)
    }
}

/// Conditional probability tables of a DAG: `p(x_v = 1 | parent state)`,
/// rows indexed by parent states in increasing-id bit order.
#[derive(Clone, Debug)]
struct Cpts {
    rows: Vec<Vec<f64>>,
}

fn random_row<R: Rng>(rng: &mut R, parents: usize) -> Vec<f64> {
    (0..1usize << parents)
        .map(|_| rng.gen_range(ROW_MIN..=ROW_MAX))
        .collect()
}

impl Cpts {
    fn random<R: Rng>(dag: &MixedGraph, rng: &mut R) -> Cpts {
        Cpts {
            rows: (0..dag.n())
                .map(|v| random_row(rng, dag.pa(v).len()))
                .collect(),
        }
    }

    fn joint(&self, dag: &MixedGraph) -> Result<JointTable> {
        let n = dag.n();
        if n > MAX_VARS {
            return Err(Error::TooLarge(n, MAX_VARS));
        }
        let vars: Vec<V> = (0..n).collect();
        let labels = vars.iter().map(|&v| dag.label(v).to_string()).collect();
        let mut t = JointTable {
            vars,
            labels,
            probs: vec![0.0; 1 << n],
        };
        let parents: Vec<Vec<V>> = (0..n).map(|v| dag.pa(v).to_vec()).collect();
        for idx in 0..t.probs.len() {
            let x = t.state_at(idx);
            let mut p = 1.0;
            for v in 0..n {
                let cfg = parents[v]
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| x.contains(u))
                    .fold(0, |a, (k, _)| a | 1 << k);
                let one = self.rows[v][cfg];
                p *= if x.contains(v) { one } else { 1.0 - one };
            }
            t.probs[idx] = p;
        }
        Ok(t)
    }
}

/// Options for building a setting from a DAG.
#[derive(Clone, Copy, Debug, Default)]
pub struct SamplingOptions {
    /// One intervened mechanism per vertex, reused by every target containing it.
    pub shared: bool,
    /// Also replace the mechanism of `vertex` in occurrence `occurrence`.
    pub extra: Option<(usize, V)>,
}

/// Setting over the observed vertices of a DAG with latents. Targets are given
/// in the vertex numbering of `latent_projection(dag, observed)`; the tables
/// use that numbering too.
pub fn sample_setting_from_dag(
    dag: &MixedGraph,
    observed: VSet,
    targets: &TargetMultiset,
    seed: u64,
    opts: SamplingOptions,
) -> Result<InterventionalSetting> {
    if !is_dag(dag) {
        return Err(Error::Precondition("setting sampler needs a DAG".into()));
    }
    let projected = latent_projection(dag, observed)?;
    targets.check(&projected)?;
    let obs = observed.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Cpts::random(dag, &mut rng);
    let shared_rows: Vec<Vec<f64>> = (0..dag.n())
        .map(|v| random_row(&mut rng, dag.pa(v).len()))
        .collect();
    let mut tables = Vec::new();
    for (k, t) in targets.targets().iter().enumerate() {
        let mut cpts = base.clone();
        let mut hit: Vec<V> = t.iter().map(|p| obs[p]).collect();
        if let Some((occ, v)) = opts.extra {
            if occ == k {
                hit.push(obs[v]);
            }
        }
        for v in hit {
            cpts.rows[v] = if opts.shared {
                shared_rows[v].clone()
            } else {
                random_row(&mut rng, dag.pa(v).len())
            };
        }
        let full = cpts.joint(dag)?;
        let m = full.marginal(observed)?;
        let labels = obs.iter().map(|&v| dag.label(v).to_string()).collect();
        tables.push(JointTable::new((0..obs.len()).collect(), labels, m.probs)?);
    }
    InterventionalSetting::new(targets.clone(), tables)
}

/// Setting for an ADMG through its canonical DAG.
pub fn sample_interventional_setting(
    g: &MixedGraph,
    targets: &TargetMultiset,
    seed: u64,
    opts: SamplingOptions,
) -> Result<InterventionalSetting> {
    let (dag, _) = canonical_dag(g)?;
    sample_setting_from_dag(&dag, g.all(), targets, seed, opts)
}

/// Table Markov to a DAG, built from random conditional factors.
pub fn sample_dag_table(dag: &MixedGraph, seed: u64) -> Result<JointTable> {
    if !is_dag(dag) {
        return Err(Error::Precondition("table sampler needs a DAG".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Cpts::random(dag, &mut rng).joint(dag)
}

fn all_markov(s: &InterventionalSetting, g: &MixedGraph, tol: f64) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for (k, t) in s.tables.iter().enumerate() {
        let mut m = markov_report(t, g, tol)?;
        if let Some(w) = m.witness.take() {
            m.witness = Some(format!("table {}: {w}", g.fmt_set(s.targets.targets()[k])));
        }
        r.merge(m);
    }
    Ok(r)
}

/// Membership in `M_I(g)`: every table Markov to `g`, and for every
/// ancestrally closed `A`, head `H` of `A` and occurrences `I, J` with `H`
/// disjoint from `I ∪ J`, equal conditionals `f(x_H | x_tail(H))`.
pub fn in_mi_factorization(
    s: &InterventionalSetting,
    g: &MixedGraph,
    tol: f64,
) -> Result<CheckReport> {
    mi_check(s, g, tol, |h| h)
}

/// Like [`in_mi_factorization`], but a head factor is compared only when the
/// whole district of `H` in `an(H)` avoids `I ∪ J`. A target inside that
/// district changes `f(x_H | x_tail(H))` through the shared latents, so
/// settings generated from a DAG with latents satisfy this version and can
/// fail the head-only one.
pub fn in_mi_district_factorization(
    s: &InterventionalSetting,
    g: &MixedGraph,
    tol: f64,
) -> Result<CheckReport> {
    mi_check(s, g, tol, |h| {
        district_of(g, g.an(h), h.min().expect("heads are nonempty"))
    })
}

fn mi_check(
    s: &InterventionalSetting,
    g: &MixedGraph,
    tol: f64,
    guarded: impl Fn(VSet) -> VSet,
) -> Result<CheckReport> {
    if !is_admg(g) {
        return Err(Error::Precondition("M_I(G) is defined for ADMGs".into()));
    }
    s.check_graph(g)?;
    let mut r = all_markov(s, g, tol)?;
    let ts = s.targets.targets();
    for a in ancestrally_closed_sets(g)? {
        for (h, tl) in head_partition(g, a)?.heads {
            let guard = guarded(h);
            let conds: Vec<Option<ConditionalTable>> = s
                .tables
                .iter()
                .zip(ts)
                .map(|(t, &i)| {
                    if guard.intersects(i) {
                        Ok(None)
                    } else {
                        t.conditional(h, tl).map(Some)
                    }
                })
                .collect::<Result<_>>()?;
            for x in 0..conds.len() {
                for y in x + 1..conds.len() {
                    if let (Some(ci), Some(cj)) = (&conds[x], &conds[y]) {
                        r.record(ci.max_diff(cj), tol, || {
                            format!(
                                "head {} <- {} differs between targets {} and {}",
                                g.fmt_set(h),
                                g.fmt_set(tl),
                                g.fmt_set(ts[x]),
                                g.fmt_set(ts[y])
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Substantive vertices of `gi` outside `c` that are m-separated from `w`
/// given `c ∪ cond_extra`.
fn separated_from(gi: &MixedGraph, w: V, c: VSet, cond_extra: VSet) -> VSet {
    gi.substantive() - c - m_connected_set(gi, VSet::single(w), c | cond_extra)
}

/// Compares `f_a(X_B | X_C)` and `f_b(X_B | X_C)` for the largest `B` that is
/// separated from `w` given `C` plus the other interventional vertices; equality
/// for every smaller `B` follows by marginalization.
fn invariance_report(
    gi: &MixedGraph,
    w: V,
    fa: &JointTable,
    fb: &JointTable,
    tol: f64,
    label: &dyn Fn(VSet, VSet) -> String,
) -> Result<CheckReport> {
    let others = gi.all() - gi.substantive();
    let mut r = CheckReport::new();
    for c in gi.substantive().subsets() {
        let b = separated_from(gi, w, c, others.without(w));
        if b.is_empty() {
            continue;
        }
        let dev = fa.conditional(b, c)?.max_diff(&fb.conditional(b, c)?);
        r.record(dev, tol, || label(b, c));
    }
    Ok(r)
}

/// The I-Markov property with respect to `g^I`; needs an empty target.
pub fn imarkov_property_check(
    s: &InterventionalSetting,
    g: &MixedGraph,
    tol: f64,
) -> Result<CheckReport> {
    s.check_graph(g)?;
    let ts = s.targets.targets();
    let base = ts.iter().position(|t| t.is_empty()).ok_or_else(|| {
        Error::Precondition("the I-Markov property needs the empty target in I".into())
    })?;
    let mut r = all_markov(s, g, tol)?;
    let gi = interventional_graph(g, &s.targets)?;
    let omegas = s.targets.omega_ids(g.n());
    for (k, w) in omegas.iter().enumerate() {
        let Some(w) = *w else { continue };
        let label = |b: VSet, c: VSet| {
            format!(
                "f(X_{} | X_{}) differs between {{}} and {}",
                g.fmt_set(b),
                g.fmt_set(c),
                g.fmt_set(ts[k])
            )
        };
        r.merge(invariance_report(
            &gi,
            w,
            &s.tables[base],
            &s.tables[k],
            tol,
            &label,
        )?);
    }
    Ok(r)
}

/// The controlled I-Markov property with respect to `g^K`, `K = I△I`.
/// Pairs of occurrences with equal targets have no interventional vertex and are skipped.
pub fn controlled_imarkov_check(
    s: &InterventionalSetting,
    g: &MixedGraph,
    tol: f64,
) -> Result<CheckReport> {
    s.check_graph(g)?;
    let mut r = all_markov(s, g, tol)?;
    let k = symmetric_difference_targets(&s.targets);
    let gk = interventional_graph(g, &k)?;
    let omegas = k.omega_ids(g.n());
    let ts = s.targets.targets();
    for x in 0..ts.len() {
        for y in x + 1..ts.len() {
            let d = (ts[x] - ts[y]) | (ts[y] - ts[x]);
            if d.is_empty() {
                continue;
            }
            let pos = k
                .targets()
                .iter()
                .position(|&t| t == d)
                .expect("difference listed");
            let w = omegas[pos].expect("nonempty target has a vertex");
            let label = |b: VSet, c: VSet| {
                format!(
                    "f(X_{} | X_{}) differs between {} and {}",
                    g.fmt_set(b),
                    g.fmt_set(c),
                    g.fmt_set(ts[x]),
                    g.fmt_set(ts[y])
                )
            };
            r.merge(invariance_report(
                &gk,
                w,
                &s.tables[x],
                &s.tables[y],
                tol,
                &label,
            )?);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{random_admg, EdgeKind::*};

    fn chain() -> MixedGraph {
        MixedGraph::from_edges(3, &[(1, 2, Directed), (2, 3, Directed)]).unwrap()
    }

    fn uniform(n: usize) -> JointTable {
        let g = MixedGraph::with_vertices(n);
        JointTable::for_graph(&g, vec![1.0 / (1 << n) as f64; 1 << n]).unwrap()
    }

    #[test]
    fn indexing_puts_first_variable_high() {
        let t = uniform(3);
        assert_eq!(t.index_of(VSet::single(0)), 4);
        assert_eq!(t.state_at(1), VSet::single(2));
        let m = t.marginal(VSet::single(0)).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn table_validation() {
        let g = MixedGraph::with_vertices(1);
        assert!(JointTable::for_graph(&g, vec![0.5, 0.6]).is_err());
        assert!(JointTable::for_graph(&g, vec![1.0, 0.0]).is_err());
        assert!(JointTable::for_graph(&g, vec![0.5]).is_err());
    }

    #[test]
    fn conditional_consistency() {
        let t = sample_dag_table(
            &random_admg(4, 0.5, 0.0, &mut ChaCha8Rng::seed_from_u64(3)),
            9,
        )
        .unwrap();
        let (b, c) = (VSet::from_slice(&[0, 2]), VSet::single(3));
        let cond = t.conditional(b, c).unwrap();
        let fc = t.marginal(c).unwrap();
        let fbc = t.marginal(b | c).unwrap();
        for x in (b | c).subsets() {
            assert!((fbc.get(x) - cond.get(x) * fc.get(x)).abs() < 1e-15);
        }
        for row in cond.rows() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(t.conditional(VSet::EMPTY, c).is_err());
    }

    #[test]
    fn ci_basics() {
        let t = uniform(3);
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    let c = VSet::full(3).without(a).without(b);
                    assert!(ci_holds(&t, VSet::single(a), VSet::single(b), c, 1e-12).unwrap());
                }
            }
        }
        let g = MixedGraph::with_vertices(2);
        let corr = JointTable::for_graph(&g, vec![0.49, 0.01, 0.01, 0.49]).unwrap();
        assert!(!ci_holds(&corr, VSet::single(0), VSet::single(1), VSet::EMPTY, 1e-3).unwrap());
        let t = sample_dag_table(&chain(), 1).unwrap();
        assert!(ci_holds(&t, VSet::single(0), VSet::single(2), VSet::single(1), 1e-9).unwrap());
        assert!(!ci_holds(&t, VSet::single(0), VSet::single(2), VSet::EMPTY, 1e-9).unwrap());
    }

    #[test]
    fn markov_and_factorization() {
        let t = sample_dag_table(&chain(), 4).unwrap();
        assert!(is_markov(&t, &chain(), 1e-9).unwrap());
        assert!(factorization_check(&t, &chain(), 1e-9).unwrap().passed);
        let one = MixedGraph::with_vertices(1);
        assert!(is_markov(
            &JointTable::for_graph(&one, vec![0.3, 0.7]).unwrap(),
            &one,
            1e-12
        )
        .unwrap());
        let bi = MixedGraph::from_edges(2, &[(1, 2, Bidirected)]).unwrap();
        let s = sample_interventional_setting(
            &bi,
            &TargetMultiset::from_labels(&[&[]]),
            2,
            SamplingOptions::default(),
        )
        .unwrap();
        assert!(factorization_check(&s.tables[0], &bi, 1e-9).unwrap().passed);
        let bad = t.perturbed(3, 0.05);
        let r = factorization_check(&bad, &chain(), 1e-8).unwrap();
        assert!(!r.passed && r.witness.is_some());
    }

    #[test]
    fn table_text_roundtrip() {
        let g = chain();
        let t = sample_dag_table(&g, 8).unwrap();
        let back = JointTable::parse(&t.to_text(), &g).unwrap();
        assert_eq!(back, t);
        assert!(t.to_text().starts_with("vars: 1 2 3\n000 "));
        assert!(JointTable::parse("vars: 1\n0 0.5\n", &g).is_err());
    }

    #[test]
    fn maximal_b_covers_all_subsets() {
        // Condition 2 checked with every (B, C) agrees with the maximal-B shortcut.
        let g = MixedGraph::from_edges(4, &[(1, 2, Directed), (2, 3, Directed), (2, 4, Directed)])
            .unwrap();
        let t = TargetMultiset::from_labels(&[&[], &[2, 3], &[2, 4]]);
        let gi = interventional_graph(&g, &t).unwrap();
        let w = t.omega_ids(g.n());
        for seed in 0..20 {
            let s = sample_interventional_setting(
                &g,
                &t,
                seed,
                SamplingOptions {
                    shared: false,
                    extra: Some((1, 0)),
                },
            )
            .unwrap();
            let fast = imarkov_property_check(&s, &g, 1e-8).unwrap().passed;
            let mut full = all_markov(&s, &g, 1e-8).unwrap().passed;
            for (k, wk) in w.iter().enumerate() {
                let Some(wk) = *wk else { continue };
                let others = gi.all() - gi.substantive();
                for c in g.all().subsets() {
                    for b in (g.all() - c).subsets().filter(|b| !b.is_empty()) {
                        if crate::separation::m_separated(
                            &gi,
                            b,
                            VSet::single(wk),
                            c | others.without(wk),
                        )
                        .unwrap()
                        {
                            let d = s.tables[0]
                                .conditional(b, c)
                                .unwrap()
                                .max_diff(&s.tables[k].conditional(b, c).unwrap());
                            full &= d <= 1e-8;
                        }
                    }
                }
            }
            assert_eq!(fast, full);
        }
    }

    #[test]
    fn sampled_settings_are_members() {
        let fig6 = MixedGraph::from_edges(
            3,
            &[(1, 2, Bidirected), (2, 3, Bidirected), (1, 3, Directed)],
        )
        .unwrap();
        let t = TargetMultiset::from_labels(&[&[], &[1, 3], &[3]]);
        let s = sample_interventional_setting(&fig6, &t, 7, SamplingOptions::default()).unwrap();
        assert!(in_mi_factorization(&s, &fig6, 1e-8).unwrap().passed);
        assert!(imarkov_property_check(&s, &fig6, 1e-8).unwrap().passed);
        let single = sample_interventional_setting(
            &fig6,
            &TargetMultiset::from_labels(&[&[]]),
            1,
            SamplingOptions::default(),
        )
        .unwrap();
        assert!(imarkov_property_check(&single, &fig6, 1e-8).unwrap().passed);
        assert!(
            controlled_imarkov_check(&single, &fig6, 1e-8)
                .unwrap()
                .passed
        );
        let no_empty = sample_interventional_setting(
            &fig6,
            &TargetMultiset::from_labels(&[&[1]]),
            1,
            SamplingOptions::default(),
        )
        .unwrap();
        assert!(imarkov_property_check(&no_empty, &fig6, 1e-8).is_err());
    }

    #[test]
    fn target_in_head_district_breaks_head_only_invariance() {
        // 5 shares a latent with the intervened 2, so f(x5 | x1, x2, x4)
        // moves although the head {5} avoids the target.
        let g = MixedGraph::from_edges(
            5,
            &[
                (1, 2, Bidirected),
                (1, 3, Directed),
                (1, 3, Bidirected),
                (1, 4, Directed),
                (1, 4, Bidirected),
                (1, 5, Directed),
                (2, 5, Directed),
                (2, 5, Bidirected),
                (4, 5, Directed),
            ],
        )
        .unwrap();
        let t = TargetMultiset::from_labels(&[&[], &[2]]);
        let s = sample_interventional_setting(&g, &t, 1, SamplingOptions::default()).unwrap();
        let literal = in_mi_factorization(&s, &g, 1e-8).unwrap();
        assert!(!literal.passed);
        assert!(literal.witness.unwrap().contains("head {5} <- {1,2,4}"));
        assert!(in_mi_district_factorization(&s, &g, 1e-8).unwrap().passed);
        assert!(imarkov_property_check(&s, &g, 1e-8).unwrap().passed);
    }

    #[test]
    fn perturbed_head_fails() {
        let g = chain();
        let t = TargetMultiset::from_labels(&[&[], &[3]]);
        let s = sample_interventional_setting(
            &g,
            &t,
            3,
            SamplingOptions {
                shared: false,
                extra: Some((1, 0)),
            },
        )
        .unwrap();
        assert!(!in_mi_factorization(&s, &g, 1e-8).unwrap().passed);
        assert!(!imarkov_property_check(&s, &g, 1e-8).unwrap().passed);
    }

    #[test]
    fn setting_dir_roundtrip() {
        let g = chain();
        let t = TargetMultiset::from_labels(&[&[], &[2]]);
        let s = sample_interventional_setting(&g, &t, 5, SamplingOptions::default()).unwrap();
        let dir = std::env::temp_dir().join(format!("imec-setting-{}", std::process::id()));
        s.save(&dir, &g).unwrap();
        let back = InterventionalSetting::load(&dir, &g).unwrap();
        fs::remove_dir_all(&dir).unwrap();
        assert_eq!(back.targets, s.targets);
        for (a, b) in back.tables.iter().zip(&s.tables) {
            assert!(a
                .probs()
                .iter()
                .zip(b.probs())
                .all(|(x, y)| (x - y).abs() < 1e-15));
        }
    }
}
