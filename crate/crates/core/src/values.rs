//! Value computation over incompatibility graphs: the coloring sum for all
//! five values, the dynamic program for MQ, the closed form for EF, and the
//! clique-cover and difference formulas for SS and MY.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::combinatorics::{binomial, factorial, Caps, Integer, Rational};
use crate::error::{Error, Result};
use crate::game::{esv_bruteforce, zeta_by_size, ValueKind, WeightShape};
use crate::graphs::{build_graph, enumerate_colorings, LabeledGraph, NodePartition, NodeSet};
use crate::rules::{game_of_rules, HybridRule, Rule, RuleSet};
use crate::transforms::{check_star, embedded_to_hybrid, mc_to_embedded, to_hybrid};

fn check_player(i: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&i) {
        Ok(())
    } else {
        Err(Error::PlayerOutOfRange { player: i, n })
    }
}

/// Node whose label holds player `i`.
fn node_of(g: &LabeledGraph, i: usize) -> usize {
    g.labels()
        .iter()
        .position(|l| l.contains(i))
        .expect("labels cover every player")
}

/// Weight shape of a node partition as seen by the player at `node`.
fn shape_of(g: &LabeledGraph, p: &NodePartition, node: usize, n: usize) -> WeightShape {
    let own = p.block_of(node);
    let size = |b: NodeSet| g.label_of(b).len();
    let mut other_sizes = Vec::with_capacity(p.len());
    if own != 0 {
        other_sizes.push(size(p.blocks[own]));
    }
    for (idx, &b) in p.blocks.iter().enumerate().skip(1) {
        if idx != own {
            other_sizes.push(size(b));
        }
    }
    WeightShape {
        n,
        coalition_size: size(p.blocks[0]),
        player_inside: own == 0,
        other_sizes,
    }
}

/// Value of every player for a weight-`c` labeled graph, one weight term
/// per node partition into independent sets.
fn esv_graph_all(g: &LabeledGraph, weight: &Rational, kind: ValueKind, caps: &Caps) -> Result<Vec<Rational>> {
    let n = g.check_labels()?;
    let mut out = vec![Rational::zero(); n];
    if weight.is_zero() {
        return Ok(out);
    }
    let mut memo: HashMap<WeightShape, Rational> = HashMap::new();
    let mut hy_groups: HashMap<(usize, usize, bool), Rational> = HashMap::new();
    for p in enumerate_colorings(g, caps.nodes)? {
        for node in 0..g.len() {
            let shape = shape_of(g, &p, node, n);
            let w = memo.entry(shape.clone()).or_insert_with(|| shape.weight(kind)).clone();
            if kind == ValueKind::HY {
                let key = (shape.coalition_size, shape.blocks(), shape.player_inside);
                let grouped = hy_groups.entry(key).or_insert_with(|| w.clone());
                debug_assert_eq!(*grouped, w, "HY weight depends only on sizes and membership");
            }
            if w.is_zero() {
                continue;
            }
            for i in g.label(node).players() {
                out[i - 1] += &w;
            }
        }
    }
    Ok(out.into_iter().map(|v| v * weight).collect())
}

/// Value of player `i` in the game of one hybrid rule, summing the weight
/// of the embedded coalition of each coloring class.
pub fn esv_colorings(rule: &HybridRule, kind: ValueKind, i: usize, caps: &Caps) -> Result<Rational> {
    check_player(i, rule.n())?;
    Ok(esv_colorings_all(rule, kind, caps)?.swap_remove(i - 1))
}

/// [`esv_colorings`] for every player at once.
pub fn esv_colorings_all(rule: &HybridRule, kind: ValueKind, caps: &Caps) -> Result<Vec<Rational>> {
    esv_graph_all(&build_graph(rule), rule.weight(), kind, caps)
}

/// Value of every player for the weight-1 rule of a labeled graph.
pub fn esv_labeled_graph(g: &LabeledGraph, kind: ValueKind, caps: &Caps) -> Result<Vec<Rational>> {
    esv_graph_all(g, &Rational::from_integer(1.into()), kind, caps)
}

/// Counts of 2-colorings by number of players sharing the first node's
/// color, indexed `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeTable {
    counts: Vec<Integer>,
}

impl SizeTable {
    fn zeros(n: usize) -> Self {
        SizeTable {
            counts: vec![Integer::zero(); n + 1],
        }
    }

    fn seeded(n: usize, s: usize) -> Self {
        let mut t = SizeTable::zeros(n);
        t.counts[s] = Integer::from(2);
        t
    }

    pub fn get(&self, s: usize) -> Integer {
        self.counts.get(s).cloned().unwrap_or_else(Integer::zero)
    }

    /// Nonzero entries as `(size, count)`.
    pub fn entries(&self) -> Vec<(usize, Integer)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (s, c.clone()))
            .collect()
    }

    /// Adds a component whose two sides carry `b` and `c` players.
    fn absorb(&self, b: usize, c: usize) -> SizeTable {
        let n = self.counts.len() - 1;
        let mut next = SizeTable::zeros(n);
        for s in 1..=n {
            if s >= b {
                next.counts[s] += &self.counts[s - b];
            }
            if s >= c {
                next.counts[s] += &self.counts[s - c];
            }
        }
        next
    }
}

/// Label sizes of both sides of each component, first component (the one
/// holding the first node) first; `None` when some component is not
/// bipartite.
struct Sides {
    comps: Vec<(NodeSet, NodeSet)>,
}

fn sides(g: &LabeledGraph) -> Option<Sides> {
    let comps = g
        .graph()
        .components()
        .into_iter()
        .map(|c| g.graph().bipartition(c))
        .collect::<Option<Vec<_>>>()?;
    Some(Sides { comps })
}

/// The table of 2-colorings by size of the first node's color class, or
/// `None` when the graph has no 2-coloring.
pub fn mq_size_table(rule: &HybridRule) -> Option<SizeTable> {
    let g = build_graph(rule);
    let sides = sides(&g)?;
    let n = rule.n();
    let size = |m: NodeSet| g.label_of(m).len();
    let (b1, _) = sides.comps[0];
    let table = sides.comps[1..]
        .iter()
        .fold(SizeTable::seeded(n, size(b1)), |t, &(b, c)| t.absorb(size(b), size(c)));
    Some(table)
}

fn member_weight(s: usize, n: usize) -> Rational {
    Rational::new(factorial(s - 1) * factorial(n - s), factorial(n) * 2)
}

fn outsider_weight(s: usize, n: usize) -> Rational {
    Rational::new(factorial(s) * factorial(n - s - 1), factorial(n) * 2)
}

/// MQ value of player `i` for one hybrid rule in time polynomial in the
/// rule size, via 2-colorings of its graph.
pub fn mq_hybrid(rule: &HybridRule, i: usize) -> Result<Rational> {
    let n = rule.n();
    check_player(i, n)?;
    if rule.weight().is_zero() {
        return Ok(Rational::zero());
    }
    let g = build_graph(rule);
    let Some(sides) = sides(&g) else {
        return Ok(Rational::zero());
    };
    let size = |m: NodeSet| g.label_of(m).len();
    let u: NodeSet = 1 << node_of(&g, i);
    let comps = &sides.comps;
    let (b1, c1) = comps[0];

    let fold_except = |seed: SizeTable, skip: usize| {
        comps
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(idx, _)| *idx != skip)
            .fold(seed, |t, (_, &(b, c))| t.absorb(size(b), size(c)))
    };
    let members = |t: &SizeTable| -> Rational {
        (1..=n)
            .map(|s| member_weight(s, n) * Rational::from_integer(t.get(s)))
            .sum()
    };
    let outsiders = |t: &SizeTable| -> Rational {
        (1..n)
            .map(|s| outsider_weight(s, n) * Rational::from_integer(t.get(s)))
            .sum()
    };

    let value = if u & (b1 | c1) != 0 {
        let table = fold_except(SizeTable::seeded(n, size(b1)), 0);
        if u & b1 != 0 {
            members(&table)
        } else {
            -outsiders(&table)
        }
    } else {
        let j = comps
            .iter()
            .position(|&(b, c)| u & (b | c) != 0)
            .expect("node lies in a component");
        let (mut bj, mut cj) = comps[j];
        if u & bj == 0 {
            std::mem::swap(&mut bj, &mut cj);
        }
        let same = fold_except(SizeTable::seeded(n, size(b1) + size(bj)), j);
        let apart = fold_except(SizeTable::seeded(n, size(b1) + size(cj)), j);
        members(&same) - outsiders(&apart)
    };
    Ok(value * rule.weight())
}

/// MQ value via an explicit sum over all 2-colorings; exponential, used to
/// cross-check [`mq_hybrid`].
pub fn mq_two_colorings(rule: &HybridRule, i: usize) -> Result<Rational> {
    let n = rule.n();
    check_player(i, n)?;
    let g = build_graph(rule);
    let k = g.len();
    Caps::check(crate::combinatorics::DEFAULT_SUBGRAPH_CAP, "graph", k)?;
    let mut total = Rational::zero();
    for colors in 0u64..1 << k {
        // bit v set: node v shares the first node's color
        if colors & 1 == 0 {
            continue;
        }
        let proper = g
            .graph()
            .edges()
            .iter()
            .all(|&(a, b)| (colors >> a & 1) != (colors >> b & 1));
        if !proper {
            continue;
        }
        let s = g.label_of(colors);
        // both colorings of this class (first node red or blue)
        total += zeta_by_size(s.len(), s.contains(i), n);
    }
    Ok(total * rule.weight())
}

/// MQ value for any rules, each normalized to hybrid rules first.
pub fn mq_poly(rules: &[Rule], n: usize, i: usize) -> Result<Rational> {
    check_player(i, n)?;
    let mut total = Rational::zero();
    for r in rules {
        for h in to_hybrid(r, n)? {
            total += mq_hybrid(&h, i)?;
        }
    }
    Ok(total)
}

/// EF value of player `i` for a hybrid rule satisfying the star condition,
/// by the closed-form size-indexed sum.
pub fn ef_hybrid(rule: &HybridRule, i: usize) -> Result<Rational> {
    let n = rule.n();
    check_player(i, n)?;
    if !check_star(rule) {
        return Err(Error::Precondition(
            "the closed-form EF value needs a rule satisfying the star condition".into(),
        ));
    }
    if rule.weight().is_zero() {
        return Ok(Rational::zero());
    }
    let g = build_graph(rule);
    let k = g.len();
    if (1..k).any(|v| g.label(v).len() > 1) {
        return Ok(Rational::zero());
    }
    let outside: NodeSet = g.graph().nodes() & !g.graph().neighbors(0) & !1;
    let u = outside.count_ones() as usize;
    let holder = node_of(&g, i);
    let n_fact = factorial(n);
    let value: Rational = if holder == 0 {
        (0..=u)
            .map(|s| {
                Rational::new(
                    binomial(u, s) * factorial(s + n - k) * factorial(k - s - 1),
                    n_fact.clone(),
                )
            })
            .sum()
    } else if outside >> holder & 1 == 1 {
        Rational::zero()
    } else {
        -(0..=u)
            .map(|s| {
                Rational::new(
                    binomial(u, s) * factorial(s + n - k + 1) * factorial(k - s - 2),
                    n_fact.clone(),
                )
            })
            .sum::<Rational>()
    };
    Ok(value * rule.weight())
}

/// EF value for MC, embedded and star-condition hybrid rules. Weighted
/// rules are refused: the problem is #P-complete for them.
pub fn ef_poly(rules: &[Rule], n: usize, i: usize) -> Result<Rational> {
    check_player(i, n)?;
    let mut total = Rational::zero();
    for r in rules {
        let h = match r {
            Rule::Mc(m) => embedded_to_hybrid(&mc_to_embedded(m), n)?,
            Rule::Embedded(e) => embedded_to_hybrid(e, n)?,
            Rule::Hybrid(h) => h.clone(),
            Rule::Weighted(_) => {
                return Err(Error::Precondition(
                    "EF for weighted rules is #P-complete; use the colorings method".into(),
                ))
            }
        };
        total += ef_hybrid(&h, i)?;
    }
    Ok(total)
}

/// SS value of a player in the first node's label when every label is a
/// single player: a weighted count of clique covers of the complement.
pub fn ss_cliquecover(rule: &HybridRule, i: usize, caps: &Caps) -> Result<Rational> {
    let n = rule.n();
    check_player(i, n)?;
    let g = build_graph(rule);
    if g.labels().iter().any(|l| l.len() != 1) || !g.label(0).contains(i) {
        return Err(Error::Precondition(
            "clique-cover SS formula needs singleton labels and the player on the first node; \
             use the colorings method"
                .into(),
        ));
    }
    let complement = g.graph().complement();
    let mut total = Integer::zero();
    for cover in complement.clique_covers(caps.nodes)? {
        total += cover
            .iter()
            .map(|b| factorial(b.count_ones() as usize - 1))
            .product::<Integer>();
    }
    Ok(Rational::new(total, factorial(n)) * rule.weight())
}

/// `MY_i - MY_j` as a sum over coloring classes where the two players sit
/// in different blocks.
pub fn my_delta(rule: &HybridRule, i: usize, j: usize, caps: &Caps) -> Result<Rational> {
    let n = rule.n();
    check_player(i, n)?;
    check_player(j, n)?;
    let g = build_graph(rule);
    my_delta_graph(&g, i, j, caps).map(|v| v * rule.weight())
}

/// [`my_delta`] for the weight-1 rule of a labeled graph.
pub fn my_delta_graph(g: &LabeledGraph, i: usize, j: usize, caps: &Caps) -> Result<Rational> {
    let n = g.check_labels()?;
    check_player(i, n)?;
    check_player(j, n)?;
    let (ui, uj) = (node_of(g, i), node_of(g, j));
    let mut total = Rational::zero();
    for p in enumerate_colorings(g, caps.nodes)? {
        let (ti, tj) = (p.block_of(ui), p.block_of(uj));
        if ti == tj {
            continue;
        }
        let blocks = p.len();
        let inv = |t: usize| -> Rational {
            if t == 0 {
                Rational::zero()
            } else {
                let size = g.label_of(p.blocks[t]).len();
                Rational::new(1.into(), (n - size).into())
            }
        };
        let sign = if blocks % 2 == 0 { 1 } else { -1 };
        let term = (inv(tj) - inv(ti)) * Rational::from_integer(factorial(blocks - 2) * sign);
        total += term;
    }
    Ok(total)
}

/// How a value is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Sum over every embedded coalition of the explicit game.
    Brute,
    /// Sum over coloring classes of each rule's graph.
    Colorings,
    /// Polynomial algorithms (MQ for any rules, EF for non-weighted rules).
    Poly,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Brute, Method::Colorings, Method::Poly];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Colorings => "colorings",
            Method::Poly => "poly",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected brute, colorings or poly)"))
    }
}

/// Why the polynomial route cannot serve a request, if it cannot.
pub fn poly_refusal(rules: &RuleSet, kind: ValueKind) -> Option<String> {
    match kind {
        ValueKind::MQ => None,
        ValueKind::EF => rules
            .rules()
            .iter()
            .any(|r| match r {
                Rule::Weighted(_) => true,
                Rule::Hybrid(h) => !check_star(h),
                _ => false,
            })
            .then(|| "EF is #P-complete for weighted rules (polynomial only for embedded rules)".into()),
        other => Some(format!(
            "{other} is #P-complete for both embedded and weighted rules (no polynomial method)"
        )),
    }
}

/// Value of every player under the chosen method.
pub fn evaluate_all(rules: &RuleSet, kind: ValueKind, method: Method, caps: &Caps) -> Result<Vec<Rational>> {
    let n = rules.n();
    match method {
        Method::Brute => {
            let game = game_of_rules(rules.rules(), n, caps)?;
            (1..=n).map(|i| esv_bruteforce(&game, kind, i, caps)).collect()
        }
        Method::Colorings => {
            let mut total = vec![Rational::zero(); n];
            for r in rules.rules() {
                for h in to_hybrid(r, n)? {
                    for (t, v) in total.iter_mut().zip(esv_colorings_all(&h, kind, caps)?) {
                        *t += v;
                    }
                }
            }
            Ok(total)
        }
        Method::Poly => {
            if let Some(reason) = poly_refusal(rules, kind) {
                return Err(Error::Precondition(reason));
            }
            (1..=n)
                .map(|i| match kind {
                    ValueKind::MQ => mq_poly(rules.rules(), n, i),
                    _ => ef_poly(rules.rules(), n, i),
                })
                .collect()
        }
    }
}
