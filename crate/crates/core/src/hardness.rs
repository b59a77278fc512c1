//! Counting pipelines that recover graph invariants from extended Shapley
//! values by solving a nonsingular linear system, each cross-checked against
//! direct enumeration.

use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::combinatorics::{
    bell, factorial, falling_factorial, r_bell, rat, sign, solve_linear, to_integer, Caps, Integer, Rational,
    RationalMatrix,
};
use crate::error::{Error, Result};
use crate::game::{Coalition, ValueKind};
use crate::graphs::{enumerate_independent_partitions, Graph, LabeledGraph};
use crate::values::{esv_labeled_graph, my_delta_graph, ss_cliquecover};

/// Outcome of one reduction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    /// Name of the recovered quantity.
    pub target: String,
    pub recovered: Vec<Integer>,
    pub direct: Vec<Integer>,
    pub matrix: RationalMatrix,
    /// Values computed on the constructed games, one per system row.
    pub values: Vec<Rational>,
    pub determinant: Rational,
    pub expected_determinant: Rational,
}

impl ReductionReport {
    /// Recovered counts equal direct ones and the determinant matches its
    /// closed form.
    pub fn is_consistent(&self) -> bool {
        self.recovered == self.direct && self.determinant == self.expected_determinant
    }
}

fn rational_str(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

impl Serialize for ReductionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let ints = |v: &[Integer]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let rats = |v: &[Rational]| v.iter().map(rational_str).collect::<Vec<_>>();
        let matrix: Vec<Vec<String>> = (0..self.matrix.rows()).map(|r| rats(self.matrix.row(r))).collect();
        let mut st = s.serialize_struct("ReductionReport", 8)?;
        st.serialize_field("consistent", &self.is_consistent())?;
        st.serialize_field("determinant", &rational_str(&self.determinant))?;
        st.serialize_field("direct", &ints(&self.direct))?;
        st.serialize_field("expected_determinant", &rational_str(&self.expected_determinant))?;
        st.serialize_field("matrix", &matrix)?;
        st.serialize_field("recovered", &ints(&self.recovered))?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("values", &rats(&self.values))?;
        st.end()
    }
}

/// Which pipeline to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    IndependentSets,
    Colorings,
    Hosoya,
    Matchings,
}

impl Reduction {
    pub const ALL: [Reduction; 4] = [
        Reduction::IndependentSets,
        Reduction::Colorings,
        Reduction::Hosoya,
        Reduction::Matchings,
    ];

    /// The value kind whose hardness the pipeline exhibits.
    pub fn value_kind(self) -> ValueKind {
        match self {
            Reduction::IndependentSets => ValueKind::EF,
            Reduction::Colorings => ValueKind::HY,
            Reduction::Hosoya => ValueKind::SS,
            Reduction::Matchings => ValueKind::MY,
        }
    }

    pub fn for_kind(kind: ValueKind) -> Option<Reduction> {
        Reduction::ALL.into_iter().find(|r| r.value_kind() == kind)
    }

    pub fn needs_bipartite(self) -> bool {
        matches!(self, Reduction::Hosoya | Reduction::Matchings)
    }

    pub fn run(self, g: &Graph, caps: &Caps) -> Result<ReductionReport> {
        match self {
            Reduction::IndependentSets => independent_sets_via_ef(g, caps),
            Reduction::Colorings => chromatic_counts_via_hy(g, caps),
            Reduction::Hosoya => hosoya_via_ss(g, caps),
            Reduction::Matchings => matchings_by_size_via_my(g, caps),
        }
    }
}

fn check_input(g: &Graph, caps: &Caps) -> Result<usize> {
    let k = g.len();
    Caps::check(caps.nodes, "input graph", k)?;
    if k == 0 {
        return Err(Error::Precondition("the input graph needs at least one node".into()));
    }
    Ok(k)
}

/// Constructed graphs may exceed the node cap even for admissible inputs;
/// the input size has already been checked.
fn lifted(caps: &Caps, nodes: usize) -> Caps {
    Caps {
        nodes: caps.nodes.max(nodes),
        ..*caps
    }
}

fn players(range: impl IntoIterator<Item = usize>) -> Coalition {
    range.into_iter().collect()
}

/// Node 0 prepended to `g` with no edges.
fn with_front_node(g: &Graph) -> Graph {
    let mut out = Graph::new(g.len() + 1);
    for (a, b) in g.edges() {
        out.add_edge(a + 1, b + 1).expect("edge within range");
    }
    out
}

fn solve_integral(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Integer>> {
    solve_linear(a, b)?
        .iter()
        .map(|x| {
            to_integer(x).ok_or_else(|| Error::Precondition(format!("reduction produced a non-integral count {x}")))
        })
        .collect()
}

fn product_of_factorials(range: impl IntoIterator<Item = usize>, power: u32) -> Integer {
    range
        .into_iter()
        .map(|i| num_traits::pow(factorial(i), power as usize))
        .product()
}

/// Independent sets of `g` by size, read off EF values of `k + 1` games
/// where an isolated node carries a growing label.
pub fn independent_sets_via_ef(g: &Graph, caps: &Caps) -> Result<ReductionReport> {
    let k = check_input(g, caps)?;
    let caps = lifted(caps, k + 1);
    let base = with_front_node(g);
    let mut values = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut labels = vec![players([1].into_iter().chain(k + 2..=k + j + 1))];
        labels.extend((2..=k + 1).map(Coalition::singleton));
        let lg = LabeledGraph::new(base.clone(), labels)?;
        let ef = esv_labeled_graph(&lg, ValueKind::EF, &caps)?.swap_remove(0);
        rhs.push(&ef * Rational::from_integer(factorial(k + j + 1)));
        values.push(ef);
    }
    let matrix = RationalMatrix::from_fn(k + 1, k + 1, |j, m| {
        Rational::from_integer(factorial(m + j) * factorial(k - m))
    });
    let determinant = matrix.determinant()?;
    let recovered = solve_integral(&matrix, &rhs)?;
    Ok(ReductionReport {
        target: "independent sets by size".into(),
        recovered,
        direct: g.independent_sets_by_size(caps.subgraph.max(k))?,
        matrix,
        values,
        determinant,
        expected_determinant: Rational::from_integer(product_of_factorials(0..=k, 3)),
    })
}

/// Colorings with `k` colors using exactly `m` colors, `m = 1..=k`, by
/// direct enumeration of independent partitions.
pub fn exact_color_counts(g: &Graph, cap: usize) -> Result<Vec<Integer>> {
    let k = g.len();
    let mut blocks = vec![Integer::zero(); k + 1];
    for p in enumerate_independent_partitions(g, cap)? {
        blocks[p.len()] += 1;
    }
    Ok((1..=k).map(|m| &blocks[m] * falling_factorial(k, m)).collect())
}

/// Proper colorings with `colors` colors from the exact-use counts
/// `c[m-1]` (k colors, exactly m used).
pub fn colorings_from_exact(exact: &[Integer], colors: usize) -> Integer {
    let k = exact.len();
    let total: Rational = exact
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let m = idx + 1;
            Rational::new(falling_factorial(colors, m) * c, falling_factorial(k, m))
        })
        .sum();
    total.to_integer()
}

/// Exact-use color counts of `g`, read off HY values of `k` games where a
/// universal node carries a growing label.
pub fn chromatic_counts_via_hy(g: &Graph, caps: &Caps) -> Result<ReductionReport> {
    let k = check_input(g, caps)?;
    let caps = lifted(caps, k + 1);
    let mut base = with_front_node(g);
    for v in 1..=k {
        base.add_edge(0, v)?;
    }
    let mut values = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for j in 1..=k {
        let mut labels = vec![players([1].into_iter().chain(k + 2..=k + j))];
        labels.extend((2..=k + 1).map(Coalition::singleton));
        let lg = LabeledGraph::new(base.clone(), labels)?;
        let hy = esv_labeled_graph(&lg, ValueKind::HY, &caps)?.swap_remove(0);
        let scale = Rational::new(factorial(k + j) * bell(k + j), factorial(j - 1));
        rhs.push(&hy * scale);
        values.push(hy);
    }
    let matrix = RationalMatrix::from_fn(k, k, |j, m| {
        let (j, m) = (j + 1, m + 1);
        Rational::from_integer(factorial(k - m) * r_bell(j, m))
    });
    let determinant = matrix.determinant()?;
    let euler_partial: Rational = (0..=k).map(|i| Rational::new(Integer::one(), factorial(i))).sum();
    let expected =
        Rational::from_integer(product_of_factorials(0..=k, 1) * product_of_factorials(0..k, 1)) * euler_partial;
    let recovered = solve_integral(&matrix, &rhs)?;
    Ok(ReductionReport {
        target: "colorings using exactly m colors".into(),
        recovered,
        direct: exact_color_counts(g, caps.nodes)?,
        matrix,
        values,
        determinant,
        expected_determinant: expected,
    })
}

fn require_bipartite(g: &Graph) -> Result<()> {
    if g.is_bipartite() {
        Ok(())
    } else {
        Err(Error::NotBipartite)
    }
}

/// Number of matchings of a bipartite `g`, read off one SS value of the
/// game whose graph is the complement of `g` plus an isolated node.
pub fn hosoya_via_ss(g: &Graph, caps: &Caps) -> Result<ReductionReport> {
    let k = check_input(g, caps)?;
    require_bipartite(g)?;
    let caps = lifted(caps, k + 1);
    let rule = LabeledGraph::singleton_labels(with_front_node(g).complement()).to_hybrid()?;
    let ss = ss_cliquecover(&rule, 1, &caps)?;
    let matrix = RationalMatrix::identity(1);
    let rhs = [&ss * Rational::from_integer(factorial(k + 1))];
    let recovered = solve_integral(&matrix, &rhs)?;
    Ok(ReductionReport {
        target: "matchings (Hosoya index)".into(),
        recovered,
        direct: vec![g.hosoya(caps.subgraph.max(k))?],
        matrix,
        values: vec![ss],
        determinant: Rational::one(),
        expected_determinant: Rational::one(),
    })
}

/// Matchings of a bipartite `g` indexed by `m = 1..=k`, where entry `m`
/// counts matchings of size `k - m`.
pub fn matchings_by_block_count(g: &Graph, cap: usize) -> Result<Vec<Integer>> {
    let k = g.len();
    let by_size = g.matchings_by_size(cap)?;
    Ok((1..=k)
        .map(|m| by_size.get(k - m).cloned().unwrap_or_else(Integer::zero))
        .collect())
}

/// Matchings of a bipartite `g` by size, read off differences of MY values
/// of `k` games built on complements of `g` padded with isolated nodes.
pub fn matchings_by_size_via_my(g: &Graph, caps: &Caps) -> Result<ReductionReport> {
    let k = check_input(g, caps)?;
    require_bipartite(g)?;
    let n = 3 * k + 1;
    let caps = lifted(caps, 2 * k + 2);
    let mut values = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for j in 1..=k {
        // nodes: 0 = v1, 1 = v2, 2..k+2 = the input graph, then j padding nodes
        let nodes = k + j + 2;
        let mut sparse = Graph::new(nodes);
        for (a, b) in g.edges() {
            sparse.add_edge(a + 2, b + 2)?;
        }
        let mut labels = vec![players([1].into_iter().chain(k + j + 3..=n))];
        labels.extend((2..=k + j + 2).map(Coalition::singleton));
        let lg = LabeledGraph::new(sparse.complement(), labels)?;
        let delta = my_delta_graph(&lg, 1, 2, &caps)?;
        rhs.push(&delta * rat(3 * k as u64));
        values.push(delta);
    }
    let matrix = RationalMatrix::from_fn(k, k, |j, m| {
        let (j, m) = (j + 1, m + 1);
        sign((m + j) % 2 == 1) * Rational::from_integer(factorial(m + j))
    });
    let determinant = matrix.determinant()?;
    let expected: Integer = (0..k).map(|i| factorial(i) * factorial(i + 2)).product();
    let recovered = solve_integral(&matrix, &rhs)?;
    Ok(ReductionReport {
        target: "matchings by size (entry m counts matchings with k - m edges)".into(),
        recovered,
        direct: matchings_by_block_count(g, caps.subgraph.max(k))?,
        matrix,
        values,
        determinant,
        expected_determinant: Rational::from_integer(expected),
    })
}
