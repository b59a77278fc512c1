//! Incompatibility graphs of hybrid rules and the small-graph toolbox used
//! by the value algorithms: colorings as independent-set partitions,
//! components, bipartitions, matchings, clique covers.

use std::fmt::Write as _;

use num_traits::One;

use crate::combinatorics::{falling_factorial, Caps, Integer, Rational};
use crate::error::{Error, ParseError, Result};
use crate::game::{Coalition, EmbeddedCoalition, Partition, PartitionGame, MAX_PLAYERS};
use crate::rules::{compatible, BoolExpr, HybridRule};

/// Node sets are bitmasks, bit `v` for node `v` (0-based).
pub type NodeSet = u64;

/// Largest supported node count.
pub const MAX_NODES: usize = 64;

fn bits(mask: NodeSet) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

fn full_mask(k: usize) -> NodeSet {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Undirected simple graph on nodes `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<NodeSet>,
}

impl Graph {
    pub fn new(k: usize) -> Self {
        assert!(k <= MAX_NODES, "at most {MAX_NODES} nodes");
        Graph { adj: vec![0; k] }
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k > MAX_NODES {
            return Err(Error::Precondition(format!("at most {MAX_NODES} nodes supported")));
        }
        let mut g = Graph::new(k);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Complete graph on `k` nodes.
    pub fn complete(k: usize) -> Self {
        let mut g = Graph::new(k);
        for v in 0..k {
            g.adj[v] = full_mask(k) & !(1 << v);
        }
        g
    }

    /// Path `0 - 1 - ... - (k-1)`.
    pub fn path(k: usize) -> Self {
        let mut g = Graph::new(k);
        for v in 1..k {
            g.add_edge(v - 1, v).expect("valid path edge");
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        let k = self.adj.len();
        if a >= k || b >= k {
            return Err(Error::Precondition(format!("edge ({a},{b}) outside {k} nodes")));
        }
        if a == b {
            return Err(Error::Precondition(format!("self-loop at node {a}")));
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn nodes(&self) -> NodeSet {
        full_mask(self.len())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.len() && self.adj[a] >> b & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> NodeSet {
        self.adj[v]
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| bits(self.adj[a] >> a).map(move |d| (a, a + d)).filter(|e| e.0 != e.1))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Graph {
        let all = self.nodes();
        Graph {
            adj: self.adj.iter().enumerate().map(|(v, m)| all & !m & !(1 << v)).collect(),
        }
    }

    /// Graph with an extra isolated node appended.
    pub fn with_isolated(&self, extra: usize) -> Graph {
        let mut adj = self.adj.clone();
        adj.extend(std::iter::repeat(0).take(extra));
        Graph { adj }
    }

    /// Subgraph induced by `mask`, nodes renumbered in ascending order.
    pub fn induced(&self, mask: NodeSet) -> Graph {
        let nodes: Vec<usize> = bits(mask).collect();
        let mut g = Graph::new(nodes.len());
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if i < j && self.has_edge(a, b) {
                    g.add_edge(i, j).expect("induced edge");
                }
            }
        }
        g
    }

    pub fn is_independent(&self, mask: NodeSet) -> bool {
        bits(mask).all(|v| self.adj[v] & mask == 0)
    }

    pub fn is_clique(&self, mask: NodeSet) -> bool {
        bits(mask).all(|v| mask & !(1 << v) & !self.adj[v] == 0)
    }

    /// Connected components ordered by smallest node.
    pub fn components(&self) -> Vec<NodeSet> {
        let mut seen: NodeSet = 0;
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp: NodeSet = 1 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |acc, v| acc | self.adj[v]) & !comp;
                comp |= next;
                frontier = next;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    /// Splits a node set into two independent sets by breadth-first
    /// layering, the first holding the smallest node of each connected
    /// piece; `None` when an odd cycle exists.
    pub fn bipartition(&self, component: NodeSet) -> Option<(NodeSet, NodeSet)> {
        let (mut side_b, mut side_c) = (0, 0);
        let mut reached: NodeSet = 0;
        while component & !reached != 0 {
            let start = (component & !reached).trailing_zeros();
            let mut frontier: NodeSet = 1 << start;
            reached |= frontier;
            side_b |= frontier;
            let mut even = false;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |acc, v| acc | self.adj[v]) & component & !reached;
                if even {
                    side_b |= next;
                } else {
                    side_c |= next;
                }
                reached |= next;
                frontier = next;
                even = !even;
            }
        }
        (self.is_independent(side_b) && self.is_independent(side_c)).then_some((side_b, side_c))
    }

    pub fn is_bipartite(&self) -> bool {
        self.components().into_iter().all(|c| self.bipartition(c).is_some())
    }

    /// Every independent subset of `within`, including the empty set.
    pub fn independent_sets(&self, within: NodeSet, cap: usize) -> Result<Vec<NodeSet>> {
        Caps::check(cap, "graph", within.count_ones() as usize)?;
        let nodes: Vec<usize> = bits(within).collect();
        let mut out = Vec::new();
        fn go(g: &Graph, nodes: &[usize], idx: usize, cur: NodeSet, out: &mut Vec<NodeSet>) {
            if idx == nodes.len() {
                out.push(cur);
                return;
            }
            go(g, nodes, idx + 1, cur, out);
            let v = nodes[idx];
            if g.adj[v] & cur == 0 {
                go(g, nodes, idx + 1, cur | 1 << v, out);
            }
        }
        go(self, &nodes, 0, 0, &mut out);
        Ok(out)
    }

    /// Independent-set counts indexed by size `0..=k`.
    pub fn independent_sets_by_size(&self, cap: usize) -> Result<Vec<Integer>> {
        let mut counts = vec![Integer::from(0); self.len() + 1];
        for s in self.independent_sets(self.nodes(), cap)? {
            counts[s.count_ones() as usize] += 1;
        }
        Ok(counts)
    }

    /// Every matching, as sorted edge lists, including the empty matching.
    pub fn matchings(&self, cap: usize) -> Result<Vec<Vec<(usize, usize)>>> {
        Caps::check(cap, "graph", self.len())?;
        let edges = self.edges();
        let mut out = Vec::new();
        fn go(
            edges: &[(usize, usize)],
            idx: usize,
            used: NodeSet,
            cur: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            if idx == edges.len() {
                out.push(cur.clone());
                return;
            }
            go(edges, idx + 1, used, cur, out);
            let (a, b) = edges[idx];
            let m = 1 << a | 1 << b;
            if used & m == 0 {
                cur.push((a, b));
                go(edges, idx + 1, used | m, cur, out);
                cur.pop();
            }
        }
        go(&edges, 0, 0, &mut Vec::new(), &mut out);
        Ok(out)
    }

    /// Matching counts indexed by number of edges.
    pub fn matchings_by_size(&self, cap: usize) -> Result<Vec<Integer>> {
        let mut counts = vec![Integer::from(0); self.len() / 2 + 1];
        for m in self.matchings(cap)? {
            counts[m.len()] += 1;
        }
        Ok(counts)
    }

    /// Number of matchings, the empty one included.
    pub fn hosoya(&self, cap: usize) -> Result<Integer> {
        Ok(self.matchings_by_size(cap)?.into_iter().sum())
    }

    /// Every partition of the nodes into cliques, blocks ordered by
    /// smallest node.
    pub fn clique_covers(&self, cap: usize) -> Result<Vec<Vec<NodeSet>>> {
        let comp = self.complement();
        Ok(enumerate_independent_partitions(&comp, cap)?
            .map(|p| p.blocks)
            .collect())
    }

    /// Proper colorings with at most `colors` colors, counted by direct
    /// enumeration of all color assignments. Exponential; for checks only.
    pub fn count_colorings_direct(&self, colors: usize) -> Integer {
        let k = self.len();
        let mut assign = vec![0usize; k];
        let mut count = Integer::from(0);
        fn go(g: &Graph, v: usize, colors: usize, assign: &mut [usize], count: &mut Integer) {
            if v == g.len() {
                *count += 1;
                return;
            }
            for c in 0..colors {
                if bits(g.adj[v] & full_mask(v)).all(|u| assign[u] != c) {
                    assign[v] = c;
                    go(g, v + 1, colors, assign, count);
                }
            }
        }
        if colors > 0 || k == 0 {
            go(self, 0, colors, &mut assign, &mut count);
        }
        count
    }
}

/// A partition of the nodes into independent sets together with the number
/// of proper colorings (with as many colors as nodes) inducing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodePartition {
    /// Blocks ordered by smallest node; block 0 holds node 0.
    pub blocks: Vec<NodeSet>,
    pub theta: Integer,
}

impl NodePartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b >> v & 1 == 1)
            .expect("node in some block")
    }
}

/// Streams partitions of the nodes into independent sets in
/// restricted-growth order.
#[derive(Clone, Debug)]
pub struct IndependentPartitions {
    adj: Vec<NodeSet>,
    assign: Vec<usize>,
    masks: Vec<NodeSet>,
    depth: usize,
    backtrack: bool,
    done: bool,
}

impl IndependentPartitions {
    fn emit(&self) -> NodePartition {
        NodePartition {
            blocks: self.masks.clone(),
            theta: falling_factorial(self.adj.len(), self.masks.len()),
        }
    }
}

impl Iterator for IndependentPartitions {
    type Item = NodePartition;

    fn next(&mut self) -> Option<NodePartition> {
        if self.done {
            return None;
        }
        let k = self.adj.len();
        if k == 0 {
            self.done = true;
            return Some(self.emit());
        }
        let mut v = self.depth;
        let mut first_choice = 0;
        loop {
            if self.backtrack {
                // undo node v and resume from its next choice
                let b = self.assign[v];
                self.masks[b] &= !(1 << v);
                if self.masks[b] == 0 {
                    self.masks.pop();
                }
                first_choice = b + 1;
                self.backtrack = false;
            }
            let open = self.masks.len();
            let choice = (first_choice..=open).find(|&c| c == open || self.masks[c] & self.adj[v] == 0);
            match choice {
                Some(c) => {
                    if c == open {
                        self.masks.push(0);
                    }
                    self.masks[c] |= 1 << v;
                    self.assign[v] = c;
                    if v + 1 == k {
                        self.depth = v;
                        self.backtrack = true;
                        return Some(self.emit());
                    }
                    v += 1;
                    first_choice = 0;
                }
                None => {
                    if v == 0 {
                        self.done = true;
                        return None;
                    }
                    v -= 1;
                    self.backtrack = true;
                }
            }
        }
    }
}

/// Every partition of the graph's nodes into independent sets, once each,
/// paired with its coloring multiplicity `k (k-1) ... (k-p+1)` for `k`
/// nodes and `p` blocks.
pub fn enumerate_independent_partitions(g: &Graph, cap: usize) -> Result<IndependentPartitions> {
    Caps::check(cap, "graph", g.len())?;
    Ok(IndependentPartitions {
        adj: g.adj.clone(),
        assign: vec![0; g.len()],
        masks: Vec::new(),
        depth: 0,
        backtrack: false,
        done: false,
    })
}

/// A graph whose nodes carry player-set labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    graph: Graph,
    labels: Vec<Coalition>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Vec<Coalition>) -> Result<Self> {
        if graph.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes but {} labels",
                graph.len(),
                labels.len()
            )));
        }
        Ok(LabeledGraph { graph, labels })
    }

    /// Node `v` labeled `{v + 1}`.
    pub fn singleton_labels(graph: Graph) -> Self {
        let labels = (1..=graph.len()).map(Coalition::singleton).collect();
        LabeledGraph { graph, labels }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn labels(&self) -> &[Coalition] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> Coalition {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Union of the labels of `mask`.
    pub fn label_of(&self, mask: NodeSet) -> Coalition {
        bits(mask).fold(Coalition::empty(), |acc, v| acc | self.labels[v])
    }

    pub fn players(&self) -> Coalition {
        self.label_of(self.graph.nodes())
    }

    /// Player count, when labels partition `1..=n`.
    pub fn check_labels(&self) -> Result<usize> {
        let mut seen = Coalition::empty();
        for (v, l) in self.labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::LabelsNotPartition(format!("node {} has an empty label", v + 1)));
            }
            if l.intersects(seen) {
                return Err(Error::LabelsNotPartition(format!(
                    "label of node {} overlaps an earlier label",
                    v + 1
                )));
            }
            seen = seen | *l;
        }
        let n = seen.max_player().unwrap_or(0);
        if seen != Coalition::full(n) || n == 0 {
            return Err(Error::LabelsNotPartition(format!("labels cover {seen}, not 1..={n}")));
        }
        Ok(n)
    }

    /// The hybrid rule with this incompatibility graph, weight 1.
    pub fn to_hybrid(&self) -> Result<HybridRule> {
        self.check_labels()?;
        let exprs = (0..self.len())
            .map(|v| {
                BoolExpr::new(self.labels[v], self.label_of(self.graph.neighbors(v))).expect("labels are disjoint")
            })
            .collect();
        HybridRule::new(exprs, Rational::one())
    }

    /// Labels partition the players, nodes outside the first node's
    /// neighborhood are pairwise non-adjacent, and each of them carries a
    /// single player.
    pub fn is_embedded_form(&self) -> bool {
        if self.check_labels().is_err() || self.is_empty() {
            return false;
        }
        let outside = self.graph.nodes() & !self.graph.neighbors(0) & !1;
        self.graph.is_independent(outside) && bits(outside).all(|v| self.labels[v].len() == 1)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, l) in self.labels.iter().enumerate() {
            let players: Vec<String> = l.players().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "  v{} [label=\"{}\"];", v + 1, players.join(","));
        }
        for (a, b) in self.graph.edges() {
            let _ = writeln!(out, "  v{} -- v{};", a + 1, b + 1);
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text form: `graph: k`, then `label i: p ...` and `edge i j`
    /// lines with 1-based nodes.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph: {}\n", self.len());
        for (v, l) in self.labels.iter().enumerate() {
            let players: Vec<String> = l.players().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "label {}: {}", v + 1, players.join(" "));
        }
        for (a, b) in self.graph.edges() {
            let _ = writeln!(out, "edge {} {}", a + 1, b + 1);
        }
        out
    }

    /// Reads the plain-text form; nodes without a `label` line get `{i}`.
    pub fn parse_text(text: &str) -> Result<LabeledGraph> {
        let mut graph: Option<Graph> = None;
        let mut labels: Vec<Option<Coalition>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let col_of = |needle: &str| raw.find(needle).map_or(1, |c| c + 1);
            let words: Vec<&str> = content.split_whitespace().collect();
            let number = |w: &str| -> std::result::Result<usize, ParseError> {
                w.trim_end_matches(':')
                    .parse::<usize>()
                    .map_err(|_| ParseError::syntax(line_no, col_of(w), format!("expected a number, found '{w}'")))
            };
            match words[0] {
                "graph:" => {
                    if graph.is_some() || words.len() != 2 {
                        return Err(ParseError::syntax(line_no, 1, "expected a single 'graph: <k>' header").into());
                    }
                    let k = number(words[1])?;
                    if k == 0 || k > MAX_NODES {
                        return Err(ParseError::syntax(
                            line_no,
                            col_of(words[1]),
                            format!("node count must be in 1..={MAX_NODES}"),
                        )
                        .into());
                    }
                    graph = Some(Graph::new(k));
                    labels = vec![None; k];
                }
                "label" | "edge" => {
                    let Some(g) = graph.as_mut() else {
                        return Err(ParseError::syntax(line_no, 1, "missing 'graph: <k>' header").into());
                    };
                    let k = g.len();
                    let node = |w: &str| -> std::result::Result<usize, ParseError> {
                        let v = number(w)?;
                        if v == 0 || v > k {
                            return Err(ParseError::syntax(
                                line_no,
                                col_of(w),
                                format!("node {v} outside 1..={k}"),
                            ));
                        }
                        Ok(v - 1)
                    };
                    if words[0] == "label" {
                        if words.len() < 2 || !words[1].ends_with(':') {
                            return Err(ParseError::syntax(line_no, 1, "expected 'label <i>: <players>'").into());
                        }
                        let v = node(words[1])?;
                        let mut l = Coalition::empty();
                        for w in &words[2..] {
                            let p = number(w)?;
                            if p == 0 || p > MAX_PLAYERS {
                                return Err(
                                    ParseError::syntax(line_no, col_of(w), format!("player {p} out of range")).into(),
                                );
                            }
                            l = l.with(p);
                        }
                        labels[v] = Some(l);
                    } else {
                        if words.len() != 3 {
                            return Err(ParseError::syntax(line_no, 1, "expected 'edge <i> <j>'").into());
                        }
                        let a = node(words[1])?;
                        let b = node(words[2])?;
                        if a == b {
                            return Err(ParseError::syntax(line_no, col_of(words[2]), "self-loop").into());
                        }
                        g.add_edge(a, b)?;
                    }
                }
                other => {
                    return Err(
                        ParseError::syntax(line_no, col_of(other), format!("unknown directive '{other}'")).into(),
                    );
                }
            }
        }
        let graph = graph.ok_or_else(|| ParseError::syntax(1, 1, "missing 'graph: <k>' header"))?;
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(v, l)| l.unwrap_or_else(|| Coalition::singleton(v + 1)))
            .collect();
        LabeledGraph::new(graph, labels)
    }
}

/// The incompatibility graph: node `i` per expression, labeled with its
/// positive literals, edges between incompatible expressions.
pub fn build_graph(rule: &HybridRule) -> LabeledGraph {
    let exprs = rule.exprs();
    let mut graph = Graph::new(exprs.len());
    for i in 0..exprs.len() {
        for j in i + 1..exprs.len() {
            if !compatible(&exprs[i], &exprs[j]) {
                graph.add_edge(i, j).expect("distinct nodes");
            }
        }
    }
    LabeledGraph {
        graph,
        labels: exprs.iter().map(BoolExpr::positives).collect(),
    }
}

pub fn graph_to_hybrid(g: &LabeledGraph) -> Result<HybridRule> {
    g.to_hybrid()
}

pub fn check_embedded_graph(g: &LabeledGraph) -> bool {
    g.is_embedded_form()
}

/// Node partitions of the rule's graph with their coloring multiplicity.
pub fn enumerate_colorings(g: &LabeledGraph, cap: usize) -> Result<IndependentPartitions> {
    enumerate_independent_partitions(&g.graph, cap)
}

/// The embedded coalition a node partition maps to: the labels of the
/// first node's block and of every block.
pub fn embedded_of(g: &LabeledGraph, p: &NodePartition) -> EmbeddedCoalition {
    let blocks: Vec<Coalition> = p.blocks.iter().map(|&b| g.label_of(b)).collect();
    let s = blocks[0];
    EmbeddedCoalition::new(s, Partition::from_blocks_unchecked(blocks)).expect("first block is a block")
}

/// The game of a hybrid rule read off its graph's colorings.
pub fn game_from_graph(rule: &HybridRule, caps: &Caps) -> Result<PartitionGame> {
    let g = build_graph(rule);
    let n = rule.n();
    let mut game = PartitionGame::zero(n);
    for p in enumerate_colorings(&g, caps.nodes)? {
        game.set(embedded_of(&g, &p), rule.weight().clone())?;
    }
    Ok(game)
}
