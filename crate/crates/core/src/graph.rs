//! Sender graphs and maximum independent sets.
//!
//! `x` and `y` are adjacent in `G_λⁿ` when a type-`λ` sender weakly prefers
//! reporting one as the other:
//! `𝒰ₙ(x,x,λ) ≤ 𝒰ₙ(y,x,λ)` or `𝒰ₙ(y,y,λ) ≤ 𝒰ₙ(x,y,λ)`.
//! The graph is built from `n`-letter sums directly; it is not a graph
//! product of `G_λ¹`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{Horizon, SenderTypeId, SeqId};

/// Which sender type a graph was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `G_λⁿ` for one type.
    Type(SenderTypeId),
    /// Union over several graphs.
    Union,
}

/// Undirected graph over `𝒳ⁿ` stored as a dense symmetric bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderGraph {
    n: usize,
    vertex_count: usize,
    words: usize,
    bits: Vec<u64>,
    provenance: Provenance,
}

impl SenderGraph {
    fn empty(n: usize, vertex_count: usize, provenance: Provenance) -> Self {
        let words = vertex_count.div_ceil(64);
        Self {
            n,
            vertex_count,
            words,
            bits: vec![0; words * vertex_count],
            provenance,
        }
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    /// Horizon `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `|𝒳|ⁿ`.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Type the graph belongs to, or [`Provenance::Union`].
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Adjacency test.
    pub fn adjacent(&self, u: SeqId, v: SeqId) -> bool {
        self.row(u.0)[v.0 / 64] >> (v.0 % 64) & 1 == 1
    }

    /// Number of neighbours of `v`.
    pub fn degree(&self, v: SeqId) -> usize {
        self.row(v.0).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| self.degree(SeqId(v)))
            .sum::<usize>()
            / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (SeqId, SeqId)> + '_ {
        (0..self.vertex_count).flat_map(move |u| {
            ((u + 1)..self.vertex_count)
                .filter(move |&v| self.adjacent(SeqId(u), SeqId(v)))
                .map(move |v| (SeqId(u), SeqId(v)))
        })
    }

    /// True if no two members are adjacent.
    pub fn is_independent(&self, members: &[SeqId]) -> bool {
        members.iter().enumerate().all(|(i, &u)| {
            members[i + 1..]
                .iter()
                .all(|&v| u == v || !self.adjacent(u, v))
        })
    }
}

/// Builds `G_λⁿ` over the sequences of `horizon`.
pub fn build_sender_graph(
    horizon: &Horizon<'_>,
    lambda: SenderTypeId,
    graph_budget: usize,
) -> Result<SenderGraph> {
    horizon.model().check_type(lambda)?;
    let count = horizon.len();
    if count > graph_budget {
        return Err(Error::GraphBudget {
            vertices: count,
            budget: graph_budget,
        });
    }
    let mut g = SenderGraph::empty(horizon.n(), count, Provenance::Type(lambda));
    if horizon.model().is_honest(lambda) {
        return Ok(g);
    }
    let diag: Vec<i64> = (0..count).map(|x| horizon.score(lambda, x, x)).collect();
    for x in 0..count {
        for y in (x + 1)..count {
            if diag[x] <= horizon.score(lambda, y, x) || diag[y] <= horizon.score(lambda, x, y) {
                g.add_edge(x, y);
            }
        }
    }
    Ok(g)
}

/// Edge-set union of graphs on the same vertex set.
pub fn union_graph(graphs: &[SenderGraph]) -> Result<SenderGraph> {
    let (first, rest) = graphs.split_first().ok_or(Error::EmptyGraphList)?;
    if rest
        .iter()
        .any(|g| g.n != first.n || g.vertex_count != first.vertex_count)
    {
        return Err(Error::HorizonMismatch);
    }
    let mut out = first.clone();
    out.provenance = if rest.is_empty() {
        first.provenance
    } else {
        Provenance::Union
    };
    for g in rest {
        for (a, b) in out.bits.iter_mut().zip(&g.bits) {
            *a |= *b;
        }
    }
    Ok(out)
}

/// `G_λⁿ` for every type, in type order, followed by their union.
pub fn type_graphs_and_union(
    horizon: &Horizon<'_>,
    graph_budget: usize,
) -> Result<(Vec<SenderGraph>, SenderGraph)> {
    let graphs = horizon
        .model()
        .types()
        .map(|t| build_sender_graph(horizon, t, graph_budget))
        .collect::<Result<Vec<_>>>()?;
    let mut union = union_graph(&graphs)?;
    union.provenance = Provenance::Union;
    Ok((graphs, union))
}

/// How to search for an independent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisMode {
    /// Branch and bound; the result is certified maximum.
    Exact,
    /// Minimum-degree greedy; maximal but not certified.
    Greedy,
}

/// An independent set and whether it is certified maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSetResult {
    /// Members in increasing id order.
    pub members: Vec<SeqId>,
    /// `members.len()`; equals `α(G)` when `certified`.
    pub size: usize,
    /// True if no larger independent set exists.
    pub certified: bool,
    /// Branch-and-bound nodes visited (zero for greedy).
    pub nodes: u64,
}

/// Maximum (exact) or maximal (greedy) independent set.
///
/// Exact mode is branch and bound with a greedy clique-partition bound per
/// branch, seeded with the greedy set. The witness is deterministic.
pub fn max_independent_set(
    graph: &SenderGraph,
    mode: MisMode,
    mis_budget: usize,
) -> Result<IndependentSetResult> {
    let greedy = greedy_mis(graph);
    if mode == MisMode::Greedy {
        return Ok(IndependentSetResult {
            size: greedy.len(),
            members: greedy.into_iter().map(SeqId).collect(),
            certified: false,
            nodes: 0,
        });
    }
    if graph.vertex_count > mis_budget {
        return Err(Error::MisBudget {
            vertices: graph.vertex_count,
            budget: mis_budget,
        });
    }
    let mut search = Exact::new(graph, &greedy);
    search.run(full_set(graph.vertex_count, graph.words));
    let members = search.witness();
    Ok(IndependentSetResult {
        size: members.len(),
        members: members.into_iter().map(SeqId).collect(),
        certified: true,
        nodes: search.nodes,
    })
}

/// Independence number `α(G)`, exact when within budget, else greedy.
/// Returns the value and whether it is certified.
pub fn independence_number(graph: &SenderGraph, mis_budget: usize) -> (usize, bool) {
    let mode = if graph.vertex_count <= mis_budget {
        MisMode::Exact
    } else {
        MisMode::Greedy
    };
    let r = max_independent_set(graph, mode, mis_budget).expect("mode chosen within budget");
    (r.size, r.certified)
}

fn full_set(count: usize, words: usize) -> Vec<u64> {
    let mut set = vec![!0u64; words];
    if !count.is_multiple_of(64) {
        set[words - 1] = (1u64 << (count % 64)) - 1;
    }
    set
}

fn members(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        core::iter::from_fn(move || {
            if word == 0 {
                None
            } else {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            }
        })
    })
}

fn first(set: &[u64]) -> Option<usize> {
    set.iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + set[i].trailing_zeros() as usize)
}

fn remove(set: &mut [u64], v: usize) {
    set[v / 64] &= !(1u64 << (v % 64));
}

fn remove_closed_neighbourhood(set: &mut [u64], row: &[u64], v: usize) {
    for (s, r) in set.iter_mut().zip(row) {
        *s &= !r;
    }
    remove(set, v);
}

fn degree_within(row: &[u64], set: &[u64]) -> u32 {
    row.iter().zip(set).map(|(r, s)| (r & s).count_ones()).sum()
}

fn greedy_mis(graph: &SenderGraph) -> Vec<usize> {
    let mut cand = full_set(graph.vertex_count, graph.words);
    let mut chosen = Vec::new();
    loop {
        let pick = members(&cand).min_by_key(|&v| (degree_within(graph.row(v), &cand), v));
        let Some(v) = pick else { break };
        chosen.push(v);
        remove_closed_neighbourhood(&mut cand, graph.row(v), v);
    }
    chosen.sort_unstable();
    chosen
}

/// Branch and bound over a relabelled copy of the graph.
///
/// Candidates are greedily partitioned into cliques (colour classes); a
/// vertex in class `k` can extend the current set by at most `k`, which
/// prunes each branch separately. Vertices are relabelled in increasing
/// degree order so the bit order drives the colouring.
struct Exact {
    words: usize,
    rows: Vec<u64>,
    order: Vec<usize>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
}

impl Exact {
    fn new(graph: &SenderGraph, incumbent: &[usize]) -> Self {
        let count = graph.vertex_count;
        // Repeatedly move the vertex with most remaining neighbours to the
        // back; the complement's degeneracy order.
        let mut order = vec![0; count];
        let mut remaining = full_set(count, graph.words);
        for slot in (0..count).rev() {
            let v = members(&remaining)
                .max_by_key(|&v| {
                    (
                        degree_within(graph.row(v), &remaining),
                        core::cmp::Reverse(v),
                    )
                })
                .expect("one vertex per slot");
            order[slot] = v;
            remove(&mut remaining, v);
        }
        let mut position = vec![0; count];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let words = graph.words;
        let mut rows = vec![0u64; words * count];
        for (i, &v) in order.iter().enumerate() {
            for u in members(graph.row(v)) {
                let j = position[u];
                rows[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        Self {
            words,
            rows,
            best: incumbent.iter().map(|&v| position[v]).collect(),
            order,
            current: Vec::new(),
            nodes: 0,
        }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    fn witness(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.best.iter().map(|&i| self.order[i]).collect();
        out.sort_unstable();
        out
    }

    fn run(&mut self, mut cand: Vec<u64>) {
        self.nodes += 1;
        let mark = self.current.len();

        // Isolated candidates belong to every maximum extension.
        let snapshot = cand.clone();
        for v in members(&snapshot) {
            if degree_within(self.row(v), &snapshot) == 0 {
                self.current.push(v);
                remove(&mut cand, v);
            }
        }

        if cand.iter().all(|&w| w == 0) {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.current.truncate(mark);
            return;
        }

        let (vertices, colours) = self.colour(&cand);
        for (&v, &colour) in vertices.iter().zip(&colours).rev() {
            if self.current.len() + colour <= self.best.len() {
                break;
            }
            let mut with = cand.clone();
            remove_closed_neighbourhood(&mut with, self.row(v), v);
            self.current.push(v);
            if with.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.run(with);
            }
            self.current.pop();
            remove(&mut cand, v);
        }
        self.current.truncate(mark);
    }

    /// Greedy clique partition of `cand`: vertices listed class by class
    /// with their 1-based class number.
    fn colour(&self, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = cand.to_vec();
        let mut vertices = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            let mut open = uncoloured.clone();
            while let Some(v) = first(&open) {
                vertices.push(v);
                colours.push(colour);
                remove(&mut uncoloured, v);
                for (o, r) in open.iter_mut().zip(self.row(v)) {
                    *o &= r;
                }
                remove(&mut open, v);
            }
        }
        (vertices, colours)
    }
}

/// Graphviz rendering with vertices labelled by their sequences.
pub fn export_dot(graph: &SenderGraph, horizon: &Horizon<'_>) -> String {
    let name = match graph.provenance {
        Provenance::Type(t) => horizon.model().type_label(t),
        Provenance::Union => "union",
    };
    let mut out = String::new();
    let _ = writeln!(out, "graph \"G_{}^{}\" {{", escape(name), graph.n);
    for v in 0..graph.vertex_count {
        let _ = writeln!(
            out,
            "  v{v} [label=\"{}\"];",
            escape(&horizon.label(SeqId(v)))
        );
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "  v{} -- v{};", u.0, v.0);
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;

    const H: SenderTypeId = SenderTypeId(0);
    const D: SenderTypeId = SenderTypeId(1);

    fn brute_alpha(g: &SenderGraph) -> usize {
        let n = g.vertex_count();
        assert!(n <= 16);
        (0u32..1 << n)
            .filter(|mask| {
                let m: Vec<SeqId> = (0..n).filter(|v| mask >> v & 1 == 1).map(SeqId).collect();
                g.is_independent(&m)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn dishonest_single_letter_graph_is_triangle() {
        let m = Model::example1();
        let h = Horizon::new(&m, 1, 100).unwrap();
        let g = build_sender_graph(&h, D, 100).unwrap();
        assert_eq!(g.edge_count(), 3);
        let r = max_independent_set(&g, MisMode::Exact, 512).unwrap();
        assert_eq!(r.size, 1);
        assert!(r.certified);
    }

    #[test]
    fn honest_graphs_are_empty() {
        let m = Model::example1();
        for n in 1..=3 {
            let h = Horizon::new(&m, n, 100).unwrap();
            let g = build_sender_graph(&h, H, 100).unwrap();
            assert_eq!(g.edge_count(), 0);
            let r = max_independent_set(&g, MisMode::Exact, 512).unwrap();
            assert_eq!(r.size, 3usize.pow(n as u32));
            assert_eq!(r.members, h.ids().collect::<Vec<_>>());
        }
    }

    #[test]
    fn dishonest_two_letter_graph_is_complete() {
        let m = Model::example1();
        let h = Horizon::new(&m, 2, 100).unwrap();
        let g = build_sender_graph(&h, D, 100).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 36);
        assert_eq!(brute_alpha(&g), 1);
        assert_eq!(
            max_independent_set(&g, MisMode::Exact, 512).unwrap().size,
            1
        );
    }

    #[test]
    fn union_rules() {
        let m = Model::example1();
        let h = Horizon::new(&m, 1, 100).unwrap();
        let gh = build_sender_graph(&h, H, 100).unwrap();
        let gd = build_sender_graph(&h, D, 100).unwrap();
        let u = union_graph(&[gh.clone(), gd.clone()]).unwrap();
        assert_eq!(u.edge_count(), 3);
        assert_eq!(u.provenance(), Provenance::Union);
        assert_eq!(
            union_graph(&[gd.clone(), gd.clone()])
                .unwrap()
                .edges()
                .count(),
            3
        );
        assert_eq!(union_graph(core::slice::from_ref(&gd)).unwrap(), gd);
        assert_eq!(union_graph(&[]), Err(Error::EmptyGraphList));

        let h2 = Horizon::new(&m, 2, 100).unwrap();
        let gd2 = build_sender_graph(&h2, D, 100).unwrap();
        assert_eq!(union_graph(&[gd, gd2]), Err(Error::HorizonMismatch));
    }

    #[test]
    fn budgets_are_enforced() {
        let m = Model::example1();
        let h = Horizon::new(&m, 3, 100).unwrap();
        assert!(matches!(
            build_sender_graph(&h, D, 10),
            Err(Error::GraphBudget { .. })
        ));
        let g = build_sender_graph(&h, H, 100).unwrap();
        assert!(matches!(
            max_independent_set(&g, MisMode::Exact, 10),
            Err(Error::MisBudget { .. })
        ));
        let greedy = max_independent_set(&g, MisMode::Greedy, 10).unwrap();
        assert!(!greedy.certified);
        assert_eq!(greedy.size, 27);
    }

    #[test]
    fn exact_matches_brute_force_on_cycles_and_paths() {
        // C5 built by hand: α = 2; plus a pendant structure.
        let mut g = SenderGraph::empty(1, 7, Provenance::Union);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (5, 6)] {
            g.add_edge(u, v);
        }
        let r = max_independent_set(&g, MisMode::Exact, 512).unwrap();
        assert_eq!(r.size, brute_alpha(&g));
        assert!(g.is_independent(&r.members));
    }

    #[test]
    fn dot_export() {
        let m = Model::example1();
        let h = Horizon::new(&m, 1, 100).unwrap();
        let gd = build_sender_graph(&h, D, 100).unwrap();
        let dot = export_dot(&gd, &h);
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert_eq!(dot.matches("[label=").count(), 3);
        assert!(dot.starts_with("graph \"G_d^1\""));
        assert_eq!(dot, export_dot(&gd, &h));

        let gh = build_sender_graph(&h, H, 100).unwrap();
        let dot = export_dot(&gh, &h);
        assert_eq!(dot.matches(" -- ").count(), 0);
        assert_eq!(dot.matches("[label=").count(), 3);
    }
}
