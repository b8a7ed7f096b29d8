//! Benchmark generators (random cardinality, noisy parity learning, planted
//! max-cut) and the relative score used to compare solvers per instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::{Constraint, Formula, Literal};

/// `0.6N` constraints `CardGe(l/2)` over `l = 0.2N` distinct variables,
/// each with all literals positive or all negative.
pub fn gen_random_card(n: usize, seed: u64) -> Result<Formula> {
    if n < 10 || !n.is_multiple_of(10) {
        return Err(Error::InvalidParameter(format!("N = {n} must be a positive multiple of 10")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, m) = (n / 5, 3 * n / 5);
    let constraints = (0..m)
        .map(|_| {
            let negated = rng.gen_bool(0.5);
            let mut vars = index::sample(&mut rng, n, l).into_vec();
            vars.sort_unstable();
            let lits = vars.into_iter().map(|v| Literal::new(v as u32 + 1, negated)).collect();
            Constraint::card_ge(l / 2, lits)
        })
        .collect::<Result<Vec<_>>>()?;
    Formula::new(n, constraints)
}

/// A noisy parity instance together with its planted secret.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityInstance {
    pub formula: Formula,
    /// Satisfied-constraint count that counts as success.
    pub threshold: usize,
    /// `hidden[i]` is the secret value of variable `i + 1`.
    pub hidden: Vec<bool>,
    /// Indices of the samples whose output was flipped.
    pub flipped: Vec<usize>,
}

/// `2N` samples of a hidden parity function over uniformly random nonempty
/// subsets, with exactly `⌊N/2⌋` outputs flipped. Success means satisfying
/// at least `⌈3m/4⌉` of the resulting XOR constraints.
pub fn gen_parity_learning(n: usize, seed: u64) -> Result<ParityInstance> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("N = {n} must be at least 8")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let m = 2 * n;
    let subsets: Vec<Vec<usize>> = (0..m)
        .map(|_| loop {
            let s: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
            if !s.is_empty() {
                break s;
            }
        })
        .collect();
    let mut flipped = index::sample(&mut rng, m, m / 4).into_vec();
    flipped.sort_unstable();

    let mut constraints = Vec::with_capacity(m);
    for (i, s) in subsets.iter().enumerate() {
        let y = s.iter().filter(|&&v| hidden[v]).count() % 2 == 1;
        let odd = y ^ flipped.binary_search(&i).is_ok();
        constraints.push(Constraint::xor(s.iter().map(|&v| Literal::pos(v as u32 + 1)).collect(), odd)?);
    }
    Ok(ParityInstance { formula: Formula::new(n, constraints)?, threshold: (3 * m).div_ceil(4), hidden, flipped })
}

/// Weighted undirected graph with a planted cluster structure. Vertices are
/// numbered from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraph {
    pub clusters: usize,
    pub cluster_size: usize,
    pub labels: Vec<usize>,
    /// `(u, v, w)` with `u < v`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl PlantedGraph {
    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Weight of edges crossing the bipartition; `side[v]` picks the side.
    pub fn cut_weight(&self, side: &[bool]) -> f64 {
        self.edges.iter().filter(|&&(u, v, _)| side[u] != side[v]).map(|e| e.2).sum()
    }

    /// One weighted odd-parity XOR per edge: satisfied exactly when the edge
    /// is cut, so the falsified weight is the uncut weight.
    pub fn to_formula(&self) -> Result<Formula> {
        let cs = self
            .edges
            .iter()
            .map(|&(u, v, w)| {
                Constraint::xor(vec![Literal::pos(u as u32 + 1), Literal::pos(v as u32 + 1)], true)?.with_weight(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Formula::new(self.n_vertices(), cs)
    }

    /// `g <n> <m>` then one `e <u> <v> <w>` line per edge, vertices 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("g {} {}\n", self.n_vertices(), self.edges.len());
        for &(u, v, w) in &self.edges {
            writeln!(s, "e {} {} {w:?}", u + 1, v + 1).unwrap();
        }
        s
    }
}

/// Planted partition graph on `l` clusters of `k` vertices; intra-cluster
/// pairs are joined with probability `p_in`, others with `p_out`.
pub fn gen_planted_graph(l: usize, k: usize, p_in: f64, p_out: f64, seed: u64) -> Result<PlantedGraph> {
    if l < 2 || k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 clusters of 2 vertices, got {l} x {k}")));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..l * k).map(|v| v / k).collect();
    let mut edges = Vec::new();
    for u in 0..labels.len() {
        for v in u + 1..labels.len() {
            let same = labels[u] == labels[v];
            if rng.gen_bool(if same { p_in } else { p_out }) {
                edges.push((u, v, if same { 1.0 } else { 2.0 }));
            }
        }
    }
    Ok(PlantedGraph { clusters: l, cluster_size: k, labels, edges })
}

/// [`gen_planted_graph`] with both probabilities at 1/2, plus its encoding.
pub fn gen_planted_maxcut(l: usize, k: usize, seed: u64) -> Result<(PlantedGraph, Formula)> {
    let g = gen_planted_graph(l, k, 0.5, 0.5, seed)?;
    let f = g.to_formula()?;
    Ok((g, f))
}

/// `(max - cost + 1) / (max - min + 1)` over the costs of all solvers on one
/// instance; `None` if `solver` is absent.
pub fn relative_score(costs: &BTreeMap<String, f64>, solver: &str) -> Option<f64> {
    let cost = *costs.get(solver)?;
    let max = costs.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = costs.values().copied().fold(f64::INFINITY, f64::min);
    Some((max - cost + 1.0) / (max - min + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{count_unsat, write_formula, ConstraintKind, DiscreteAssignment, Format};

    #[test]
    fn card_parameters() {
        let f = gen_random_card(50, 1).unwrap();
        assert_eq!(f.len(), 30);
        for c in f.constraints() {
            assert_eq!(c.arity(), 10);
            assert_eq!(c.kind(), ConstraintKind::CardGe { bound: 5 });
            assert!(c.lits().iter().all(|l| l.is_negated()) || c.lits().iter().all(|l| !l.is_negated()));
        }
        let f = gen_random_card(10, 1).unwrap();
        assert_eq!((f.len(), f.constraints()[0].arity()), (6, 2));
        assert_eq!(f.constraints()[0].kind(), ConstraintKind::CardGe { bound: 1 });
        assert!(gen_random_card(15, 0).is_err());
        assert!(gen_random_card(0, 0).is_err());
        let a = write_formula(&gen_random_card(30, 4).unwrap(), Format::Hnf).unwrap();
        assert_eq!(a, write_formula(&gen_random_card(30, 4).unwrap(), Format::Hnf).unwrap());
    }

    #[test]
    fn parity_parameters() {
        let p = gen_parity_learning(20, 3).unwrap();
        assert_eq!(p.formula.len(), 40);
        assert_eq!(p.flipped.len(), 10);
        assert_eq!(p.threshold, 30);
        let z: Vec<i8> = p.hidden.iter().map(|&t| if t { -1 } else { 1 }).collect();
        let (unsat, _) = count_unsat(&p.formula, &DiscreteAssignment::new(z));
        assert_eq!(unsat, 10);
        assert_eq!(p, gen_parity_learning(20, 3).unwrap());
        assert!(gen_parity_learning(7, 0).is_err());
    }

    #[test]
    fn planted_graph_structure() {
        let g = gen_planted_graph(2, 2, 1.0, 1.0, 0).unwrap();
        assert_eq!(g.edges.len(), 6);
        assert_eq!(g.edges.iter().filter(|e| e.2 == 1.0).count(), 2);
        assert_eq!(g.edges.iter().filter(|e| e.2 == 2.0).count(), 4);
        let (g, _) = gen_planted_maxcut(3, 5, 8).unwrap();
        for &(u, v, w) in &g.edges {
            assert!(u < v);
            assert_eq!(w, if g.labels[u] == g.labels[v] { 1.0 } else { 2.0 });
        }
        assert!(gen_planted_maxcut(1, 4, 0).is_err());
        assert!(g.to_edge_list().starts_with(&format!("g 15 {}\n", g.edges.len())));
    }

    #[test]
    fn cut_plus_falsified_is_total() {
        let (g, f) = gen_planted_maxcut(2, 4, 11).unwrap();
        for mask in 0u64..256 {
            let a = DiscreteAssignment::from_mask(8, mask);
            let side: Vec<bool> = (0..8).map(|v| mask >> v & 1 == 1).collect();
            assert_eq!(g.cut_weight(&side) + count_unsat(&f, &a).1, g.total_weight());
        }
    }

    #[test]
    fn scores() {
        let costs: BTreeMap<String, f64> =
            [("A", 8.0), ("B", 10.0), ("C", 8.0)].map(|(k, v)| (k.to_string(), v)).into();
        assert_eq!(relative_score(&costs, "A"), Some(1.0));
        assert_eq!(relative_score(&costs, "B"), Some(1.0 / 3.0));
        assert_eq!(relative_score(&costs, "C"), Some(1.0));
        assert_eq!(relative_score(&costs, "D"), None);
        let one: BTreeMap<String, f64> = [("A".to_string(), 3.0)].into();
        assert_eq!(relative_score(&one, "A"), Some(1.0));
    }
}
