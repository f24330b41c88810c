//! Optimal semantic alignments as minimum-weight bipartite subgraphs.
//!
//! Three admissible classes are supported: perfect matchings (after padding
//! the smaller partition with empty nodes), edge covers, and total
//! alignments. Each solver returns the lexicographically smallest optimal
//! link set where that is cheap to guarantee (perfect, total); the edge cover
//! solver is deterministic and never returns a many-to-many link.

mod brute;
mod cost;
mod lap;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

pub use brute::{brute_force_optimum, ORACLE_CELL_LIMIT};
pub use cost::Cost;

use crate::error::{Error, Result};
use crate::similarity::{to_weights, weight_of, SimilarityMatrix, WeightMatrix};

/// Unit id used for empty padding nodes.
pub const EMPTY_UNIT: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintClass {
    Perfect,
    EdgeCover,
    Total,
    /// Word alignment links taken as-is.
    Word,
}

impl ConstraintClass {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintClass::Perfect => "perfect",
            ConstraintClass::EdgeCover => "edgecover",
            ConstraintClass::Total => "total",
            ConstraintClass::Word => "word",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    None,
    /// Number of empty nodes appended to the source partition.
    Src(usize),
    /// Number of empty nodes appended to the target partition.
    Tgt(usize),
}

/// Complete weighted bipartite graph between source and target units.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentGraph {
    sims: SimilarityMatrix,
    weights: WeightMatrix,
    n_src_real: usize,
    n_tgt_real: usize,
    padding: Padding,
}

pub fn build_graph(m: &SimilarityMatrix, big: f64, for_class: ConstraintClass) -> Result<AlignmentGraph> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Degenerate(format!(
            "bipartite graph with an empty partition ({}x{})",
            m.rows(),
            m.cols()
        )));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let (sims, padding) = if for_class == ConstraintClass::Perfect && rows != cols {
        let n = rows.max(cols);
        let mut src = m.src_units().to_vec();
        let mut tgt = m.tgt_units().to_vec();
        src.resize(n, EMPTY_UNIT);
        tgt.resize(n, EMPTY_UNIT);
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| if i < rows && j < cols { m.get(i, j) } else { 0.0 })
            .collect();
        let padding = if rows < cols {
            Padding::Src(cols - rows)
        } else {
            Padding::Tgt(rows - cols)
        };
        (SimilarityMatrix::new(src, tgt, values)?, padding)
    } else {
        (m.clone(), Padding::None)
    };
    let weights = to_weights(&sims, big)?;
    Ok(AlignmentGraph {
        sims,
        weights,
        n_src_real: rows,
        n_tgt_real: cols,
        padding,
    })
}

impl AlignmentGraph {
    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn sims(&self) -> &SimilarityMatrix {
        &self.sims
    }

    pub fn n_src_real(&self) -> usize {
        self.n_src_real
    }

    pub fn n_tgt_real(&self) -> usize {
        self.n_tgt_real
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    pub fn big(&self) -> f64 {
        self.weights.big()
    }

    pub(crate) fn cell(&self, i: usize, j: usize) -> Cost {
        Cost::of_weight(self.weights.get(i, j), self.big())
    }

    fn is_real(&self, i: usize, j: usize) -> bool {
        i < self.n_src_real && j < self.n_tgt_real
    }

    /// Build an alignment from matrix positions; padding positions count
    /// towards the cost but are stripped from the links.
    pub(crate) fn alignment_from(
        &self,
        mut positions: Vec<(usize, usize)>,
        class: ConstraintClass,
    ) -> SemanticAlignment {
        positions.sort_unstable();
        positions.dedup();
        let cost = positions.iter().map(|&(i, j)| self.cell(i, j)).sum();
        let links = positions
            .into_iter()
            .filter(|&(i, j)| self.is_real(i, j))
            .map(|(i, j)| Link {
                src: self.sims.src_units()[i],
                tgt: self.sims.tgt_units()[j],
                sim: self.sims.get(i, j),
                weight: self.weights.get(i, j),
            })
            .collect();
        SemanticAlignment {
            links,
            class,
            cost,
            src_units: self.sims.src_units()[..self.n_src_real].to_vec(),
            tgt_units: self.sims.tgt_units()[..self.n_tgt_real].to_vec(),
        }
    }

    /// Weight matrix as TSV; chosen cells carry a trailing `*`.
    pub fn debug_table(&self, chosen: &SemanticAlignment) -> String {
        let mut out = String::from("src\\tgt");
        for &t in &self.weights.tgt_units()[..self.n_tgt_real] {
            let _ = write!(out, "\t{t}");
        }
        out.push('\n');
        for i in 0..self.n_src_real {
            let s = self.weights.src_units()[i];
            let _ = write!(out, "{s}");
            for j in 0..self.n_tgt_real {
                let t = self.weights.tgt_units()[j];
                let mark = if chosen.contains(s, t) { "*" } else { "" };
                let _ = write!(out, "\t{:.6}{mark}", self.weights.get(i, j));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub src: usize,
    pub tgt: usize,
    pub sim: f64,
    pub weight: f64,
}

impl Link {
    /// Zero-similarity links may be forced by degree constraints; projection drops them.
    pub fn is_zero_sim(&self) -> bool {
        self.sim == 0.0
    }
}

/// A set of links between source and target units, sorted by `(src, tgt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticAlignment {
    pub links: Vec<Link>,
    pub class: ConstraintClass,
    /// Cost of the full solution, including links to empty nodes.
    pub cost: Cost,
    pub src_units: Vec<usize>,
    pub tgt_units: Vec<usize>,
}

impl SemanticAlignment {
    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.links.iter().any(|l| l.src == src && l.tgt == tgt)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.links.iter().map(|l| (l.src, l.tgt)).collect()
    }

    pub fn targets_of(&self, src: usize) -> impl Iterator<Item = &Link> + '_ {
        self.links.iter().filter(move |l| l.src == src)
    }

    pub fn src_degrees(&self) -> BTreeMap<usize, usize> {
        degrees(self.src_units.iter().copied(), self.links.iter().map(|l| l.src))
    }

    pub fn tgt_degrees(&self) -> BTreeMap<usize, usize> {
        degrees(self.tgt_units.iter().copied(), self.links.iter().map(|l| l.tgt))
    }

    /// Links whose endpoints both have degree at least two.
    pub fn many_to_many_links(&self) -> Vec<Link> {
        let (sd, td) = (self.src_degrees(), self.tgt_degrees());
        self.links
            .iter()
            .filter(|l| sd[&l.src] >= 2 && td[&l.tgt] >= 2)
            .copied()
            .collect()
    }

    /// Whether the degree constraints of `self.class` hold.
    pub fn satisfies_class(&self) -> bool {
        let (sd, td) = (self.src_degrees(), self.tgt_degrees());
        match self.class {
            ConstraintClass::Perfect => sd.values().all(|&d| d <= 1) && td.values().all(|&d| d <= 1),
            ConstraintClass::EdgeCover => sd.values().all(|&d| d >= 1) && td.values().all(|&d| d >= 1),
            ConstraintClass::Total => sd.values().all(|&d| d == 1),
            ConstraintClass::Word => true,
        }
    }

    pub fn without_zero_sim(&self) -> SemanticAlignment {
        SemanticAlignment {
            links: self.links.iter().filter(|l| !l.is_zero_sim()).copied().collect(),
            ..self.clone()
        }
    }
}

fn degrees(units: impl Iterator<Item = usize>, ends: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut d: BTreeMap<usize, usize> = units.map(|u| (u, 0)).collect();
    for e in ends {
        *d.entry(e).or_insert(0) += 1;
    }
    d
}

/// Minimum-weight bijection between the (padded) partitions.
pub fn solve_perfect_matching(g: &AlignmentGraph) -> SemanticAlignment {
    let n = g.weights.rows();
    debug_assert_eq!(n, g.weights.cols(), "perfect matching needs a square graph");
    let assignment = lap::solve_assignment(n, |i, j| g.cell(i, j));
    g.alignment_from(assignment.into_iter().enumerate().collect(), ConstraintClass::Perfect)
}

/// Cheapest incident edge of source row `i`, lowest column on ties.
fn row_min(g: &AlignmentGraph, i: usize) -> (usize, Cost) {
    let mut best = (0, g.cell(i, 0));
    for j in 1..g.n_tgt_real {
        let c = g.cell(i, j);
        if c < best.1 {
            best = (j, c);
        }
    }
    best
}

fn col_min(g: &AlignmentGraph, j: usize) -> (usize, Cost) {
    let mut best = (0, g.cell(0, j));
    for i in 1..g.n_src_real {
        let c = g.cell(i, j);
        if c < best.1 {
            best = (i, c);
        }
    }
    best
}

/// Minimum-weight edge cover via a perfect matching on an auxiliary graph.
///
/// The auxiliary instance has rows `U_s ∪ U_t'` and columns `U_t ∪ U_s'`
/// (primed nodes are mirror copies). Original cells keep their weight in
/// both the `(s, t)` and mirrored `(t', s')` blocks; `(s, s')` and `(t', t)`
/// cost twice the node's cheapest incident edge; everything else is
/// forbidden. An optimal matching costs twice an optimal cover. The cover is
/// read off the `(s, t)` block plus the cheapest edge of every node matched
/// to its own mirror.
pub fn solve_edge_cover(g: &AlignmentGraph) -> SemanticAlignment {
    let (ns, nt) = (g.n_src_real, g.n_tgt_real);
    let n = ns + nt;
    let src_min: Vec<(usize, Cost)> = (0..ns).map(|i| row_min(g, i)).collect();
    let tgt_min: Vec<(usize, Cost)> = (0..nt).map(|j| col_min(g, j)).collect();
    let forbidden = Cost {
        saturated: 4 * (n as i64 + 1),
        finite: 0.0,
    };
    let aux = |r: usize, c: usize| -> Cost {
        match (r < ns, c < nt) {
            (true, true) => g.cell(r, c),
            (false, false) => g.cell(c - nt, r - ns),
            (true, false) if c - nt == r => src_min[r].1.scale(2),
            (false, true) if r - ns == c => tgt_min[c].1.scale(2),
            _ => forbidden,
        }
    };
    let assignment = lap::solve_assignment(n, aux);
    let mut positions = Vec::new();
    for (r, &c) in assignment.iter().enumerate() {
        match (r < ns, c < nt) {
            (true, true) => positions.push((r, c)),
            (true, false) => positions.push((r, src_min[r].0)),
            (false, true) => positions.push((tgt_min[c].0, c)),
            (false, false) => {}
        }
    }
    positions.sort_unstable();
    positions.dedup();
    prune_many_to_many(g, &mut positions);
    g.alignment_from(positions, ConstraintClass::EdgeCover)
}

/// Drop links whose endpoints are both covered twice, heaviest first. With
/// non-negative weights this never raises the cost and keeps a cover.
pub(crate) fn prune_many_to_many(g: &AlignmentGraph, positions: &mut Vec<(usize, usize)>) {
    loop {
        let mut row_deg = alloc::vec![0usize; g.weights.rows()];
        let mut col_deg = alloc::vec![0usize; g.weights.cols()];
        for &(i, j) in positions.iter() {
            row_deg[i] += 1;
            col_deg[j] += 1;
        }
        let worst = positions
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| row_deg[i] >= 2 && col_deg[j] >= 2)
            .max_by(|(_, &a), (_, &b)| {
                g.cell(a.0, a.1)
                    .partial_cmp(&g.cell(b.0, b.1))
                    .unwrap_or(core::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            })
            .map(|(k, _)| k);
        match worst {
            Some(k) => {
                positions.remove(k);
            }
            None => break,
        }
    }
}

/// Each source unit linked to its most similar target unit, lowest index on ties.
pub fn solve_total(g: &AlignmentGraph) -> SemanticAlignment {
    let positions = (0..g.n_src_real).map(|i| (i, row_min(g, i).0)).collect();
    g.alignment_from(positions, ConstraintClass::Total)
}

/// Dispatch on `class`.
pub fn solve(g: &AlignmentGraph, class: ConstraintClass) -> Result<SemanticAlignment> {
    match class {
        ConstraintClass::Perfect => {
            if g.weights.rows() != g.weights.cols() {
                return Err(Error::Config("perfect matching needs a padded (square) graph".into()));
            }
            Ok(solve_perfect_matching(g))
        }
        ConstraintClass::EdgeCover => Ok(solve_edge_cover(g)),
        ConstraintClass::Total => Ok(solve_total(g)),
        ConstraintClass::Word => Err(Error::Config("word alignments are not solved on a graph".into())),
    }
}

/// Convenience: similarity matrix straight to an optimal alignment.
pub fn align(m: &SimilarityMatrix, big: f64, class: ConstraintClass) -> Result<SemanticAlignment> {
    solve(&build_graph(m, big, class)?, class)
}

/// Sum of `min(-ln sim, big)` over the links, split into saturated and finite parts.
pub fn cost_of_links(links: &[Link], big: f64) -> Cost {
    links.iter().map(|l| Cost::of_weight(weight_of(l.sim, big), big)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn weights_graph(rows: &[Vec<f64>], class: ConstraintClass) -> AlignmentGraph {
        // encode weights as similarities e^-w so the graph reproduces them
        let sims: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&w| libm::exp(-w)).collect())
            .collect();
        build_graph(&SimilarityMatrix::from_rows(&sims).unwrap(), 1e6, class).unwrap()
    }

    #[test]
    fn padding_shapes() {
        let m = SimilarityMatrix::from_rows(&vec![vec![0.5; 4]; 6]).unwrap();
        let g = build_graph(&m, 1e6, ConstraintClass::Perfect).unwrap();
        assert_eq!((g.weights().rows(), g.weights().cols()), (6, 6));
        assert_eq!(g.padding(), Padding::Tgt(2));
        for i in 0..6 {
            assert_eq!(g.weights().get(i, 4), 1e6);
            assert_eq!(g.weights().get(i, 5), 1e6);
        }
        let sq = SimilarityMatrix::from_rows(&vec![vec![0.5; 4]; 4]).unwrap();
        assert_eq!(
            build_graph(&sq, 1e6, ConstraintClass::Perfect).unwrap().padding(),
            Padding::None
        );
        let wide = SimilarityMatrix::from_rows(&vec![vec![0.5; 5]; 3]).unwrap();
        let g = build_graph(&wide, 1e6, ConstraintClass::EdgeCover).unwrap();
        assert_eq!((g.weights().rows(), g.weights().cols()), (3, 5));
        let empty = SimilarityMatrix::from_rows(&[]).unwrap();
        assert!(matches!(
            build_graph(&empty, 1e6, ConstraintClass::Total),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn perfect_small() {
        let g = weights_graph(&[vec![0.0, 5.0], vec![5.0, 0.0]], ConstraintClass::Perfect);
        let a = solve_perfect_matching(&g);
        assert_eq!(a.pairs(), vec![(0, 0), (1, 1)]);
        assert!(a.cost.approx_eq(&Cost::ZERO, 1e-9));
        let g = weights_graph(&[vec![1.0, 0.0], vec![0.0, 1.0]], ConstraintClass::Perfect);
        assert_eq!(solve_perfect_matching(&g).pairs(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn perfect_strips_padding() {
        let m = SimilarityMatrix::from_rows(&[vec![0.9], vec![0.1], vec![0.2]]).unwrap();
        let a = align(&m, 1e6, ConstraintClass::Perfect).unwrap();
        assert_eq!(a.pairs(), vec![(0, 0)]);
        assert_eq!(a.cost.saturated, 2);
        assert!(a.satisfies_class());
    }

    #[test]
    fn edge_cover_three_by_two() {
        let g = weights_graph(
            &[vec![1.0, 10.0], vec![10.0, 1.0], vec![1.0, 10.0]],
            ConstraintClass::EdgeCover,
        );
        let a = solve_edge_cover(&g);
        assert_eq!(a.pairs(), vec![(0, 0), (1, 1), (2, 0)]);
        assert!((a.cost.finite - 3.0).abs() < 1e-9);
        assert!(a.satisfies_class());
        assert!(a.many_to_many_links().is_empty());
    }

    #[test]
    fn edge_cover_single_row() {
        let g = weights_graph(&[vec![0.5, 1.5, 2.0]], ConstraintClass::EdgeCover);
        let a = solve_edge_cover(&g);
        assert_eq!(a.pairs(), vec![(0, 0), (0, 1), (0, 2)]);
        assert!((a.cost.finite - 4.0).abs() < 1e-9);
    }

    #[test]
    fn total_row_argmax() {
        let m = SimilarityMatrix::from_rows(&[vec![0.9, 0.1], vec![0.8, 0.2]]).unwrap();
        let a = align(&m, 1e6, ConstraintClass::Total).unwrap();
        assert_eq!(a.pairs(), vec![(0, 0), (1, 0)]);
        assert_eq!(a.tgt_degrees()[&1], 0);
        let zero = SimilarityMatrix::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let a = align(&zero, 1e6, ConstraintClass::Total).unwrap();
        assert_eq!(a.pairs(), vec![(0, 0)]);
        assert!(a.links[0].is_zero_sim());
        assert!(a.without_zero_sim().links.is_empty());
    }

    #[test]
    fn total_many_to_one() {
        // sources 2..=5 all prefer target 3; targets 0 and 2 stay unaligned
        let mut rows = vec![vec![0.1; 4]; 6];
        rows[0][1] = 0.9;
        rows[1][1] = 0.8;
        for r in rows.iter_mut().skip(2) {
            r[3] = 0.7;
        }
        let m = SimilarityMatrix::from_rows(&rows).unwrap();
        let a = align(&m, 1e6, ConstraintClass::Total).unwrap();
        assert_eq!(a.pairs(), vec![(0, 1), (1, 1), (2, 3), (3, 3), (4, 3), (5, 3)]);
        let td = a.tgt_degrees();
        assert_eq!((td[&0], td[&2]), (0, 0));
    }

    #[test]
    fn debug_table_marks_chosen() {
        let g = weights_graph(&[vec![0.0, 5.0], vec![5.0, 0.0]], ConstraintClass::Perfect);
        let a = solve_perfect_matching(&g);
        let t = g.debug_table(&a);
        assert_eq!(t.lines().count(), 3);
        assert!(t.lines().nth(1).unwrap().ends_with("0.000000*\t5.000000"));
    }
}
