//! Exhaustive reference solver for small graphs.
//!
//! Enumerates every member of the constraint class directly from the weight
//! matrix; it shares no code with the assignment solver. Intended for tests
//! and for cross-checking solver output on small bi-sentences.

use alloc::vec;
use alloc::vec::Vec;

use super::cost::Cost;
use super::{AlignmentGraph, ConstraintClass, Padding, SemanticAlignment};
use crate::error::{Error, Result};

/// Largest `|U_s| * |U_t|` the oracle accepts.
pub const ORACLE_CELL_LIMIT: usize = 30;

const TIE_TOL: f64 = 1e-12;

fn better(candidate: &Cost, best: &Option<Cost>) -> bool {
    match best {
        None => true,
        Some(b) => {
            candidate.saturated < b.saturated
                || (candidate.saturated == b.saturated && candidate.finite < b.finite - TIE_TOL)
        }
    }
}

fn tied(candidate: &Cost, best: &Cost) -> bool {
    candidate.approx_eq(best, TIE_TOL)
}

/// A minimum-cost member of `class` found by enumeration.
pub fn brute_force_optimum(g: &AlignmentGraph, class: ConstraintClass) -> Result<SemanticAlignment> {
    let cells = g.n_src_real() * g.n_tgt_real();
    if cells > ORACLE_CELL_LIMIT {
        return Err(Error::OracleRefused {
            cells,
            limit: ORACLE_CELL_LIMIT,
        });
    }
    let positions = match class {
        ConstraintClass::Perfect => perfect(g),
        ConstraintClass::EdgeCover => edge_cover(g),
        ConstraintClass::Total => total(g),
        ConstraintClass::Word => return Err(Error::Config("the oracle does not cover word alignments".into())),
    };
    Ok(g.alignment_from(positions, class))
}

/// Injections of the smaller real side into the larger one; leftover nodes
/// of the larger side go to empty nodes in order.
fn perfect(g: &AlignmentGraph) -> Vec<(usize, usize)> {
    let (ns, nt) = (g.n_src_real(), g.n_tgt_real());
    let src_small = ns <= nt;
    let (small, large) = if src_small { (ns, nt) } else { (nt, ns) };
    let cell = |a: usize, b: usize| if src_small { g.cell(a, b) } else { g.cell(b, a) };
    let pair = |a: usize, b: usize| if src_small { (a, b) } else { (b, a) };
    let padded = !matches!(g.padding(), Padding::None);

    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut chosen = Vec::with_capacity(small);
    let mut used = vec![false; large];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        a: usize,
        small: usize,
        large: usize,
        partial: Cost,
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        cell: &dyn Fn(usize, usize) -> Cost,
        leftover: &dyn Fn(&[bool]) -> Cost,
        best: &mut Option<(Cost, Vec<usize>)>,
    ) {
        if a == small {
            let total = partial + leftover(used);
            if better(&total, &best.as_ref().map(|b| b.0)) {
                *best = Some((total, chosen.clone()));
            }
            return;
        }
        for b in 0..large {
            if used[b] {
                continue;
            }
            used[b] = true;
            chosen.push(b);
            rec(
                a + 1,
                small,
                large,
                partial + cell(a, b),
                chosen,
                used,
                cell,
                leftover,
                best,
            );
            chosen.pop();
            used[b] = false;
        }
    }
    // cost of sending each unused large-side node to its own empty node
    let leftover = |used: &[bool]| -> Cost {
        let mut k = small;
        let mut c = Cost::ZERO;
        for (b, &u) in used.iter().enumerate() {
            if !u {
                c += if padded {
                    if src_small {
                        g.cell(k, b)
                    } else {
                        g.cell(b, k)
                    }
                } else {
                    Cost::ZERO
                };
                k += 1;
            }
        }
        c
    };
    rec(
        0,
        small,
        large,
        Cost::ZERO,
        &mut chosen,
        &mut used,
        &cell,
        &leftover,
        &mut best,
    );
    let (_, chosen) = best.expect("at least one injection exists");
    let mut positions: Vec<(usize, usize)> = chosen.iter().enumerate().map(|(a, &b)| pair(a, b)).collect();
    if padded {
        let mut used = vec![false; large];
        for &b in &chosen {
            used[b] = true;
        }
        let mut k = small;
        for (b, u) in used.into_iter().enumerate() {
            if !u {
                positions.push(pair(k, b));
                k += 1;
            }
        }
    }
    positions
}

/// Every function from source units to target units.
fn total(g: &AlignmentGraph) -> Vec<(usize, usize)> {
    let (ns, nt) = (g.n_src_real(), g.n_tgt_real());
    let mut choice = vec![0usize; ns];
    let mut best: Option<(Cost, Vec<usize>)> = None;
    loop {
        let c: Cost = choice.iter().enumerate().map(|(i, &j)| g.cell(i, j)).sum();
        if better(&c, &best.as_ref().map(|b| b.0)) {
            best = Some((c, choice.clone()));
        }
        // odometer, last source fastest, so functions come in lexicographic order
        let mut k = ns;
        loop {
            if k == 0 {
                let (_, choice) = best.expect("non-empty enumeration");
                return choice.into_iter().enumerate().collect();
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < nt {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn min_cost(costs: impl Iterator<Item = Cost>) -> Option<Cost> {
    costs.fold(None, |m, c| match m {
        Some(m) if m <= c => Some(m),
        _ => Some(c),
    })
}

struct CoverSearch<'a> {
    g: &'a AlignmentGraph,
    ns: usize,
    nt: usize,
    row_deg: Vec<usize>,
    col_deg: Vec<usize>,
    chosen: Vec<(usize, usize)>,
    best: Option<(Cost, Vec<(usize, usize)>)>,
}

impl CoverSearch<'_> {
    /// Lower bound on the cost still needed to cover every node, given that
    /// cells before `k` (row-major) are decided.
    fn bound(&self, k: usize) -> Cost {
        let (ns, nt) = (self.ns, self.nt);
        let mut rows = Cost::ZERO;
        for i in 0..ns {
            if self.row_deg[i] > 0 {
                continue;
            }
            let first = if i == k / nt {
                k % nt
            } else if i > k / nt {
                0
            } else {
                nt
            };
            let m = min_cost((first..nt).map(|j| self.g.cell(i, j)));
            match m {
                Some(m) => rows += m,
                None => return Cost::INFINITE,
            }
        }
        let mut cols = Cost::ZERO;
        for j in 0..nt {
            if self.col_deg[j] > 0 {
                continue;
            }
            let first = if j >= k % nt { k / nt } else { k / nt + 1 };
            let m = min_cost((first..ns).map(|i| self.g.cell(i, j)));
            match m {
                Some(m) => cols += m,
                None => return Cost::INFINITE,
            }
        }
        if rows < cols {
            cols
        } else {
            rows
        }
    }

    fn run(&mut self, k: usize, partial: Cost) {
        let rest = self.bound(k);
        if rest.saturated >= Cost::INFINITE.saturated {
            return;
        }
        if let Some((b, _)) = &self.best {
            let lb = partial + rest;
            if lb.saturated > b.saturated || (lb.saturated == b.saturated && lb.finite > b.finite + TIE_TOL) {
                return;
            }
        }
        if k == self.ns * self.nt {
            if self.row_deg.contains(&0) || self.col_deg.contains(&0) {
                return;
            }
            let replace = match &self.best {
                None => true,
                Some((b, links)) => {
                    better(&partial, &Some(*b))
                        || (tied(&partial, b)
                            && (self.chosen.len() < links.len()
                                || (self.chosen.len() == links.len() && self.chosen < *links)))
                }
            };
            if replace {
                self.best = Some((partial, self.chosen.clone()));
            }
            return;
        }
        let (i, j) = (k / self.nt, k % self.nt);
        // leave the cell out first
        self.run(k + 1, partial);
        self.row_deg[i] += 1;
        self.col_deg[j] += 1;
        self.chosen.push((i, j));
        self.run(k + 1, partial + self.g.cell(i, j));
        self.chosen.pop();
        self.row_deg[i] -= 1;
        self.col_deg[j] -= 1;
    }
}

/// Every subset of cells that covers all nodes, with bound-based pruning.
/// Ties prefer fewer links, then the lexicographically smaller set.
fn edge_cover(g: &AlignmentGraph) -> Vec<(usize, usize)> {
    let (ns, nt) = (g.n_src_real(), g.n_tgt_real());
    let mut search = CoverSearch {
        g,
        ns,
        nt,
        row_deg: vec![0; ns],
        col_deg: vec![0; nt],
        chosen: Vec::new(),
        best: None,
    };
    search.run(0, Cost::ZERO);
    search.best.expect("the full edge set is a cover").1
}
