//! Dense linear assignment: shortest augmenting paths with row/column
//! potentials, O(n^3).
//!
//! After an optimum is found, the assignment is rewritten into the
//! lexicographically smallest optimal one. Every optimal assignment uses only
//! edges with zero reduced cost under the final potentials, so it suffices to
//! pick, row by row, the smallest tight column that still admits a perfect
//! matching of the remaining rows in the tight subgraph.

use alloc::vec;
use alloc::vec::Vec;

use super::cost::Cost;

/// Reduced costs within this distance of zero count as tight.
const TIGHT_TOL: f64 = 1e-9;

/// Optimal row-to-column assignment of an `n x n` cost function.
pub(crate) fn solve_assignment<F>(n: usize, cost: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> Cost,
{
    if n == 0 {
        return Vec::new();
    }
    let (row_to_col, u, v) = hungarian(n, &cost);
    let refined = lex_smallest(n, &cost, &u, &v, &row_to_col);
    let total = |a: &[usize]| -> Cost { a.iter().enumerate().map(|(i, &j)| cost(i, j)).sum() };
    let (base, lex) = (total(&row_to_col), total(&refined));
    // the refinement only moves along tight edges; guard against a tolerance
    // admitting an edge that is not actually tight
    if lex.saturated == base.saturated && lex.finite <= base.finite + TIGHT_TOL {
        refined
    } else {
        row_to_col
    }
}

/// Returns the assignment and the row and column potentials (0-based).
fn hungarian<F>(n: usize, cost: &F) -> (Vec<usize>, Vec<Cost>, Vec<Cost>)
where
    F: Fn(usize, usize) -> Cost,
{
    // 1-based internally; index 0 is the virtual source column
    let mut u = vec![Cost::ZERO; n + 1];
    let mut v = vec![Cost::ZERO; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![Cost::INFINITE; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = Cost::INFINITE;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

fn lex_smallest<F>(n: usize, cost: &F, u: &[Cost], v: &[Cost], start: &[usize]) -> Vec<usize>
where
    F: Fn(usize, usize) -> Cost,
{
    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let r = cost(i, j) - u[i] - v[j];
                    r.saturated == 0 && r.finite.abs() <= TIGHT_TOL
                })
                .collect()
        })
        .collect();
    let mut row_to_col = start.to_vec();
    let mut col_to_row = vec![0; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }
    // columns held by rows already fixed
    let mut fixed_col = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if fixed_col[j] || !tight[i][j] {
                continue;
            }
            if row_to_col[i] == j {
                break;
            }
            // row r gives up column j; look for an alternating path among the
            // unfixed rows that ends by freeing row i's current column
            let r = col_to_row[j];
            let target = row_to_col[i];
            let mut visited = vec![false; n];
            visited[j] = true;
            let mut path = Vec::new();
            if reroute(r, target, i, &tight, &fixed_col, &col_to_row, &mut visited, &mut path) {
                // path holds (row, new column) pairs
                row_to_col[i] = j;
                col_to_row[j] = i;
                for (row, col) in path {
                    row_to_col[row] = col;
                    col_to_row[col] = row;
                }
                break;
            }
        }
        fixed_col[row_to_col[i]] = true;
    }
    row_to_col
}

#[allow(clippy::too_many_arguments)]
fn reroute(
    row: usize,
    target: usize,
    skip_row: usize,
    tight: &[Vec<bool>],
    fixed_col: &[bool],
    col_to_row: &[usize],
    visited: &mut [bool],
    path: &mut Vec<(usize, usize)>,
) -> bool {
    for c in 0..tight.len() {
        if visited[c] || fixed_col[c] || !tight[row][c] {
            continue;
        }
        visited[c] = true;
        if c == target {
            path.push((row, c));
            return true;
        }
        let next = col_to_row[c];
        if next == skip_row {
            continue;
        }
        if reroute(next, target, skip_row, tight, fixed_col, col_to_row, visited, path) {
            path.push((row, c));
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from<'a>(rows: &'a [&'a [f64]]) -> impl Fn(usize, usize) -> Cost + 'a {
        move |i, j| Cost {
            saturated: 0,
            finite: rows[i][j],
        }
    }

    #[test]
    fn forced_assignments() {
        assert_eq!(solve_assignment(2, from(&[&[0.0, 5.0], &[5.0, 0.0]])), vec![0, 1]);
        assert_eq!(solve_assignment(2, from(&[&[1.0, 0.0], &[0.0, 1.0]])), vec![1, 0]);
        assert_eq!(solve_assignment(1, from(&[&[3.0]])), vec![0]);
        assert!(solve_assignment(0, from(&[])).is_empty());
    }

    #[test]
    fn ties_resolve_lexicographically() {
        // every permutation is optimal
        let flat: &[&[f64]] = &[&[1.0; 4], &[1.0; 4], &[1.0; 4], &[1.0; 4]];
        assert_eq!(solve_assignment(4, from(flat)), vec![0, 1, 2, 3]);
        // two optima: (0,1),(1,0),(2,2) and (0,0),(1,1),(2,2)... only when tied
        let m: &[&[f64]] = &[&[2.0, 1.0, 9.0], &[1.0, 2.0, 9.0], &[9.0, 9.0, 0.0]];
        assert_eq!(solve_assignment(3, from(m)), vec![1, 0, 2]);
        let tied: &[&[f64]] = &[&[1.0, 1.0, 9.0], &[1.0, 1.0, 9.0], &[9.0, 9.0, 0.0]];
        assert_eq!(solve_assignment(3, from(tied)), vec![0, 1, 2]);
    }

    #[test]
    fn saturated_tier_dominates() {
        let c = |i: usize, j: usize| -> Cost {
            if i == j {
                Cost {
                    saturated: 1,
                    finite: 0.0,
                }
            } else {
                Cost {
                    saturated: 0,
                    finite: 100.0,
                }
            }
        };
        let a = solve_assignment(3, c);
        assert!(a.iter().enumerate().all(|(i, &j)| i != j));
    }
}
