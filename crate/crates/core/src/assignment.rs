//! Dense linear assignment (Hungarian method with potentials).

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `(cost, assignment)` where row `r` is matched to column
/// `assignment[r]`. Runs in O(k^3).
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let k = cost.len();
    if k == 0 {
        return (0.0, Vec::new());
    }
    // 1-based potentials; column 0 is a sentinel.
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut matched_row = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        matched_row[0] = row;
        let mut col0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[col0] = true;
            let r0 = matched_row[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=k {
                if used[col] {
                    continue;
                }
                let slack = cost[r0 - 1][col - 1] - u[r0] - v[col];
                if slack < min_slack[col] {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=k {
                if used[col] {
                    u[matched_row[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if matched_row[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            matched_row[col0] = matched_row[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; k];
    for col in 1..=k {
        assignment[matched_row[col] - 1] = col - 1;
    }
    let total = assignment.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
    (total, assignment)
}

/// Optimal assignment that is lexicographically smallest among all optima,
/// where costs within `tol` of the optimum count as ties.
pub fn lexicographic_min_assignment(cost: &[Vec<f64>], tol: f64) -> (f64, Vec<usize>) {
    let k = cost.len();
    let (best, _) = min_cost_assignment(cost);
    let mut fixed: Vec<usize> = Vec::with_capacity(k);
    let mut fixed_cost = 0.0;
    for row in 0..k {
        let free_cols: Vec<usize> = (0..k).filter(|c| !fixed.contains(c)).collect();
        let mut chosen = None;
        for &col in &free_cols {
            let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&c| c != col).collect();
            let sub: Vec<Vec<f64>> = ((row + 1)..k)
                .map(|r| rest_cols.iter().map(|&c| cost[r][c]).collect())
                .collect();
            let (rest, _) = min_cost_assignment(&sub);
            if fixed_cost + cost[row][col] + rest <= best + tol {
                chosen = Some(col);
                break;
            }
        }
        // The optimum is always reachable from a feasible prefix; the fallback
        // only guards against tolerance misuse.
        let col = chosen.unwrap_or(free_cols[0]);
        fixed_cost += cost[row][col];
        fixed.push(col);
    }
    (fixed_cost, fixed)
}
