use std::collections::VecDeque;

use crate::scalar::Real;

use super::CsrMatrix;

fn bfs_levels(
    adj: &[Vec<usize>],
    start: usize,
    visited_base: &[bool],
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut seen = visited_base.to_vec();
    let mut levels = vec![vec![start]];
    let mut order = vec![start];
    seen[start] = true;
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        order.extend_from_slice(&next);
        levels.push(next);
    }
    (levels, order)
}

/// Reverse Cuthill-McKee ordering of the symmetric sparsity graph of `a`.
/// Returns `perm` with `perm[new] = old`. Each connected component starts
/// from a pseudo-peripheral node (George-Liu); ties break on lowest index.
pub fn reverse_cuthill_mckee<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        for &c in a.row_indices(r) {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for row in adj.iter_mut() {
        row.sort_unstable();
        row.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral node search
        let mut root = seed;
        let (mut levels, _) = bfs_levels(&adj, root, &visited);
        loop {
            let last = levels.last().unwrap();
            let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            let (cand_levels, _) = bfs_levels(&adj, cand, &visited);
            if cand_levels.len() > levels.len() {
                root = cand;
                levels = cand_levels;
            } else {
                break;
            }
        }

        let mut queue = VecDeque::new();
        let start = perm.len();
        queue.push_back(root);
        visited[root] = true;
        while let Some(u) = queue.pop_front() {
            perm.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
        perm[start..].reverse();
    }
    perm
}
