//! Independent brute-force references.
//!
//! These are used by tests as ground truth and by the honest prover's
//! certificate search. They share no code with the verification paths:
//! everything here is direct enumeration or a textbook algorithm on the
//! materialized graph.

use crate::gstream::Graph;
use std::collections::BTreeSet;

/// Exhaustive integral-dual search for weighted matchings (vertex weights
/// plus claws of nested odd sets achieving equality). Shared with the
/// honest prover's certificate generation.
pub use crate::matching::dual_search::find_duals as oracle_cm_duals;

/// O(n^3) triangle scan.
pub fn oracle_triangles(g: &Graph) -> u64 {
    let mut adj = vec![vec![false; g.n]; g.n];
    for &(i, j, _) in &g.edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let mut count = 0;
    for i in 0..g.n {
        for j in (i + 1)..g.n {
            if !adj[i][j] {
                continue;
            }
            for k in (j + 1)..g.n {
                if adj[i][k] && adj[j][k] {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Maximum cardinality matching with witness, by subset DP over vertices.
/// Exact for any graph, intended for n <= 20.
pub fn oracle_mcm(g: &Graph) -> (u64, Vec<(usize, usize)>) {
    let unit = Graph {
        n: g.n,
        edges: g.edges.iter().map(|&(i, j, _)| (i, j, 1)).collect(),
    };
    oracle_mwm(&unit)
}

/// Maximum weight matching with witness, by subset DP: `best[S]` is the
/// heaviest matching inside vertex set `S`. Deterministic, lexicographic
/// tie-break via iteration order.
pub fn oracle_mwm(g: &Graph) -> (u64, Vec<(usize, usize)>) {
    let n = g.n;
    assert!(n <= 22, "subset DP oracle is for desk-scale instances");
    let full = 1usize << n;
    let mut best = vec![0u64; full];
    let mut choice: Vec<Option<(usize, usize)>> = vec![None; full];
    for s in 1..full {
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        // leave i unmatched
        best[s] = best[rest];
        choice[s] = None;
        for &(a, b, w) in &g.edges {
            let (a, b) = (a.min(b), a.max(b));
            if a != i || s & (1 << b) == 0 {
                continue;
            }
            let sub = rest & !(1 << b);
            let cand = best[sub] + w;
            if cand > best[s] {
                best[s] = cand;
                choice[s] = Some((a, b));
            }
        }
    }
    let mut witness = Vec::new();
    let mut s = full - 1;
    while s != 0 {
        let i = s.trailing_zeros() as usize;
        match choice[s] {
            Some((a, b)) => {
                witness.push((a, b));
                s &= !(1 << a);
                s &= !(1 << b);
            }
            None => {
                s &= !(1 << i);
            }
        }
    }
    witness.sort_unstable();
    (best[full - 1], witness)
}

fn components_excluding(g: &Graph, excluded: usize) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n];
    let mut comps = Vec::new();
    for start in 0..g.n {
        if seen[start] || excluded & (1 << start) != 0 {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] && excluded & (1 << w) == 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Best Tutte-Berge separator: enumerates every vertex subset, counts odd
/// components of the remainder, and minimizes
/// `(|V| + |V_S| - odd(G - V_S)) / 2`. Returns the lexicographically first
/// minimizer as a sorted vertex list together with the bound.
pub fn oracle_tutte_berge(g: &Graph) -> (u64, Vec<usize>) {
    assert!(g.n <= 20);
    let mut best_bound = u64::MAX;
    let mut best_set = Vec::new();
    for mask in 0usize..(1 << g.n) {
        let comps = components_excluding(g, mask);
        let odd = comps.iter().filter(|c| c.len() % 2 == 1).count() as u64;
        let s = mask.count_ones() as u64;
        let value = g.n as u64 + s - odd;
        debug_assert_eq!(value % 2, 0);
        let bound = value / 2;
        if bound < best_bound {
            best_bound = bound;
            best_set = (0..g.n).filter(|v| mask & (1 << v) != 0).collect();
        }
    }
    (best_bound, best_set)
}

/// Connected components (union-find style reference).
pub fn oracle_components(g: &Graph) -> Vec<Vec<usize>> {
    components_excluding(g, 0)
}

/// Kruskal. Returns `None` for disconnected inputs.
pub fn oracle_mst(g: &Graph) -> Option<u64> {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut edges = g.edges.clone();
    edges.sort_unstable_by_key(|&(i, j, w)| (w, i, j));
    let mut total = 0u64;
    let mut joined = 0;
    for (i, j, w) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            total += w;
            joined += 1;
        }
    }
    if joined + 1 == g.n {
        Some(total)
    } else {
        None
    }
}

/// Held-Karp exact TSP over a complete weighted graph, n <= 12.
pub fn oracle_tsp(g: &Graph) -> u64 {
    let n = g.n;
    assert!(n <= 12);
    if n <= 2 {
        return g.edges.iter().map(|e| 2 * e.2).sum();
    }
    let w = |a: usize, b: usize| g.weight(a, b).expect("complete graph");
    let full = 1usize << (n - 1);
    let inf = u64::MAX / 4;
    // dp[s][v]: shortest path from vertex n-1 through set s ending at v
    let mut dp = vec![vec![inf; n - 1]; full];
    for v in 0..n - 1 {
        dp[1 << v][v] = w(n - 1, v);
    }
    for s in 1..full {
        for v in 0..n - 1 {
            if s & (1 << v) == 0 || dp[s][v] == inf {
                continue;
            }
            for u in 0..n - 1 {
                if s & (1 << u) != 0 {
                    continue;
                }
                let ns = s | (1 << u);
                let cand = dp[s][v] + w(v, u);
                if cand < dp[ns][u] {
                    dp[ns][u] = cand;
                }
            }
        }
    }
    (0..n - 1)
        .map(|v| dp[full - 1][v] + w(v, n - 1))
        .min()
        .unwrap()
}

/// Tests a sequence for 3-term arithmetic progressions among distinct
/// elements: `f(a) + f(b) != 2 f(c)`.
pub fn oracle_3ap_free(values: &[u64]) -> bool {
    let set: BTreeSet<u64> = values.iter().copied().collect();
    for (ai, &a) in values.iter().enumerate() {
        for &b in values.iter().skip(ai + 1) {
            if (a + b) % 2 != 0 {
                continue;
            }
            let mid = (a + b) / 2;
            if mid != a && mid != b && set.contains(&mid) {
                return false;
            }
        }
    }
    true
}

/// Exact minimum vertex cover size, for cross-checking König certificates.
pub fn oracle_min_vertex_cover(g: &Graph) -> u64 {
    assert!(g.n <= 20);
    let mut best = g.n as u64;
    for mask in 0usize..(1 << g.n) {
        if (mask.count_ones() as u64) >= best {
            continue;
        }
        if g.edges
            .iter()
            .all(|&(i, j, _)| mask & (1 << i) != 0 || mask & (1 << j) != 0)
        {
            best = mask.count_ones() as u64;
        }
    }
    best
}

/// 2-coloring reference for bipartiteness.
pub fn oracle_bipartite(g: &Graph) -> bool {
    let adj = g.adjacency();
    let mut color = vec![-1i8; g.n];
    for start in 0..g.n {
        if color[start] != -1 {
            continue;
        }
        color[start] = 0;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if color[w] == -1 {
                    color[w] = 1 - color[v];
                    stack.push(w);
                } else if color[w] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Set-intersection reference for disjointness.
pub fn oracle_disjoint(xs: &[usize], ys: &[usize]) -> bool {
    let set: BTreeSet<usize> = xs.iter().copied().collect();
    !ys.iter().any(|y| set.contains(y))
}
