use super::{Cost, EdgeId, GraphError, Network, VertexId};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Kruskal over all edges; ties are broken by edge id.
pub fn minimum_spanning_tree(network: &Network) -> Result<(Vec<EdgeId>, Cost), GraphError> {
    let (edges, cost) = spanning_forest(network, (0..network.edge_count()).collect());
    if network.vertex_count() > 0 && edges.len() + 1 != network.vertex_count() {
        return Err(GraphError::Disconnected);
    }
    Ok((edges, cost))
}

fn spanning_forest(network: &Network, mut candidates: Vec<EdgeId>) -> (Vec<EdgeId>, Cost) {
    candidates.sort_unstable_by_key(|&e| (network.edge(e).cost, e));
    let mut uf = UnionFind::new(network.vertex_count());
    let mut out = Vec::new();
    let mut cost = 0;
    for e in candidates {
        let edge = network.edge(e);
        if uf.union(edge.u, edge.v) {
            out.push(e);
            cost += edge.cost;
        }
    }
    (out, cost)
}

/// Prim on an implicit complete graph with `n` vertices. Returns the chosen
/// pairs and the total cost.
pub fn dense_mst(n: usize, cost: impl Fn(usize, usize) -> Cost) -> (Vec<(usize, usize)>, Cost) {
    if n <= 1 {
        return (Vec::new(), 0);
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![Cost::MAX; n];
    let mut from = vec![0usize; n];
    let mut pairs = Vec::with_capacity(n - 1);
    let mut total: Cost = 0;
    in_tree[0] = true;
    for j in 1..n {
        best[j] = cost(0, j);
    }
    for _ in 1..n {
        let mut pick = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (pick == usize::MAX || best[j] < best[pick]) {
                pick = j;
            }
        }
        in_tree[pick] = true;
        total = total.saturating_add(best[pick]);
        pairs.push((from[pick], pick));
        for j in 0..n {
            if !in_tree[j] {
                let c = cost(pick, j);
                if c < best[j] {
                    best[j] = c;
                    from[j] = pick;
                }
            }
        }
    }
    (pairs, total)
}

/// Turns an arbitrary edge set into a Steiner tree: keeps a minimum spanning
/// forest of it, then repeatedly strips leaves that are not in `keep`.
/// Returns `None` when the `keep` vertices are not all connected.
pub fn prune_to_steiner_tree(
    network: &Network,
    edges: impl IntoIterator<Item = EdgeId>,
    keep: &[VertexId],
) -> Option<Vec<EdgeId>> {
    let mut candidates: Vec<EdgeId> = edges.into_iter().collect();
    candidates.sort_unstable();
    candidates.dedup();
    let (forest, _) = spanning_forest(network, candidates);

    let n = network.vertex_count();
    let mut keep_flag = vec![false; n];
    for &k in keep {
        keep_flag[k] = true;
    }
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &e in &forest {
        let edge = network.edge(e);
        incident[edge.u].push(e);
        incident[edge.v].push(e);
    }
    let mut alive = vec![false; network.edge_count()];
    for &e in &forest {
        alive[e] = true;
    }
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut stack: Vec<VertexId> = (0..n).filter(|&v| degree[v] == 1 && !keep_flag[v]).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let Some(&e) = incident[v].iter().find(|&&e| alive[e]) else {
            continue;
        };
        alive[e] = false;
        degree[v] = 0;
        let w = network.edge(e).other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !keep_flag[w] {
            stack.push(w);
        }
    }
    let result: Vec<EdgeId> = forest.into_iter().filter(|&e| alive[e]).collect();

    let mut uf = UnionFind::new(n);
    for &e in &result {
        let edge = network.edge(e);
        uf.union(edge.u, edge.v);
    }
    if let Some((&first, rest)) = keep.split_first() {
        let anchor = uf.find(first);
        if rest.iter().any(|&k| uf.find(k) != anchor) {
            return None;
        }
        // anything left that is not attached to the kept component is a stray piece
        let result = result
            .into_iter()
            .filter(|&e| uf.find(network.edge(e).u) == anchor)
            .collect();
        return Some(result);
    }
    Some(result)
}
