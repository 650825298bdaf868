//! Primal and dual graphs of a matrix, treedepth decompositions read off a
//! block structure, and an exact treedepth search for tiny graphs.

use std::collections::BTreeSet;

use crate::blockmat::{multistage_layout, validate_profile, BlockKind, BlockProfile, IntMatrix, StageNode};
use crate::error::{Error, Result};

/// Largest vertex count [`exact_treedepth`] accepts.
pub const EXACT_TREEDEPTH_LIMIT: usize = 10;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) leaves the vertex range 0..{n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

/// Rooted forest given by parent pointers; roots have no parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdDecomposition {
    parent: Vec<Option<usize>>,
}

impl TdDecomposition {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if let Some(v) = parent.iter().flatten().find(|&&p| p >= n) {
            return Err(Error::InvalidParameter(format!("parent {v} out of range 0..{n}")));
        }
        let td = TdDecomposition { parent };
        for v in 0..n {
            let mut steps = 0;
            let mut cur = v;
            while let Some(p) = td.parent[cur] {
                cur = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidParameter(format!(
                        "parent pointers through vertex {v} form a cycle"
                    )));
                }
            }
        }
        Ok(td)
    }

    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Vertices on the path from `v` up to its root, `v` included.
    pub fn depth(&self, v: usize) -> usize {
        std::iter::successors(Some(v), |&u| self.parent[u]).count()
    }

    /// Largest number of vertices on a root-to-leaf path.
    pub fn height(&self) -> usize {
        (0..self.parent.len()).map(|v| self.depth(v)).max().unwrap_or(0)
    }

    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        std::iter::successors(Some(v), |&u| self.parent[u]).any(|u| u == a)
    }
}

/// Columns are vertices; two columns are adjacent when some row is nonzero
/// in both.
pub fn primal_graph(a: &IntMatrix) -> Graph {
    let mut edges = BTreeSet::new();
    for row in a.row_entries() {
        for (k, (u, _)) in row.iter().enumerate() {
            for (v, _) in &row[k + 1..] {
                edges.insert((*u, *v));
            }
        }
    }
    Graph { n: a.cols(), edges }
}

/// Rows are vertices; the primal graph of the transpose.
pub fn dual_graph(a: &IntMatrix) -> Graph {
    primal_graph(&a.transpose())
}

/// Decomposition following the block structure: a path through the
/// first-stage columns, below it one subtree per diagonal block built the
/// same way. For tree-fold profiles the vertices are rows and the result
/// decomposes the dual graph. The height is at most the sum of the stage
/// sizes.
pub fn td_decomposition_from_profile(a: &IntMatrix, profile: &BlockProfile) -> Result<TdDecomposition> {
    if !validate_profile(a, profile)? {
        return Err(Error::Validation(format!("matrix does not have the {profile} structure")));
    }
    let m = match profile.kind() {
        BlockKind::MultiStage => a.clone(),
        BlockKind::TreeFold => a.transpose(),
    };
    let layout = multistage_layout(&m, profile.sigma())?.expect("validated above");
    let mut parent = vec![None; m.cols()];
    attach(&layout, None, &mut parent);
    TdDecomposition::new(parent)
}

fn attach(node: &StageNode, anchor: Option<usize>, parent: &mut [Option<usize>]) {
    let mut last = anchor;
    for &v in &node.head {
        parent[v] = last;
        last = Some(v);
    }
    for child in &node.children {
        attach(child, last, parent);
    }
}

/// Whether every edge joins a vertex to one of its ancestors.
pub fn validate_td(g: &Graph, td: &TdDecomposition) -> Result<bool> {
    if g.vertex_count() != td.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices, decomposition has {}",
            g.vertex_count(),
            td.vertex_count()
        )));
    }
    Ok(g.edges().all(|(u, v)| td.is_ancestor(u, v) || td.is_ancestor(v, u)))
}

/// Minimum height of a treedepth decomposition, by trying every root of
/// every connected vertex subset (memoised over subsets).
pub fn exact_treedepth(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > EXACT_TREEDEPTH_LIMIT {
        return Err(Error::TooLarge(format!(
            "exact treedepth is limited to {EXACT_TREEDEPTH_LIMIT} vertices, got {n}"
        )));
    }
    let adj: Vec<u32> = g
        .neighbors()
        .iter()
        .map(|ns| ns.iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let mut memo = vec![None; 1 << n];
    Ok(td_of(((1u32 << n) - 1) as usize, &adj, &mut memo))
}

fn components(set: u32, adj: &[u32]) -> Vec<u32> {
    let mut rest = set;
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let grown = comp | comp_neighbors(comp, adj) & set;
            if grown == comp {
                break;
            }
            comp = grown;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

fn comp_neighbors(comp: u32, adj: &[u32]) -> u32 {
    (0..adj.len()).filter(|&v| comp >> v & 1 == 1).fold(0, |m, v| m | adj[v])
}

fn td_of(set: usize, adj: &[u32], memo: &mut [Option<usize>]) -> usize {
    if set == 0 {
        return 0;
    }
    if let Some(v) = memo[set] {
        return v;
    }
    let comps = components(set as u32, adj);
    let value = if comps.len() > 1 {
        comps.iter().map(|&c| td_of(c as usize, adj, memo)).max().unwrap_or(0)
    } else {
        1 + (0..adj.len())
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| td_of(set & !(1 << v), adj, memo))
            .min()
            .unwrap_or(0)
    };
    memo[set] = Some(value);
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encoding_matrix;
    use num_bigint::BigInt;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    #[test]
    fn primal_examples() {
        let g = primal_graph(&m(&[vec![2, -1]]));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(primal_graph(&IntMatrix::identity(2)).edge_count(), 0);
        let g = primal_graph(&encoding_matrix(3, &BigInt::from(2)).unwrap());
        assert_eq!(g, path(3));
    }

    #[test]
    fn dual_examples() {
        let e3 = encoding_matrix(3, &BigInt::from(2)).unwrap();
        assert_eq!(dual_graph(&e3).edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let g = dual_graph(&m(&[vec![1, 2, 3]]));
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert_eq!(dual_graph(&IntMatrix::identity(3)).edge_count(), 0);
    }

    #[test]
    fn validate_examples() {
        let td = TdDecomposition::new(vec![Some(1), None, Some(1)]).unwrap();
        assert!(validate_td(&path(3), &td).unwrap());
        let g = Graph::new(3, [(0, 2)]).unwrap();
        assert!(!validate_td(&g, &td).unwrap());
        assert!(validate_td(&path(4), &td).is_err());
        assert!(TdDecomposition::new(vec![Some(1), Some(0)]).is_err());
        assert!(Graph::new(2, [(1, 1)]).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_treedepth(&Graph::new(4, []).unwrap()).unwrap(), 1);
        assert_eq!(exact_treedepth(&path(4)).unwrap(), 3);
        assert_eq!(exact_treedepth(&Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()).unwrap(), 3);
        assert_eq!(exact_treedepth(&path(7)).unwrap(), 3);
        assert_eq!(exact_treedepth(&Graph::new(0, []).unwrap()).unwrap(), 0);
        assert!(exact_treedepth(&path(11)).is_err());
    }

    #[test]
    fn two_stage_profile() {
        // one first-stage column, two blocks of two columns
        let a = m(&[vec![1, 1, 1, 0, 0], vec![1, 0, 1, 0, 0], vec![1, 0, 0, 1, 1], vec![1, 0, 0, 0, 1]]);
        let p = BlockProfile::multistage(vec![1, 2]).unwrap();
        let td = td_decomposition_from_profile(&a, &p).unwrap();
        assert!(td.height() <= 3);
        assert!(validate_td(&primal_graph(&a), &td).unwrap());
        assert!(exact_treedepth(&primal_graph(&a)).unwrap() <= td.height());
    }

    #[test]
    fn single_stage_is_a_path() {
        let a = m(&[vec![1, 0, 1, 1]]);
        let td = td_decomposition_from_profile(&a, &BlockProfile::multistage(vec![4]).unwrap()).unwrap();
        assert_eq!(td.height(), 4);
    }

    #[test]
    fn treefold_profile_decomposes_the_dual() {
        let a = m(&[vec![1, 1, 1, 1], vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        let p = BlockProfile::treefold(vec![1, 1]).unwrap();
        let td = td_decomposition_from_profile(&a, &p).unwrap();
        assert!(validate_td(&dual_graph(&a), &td).unwrap());
        assert!(td.height() <= 2);
        let bad = BlockProfile::treefold(vec![1, 1]).unwrap();
        assert!(td_decomposition_from_profile(&m(&[vec![1, 1], vec![1, 1], vec![1, 1]]), &bad).is_err());
    }
}
