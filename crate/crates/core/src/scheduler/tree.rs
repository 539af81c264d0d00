use std::collections::{BTreeSet, VecDeque};

use crate::dataset::Edge;

use super::SchedError;

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.f as usize].push(e.g);
        adj[e.g as usize].push(e.f);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Breadth-first spanning tree of the component holding `targets`, with
/// leaves outside `targets` pruned repeatedly. Edges are `(parent, child)`.
pub fn extract_tree(n: usize, edges: &[Edge], targets: &[u32]) -> Result<Vec<Edge>, SchedError> {
    let Some(&root) = targets.first() else {
        return Ok(Vec::new());
    };
    let adj = adjacency(n, edges);
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[root as usize] = true;
    let mut queue = VecDeque::from([root]);
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = Some(v);
                queue.push_back(w);
            }
        }
    }
    if let Some(&t) = targets.iter().find(|&&t| !seen[t as usize]) {
        return Err(SchedError::Disconnected { vertex: t });
    }
    // children before parents: a vertex is kept iff it or a descendant is a target
    let wanted: BTreeSet<u32> = targets.iter().copied().collect();
    let mut keep = vec![false; n];
    for &v in order.iter().rev() {
        if wanted.contains(&v) {
            keep[v as usize] = true;
        }
        if keep[v as usize] {
            if let Some(p) = parent[v as usize] {
                keep[p as usize] = true;
            }
        }
    }
    Ok(order
        .iter()
        .filter(|&&v| keep[v as usize])
        .filter_map(|&v| parent[v as usize].map(|p| Edge { f: p, g: v }))
        .collect())
}

/// Vertex sequence from `from` to `to` inside a tree.
pub fn extract_path(tree: &[Edge], from: u32, to: u32) -> Result<Vec<u32>, SchedError> {
    let n = tree.iter().map(|e| e.f.max(e.g) as usize + 1).max().unwrap_or(0).max(from.max(to) as usize + 1);
    let adj = adjacency(n, tree);
    let mut prev: Vec<Option<u32>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from as usize] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                prev[w as usize] = Some(v);
                queue.push_back(w);
            }
        }
    }
    if !seen[to as usize] {
        return Err(SchedError::Disconnected { vertex: to });
    }
    let mut path = vec![to];
    while let Some(p) = prev[*path.last().unwrap() as usize] {
        path.push(p);
    }
    path.reverse();
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: u32, g: u32) -> Edge {
        Edge { f, g }
    }

    #[test]
    fn tree_of_a_tree_is_itself_after_pruning() {
        // 0-1-2 with a dangling non-target leaf 3 under 1
        let edges = [e(0, 1), e(1, 2), e(1, 3)];
        let t = extract_tree(4, &edges, &[0, 2]).unwrap();
        assert_eq!(t, vec![e(0, 1), e(1, 2)]);
        let t = extract_tree(4, &edges, &[0, 2, 3]).unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn star_path_goes_through_the_hub() {
        let edges: Vec<Edge> = (1..6).map(|i| e(0, i)).collect();
        let t = extract_tree(6, &edges, &[2, 4]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(extract_path(&t, 2, 4).unwrap(), vec![2, 0, 4]);
    }

    #[test]
    fn cycles_are_broken() {
        let edges = [e(0, 1), e(1, 2), e(2, 0), e(2, 3)];
        let t = extract_tree(4, &edges, &[0, 3]).unwrap();
        assert_eq!(t, vec![e(0, 2), e(2, 3)]);
    }

    #[test]
    fn disconnected_targets() {
        let edges = [e(0, 1)];
        assert!(matches!(extract_tree(3, &edges, &[0, 2]), Err(SchedError::Disconnected { vertex: 2 })));
    }
}
