//! Exhaustive enumeration of connected vertex subsets of a graph, used to
//! certify minimum joining numbers independently of any BFS shortcut.
//!
//! Each connected subset of size <= cap is visited exactly once: subsets
//! are grown from their minimum vertex, and when a candidate extension is
//! branched on, it is forbidden in all later branches at that depth.

/// Calls `visit` once per connected subset (sorted) of size <= cap.
pub fn for_each_connected_subset(
    vertex_count: usize,
    adjacent: impl Fn(usize, usize) -> bool,
    cap: usize,
    mut visit: impl FnMut(&[usize]),
) {
    if cap == 0 {
        return;
    }
    for start in 0..vertex_count {
        let mut subset = vec![start];
        let mut forbidden = vec![false; vertex_count];
        for f in forbidden.iter_mut().take(start) {
            *f = true;
        }
        grow(
            vertex_count,
            &adjacent,
            cap,
            &mut subset,
            &mut forbidden,
            &mut visit,
        );
    }
}

fn grow(
    vertex_count: usize,
    adjacent: &impl Fn(usize, usize) -> bool,
    cap: usize,
    subset: &mut Vec<usize>,
    forbidden: &mut [bool],
    visit: &mut impl FnMut(&[usize]),
) {
    visit(subset);
    if subset.len() == cap {
        return;
    }
    let candidates: Vec<usize> = (0..vertex_count)
        .filter(|&v| {
            !forbidden[v]
                && !subset.contains(&v)
                && subset.iter().any(|&u| adjacent(u, v))
        })
        .collect();
    for &c in &candidates {
        subset.push(c);
        grow(vertex_count, adjacent, cap, subset, forbidden, visit);
        subset.pop();
        // settled at this depth: later branches must not re-add c
        forbidden[c] = true;
    }
    for &c in &candidates {
        forbidden[c] = false;
    }
}

/// Smallest size of a connected subset satisfying `goal`, searching all
/// connected subsets of size <= cap. None when no subset within the cap
/// satisfies it.
pub fn min_connected_subset(
    vertex_count: usize,
    adjacent: impl Fn(usize, usize) -> bool,
    cap: usize,
    goal: impl Fn(&[usize]) -> bool,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for_each_connected_subset(vertex_count, adjacent, cap, |s| {
        if goal(s) && best.is_none_or(|b| s.len() < b) {
            best = Some(s.len());
        }
    });
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_subset_count() {
        // P4 has 4 + 3 + 2 + 1 = 10 connected subsets.
        let mut n = 0;
        for_each_connected_subset(4, |a, b| a.abs_diff(b) == 1, 4, |_| n += 1);
        assert_eq!(n, 10);
    }

    #[test]
    fn cycle_graph_subset_count() {
        // C5: 5 singletons, 5 pairs, 5 triples, 5 quadruples, 1 full = 21.
        let adj = |a: usize, b: usize| (a + 1) % 5 == b || (b + 1) % 5 == a;
        let mut n = 0;
        for_each_connected_subset(5, adj, 5, |_| n += 1);
        assert_eq!(n, 21);
    }

    #[test]
    fn min_subset_finds_shortest_path() {
        let adj = |a: usize, b: usize| a.abs_diff(b) == 1;
        let goal = |s: &[usize]| s.contains(&0) && s.contains(&3);
        assert_eq!(min_connected_subset(4, adj, 4, goal), Some(4));
        assert_eq!(min_connected_subset(4, adj, 3, goal), None);
    }
}
