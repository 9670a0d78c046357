//! Pivot bases in matrix space and minimum line covers of their pivot positions.
//!
//! A matrix subspace whose members all have rank at most `r` has its set of pivot
//! positions (row-major first nonzero entries) covered by at most `r` lines. The cover
//! computed here is a minimum one: a maximum bipartite matching between pivot rows and
//! pivot columns (Hopcroft-Karp) turned into a vertex cover by König's construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Row-major first nonzero entry.
pub fn first_nonzero_position(a: &Matrix) -> Result<(usize, usize)> {
    a.first_nonzero().ok_or(Error::ZeroMatrix)
}

/// A basis whose elements have pairwise distinct pivot positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotBasis {
    pub matrices: Vec<Matrix>,
    pub pivots: Vec<(usize, usize)>,
}

impl PivotBasis {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

/// Eliminates in input order: while a matrix's pivot collides with an earlier one, the
/// earlier matrix is subtracted to clear that entry. Each subtraction moves the pivot
/// strictly later, so the loop ends with a new pivot or a zero matrix.
pub fn pivot_basis(inputs: Vec<Matrix>) -> Result<PivotBasis> {
    let mut matrices: Vec<Matrix> = Vec::with_capacity(inputs.len());
    let mut pivots = Vec::with_capacity(inputs.len());
    let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for (index, mut m) in inputs.into_iter().enumerate() {
        if let Some(first) = matrices.first() {
            assert_eq!(m.shape(), first.shape(), "basis matrices differ in shape");
        }
        let pivot = loop {
            let Some(p) = m.first_nonzero() else {
                return Err(Error::DependentInput { index });
            };
            match owner.get(&p) {
                None => break p,
                Some(&k) => {
                    let f = m.field();
                    let prior = &matrices[k];
                    let inv = f.inv(prior.get(p.0, p.1)).expect("pivot entry is nonzero");
                    let factor = f.mul(m.get(p.0, p.1), inv);
                    m.sub_scaled(factor, prior);
                }
            }
        };
        owner.insert(pivot, matrices.len());
        pivots.push(pivot);
        matrices.push(m);
    }
    Ok(PivotBasis { matrices, pivots })
}

/// A set of rows and columns containing every given position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineCover {
    pub cover_rows: Vec<usize>,
    pub cover_cols: Vec<usize>,
    /// The maximum matching the cover was built from; same size as the cover.
    pub matching: Vec<(usize, usize)>,
}

impl LineCover {
    pub fn size(&self) -> usize {
        self.cover_rows.len() + self.cover_cols.len()
    }

    pub fn covers(&self, position: (usize, usize)) -> bool {
        self.cover_rows.binary_search(&position.0).is_ok()
            || self.cover_cols.binary_search(&position.1).is_ok()
    }
}

/// Minimum line cover of `positions`, refusing with [`Error::BoundViolated`] if it is
/// larger than `rank_bound`.
pub fn line_cover(positions: &[(usize, usize)], rank_bound: usize) -> Result<LineCover> {
    let cover = minimum_line_cover(positions);
    if cover.size() > rank_bound {
        return Err(Error::BoundViolated {
            cover: cover.size(),
            bound: rank_bound,
        });
    }
    Ok(cover)
}

/// Minimum line cover with no bound check.
pub fn minimum_line_cover(positions: &[(usize, usize)]) -> LineCover {
    let rows: Vec<usize> = positions
        .iter()
        .map(|p| p.0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cols: Vec<usize> = positions
        .iter()
        .map(|p| p.1)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let row_id: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let col_id: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut adj = vec![Vec::new(); rows.len()];
    for &(r, c) in positions {
        adj[row_id[&r]].push(col_id[&c]);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let mut hk = HopcroftKarp::new(&adj, cols.len());
    hk.run();

    // König: Z = vertices reachable from free left vertices by alternating paths.
    let mut left_seen = vec![false; rows.len()];
    let mut right_seen = vec![false; cols.len()];
    let mut queue: VecDeque<usize> = (0..rows.len())
        .filter(|&u| hk.match_left[u].is_none())
        .collect();
    for &u in &queue {
        left_seen[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if hk.match_left[u] == Some(v) || right_seen[v] {
                continue;
            }
            right_seen[v] = true;
            if let Some(w) = hk.match_right[v] {
                if !left_seen[w] {
                    left_seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    LineCover {
        cover_rows: (0..rows.len())
            .filter(|&u| !left_seen[u])
            .map(|u| rows[u])
            .collect(),
        cover_cols: (0..cols.len())
            .filter(|&v| right_seen[v])
            .map(|v| cols[v])
            .collect(),
        matching: (0..rows.len())
            .filter_map(|u| hk.match_left[u].map(|v| (rows[u], cols[v])))
            .collect(),
    }
}

struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    match_left: Vec<Option<usize>>,
    match_right: Vec<Option<usize>>,
    dist: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(adj: &'a [Vec<usize>], right: usize) -> Self {
        HopcroftKarp {
            adj,
            match_left: vec![None; adj.len()],
            match_right: vec![None; right],
            dist: vec![usize::MAX; adj.len()],
        }
    }

    fn run(&mut self) -> usize {
        let mut size = 0;
        while self.bfs() {
            for u in 0..self.adj.len() {
                if self.match_left[u].is_none() && self.dfs(u) {
                    size += 1;
                }
            }
        }
        size
    }

    /// Layers the graph from free left vertices; true if some augmenting path exists.
    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for u in 0..self.adj.len() {
            if self.match_left[u].is_none() {
                self.dist[u] = 0;
                queue.push_back(u);
            } else {
                self.dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                match self.match_right[v] {
                    None => found = true,
                    Some(w) if self.dist[w] == usize::MAX => {
                        self.dist[w] = self.dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, u: usize) -> bool {
        for i in 0..self.adj[u].len() {
            let v = self.adj[u][i];
            let ok = match self.match_right[v] {
                None => true,
                Some(w) => self.dist[w] == self.dist[u] + 1 && self.dfs(w),
            };
            if ok {
                self.match_left[u] = Some(v);
                self.match_right[v] = Some(u);
                return true;
            }
        }
        self.dist[u] = usize::MAX;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use proptest::prelude::*;

    #[test]
    fn first_nonzero_examples() {
        let f = make_field(3).unwrap();
        let mut a = Matrix::zeros(f, 3, 2);
        a.set(2, 1, 1);
        assert_eq!(first_nonzero_position(&a), Ok((2, 1)));
        assert_eq!(
            first_nonzero_position(&Matrix::zeros(f, 2, 2)),
            Err(Error::ZeroMatrix)
        );
        let mut b = Matrix::zeros(f, 2, 4);
        b.set(0, 3, 1);
        b.set(1, 0, 1);
        assert_eq!(first_nonzero_position(&b), Ok((0, 3)));
    }

    #[test]
    fn pivot_collision_resolved() {
        let f = make_field(2).unwrap();
        let a = Matrix::from_rows(f, &[vec![1, 0], vec![0, 0]]);
        let b = Matrix::from_rows(f, &[vec![1, 1], vec![0, 0]]);
        let basis = pivot_basis(vec![a.clone(), b]).unwrap();
        assert_eq!(basis.pivots, vec![(0, 0), (0, 1)]);
        assert_eq!(basis.matrices[0], a);

        let single = pivot_basis(vec![a.clone()]).unwrap();
        assert_eq!(single.matrices, vec![a]);
    }

    #[test]
    fn dependent_input_detected() {
        let f = make_field(3).unwrap();
        let a = Matrix::from_rows(f, &[vec![1, 2], vec![0, 1]]);
        let b = Matrix::from_rows(f, &[vec![2, 1], vec![0, 2]]);
        assert_eq!(
            pivot_basis(vec![a, b]),
            Err(Error::DependentInput { index: 1 })
        );
    }

    #[test]
    fn cover_examples() {
        let c = line_cover(&[(0, 0)], 1).unwrap();
        assert_eq!(c.size(), 1);
        assert!(c.covers((0, 0)));

        let diag = [(0, 0), (1, 1), (2, 2)];
        let c = line_cover(&diag, 3).unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(
            line_cover(&diag, 2),
            Err(Error::BoundViolated { cover: 3, bound: 2 })
        );

        let mut cross: Vec<_> = (0..4).map(|j| (0, j)).collect();
        cross.extend((1..4).map(|i| (i, 0)));
        let c = line_cover(&cross, 2).unwrap();
        assert_eq!(c.cover_rows, vec![0]);
        assert_eq!(c.cover_cols, vec![0]);

        assert_eq!(line_cover(&[], 0).unwrap().size(), 0);
    }

    fn brute_min_cover(points: &[(usize, usize)]) -> usize {
        let rows: Vec<usize> = points
            .iter()
            .map(|p| p.0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cols: Vec<usize> = points
            .iter()
            .map(|p| p.1)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        // choose rows; remaining points force their columns
        let mut best = usize::MAX;
        for mask in 0u32..(1 << rows.len()) {
            let chosen: BTreeSet<usize> = (0..rows.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| rows[i])
                .collect();
            let forced: BTreeSet<usize> = points
                .iter()
                .filter(|p| !chosen.contains(&p.0))
                .map(|p| p.1)
                .collect();
            best = best.min(chosen.len() + forced.len());
        }
        let _ = cols;
        best
    }

    proptest! {
        #[test]
        fn cover_is_minimum_and_valid(points in prop::collection::vec((0usize..6, 0usize..6), 0..20)) {
            let cover = minimum_line_cover(&points);
            for &p in &points {
                prop_assert!(cover.covers(p));
            }
            prop_assert_eq!(cover.size(), cover.matching.len());
            prop_assert_eq!(cover.size(), brute_min_cover(&points));
        }
    }
}
