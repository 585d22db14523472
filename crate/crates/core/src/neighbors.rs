//! Exact Euclidean k-nearest-neighbor search over a [`Dataset`].
//!
//! The index is a median-split kd-tree. Queries return neighbors ordered by
//! `(distance, index)`, so ties are broken toward the smaller sample index and
//! results are identical to a brute-force sort of all pairwise distances.

use std::cmp::Ordering;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 12;

/// One entry of a [`NeighborList`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// The `m` nearest other samples to `center`, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub center: usize,
    pub entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distance to the `k`-th neighbor (1-based).
    pub fn kth_distance(&self, k: usize) -> f64 {
        self.entries[k - 1].distance
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Immutable spatial index; safe to query from many threads.
#[derive(Debug, Clone)]
pub struct NeighborIndex<'a> {
    data: &'a Dataset,
    perm: Vec<usize>,
    nodes: Vec<Node>,
}

/// `m = max(k, ceil(ln n))`, capped at `n - 1`.
pub fn truncation_size(n: usize, k: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::MTooLarge { m: k, available: n - 1 });
    }
    let log_n = (n as f64).ln().ceil() as usize;
    Ok(k.max(log_n).min(n - 1))
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
fn cmp_candidate(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Builds the index, rejecting exactly coincident samples.
pub fn build_index(dataset: &Dataset) -> Result<NeighborIndex<'_>> {
    NeighborIndex::new(dataset)
}

impl<'a> NeighborIndex<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        check_duplicates(data)?;
        let mut index = Self {
            data,
            perm: (0..data.n()).collect(),
            nodes: Vec::new(),
        };
        index.build(0, data.n());
        Ok(index)
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.data
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn d(&self) -> usize {
        self.data.d()
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let d = self.data.d();
        let mut best_dim = 0;
        let mut best_spread = f64::NEG_INFINITY;
        for dim in 0..d {
            let (lo, hi) = self.perm[start..end]
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                    let v = self.data.point(p)[dim];
                    (lo.min(v), hi.max(v))
                });
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best_dim = dim;
            }
        }
        let mid = start + (end - start) / 2;
        let data = self.data;
        self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data.point(a)[best_dim]
                .total_cmp(&data.point(b)[best_dim])
                .then(a.cmp(&b))
        });
        let value = data.point(self.perm[mid])[best_dim];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            dim: best_dim,
            value,
            left,
            right,
        };
        id
    }

    fn check_query(&self, i: usize, m: usize) -> Result<()> {
        let n = self.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if m == 0 {
            return Err(Error::InvalidParameter("neighbor count must be at least 1".into()));
        }
        if m > n - 1 {
            return Err(Error::MTooLarge { m, available: n - 1 });
        }
        Ok(())
    }

    /// The `m` nearest neighbors of sample `i`, excluding `i` itself.
    pub fn knn(&self, i: usize, m: usize) -> Result<NeighborList> {
        self.check_query(i, m)?;
        let query = self.data.point(i);
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(m + 1);
        self.search(0, query, i, m, &mut best);
        Ok(NeighborList {
            center: i,
            entries: best
                .into_iter()
                .map(|(d2, index)| Neighbor {
                    index,
                    distance: d2.sqrt(),
                })
                .collect(),
        })
    }

    /// Distance from sample `i` to its `k`-th nearest neighbor.
    pub fn rho(&self, i: usize, k: usize) -> Result<f64> {
        Ok(self.knn(i, k)?.kth_distance(k))
    }

    fn search(&self, node: usize, query: &[f64], skip: usize, m: usize, best: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.perm[start..end] {
                    if j == skip {
                        continue;
                    }
                    let cand = (squared_distance(query, self.data.point(j)), j);
                    if best.len() == m {
                        if cmp_candidate(cand, best[m - 1]) != Ordering::Less {
                            continue;
                        }
                        best.pop();
                    }
                    let pos = best
                        .binary_search_by(|probe| cmp_candidate(*probe, cand))
                        .unwrap_or_else(|p| p);
                    best.insert(pos, cand);
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = query[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, skip, m, best);
                // Equal plane distance can still win a tie on index.
                if best.len() < m || diff * diff <= best[m - 1].0 {
                    self.search(far, query, skip, m, best);
                }
            }
        }
    }
}

fn check_duplicates(data: &Dataset) -> Result<()> {
    let mut order: Vec<usize> = (0..data.n()).collect();
    let lex = |a: &usize, b: &usize| {
        data.point(*a)
            .iter()
            .zip(data.point(*b))
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(b))
    };
    order.sort_unstable_by(lex);
    let mut found: Option<(usize, usize)> = None;
    for w in order.windows(2) {
        if data.point(w[0]) == data.point(w[1]) {
            let pair = (w[0].min(w[1]), w[0].max(w[1]));
            found = Some(match found {
                Some(prev) if prev <= pair => prev,
                _ => pair,
            });
        }
    }
    match found {
        Some((i, j)) => Err(Error::DuplicatePoints(i, j)),
        None => Ok(()),
    }
}
