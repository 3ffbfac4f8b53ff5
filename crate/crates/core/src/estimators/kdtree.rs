//! Exact k-nearest-neighbour search.
//!
//! Neighbours are ranked by (squared Euclidean distance, training index), so
//! the result is identical to a brute-force sort with index tie-breaking.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Neighbor {
    pub dist2: f64,
    pub index: usize,
}

impl PartialEq for Neighbor {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.index.cmp(&other.index))
    }
}

#[derive(Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: Box<Node>, right: Box<Node> },
}

#[derive(Debug)]
pub(crate) struct KdTree {
    d: usize,
    /// Row-major copy of the points.
    coords: Vec<f64>,
    /// Permutation of point indices; leaves own contiguous ranges.
    order: Vec<usize>,
    root: Node,
}

impl KdTree {
    pub fn build(points: &[Vec<f64>], d: usize) -> Self {
        let coords: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        let root = Self::build_node(&coords, d, &mut order, 0, points.len());
        KdTree { d, coords, order, root }
    }

    fn coord(coords: &[f64], d: usize, i: usize, axis: usize) -> f64 {
        coords[i * d + axis]
    }

    fn build_node(coords: &[f64], d: usize, order: &mut [usize], start: usize, end: usize) -> Node {
        if end - start <= LEAF_SIZE || d == 0 {
            return Node::Leaf { start, end };
        }
        let slice = &mut order[start..end];
        let (axis, spread) = (0..d)
            .map(|a| {
                let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = Self::coord(coords, d, i, a);
                    (lo.min(v), hi.max(v))
                });
                (a, hi - lo)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if spread <= 0.0 {
            return Node::Leaf { start, end };
        }
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            Self::coord(coords, d, a, axis).total_cmp(&Self::coord(coords, d, b, axis))
        });
        let value = Self::coord(coords, d, slice[mid], axis);
        let left = Self::build_node(coords, d, order, start, start + mid);
        let right = Self::build_node(coords, d, order, start + mid, end);
        Node::Split { axis, value, left: Box::new(left), right: Box::new(right) }
    }

    /// The `k` nearest points to `query`, nearest first.
    pub fn nearest(&self, query: &[f64], k: usize) -> Vec<Neighbor> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 {
            self.search(&self.root, query, k, &mut heap);
        }
        heap.into_sorted_vec()
    }

    fn search(&self, node: &Node, query: &[f64], k: usize, heap: &mut BinaryHeap<Neighbor>) {
        match node {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    let p = &self.coords[i * self.d..(i + 1) * self.d];
                    let dist2: f64 = p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                    let cand = Neighbor { dist2, index: i };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = query[*axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, k, heap);
                // `<=` keeps equal-distance points with lower indices reachable.
                if heap.len() < k || diff * diff <= heap.peek().unwrap().dist2 {
                    self.search(far, query, k, heap);
                }
            }
        }
    }
}
