//! Fill-reducing symmetric orderings for the sparse LU factorization.
//!
//! Nested dissection on the pattern of `A + Aᵀ`: each part is split by the
//! middle level of a breadth-first level structure rooted at a
//! pseudo-peripheral vertex, the two halves are ordered recursively and the
//! separator goes last.

use alloc::vec::Vec;

use crate::sparse::CsrMatrix;

/// Parts at most this large are not dissected further.
const LEAF_SIZE: usize = 96;

/// Adjacency of the symmetrized off-diagonal pattern.
struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    fn symmetric(a: &CsrMatrix) -> Graph {
        let n = a.nrows();
        let t = a.transpose();
        let mut ptr = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(2 * a.nnz());
        ptr.push(0);
        for r in 0..n {
            let (c1, _) = a.row(r);
            let (c2, _) = t.row(r);
            // merge two sorted lists
            let (mut i, mut j) = (0, 0);
            while i < c1.len() || j < c2.len() {
                let v = match (c1.get(i), c2.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        j += 1;
                        y
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                if v != r {
                    adj.push(v);
                }
            }
            ptr.push(adj.len());
        }
        Graph { ptr, adj }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }
}

struct Dissector<'g> {
    graph: &'g Graph,
    /// Part label of each vertex; searches stay inside one label.
    label: Vec<usize>,
    level: Vec<usize>,
    next_label: usize,
    order: Vec<usize>,
}

impl Dissector<'_> {
    /// Breadth-first level structure of the component of `root` inside part
    /// `part`. Returns the vertices in BFS order and the level offsets.
    fn levels(&mut self, root: usize, part: usize) -> (Vec<usize>, Vec<usize>) {
        let mut queue = alloc::vec![root];
        let mut offsets = alloc::vec![0];
        let stamp = usize::MAX;
        self.level[root] = 0;
        let mut seen = alloc::vec![root];
        // mark visited by temporarily relabelling
        self.label[root] = stamp;
        let mut head = 0;
        let mut current = 0;
        while head < queue.len() {
            let v = queue[head];
            if self.level[v] != current {
                offsets.push(head);
                current = self.level[v];
            }
            head += 1;
            for &w in self.graph.neighbors(v) {
                if self.label[w] == part {
                    self.label[w] = stamp;
                    self.level[w] = self.level[v] + 1;
                    queue.push(w);
                    seen.push(w);
                }
            }
        }
        offsets.push(queue.len());
        for v in seen {
            self.label[v] = part;
        }
        (queue, offsets)
    }

    fn pseudo_peripheral(&mut self, start: usize, part: usize) -> (Vec<usize>, Vec<usize>) {
        let mut root = start;
        let (mut order, mut offsets) = self.levels(root, part);
        for _ in 0..4 {
            // farthest vertex of minimum degree in the last level
            let last = &order[offsets[offsets.len() - 2]..];
            let candidate = *last
                .iter()
                .min_by_key(|&&v| self.graph.neighbors(v).len())
                .expect("nonempty level");
            if candidate == root {
                break;
            }
            let (o, f) = self.levels(candidate, part);
            if f.len() <= offsets.len() {
                break;
            }
            root = candidate;
            order = o;
            offsets = f;
        }
        (order, offsets)
    }

    fn dissect(&mut self, vertices: Vec<usize>, part: usize) {
        let mut remaining = vertices;
        while !remaining.is_empty() {
            if remaining.len() <= LEAF_SIZE {
                remaining.sort_unstable();
                self.order.extend_from_slice(&remaining);
                return;
            }
            let start = remaining[0];
            let (component, offsets) = self.pseudo_peripheral(start, part);
            if component.len() < remaining.len() {
                // split off the other components and handle them separately
                let comp_label = self.fresh_label();
                for &v in &component {
                    self.label[v] = comp_label;
                }
                let rest: Vec<usize> = remaining.iter().copied().filter(|&v| self.label[v] == part).collect();
                self.dissect(component, comp_label);
                remaining = rest;
                continue;
            }
            let nlevels = offsets.len() - 1;
            if nlevels < 3 {
                remaining.sort_unstable();
                self.order.extend_from_slice(&remaining);
                return;
            }
            // middle level by vertex count
            let half = component.len() / 2;
            let mut mid = 1;
            while mid < nlevels - 1 && offsets[mid + 1] <= half {
                mid += 1;
            }
            let mid = mid.clamp(1, nlevels - 2);
            let (lo, hi) = (offsets[mid], offsets[mid + 1]);
            let left_label = self.fresh_label();
            let right_label = self.fresh_label();
            let sep_label = self.fresh_label();
            for &v in &component[..lo] {
                self.label[v] = left_label;
            }
            for &v in &component[hi..] {
                self.label[v] = right_label;
            }
            // shrink the separator: keep only vertices touching the far side
            let mut separator = Vec::new();
            let mut moved = Vec::new();
            for &v in &component[lo..hi] {
                if self.graph.neighbors(v).iter().any(|&w| self.label[w] == right_label) {
                    separator.push(v);
                } else {
                    moved.push(v);
                }
            }
            for &v in &separator {
                self.label[v] = sep_label;
            }
            for &v in &moved {
                self.label[v] = left_label;
            }
            let mut left: Vec<usize> = component[..lo].to_vec();
            left.extend_from_slice(&moved);
            let right = component[hi..].to_vec();
            self.dissect(left, left_label);
            self.dissect(right, right_label);
            separator.sort_unstable();
            self.order.extend_from_slice(&separator);
            return;
        }
    }

    fn fresh_label(&mut self) -> usize {
        self.next_label += 1;
        self.next_label
    }
}

/// Nested dissection permutation `perm[new] = old` of the symmetrized pattern.
pub fn nested_dissection(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let graph = Graph::symmetric(a);
    let mut d = Dissector { graph: &graph, label: alloc::vec![0; n], level: alloc::vec![0; n], next_label: 0, order: Vec::with_capacity(n) };
    d.dissect((0..n).collect(), 0);
    debug_assert_eq!(d.order.len(), n);
    d.order
}

/// Ordering of a `blocks × blocks` block matrix whose blocks share the
/// pattern ordered by `spatial`: the unknowns of one spatial index are kept
/// together so they are eliminated as a group.
pub fn interleave_blocks(spatial: &[usize], blocks: usize) -> Vec<usize> {
    let n = spatial.len();
    spatial.iter().flat_map(|&p| (0..blocks).map(move |b| b * n + p)).collect()
}

/// Inverse of a permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}
