//! Fill-reducing symmetric ordering: nested dissection with breadth-first
//! level-set separators, finishing small pieces with minimum degree.

use super::CsrMatrix;
use std::collections::VecDeque;

const LEAF_SIZE: usize = 48;

/// Adjacency of the symmetric pattern of `a`, without the diagonal.
fn adjacency(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

struct Dissector<'a> {
    adj: &'a [Vec<usize>],
    label: Vec<usize>,
    next_label: usize,
    level: Vec<usize>,
    order: Vec<usize>,
}

const DONE: usize = usize::MAX;

impl Dissector<'_> {
    fn fresh_label(&mut self, set: &[usize]) -> usize {
        let id = self.next_label;
        self.next_label += 1;
        for &v in set {
            self.label[v] = id;
        }
        id
    }

    /// Breadth-first level structure of the piece containing `root`.
    fn bfs(&mut self, root: usize, id: usize) -> Vec<Vec<usize>> {
        let mut levels: Vec<Vec<usize>> = vec![vec![root]];
        self.level[root] = 0;
        let mut seen = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let lv = self.level[v];
            for &u in &self.adj[v] {
                if self.label[u] == id && self.level[u] == usize::MAX {
                    self.level[u] = lv + 1;
                    if levels.len() <= lv + 1 {
                        levels.push(Vec::new());
                    }
                    levels[lv + 1].push(u);
                    seen.push(u);
                    queue.push_back(u);
                }
            }
        }
        for v in seen {
            self.level[v] = usize::MAX;
        }
        levels
    }

    fn dissect(&mut self, set: Vec<usize>) {
        if set.len() <= LEAF_SIZE {
            self.minimum_degree(&set);
            return;
        }
        let id = self.fresh_label(&set);
        let root = *set.iter().min().unwrap();
        let first = self.bfs(root, id);
        let reached: usize = first.iter().map(Vec::len).sum();
        if reached < set.len() {
            // Disconnected: split into components and handle each on its own.
            let mut components = Vec::new();
            let mut comp: Vec<usize> = first.into_iter().flatten().collect();
            let mut cursor = 0;
            loop {
                self.fresh_label(&comp);
                components.push(comp);
                while cursor < set.len() && self.label[set[cursor]] != id {
                    cursor += 1;
                }
                if cursor == set.len() {
                    break;
                }
                comp = self.bfs(set[cursor], id).into_iter().flatten().collect();
            }
            for c in components {
                self.dissect(c);
            }
            return;
        }
        // Pseudo-peripheral start: a minimum-degree vertex in the last level.
        let far = *first
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| (self.adj[v].iter().filter(|&&u| self.label[u] == id).count(), v))
            .unwrap();
        let levels = self.bfs(far, id);
        if levels.len() < 3 {
            self.minimum_degree(&set);
            return;
        }
        let half = set.len() / 2;
        let mut acc = 0;
        let mut mid = 1;
        for (k, l) in levels.iter().enumerate() {
            acc += l.len();
            if acc > half {
                mid = k.clamp(1, levels.len() - 2);
                break;
            }
        }
        let mut part_a: Vec<usize> = levels[..mid].iter().flatten().copied().collect();
        let part_b: Vec<usize> = levels[mid + 1..].iter().flatten().copied().collect();
        // Separator vertices with no neighbor beyond the separator join part A.
        let b_id = self.fresh_label(&part_b);
        let mut sep = Vec::new();
        for &v in &levels[mid] {
            if self.adj[v].iter().any(|&u| self.label[u] == b_id) {
                sep.push(v);
            } else {
                part_a.push(v);
            }
        }
        for &v in &sep {
            self.label[v] = DONE;
        }
        self.fresh_label(&part_a);
        self.dissect(part_a);
        self.dissect(part_b);
        self.minimum_degree(&sep);
    }

    /// Minimum degree on the subgraph induced by `set`, appended to the order.
    fn minimum_degree(&mut self, set: &[usize]) {
        let m = set.len();
        if m == 0 {
            return;
        }
        let id = self.fresh_label(set);
        let mut local = vec![0usize; m];
        let pos = |v: usize, set: &[usize]| set.iter().position(|&s| s == v).unwrap();
        let mut graph: Vec<Vec<usize>> = Vec::with_capacity(m);
        if m <= 4 * LEAF_SIZE {
            for &v in set {
                let mut nb: Vec<usize> = self.adj[v]
                    .iter()
                    .filter(|&&u| self.label[u] == id)
                    .map(|&u| pos(u, set))
                    .collect();
                nb.sort_unstable();
                graph.push(nb);
            }
        } else {
            // Large separators: keep their natural order.
            for &v in set {
                self.label[v] = DONE;
                self.order.push(v);
            }
            return;
        }
        let mut alive = vec![true; m];
        for slot in local.iter_mut() {
            let v = (0..m)
                .filter(|&v| alive[v])
                .min_by_key(|&v| (graph[v].len(), v))
                .unwrap();
            *slot = v;
            alive[v] = false;
            let nb = std::mem::take(&mut graph[v]);
            for &u in &nb {
                let mut merged: Vec<usize> =
                    graph[u].iter().chain(nb.iter()).copied().filter(|&w| w != u && w != v).collect();
                merged.sort_unstable();
                merged.dedup();
                graph[u] = merged;
            }
        }
        for &l in &local {
            self.label[set[l]] = DONE;
            self.order.push(set[l]);
        }
    }
}

/// Elimination order: `perm[k]` is the original index eliminated at step `k`.
pub fn fill_reducing_order(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n_rows();
    let adj = adjacency(a);
    let mut d = Dissector {
        adj: &adj,
        label: vec![0; n],
        next_label: 1,
        level: vec![usize::MAX; n],
        order: Vec::with_capacity(n),
    };
    d.dissect((0..n).collect());
    debug_assert_eq!(d.order.len(), n);
    d.order
}
