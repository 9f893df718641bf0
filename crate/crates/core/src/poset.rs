//! Finite lattices given only by their order relation.
//!
//! Nothing here knows about groups: the automorphism search and the
//! complement scan see a lattice exactly as an abstract poset.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractLattice {
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    height: Vec<usize>,
    depth: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl AbstractLattice {
    /// Builds the lattice from an order relation on `0..n`.
    ///
    /// Panics if `leq` is not a partial order with a least and a greatest
    /// element; callers only pass inclusion relations.
    pub fn from_leq(n: usize, leq: impl Fn(usize, usize) -> bool) -> Self {
        assert!(n > 0, "a lattice has at least one element");
        let up: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.extend((0..n).filter(|&j| leq(i, j)));
                row
            })
            .collect();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.ones() {
                down[j].insert(i);
            }
        }
        for i in 0..n {
            assert!(up[i].contains(i), "relation is not reflexive at {i}");
            for j in up[i].ones() {
                assert!(
                    j == i || !up[j].contains(i),
                    "relation is not antisymmetric"
                );
            }
        }
        let bottom = (0..n)
            .find(|&i| up[i].count_ones(..) == n)
            .expect("no least element");
        let top = (0..n)
            .find(|&i| down[i].count_ones(..) == n)
            .expect("no greatest element");

        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for i in 0..n {
            for j in up[i].ones().filter(|&j| j != i) {
                // j covers i iff the interval [i, j] is just {i, j}.
                if down[j].intersection_count(&up[i]) == 2 {
                    upper_covers[i].push(j);
                    lower_covers[j].push(i);
                }
            }
        }
        for v in lower_covers.iter_mut() {
            v.sort_unstable();
        }

        // Longest chains, processed in order of down-set size (a linear extension).
        let mut by_size: Vec<usize> = (0..n).collect();
        by_size.sort_by_key(|&i| down[i].count_ones(..));
        let mut height = vec![0; n];
        for &i in &by_size {
            height[i] = lower_covers[i]
                .iter()
                .map(|&j| height[j] + 1)
                .max()
                .unwrap_or(0);
        }
        let mut depth = vec![0; n];
        for &i in by_size.iter().rev() {
            depth[i] = upper_covers[i]
                .iter()
                .map(|&j| depth[j] + 1)
                .max()
                .unwrap_or(0);
        }

        AbstractLattice {
            up,
            down,
            upper_covers,
            lower_covers,
            height,
            depth,
            bottom,
            top,
        }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper_covers[i]
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.lower_covers[i]
    }

    /// Length of the longest chain from the bottom to `i`.
    pub fn height(&self, i: usize) -> usize {
        self.height[i]
    }

    /// Length of the longest chain from `i` to the top.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn up_set(&self, i: usize) -> &FixedBitSet {
        &self.up[i]
    }

    pub fn down_set(&self, i: usize) -> &FixedBitSet {
        &self.down[i]
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let common = &self.down[i] & &self.down[j];
        let size = common.count_ones(..);
        common
            .ones()
            .find(|&m| self.down[m].intersection_count(&common) == size)
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let common = &self.up[i] & &self.up[j];
        let size = common.count_ones(..);
        common
            .ones()
            .find(|&m| self.up[m].intersection_count(&common) == size)
    }

    /// `a ∧ b = bottom` and `a ∨ b = top`.
    pub fn are_complements(&self, a: usize, b: usize) -> bool {
        self.down[a].intersection_count(&self.down[b]) == 1
            && self.up[a].intersection_count(&self.up[b]) == 1
    }

    /// Whether every pair has a meet and a join.
    pub fn is_lattice(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (i..n).all(|j| self.meet(i, j).is_some() && self.join(i, j).is_some()))
    }

    pub fn atoms(&self) -> &[usize] {
        &self.upper_covers[self.bottom]
    }

    pub fn coatoms(&self) -> &[usize] {
        &self.lower_covers[self.top]
    }

    /// Covering pairs `(lower, upper)`, sorted.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .upper_covers
            .iter()
            .enumerate()
            .flat_map(|(i, ups)| ups.iter().map(move |&j| (i, j)))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Graphviz digraph of the covering relation, edges pointing upward.
    pub fn to_dot(&self, name: &str, labels: &[String]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for (i, label) in labels.iter().enumerate().take(self.len()) {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(label));
        }
        for (a, b) in self.hasse_edges() {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
