//! Small internal helpers shared by the graph layers.

/// Union-find over `0..n` with path compression, used for component counts
/// (vertices, strands, bubbles, boundary components).
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Deterministic: smaller root wins.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Number of distinct classes.
    pub fn count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Iterate all subsets of `items` as vectors, in mask order (∅ first, full
/// set last). Panics beyond 63 items — state sums at that size are out of
/// scope anyway.
pub(crate) fn subsets<T: Copy>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    assert!(items.len() < 64, "subset enumeration capped at 63 items");
    (0u64..(1u64 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, t)| *t)
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_counts_components() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        assert_eq!(uf.count(), 3);
        uf.union(1, 3);
        assert_eq!(uf.count(), 2);
    }

    #[test]
    fn subsets_cover_power_set() {
        let all: Vec<Vec<u32>> = subsets(&[1u32, 2, 3]).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], Vec::<u32>::new());
        assert_eq!(all[7], vec![1, 2, 3]);
    }
}
