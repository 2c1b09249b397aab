use std::fmt;

use fixedbitset::FixedBitSet;

/// Subset of `0..n` with a cached cardinality.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: FixedBitSet,
    len: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits, len: n }
    }

    /// # Panics
    /// If any vertex is `>= n`.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Self {
        let mut s = Self::new(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Size of the ground set.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    /// Returns `true` if `v` was newly added.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.bits.len(), "vertex {v} outside universe {}", self.bits.len());
        let was = self.bits.put(v);
        if !was {
            self.len += 1;
        }
        !was
    }

    /// Returns `true` if `v` was present.
    pub fn remove(&mut self, v: usize) -> bool {
        let was = self.contains(v);
        if was {
            self.bits.set(v, false);
            self.len -= 1;
        }
        was
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        VertexSet {
            len: self.universe() - self.len,
            bits,
        }
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
