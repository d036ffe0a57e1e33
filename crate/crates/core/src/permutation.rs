//! Permutations of `0..n` in one-line notation, with the tensor-slot action
//! `Perm(π)|i_1…i_n⟩ = |i_{π⁻¹(1)} … i_{π⁻¹(n)}⟩`.

use crate::partitions::Partition;

/// `images[t] = π(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Panics unless `images` is a bijection of `0..n`.
    pub fn from_images(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation: {images:?}");
            seen[i] = true;
        }
        Permutation { images }
    }

    /// The transposition of slots `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, t: usize) -> usize {
        self.images[t]
    }

    /// `(self ∘ other)(t) = self(other(t))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation { images: other.images.iter().map(|&t| self.images[t]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (t, &p) in self.images.iter().enumerate() {
            inv[p] = t;
        }
        Permutation { images: inv }
    }

    pub fn cycle_type(&self) -> Partition {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(cycles).expect("sorted cycle lengths form a partition")
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        let ct = self.cycle_type();
        if (self.len() - ct.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Moves the entry in slot `t` of `src` to slot `π(t)` of `dst`.
    pub fn permute_slots<T: Copy>(&self, src: &[T], dst: &mut [T]) {
        for (t, &p) in self.images.iter().enumerate() {
            dst[p] = src[t];
        }
    }
}

/// All permutations of `0..n` in lexicographic order of their image lists.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}
