//! Sobol low-discrepancy sequences, Gray-code construction.
//!
//! Direction numbers are the Joe-Kuo D(6) primitive-polynomial table, which
//! this crate only needs up to dimension 7 (space, time, and up to four
//! equation parameters for the parametric runs). Index 0 (the origin) is
//! skipped, so the first emitted coordinate in every dimension is 0.5.

const MAX_BITS: usize = 32;

// (degree s, coefficient a, initial m values); dimension 0 is van der Corput.
const JOE_KUO: [(u32, u32, &[u32]); 6] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
];

fn direction_numbers(dim: usize) -> [u32; MAX_BITS] {
    let mut v = [0u32; MAX_BITS];
    if dim == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (31 - k);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    let s = s as usize;
    for k in 0..s.min(MAX_BITS) {
        v[k] = m[k] << (31 - k);
    }
    for k in s..MAX_BITS {
        let mut vk = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                vk ^= v[k - j];
            }
        }
        v[k] = vk;
    }
    v
}

pub struct Sobol {
    v: Vec<[u32; MAX_BITS]>,
    x: Vec<u32>,
    index: u64,
}

impl Sobol {
    /// A `dims`-dimensional sequence; `dims` at most 7.
    pub fn new(dims: usize) -> Self {
        assert!(dims >= 1 && dims <= JOE_KUO.len() + 1, "unsupported dimension {dims}");
        Sobol {
            v: (0..dims).map(direction_numbers).collect(),
            x: vec![0; dims],
            index: 0,
        }
    }

    pub fn dims(&self) -> usize {
        self.x.len()
    }
}

impl Iterator for Sobol {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        // Gray-code step: flip the direction given by the lowest zero bit of
        // the running index; the index-0 origin is never emitted.
        let bit = self.index.trailing_ones() as usize;
        debug_assert!(bit < MAX_BITS);
        self.index += 1;
        for (xi, vi) in self.x.iter_mut().zip(&self.v) {
            *xi ^= vi[bit];
        }
        Some(self.x.iter().map(|&xi| xi as f64 / 4294967296.0).collect())
    }
}

/// First `n` points of the `dims`-dimensional sequence, in [0,1)^dims.
pub fn sobol_points(n: usize, dims: usize) -> Vec<Vec<f64>> {
    Sobol::new(dims).take(n).collect()
}
