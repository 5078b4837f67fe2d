//! Published reference values used as golden data in tests and checks.

/// Planar tanglegrams of size `n` by core size `k = 2..=n`, with row totals,
/// exactly as published. The published row for `n = 8` sums to 63439 rather
/// than its total 63429: its `k = 4` entry reads 2435 where the count is 2425.
pub const CORE_COUNTS: &[(usize, &[u64], u64)] = &[
    (2, &[1], 1),
    (3, &[1, 1], 2),
    (4, &[3, 3, 5], 11),
    (5, &[13, 9, 20, 34], 76),
    (6, &[90, 46, 70, 170, 273], 649),
    (7, &[747, 312, 360, 680, 1638, 2436], 6173),
    (8, &[7040, 2580, 2435, 3570, 7371, 17052, 23391], 63429),
];

/// The published entries known to be misprinted, with their correct values:
/// `(n, k, published, correct)`.
pub const CORE_COUNT_ERRATA: &[(usize, usize, u64, u64)] = &[(8, 4, 2435, 2425)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingRow {
    pub n: usize,
    pub vertices: usize,
    pub tv_iterations: usize,
    /// Second eigenvalue as published; compared to `decimals` places.
    pub sigma2: f64,
    pub decimals: u32,
}

/// Flip-graph sizes, mixing iteration counts, and second eigenvalues.
pub const MIXING: &[MixingRow] = &[
    MixingRow { n: 5, vertices: 10, tv_iterations: 3, sigma2: 0.5590, decimals: 4 },
    MixingRow { n: 6, vertices: 68, tv_iterations: 7, sigma2: 0.7287, decimals: 4 },
    MixingRow { n: 7, vertices: 546, tv_iterations: 14, sigma2: 0.8478, decimals: 4 },
    MixingRow { n: 8, vertices: 4872, tv_iterations: 25, sigma2: 0.9512, decimals: 4 },
    MixingRow { n: 9, vertices: 46782, tv_iterations: 39, sigma2: 0.9677, decimals: 3 },
];
