//! Prime-field arithmetic, Lagrange basis evaluation, and linear
//! low-degree-extension sketching.
//!
//! Everything downstream sketches frequency vectors as evaluations of their
//! low-degree extension at a random point. The field is fixed to
//! `F_p` with `p = 2^61 - 1`, which gives fast Mersenne reduction and keeps
//! the soundness error below `2^-40` for every universe size used at desk
//! scale.
//!
//! A frequency vector over a universe of tuples is laid out on a base-`ell`
//! digit grid: each tuple coordinate owns a contiguous block of digits, so a
//! wildcard update that fixes some coordinates and leaves others free (or
//! constrained to a contiguous sub-range) factors into per-digit sums and
//! costs O(d) field operations using cached prefix sums of the Lagrange
//! basis values.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use thiserror::Error;

/// Field modulus: the Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1u64 << 61) - 1;

/// Bits per transmitted field element, used by the communication meter.
pub const WORD_BITS: u64 = 61;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("basis index {index} out of range for branching factor {ell}")]
    BasisIndexOutOfRange { index: u64, ell: u64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("universe index {index} out of range (size {size})")]
    IndexOutOfRange { index: u64, size: u64 },
}

/// An element of F_p, kept in canonical form `0 <= value < p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn new(v: u64) -> Self {
        FieldElem(v % MODULUS)
    }

    /// Embeds a signed integer; negative values map to `p - |v| mod p`.
    pub fn from_i64(v: i64) -> Self {
        if v >= 0 {
            FieldElem(v as u64 % MODULUS)
        } else {
            let m = (v.unsigned_abs()) % MODULUS;
            if m == 0 {
                FieldElem(0)
            } else {
                FieldElem(MODULUS - m)
            }
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.pow(MODULUS - 2)
    }

    /// Uniform element of [0, p), drawn by rejection so the distribution is
    /// exact and the draw sequence is reproducible from the RNG stream.
    pub fn random(rng: &mut impl RngCore) -> Self {
        loop {
            let x = rng.next_u64() >> 3; // 61 bits
            if x < MODULUS {
                return FieldElem(x);
            }
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        let s = self.0 + rhs.0; // < 2^62, no overflow
        FieldElem(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        if self.0 >= rhs.0 {
            FieldElem(self.0 - rhs.0)
        } else {
            FieldElem(self.0 + MODULUS - rhs.0)
        }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        let wide = self.0 as u128 * rhs.0 as u128;
        // Mersenne fold: x = hi*2^61 + lo == hi + lo (mod 2^61 - 1).
        let lo = (wide as u64) & MODULUS;
        let hi = (wide >> 61) as u64;
        let mut s = lo + hi;
        s = (s & MODULUS) + (s >> 61);
        FieldElem(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        if self.0 == 0 {
            self
        } else {
            FieldElem(MODULUS - self.0)
        }
    }
}

impl AddAssign for FieldElem {
    fn add_assign(&mut self, rhs: FieldElem) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElem {
    fn sub_assign(&mut self, rhs: FieldElem) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElem {
    fn mul_assign(&mut self, rhs: FieldElem) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for FieldElem {
    fn sum<I: Iterator<Item = FieldElem>>(iter: I) -> FieldElem {
        iter.fold(FieldElem::ZERO, |a, b| a + b)
    }
}

/// Lagrange basis polynomial for node `k` over nodes `{0, .., ell-1}`,
/// evaluated at `x`. Degree `ell - 1`; equals 1 at `k` and 0 at the other
/// nodes.
pub fn chi(k: u64, x: FieldElem, ell: u64) -> Result<FieldElem, FieldError> {
    if k >= ell {
        return Err(FieldError::BasisIndexOutOfRange { index: k, ell });
    }
    let mut num = FieldElem::ONE;
    let mut den = FieldElem::ONE;
    let fk = FieldElem::new(k);
    for t in 0..ell {
        if t == k {
            continue;
        }
        let ft = FieldElem::new(t);
        num *= x - ft;
        den *= fk - ft;
    }
    Ok(num * den.inv())
}

/// Product of per-coordinate basis values: the multivariate Lagrange basis
/// for the grid point `v`, evaluated at `r`.
pub fn chi_vec(v: &[u64], r: &[FieldElem], ell: u64) -> Result<FieldElem, FieldError> {
    if v.len() != r.len() {
        return Err(FieldError::DimensionMismatch {
            left: v.len(),
            right: r.len(),
        });
    }
    let mut acc = FieldElem::ONE;
    for (&vj, &rj) in v.iter().zip(r.iter()) {
        acc *= chi(vj, rj, ell)?;
    }
    Ok(acc)
}

/// One coordinate of a wildcard update pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    /// The coordinate is pinned to a single value.
    Fix(u64),
    /// Contiguous inclusive sub-range `lo..=hi` of the coordinate.
    Span(u64, u64),
    /// The full coordinate range `0..radix`.
    All,
}

/// A product pattern over the tuple universe: one [`Coord`] per coordinate.
pub type Pattern = Vec<Coord>;

/// Digit layout of a tuple universe on a uniform base-`ell` grid.
///
/// Each coordinate `c` with radix `m_c` owns `widths[c]` consecutive digits
/// (little-endian, lowest digits first). Values `>= m_c` inside a block are
/// never updated and therefore always carry frequency zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridParams {
    pub ell: u64,
    pub radices: Vec<u64>,
    pub widths: Vec<usize>,
    pub offsets: Vec<usize>,
    pub d: usize,
}

fn ceil_log(m: u64, base: u64) -> usize {
    debug_assert!(base >= 2);
    let mut w = 1;
    let mut cap = base;
    while cap < m {
        cap = cap.saturating_mul(base);
        w += 1;
    }
    w
}

/// Smallest `ell` with `ell^w >= m`.
fn ceil_root(m: u64, w: usize) -> u64 {
    if m <= 1 {
        return 2;
    }
    let mut lo = 2u64;
    let mut hi = m;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if mid.saturating_pow(w as u32) >= m {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

impl GridParams {
    /// Log-round layout: binary grid, `ceil(log2 m_c)` digits per
    /// coordinate. For a flat universe of size `u` this is exactly
    /// `ceil(log2 u)` digits.
    pub fn log_round(radices: &[u64]) -> GridParams {
        Self::with_ell(radices, 2)
    }

    fn with_ell(radices: &[u64], ell: u64) -> GridParams {
        let widths: Vec<usize> = radices.iter().map(|&m| ceil_log(m.max(2), ell)).collect();
        Self::from_widths(radices, ell, widths)
    }

    /// Constant-round layout: exactly `gamma` digits distributed over the
    /// coordinates, branching factor `ceil(u^(1/gamma))` rounded up to make
    /// every coordinate fit its digit block. Requires `gamma >=` number of
    /// coordinates.
    pub fn const_round(radices: &[u64], gamma: usize) -> Result<GridParams, FieldError> {
        let c = radices.len();
        if gamma < c {
            return Err(FieldError::DimensionMismatch {
                left: c,
                right: gamma,
            });
        }
        let mut widths = vec![1usize; c];
        let need = |m: u64, w: usize| ceil_root(m, w);
        for _ in c..gamma {
            // give the extra digit to the coordinate that currently forces
            // the largest branching factor
            let (worst, _) = widths
                .iter()
                .enumerate()
                .max_by_key(|&(i, &w)| need(radices[i], w))
                .expect("non-empty radices");
            widths[worst] += 1;
        }
        let ell = radices
            .iter()
            .zip(widths.iter())
            .map(|(&m, &w)| need(m, w))
            .max()
            .unwrap_or(2)
            .max(2);
        Ok(Self::from_widths(radices, ell, widths))
    }

    /// The first coordinate occupies the most significant digits, so flat
    /// index order coincides with lexicographic tuple order (canonical
    /// replay orderings compare either way).
    fn from_widths(radices: &[u64], ell: u64, widths: Vec<usize>) -> GridParams {
        let d: usize = widths.iter().sum();
        let mut offsets = Vec::with_capacity(widths.len());
        let mut below = d;
        for &w in &widths {
            below -= w;
            offsets.push(below);
        }
        GridParams {
            ell,
            radices: radices.to_vec(),
            widths,
            offsets,
            d,
        }
    }

    /// Semantic universe size: the product of coordinate radices.
    pub fn universe_size(&self) -> u64 {
        self.radices.iter().product()
    }

    /// Grid size `ell^d`, including padding entries that are never updated.
    pub fn grid_size(&self) -> u64 {
        self.ell.pow(self.d as u32)
    }

    /// Flat grid index of a tuple. Coordinate `c` occupies digits
    /// `offsets[c] .. offsets[c] + widths[c]`.
    pub fn index_of(&self, tuple: &[u64]) -> u64 {
        debug_assert_eq!(tuple.len(), self.radices.len());
        let mut idx = 0u64;
        for (c, &v) in tuple.iter().enumerate() {
            debug_assert!(v < self.radices[c], "coordinate {c} value {v} out of range");
            idx += v * self.ell.pow(self.offsets[c] as u32);
        }
        idx
    }

    pub fn decode(&self, idx: u64) -> Vec<u64> {
        self.widths
            .iter()
            .zip(self.offsets.iter())
            .map(|(&w, &off)| (idx / self.ell.pow(off as u32)) % self.ell.pow(w as u32))
            .collect()
    }

    /// Base-`ell` digits of a flat index, little-endian, length `d`.
    pub fn digits(&self, mut idx: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            out.push(idx % self.ell);
            idx /= self.ell;
        }
        out
    }

    /// Enumerates the flat indices matched by a product pattern.
    pub fn expand_pattern(&self, pattern: &[Coord]) -> Vec<u64> {
        debug_assert_eq!(pattern.len(), self.radices.len());
        let mut out = vec![0u64];
        for (c, coord) in pattern.iter().enumerate() {
            let base = self.ell.pow(self.offsets[c] as u32);
            let (lo, hi) = match *coord {
                Coord::Fix(v) => (v, v),
                Coord::Span(lo, hi) => (lo, hi),
                Coord::All => (0, self.radices[c] - 1),
            };
            debug_assert!(hi < self.radices[c]);
            if lo > hi {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
            for &prefix in &out {
                for v in lo..=hi {
                    next.push(prefix + v * base);
                }
            }
            out = next;
        }
        out
    }
}

/// Per-digit Lagrange basis values at a fixed point, with prefix sums so
/// contiguous digit ranges fold in O(1) per digit.
#[derive(Clone, Debug)]
pub struct ChiTables {
    ell: u64,
    /// `values[t][x] = chi_x(r_t)` for digit `t`.
    values: Vec<Vec<FieldElem>>,
    /// `prefix[t][x] = sum_{y <= x} chi_y(r_t)`.
    prefix: Vec<Vec<FieldElem>>,
}

impl ChiTables {
    pub fn build(point: &[FieldElem], ell: u64) -> ChiTables {
        let mut values = Vec::with_capacity(point.len());
        let mut prefix = Vec::with_capacity(point.len());
        for &rt in point {
            let mut row = Vec::with_capacity(ell as usize);
            for k in 0..ell {
                row.push(chi(k, rt, ell).expect("k < ell"));
            }
            let mut pre = Vec::with_capacity(ell as usize);
            let mut acc = FieldElem::ZERO;
            for &v in &row {
                acc += v;
                pre.push(acc);
            }
            values.push(row);
            prefix.push(pre);
        }
        ChiTables {
            ell,
            values,
            prefix,
        }
    }

    pub fn chi_at(&self, digit: usize, k: u64) -> FieldElem {
        self.values[digit][k as usize]
    }

    /// `sum_{y <= x} chi_y` at digit `digit`.
    pub fn prefix_at(&self, digit: usize, x: u64) -> FieldElem {
        self.prefix[digit][x as usize]
    }

    /// Basis product for a fixed multi-digit value `v` written base-`ell`
    /// across digits `off .. off+width`.
    fn fixed_factor(&self, off: usize, width: usize, mut v: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        for t in 0..width {
            acc *= self.values[off + t][(v % self.ell) as usize];
            v /= self.ell;
        }
        acc
    }

    /// `sum_{v < bound} prod_t chi_{v_t}(r_{off+t})` over a digit block,
    /// by most-significant-digit decomposition over the cached prefix sums.
    fn below_factor(&self, off: usize, width: usize, bound: u64) -> FieldElem {
        let block = self.ell.pow(width as u32);
        debug_assert!(bound <= block);
        if bound == 0 {
            return FieldElem::ZERO;
        }
        if bound == block {
            let mut acc = FieldElem::ONE;
            for t in 0..width {
                acc *= self.prefix[off + t][(self.ell - 1) as usize];
            }
            return acc;
        }
        // digits of bound, little-endian
        let mut digits = Vec::with_capacity(width);
        let mut b = bound;
        for _ in 0..width {
            digits.push(b % self.ell);
            b /= self.ell;
        }
        let mut acc = FieldElem::ZERO;
        // suffix_fixed = product over digits above position t of chi at
        // bound's digit
        let mut suffix_fixed = FieldElem::ONE;
        for t in (0..width).rev() {
            let dt = digits[t];
            if dt > 0 {
                let mut term = suffix_fixed * self.prefix[off + t][(dt - 1) as usize];
                for s in 0..t {
                    term *= self.prefix[off + s][(self.ell - 1) as usize];
                }
                acc += term;
            }
            suffix_fixed *= self.values[off + t][dt as usize];
        }
        acc
    }

    /// Factor contributed by one coordinate of a product pattern.
    fn coord_factor(&self, grid: &GridParams, c: usize, coord: Coord) -> FieldElem {
        let off = grid.offsets[c];
        let w = grid.widths[c];
        match coord {
            Coord::Fix(v) => {
                debug_assert!(v < grid.radices[c]);
                self.fixed_factor(off, w, v)
            }
            Coord::Span(lo, hi) => {
                debug_assert!(hi < grid.radices[c]);
                if lo > hi {
                    FieldElem::ZERO
                } else {
                    self.below_factor(off, w, hi + 1) - self.below_factor(off, w, lo)
                }
            }
            Coord::All => self.below_factor(off, w, grid.radices[c]),
        }
    }

    /// Full basis weight `chi_v(r)` of one flat index.
    pub fn index_weight(&self, grid: &GridParams, mut idx: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        for t in 0..grid.d {
            acc *= self.values[t][(idx % self.ell) as usize];
            idx /= self.ell;
        }
        acc
    }

    /// Combined weight of every index matched by a product pattern:
    /// the product over coordinates of per-coordinate factors.
    pub fn pattern_weight(&self, grid: &GridParams, pattern: &[Coord]) -> FieldElem {
        debug_assert_eq!(pattern.len(), grid.radices.len());
        debug_assert_eq!(self.ell, grid.ell);
        let mut acc = FieldElem::ONE;
        for (c, &coord) in pattern.iter().enumerate() {
            if acc.is_zero() {
                break;
            }
            acc *= self.coord_factor(grid, c, coord);
        }
        acc
    }
}

/// The verifier's entire stream state for one derived vector: the random
/// evaluation point `r` (fixed before the stream), cached basis tables, and
/// the running value of `f_a(r)`.
///
/// The accumulator is a linear function of the frequency vector, so updates
/// commute and sketches over a shared `r` add.
#[derive(Clone, Debug)]
pub struct LdeSketch {
    pub grid: GridParams,
    pub r: Vec<FieldElem>,
    tables: ChiTables,
    acc: FieldElem,
}

impl LdeSketch {
    pub fn new(grid: GridParams, rng: &mut impl RngCore) -> LdeSketch {
        let r: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(rng)).collect();
        let tables = ChiTables::build(&r, grid.ell);
        LdeSketch {
            grid,
            r,
            tables,
            acc: FieldElem::ZERO,
        }
    }

    /// For tests: a sketch at a chosen evaluation point.
    pub fn at_point(grid: GridParams, r: Vec<FieldElem>) -> LdeSketch {
        assert_eq!(r.len(), grid.d);
        let tables = ChiTables::build(&r, grid.ell);
        LdeSketch {
            grid,
            r,
            tables,
            acc: FieldElem::ZERO,
        }
    }

    pub fn value(&self) -> FieldElem {
        self.acc
    }

    pub fn tables(&self) -> &ChiTables {
        &self.tables
    }

    /// Single-entry update `a[i] += delta`. The flat index must decode to
    /// an in-range tuple (grid padding holes are not addressable).
    pub fn update(&mut self, index: u64, delta: i64) -> Result<(), FieldError> {
        let size = self.grid.universe_size();
        if index >= self.grid.grid_size()
            || self
                .grid
                .decode(index)
                .iter()
                .zip(self.grid.radices.iter())
                .any(|(&v, &m)| v >= m)
        {
            return Err(FieldError::IndexOutOfRange { index, size });
        }
        let w = self.tables.index_weight(&self.grid, index);
        self.acc += FieldElem::from_i64(delta) * w;
        Ok(())
    }

    /// Wildcard update: adds `delta` to every member of a product pattern.
    /// Identical to folding [`LdeSketch::update`] over the expansion, in
    /// O(d) field operations. An empty range is a no-op.
    pub fn update_pattern(&mut self, pattern: &[Coord], delta: i64) {
        let w = self.tables.pattern_weight(&self.grid, pattern);
        self.acc += FieldElem::from_i64(delta) * w;
    }

    pub fn update_tuple(&mut self, tuple: &[u64], delta: i64) {
        let idx = self.grid.index_of(tuple);
        let w = self.tables.index_weight(&self.grid, idx);
        self.acc += FieldElem::from_i64(delta) * w;
    }

    /// Verifier state size in bits: the evaluation point plus the
    /// accumulator. Basis tables are derived data, recomputable from `r`.
    pub fn space_bits(&self) -> u64 {
        (self.r.len() as u64 + 1) * WORD_BITS
    }
}

/// Evaluates the low-degree extension of a sparse vector at an arbitrary
/// point: `sum_v a_v * chi_v(point)`. This is how the prover evaluates
/// `f_a` anywhere; the verifier can only afford its single sketched point.
pub fn lde_eval_sparse(
    grid: &GridParams,
    entries: &std::collections::HashMap<u64, i64>,
    point: &[FieldElem],
) -> Result<FieldElem, FieldError> {
    if point.len() != grid.d {
        return Err(FieldError::DimensionMismatch {
            left: point.len(),
            right: grid.d,
        });
    }
    let size = grid.grid_size();
    let tables = ChiTables::build(point, grid.ell);
    let mut acc = FieldElem::ZERO;
    for (&idx, &count) in entries {
        if idx >= size {
            return Err(FieldError::IndexOutOfRange { index: idx, size });
        }
        acc += FieldElem::from_i64(count) * tables.index_weight(grid, idx);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashMap;

    #[test]
    fn arithmetic_basics() {
        let a = FieldElem::new(MODULUS - 1);
        let b = FieldElem::new(2);
        assert_eq!(a + b, FieldElem::ONE);
        assert_eq!(FieldElem::ZERO - b, FieldElem::from_i64(-2));
        assert_eq!(b * b.inv(), FieldElem::ONE);
        assert_eq!(FieldElem::new(7).pow(0), FieldElem::ONE);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = FieldElem::random(&mut rng);
            let y = FieldElem::random(&mut rng);
            let z = FieldElem::random(&mut rng);
            assert_eq!((x + y) * z, x * z + y * z);
            if !x.is_zero() {
                assert_eq!(x * x.inv(), FieldElem::ONE);
            }
        }
    }

    #[test]
    fn chi_is_indicator_on_nodes() {
        assert_eq!(chi(1, FieldElem::new(1), 4).unwrap(), FieldElem::ONE);
        assert_eq!(chi(1, FieldElem::new(3), 4).unwrap(), FieldElem::ZERO);
        // closed form at x = 7, k = 2, ell = 4:
        // ((7-0)(7-1)(7-3)) / ((2-0)(2-1)(2-3)) = 168 / (-2) = -84
        assert_eq!(
            chi(2, FieldElem::new(7), 4).unwrap(),
            FieldElem::from_i64(-84)
        );
        assert!(matches!(
            chi(4, FieldElem::new(0), 4),
            Err(FieldError::BasisIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn chi_vec_composes_and_indicates() {
        let ell = 3;
        let w = [1u64, 2, 0];
        let embed: Vec<FieldElem> = w.iter().map(|&x| FieldElem::new(x)).collect();
        assert_eq!(chi_vec(&w, &embed, ell).unwrap(), FieldElem::ONE);
        let other: Vec<FieldElem> = [1u64, 1, 0].iter().map(|&x| FieldElem::new(x)).collect();
        assert_eq!(chi_vec(&w, &other, ell).unwrap(), FieldElem::ZERO);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let r: Vec<FieldElem> = (0..3).map(|_| FieldElem::random(&mut rng)).collect();
        let mut prod = FieldElem::ONE;
        for j in 0..3 {
            prod *= chi(w[j], r[j], ell).unwrap();
        }
        assert_eq!(chi_vec(&w, &r, ell).unwrap(), prod);
        assert!(chi_vec(&w, &r[..2], ell).is_err());
    }

    #[test]
    fn grid_layposition_round_trips() {
        let grid = GridParams::log_round(&[5, 3, 7]);
        assert_eq!(grid.ell, 2);
        for i in 0..5 {
            for j in 0..3 {
                for k in 0..7 {
                    let idx = grid.index_of(&[i, j, k]);
                    assert_eq!(grid.decode(idx), vec![i, j, k]);
                }
            }
        }
        let flat = GridParams::log_round(&[1000]);
        assert_eq!(flat.d, 10); // ceil(log2 1000)
    }

    #[test]
    fn const_round_grids() {
        let g = GridParams::const_round(&[64], 2).unwrap();
        assert_eq!((g.ell, g.d), (8, 2));
        let g = GridParams::const_round(&[256], 3).unwrap();
        assert_eq!((g.ell, g.d), (7, 3));
        let g = GridParams::const_round(&[1024], 3).unwrap();
        assert_eq!((g.ell, g.d), (11, 3));
        let g = GridParams::const_round(&[12, 12, 12], 3).unwrap();
        assert_eq!((g.ell, g.d), (12, 3));
        assert!(GridParams::const_round(&[4, 4, 4], 2).is_err());
    }

    #[test]
    fn sketch_insert_then_delete_cancels() {
        let grid = GridParams::log_round(&[100]);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut s = LdeSketch::new(grid, &mut rng);
        s.update(42, 1).unwrap();
        s.update(42, -1).unwrap();
        assert_eq!(s.value(), FieldElem::ZERO);
        assert!(s.update(100, 1).is_err());
    }

    #[test]
    fn sketch_linearity_over_random_streams() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let grid = GridParams::log_round(&[64]);
            let r: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(&mut rng)).collect();
            let mut a = LdeSketch::at_point(grid.clone(), r.clone());
            let mut b = LdeSketch::at_point(grid.clone(), r.clone());
            let mut merged = LdeSketch::at_point(grid, r);
            for _ in 0..10 {
                let i = rng.next_u64() % 64;
                let d = (rng.next_u64() % 5) as i64 - 2;
                a.update(i, d).unwrap();
                merged.update(i, d).unwrap();
            }
            for _ in 0..10 {
                let i = rng.next_u64() % 64;
                let d = (rng.next_u64() % 5) as i64 - 2;
                b.update(i, d).unwrap();
                merged.update(i, d).unwrap();
            }
            assert_eq!(a.value() + b.value(), merged.value());
        }
    }

    #[test]
    fn sketch_matches_dense_evaluation() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let grid = GridParams::log_round(&[13, 4, 5]); // 260 entries
        let r: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(&mut rng)).collect();
        let mut s = LdeSketch::at_point(grid.clone(), r.clone());
        let mut entries: HashMap<u64, i64> = HashMap::new();
        for _ in 0..300 {
            let t = [
                rng.next_u64() % 13,
                rng.next_u64() % 4,
                rng.next_u64() % 5,
            ];
            let d = (rng.next_u64() % 7) as i64 - 3;
            s.update_tuple(&t, d);
            *entries.entry(grid.index_of(&t)).or_insert(0) += d;
        }
        let direct = lde_eval_sparse(&grid, &entries, &r).unwrap();
        assert_eq!(s.value(), direct);
    }

    #[test]
    fn interpolation_at_grid_points() {
        // for every grid point v, f_a(embed(v)) = a_v
        let grid = GridParams::log_round(&[16, 16]); // 256 entries
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut entries: HashMap<u64, i64> = HashMap::new();
        for _ in 0..60 {
            let idx = grid.index_of(&[rng.next_u64() % 16, rng.next_u64() % 16]);
            *entries.entry(idx).or_insert(0) += (rng.next_u64() % 9) as i64 - 4;
        }
        for i in 0..16u64 {
            for j in 0..16u64 {
                let idx = grid.index_of(&[i, j]);
                let point: Vec<FieldElem> = grid
                    .digits(idx)
                    .into_iter()
                    .map(FieldElem::new)
                    .collect();
                let got = lde_eval_sparse(&grid, &entries, &point).unwrap();
                let want = FieldElem::from_i64(*entries.get(&idx).unwrap_or(&0));
                assert_eq!(got, want);
            }
        }
        // empty map evaluates to zero anywhere
        let point: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(&mut rng)).collect();
        assert_eq!(
            lde_eval_sparse(&grid, &HashMap::new(), &point).unwrap(),
            FieldElem::ZERO
        );
    }

    #[test]
    fn wildcard_updates_match_enumeration() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for trial in 0..40 {
            let radices: Vec<u64> = (0..3).map(|_| 2 + rng.next_u64() % 15).collect();
            let grid = if trial % 2 == 0 {
                GridParams::log_round(&radices)
            } else {
                GridParams::const_round(&radices, 3 + (trial % 3) as usize).unwrap()
            };
            if grid.universe_size() > 4096 {
                continue;
            }
            let r: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(&mut rng)).collect();
            let mut fast = LdeSketch::at_point(grid.clone(), r.clone());
            let mut slow = LdeSketch::at_point(grid.clone(), r);
            for _ in 0..20 {
                let pattern: Pattern = radices
                    .iter()
                    .map(|&m| match rng.next_u64() % 3 {
                        0 => Coord::Fix(rng.next_u64() % m),
                        1 => {
                            let lo = rng.next_u64() % m;
                            let hi = lo + rng.next_u64() % (m - lo);
                            Coord::Span(lo, hi)
                        }
                        _ => Coord::All,
                    })
                    .collect();
                let delta = (rng.next_u64() % 9) as i64 - 4;
                fast.update_pattern(&pattern, delta);
                for idx in grid.expand_pattern(&pattern) {
                    slow.update(idx, delta).unwrap();
                }
            }
            assert_eq!(fast.value(), slow.value(), "radices {radices:?}");
        }
    }

    #[test]
    fn full_wildcard_on_power_universe_is_product_of_sums() {
        let grid = GridParams::log_round(&[64]);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let r: Vec<FieldElem> = (0..grid.d).map(|_| FieldElem::random(&mut rng)).collect();
        let mut s = LdeSketch::at_point(grid.clone(), r.clone());
        s.update_pattern(&[Coord::All], 1);
        let mut expect = FieldElem::ONE;
        for &rj in &r {
            let mut col = FieldElem::ZERO;
            for x in 0..2 {
                col += chi(x, rj, 2).unwrap();
            }
            expect *= col;
        }
        assert_eq!(s.value(), expect);
    }

    #[test]
    fn prefix_sums_match_direct_summation() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for ell in [2u64, 3, 5, 8, 11] {
            let point: Vec<FieldElem> = (0..2).map(|_| FieldElem::random(&mut rng)).collect();
            let tables = ChiTables::build(&point, ell);
            for t in 0..2 {
                let mut acc = FieldElem::ZERO;
                for x in 0..ell {
                    acc += chi(x, point[t], ell).unwrap();
                    assert_eq!(tables.prefix_at(t, x), acc);
                }
            }
        }
    }

    #[test]
    fn pattern_with_empty_span_is_noop() {
        let grid = GridParams::log_round(&[8, 8]);
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let mut s = LdeSketch::new(grid, &mut rng);
        s.update_pattern(&[Coord::Span(5, 4), Coord::All], 3);
        assert_eq!(s.value(), FieldElem::ZERO);
    }
}
