//! Dense GF(2) matrices for finite code instances.
//!
//! Everything here is desk scale (N up to a few hundred), so the
//! representation is one byte per bit and elimination is the plain
//! Gauss-Jordan loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

const RETRY_CAP: u32 = 1000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("infeasible weights: {0}")]
    InfeasibleWeights(&'static str),
    #[error("no simple pairing found after {attempts} attempts")]
    RetryCapExceeded { attempts: u32 },
}

/// Dense binary matrix; all arithmetic is mod 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { rows, cols, bits: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u8>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        let bits = rows.into_iter().flatten().map(|b| b & 1).collect();
        Gf2Matrix { rows: n_rows, cols: n_cols, bits }
    }

    /// Column vector from a bit slice.
    pub fn column(bits: &[u8]) -> Self {
        Gf2Matrix { rows: bits.len(), cols: 1, bits: bits.iter().map(|b| b & 1).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.bits[row * self.cols + col] = value & 1;
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn col_weight(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col) == 1).count()
    }

    pub fn row_weight(&self, row: usize) -> usize {
        (0..self.cols).filter(|&c| self.get(row, c) == 1).count()
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Matrix product over GF(2). Panics on mismatched inner dimensions.
    pub fn mul(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Gf2Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    for c in 0..rhs.cols {
                        let v = out.get(r, c) ^ rhs.get(k, c);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let bits = self.bits.iter().zip(&rhs.bits).map(|(a, b)| a ^ b).collect();
        Gf2Matrix { rows: self.rows, cols: self.cols, bits }
    }

    /// Inverse by Gauss-Jordan elimination on `[self | I]`.
    pub fn inverse(&self) -> Result<Gf2Matrix, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::DimensionMismatch("inverse needs a square matrix"));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Gf2Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| work.get(r, col) == 1).ok_or(Gf2Error::Singular)?;
            if pivot != col {
                work.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            for r in 0..n {
                if r != col && work.get(r, col) == 1 {
                    work.xor_row(r, col);
                    inv.xor_row(r, col);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            let (va, vb) = (self.get(a, c), self.get(b, c));
            self.set(a, c, vb);
            self.set(b, c, va);
        }
    }

    /// rows[target] ^= rows[source]
    fn xor_row(&mut self, target: usize, source: usize) {
        for c in 0..self.cols {
            let v = self.get(target, c) ^ self.get(source, c);
            self.set(target, c, v);
        }
    }

    /// Same plain-text grid format as the base matrices, minus the mask.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let cells: Vec<String> =
                (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, crate::base_matrix::FormatError> {
        use crate::base_matrix::FormatError;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(FormatError::Missing("header line"))?;
        let mut fields = header.split_whitespace();
        let rows: usize = fields
            .next()
            .ok_or(FormatError::Missing("row count"))?
            .parse()
            .map_err(|_| FormatError::BadInt(header.to_string()))?;
        let cols: usize = fields
            .next()
            .ok_or(FormatError::Missing("column count"))?
            .parse()
            .map_err(|_| FormatError::BadInt(header.to_string()))?;
        let mut out = Gf2Matrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines.next().ok_or(FormatError::Missing("matrix row"))?;
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|t| t.parse::<u8>().map_err(|_| FormatError::BadInt(t.to_string())))
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(FormatError::RowLength { row: r, got: row.len(), want: cols });
            }
            for (c, &v) in row.iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Samples a binary matrix with exact column weight `col_weight` and row
/// weight `row_weight` by configuration-model socket pairing, rejecting
/// pairings with repeated edges. Deterministic for a given seed.
pub fn sample_regular(
    rows: usize,
    cols: usize,
    col_weight: usize,
    row_weight: usize,
    seed: u64,
) -> Result<Gf2Matrix, Gf2Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_regular_with(rows, cols, col_weight, row_weight, &mut rng)
}

fn sample_regular_with(
    rows: usize,
    cols: usize,
    col_weight: usize,
    row_weight: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Gf2Matrix, Gf2Error> {
    if rows * row_weight != cols * col_weight {
        return Err(Gf2Error::InfeasibleWeights("socket counts differ"));
    }
    if col_weight == 0 || row_weight == 0 {
        return Err(Gf2Error::InfeasibleWeights("weights must be positive"));
    }
    if col_weight > rows || row_weight > cols {
        return Err(Gf2Error::InfeasibleWeights("weight exceeds dimension"));
    }
    let row_sockets: Vec<usize> =
        (0..rows).flat_map(|r| std::iter::repeat(r).take(row_weight)).collect();
    let mut col_sockets: Vec<usize> =
        (0..cols).flat_map(|c| std::iter::repeat(c).take(col_weight)).collect();
    for _ in 0..RETRY_CAP {
        col_sockets.shuffle(rng);
        let mut m = Gf2Matrix::zeros(rows, cols);
        let simple = row_sockets.iter().zip(&col_sockets).all(|(&r, &c)| {
            if m.get(r, c) == 1 {
                false
            } else {
                m.set(r, c, 1);
                true
            }
        });
        if simple {
            return Ok(m);
        }
    }
    Err(Gf2Error::RetryCapExceeded { attempts: RETRY_CAP })
}

/// Samples a square regular matrix and resamples until it is invertible.
pub fn sample_regular_invertible(n: usize, weight: usize, seed: u64) -> Result<Gf2Matrix, Gf2Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_CAP {
        let m = sample_regular_with(n, n, weight, weight, &mut rng)?;
        if m.inverse().is_ok() {
            return Ok(m);
        }
    }
    Err(Gf2Error::RetryCapExceeded { attempts: RETRY_CAP })
}

/// Generator matrix `H1^T (H2^{-1})^T` of the MN code with parity check
/// `(H1 H2)`: for every information word `s`, the parity word
/// `n = H2^{-1} H1 s` satisfies `H1 s + H2 n = 0`.
pub fn mn_generator(h1: &Gf2Matrix, h2: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
    if h2.rows() != h2.cols() {
        return Err(Gf2Error::DimensionMismatch("H2 must be square"));
    }
    if h1.rows() != h2.rows() {
        return Err(Gf2Error::DimensionMismatch("H1 and H2 must have equal row counts"));
    }
    let inv = h2.inverse()?;
    Ok(h1.transpose().mul(&inv.transpose()))
}

/// Parity-check matrix `H3^T (H4^T)^{-1}` of the HA code.
pub fn ha_parity_check(h3: &Gf2Matrix, h4: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
    if h4.rows() != h4.cols() {
        return Err(Gf2Error::DimensionMismatch("H4 must be square"));
    }
    if h3.rows() != h4.rows() {
        return Err(Gf2Error::DimensionMismatch("H3 and H4 must have equal row counts"));
    }
    let inv = h4.transpose().inverse()?;
    Ok(h3.transpose().mul(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn all_ones_plus_identity(n: usize) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, u8::from(r != c));
            }
        }
        m
    }

    #[test]
    fn identity_inverts_to_itself() {
        let id = Gf2Matrix::identity(5);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn j_plus_i_is_self_inverse_for_n4() {
        let m = all_ones_plus_identity(4);
        assert_eq!(m.mul(&m), Gf2Matrix::identity(4));
        assert_eq!(m.inverse().unwrap(), m);
    }

    #[test]
    fn even_column_weights_are_singular() {
        // circulant with ones at (i, i) and (i, i+1): every column weight 2
        let n = 6;
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
            m.set(i, (i + 1) % n, 1);
        }
        assert_eq!(m.inverse(), Err(Gf2Error::Singular));
    }

    #[test]
    fn forced_weight_one_structure() {
        let m = sample_regular(2, 4, 1, 2, 11).unwrap();
        assert!((0..4).all(|c| m.col_weight(c) == 1));
        assert!((0..2).all(|r| m.row_weight(r) == 2));
    }

    #[test]
    fn saturated_weights_exhaust_retries() {
        // 4x8 with column weight 4 and row weight 8 forces the all-ones
        // matrix; a random pairing essentially never lands on it.
        assert_eq!(
            sample_regular(4, 8, 4, 8, 0),
            Err(Gf2Error::RetryCapExceeded { attempts: RETRY_CAP })
        );
    }

    #[test]
    fn socket_count_mismatch_rejected() {
        assert!(matches!(sample_regular(3, 4, 2, 2, 0), Err(Gf2Error::InfeasibleWeights(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_regular(16, 8, 4, 2, 42).unwrap();
        let b = sample_regular(16, 8, 4, 2, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ones(), 16 * 2);
    }

    #[test]
    fn generator_with_identity_h2_is_h1_transposed() {
        let h1 = sample_regular(6, 3, 4, 2, 7).unwrap();
        let g = mn_generator(&h1, &Gf2Matrix::identity(6)).unwrap();
        assert_eq!(g, h1.transpose());
    }

    #[test]
    fn generator_with_self_inverse_h2() {
        let h1 = sample_regular(4, 2, 2, 1, 3).unwrap();
        let h2 = all_ones_plus_identity(4);
        let g = mn_generator(&h1, &h2).unwrap();
        assert_eq!(g, h1.transpose().mul(&h2));
    }

    #[test]
    fn ha_with_identity_h4_is_h3_transposed() {
        let h3 = sample_regular(6, 3, 4, 2, 7).unwrap();
        let h = ha_parity_check(&h3, &Gf2Matrix::identity(6)).unwrap();
        assert_eq!(h, h3.transpose());
    }

    #[test]
    fn ha_of_zero_h3_is_zero() {
        let h3 = Gf2Matrix::zeros(5, 3);
        let h4 = sample_regular_invertible(5, 3, 9).unwrap();
        assert!(ha_parity_check(&h3, &h4).unwrap().is_zero());
    }

    #[test]
    fn parity_relation_holds_for_random_words() {
        // n = H2^{-1} H1 s zeroes the parity check (H1 H2) (s, n).
        let n = 24;
        let h1 = sample_regular(n, n / 2, 4, 2, 21).unwrap();
        let h2 = sample_regular_invertible(n, 3, 22).unwrap();
        let h2_inv = h2.inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let s: Vec<u8> = (0..n / 2).map(|_| rng.gen_range(0..2u8)).collect();
            let s = Gf2Matrix::column(&s);
            let parity = h2_inv.mul(&h1).mul(&s);
            let check = h1.mul(&s).add(&h2.mul(&parity));
            assert!(check.is_zero());
            // all-zero information maps to all-zero parity
            let zero = Gf2Matrix::zeros(n / 2, 1);
            assert!(h2_inv.mul(&h1).mul(&zero).is_zero());
            // the generator produces the same parity word
            let g = mn_generator(&h1, &h2).unwrap();
            assert_eq!(g.transpose().mul(&s), parity);
        }
    }

    #[test]
    fn text_round_trip() {
        let m = sample_regular(4, 6, 2, 3, 77).unwrap();
        assert_eq!(Gf2Matrix::from_text(&m.to_text()).unwrap(), m);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn inverse_round_trip(seed in any::<u64>(), n in 4usize..24) {
            let m = sample_regular_invertible(n, 3, seed).unwrap();
            let inv = m.inverse().unwrap();
            prop_assert_eq!(m.mul(&inv), Gf2Matrix::identity(n));
            prop_assert_eq!(inv.mul(&m), Gf2Matrix::identity(n));
        }

        #[test]
        fn sampled_weights_are_exact(seed in any::<u64>(), half in 2usize..12) {
            let m = sample_regular(2 * half, half, 4, 2, seed).unwrap();
            prop_assert!((0..half).all(|c| m.col_weight(c) == 4));
            prop_assert!((0..2 * half).all(|r| m.row_weight(r) == 2));
            prop_assert_eq!(m.ones(), 2 * half * 2);
        }
    }
}
