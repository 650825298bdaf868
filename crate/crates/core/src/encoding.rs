//! Binary and base-`delta` encodings, and the encoding matrices `E_t(delta)`
//! whose integer kernel is spanned by `(1, delta, ..., delta^(t-1))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::blockmat::IntMatrix;
use crate::error::{Error, Result};

/// Little-endian bit vector of a non-negative integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    bits: Vec<u8>,
}

impl BitRow {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn eta(&self) -> usize {
        self.bits.len()
    }

    /// `sum 2^i bits[i]`. Only meaningful for rows produced by [`enc`].
    pub fn value(&self) -> BigInt {
        self.bits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &b| (acc << 1) + BigInt::from(b))
    }

    pub fn reversed(&self) -> BitRow {
        BitRow {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.bits.iter().map(|&b| BigInt::from(b)).collect()
    }
}

fn non_negative(x: &BigInt, what: &str) -> Result<()> {
    if x.is_negative() {
        return Err(Error::NegativeInput(format!("{what} = {x}")));
    }
    Ok(())
}

/// `ceil(log2(x + 1)) + 1`, the length of `enc(x)`.
pub fn eta(x: &BigInt) -> Result<usize> {
    non_negative(x, "encoded value")?;
    Ok(x.bits() as usize + 1)
}

/// Binary encoding of `x` with `eta(x)` bits; the last bit is always zero.
pub fn enc(x: &BigInt) -> Result<BitRow> {
    let len = eta(x)?;
    let magnitude = x.magnitude();
    Ok(BitRow {
        bits: (0..len).map(|i| u8::from(magnitude.bit(i as u64))).collect(),
    })
}

/// `enc(x)` in reverse order.
pub fn enc_reversed(x: &BigInt) -> Result<BitRow> {
    Ok(enc(x)?.reversed())
}

/// Base-`delta` digits of `x`, least significant first, padded to `width`.
pub fn digits(x: &BigInt, delta: &BigInt, width: usize) -> Result<Vec<BigInt>> {
    non_negative(x, "digit input")?;
    if *delta < BigInt::from(2) {
        return Err(Error::InvalidParameter(format!("base must be at least 2, got {delta}")));
    }
    let mut rest = x.clone();
    let mut out = Vec::with_capacity(width);
    for _ in 0..width {
        let (q, r) = rest.div_rem(delta);
        out.push(r);
        rest = q;
    }
    if !rest.is_zero() {
        return Err(Error::DigitOverflow {
            value: x.to_string(),
            base: delta.to_string(),
            width,
        });
    }
    Ok(out)
}

/// `(1, delta, ..., delta^(len-1))`.
pub fn powers(delta: &BigInt, len: usize) -> Vec<BigInt> {
    std::iter::successors(Some(BigInt::one()), |p| Some(p * delta))
        .take(len)
        .collect()
}

/// `t` bits (powers `1, 2, ..., 2^(t-1)`) whose weighted sum is `v`, for
/// `0 <= v <= 2^t`. Values below `2^t` use the binary expansion; `2^t` itself
/// is written as a 2 in the top position so every entry stays within `{0,1,2}`.
pub fn binary_row(v: &BigInt, t: usize) -> Result<Vec<BigInt>> {
    non_negative(v, "binary row value")?;
    let top = BigInt::one() << t;
    if *v == top && t > 0 {
        let mut row = vec![BigInt::zero(); t];
        row[t - 1] = BigInt::from(2);
        return Ok(row);
    }
    digits(v, &BigInt::from(2), t)
}

fn check_t(t: usize) -> Result<()> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "encoding matrices need t >= 2, got {t}"
        )));
    }
    Ok(())
}

/// `E_t(delta)`: `(t-1) x t` with `delta` on the diagonal and `-1` on the
/// superdiagonal.
pub fn encoding_matrix(t: usize, delta: &BigInt) -> Result<IntMatrix> {
    check_t(t)?;
    let mut e = IntMatrix::zeros(t - 1, t);
    for i in 0..t - 1 {
        e.set(i, i, delta.clone());
        e.set(i, i + 1, BigInt::from(-1));
    }
    Ok(e)
}

/// `E_t(2)` with rows and columns reversed: `-1` on the diagonal, `2` on the
/// superdiagonal.
pub fn encoding_matrix_reversed(t: usize) -> Result<IntMatrix> {
    check_t(t)?;
    let mut e = IntMatrix::zeros(t - 1, t);
    for i in 0..t - 1 {
        e.set(i, i, BigInt::from(-1));
        e.set(i, i + 1, BigInt::from(2));
    }
    Ok(e)
}

/// Reverses the order of both rows and columns.
pub fn reverse_rows_and_cols(a: &IntMatrix) -> IntMatrix {
    let (m, n) = (a.rows(), a.cols());
    IntMatrix::from_entries(m, n, a.iter().map(|(i, j, v)| (m - 1 - i, n - 1 - j, v.clone())))
        .expect("indices stay in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::{band_check, Band};
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bits(row: &BitRow) -> Vec<u8> {
        row.bits().to_vec()
    }

    #[test]
    fn enc_examples() {
        assert_eq!(bits(&enc(&b(0)).unwrap()), vec![0]);
        assert_eq!(bits(&enc(&b(5)).unwrap()), vec![1, 0, 1, 0]);
        assert_eq!(bits(&enc(&b(2)).unwrap()), vec![0, 1, 0]);
        assert!(matches!(enc(&b(-1)), Err(Error::NegativeInput(_))));
    }

    #[test]
    fn enc_reversed_examples() {
        assert_eq!(bits(&enc_reversed(&b(5)).unwrap()), vec![0, 1, 0, 1]);
        assert_eq!(bits(&enc_reversed(&b(0)).unwrap()), vec![0]);
        assert_eq!(enc_reversed(&b(9)).unwrap().reversed(), enc(&b(9)).unwrap());
        assert!(enc_reversed(&b(-3)).is_err());
    }

    #[test]
    fn enc_identity_up_to_a_million() {
        for x in (0..=1_000_000i64).step_by(7).chain([1_000_000]) {
            let row = enc(&b(x)).unwrap();
            assert_eq!(row.value(), b(x));
            assert_eq!(*row.bits().last().unwrap(), 0);
        }
    }

    #[test]
    fn enc_handles_huge_values() {
        let x = (BigInt::one() << 100) + 1;
        let row = enc(&x).unwrap();
        assert_eq!(row.eta(), 102);
        assert_eq!(row.value(), x);
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digits(&b(5), &b(3), 2).unwrap(), vec![b(2), b(1)]);
        assert_eq!(digits(&b(3), &b(3), 2).unwrap(), vec![b(0), b(1)]);
        assert_eq!(digits(&b(8), &b(2), 4).unwrap(), vec![b(0), b(0), b(0), b(1)]);
        assert!(matches!(digits(&b(9), &b(3), 2), Err(Error::DigitOverflow { .. })));
    }

    #[test]
    fn binary_row_covers_top_value() {
        assert_eq!(binary_row(&b(3), 2).unwrap(), vec![b(1), b(1)]);
        assert_eq!(binary_row(&b(4), 2).unwrap(), vec![b(0), b(2)]);
        assert!(binary_row(&b(5), 2).is_err());
    }

    #[test]
    fn encoding_matrix_examples() {
        assert_eq!(
            encoding_matrix(2, &b(3)).unwrap(),
            IntMatrix::from_rows(&[vec![3, -1]]).unwrap()
        );
        assert_eq!(
            encoding_matrix(3, &b(2)).unwrap(),
            IntMatrix::from_rows(&[vec![2, -1, 0], vec![0, 2, -1]]).unwrap()
        );
        assert!(encoding_matrix(1, &b(2)).is_err());
        assert!(band_check(&encoding_matrix(5, &b(4)).unwrap().transpose(), Band::Bi));
    }

    #[test]
    fn reversed_encoding_matrix_examples() {
        assert_eq!(
            encoding_matrix_reversed(2).unwrap(),
            IntMatrix::from_rows(&[vec![-1, 2]]).unwrap()
        );
        assert_eq!(
            encoding_matrix_reversed(3).unwrap(),
            IntMatrix::from_rows(&[vec![-1, 2, 0], vec![0, -1, 2]]).unwrap()
        );
        for t in 2..6 {
            let r = encoding_matrix_reversed(t).unwrap();
            assert_eq!(reverse_rows_and_cols(&encoding_matrix(t, &b(2)).unwrap()), r);
            assert_eq!(reverse_rows_and_cols(&reverse_rows_and_cols(&r)), r);
        }
    }

    #[test]
    fn powers_span_the_kernel() {
        for t in 2..=6 {
            for delta in 2..=5 {
                let e = encoding_matrix(t, &b(delta)).unwrap();
                let z = powers(&b(delta), t);
                assert!(e.mul_vec(&z).unwrap().iter().all(Zero::is_zero));
            }
        }
    }

    /// Exhaustive kernel of `E_t(2)` over the box `[0, bound]^t`.
    fn box_kernel(t: usize, bound: i64) -> Vec<Vec<i64>> {
        let e = encoding_matrix(t, &b(2)).unwrap();
        let mut out = Vec::new();
        let mut x = vec![0i64; t];
        loop {
            let xb: Vec<BigInt> = x.iter().map(|&v| b(v)).collect();
            if e.mul_vec(&xb).unwrap().iter().all(Zero::is_zero) {
                out.push(x.clone());
            }
            let mut k = 0;
            while k < t && x[k] == bound {
                x[k] = 0;
                k += 1;
            }
            if k == t {
                return out;
            }
            x[k] += 1;
        }
    }

    #[test]
    fn binary_kernel_in_the_box() {
        for t in 2..=4usize {
            let z: Vec<i64> = (0..t).map(|i| 1 << i).collect();
            // Below 2^t only 0 and z survive.
            assert_eq!(box_kernel(t, (1 << t) - 1), vec![vec![0; t], z.clone()]);
            // The closed box [0, 2^t] also admits 2z.
            let twice: Vec<i64> = z.iter().map(|v| 2 * v).collect();
            assert_eq!(box_kernel(t, 1 << t), vec![vec![0; t], z, twice]);
        }
    }

    proptest! {
        #[test]
        fn digits_reconstruct(x in 0i64..100_000, delta in 2i64..20) {
            let width = 20;
            let d = digits(&b(x), &b(delta), width).unwrap();
            let value: BigInt = d.iter().zip(powers(&b(delta), width)).map(|(a, p)| a * p).sum();
            prop_assert_eq!(value, b(x));
            prop_assert!(d.iter().all(|v| *v < b(delta) && !v.is_negative()));
        }
    }
}
