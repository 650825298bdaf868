use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ReductionCertificate, SubsetSumCertificate, SubsetSumInstance};
use crate::blockmat::{
    validate_treefold, Band, BlockKind, BlockProfile, IPInstance, IntMatrix, Permutation,
    PermutationPair,
};
use crate::encoding::{binary_row, digits, encoding_matrix, powers};
use crate::error::{Error, Result};
use crate::restructure::{block_product, to_treefold};

/// `ceil(log2 v)` for `v >= 1`.
fn ceil_log2(v: &BigInt) -> usize {
    (v - 1u32).bits() as usize
}

/// Smallest `delta >= 2` with `delta^sigma1 >= b > delta^(sigma1 - 1)`
/// (`delta = b` for a single top row), and `t = max(ceil(log2 delta), 2)`.
pub fn choose_subsetsum_params(b: &BigInt, sigma1: usize) -> Result<(BigInt, usize)> {
    let two = BigInt::from(2);
    if *b < BigInt::one() {
        return Err(Error::InvalidParameter(format!("target must be positive, got {b}")));
    }
    let max_sigma = ceil_log2(b);
    if sigma1 < 1 || sigma1 > max_sigma {
        return Err(Error::InvalidParameter(format!(
            "sigma1 = {sigma1} must lie in 1..={max_sigma} for b = {b}"
        )));
    }
    let delta = if sigma1 == 1 {
        b.clone()
    } else {
        let exp = u32::try_from(sigma1).map_err(|_| Error::TooLarge("sigma1".into()))?;
        let mut d = b.nth_root(exp);
        if d.pow(exp) < *b {
            d += 1;
        }
        let d = d.max(two);
        if d.pow(exp - 1) >= *b {
            return Err(Error::InvalidParameter(format!(
                "no delta satisfies delta^{sigma1} >= {b} > delta^{}",
                sigma1 - 1
            )));
        }
        d
    };
    let t = ceil_log2(&delta).max(2);
    Ok((delta, t))
}

/// The digit system `(C | D) (x, y) = (b, 0, ..., 0)`: column `i` of `C` holds
/// the base-`delta` digits of `a_i`, column `j` of `D` has `delta` in row `j`
/// and `-1` in row `j + 1`.
pub fn build_cd_system(
    inst: &SubsetSumInstance,
    delta: &BigInt,
    sigma1: usize,
) -> Result<(IntMatrix, IntMatrix, Vec<BigInt>)> {
    let n = inst.len();
    let mut c = IntMatrix::zeros(sigma1, n);
    for (i, ai) in inst.a().iter().enumerate() {
        for (row, d) in digits(ai, delta, sigma1)?.into_iter().enumerate() {
            c.set(row, i, d);
        }
    }
    let mut d = IntMatrix::zeros(sigma1, sigma1 - 1);
    for j in 0..sigma1 - 1 {
        d.set(j, j, delta.clone());
        d.set(j + 1, j, BigInt::from(-1));
    }
    let mut rhs = vec![BigInt::zero(); sigma1];
    rhs[0] = inst.b().clone();
    Ok((c, d, rhs))
}

/// `y_j = sum_i x_i floor(a_i / delta^j)`, the carries forced by `x`.
pub(super) fn carries(inst: &SubsetSumInstance, delta: &BigInt, sigma1: usize, x: &[bool]) -> Vec<BigInt> {
    let pw = powers(delta, sigma1);
    (1..sigma1)
        .map(|j| {
            inst.a()
                .iter()
                .zip(x)
                .filter(|(_, &s)| s)
                .map(|(a, _)| a / &pw[j])
                .sum()
        })
        .collect()
}

/// Largest value the carry `y_j` can take.
fn carry_bounds(inst: &SubsetSumInstance, delta: &BigInt, sigma1: usize) -> Vec<BigInt> {
    carries(inst, delta, sigma1, &vec![true; inst.len()])
}

/// The n-fold feasibility program for a subset-sum instance.
///
/// Each variable of the digit system becomes a group of `t` columns
/// constrained by `E_t(2)`, so the group is a multiple `m (1, 2, ..., 2^(t-1))`
/// and the top stripe sees `m` times the original column. Bounds keep
/// `m in {0, 1}` for selection groups and `m <= max y_j` for carry groups.
pub fn build_nfold(
    inst: &SubsetSumInstance,
    sigma1: usize,
) -> Result<(IPInstance, ReductionCertificate)> {
    let (delta, t) = choose_subsetsum_params(inst.b(), sigma1)?;
    let (c, d, rhs_top) = build_cd_system(inst, &delta, sigma1)?;
    let n = inst.len();
    let groups = n + sigma1 - 1;
    let rows = sigma1 + groups * (t - 1);
    let cols = groups * t;

    let mut a = IntMatrix::zeros(rows, cols);
    let e = encoding_matrix(t, &BigInt::from(2))?;
    let half = BigInt::one() << (t - 1);
    let mut upper = Vec::with_capacity(cols);
    let carry_max = carry_bounds(inst, &delta, sigma1);
    for g in 0..groups {
        let (column, bound) = if g < n {
            (column_of(&c, g), half.clone())
        } else {
            (column_of(&d, g - n), &carry_max[g - n] * &half)
        };
        for (row, v) in column.iter().enumerate() {
            for (k, bit) in binary_row_signed(v, t)?.into_iter().enumerate() {
                a.set(row, g * t + k, bit);
            }
        }
        a.place(sigma1 + g * (t - 1), g * t, &e);
        upper.extend(std::iter::repeat_n(bound, t));
    }
    let mut rhs = vec![BigInt::zero(); rows];
    rhs[..sigma1].clone_from_slice(&rhs_top);
    let profile = BlockProfile::treefold(vec![sigma1, t - 1])?;
    let instance = IPInstance::feasibility(a, rhs, vec![BigInt::zero(); cols], upper, Some(profile))?;
    let cert = SubsetSumCertificate {
        source: inst.clone(),
        delta,
        t,
        sigma1,
        stride: t,
    };
    Ok((instance, ReductionCertificate::SubsetSum(cert)))
}

fn column_of(m: &IntMatrix, j: usize) -> Vec<BigInt> {
    (0..m.rows()).map(|i| m.get(i, j)).collect()
}

/// Row of `t` small entries whose weighted sum against `(1, 2, ..., 2^(t-1))`
/// is `v`, for `-1 <= v <= 2^t`.
fn binary_row_signed(v: &BigInt, t: usize) -> Result<Vec<BigInt>> {
    if *v == BigInt::from(-1) {
        let mut row = vec![BigInt::zero(); t];
        row[0] = v.clone();
        return Ok(row);
    }
    binary_row(v, t)
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

/// Level sizes for lifting an n-fold with blocks `E_t` to `tau` levels.
///
/// Returns `s`, `ell` and the `tau - 1` trailing level sizes: `tau - 1 - ell`
/// entries `s` followed by `ell` entries `s - 1`, whose block product lies in
/// `[t, 2t)`.
pub fn choose_treefold_levels(t: usize, tau: usize) -> Result<(usize, usize, Vec<usize>)> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("t must be at least 2, got {t}")));
    }
    let max_levels = ceil_log2(&BigInt::from(t));
    if tau < 3 || tau - 1 > max_levels {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} needs 2 <= tau - 1 <= {max_levels} for t = {t}"
        )));
    }
    let levels = tau - 1;
    let s = (1..)
        .find(|&s| checked_pow(s + 1, levels).is_none_or(|p| p >= t))
        .expect("some s reaches t");
    let f = |ell: usize| -> usize {
        checked_pow(s + 1, levels - ell)
            .zip(checked_pow(s, ell))
            .and_then(|(a, b)| a.checked_mul(b))
            .unwrap_or(usize::MAX)
    };
    let ell = (0..levels)
        .find(|&ell| f(ell) >= t && t > f(ell + 1))
        .expect("f(0) >= t > f(tau - 1) brackets some ell");
    let mut tail = vec![s; levels - ell];
    tail.extend(std::iter::repeat_n(s - 1, ell));
    debug_assert!(block_product(&tail) < 2 * t && block_product(&tail) >= t);
    Ok((s, ell, tail))
}

/// Re-levels an n-fold from [`build_nfold`] into a tree-fold with `tau`
/// levels.
///
/// Each `E_t` block is padded with zero rows and columns to
/// `(S - 1) x S` and its rows are reordered by [`to_treefold`]; padding
/// columns are fixed to zero. The permutation maps rows of the padded,
/// unpermuted assembly to rows of the result; columns stay in place.
pub fn lift_nfold_to_treefold(
    nfold: &IPInstance,
    certificate: &ReductionCertificate,
    tau: usize,
) -> Result<(IPInstance, PermutationPair, ReductionCertificate)> {
    let ReductionCertificate::SubsetSum(cert) = certificate else {
        return Err(Error::InvalidParameter("expected a subset-sum certificate".into()));
    };
    if cert.stride != cert.t
        || nfold.profile().map(|p| (p.kind(), p.sigma().to_vec()))
            != Some((BlockKind::TreeFold, vec![cert.sigma1, cert.t - 1]))
    {
        return Err(Error::InvalidParameter(
            "instance is not an n-fold produced by build_nfold".into(),
        ));
    }
    let (t, sigma1) = (cert.t, cert.sigma1);
    let (_, _, tail) = choose_treefold_levels(t, tau)?;
    let big_s = block_product(&tail);
    let groups = nfold.cols() / t;
    let (rows, cols) = (sigma1 + groups * (big_s - 1), groups * big_s);

    let block = encoding_matrix(t, &BigInt::from(2))?;
    let padded = crate::blockmat::pad_zero(&block, 0, big_s - t, 0, big_s - t);
    let lifted_block = to_treefold(&padded, &tail, Band::Bi)?;

    let src = nfold.matrix();
    let mut a = IntMatrix::zeros(rows, cols);
    let mut upper = Vec::with_capacity(cols);
    let mut row_images: Vec<usize> = (0..sigma1).collect();
    for g in 0..groups {
        for (i, j, v) in src.iter().filter(|&(i, j, _)| i < sigma1 && j / t == g) {
            a.set(i, g * big_s + j % t, v.clone());
        }
        let row0 = sigma1 + g * (big_s - 1);
        a.place(row0, g * big_s, &lifted_block.matrix);
        row_images.extend(
            lifted_block
                .permutation
                .row_perm
                .images()
                .iter()
                .map(|&r| row0 + r),
        );
        upper.extend(nfold.upper()[g * t..(g + 1) * t].iter().cloned().map(Option::unwrap));
        upper.extend(std::iter::repeat_n(BigInt::zero(), big_s - t));
    }
    let mut rhs = vec![BigInt::zero(); rows];
    rhs[..sigma1].clone_from_slice(&nfold.rhs()[..sigma1]);
    let mut sigma = vec![sigma1];
    sigma.extend(&tail);
    let profile = BlockProfile::treefold(sigma)?;
    debug_assert!(validate_treefold(&a, &profile).unwrap_or(false));
    let instance = IPInstance::feasibility(a, rhs, vec![BigInt::zero(); cols], upper, Some(profile))?;
    let permutation = PermutationPair {
        row_perm: Permutation::from_images(row_images)?,
        col_perm: Permutation::identity(cols),
    };
    let lifted_cert = SubsetSumCertificate {
        stride: big_s,
        ..cert.clone()
    };
    Ok((instance, permutation, ReductionCertificate::SubsetSum(lifted_cert)))
}

impl SubsetSumCertificate {
    fn groups(&self) -> usize {
        self.source.len() + self.sigma1 - 1
    }

    pub fn extend(&self, x: &[bool]) -> Result<Vec<BigInt>> {
        if x.len() != self.source.len() {
            return Err(Error::DimensionMismatch(format!(
                "selection has {} entries, instance has {}",
                x.len(),
                self.source.len()
            )));
        }
        let z = powers(&BigInt::from(2), self.t);
        let multiples = x
            .iter()
            .map(|&s| BigInt::from(u8::from(s)))
            .chain(carries(&self.source, &self.delta, self.sigma1, x));
        let mut out = vec![BigInt::zero(); self.groups() * self.stride];
        for (g, m) in multiples.enumerate() {
            for (k, zk) in z.iter().enumerate() {
                out[g * self.stride + k] = &m * zk;
            }
        }
        Ok(out)
    }

    pub fn project(&self, target: &[BigInt]) -> Result<Vec<bool>> {
        if target.len() != self.groups() * self.stride {
            return Err(Error::DimensionMismatch(format!(
                "target has {} entries, expected {}",
                target.len(),
                self.groups() * self.stride
            )));
        }
        (0..self.source.len())
            .map(|g| {
                let m = &target[g * self.stride];
                if m.is_zero() {
                    Ok(false)
                } else if m.is_one() {
                    Ok(true)
                } else {
                    Err(Error::Infeasible(format!("group {} has multiple {m}", g + 1)))
                }
            })
            .collect()
    }
}
