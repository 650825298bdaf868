use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ReductionCertificate, TwoStageBlock, TwoStageCertificate};
use crate::blockmat::{validate_multistage, Band, BlockProfile, IPInstance, IntMatrix};
use crate::encoding::{enc, enc_reversed};
use crate::error::{Error, Result};
use crate::restructure::{pad_to_lemma_dims, to_multistage};

/// A block brought into the shape `(c; B)` with `B^T` bi-diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedBlock {
    /// `(enc q, enc-reversed x, enc y)`, length `t + 1`.
    pub c: Vec<BigInt>,
    /// `t x (t + 1)`.
    pub b: IntMatrix,
    /// Row of `b` (zero-based) that carries the right-hand side 1.
    pub unit_row: usize,
}

fn chain(b: &mut IntMatrix, row: usize, col: usize, len: usize, diag: i64, next: i64) {
    for k in 0..len {
        b.set(row + k, col + k, diag.into());
        b.set(row + k, col + k + 1, next.into());
    }
}

/// Reorders a block so that its constraint rows below the first form a
/// matrix whose transpose is bi-diagonal: the `x` bits are reversed and a
/// zero row separates the `q` chain from the `x` chain.
pub fn normalize_block(block: &TwoStageBlock) -> Result<NormalizedBlock> {
    let (eq, ex, ey) = block.segment_lengths();
    let t = block.t();
    if eq + ex + ey != t + 1 {
        return Err(Error::DimensionMismatch(format!(
            "segment lengths {eq} + {ex} + {ey} differ from t + 1 = {}",
            t + 1
        )));
    }
    let mut c = enc(block.q())?.to_bigints();
    c.extend(enc_reversed(block.x())?.to_bigints());
    c.extend(enc(block.y())?.to_bigints());

    let mut b = IntMatrix::zeros(t, t + 1);
    chain(&mut b, 0, 0, eq - 1, 2, -1);
    // row eq - 1 stays zero
    chain(&mut b, eq, eq, ex - 1, -1, 2);
    let unit_row = eq + ex - 1;
    b.set(unit_row, eq + ex - 1, BigInt::one());
    b.set(unit_row, eq + ex, BigInt::one());
    chain(&mut b, eq + ex, eq + ex, ey - 1, 2, -1);
    debug_assert!(b.iter().all(|(i, j, _)| j == i || j == i + 1));
    Ok(NormalizedBlock { c, b, unit_row })
}

/// Splits the dense row `sum c_i z_i = r` into the chain
/// `p_1 = -r`, `p_(i+1) - p_i = c_i z_i`, `-p_(t+1) = c_(t+1) z_(t+1)`
/// over variables `(p_1, z_1, ..., p_(t+1), z_(t+1))`; the `r` column is not
/// included. Result is `(t + 2) x (2t + 2)`.
pub fn split_dense_row(c: &[BigInt]) -> IntMatrix {
    let n = c.len();
    let mut s = IntMatrix::zeros(n + 1, 2 * n);
    for i in 0..=n {
        if 2 * i < 2 * n {
            s.set(i, 2 * i, BigInt::one());
        }
        if i >= 1 {
            s.set(i, 2 * i - 1, -&c[i - 1]);
            s.set(i, 2 * i - 2, BigInt::from(-1));
        }
    }
    s
}

/// Spreads `B` over the `z` positions of the interleaved variable order and
/// adds a zero row on top: `(t + 1) x (2t + 2)`.
pub fn expand_b(b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(b.rows() + 1, 2 * b.cols());
    for (i, j, v) in b.iter() {
        out.set(i + 1, 2 * j + 1, v.clone());
    }
    out
}

/// Alternates rows of `s_tilde` and `b_tilde`, starting with `s_tilde`.
pub fn interleave_to_tridiagonal(s_tilde: &IntMatrix, b_tilde: &IntMatrix) -> Result<IntMatrix> {
    if s_tilde.cols() != b_tilde.cols() || s_tilde.rows() != b_tilde.rows() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "cannot interleave {}x{} with {}x{}",
            s_tilde.rows(),
            s_tilde.cols(),
            b_tilde.rows(),
            b_tilde.cols()
        )));
    }
    let rows = s_tilde.rows() + b_tilde.rows();
    let mut t = IntMatrix::zeros(rows, s_tilde.cols());
    for (i, j, v) in s_tilde.iter() {
        t.set(2 * i, j, v.clone());
    }
    for (i, j, v) in b_tilde.iter() {
        t.set(2 * i + 1, j, v.clone());
    }
    Ok(t)
}

/// Tri-diagonal reformulation of one block and the row holding the
/// right-hand side 1, tracked through the row moves.
fn tridiagonal_block(block: &TwoStageBlock) -> Result<(IntMatrix, usize)> {
    let nb = normalize_block(block)?;
    let s_tilde = split_dense_row(&nb.c);
    let b_tilde = expand_b(&nb.b);
    let unit_in_b_tilde = nb.unit_row + 1;
    let unit_in_t = 2 * unit_in_b_tilde + 1;
    Ok((interleave_to_tridiagonal(&s_tilde, &b_tilde)?, unit_in_t))
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

/// Smallest `s >= 1` with `(s+1)^(tau-1) >= t + 2 > (s+1)^(tau-2)`.
pub fn choose_multistage_params(t: usize, tau: usize) -> Result<usize> {
    if tau < 2 {
        return Err(Error::InvalidParameter(format!("tau must be at least 2, got {tau}")));
    }
    let need = t + 2;
    let s = (1..)
        .find(|&s| checked_pow(s + 1, tau - 1).is_none_or(|p| p >= need))
        .expect("some s reaches t + 2");
    if checked_pow(s + 1, tau - 2).is_none_or(|p| p >= need) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} is too large for t = {t}: no s with (s+1)^{} >= {need} > (s+1)^{}",
            tau - 1,
            tau - 2
        )));
    }
    Ok(s)
}

fn common_t(blocks: &[TwoStageBlock]) -> Result<usize> {
    let t = blocks
        .first()
        .ok_or_else(|| Error::InvalidParameter("at least one block is required".into()))?
        .t();
    if let Some(b) = blocks.iter().find(|b| b.t() != t) {
        return Err(Error::DimensionMismatch(format!(
            "blocks have different row counts {t} and {}",
            b.t()
        )));
    }
    Ok(t)
}

/// `(t + 1) * max c * z_bound`, the largest `|sum c_i z_i|` over the box.
fn prefix_bound(blocks: &[TwoStageBlock], z_bound: &BigInt) -> Result<BigInt> {
    let t = common_t(blocks)?;
    let cmax = blocks
        .iter()
        .map(|b| normalize_block(b).map(|nb| nb.c.into_iter().max().unwrap_or_default()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or_default();
    Ok(BigInt::from(t + 1) * cmax * z_bound)
}

/// The block `D` in its original column order `(enc q, enc x, enc y)`: the
/// dense first row, the three encoding chains and the unit row linking the
/// lowest bits of `x` and `y`.
pub fn source_block_matrix(block: &TwoStageBlock) -> Result<IntMatrix> {
    let (eq, ex, ey) = block.segment_lengths();
    let t = block.t();
    let mut d = IntMatrix::zeros(t, t + 1);
    let row0 = enc(block.q())?
        .to_bigints()
        .into_iter()
        .chain(enc(block.x())?.to_bigints())
        .chain(enc(block.y())?.to_bigints());
    for (j, v) in row0.enumerate() {
        d.set(0, j, v);
    }
    chain(&mut d, 1, 0, eq - 1, 2, -1);
    chain(&mut d, eq, eq, ex - 1, 2, -1);
    chain(&mut d, eq + ex - 1, eq + ex, ey - 1, 2, -1);
    d.set(t - 1, eq, BigInt::one());
    d.set(t - 1, eq + ex, BigInt::one());
    Ok(d)
}

/// The source system `-e_1 r + D_k z^(k) = e_t` for every block, with
/// `0 <= z <= z_bound` and `0 <= r <= (t+1) max c z_bound`. Column 0 is `r`.
pub fn two_stage_instance(blocks: &[TwoStageBlock], z_bound: &BigInt) -> Result<IPInstance> {
    let t = common_t(blocks)?;
    let n = blocks.len();
    let (rows, cols) = (n * t, 1 + n * (t + 1));
    let mut a = IntMatrix::zeros(rows, cols);
    let mut rhs = vec![BigInt::zero(); rows];
    for (k, block) in blocks.iter().enumerate() {
        a.set(k * t, 0, BigInt::from(-1));
        a.place(k * t, 1 + k * (t + 1), &source_block_matrix(block)?);
        rhs[k * t + t - 1] = BigInt::one();
    }
    let mut upper = vec![prefix_bound(blocks, z_bound)?];
    upper.extend(std::iter::repeat_n(z_bound.clone(), cols - 1));
    let profile = BlockProfile::multistage(vec![1, t + 1])?;
    IPInstance::feasibility(a, rhs, vec![BigInt::zero(); cols], upper, Some(profile))
}

/// Whether `(r, z)` solves the source system (bounds are not checked).
pub fn two_stage_satisfied(blocks: &[TwoStageBlock], r: &BigInt, z: &[Vec<BigInt>]) -> Result<bool> {
    if z.len() != blocks.len() {
        return Ok(false);
    }
    for (block, zk) in blocks.iter().zip(z) {
        let d = source_block_matrix(block)?;
        if zk.len() != d.cols() {
            return Ok(false);
        }
        let mut lhs = d.mul_vec(zk)?;
        lhs[0] -= r;
        let t = block.t();
        if lhs.iter().enumerate().any(|(i, v)| *v != BigInt::from(u8::from(i == t - 1))) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Multi-stage feasibility program equivalent to the two-stage system of
/// `blocks` (see [`two_stage_instance`]).
///
/// Each block is reformulated as a tri-diagonal `(2t+3) x (2t+2)` matrix,
/// padded to `2S x (2S-2)` with `S = (s+1)^(tau-1)`, and its columns are
/// reordered into `tau - 1` stages of size `2s`. The global column carries
/// `-1` in the first row of every block, so it holds `-r`; its bounds are
/// mirrored accordingly. Auxiliary prefix variables `p` get bounds
/// `[-U, U]` with `U = (t+1) max c z_bound`.
pub fn build_multistage(
    blocks: &[TwoStageBlock],
    tau: usize,
    z_bound: &BigInt,
) -> Result<(IPInstance, ReductionCertificate)> {
    let t = common_t(blocks)?;
    let s = choose_multistage_params(t, tau)?;
    let stages = vec![s; tau - 1];
    let u = prefix_bound(blocks, z_bound)?;

    let mut col_perm = None;
    let mut parts = Vec::with_capacity(blocks.len());
    for block in blocks {
        let (tri, unit) = tridiagonal_block(block)?;
        let padded = pad_to_lemma_dims(&tri, &stages, Band::Tri)?;
        let r = to_multistage(&padded, &stages, Band::Tri)?;
        debug_assert!(r.permutation.row_perm.is_identity());
        col_perm.get_or_insert_with(|| r.permutation.col_perm.clone());
        parts.push((r.matrix, unit));
    }
    let col_perm = col_perm.expect("at least one block");
    let (block_rows, block_cols) = (parts[0].0.rows(), parts[0].0.cols());
    let (rows, cols) = (blocks.len() * block_rows, 1 + blocks.len() * block_cols);

    let mut natural_lower = Vec::with_capacity(block_cols);
    let mut natural_upper = Vec::with_capacity(block_cols);
    for j in 0..block_cols {
        let (l, h) = if j >= 2 * t + 2 {
            (BigInt::zero(), BigInt::zero())
        } else if j % 2 == 0 {
            (-&u, u.clone())
        } else {
            (BigInt::zero(), z_bound.clone())
        };
        natural_lower.push(l);
        natural_upper.push(h);
    }
    let block_lower = col_perm.apply(&natural_lower);
    let block_upper = col_perm.apply(&natural_upper);

    let mut a = IntMatrix::zeros(rows, cols);
    let mut rhs = vec![BigInt::zero(); rows];
    let mut lower = vec![-&u];
    let mut upper = vec![BigInt::zero()];
    for (k, (m, unit)) in parts.iter().enumerate() {
        let row0 = k * block_rows;
        a.set(row0, 0, BigInt::from(-1));
        a.place(row0, 1 + k * block_cols, m);
        rhs[row0 + unit] = BigInt::one();
        lower.extend(block_lower.iter().cloned());
        upper.extend(block_upper.iter().cloned());
    }
    let mut sigma = vec![1];
    sigma.extend(std::iter::repeat_n(2 * s, tau - 1));
    let profile = BlockProfile::multistage(sigma)?;
    debug_assert!(validate_multistage(&a, &profile).unwrap_or(false));
    let instance = IPInstance::feasibility(a, rhs, lower, upper, Some(profile))?;
    let cert = TwoStageCertificate {
        blocks: blocks.to_vec(),
        s,
        tau,
        block_rows,
        block_cols,
        col_perm,
    };
    Ok((instance, ReductionCertificate::TwoStage(cert)))
}

/// Positions of the `x` segment within a block's columns.
fn x_range(block: &TwoStageBlock) -> std::ops::Range<usize> {
    let (eq, ex, _) = block.segment_lengths();
    eq..eq + ex
}

impl TwoStageCertificate {
    pub fn extend(&self, r: &BigInt, z: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
        if z.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks of variables for {} blocks",
                z.len(),
                self.blocks.len()
            )));
        }
        let mut out = vec![-r];
        for (block, zk) in self.blocks.iter().zip(z) {
            let t = block.t();
            if zk.len() != t + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "block variables have length {}, expected {}",
                    zk.len(),
                    t + 1
                )));
            }
            let mut zn = zk.clone();
            zn[x_range(block)].reverse();
            let c = normalize_block(block)?.c;
            let mut natural = vec![BigInt::zero(); self.block_cols];
            let mut p = -r;
            for i in 0..=t {
                natural[2 * i] = p.clone();
                natural[2 * i + 1] = zn[i].clone();
                p += &c[i] * &zn[i];
            }
            out.extend(self.col_perm.apply(&natural));
        }
        Ok(out)
    }

    pub fn project(&self, target: &[BigInt]) -> Result<(BigInt, Vec<Vec<BigInt>>)> {
        let want = 1 + self.blocks.len() * self.block_cols;
        if target.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "target has {} entries, expected {want}",
                target.len()
            )));
        }
        let inverse = self.col_perm.inverse();
        let z = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, block)| {
                let start = 1 + k * self.block_cols;
                let natural = inverse.apply(&target[start..start + self.block_cols]);
                let mut zk: Vec<BigInt> = (0..=block.t()).map(|i| natural[2 * i + 1].clone()).collect();
                zk[x_range(block)].reverse();
                zk
            })
            .collect();
        Ok((-&target[0], z))
    }
}
