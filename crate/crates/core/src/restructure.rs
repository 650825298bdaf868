//! Column reorderings that turn bi- and tri-diagonal matrices into
//! multi-stage matrices, and their transposed counterparts for tree-fold
//! matrices.
//!
//! For stage sizes `sigma` let `S = prod (sigma_i + 1)`. A bi-diagonal
//! `S x (S-1)` matrix becomes multi-stage with stage sizes `sigma`, a
//! tri-diagonal `2S x (2S-2)` matrix becomes multi-stage with stage sizes
//! `2 sigma`. The reordering depends only on `sigma`, the band kind and the
//! dimensions, never on the entries.

use crate::blockmat::{
    apply_permutation, band_violation, pad_zero, validate_profile, Band, BlockProfile, IntMatrix,
    Permutation, PermutationPair,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestructureResult {
    pub matrix: IntMatrix,
    pub permutation: PermutationPair,
    pub profile: BlockProfile,
}

/// `S = prod (sigma_i + 1)`.
pub fn block_product(sigma: &[usize]) -> usize {
    sigma.iter().map(|s| s + 1).product()
}

/// Dimensions the reordering expects: `S x (S-1)` for bi-diagonal and
/// `2S x (2S-2)` for tri-diagonal inputs.
pub fn required_dims(sigma: &[usize], band: Band) -> (usize, usize) {
    let s = block_product(sigma);
    match band {
        Band::Bi => (s, s - 1),
        Band::Tri => (2 * s, 2 * s - 2),
    }
}

/// Stage sizes of the result: `sigma` for bi-diagonal inputs, `2 sigma` for
/// tri-diagonal ones.
pub fn result_stage_sizes(sigma: &[usize], band: Band) -> Vec<usize> {
    match band {
        Band::Bi => sigma.to_vec(),
        Band::Tri => sigma.iter().map(|s| 2 * s).collect(),
    }
}

fn check_sigma(sigma: &[usize]) -> Result<()> {
    if sigma.is_empty() || sigma.contains(&0) {
        return Err(Error::InvalidProfile(format!(
            "stage sizes must be a nonempty list of positive integers, got {sigma:?}"
        )));
    }
    Ok(())
}

/// Columns (zero-based) moved to the front at the outermost level.
///
/// With `S' = prod_{i>=2} (sigma_i + 1)` these are the columns `j S'` for
/// `j = 1..=sigma_1` (bi), or the pairs `2jS' - 1, 2jS'` (tri), written
/// one-based. A single stage selects nothing.
pub fn selection_indices(sigma: &[usize], band: Band) -> Vec<usize> {
    if sigma.len() <= 1 {
        return Vec::new();
    }
    let inner = block_product(&sigma[1..]);
    (1..=sigma[0])
        .flat_map(|j| match band {
            Band::Bi => vec![j * inner - 1],
            Band::Tri => vec![2 * j * inner - 2, 2 * j * inner - 1],
        })
        .collect()
}

/// The full column order: `order[k]` is the input column placed at `k`.
pub fn column_order(sigma: &[usize], band: Band) -> Vec<usize> {
    let (_, cols) = required_dims(sigma, band);
    let mut order = Vec::with_capacity(cols);
    push_order(sigma, band, 0, &mut order);
    debug_assert_eq!(order.len(), cols);
    order
}

fn push_order(sigma: &[usize], band: Band, offset: usize, out: &mut Vec<usize>) {
    let (_, cols) = required_dims(sigma, band);
    if sigma.len() == 1 {
        out.extend(offset..offset + cols);
        return;
    }
    out.extend(selection_indices(sigma, band).into_iter().map(|c| c + offset));
    let inner = block_product(&sigma[1..]);
    let stride = match band {
        Band::Bi => inner,
        Band::Tri => 2 * inner,
    };
    for k in 0..=sigma[0] {
        push_order(&sigma[1..], band, offset + k * stride, out);
    }
}

/// Appends zero rows at the bottom and zero columns at the right so that `a`
/// reaches the dimensions required for `sigma`.
pub fn pad_to_lemma_dims(a: &IntMatrix, sigma: &[usize], band: Band) -> Result<IntMatrix> {
    check_sigma(sigma)?;
    let (rows, cols) = required_dims(sigma, band);
    if a.rows() > rows || a.cols() > cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix exceeds the required {rows}x{cols}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(pad_zero(a, 0, rows - a.rows(), 0, cols - a.cols()))
}

/// Reorders the columns of a bi-/tri-diagonal matrix of the required
/// dimensions into a multi-stage matrix. Rows are left in place.
pub fn to_multistage(a: &IntMatrix, sigma: &[usize], band: Band) -> Result<RestructureResult> {
    check_sigma(sigma)?;
    let stage_sizes = result_stage_sizes(sigma, band);
    if sigma.len() == 1 {
        return Ok(RestructureResult {
            matrix: a.clone(),
            permutation: PermutationPair::identity(a.rows(), a.cols()),
            profile: BlockProfile::multistage(stage_sizes)?,
        });
    }
    let (rows, cols) = required_dims(sigma, band);
    if (a.rows(), a.cols()) != (rows, cols) {
        return Err(Error::DimensionMismatch(format!(
            "{}-diagonal input must be {rows}x{cols} for sigma {sigma:?}, got {}x{}",
            band.name(),
            a.rows(),
            a.cols()
        )));
    }
    if let Some((row, col)) = band_violation(a, band) {
        return Err(Error::BandViolation {
            kind: band.name(),
            row,
            col,
        });
    }
    let permutation = PermutationPair {
        row_perm: Permutation::identity(rows),
        col_perm: Permutation::from_order(&column_order(sigma, band))?,
    };
    let matrix = apply_permutation(a, &permutation)?;
    let profile = BlockProfile::multistage(stage_sizes)?;
    debug_assert!(validate_profile(&matrix, &profile).unwrap_or(false));
    Ok(RestructureResult {
        matrix,
        permutation,
        profile,
    })
}

/// Reorders the rows of `a` (whose transpose is bi-/tri-diagonal of the
/// required dimensions) into a tree-fold matrix.
pub fn to_treefold(a: &IntMatrix, sigma: &[usize], band: Band) -> Result<RestructureResult> {
    let r = to_multistage(&a.transpose(), sigma, band)?;
    Ok(RestructureResult {
        matrix: r.matrix.transpose(),
        permutation: r.permutation.transposed(),
        profile: BlockProfile::treefold(r.profile.sigma().to_vec())?,
    })
}
