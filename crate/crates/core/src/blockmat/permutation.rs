use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// A bijection on `0..len`, stored as the image of every index.
///
/// `map[old] = new`: applying the permutation moves the item at position
/// `old` to position `new`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    pub fn from_images(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v >= map.len() || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{map:?} is not a bijection on 0..{}",
                    map.len()
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(map))
    }

    /// Builds the permutation that places `order[k]` at position `k`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; order.len()];
        for (new, &old) in order.iter().enumerate() {
            if old >= order.len() || map[old] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "{order:?} is not an ordering of 0..{}",
                    order.len()
                )));
            }
            map[old] = new;
        }
        Ok(Permutation(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// New position of `old`.
    pub fn image(&self, old: usize) -> usize {
        self.0[old]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `order()[new]` is the old index now sitting at `new`.
    pub fn order(&self) -> Vec<usize> {
        self.inverse().0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (old, &new) in self.0.iter().enumerate() {
            inv[new] = old;
        }
        Permutation(inv)
    }

    /// Reorders a slice: the output at `image(k)` is `items[k]`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.0.len(), "permutation length mismatch");
        let mut out: Vec<Option<T>> = vec![None; items.len()];
        for (old, item) in items.iter().enumerate() {
            out[self.0[old]] = Some(item.clone());
        }
        out.into_iter().map(|v| v.expect("bijection")).collect()
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::from_images(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// Row and column permutation certifying a rearrangement of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPair {
    pub row_perm: Permutation,
    pub col_perm: Permutation,
}

impl PermutationPair {
    pub fn identity(rows: usize, cols: usize) -> Self {
        PermutationPair {
            row_perm: Permutation::identity(rows),
            col_perm: Permutation::identity(cols),
        }
    }

    pub fn inverse(&self) -> Self {
        PermutationPair {
            row_perm: self.row_perm.inverse(),
            col_perm: self.col_perm.inverse(),
        }
    }

    /// The same rearrangement seen on the transposed matrix.
    pub fn transposed(&self) -> Self {
        PermutationPair {
            row_perm: self.col_perm.clone(),
            col_perm: self.row_perm.clone(),
        }
    }
}

/// `result(row_perm(i), col_perm(j)) = a(i, j)`.
pub fn apply_permutation(a: &IntMatrix, p: &PermutationPair) -> Result<IntMatrix> {
    if p.row_perm.len() != a.rows() || p.col_perm.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of size {}x{} applied to a {}x{} matrix",
            p.row_perm.len(),
            p.col_perm.len(),
            a.rows(),
            a.cols()
        )));
    }
    IntMatrix::from_entries(
        a.rows(),
        a.cols(),
        a.iter()
            .map(|(i, j, v)| (p.row_perm.image(i), p.col_perm.image(j), v.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_leaves_matrix_unchanged() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(
            apply_permutation(&a, &PermutationPair::identity(2, 2)).unwrap(),
            a
        );
    }

    #[test]
    fn column_swap() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2]]).unwrap();
        let p = PermutationPair {
            row_perm: Permutation::identity(2),
            col_perm: Permutation::from_images(vec![1, 0]).unwrap(),
        };
        let b = apply_permutation(&a, &p).unwrap();
        assert_eq!(b, IntMatrix::from_rows(&[vec![0, 1], vec![2, 0]]).unwrap());
    }

    #[test]
    fn range_mismatch_is_an_error() {
        let a = IntMatrix::zeros(2, 3);
        assert!(apply_permutation(&a, &PermutationPair::identity(3, 2)).is_err());
    }

    #[test]
    fn non_bijections_rejected() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![2, 0]).is_err());
        assert!(Permutation::from_order(&[1, 1]).is_err());
    }

    #[test]
    fn order_and_images_agree() {
        let p = Permutation::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.order(), vec![2, 0, 1]);
        assert_eq!(p.apply(&['a', 'b', 'c']), vec!['c', 'a', 'b']);
    }

    fn perm(len: usize) -> impl Strategy<Value = Permutation> {
        Just((0..len).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn permutation_is_invertible_and_keeps_entries(
            (a, p) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r),
                perm(r),
                perm(c),
            )).prop_map(|(rows, rp, cp)| (
                IntMatrix::from_rows(&rows).unwrap(),
                PermutationPair { row_perm: rp, col_perm: cp },
            ))
        ) {
            let b = apply_permutation(&a, &p).unwrap();
            prop_assert_eq!(b.nnz(), a.nnz());
            prop_assert_eq!(apply_permutation(&b, &p.inverse()).unwrap(), a.clone());
            prop_assert_eq!(
                apply_permutation(&a.transpose(), &p.transposed()).unwrap(),
                b.transpose()
            );
        }
    }
}
