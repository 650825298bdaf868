use num_bigint::BigInt;
use num_traits::Zero;

use super::matrix::IntMatrix;
use super::permutation::PermutationPair;
use super::profile::{validate_profile, BlockProfile};
use crate::error::{Error, Result};

/// `min { objective . x : matrix x = rhs, lower <= x <= upper, x integral }`.
///
/// `None` bounds are unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPInstance {
    matrix: IntMatrix,
    rhs: Vec<BigInt>,
    lower: Vec<Option<BigInt>>,
    upper: Vec<Option<BigInt>>,
    objective: Vec<BigInt>,
    profile: Option<BlockProfile>,
}

impl IPInstance {
    pub fn new(
        matrix: IntMatrix,
        rhs: Vec<BigInt>,
        lower: Vec<Option<BigInt>>,
        upper: Vec<Option<BigInt>>,
        objective: Vec<BigInt>,
        profile: Option<BlockProfile>,
    ) -> Result<Self> {
        let (m, n) = (matrix.rows(), matrix.cols());
        let check = |what: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!(
                    "{what} has length {len}, expected {want}"
                )))
            }
        };
        check("rhs", rhs.len(), m)?;
        check("lower", lower.len(), n)?;
        check("upper", upper.len(), n)?;
        check("objective", objective.len(), n)?;
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if let (Some(l), Some(u)) = (l, u) {
                if l > u {
                    return Err(Error::InvalidParameter(format!(
                        "column {}: lower bound {l} exceeds upper bound {u}",
                        j + 1
                    )));
                }
            }
        }
        let inst = IPInstance {
            matrix,
            rhs,
            lower,
            upper,
            objective,
            profile: None,
        };
        inst.with_profile(profile)
    }

    /// Feasibility instance with zero objective and finite bounds.
    pub fn feasibility(
        matrix: IntMatrix,
        rhs: Vec<BigInt>,
        lower: Vec<BigInt>,
        upper: Vec<BigInt>,
        profile: Option<BlockProfile>,
    ) -> Result<Self> {
        let n = matrix.cols();
        IPInstance::new(
            matrix,
            rhs,
            lower.into_iter().map(Some).collect(),
            upper.into_iter().map(Some).collect(),
            vec![BigInt::zero(); n],
            profile,
        )
    }

    /// Replaces the profile after checking that the matrix has the structure.
    pub fn with_profile(mut self, profile: Option<BlockProfile>) -> Result<Self> {
        if let Some(p) = &profile {
            if !validate_profile(&self.matrix, p)? {
                return Err(Error::Validation(format!(
                    "matrix is not a {p} matrix"
                )));
            }
        }
        self.profile = profile;
        Ok(self)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    pub fn lower(&self) -> &[Option<BigInt>] {
        &self.lower
    }

    pub fn upper(&self) -> &[Option<BigInt>] {
        &self.upper
    }

    pub fn objective(&self) -> &[BigInt] {
        &self.objective
    }

    pub fn profile(&self) -> Option<&BlockProfile> {
        self.profile.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn has_finite_bounds(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(Option::is_some)
    }

    /// `Ok(())` when `x` satisfies every constraint and bound.
    pub fn check_solution(&self, x: &[BigInt]) -> Result<()> {
        let ax = self.matrix.mul_vec(x)?;
        if let Some(i) = (0..ax.len()).find(|&i| ax[i] != self.rhs[i]) {
            return Err(Error::Infeasible(format!(
                "row {} evaluates to {} instead of {}",
                i + 1,
                ax[i],
                self.rhs[i]
            )));
        }
        for (j, v) in x.iter().enumerate() {
            let below = self.lower[j].as_ref().is_some_and(|l| v < l);
            let above = self.upper[j].as_ref().is_some_and(|u| v > u);
            if below || above {
                return Err(Error::Infeasible(format!(
                    "column {} value {v} violates its bounds",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &[BigInt]) -> bool {
        self.check_solution(x).is_ok()
    }

    /// Instance with rows and columns rearranged by `p`; the profile is
    /// replaced by `profile` and re-validated.
    pub fn permuted(&self, p: &PermutationPair, profile: Option<BlockProfile>) -> Result<Self> {
        let matrix = super::permutation::apply_permutation(&self.matrix, p)?;
        IPInstance::new(
            matrix,
            p.row_perm.apply(&self.rhs),
            p.col_perm.apply(&self.lower),
            p.col_perm.apply(&self.upper),
            p.col_perm.apply(&self.objective),
            profile,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::Permutation;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sample() -> IPInstance {
        let a = IntMatrix::from_rows(&[vec![2, -1]]).unwrap();
        IPInstance::feasibility(a, big(&[0]), big(&[0, 0]), big(&[4, 4]), None).unwrap()
    }

    #[test]
    fn solution_check() {
        let inst = sample();
        assert!(inst.is_feasible(&big(&[1, 2])));
        assert!(inst.is_feasible(&big(&[2, 4])));
        assert!(!inst.is_feasible(&big(&[3, 6])));
        assert!(!inst.is_feasible(&big(&[1, 1])));
        assert!(inst.check_solution(&big(&[1])).is_err());
    }

    #[test]
    fn dimensions_are_checked() {
        let a = IntMatrix::zeros(1, 2);
        assert!(IPInstance::feasibility(a.clone(), big(&[]), big(&[0, 0]), big(&[1, 1]), None).is_err());
        assert!(IPInstance::feasibility(a, big(&[0]), big(&[2, 0]), big(&[1, 1]), None).is_err());
    }

    #[test]
    fn profile_must_match() {
        let dense = IntMatrix::from_rows(&[vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let p = BlockProfile::multistage(vec![1, 1]).unwrap();
        assert!(IPInstance::feasibility(dense, big(&[0, 0]), big(&[0; 3]), big(&[1; 3]), Some(p)).is_err());
    }

    #[test]
    fn permuting_moves_bounds_with_columns() {
        let inst = sample();
        let p = PermutationPair {
            row_perm: Permutation::identity(1),
            col_perm: Permutation::from_images(vec![1, 0]).unwrap(),
        };
        let q = inst.permuted(&p, None).unwrap();
        assert!(q.is_feasible(&big(&[2, 1])));
        assert_eq!(q.matrix().get(0, 0), BigInt::from(-1));
    }
}
