use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    MultiStage,
    TreeFold,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::MultiStage => "multi-stage",
            BlockKind::TreeFold => "tree-fold",
        })
    }
}

/// Structure descriptor: kind plus stage (level) sizes `sigma`, one per
/// stage, so `tau = sigma.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct BlockProfile {
    kind: BlockKind,
    sigma: Vec<usize>,
}

impl BlockProfile {
    pub fn new(kind: BlockKind, sigma: Vec<usize>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::InvalidProfile("at least one stage is required".into()));
        }
        if sigma.contains(&0) {
            return Err(Error::InvalidProfile(format!(
                "stage sizes must be positive, got {sigma:?}"
            )));
        }
        Ok(BlockProfile { kind, sigma })
    }

    pub fn multistage(sigma: Vec<usize>) -> Result<Self> {
        Self::new(BlockKind::MultiStage, sigma)
    }

    pub fn treefold(sigma: Vec<usize>) -> Result<Self> {
        Self::new(BlockKind::TreeFold, sigma)
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn tau(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `prod (sigma_i + 1)`.
    pub fn block_product(&self) -> usize {
        self.sigma.iter().map(|s| s + 1).product()
    }
}

impl fmt::Display for BlockProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} tau={} sigma={:?}", self.kind, self.tau(), self.sigma)
    }
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    kind: BlockKind,
    tau: usize,
    sigma: Vec<usize>,
}

impl TryFrom<RawProfile> for BlockProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        if raw.tau != raw.sigma.len() {
            return Err(Error::InvalidProfile(format!(
                "tau = {} but sigma has {} entries",
                raw.tau,
                raw.sigma.len()
            )));
        }
        BlockProfile::new(raw.kind, raw.sigma)
    }
}

impl From<BlockProfile> for RawProfile {
    fn from(p: BlockProfile) -> Self {
        RawProfile {
            kind: p.kind,
            tau: p.sigma.len(),
            sigma: p.sigma,
        }
    }
}

/// One block of a multi-stage decomposition: its first-stage columns and the
/// independent blocks left after deleting them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageNode {
    pub head: Vec<usize>,
    pub children: Vec<StageNode>,
}

impl StageNode {
    /// Number of first-stage entries on the longest root-to-leaf chain.
    pub fn depth(&self) -> usize {
        self.head.len() + self.children.iter().map(StageNode::depth).max().unwrap_or(0)
    }
}

/// Recursive multi-stage decomposition of the columns of `a`, or `None` when
/// `a` does not have the structure.
///
/// After removing the first `sigma_1` columns, the remaining columns are cut
/// into the finest sequence of contiguous diagonal blocks (every valid cut is
/// taken; zero columns and rows may sit in any block). Blocks at the last stage
/// may hold at most `sigma_tau` columns. A single stage accepts any matrix.
pub fn multistage_layout(a: &IntMatrix, sigma: &[usize]) -> Result<Option<StageNode>> {
    if sigma.is_empty() {
        return Err(Error::InvalidProfile("at least one stage is required".into()));
    }
    let all: Vec<usize> = (0..a.cols()).collect();
    if sigma.len() == 1 {
        return Ok(Some(StageNode {
            head: all,
            children: Vec::new(),
        }));
    }
    if sigma[0] > a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "first stage has {} columns but the matrix has only {}",
            sigma[0],
            a.cols()
        )));
    }
    let support = a.column_supports();
    Ok(decompose(&all, sigma, &support))
}

fn decompose(cols: &[usize], sigma: &[usize], support: &[Vec<usize>]) -> Option<StageNode> {
    if sigma.len() == 1 {
        return (cols.len() <= sigma[0]).then(|| StageNode {
            head: cols.to_vec(),
            children: Vec::new(),
        });
    }
    let k = sigma[0].min(cols.len());
    let (head, rest) = cols.split_at(k);

    // prefix_max[p]: largest row used by rest[..=p]; suffix_min[p]: smallest
    // row used by rest[p..]. A cut after p is valid iff the two do not overlap.
    let mut prefix_max: Vec<Option<usize>> = Vec::with_capacity(rest.len());
    let mut acc = None;
    for &c in rest {
        acc = acc.max(support[c].last().copied());
        prefix_max.push(acc);
    }
    let mut suffix_min: Vec<Option<usize>> = vec![None; rest.len()];
    let mut acc: Option<usize> = None;
    for (p, &c) in rest.iter().enumerate().rev() {
        acc = match (acc, support[c].first().copied()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        suffix_min[p] = acc;
    }

    let mut children = Vec::new();
    let mut start = 0;
    for p in 0..rest.len() {
        let cut = p + 1 == rest.len()
            || match (prefix_max[p], suffix_min[p + 1]) {
                (Some(hi), Some(lo)) => hi < lo,
                _ => true,
            };
        if cut {
            children.push(decompose(&rest[start..=p], &sigma[1..], support)?);
            start = p + 1;
        }
    }
    Some(StageNode {
        head: head.to_vec(),
        children,
    })
}

fn expect_kind(profile: &BlockProfile, kind: BlockKind) -> Result<()> {
    if profile.kind() != kind {
        return Err(Error::InvalidProfile(format!(
            "expected a {kind} profile, got {}",
            profile.kind()
        )));
    }
    Ok(())
}

/// Whether `a` is a multi-stage matrix with the stage sizes of `profile`.
pub fn validate_multistage(a: &IntMatrix, profile: &BlockProfile) -> Result<bool> {
    expect_kind(profile, BlockKind::MultiStage)?;
    Ok(multistage_layout(a, profile.sigma())?.is_some())
}

/// Whether `a` is a tree-fold matrix with the level sizes of `profile`;
/// equivalent to the multi-stage check on the transpose.
pub fn validate_treefold(a: &IntMatrix, profile: &BlockProfile) -> Result<bool> {
    expect_kind(profile, BlockKind::TreeFold)?;
    if profile.tau() > 1 && profile.sigma()[0] > a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "first level has {} rows but the matrix has only {}",
            profile.sigma()[0],
            a.rows()
        )));
    }
    Ok(multistage_layout(&a.transpose(), profile.sigma())?.is_some())
}

/// Dispatches on the profile kind.
pub fn validate_profile(a: &IntMatrix, profile: &BlockProfile) -> Result<bool> {
    match profile.kind() {
        BlockKind::MultiStage => validate_multistage(a, profile),
        BlockKind::TreeFold => validate_treefold(a, profile),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ms(sigma: &[usize]) -> BlockProfile {
        BlockProfile::multistage(sigma.to_vec()).unwrap()
    }

    fn tf(sigma: &[usize]) -> BlockProfile {
        BlockProfile::treefold(sigma.to_vec()).unwrap()
    }

    /// Two-stage stochastic shape: A_i in the first column, D_i (1x2) blocks.
    fn two_stage() -> IntMatrix {
        m(&[
            vec![1, 2, 3, 0, 0],
            vec![4, 0, 0, 5, 6],
        ])
    }

    /// n-fold shape: C_i in the first row, D_i below.
    fn nfold() -> IntMatrix {
        m(&[
            vec![1, 1, 2, 2],
            vec![3, 4, 0, 0],
            vec![0, 0, 5, 6],
        ])
    }

    #[test]
    fn two_stage_shape_is_multistage() {
        assert!(validate_multistage(&two_stage(), &ms(&[1, 2])).unwrap());
        assert!(!validate_multistage(&two_stage(), &ms(&[1, 1])).unwrap());
    }

    #[test]
    fn nfold_shape_is_treefold() {
        assert!(validate_treefold(&nfold(), &tf(&[1, 1])).unwrap());
        assert!(validate_multistage(&nfold().transpose(), &ms(&[1, 1])).unwrap());
    }

    #[test]
    fn single_stage_accepts_anything() {
        let dense = m(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
        assert!(validate_multistage(&dense, &ms(&[1])).unwrap());
        assert!(validate_treefold(&dense, &tf(&[1])).unwrap());
    }

    #[test]
    fn dense_block_has_no_split() {
        let dense = m(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
        assert!(!validate_multistage(&dense, &ms(&[1, 1])).unwrap());
        assert!(!validate_treefold(&dense.transpose(), &tf(&[1, 1])).unwrap());
    }

    #[test]
    fn oversized_first_stage_is_an_error() {
        let a = m(&[vec![1, 0]]);
        assert!(matches!(
            validate_multistage(&a, &ms(&[3, 1])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(validate_treefold(&a, &tf(&[2, 1])).is_err());
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(validate_multistage(&two_stage(), &tf(&[1, 2])).is_err());
    }

    #[test]
    fn anti_diagonal_blocks_are_merged() {
        // After column 1 the remaining blocks sit on the anti-diagonal, so
        // they only form one block of two columns.
        let a = m(&[vec![1, 0, 1], vec![1, 1, 0]]);
        assert!(!validate_multistage(&a, &ms(&[1, 1])).unwrap());
        assert!(validate_multistage(&a, &ms(&[1, 2])).unwrap());
    }

    #[test]
    fn three_stage_layout() {
        // column 0 links everything; column 1 links the first two leaves.
        let a = m(&[
            vec![1, 1, 1, 0, 0],
            vec![1, 1, 0, 1, 0],
            vec![1, 0, 0, 0, 1],
        ]);
        let layout = multistage_layout(&a, &[1, 1, 1]).unwrap().unwrap();
        assert_eq!(layout.head, vec![0]);
        assert_eq!(layout.children.len(), 2);
        assert_eq!(layout.children[0].head, vec![1]);
        assert_eq!(layout.depth(), 3);
        assert!(!validate_multistage(&a, &ms(&[1, 1])).unwrap());
    }

    #[test]
    fn profile_rejects_bad_sizes() {
        assert!(BlockProfile::multistage(vec![]).is_err());
        assert!(BlockProfile::multistage(vec![1, 0]).is_err());
        let p = ms(&[2, 1]);
        assert_eq!((p.tau(), p.block_product()), (2, 6));
    }

    proptest! {
        #[test]
        fn treefold_is_multistage_of_transpose(
            rows in proptest::collection::vec(proptest::collection::vec(-1i64..=1, 5), 1..6),
            sigma in proptest::collection::vec(1usize..3, 1..4),
        ) {
            let a = m(&rows);
            let lhs = validate_treefold(&a, &tf(&sigma)).ok();
            let rhs = validate_multistage(&a.transpose(), &ms(&sigma)).ok();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
