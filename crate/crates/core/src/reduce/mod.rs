//! Reductions producing hard block-structured instances.
//!
//! * Subset sum to an n-fold (two-level tree-fold) feasibility program, and
//!   from there to tree-fold programs with more levels.
//! * Two-stage stochastic block systems to multi-stage feasibility programs
//!   whose diagonal blocks come from tri-diagonal reformulations.
//!
//! Every construction returns a [`ReductionCertificate`] that maps source
//! witnesses to target solutions and back.

mod subsetsum;
mod twostage;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::blockmat::{IPInstance, Permutation};
use crate::encoding::eta;
use crate::error::{Error, Result};

pub use subsetsum::{
    build_cd_system, build_nfold, choose_subsetsum_params, choose_treefold_levels,
    lift_nfold_to_treefold,
};
pub use twostage::{
    build_multistage, choose_multistage_params, expand_b, interleave_to_tridiagonal,
    normalize_block, source_block_matrix, split_dense_row, two_stage_instance, two_stage_satisfied,
    NormalizedBlock,
};

/// `sum a_i x_i = b` over `x in {0,1}^n`, with `0 <= a_i < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumInstance {
    a: Vec<BigInt>,
    b: BigInt,
}

impl SubsetSumInstance {
    pub fn new(a: Vec<BigInt>, b: BigInt) -> Result<Self> {
        if b.is_negative() {
            return Err(Error::NegativeInput(format!("target b = {b}")));
        }
        for (i, ai) in a.iter().enumerate() {
            if ai.is_negative() {
                return Err(Error::NegativeInput(format!("a_{} = {ai}", i + 1)));
            }
            if *ai >= b {
                return Err(Error::InvalidParameter(format!(
                    "a_{} = {ai} must be smaller than b = {b}",
                    i + 1
                )));
            }
        }
        Ok(SubsetSumInstance { a, b })
    }

    pub fn from_i64(a: &[i64], b: i64) -> Result<Self> {
        SubsetSumInstance::new(a.iter().map(|&v| v.into()).collect(), b.into())
    }

    pub fn a(&self) -> &[BigInt] {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_solution(&self, x: &[bool]) -> bool {
        x.len() == self.a.len()
            && self
                .a
                .iter()
                .zip(x)
                .filter(|(_, &s)| s)
                .map(|(a, _)| a)
                .sum::<BigInt>()
                == self.b
    }
}

/// One second-stage block `D` of a two-stage stochastic system, given by the
/// numbers `q`, `x`, `y` whose binary encodings fill its first row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStageBlock {
    q: BigInt,
    x: BigInt,
    y: BigInt,
    t: usize,
}

impl TwoStageBlock {
    /// `t` is the number of rows; the encodings must have `t + 1` bits in total.
    pub fn new(q: BigInt, x: BigInt, y: BigInt, t: usize) -> Result<Self> {
        let total = eta(&q)? + eta(&x)? + eta(&y)?;
        if total != t + 1 {
            return Err(Error::DimensionMismatch(format!(
                "encodings of (q, x, y) = ({q}, {x}, {y}) use {total} bits, expected t + 1 = {}",
                t + 1
            )));
        }
        Ok(TwoStageBlock { q, x, y, t })
    }

    /// Block with the smallest consistent `t`.
    pub fn from_numbers(q: BigInt, x: BigInt, y: BigInt) -> Result<Self> {
        let t = eta(&q)? + eta(&x)? + eta(&y)? - 1;
        TwoStageBlock::new(q, x, y, t)
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `(eta(q), eta(x), eta(y))`.
    pub fn segment_lengths(&self) -> (usize, usize, usize) {
        let e = |v: &BigInt| eta(v).expect("validated on construction");
        (e(&self.q), e(&self.x), e(&self.y))
    }
}

/// A solution of a source problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceWitness {
    /// Subset selection `x in {0,1}^n`.
    Selection(Vec<bool>),
    /// Global variable `r` and per-block variables `z^(k)` of a two-stage
    /// system, in the block's original column order.
    TwoStage { r: BigInt, z: Vec<Vec<BigInt>> },
}

/// How source witnesses and target solutions correspond for the subset-sum
/// pipeline. Target columns come in `n + sigma1 - 1` groups of `stride`
/// columns; the first `t` columns of a group carry a multiple of
/// `(1, 2, ..., 2^(t-1))` and the rest are fixed to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumCertificate {
    pub source: SubsetSumInstance,
    pub delta: BigInt,
    pub t: usize,
    pub sigma1: usize,
    pub stride: usize,
}

/// How source witnesses and target solutions correspond for the two-stage
/// pipeline. Target column 0 holds `-r`; block `k` occupies `block_cols`
/// columns after it, laid out by `col_perm` from the interleaved order
/// `(p_1, z_1, ..., p_(t+1), z_(t+1), padding)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStageCertificate {
    pub blocks: Vec<TwoStageBlock>,
    pub s: usize,
    pub tau: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub col_perm: Permutation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionCertificate {
    SubsetSum(SubsetSumCertificate),
    TwoStage(TwoStageCertificate),
}

impl ReductionCertificate {
    /// Target solution corresponding to a source witness.
    pub fn extend(&self, witness: &SourceWitness) -> Result<Vec<BigInt>> {
        match (self, witness) {
            (ReductionCertificate::SubsetSum(c), SourceWitness::Selection(x)) => c.extend(x),
            (ReductionCertificate::TwoStage(c), SourceWitness::TwoStage { r, z }) => {
                c.extend(r, z)
            }
            _ => Err(Error::InvalidParameter(
                "witness kind does not match the certificate".into(),
            )),
        }
    }

    /// Source witness read off a target solution. Does not check feasibility;
    /// see [`project_solution`].
    pub fn project(&self, target: &[BigInt]) -> Result<SourceWitness> {
        match self {
            ReductionCertificate::SubsetSum(c) => c.project(target).map(SourceWitness::Selection),
            ReductionCertificate::TwoStage(c) => {
                let (r, z) = c.project(target)?;
                Ok(SourceWitness::TwoStage { r, z })
            }
        }
    }

    /// Short key/value description for provenance records.
    pub fn summary(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        match self {
            ReductionCertificate::SubsetSum(c) => {
                m.insert("source".into(), "subset-sum".into());
                m.insert("delta".into(), c.delta.to_string());
                m.insert("t".into(), c.t.to_string());
                m.insert("sigma1".into(), c.sigma1.to_string());
                m.insert("stride".into(), c.stride.to_string());
                m.insert("blocks".into(), (c.source.len() + c.sigma1 - 1).to_string());
            }
            ReductionCertificate::TwoStage(c) => {
                m.insert("source".into(), "two-stage".into());
                m.insert("s".into(), c.s.to_string());
                m.insert("tau".into(), c.tau.to_string());
                m.insert("blocks".into(), c.blocks.len().to_string());
                m.insert("block_rows".into(), c.block_rows.to_string());
                m.insert("block_cols".into(), c.block_cols.to_string());
            }
        }
        m
    }
}

/// Checks `target` against `instance` and maps it back to a feasible source
/// witness.
pub fn project_solution(
    instance: &IPInstance,
    certificate: &ReductionCertificate,
    target: &[BigInt],
) -> Result<SourceWitness> {
    instance.check_solution(target)?;
    let witness = certificate.project(target)?;
    match (&witness, certificate) {
        (SourceWitness::Selection(x), ReductionCertificate::SubsetSum(c)) => {
            if !c.source.is_solution(x) {
                return Err(Error::Infeasible(
                    "projected selection does not hit the target sum".into(),
                ));
            }
        }
        (SourceWitness::TwoStage { r, z }, ReductionCertificate::TwoStage(c)) => {
            if !two_stage_satisfied(&c.blocks, r, z)? {
                return Err(Error::Infeasible(
                    "projected two-stage witness violates a source row".into(),
                ));
            }
        }
        _ => unreachable!("certificate kinds produce matching witnesses"),
    }
    Ok(witness)
}
