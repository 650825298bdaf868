//! Instance generators. A [`Recipe`] round-trips through the provenance
//! parameter map so `verify` can rebuild an instance and compare.

use std::collections::BTreeMap;

use blockstruct::blockmat::{BlockKind, IPInstance};
use blockstruct::graver::{witness_multistage, witness_treefold};
use blockstruct::reduce::{
    build_multistage, build_nfold, lift_nfold_to_treefold, ReductionCertificate, SubsetSumInstance, TwoStageBlock,
};
use blockstruct::{Error, Result};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Nfold {
        a: Vec<BigInt>,
        b: BigInt,
        sigma1: usize,
    },
    Treefold {
        a: Vec<BigInt>,
        b: BigInt,
        sigma1: usize,
        tau: usize,
    },
    Multistage {
        blocks: Vec<TwoStageBlock>,
        tau: usize,
        z_bound: BigInt,
    },
    Witness {
        kind: BlockKind,
        sigma: Vec<usize>,
        delta: BigInt,
    },
}

impl Recipe {
    pub fn source(&self) -> &'static str {
        match self {
            Recipe::Nfold { .. } => "nfold",
            Recipe::Treefold { .. } => "treefold",
            Recipe::Multistage { .. } => "multistage",
            Recipe::Witness { .. } => "witness",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            Recipe::Nfold { a, b, sigma1 } => {
                put("a", join(a));
                put("b", b.to_string());
                put("sigma1", sigma1.to_string());
            }
            Recipe::Treefold { a, b, sigma1, tau } => {
                put("a", join(a));
                put("b", b.to_string());
                put("sigma1", sigma1.to_string());
                put("tau", tau.to_string());
            }
            Recipe::Multistage { blocks, tau, z_bound } => {
                let triples: Vec<String> = blocks.iter().map(|k| format!("{}:{}:{}", k.q(), k.x(), k.y())).collect();
                put("blocks", triples.join(","));
                put("t", blocks.first().map_or(0, TwoStageBlock::t).to_string());
                put("tau", tau.to_string());
                put("z_bound", z_bound.to_string());
            }
            Recipe::Witness { kind, sigma, delta } => {
                put("kind", kind.to_string());
                put("sigma", join(sigma));
                put("delta", delta.to_string());
            }
        }
        m
    }

    pub fn from_parameters(source: &str, p: &BTreeMap<String, String>) -> Result<Recipe> {
        let get = |k: &str| {
            p.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Format(format!("provenance of {source:?} lacks parameter {k:?}")))
        };
        match source {
            "nfold" => Ok(Recipe::Nfold {
                a: parse_list(get("a")?)?,
                b: parse_one(get("b")?)?,
                sigma1: parse_one(get("sigma1")?)?,
            }),
            "treefold" => Ok(Recipe::Treefold {
                a: parse_list(get("a")?)?,
                b: parse_one(get("b")?)?,
                sigma1: parse_one(get("sigma1")?)?,
                tau: parse_one(get("tau")?)?,
            }),
            "multistage" => {
                let t: usize = parse_one(get("t")?)?;
                let blocks = get("blocks")?
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_block(s, Some(t)))
                    .collect::<Result<_>>()?;
                Ok(Recipe::Multistage {
                    blocks,
                    tau: parse_one(get("tau")?)?,
                    z_bound: parse_one(get("z_bound")?)?,
                })
            }
            "witness" => Ok(Recipe::Witness {
                kind: match get("kind")? {
                    "multi-stage" => BlockKind::MultiStage,
                    "tree-fold" => BlockKind::TreeFold,
                    other => return Err(Error::Format(format!("unknown witness kind {other:?}"))),
                },
                sigma: parse_list(get("sigma")?)?,
                delta: parse_one(get("delta")?)?,
            }),
            other => Err(Error::Format(format!("unknown generator {other:?}"))),
        }
    }

    /// The subset-sum source, for generators that have one.
    pub fn subset_sum(&self) -> Option<Result<SubsetSumInstance>> {
        match self {
            Recipe::Nfold { a, b, .. } | Recipe::Treefold { a, b, .. } => {
                Some(SubsetSumInstance::new(a.clone(), b.clone()))
            }
            _ => None,
        }
    }

    pub fn build(&self) -> Result<(IPInstance, Option<ReductionCertificate>)> {
        match self {
            Recipe::Nfold { a, b, sigma1 } => {
                let ss = SubsetSumInstance::new(a.clone(), b.clone())?;
                let (inst, cert) = build_nfold(&ss, *sigma1)?;
                Ok((inst, Some(cert)))
            }
            Recipe::Treefold { a, b, sigma1, tau } => {
                let ss = SubsetSumInstance::new(a.clone(), b.clone())?;
                let (nfold, cert) = build_nfold(&ss, *sigma1)?;
                let (inst, _, cert) = lift_nfold_to_treefold(&nfold, &cert, *tau)?;
                Ok((inst, Some(cert)))
            }
            Recipe::Multistage { blocks, tau, z_bound } => {
                let (inst, cert) = build_multistage(blocks, *tau, z_bound)?;
                Ok((inst, Some(cert)))
            }
            Recipe::Witness { kind, sigma, delta } => {
                let (a, profile) = match kind {
                    BlockKind::MultiStage => witness_multistage(sigma.len(), sigma, delta)?,
                    BlockKind::TreeFold => witness_treefold(sigma.len(), sigma, delta)?,
                };
                let n = a.cols();
                let rhs = vec![BigInt::from(0); a.rows()];
                let inst = IPInstance::new(a, rhs, vec![None; n], vec![None; n], vec![BigInt::from(0); n], Some(profile))?;
                Ok((inst, None))
            }
        }
    }
}

/// `q:x:y`; `t` defaults to the smallest value consistent with the numbers.
pub fn parse_block(s: &str, t: Option<usize>) -> Result<TwoStageBlock> {
    let parts: Vec<&str> = s.split(':').collect();
    let [q, x, y] = parts[..] else {
        return Err(Error::InvalidParameter(format!("block {s:?} is not of the form q:x:y")));
    };
    let (q, x, y) = (parse_one(q)?, parse_one(x)?, parse_one(y)?);
    match t {
        Some(t) => TwoStageBlock::new(q, x, y, t),
        None => TwoStageBlock::from_numbers(q, x, y),
    }
}

/// `count` blocks whose binary encodings use exactly `t + 1` bits in total,
/// split at random between `q`, `x` and `y`.
pub fn random_blocks(count: usize, t: usize, seed: u64) -> Result<Vec<TwoStageBlock>> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("random blocks need t >= 2, got {t}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // segment lengths >= 1 summing to t + 1
            let c1 = rng.gen_range(1..t);
            let c2 = rng.gen_range(c1 + 1..t + 1);
            let lens = [c1, c2 - c1, t + 1 - c2];
            let mut value = |eta: usize| -> BigInt {
                let bits = eta - 1;
                if bits == 0 {
                    return BigInt::from(0);
                }
                let mut v = BigInt::from(1u32) << (bits - 1);
                for k in 0..bits - 1 {
                    if rng.gen_bool(0.5) {
                        v += BigInt::from(1u32) << k;
                    }
                }
                v
            };
            let (q, x, y) = (value(lens[0]), value(lens[1]), value(lens[2]));
            TwoStageBlock::new(q, x, y, t)
        })
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_one<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {s:?}")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_one).collect()
}
