//! Brute-force oracles and fixtures shared by the integration tests. Each
//! oracle works directly from the definitions on machine integers and
//! shares no code with the library beyond the matrix type.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use blockstruct::blockmat::{BlockProfile, IPInstance, IntMatrix};
use blockstruct::graver::{witness_multistage, witness_treefold};
use blockstruct::reduce::{build_multistage, build_nfold, lift_nfold_to_treefold, SubsetSumInstance, TwoStageBlock};
use blockstruct::restructure::{to_multistage, to_treefold};
use blockstruct::blockmat::Band;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dense_i64(a: &IntMatrix) -> Vec<Vec<i64>> {
    a.to_dense()
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.to_i64().expect("small entry")).collect())
        .collect()
}

pub fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("small value")).collect()
}

/// Whether some subset of `a` sums to `b`, by trying all `2^n` subsets.
pub fn subset_sum_brute(a: &[i64], b: i64) -> bool {
    (0u32..1 << a.len()).any(|mask| {
        a.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .sum::<i64>()
            == b
    })
}

fn is_kernel(a: &[Vec<i64>], v: &[i64]) -> bool {
    a.iter().all(|row| row.iter().zip(v).map(|(x, y)| x * y).sum::<i64>() == 0)
}

/// `u ⊑ v`: same sign pattern where `u` is nonzero and no larger in
/// absolute value.
pub fn conformal(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(&x, &y)| x == 0 || (x * y > 0 && x.abs() <= y.abs()))
}

/// Graver elements with max-norm at most `cap`, straight from the
/// definition: nonzero kernel vectors of the box with no other nonzero
/// kernel vector conformally below them. Both signs are included.
pub fn graver_brute(a: &IntMatrix, cap: i64) -> BTreeSet<Vec<i64>> {
    let rows = dense_i64(a);
    let n = a.cols();
    let side = (2 * cap + 1) as usize;
    let total = side.pow(n as u32);
    let mut kernel = Vec::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % side) as i64 - cap;
                c /= side;
                d
            })
            .collect();
        if v.iter().any(|&x| x != 0) && is_kernel(&rows, &v) {
            kernel.push(v);
        }
    }
    let set: HashSet<Vec<i64>> = kernel.iter().cloned().collect();
    kernel
        .into_iter()
        .filter(|v| !has_proper_conformal_kernel_vector(v, &set))
        .collect()
}

fn has_proper_conformal_kernel_vector(v: &[i64], kernel: &HashSet<Vec<i64>>) -> bool {
    // walk the box of vectors conformally below v
    let n = v.len();
    let mut u = vec![0i64; n];
    loop {
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            if u[k].abs() < v[k].abs() {
                u[k] += v[k].signum();
                break;
            }
            u[k] = 0;
            k += 1;
        }
        if u.as_slice() != v && kernel.contains(&u) {
            return true;
        }
    }
}

/// All solutions of `M x = 0` with `lo <= x <= hi`, by depth-first
/// enumeration in column order; a row is checked once its last nonzero
/// column is assigned.
pub fn all_solutions(m: &[Vec<i64>], lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let n = lo.len();
    let last: Vec<Option<usize>> = m.iter().map(|row| row.iter().rposition(|&v| v != 0)).collect();
    let mut due = vec![Vec::new(); n];
    for (i, l) in last.iter().enumerate() {
        if let Some(j) = l {
            due[*j].push(i);
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn go(k: usize, x: &mut Vec<i64>, m: &[Vec<i64>], lo: &[i64], hi: &[i64], due: &[Vec<usize>], out: &mut Vec<Vec<i64>>) {
        if k == x.len() {
            out.push(x.clone());
            return;
        }
        for v in lo[k]..=hi[k] {
            x[k] = v;
            let ok = due[k]
                .iter()
                .all(|&i| m[i].iter().zip(x.iter()).take(k + 1).map(|(a, b)| a * b).sum::<i64>() == 0);
            if ok {
                go(k + 1, x, m, lo, hi, due, out);
            }
        }
    }
    go(0, &mut x, m, lo, hi, &due, &mut out);
    out
}

pub fn random_bidiagonal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    random_band(rows, cols, 1, rng)
}

pub fn random_tridiagonal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    random_band(rows, cols, 2, rng)
}

/// Entries in `[-9, 9]` at positions `(i, j)` with `j <= i <= j + width`.
fn random_band(rows: usize, cols: usize, width: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut a = IntMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in j..(j + width + 1).min(rows) {
            a.set(i, j, BigInt::from(rng.gen_range(-9i64..=9)));
        }
    }
    a
}

/// Every vector of `len` entries from `values` (`values.len()^len` of them).
pub fn all_vectors(values: &[usize], len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                values.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect()
    })
}

/// Random block with encodings using exactly `t + 1` bits in total.
pub fn random_block(t: usize, rng: &mut ChaCha8Rng) -> TwoStageBlock {
    let c1 = rng.gen_range(1..t);
    let c2 = rng.gen_range(c1 + 1..t + 1);
    let mut value = |eta: usize| -> BigInt {
        if eta == 1 {
            return BigInt::from(0);
        }
        let lo = 1i64 << (eta - 2);
        BigInt::from(rng.gen_range(lo..2 * lo))
    };
    let (q, x, y) = (value(c1), value(c2 - c1), value(t + 1 - c2));
    TwoStageBlock::new(q, x, y, t).unwrap()
}

/// Instances (with a profile) produced by every generator, used as the
/// shared test corpus.
pub fn corpus() -> Vec<(String, IPInstance)> {
    let mut out = Vec::new();
    let subset_sums: &[(&[i64], i64)] = &[(&[3, 5, 6], 8), (&[2, 4], 7), (&[1, 9, 14, 20], 30), (&[0, 5], 16)];
    for &(a, b) in subset_sums {
        let ss = SubsetSumInstance::from_i64(a, b).unwrap();
        for sigma1 in 1..=4 {
            let Ok((inst, cert)) = build_nfold(&ss, sigma1) else { continue };
            for tau in 3..=4 {
                if let Ok((lifted, _, _)) = lift_nfold_to_treefold(&inst, &cert, tau) {
                    out.push((format!("treefold a={a:?} b={b} sigma1={sigma1} tau={tau}"), lifted));
                }
            }
            out.push((format!("nfold a={a:?} b={b} sigma1={sigma1}"), inst));
        }
    }
    let mut r = rng(5);
    for (t, count, tau) in [(2, 1, 2), (3, 2, 2), (4, 2, 3), (6, 3, 3)] {
        let blocks: Vec<_> = (0..count).map(|_| random_block(t, &mut r)).collect();
        let (inst, _) = build_multistage(&blocks, tau, &BigInt::from(1)).unwrap();
        out.push((format!("multistage t={t} blocks={count} tau={tau}"), inst));
    }
    let d = BigInt::from(2);
    for sigma in [vec![1, 1], vec![2, 1], vec![1, 1, 1]] {
        let (a, p) = witness_multistage(sigma.len(), &sigma, &d).unwrap();
        out.push((format!("witness multistage {sigma:?}"), unbounded(a, p)));
        let (a, p) = witness_treefold(sigma.len(), &sigma, &d).unwrap();
        out.push((format!("witness treefold {sigma:?}"), unbounded(a, p)));
    }
    for sigma in [vec![1, 1], vec![2, 1], vec![1, 2, 1]] {
        let s: usize = sigma.iter().map(|x| x + 1).product();
        let a = random_bidiagonal(s, s - 1, &mut r);
        let res = to_multistage(&a, &sigma, Band::Bi).unwrap();
        out.push((format!("restructured bi {sigma:?}"), unbounded(res.matrix, res.profile)));
        let a = random_tridiagonal(2 * s, 2 * s - 2, &mut r);
        let res = to_multistage(&a, &sigma, Band::Tri).unwrap();
        out.push((format!("restructured tri {sigma:?}"), unbounded(res.matrix, res.profile)));
        let res = to_treefold(&random_bidiagonal(s, s - 1, &mut r).transpose(), &sigma, Band::Bi).unwrap();
        out.push((format!("restructured treefold {sigma:?}"), unbounded(res.matrix, res.profile)));
    }
    out
}

fn unbounded(a: IntMatrix, profile: BlockProfile) -> IPInstance {
    let (m, n) = (a.rows(), a.cols());
    IPInstance::new(a, vec![BigInt::from(0); m], vec![None; n], vec![None; n], vec![BigInt::from(0); n], Some(profile))
        .unwrap()
}

/// Minimal fixed-format MPS reader for the subset this crate writes:
/// returns rows, columns, coefficients, rhs and bounds.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct MpsModel {
    pub name: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub entries: Vec<(String, String, BigInt)>,
    pub rhs: Vec<(String, BigInt)>,
    pub lower: Vec<(String, BigInt)>,
    pub upper: Vec<(String, BigInt)>,
    pub integer_columns: BTreeSet<String>,
}

pub fn read_mps(text: &str) -> MpsModel {
    let mut m = MpsModel::default();
    let mut section = "";
    let mut integer = false;
    for line in text.lines() {
        if !line.starts_with(' ') {
            let mut parts = line.split_whitespace();
            section = match parts.next().unwrap() {
                "NAME" => {
                    // the name starts at column 15
                    m.name = line.get(14..).unwrap_or("").trim().to_string();
                    "NAME"
                }
                "ROWS" => "ROWS",
                "COLUMNS" => "COLUMNS",
                "RHS" => "RHS",
                "BOUNDS" => "BOUNDS",
                "ENDATA" => "ENDATA",
                other => panic!("unknown section {other}"),
            };
            continue;
        }
        // fixed fields: 2-3, 5-12, 15-22, 25-36, 40-47
        let field = |a: usize, b: usize| line.get(a - 1..b.min(line.len())).unwrap_or("").trim().to_string();
        let f1 = field(2, 3);
        let f2 = field(5, 12);
        let f3 = field(15, 22);
        let f4 = if line.len() > 24 { line[24..].split_whitespace().next().unwrap_or("").to_string() } else { String::new() };
        match section {
            "ROWS" => {
                if f1 == "E" {
                    m.rows.push(f2);
                } else {
                    assert_eq!((f1.as_str(), f2.as_str()), ("N", "OBJ"));
                }
            }
            "COLUMNS" => {
                if f3 == "'MARKER'" {
                    integer = line.contains("'INTORG'");
                    continue;
                }
                if m.columns.last() != Some(&f2) {
                    m.columns.push(f2.clone());
                }
                if integer {
                    m.integer_columns.insert(f2.clone());
                }
                m.entries.push((f2, f3, f4.parse().unwrap()));
            }
            "RHS" => m.rhs.push((f3, f4.parse().unwrap())),
            "BOUNDS" => match f1.as_str() {
                "LI" => m.lower.push((f3, f4.parse().unwrap())),
                "UI" => m.upper.push((f3, f4.parse().unwrap())),
                other => panic!("unexpected bound type {other}"),
            },
            _ => panic!("data line outside a section: {line:?}"),
        }
    }
    assert_eq!(section, "ENDATA");
    m
}

/// Rebuilds an instance (without profile) from an MPS model written for an
/// instance with `rows x cols` constraints.
pub fn instance_from_mps(m: &MpsModel) -> IPInstance {
    let index = |name: &str, prefix: char| -> usize { name.strip_prefix(prefix).unwrap().parse::<usize>().unwrap() - 1 };
    let (rows, cols) = (m.rows.len(), m.columns.len());
    let mut a = IntMatrix::zeros(rows, cols);
    let mut objective = vec![BigInt::from(0); cols];
    for (c, r, v) in &m.entries {
        if r == "OBJ" {
            objective[index(c, 'C')] = v.clone();
        } else {
            a.set(index(r, 'R'), index(c, 'C'), v.clone());
        }
    }
    let mut rhs = vec![BigInt::from(0); rows];
    for (r, v) in &m.rhs {
        rhs[index(r, 'R')] = v.clone();
    }
    let mut lower = vec![None; cols];
    let mut upper = vec![None; cols];
    for (c, v) in &m.lower {
        lower[index(c, 'C')] = Some(v.clone());
    }
    for (c, v) in &m.upper {
        upper[index(c, 'C')] = Some(v.clone());
    }
    IPInstance::new(a, rhs, lower, upper, objective, None).unwrap()
}
