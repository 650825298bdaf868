//! Graver bases of small integer matrices and the encoding-matrix witnesses
//! with large Graver norms.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::blockmat::{pad_zero, Band, BlockProfile, IntMatrix};
use crate::encoding::encoding_matrix;
use crate::error::{Error, Result};
use crate::restructure::{block_product, to_multistage, to_treefold};

type Vector = Vec<BigInt>;

/// Graver basis elements up to sign, stored with a positive leading nonzero
/// entry and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverSet {
    elements: Vec<Vector>,
    truncated: bool,
    norm_cap: BigInt,
    g_inf: BigInt,
    g_1: BigInt,
}

impl GraverSet {
    fn new(mut elements: Vec<Vector>, truncated: bool, norm_cap: BigInt) -> Self {
        elements.sort();
        let g_inf = elements.iter().map(|v| linf(v)).max().unwrap_or_default();
        let g_1 = elements.iter().map(|v| l1(v)).max().unwrap_or_default();
        GraverSet {
            elements,
            truncated,
            norm_cap,
            g_inf,
            g_1,
        }
    }

    /// One representative per `{g, -g}` pair.
    pub fn elements(&self) -> &[Vector] {
        &self.elements
    }

    /// Every element together with its negation.
    pub fn signed_elements(&self) -> impl Iterator<Item = Vector> + '_ {
        self.elements
            .iter()
            .flat_map(|g| [g.clone(), g.iter().map(|v| -v).collect()])
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let canon = canonical(v.to_vec());
        self.elements.binary_search(&canon).is_ok()
    }

    /// Number of elements counting both signs.
    pub fn len(&self) -> usize {
        2 * self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether elements above the norm cap were dropped.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn norm_cap(&self) -> &BigInt {
        &self.norm_cap
    }

    /// Largest max-norm among the kept elements.
    pub fn g_inf(&self) -> &BigInt {
        &self.g_inf
    }

    /// Largest 1-norm among the kept elements.
    pub fn g_1(&self) -> &BigInt {
        &self.g_1
    }
}

fn linf(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

fn l1(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

/// Flips the sign so the first nonzero entry is positive.
fn canonical(v: Vector) -> Vector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// Row-style Hermite normal form of the rows of `rows`, dropping zero rows:
/// pivots are positive and entries above a pivot lie in `[0, pivot)`.
fn row_hnf(mut rows: Vec<Vector>, n: usize) -> Vec<Vector> {
    let mut r = 0;
    for j in 0..n {
        while let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][j].is_zero())
            .min_by(|&a, &b| rows[a][j].abs().cmp(&rows[b][j].abs()))
        {
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if !rows[i][j].is_zero() {
                    let q = rows[i][j].div_floor(&rows[r][j]);
                    let pivot = rows[r].clone();
                    axpy(&mut rows[i], &-q, &pivot);
                    done &= rows[i][j].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if r == rows.len() || rows[r][j].is_zero() {
            continue;
        }
        if rows[r][j].is_negative() {
            rows[r].iter_mut().for_each(|x| *x = -&*x);
        }
        let pivot = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            let q = row[j].div_floor(&pivot[j]);
            axpy(row, &-q, &pivot);
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// `y += a x`.
fn axpy(y: &mut [BigInt], a: &BigInt, x: &[BigInt]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Columns form a basis of the lattice `{x in Z^n : Ax = 0}`, in Hermite
/// normal form (read as rows). A trivial kernel gives an `n x 0` matrix.
pub fn kernel_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let basis = kernel_vectors(a);
    let n = a.cols();
    IntMatrix::from_entries(
        n,
        basis.len(),
        basis
            .iter()
            .enumerate()
            .flat_map(|(c, v)| v.iter().enumerate().map(move |(r, x)| (r, c, x.clone()))),
    )
    .expect("dimensions match")
}

fn kernel_vectors(a: &IntMatrix) -> Vec<Vector> {
    let (m, n) = (a.rows(), a.cols());
    // Unimodular column operations on (A; I); columns whose A-part vanishes
    // carry a kernel basis in their I-part.
    let dense = a.to_dense();
    let mut cols: Vec<(Vector, Vector)> = (0..n)
        .map(|j| {
            let top = (0..m).map(|i| dense[i][j].clone()).collect();
            let mut unit = vec![BigInt::zero(); n];
            unit[j] = BigInt::one();
            (top, unit)
        })
        .collect();
    let mut r = 0;
    for i in 0..m {
        while let Some(p) = (r..n)
            .filter(|&c| !cols[c].0[i].is_zero())
            .min_by(|&x, &y| cols[x].0[i].abs().cmp(&cols[y].0[i].abs()))
        {
            cols.swap(r, p);
            let mut done = true;
            for c in r + 1..n {
                if !cols[c].0[i].is_zero() {
                    let q = -cols[c].0[i].div_floor(&cols[r].0[i]);
                    let (top, unit) = cols[r].clone();
                    axpy(&mut cols[c].0, &q, &top);
                    axpy(&mut cols[c].1, &q, &unit);
                    done &= cols[c].0[i].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if r < n && !cols[r].0[i].is_zero() {
            r += 1;
        }
    }
    let basis: Vec<Vector> = cols.into_iter().skip(r).map(|(_, u)| u).collect();
    row_hnf(basis, n)
}

/// Options for [`graver_basis_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverOptions {
    /// Elements with larger max-norm are dropped and the set is flagged.
    pub norm_cap: BigInt,
    /// Maximum number of candidate sums examined before giving up.
    pub work_limit: usize,
    /// Threads for the final minimality filter.
    pub workers: usize,
}

impl GraverOptions {
    pub fn with_cap(norm_cap: impl Into<BigInt>) -> Self {
        GraverOptions {
            norm_cap: norm_cap.into(),
            work_limit: 2_000_000,
            workers: 1,
        }
    }
}

/// Graver basis with the default work limit; see [`graver_basis_with`].
pub fn graver_basis(a: &IntMatrix, norm_cap: impl Into<BigInt>) -> Result<GraverSet> {
    graver_basis_with(a, &GraverOptions::with_cap(norm_cap))
}

/// `x ⊑ y`: same signs where `x` is nonzero and `|x_i| <= |y_i|`.
fn conformal_le(x: &[BigInt], y: &[BigInt]) -> bool {
    x.iter().zip(y).all(|(a, b)| {
        a.is_zero() || (a.is_positive() == b.is_positive() && !b.is_zero() && a.abs() <= b.abs())
    })
}

fn sign_compatible(x: &[BigInt], y: &[BigInt]) -> bool {
    x.iter().zip(y).all(|(a, b)| a.is_zero() || b.is_zero() || a.is_positive() == b.is_positive())
}

/// Subtracts elements of `g` lying below `v` until none does.
fn normal_form(mut v: Vector, g: &[Vector]) -> Vector {
    'outer: loop {
        if v.iter().all(Zero::is_zero) {
            return v;
        }
        for h in g {
            if conformal_le(h, &v) {
                for (vi, hi) in v.iter_mut().zip(h) {
                    *vi -= hi;
                }
                continue 'outer;
            }
        }
        return v;
    }
}

/// Exact Graver basis by completion: start from a kernel lattice basis and
/// its negation, add every pairwise sum that survives reduction by the
/// current set, and keep the conformally minimal elements at the end.
/// The completion itself is uncapped; elements above `norm_cap` are dropped
/// from the output and flag the set as truncated.
pub fn graver_basis_with(a: &IntMatrix, opts: &GraverOptions) -> Result<GraverSet> {
    if opts.norm_cap < BigInt::one() {
        return Err(Error::InvalidParameter(format!(
            "norm cap must be positive, got {}",
            opts.norm_cap
        )));
    }
    let basis = kernel_vectors(a);
    let elements = match basis.len() {
        0 => Vec::new(),
        1 => basis,
        _ => minimal_elements(completion(&basis, opts.work_limit)?, opts.workers),
    };
    let (kept, dropped): (Vec<Vector>, Vec<Vector>) =
        elements.into_iter().partition(|v| linf(v) <= opts.norm_cap);
    Ok(GraverSet::new(kept, !dropped.is_empty(), opts.norm_cap.clone()))
}

fn completion(basis: &[Vector], work_limit: usize) -> Result<Vec<Vector>> {
    let mut g: Vec<Vector> = Vec::new();
    let mut seen: HashSet<Vector> = HashSet::new();
    for b in basis {
        for v in [b.clone(), b.iter().map(|x| -x).collect::<Vector>()] {
            if seen.insert(v.clone()) {
                g.push(v);
            }
        }
    }
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for i in 0..g.len() {
        for j in 0..i {
            pending.push((i, j));
        }
    }
    let mut work = 0usize;
    while let Some((i, j)) = pending.pop() {
        work += 1;
        if work > work_limit {
            return Err(Error::TooLarge(format!(
                "Graver completion exceeded {work_limit} candidate sums"
            )));
        }
        if sign_compatible(&g[i], &g[j]) {
            continue;
        }
        let sum: Vector = g[i].iter().zip(&g[j]).map(|(x, y)| x + y).collect();
        let r = normal_form(sum, &g);
        if r.iter().all(Zero::is_zero) || !seen.insert(r.clone()) {
            continue;
        }
        let neg: Vector = r.iter().map(|x| -x).collect();
        seen.insert(neg.clone());
        for v in [r, neg] {
            let k = g.len();
            g.push(v);
            for other in 0..k {
                pending.push((k, other));
            }
        }
    }
    Ok(g)
}

/// Keeps the elements with no other element conformally below them, one per
/// sign pair.
fn minimal_elements(g: Vec<Vector>, workers: usize) -> Vec<Vector> {
    let candidates: Vec<Vector> = g
        .iter()
        .cloned()
        .map(canonical)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let is_minimal = |v: &Vector| !g.iter().any(|h| h != v && conformal_le(h, v));
    if workers <= 1 || candidates.len() < 64 {
        return candidates.into_iter().filter(|v| is_minimal(v)).collect();
    }
    let chunk = candidates.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().filter(|v| is_minimal(v)).cloned().collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("filter threads do not panic"))
            .collect()
    })
}

/// `(g_inf, g_1)` of a complete Graver set.
pub fn graver_norms(gs: &GraverSet) -> Result<(BigInt, BigInt)> {
    if gs.is_truncated() {
        return Err(Error::Truncated(gs.norm_cap().to_string()));
    }
    Ok((gs.g_inf().clone(), gs.g_1().clone()))
}

fn check_witness_params(tau: usize, sigma: &[usize], delta: &BigInt, min_s: usize) -> Result<usize> {
    if sigma.len() != tau || sigma.contains(&0) {
        return Err(Error::InvalidProfile(format!(
            "need {tau} positive stage sizes, got {sigma:?}"
        )));
    }
    if *delta < BigInt::from(2) {
        return Err(Error::InvalidParameter(format!("delta must be at least 2, got {delta}")));
    }
    let s = block_product(sigma);
    if s < min_s {
        return Err(Error::InvalidParameter(format!(
            "stage sizes {sigma:?} give S = {s}, need at least {min_s}"
        )));
    }
    Ok(s)
}

/// Multi-stage matrix with stage sizes `sigma` whose Graver basis has
/// max-norm `delta^(S-2)`: `E_(S-1)(delta)` with a zero row added on top and
/// at the bottom, columns reordered into stages.
pub fn witness_multistage(tau: usize, sigma: &[usize], delta: &BigInt) -> Result<(IntMatrix, BlockProfile)> {
    let s = check_witness_params(tau, sigma, delta, 3)?;
    let e = encoding_matrix(s - 1, delta)?;
    let padded = pad_zero(&e, 1, 1, 0, 0);
    let r = to_multistage(&padded, sigma, Band::Bi)?;
    Ok((r.matrix, r.profile))
}

/// Tree-fold matrix with level sizes `sigma` whose Graver basis has 1-norm
/// `(delta^S - 1) / (delta - 1)`: the rows of `E_S(delta)` reordered into
/// levels.
pub fn witness_treefold(tau: usize, sigma: &[usize], delta: &BigInt) -> Result<(IntMatrix, BlockProfile)> {
    let s = check_witness_params(tau, sigma, delta, 2)?;
    let e = encoding_matrix(s, delta)?;
    let r = to_treefold(&e, sigma, Band::Bi)?;
    Ok((r.matrix, r.profile))
}
