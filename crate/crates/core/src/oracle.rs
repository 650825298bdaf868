//! Brute-force ground truth: a subset-sum table and exhaustive enumeration of
//! bounded integer programs.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::blockmat::IPInstance;
use crate::error::{Error, Result};

/// Default number of search nodes for [`feasible_enum`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest `n * (b + 1)` table [`subsetsum_dp`] will allocate.
pub const DP_CELL_LIMIT: usize = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub witness: Option<Vec<BigInt>>,
}

impl FeasibilityResult {
    fn found(witness: Vec<BigInt>) -> Self {
        FeasibilityResult {
            feasible: true,
            witness: Some(witness),
        }
    }

    fn infeasible() -> Self {
        FeasibilityResult {
            feasible: false,
            witness: None,
        }
    }
}

/// Decides `sum a_i x_i = b` over `x in {0,1}^n` with a reachability table and
/// returns a 0/1 witness.
pub fn subsetsum_dp(a: &[BigInt], b: &BigInt) -> Result<FeasibilityResult> {
    if b.is_negative() {
        return Err(Error::NegativeInput(format!("target b = {b}")));
    }
    if let Some(v) = a.iter().find(|v| v.is_negative()) {
        return Err(Error::NegativeInput(format!("item {v}")));
    }
    let target = b
        .to_usize()
        .filter(|&t| (a.len() + 1).saturating_mul(t + 1) <= DP_CELL_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("subset-sum table for b = {b}")))?;
    let items: Vec<Option<usize>> = a.iter().map(|v| v.to_usize().filter(|&v| v <= target)).collect();

    // reach[i][s]: some subset of the first i items sums to s
    let width = target + 1;
    let mut reach = vec![false; (a.len() + 1) * width];
    reach[0] = true;
    for (i, item) in items.iter().enumerate() {
        let (prev, next) = reach.split_at_mut((i + 1) * width);
        let prev = &prev[i * width..];
        let next = &mut next[..width];
        next.copy_from_slice(prev);
        if let Some(v) = *item {
            for s in v..width {
                next[s] |= prev[s - v];
            }
        }
    }
    if !reach[a.len() * width + target] {
        return Ok(FeasibilityResult::infeasible());
    }
    let mut witness = vec![BigInt::zero(); a.len()];
    let mut s = target;
    for i in (0..a.len()).rev() {
        if reach[i * width + s] {
            continue;
        }
        let v = items[i].expect("item was used");
        witness[i] = 1.into();
        s -= v;
    }
    Ok(FeasibilityResult::found(witness))
}

/// Options for [`feasible_enum_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Maximum number of variable assignments tried, shared by all workers.
    pub budget: u64,
    /// Threads sharing the range of the first variable; 1 runs inline.
    pub workers: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: DEFAULT_BUDGET,
            workers: 1,
        }
    }
}

/// Exact feasibility by lexicographic enumeration; see [`feasible_enum_with`].
pub fn feasible_enum(inst: &IPInstance, budget: u64) -> Result<FeasibilityResult> {
    feasible_enum_with(
        inst,
        &EnumOptions {
            budget,
            ..EnumOptions::default()
        },
    )
}

/// Exact feasibility of `Ax = b, l <= x <= u` by depth-first enumeration in
/// lexicographic order. Before a variable is fixed, every row it appears in
/// narrows its range using the extreme values the remaining variables can
/// still contribute, so the search never enters a subtree that violates a row
/// by interval reasoning. The first witness in lexicographic order is
/// returned, independent of the number of workers. Every assignment counts
/// against the budget.
pub fn feasible_enum_with(inst: &IPInstance, opts: &EnumOptions) -> Result<FeasibilityResult> {
    if !inst.has_finite_bounds() {
        return Err(Error::InvalidParameter(
            "enumeration needs finite bounds on every variable".into(),
        ));
    }
    match Problem::<i128>::from_instance(inst) {
        Some(p) => p.solve(opts),
        None => Problem::<BigInt>::from_instance(inst)
            .expect("BigInt holds every value")
            .solve(opts),
    }
}

trait Scalar: Clone + Ord + Integer + Signed + Send + Sync {
    /// Whether arithmetic can never overflow.
    const EXACT: bool;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i128 {
    const EXACT: bool = false;

    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    const EXACT: bool = true;

    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Problem<T> {
    rhs: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
    /// Per column: `(row, coefficient)`.
    columns: Vec<Vec<(usize, T)>>,
    /// `rest_min[k][i]`: least value variables `k..` can add to row `i`.
    rest_min: Vec<Vec<T>>,
    rest_max: Vec<Vec<T>>,
}

/// Largest magnitude allowed on the fixed-width path, leaving headroom for
/// sums and products of two such values.
const I128_SAFE_BITS: u64 = 60;

impl<T: Scalar> Problem<T> {
    fn from_instance(inst: &IPInstance) -> Option<Self> {
        let conv = |v: &BigInt| T::from_big(v);
        let lower: Vec<T> = inst.lower().iter().map(|v| conv(v.as_ref().unwrap())).collect::<Option<_>>()?;
        let upper: Vec<T> = inst.upper().iter().map(|v| conv(v.as_ref().unwrap())).collect::<Option<_>>()?;
        let rhs: Vec<T> = inst.rhs().iter().map(conv).collect::<Option<_>>()?;
        let small = |v: &BigInt| v.bits() <= I128_SAFE_BITS;
        let fits = T::EXACT
            || (inst.matrix().iter().all(|(_, _, v)| small(v))
                && inst.rhs().iter().all(small)
                && inst.lower().iter().chain(inst.upper()).all(|v| small(v.as_ref().unwrap()))
                && inst.cols() < (1 << 16));
        if !fits {
            return None;
        }
        let (m, n) = (inst.rows(), inst.cols());
        let mut columns: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, j, v) in inst.matrix().iter() {
            columns[j].push((i, conv(v)?));
        }
        let mut rest_min = vec![vec![T::zero(); m]; n + 1];
        let mut rest_max = vec![vec![T::zero(); m]; n + 1];
        for k in (0..n).rev() {
            rest_min[k] = rest_min[k + 1].clone();
            rest_max[k] = rest_max[k + 1].clone();
            for (i, a) in &columns[k] {
                let x = a.clone() * lower[k].clone();
                let y = a.clone() * upper[k].clone();
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                rest_min[k][*i] = rest_min[k][*i].clone() + lo;
                rest_max[k][*i] = rest_max[k][*i].clone() + hi;
            }
        }
        Some(Problem {
            rhs,
            lower,
            upper,
            columns,
            rest_min,
            rest_max,
        })
    }

    fn n(&self) -> usize {
        self.lower.len()
    }

    /// Values of variable `k` compatible with every row it touches, given the
    /// partial row sums of the variables before it.
    fn range(&self, k: usize, partial: &[T]) -> Option<(T, T)> {
        let mut lo = self.lower[k].clone();
        let mut hi = self.upper[k].clone();
        for (i, a) in &self.columns[k] {
            let need = self.rhs[*i].clone() - partial[*i].clone();
            // a v in [need - rest_max, need - rest_min]
            let from = need.clone() - self.rest_max[k + 1][*i].clone();
            let to = need - self.rest_min[k + 1][*i].clone();
            let (vlo, vhi) = if a.is_positive() {
                (ceil_div(from, a.clone()), to.div_floor(a))
            } else {
                (ceil_div(to, a.clone()), from.div_floor(a))
            };
            lo = lo.max(vlo);
            hi = hi.min(vhi);
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    fn root_consistent(&self) -> bool {
        (0..self.rhs.len()).all(|i| self.rest_min[0][i] <= self.rhs[i] && self.rhs[i] <= self.rest_max[0][i])
    }

    fn solve(&self, opts: &EnumOptions) -> Result<FeasibilityResult> {
        if !self.root_consistent() {
            return Ok(FeasibilityResult::infeasible());
        }
        let n = self.n();
        let m = self.rhs.len();
        if n == 0 {
            return Ok(FeasibilityResult::found(Vec::new()));
        }
        let Some((lo, hi)) = self.range(0, &vec![T::zero(); m]) else {
            return Ok(FeasibilityResult::infeasible());
        };
        let nodes = AtomicU64::new(0);
        let workers = opts.workers.max(1);
        if workers == 1 {
            let mut search = Search::new(self, opts.budget, &nodes, None);
            return match search.run_first(lo, hi)? {
                Some(x) => Ok(FeasibilityResult::found(x.iter().map(T::to_big).collect())),
                None => Ok(FeasibilityResult::infeasible()),
            };
        }

        // Chunks of the first variable's range, handed out in increasing
        // order. The chunk index of the best witness so far lets later chunks
        // stop early; earlier chunks always run to completion.
        let chunk_count = workers * 4;
        let width = hi.clone() - lo.clone() + T::one();
        let chunks: Vec<(T, T)> = (0..chunk_count)
            .filter_map(|c| {
                let start = lo.clone() + width.clone() * from_usize::<T>(c) / from_usize::<T>(chunk_count);
                let end = lo.clone() + width.clone() * from_usize::<T>(c + 1) / from_usize::<T>(chunk_count)
                    - T::one();
                (start <= end).then_some((start, end))
            })
            .collect();
        let next = AtomicUsize::new(0);
        let best = AtomicUsize::new(usize::MAX);
        let mut outcomes: Vec<Option<Result<Option<Vec<T>>>>> = Vec::new();
        outcomes.resize_with(chunks.len(), || None);
        let results = std::sync::Mutex::new(outcomes);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let c = next.fetch_add(1, Ordering::SeqCst);
                    if c >= chunks.len() || c > best.load(Ordering::SeqCst) {
                        break;
                    }
                    let mut search = Search::new(self, opts.budget, &nodes, Some((&best, c)));
                    let out = search.run_first(chunks[c].0.clone(), chunks[c].1.clone());
                    if let Ok(Some(_)) = out {
                        best.fetch_min(c, Ordering::SeqCst);
                    }
                    results.lock().expect("no poisoned workers")[c] = Some(out);
                });
            }
        });
        for out in results.into_inner().expect("no poisoned workers") {
            match out {
                Some(Ok(Some(x))) => {
                    return Ok(FeasibilityResult::found(x.iter().map(T::to_big).collect()))
                }
                Some(Ok(None)) => {}
                Some(Err(e)) => return Err(e),
                None => unreachable!("chunks before the best witness always run"),
            }
        }
        Ok(FeasibilityResult::infeasible())
    }
}

fn from_usize<T: Scalar>(v: usize) -> T {
    T::from_big(&BigInt::from(v)).expect("small integers fit")
}

fn ceil_div<T: Scalar>(a: T, b: T) -> T {
    -((-a).div_floor(&b))
}

struct Search<'a, T> {
    p: &'a Problem<T>,
    budget: u64,
    nodes: &'a AtomicU64,
    /// `(best chunk, own chunk)`: stop once an earlier chunk has a witness.
    cancel: Option<(&'a AtomicUsize, usize)>,
    x: Vec<T>,
    partial: Vec<T>,
}

enum Step<T> {
    Found(Vec<T>),
    Exhausted,
    Cancelled,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn new(
        p: &'a Problem<T>,
        budget: u64,
        nodes: &'a AtomicU64,
        cancel: Option<(&'a AtomicUsize, usize)>,
    ) -> Self {
        Search {
            p,
            budget,
            nodes,
            cancel,
            x: vec![T::zero(); p.n()],
            partial: vec![T::zero(); p.rhs.len()],
        }
    }

    fn run_first(&mut self, lo: T, hi: T) -> Result<Option<Vec<T>>> {
        match self.branch(0, lo, hi)? {
            Step::Found(x) => Ok(Some(x)),
            Step::Exhausted | Step::Cancelled => Ok(None),
        }
    }

    fn assign(&mut self, k: usize, v: &T, sign: bool) {
        for (i, a) in &self.p.columns[k] {
            let d = a.clone() * v.clone();
            self.partial[*i] = if sign {
                self.partial[*i].clone() + d
            } else {
                self.partial[*i].clone() - d
            };
        }
    }

    fn branch(&mut self, k: usize, lo: T, hi: T) -> Result<Step<T>> {
        let mut v = lo;
        while v <= hi {
            let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
            if used > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            if let Some((best, own)) = self.cancel {
                if best.load(Ordering::Relaxed) < own {
                    return Ok(Step::Cancelled);
                }
            }
            self.x[k] = v.clone();
            self.assign(k, &v, true);
            let step = if k + 1 == self.p.n() {
                Step::Found(self.x.clone())
            } else if let Some((l, h)) = self.p.range(k + 1, &self.partial) {
                self.branch(k + 1, l, h)?
            } else {
                Step::Exhausted
            };
            self.assign(k, &v, false);
            match step {
                Step::Exhausted => {}
                other => return Ok(other),
            }
            v = v + T::one();
        }
        Ok(Step::Exhausted)
    }
}
