//! Support-weighted aggregation operators: the Power Average, the Muirhead
//! Mean, and the Power Muirhead Mean (PMM).
//!
//! The PMM of nonnegative values `a_1..a_n` with exponent vector
//! `P = (p_1..p_n)` first reweights every value by how much the others
//! support it,
//!
//! ```text
//! b_i = w_i * a_i,   w_i = n * (1 + T_i) / sum_j (1 + T_j),
//! T_i = sum_{j != i} Sup(a_i, a_j),
//! ```
//!
//! and then aggregates the weighted values over all permutations:
//!
//! ```text
//! PMM = ( (1/n!) * sum_{perm} prod_j b_{perm(j)}^{p_j} )^(1 / sum_j p_j)
//! ```
//!
//! The permutation sum is the permanent of the matrix `A[i][j] = b_i^p_j`,
//! which three interchangeable strategies evaluate:
//!
//! * [`pmm_bruteforce_oracle`] — literal enumeration of all `n!` permutations
//!   (reference implementation, n <= 10);
//! * [`pmm_ryser`] — Ryser's inclusion-exclusion permanent in `O(2^n * n)`
//!   (general exponent vectors, n <= 20);
//! * [`pmm_ones_chain`] — for `P = (1,...,1,0,...,0)` with `r` ones the sum
//!   collapses to the r-th elementary symmetric polynomial, computed by a
//!   `O(n * r)` recurrence (any n).
//!
//! [`power_muirhead_mean`] dispatches between them.

use crate::error::{Error, Result};

/// Smallest magnitude of `sum(P)` accepted before the outer root
/// `1 / sum(P)` is considered numerically meaningless.
const MIN_EXPONENT_SUM: f64 = 1e-9;

/// Support from a distance: `1 / (1 + d)`.
///
/// Symmetric, equal to 1 exactly when the distance is 0, and strictly
/// decreasing in the distance, so it satisfies all three support-function
/// properties.
pub fn inverse_distance_support(distance: f64) -> f64 {
    1.0 / (1.0 + distance)
}

/// Support between two items under an arbitrary distance function.
pub fn support_inverse_distance<T, D>(a: &T, b: &T, mut distance: D) -> f64
where
    D: FnMut(&T, &T) -> f64,
{
    inverse_distance_support(distance(a, b))
}

/// The exponent vector `P` of the Muirhead family.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector {
    exponents: Vec<f64>,
}

impl ExponentVector {
    /// Requires a nonempty vector of finite exponents with `|sum| >= 1e-9`
    /// so the outer root stays well defined.
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Parameter("exponent vector must be nonempty".into()));
        }
        if exponents.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("exponents must be finite".into()));
        }
        let sum: f64 = exponents.iter().sum();
        if sum.abs() < MIN_EXPONENT_SUM {
            return Err(Error::Parameter(format!(
                "exponent sum {sum:e} too close to zero for the outer root"
            )));
        }
        Ok(Self { exponents })
    }

    /// `r` ones followed by `n - r` zeros.
    pub fn ones_chain(r: usize, n: usize) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::Parameter(format!(
                "ones-chain length {r} out of range 1..={n}"
            )));
        }
        let mut exponents = vec![0.0; n];
        exponents[..r].fill(1.0);
        Ok(Self { exponents })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty vectors
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }

    /// `Some(r)` when the vector is exactly `r` ones followed by zeros.
    pub fn ones_chain_len(&self) -> Option<usize> {
        let r = self.exponents.iter().take_while(|&&p| p == 1.0).count();
        if r >= 1 && self.exponents[r..].iter().all(|&p| p == 0.0) {
            Some(r)
        } else {
            None
        }
    }

    /// First `n` exponents, revalidated. Used when fewer values than
    /// exponents are available.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::Parameter(format!(
                "cannot truncate length-{} exponent vector to {n}",
                self.len()
            )));
        }
        Self::new(self.exponents[..n].to_vec())
    }
}

/// Pairwise supports, total supports `T_i` and power weights `w_i` for a
/// collection of items.
///
/// Weights always sum to `n`; with all supports equal they are all exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportContext {
    n: usize,
    /// Row-major symmetric matrix; the diagonal is fixed at 1 and unused.
    supports: Vec<f64>,
    t: Vec<f64>,
    weights: Vec<f64>,
}

impl SupportContext {
    /// Evaluates `support` on every unordered pair and derives `T_i` and the
    /// weights. For a single item `T = [0]` and `weights = [1]`.
    pub fn build<T, S>(items: &[T], mut support: S) -> Result<Self>
    where
        S: FnMut(&T, &T) -> f64,
    {
        let n = items.len();
        if n == 0 {
            return Err(Error::Parameter(
                "support context needs at least one item".into(),
            ));
        }
        let mut supports = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = support(&items[i], &items[j]);
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::Domain(format!(
                        "support value {s} for pair ({i}, {j}) outside [0, 1]"
                    )));
                }
                supports[i * n + j] = s;
                supports[j * n + i] = s;
            }
        }
        Ok(Self::from_parts(n, supports))
    }

    /// Builds the context from a precomputed symmetric support matrix.
    pub fn from_supports(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Parameter("support matrix must be nonempty".into()));
        }
        let mut supports = vec![1.0; n * n];
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &s) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::Domain(format!(
                        "support value {s} for pair ({i}, {j}) outside [0, 1]"
                    )));
                }
                if (s - matrix[j][i]).abs() > 1e-12 {
                    return Err(Error::Domain(format!(
                        "support matrix not symmetric at ({i}, {j})"
                    )));
                }
                supports[i * n + j] = s;
            }
        }
        Ok(Self::from_parts(n, supports))
    }

    /// Context with all pairwise supports equal, so every weight is 1 and
    /// the PMM reduces to the plain Muirhead mean.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter(
                "support context needs at least one item".into(),
            ));
        }
        Ok(Self::from_parts(n, vec![1.0; n * n]))
    }

    fn from_parts(n: usize, supports: Vec<f64>) -> Self {
        let t: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| supports[i * n + j])
                    .sum()
            })
            .collect();
        let denom: f64 = t.iter().map(|ti| 1.0 + ti).sum();
        let weights = t.iter().map(|ti| n as f64 * (1.0 + ti) / denom).collect();
        Self {
            n,
            supports,
            t,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn support(&self, i: usize, j: usize) -> f64 {
        self.supports[i * self.n + j]
    }

    /// Total support `T_i = sum_{j != i} Sup(a_i, a_j)`.
    pub fn t_values(&self) -> &[f64] {
        &self.t
    }

    /// Power weights `w_i = n (1 + T_i) / sum_j (1 + T_j)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The weighted values `b_i = w_i * a_i` fed into the permutation sum.
    pub fn weighted(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: values.len(),
            });
        }
        Ok(values
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| a * w)
            .collect())
    }
}

/// Power Average: `sum_i (1 + T_i) a_i / sum_j (1 + T_j)`.
///
/// A convex combination of the inputs, hence bounded by their min and max.
pub fn power_average(values: &[f64], ctx: &SupportContext) -> Result<f64> {
    check_values(values, ctx.len(), false)?;
    let num: f64 = values
        .iter()
        .zip(ctx.t_values())
        .map(|(a, t)| (1.0 + t) * a)
        .sum();
    let den: f64 = ctx.t_values().iter().map(|t| 1.0 + t).sum();
    Ok(num / den)
}

/// Muirhead mean of nonnegative values under exponent vector `P`
/// (all inputs supporting each other equally).
pub fn muirhead_mean(values: &[f64], p: &ExponentVector) -> Result<f64> {
    power_muirhead_mean(values, p, &SupportContext::uniform(values.len())?)
}

/// Power Muirhead Mean, dispatching to the fastest applicable strategy:
/// ones-chain exponents use the symmetric-polynomial path for any `n`,
/// general exponents use Ryser's permanent for `n <= 20`.
///
/// ```
/// use pmmknn::aggregation::{
///     inverse_distance_support, power_muirhead_mean, ExponentVector, SupportContext,
/// };
///
/// let values: [f64; 3] = [0.0, 1.0, 1.0];
/// let ctx = SupportContext::build(&values, |a, b| inverse_distance_support((a - b).abs()))?;
/// let p = ExponentVector::new(vec![1.0, 1.0, 0.0])?;
/// let pmm = power_muirhead_mean(&values, &p, &ctx)?;
/// assert!((pmm - 15.0 / (14.0 * 3.0f64.sqrt())).abs() < 1e-12);
/// # Ok::<(), pmmknn::Error>(())
/// ```
pub fn power_muirhead_mean(
    values: &[f64],
    p: &ExponentVector,
    ctx: &SupportContext,
) -> Result<f64> {
    if let Some(r) = p.ones_chain_len() {
        if p.len() == values.len() {
            return pmm_ones_chain(values, r, ctx);
        }
    }
    if values.len() <= MAX_RYSER {
        pmm_ryser(values, p, ctx)
    } else {
        Err(Error::Size(format!(
            "general exponent vectors support at most {MAX_RYSER} values, got {}",
            values.len()
        )))
    }
}

const MAX_BRUTE_FORCE: usize = 10;
const MAX_RYSER: usize = 20;

/// Literal evaluation of the PMM permutation sum over all `n!` permutations.
///
/// Reference implementation used to validate the faster strategies; limited
/// to `n <= 10`.
pub fn pmm_bruteforce_oracle(
    values: &[f64],
    p: &ExponentVector,
    ctx: &SupportContext,
) -> Result<f64> {
    let n = values.len();
    if n > MAX_BRUTE_FORCE {
        return Err(Error::Size(format!(
            "brute-force enumeration supports at most {MAX_BRUTE_FORCE} values, got {n}"
        )));
    }
    let powers = weighted_power_matrix(values, p, ctx)?;
    let mut sum = 0.0;
    for_each_permutation(n, |perm| {
        let mut prod = 1.0;
        for (j, &i) in perm.iter().enumerate() {
            prod *= powers[i * n + j];
        }
        sum += prod;
    });
    mm_root(sum / factorial(n), p.sum())
}

/// PMM via Ryser's inclusion-exclusion permanent, `O(2^n * n)`.
///
/// The signed subset sum cancels instead of vanishing when the permanent is
/// exactly zero (some value is 0 and every exponent positive), leaving a
/// round-off residual; the ones-chain path is exact in that case.
pub fn pmm_ryser(values: &[f64], p: &ExponentVector, ctx: &SupportContext) -> Result<f64> {
    let n = values.len();
    if n > MAX_RYSER {
        return Err(Error::Size(format!(
            "Ryser evaluation supports at most {MAX_RYSER} values, got {n}"
        )));
    }
    let powers = weighted_power_matrix(values, p, ctx)?;
    let permanent = permanent_ryser(&powers, n);
    mm_root(permanent / factorial(n), p.sum())
}

/// PMM for a ones-chain exponent vector with `r` ones:
/// `(e_r(b) / C(n, r))^(1/r)` where `e_r` is the r-th elementary symmetric
/// polynomial of the weighted values.
///
/// Exact because the permutation sum groups as
/// `sum_perm prod_{i<=r} b_{perm(i)} = r! (n-r)! e_r(b)`.
pub fn pmm_ones_chain(values: &[f64], r: usize, ctx: &SupportContext) -> Result<f64> {
    let n = values.len();
    if r == 0 || r > n {
        return Err(Error::Parameter(format!(
            "ones-chain length {r} out of range 1..={n}"
        )));
    }
    check_values(values, ctx.len(), true)?;
    let weighted = ctx.weighted(values)?;
    let e_r = elementary_symmetric(&weighted, r);
    mm_root(e_r / binomial(n, r), r as f64)
}

fn check_values(values: &[f64], expected: usize, nonnegative: bool) -> Result<()> {
    if values.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: values.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::Parameter("value sequence must be nonempty".into()));
    }
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite value {v}")));
        }
        if nonnegative && v < 0.0 {
            return Err(Error::Domain(format!("negative value {v} not allowed")));
        }
    }
    Ok(())
}

/// `b_i^p_j` with `0^0 = 1`, as a row-major matrix. Rejects a zero value
/// paired with any negative exponent.
fn weighted_power_matrix(
    values: &[f64],
    p: &ExponentVector,
    ctx: &SupportContext,
) -> Result<Vec<f64>> {
    check_values(values, ctx.len(), true)?;
    if p.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: p.len(),
        });
    }
    let has_zero = values.contains(&0.0);
    let has_negative = p.exponents().iter().any(|&e| e < 0.0);
    if has_zero && has_negative {
        return Err(Error::Domain(
            "zero value with a negative exponent is undefined".into(),
        ));
    }
    let b = ctx.weighted(values)?;
    let n = b.len();
    let mut powers = vec![0.0; n * n];
    for i in 0..n {
        for (j, &e) in p.exponents().iter().enumerate() {
            powers[i * n + j] = pow0(b[i], e);
        }
    }
    Ok(powers)
}

/// `base^exponent` with the convention `0^0 = 1`.
fn pow0(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else {
        base.powf(exponent)
    }
}

/// Applies the outer `1 / p_sum` root to the averaged permutation sum.
fn mm_root(mean_of_permutations: f64, p_sum: f64) -> Result<f64> {
    // The summands are products of nonnegative numbers; tiny negative
    // results can only be inclusion-exclusion round-off of a true zero.
    let mean = if mean_of_permutations < 0.0 {
        if mean_of_permutations < -1e-6 {
            return Err(Error::Domain(format!(
                "permutation sum {mean_of_permutations} is negative"
            )));
        }
        0.0
    } else {
        mean_of_permutations
    };
    if mean == 0.0 {
        if p_sum > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(
            "zero permutation sum with a nonpositive exponent sum".into(),
        ));
    }
    Ok(mean.powf(1.0 / p_sum))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, r: usize) -> f64 {
    let r = r.min(n - r);
    let mut c = 1.0;
    for i in 0..r {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// r-th elementary symmetric polynomial by the standard one-row recurrence.
/// All terms are nonnegative for nonnegative inputs, so no cancellation.
fn elementary_symmetric(values: &[f64], r: usize) -> f64 {
    let mut e = vec![0.0; r + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=r.min(values.len())).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[r]
}

/// Permanent of a row-major `n x n` matrix by Ryser's formula with Gray-code
/// subset enumeration: `perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} A[i][j]`.
fn permanent_ryser(a: &[f64], n: usize) -> f64 {
    debug_assert!((1..=MAX_RYSER).contains(&n));
    debug_assert_eq!(a.len(), n * n);
    let mut row_sums = vec![0.0f64; n];
    let mut total = 0.0;
    let mut gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let next = k ^ (k >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        if next & (1 << flipped) != 0 {
            for i in 0..n {
                row_sums[i] += a[i * n + flipped];
            }
        } else {
            for i in 0..n {
                row_sums[i] -= a[i * n + flipped];
            }
        }
        let prod: f64 = row_sums.iter().product();
        if (n as u32 - next.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
        gray = next;
    }
    total
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut items: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    f(&items);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            f(&items);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}
