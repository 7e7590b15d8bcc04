//! Determinant identities for sign-diagonal perturbations, the maximal
//! row-submatrix determinant of column-dominant matrices, and the
//! potential-difference bound for symmetric row-dominant systems.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Largest order for which sign diagonals are enumerated exhaustively.
pub const MAX_SIGN_ORDER: usize = 12;
/// Limits of the row-subset enumeration.
pub const MAX_SUBMATRIX_ROWS: usize = 10;
pub const MAX_SUBMATRIX_COLS: usize = 5;

/// Real symmetric matrix with each off-diagonal pair stored once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    m: usize,
    /// Upper triangle, row-major.
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(m: usize) -> Self {
        SymMatrix {
            m,
            upper: vec![0.0; m * (m + 1) / 2],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut s = SymMatrix::zeros(m);
        for i in 0..m {
            s.set(i, i, 1.0);
        }
        s
    }

    /// Builds from full rows; the input must be exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let mut s = SymMatrix::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for j in i..m {
                if row[j] != rows[j][i] {
                    return Err(Error::NonSymmetric(row[j], rows[j][i]));
                }
                s.set(i, j, row[j]);
            }
        }
        Ok(s)
    }

    /// Builds from a square matrix, storing the mean of each off-diagonal
    /// pair, and returns the largest relative pair defect alongside.
    pub fn symmetrized(a: &DMatrix<f64>) -> (Self, f64) {
        let m = a.nrows();
        let mut s = SymMatrix::zeros(m);
        let mut defect: f64 = 0.0;
        for i in 0..m {
            for j in i..m {
                let (x, y) = (a[(i, j)], a[(j, i)]);
                let scale = x.abs().max(y.abs());
                if scale > 0.0 {
                    defect = defect.max((x - y).abs() / scale);
                }
                s.set(i, j, 0.5 * (x + y));
            }
        }
        (s, defect)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.m - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.upper[k] = v;
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.get(i, j))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        (0..self.m).map(|j| self.get(i, j)).sum()
    }
}

/// Row sums and the sign/dominance conditions of a symmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceProfile {
    pub row_sums: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
    /// All off-diagonal entries are non-positive.
    pub a1_ok: bool,
    /// `0 < r1 ≤ r2`.
    pub a2_ok: bool,
}

impl DominanceProfile {
    pub fn of(p: &SymMatrix) -> Self {
        let m = p.order();
        let row_sums: Vec<f64> = (0..m).map(|i| p.row_sum(i)).collect();
        let r1 = row_sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let r2 = row_sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let a1_ok = (0..m).all(|i| (0..m).all(|j| i == j || p.get(i, j) <= 0.0));
        DominanceProfile {
            row_sums,
            r1,
            r2,
            a1_ok,
            a2_ok: m > 0 && r1 > 0.0 && r1 <= r2,
        }
    }

    pub fn ok(&self) -> bool {
        self.a1_ok && self.a2_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Diagonal matrix with ±1 entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignDiag {
    pub signs: Vec<i8>,
    pub parity: Parity,
}

impl SignDiag {
    /// Bit `k` of `mask` set means a −1 in position `k`.
    pub fn from_mask(l: usize, mask: u32) -> Self {
        let signs: Vec<i8> = (0..l)
            .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
            .collect();
        SignDiag::new(signs)
    }

    pub fn new(signs: Vec<i8>) -> Self {
        let negatives = signs.iter().filter(|&&s| s < 0).count();
        SignDiag {
            signs,
            parity: if negatives % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            },
        }
    }

    pub fn order(&self) -> usize {
        self.signs.len()
    }

    /// `x·I + Ī·A`.
    pub fn shifted_product(&self, a: &DMatrix<f64>, x: f64) -> DMatrix<f64> {
        let l = self.order();
        DMatrix::from_fn(l, l, |i, j| {
            let v = self.signs[i] as f64 * a[(i, j)];
            if i == j {
                x + v
            } else {
                v
            }
        })
    }
}

/// Determinant by LU with partial pivoting.
pub fn det(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    a.clone().lu().determinant()
}

fn check_square(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() > MAX_SIGN_ORDER {
        return Err(Error::EnumerationTooLarge(a.nrows(), MAX_SIGN_ORDER));
    }
    Ok(a.nrows())
}

/// Sums of `det(x·I + Ī·A)` over the even and the odd sign diagonals.
pub fn sign_partition_sums(a: &DMatrix<f64>, x: f64) -> Result<(f64, f64)> {
    Ok(sign_partition_detail(a, x)?.0)
}

/// Returns the two sums and the sum of absolute values of all terms.
fn sign_partition_detail(a: &DMatrix<f64>, x: f64) -> Result<((f64, f64), f64)> {
    let l = check_square(a)?;
    let (mut even, mut odd, mut scale) = (0.0, 0.0, 0.0);
    for mask in 0..(1u32 << l) {
        let s = SignDiag::from_mask(l, mask);
        let d = det(&s.shifted_product(a, x));
        scale += d.abs();
        match s.parity {
            Parity::Even => even += d,
            Parity::Odd => odd += d,
        }
    }
    Ok(((even, odd), scale))
}

/// Largest relative defect of the two closed-form sign-partition identities
/// `even = 2^{l−1}(x^l + det A)` and `odd = 2^{l−1}(x^l − det A)`.
///
/// The defect is measured against the sum of absolute values of the
/// enumerated determinants, the natural roundoff scale of the sums.
pub fn sign_identity_defect(a: &DMatrix<f64>, x: f64) -> Result<f64> {
    let l = check_square(a)?;
    let ((even, odd), scale) = sign_partition_detail(a, x)?;
    let half = 2f64.powi(l as i32 - 1);
    let xl = x.powi(l as i32);
    let d = det(a);
    let scale = scale.max(half * (xl.abs() + d.abs())).max(f64::MIN_POSITIVE);
    let e1 = (even - half * (xl + d)).abs();
    let e2 = (odd - half * (xl - d)).abs();
    Ok(e1.max(e2) / scale)
}

/// Finds a sign diagonal with `det(I + Ī·A) < 0`. Such a witness must exist
/// whenever `|det A| > 1`.
pub fn negative_det_witness(a: &DMatrix<f64>) -> Result<Option<SignDiag>> {
    let l = check_square(a)?;
    for mask in 0..(1u32 << l) {
        let s = SignDiag::from_mask(l, mask);
        if det(&s.shifted_product(a, 1.0)) < 0.0 {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Result of the row-subset determinant enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmatrixDet {
    /// Determinant of the top `l` rows.
    pub det_s1: f64,
    /// Largest `|det|` over all `l`-row submatrices.
    pub max_abs: f64,
    pub argmax_rows: Vec<usize>,
}

/// Strict column dominance `q_jj > Σ_{i≠j} |q_ij|` for every column.
pub fn check_column_dominance(q: &DMatrix<f64>) -> Result<()> {
    for j in 0..q.ncols() {
        let off: f64 = (0..q.nrows()).filter(|&i| i != j).map(|i| q[(i, j)].abs()).sum();
        if !(q[(j, j)] > off) {
            return Err(Error::ColumnDominance(j));
        }
    }
    Ok(())
}

/// Compares the top block determinant with every `l`-row submatrix of a
/// column-dominant `m × l` matrix.
pub fn max_submatrix_det(q: &DMatrix<f64>) -> Result<SubmatrixDet> {
    let (m, l) = q.shape();
    if !(m > l && l >= 1) {
        return Err(Error::Dimension(format!(
            "need m > l >= 1, got {m}x{l}"
        )));
    }
    if m > MAX_SUBMATRIX_ROWS || l > MAX_SUBMATRIX_COLS {
        return Err(Error::EnumerationTooLarge(m.max(l), MAX_SUBMATRIX_ROWS));
    }
    check_column_dominance(q)?;
    let sub = |rows: &[usize]| det(&DMatrix::from_fn(l, l, |i, j| q[(rows[i], j)]));
    let mut rows: Vec<usize> = (0..l).collect();
    let det_s1 = sub(&rows);
    let mut best = (det_s1.abs(), rows.clone());
    // lexicographic combinations
    loop {
        let mut k = l;
        while k > 0 && rows[k - 1] == m - l + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        rows[k - 1] += 1;
        for t in k..l {
            rows[t] = rows[t - 1] + 1;
        }
        let d = sub(&rows).abs();
        if d > best.0 {
            best = (d, rows.clone());
        }
    }
    Ok(SubmatrixDet {
        det_s1,
        max_abs: best.0,
        argmax_rows: best.1,
    })
}

fn check_system(p: &SymMatrix, beta: &[f64]) -> Result<DominanceProfile> {
    if beta.len() != p.order() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix order {}",
            beta.len(),
            p.order()
        )));
    }
    let prof = DominanceProfile::of(p);
    if !prof.ok() {
        return Err(Error::Dominance(Box::new(prof)));
    }
    Ok(prof)
}

fn bound_with(p: &SymMatrix, prof: &DominanceProfile, beta_max: f64, i: usize, j: usize) -> f64 {
    let m = p.order() as f64;
    m * (m - 1.0) * (prof.r2 / prof.r1) * beta_max / (p.get(i, j).abs() + prof.r1)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// `m(m−1)·(r2/r1)·|β|∞ / (|p_ij| + r1)`, a bound on `|α_i − α_j|` for `Pα = β`.
pub fn difference_bound(p: &SymMatrix, beta: &[f64], i: usize, j: usize) -> Result<f64> {
    let m = p.order();
    if i == j || i >= m || j >= m {
        return Err(Error::InvalidIndex(format!(
            "need distinct indices below {m}, got ({i}, {j})"
        )));
    }
    let prof = check_system(p, beta)?;
    Ok(bound_with(p, &prof, max_abs(beta), i, j))
}

/// Solves `Pα = β` and returns `α` with the largest `|α_i − α_j| − bound(i, j)`.
pub fn solve_and_check(p: &SymMatrix, beta: &[f64]) -> Result<(Vec<f64>, f64)> {
    let prof = check_system(p, beta)?;
    let a = p.to_dmatrix();
    let b = DVector::from_column_slice(beta);
    let alpha = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or(Error::Singular(0.0))?;
    let resid = (&a * &alpha - &b).amax();
    if resid > 1e-10 * b.amax().max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::Singular(resid));
    }
    let m = p.order();
    let bmax = max_abs(beta);
    let mut worst = if m < 2 { 0.0 } else { f64::NEG_INFINITY };
    for i in 0..m {
        for j in i + 1..m {
            let v = (alpha[i] - alpha[j]).abs() - bound_with(p, &prof, bmax, i, j);
            worst = f64::max(worst, v);
        }
    }
    Ok((alpha.iter().cloned().collect(), worst))
}

/// Outcome of one randomized property family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Worst observed statistic (relative defect or bound violation).
    pub worst: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Case counts of the randomized suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSizes {
    pub sign_identity: usize,
    pub submatrix: usize,
    pub difference_bound: usize,
    pub witness: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            sign_identity: 240,
            submatrix: 600,
            difference_bound: 1200,
            witness: 600,
        }
    }
}

fn case_rng(seed: u64, family: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family << 32 | case as u64);
    rng
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(lo..hi))
}

/// Random column-dominant `m × l` matrix with `m ≤ 7`, `l ≤ 3`.
pub fn random_column_dominant(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let l = rng.gen_range(1..=3);
    let m = rng.gen_range(l + 1..=7);
    let mut q = random_matrix(rng, m, l, -1.0, 1.0);
    for j in 0..l {
        let off: f64 = (0..m).filter(|&i| i != j).map(|i| q[(i, j)].abs()).sum();
        q[(j, j)] = off + rng.gen_range(0.05..1.0);
    }
    q
}

/// Random symmetric matrix with off-diagonals in `[−1, 0]` and row sums in
/// `[0.5, 2]`.
pub fn random_dominant_symmetric(rng: &mut ChaCha8Rng, m: usize) -> SymMatrix {
    let mut p = SymMatrix::zeros(m);
    for i in 0..m {
        for j in i + 1..m {
            p.set(i, j, -rng.gen_range(0.0..=1.0));
        }
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| p.get(i, j)).sum();
        p.set(i, i, rng.gen_range(0.5..=2.0) - off);
    }
    p
}

/// Runs the four randomized property families, one independent RNG stream
/// per case.
pub fn run_property_suite(seed: u64, sizes: SuiteSizes, exec: Execution) -> Vec<PropertyResult> {
    let xs = [-1.0, 0.0, 0.5, 3.0];
    let mut out = Vec::new();

    let tol = 1e-9;
    let defects = exec.map_range(sizes.sign_identity, |c| {
        let mut rng = case_rng(seed, 1, c);
        let l = rng.gen_range(1..=6);
        let a = random_matrix(&mut rng, l, l, -2.0, 2.0);
        let x = xs[rng.gen_range(0..xs.len())];
        sign_identity_defect(&a, x).unwrap_or(f64::INFINITY)
    });
    out.push(summarize("sign-partition identities", seed, tol, &defects, |d| d <= tol));

    let defects = exec.map_range(sizes.submatrix, |c| {
        let mut rng = case_rng(seed, 2, c);
        let q = random_column_dominant(&mut rng);
        match max_submatrix_det(&q) {
            Ok(r) => (r.det_s1 - r.max_abs).abs() / r.max_abs.max(f64::MIN_POSITIVE),
            Err(_) => f64::INFINITY,
        }
    });
    out.push(summarize("top block attains max |det|", seed, tol, &defects, |d| d <= tol));

    let viol = exec.map_range(sizes.difference_bound, |c| {
        let mut rng = case_rng(seed, 3, c);
        let m = rng.gen_range(2..=6);
        let p = random_dominant_symmetric(&mut rng, m);
        let beta: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        solve_and_check(&p, &beta).map(|r| r.1).unwrap_or(f64::INFINITY)
    });
    out.push(summarize("potential-difference bound", seed, 0.0, &viol, |v| v <= 0.0));

    let found = exec.map_range(sizes.witness, |c| {
        let mut rng = case_rng(seed, 4, c);
        let l = rng.gen_range(1..=6);
        let a = loop {
            let a = random_matrix(&mut rng, l, l, -2.0, 2.0);
            if det(&a).abs() > 1.0 {
                break a;
            }
        };
        match negative_det_witness(&a) {
            Ok(Some(s)) if det(&s.shifted_product(&a, 1.0)) < 0.0 => 0.0,
            _ => 1.0,
        }
    });
    out.push(summarize("negative-determinant witness", seed, 0.0, &found, |v| v == 0.0));
    out
}

fn summarize(name: &str, seed: u64, tol: f64, stats: &[f64], ok: impl Fn(f64) -> bool) -> PropertyResult {
    PropertyResult {
        name: name.to_string(),
        cases: stats.len(),
        failures: stats.iter().filter(|&&s| !ok(s)).count(),
        worst: stats.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        tolerance: tol,
        seed,
    }
}

/// Fixed-width pass/fail table of a suite run.
pub fn format_suite(results: &[PropertyResult]) -> String {
    let mut s = format!(
        "{:<32} {:>6} {:>9} {:>12} {:>6}\n",
        "property", "cases", "failures", "worst", "status"
    );
    for r in results {
        s.push_str(&format!(
            "{:<32} {:>6} {:>9} {:>12.3e} {:>6}\n",
            r.name,
            r.cases,
            r.failures,
            r.worst,
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn packed_storage_is_symmetric() {
        let mut s = SymMatrix::zeros(4);
        s.set(3, 1, 2.5);
        assert_eq!(s.get(1, 3), 2.5);
        assert_eq!(s.to_dmatrix(), s.to_dmatrix().transpose());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0000001, 1.0]]).is_err());
    }

    #[test]
    fn sign_sums_small_orders() {
        let (e, o) = sign_partition_sums(&m(&[&[0.3]]), 0.7).unwrap();
        assert_relative_eq!(e, 1.0, epsilon = 1e-15);
        assert_relative_eq!(o, 0.4, epsilon = 1e-15);
        let (a, b, c, d) = (0.3, -1.2, 0.8, 1.7);
        let (e, o) = sign_partition_sums(&m(&[&[a, b], &[c, d]]), 0.7).unwrap();
        assert_relative_eq!(e, 2.0 * (0.49 + a * d - b * c), epsilon = 1e-14);
        assert_relative_eq!(o, 2.0 * (0.49 - (a * d - b * c)), epsilon = 1e-14);
        let big = DMatrix::<f64>::identity(13, 13);
        assert!(matches!(
            sign_partition_sums(&big, 1.0),
            Err(Error::EnumerationTooLarge(13, 12))
        ));
    }

    #[test]
    fn witness_examples() {
        let w = negative_det_witness(&(DMatrix::identity(2, 2) * 2.0)).unwrap().unwrap();
        assert_eq!(w.signs, vec![-1, 1]);
        assert_eq!(w.parity, Parity::Odd);
        assert!(negative_det_witness(&DMatrix::identity(2, 2)).unwrap().is_none());
        assert!(negative_det_witness(&(DMatrix::identity(3, 3) * 0.5)).unwrap().is_none());
    }

    #[test]
    fn submatrix_examples() {
        let r = max_submatrix_det(&m(&[&[3.0, 0.0], &[0.0, 3.0], &[1.0, 1.0]])).unwrap();
        assert_relative_eq!(r.det_s1, 9.0, epsilon = 1e-12);
        assert_relative_eq!(r.max_abs, 9.0, epsilon = 1e-12);
        assert_eq!(r.argmax_rows, vec![0, 1]);
        let r = max_submatrix_det(&m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert_eq!((r.det_s1, r.max_abs), (1.0, 1.0));
        let r = max_submatrix_det(&m(&[&[2.0, -1.0], &[-1.0, 2.0], &[0.5, 0.5]])).unwrap();
        assert_relative_eq!(r.det_s1, 3.0, epsilon = 1e-12);
        assert_relative_eq!(r.max_abs, 3.0, epsilon = 1e-12);
        // equality in the dominance condition is rejected
        let err = max_submatrix_det(&m(&[&[2.0, 0.0], &[1.0, 1.0], &[1.0, 0.0]])).unwrap_err();
        assert!(matches!(err, Error::ColumnDominance(0)));
        assert!(max_submatrix_det(&m(&[&[2.0, 0.0], &[0.0, 2.0]])).is_err());
    }

    #[test]
    fn difference_bound_examples() {
        let p = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        assert_relative_eq!(difference_bound(&p, &[1.0, 0.0], 0, 1).unwrap(), 1.0);
        let i2 = SymMatrix::identity(2);
        assert_relative_eq!(difference_bound(&i2, &[1.0, 1.0], 0, 1).unwrap(), 2.0);
        let p3 = SymMatrix::from_rows(&[
            vec![3.0, -1.0, -1.0],
            vec![-1.0, 3.0, -1.0],
            vec![-1.0, -1.0, 3.0],
        ])
        .unwrap();
        assert_relative_eq!(difference_bound(&p3, &[1.0, 0.0, 0.0], 0, 1).unwrap(), 3.0);
        assert!(difference_bound(&p3, &[1.0, 0.0, 0.0], 1, 1).is_err());
        let bad = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        match difference_bound(&bad, &[1.0, 0.0], 0, 1) {
            Err(Error::Dominance(prof)) => assert!(!prof.a1_ok),
            other => panic!("expected dominance error, got {other:?}"),
        }
    }

    #[test]
    fn solve_examples() {
        let p = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let (a, v) = solve_and_check(&p, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(a[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(a[1], 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(v, 1.0 / 3.0 - 1.0, epsilon = 1e-14);
        let (a, v) = solve_and_check(&p, &[0.0, 0.0]).unwrap();
        assert_eq!(a, vec![0.0, 0.0]);
        assert_eq!(v, 0.0);
        let (a, v) = solve_and_check(&SymMatrix::identity(4), &[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(a, vec![1.0, -1.0, 1.0, -1.0]);
        assert_relative_eq!(v, 2.0 - 12.0);
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let sizes = SuiteSizes {
            sign_identity: 20,
            submatrix: 20,
            difference_bound: 20,
            witness: 20,
        };
        let a = run_property_suite(5, sizes, Execution::Sequential);
        let b = run_property_suite(5, sizes, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.passed()), "{}", format_suite(&a));
    }
}
