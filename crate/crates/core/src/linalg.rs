//! Interval matrices: Laplace expansion routines with factorial cost, and
//! cubic-cost Gaussian elimination and Krawczyk enclosures.

use std::fmt;

use crate::arith;
use crate::counters::OpCounters;
use crate::error::LinalgError;
use crate::interval::Interval;
use crate::round;

/// Largest dimension accepted by [`det_laplace`].
pub const LAPLACE_DET_CAP: usize = 8;
/// Largest dimension accepted by [`adjugate_laplace`] and [`inverse_adjugate`].
pub const LAPLACE_ADJ_CAP: usize = 6;
/// Iteration cap of [`krawczyk_inverse`].
pub const KRAWCZYK_INVERSE_MAX_ITER: usize = 10;
/// Relative width change below which [`krawczyk_inverse`] stops.
pub const KRAWCZYK_INVERSE_STAGNATION: f64 = 1e-3;

/// Square interval matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct IntervalMatrix {
    n: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    /// Panics unless `entries.len() == n * n`.
    pub fn from_entries(n: usize, entries: Vec<Interval>) -> IntervalMatrix {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        IntervalMatrix { n, entries }
    }

    pub fn from_rows(rows: &[Vec<Interval>]) -> Result<IntervalMatrix, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::DimensionMismatch(
                "matrix must be square".into(),
            ));
        }
        Ok(IntervalMatrix::from_entries(n, rows.concat()))
    }

    /// Rows of `(lo, hi)` pairs.
    pub fn from_bounds(rows: &[Vec<(f64, f64)>]) -> Result<IntervalMatrix, LinalgError> {
        let rows: Vec<Vec<Interval>> = rows
            .iter()
            .map(|r| r.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect())
            .collect();
        IntervalMatrix::from_rows(&rows)
    }

    pub fn from_point(m: &RealMatrix) -> IntervalMatrix {
        IntervalMatrix {
            n: m.n,
            entries: m.entries.iter().map(|&v| Interval::point(v)).collect(),
        }
    }

    pub fn identity(n: usize) -> IntervalMatrix {
        IntervalMatrix::from_point(&RealMatrix::identity(n))
    }

    pub fn filled(n: usize, v: Interval) -> IntervalMatrix {
        IntervalMatrix {
            n,
            entries: vec![v; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().any(Interval::is_empty)
    }

    /// Largest entry width.
    pub fn max_width(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.diam().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Infinity norm `max_i Σ_j mag(a_ij)`, rounded upward.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).mag())
                    .fold(0.0, round::add_up)
            })
            .fold(0.0, f64::max)
    }

    pub fn contains_point_matrix(&self, m: &RealMatrix) -> bool {
        m.n == self.n
            && self
                .entries
                .iter()
                .zip(&m.entries)
                .all(|(a, &v)| a.contains_point(v))
    }

    pub fn intersect(&self, other: &IntervalMatrix) -> IntervalMatrix {
        IntervalMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        }
    }

    /// Matrix with row `row` and column `col` removed.
    pub fn minor(&self, row: usize, col: usize) -> IntervalMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != row) {
            for j in (0..n).filter(|&j| j != col) {
                entries.push(self.get(i, j));
            }
        }
        IntervalMatrix { n: n - 1, entries }
    }
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Square real matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    /// Panics unless `entries.len() == n * n`.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> RealMatrix {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        RealMatrix { n, entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<RealMatrix, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::DimensionMismatch(
                "matrix must be square".into(),
            ));
        }
        Ok(RealMatrix::from_entries(n, rows.concat()))
    }

    pub fn identity(n: usize) -> RealMatrix {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        RealMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Floating-point product, for residual checks.
    pub fn mul(&self, other: &RealMatrix) -> RealMatrix {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        RealMatrix { n, entries: out }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn mid_matrix(a: &IntervalMatrix) -> RealMatrix {
    RealMatrix {
        n: a.n,
        entries: a
            .entries
            .iter()
            .map(|e| e.mid().unwrap_or(f64::NAN))
            .collect(),
    }
}

/// Floating-point inverse by Gauss-Jordan elimination with partial pivoting.
pub fn real_inverse(m: &RealMatrix) -> Result<RealMatrix, LinalgError> {
    let n = m.n;
    if n == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    if m.entries.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::SingularMatrix);
    }
    let scale = m.entries.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return Err(LinalgError::SingularMatrix);
    }
    let mut a = m.entries.clone();
    let mut inv = RealMatrix::identity(n).entries;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| {
                a[x * n + k]
                    .abs()
                    .total_cmp(&a[y * n + k].abs())
                    .then(y.cmp(&x))
            })
            .unwrap_or(k);
        let piv = a[p * n + k];
        if piv.abs() <= scale * f64::EPSILON * n as f64 * 1e-2 || !piv.is_finite() {
            return Err(LinalgError::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
        }
        let rp = 1.0 / piv;
        for j in 0..n {
            a[k * n + j] *= rp;
            inv[k * n + j] *= rp;
        }
        for i in (0..n).filter(|&i| i != k) {
            let f = a[i * n + k];
            if f != 0.0 {
                for j in 0..n {
                    a[i * n + j] -= f * a[k * n + j];
                    inv[i * n + j] -= f * inv[k * n + j];
                }
            }
        }
    }
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::SingularMatrix);
    }
    Ok(RealMatrix { n, entries: inv })
}

fn dot(row: impl Iterator<Item = (Interval, Interval)>, c: &mut OpCounters) -> Interval {
    let mut acc: Option<Interval> = None;
    for (a, b) in row {
        let p = arith::mul(a, b, c);
        acc = Some(match acc {
            None => p,
            Some(s) => arith::add(s, p, c),
        });
    }
    acc.unwrap_or(Interval::ZERO)
}

/// `A · v` for an interval vector `v`.
pub fn mat_vec(
    a: &IntervalMatrix,
    v: &[Interval],
    c: &mut OpCounters,
) -> Result<Vec<Interval>, LinalgError> {
    if v.len() != a.n {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix of size {} times vector of length {}",
            a.n,
            v.len()
        )));
    }
    Ok((0..a.n)
        .map(|i| dot((0..a.n).map(|j| (a.get(i, j), v[j])), c))
        .collect())
}

pub fn mat_mat(
    a: &IntervalMatrix,
    b: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    if a.n != b.n {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} vs {}",
            a.n, b.n
        )));
    }
    let n = a.n;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(dot((0..n).map(|k| (a.get(i, k), b.get(k, j))), c));
        }
    }
    Ok(IntervalMatrix { n, entries })
}

/// `M · A` for a real matrix `M`, with outward rounding.
pub fn real_mat_interval_mat(
    m: &RealMatrix,
    a: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    mat_mat(&IntervalMatrix::from_point(m), a, c)
}

/// `M · v` for a real matrix `M` and an interval vector `v`.
pub fn real_mat_vec(
    m: &RealMatrix,
    v: &[Interval],
    c: &mut OpCounters,
) -> Result<Vec<Interval>, LinalgError> {
    mat_vec(&IntervalMatrix::from_point(m), v, c)
}

fn laplace(a: &IntervalMatrix, c: &mut OpCounters) -> Interval {
    if a.n == 1 {
        return a.get(0, 0);
    }
    let mut acc: Option<Interval> = None;
    for j in 0..a.n {
        let term = arith::mul(a.get(0, j), laplace(&a.minor(0, j), c), c);
        acc = Some(match acc {
            None => term,
            Some(s) if j % 2 == 0 => arith::add(s, term, c),
            Some(s) => arith::sub(s, term, c),
        });
    }
    acc.unwrap_or(Interval::ZERO)
}

/// Determinant enclosure by cofactor expansion along the first row.
///
/// Performs exactly `M(n) = n·(M(n−1) + 1)` interval multiplications.
pub fn det_laplace(a: &IntervalMatrix, c: &mut OpCounters) -> Result<Interval, LinalgError> {
    if a.n == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    if a.n > LAPLACE_DET_CAP {
        return Err(LinalgError::DimensionTooLarge {
            n: a.n,
            cap: LAPLACE_DET_CAP,
        });
    }
    Ok(laplace(a, c))
}

/// Number of interval multiplications performed by [`det_laplace`].
pub fn laplace_mul_count(n: usize) -> u64 {
    (2..=n as u64).fold(0, |m, k| k * (m + 1))
}

/// Adjugate (transposed cofactor matrix), each cofactor by Laplace expansion.
pub fn adjugate_laplace(
    a: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    let n = a.n;
    if n == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    if n > LAPLACE_ADJ_CAP {
        return Err(LinalgError::DimensionTooLarge {
            n,
            cap: LAPLACE_ADJ_CAP,
        });
    }
    if n == 1 {
        return Ok(IntervalMatrix::identity(1));
    }
    let mut adj = IntervalMatrix::filled(n, Interval::ZERO);
    for i in 0..n {
        for j in 0..n {
            let minor = laplace(&a.minor(i, j), c);
            let cof = if (i + j) % 2 == 0 {
                minor
            } else {
                arith::neg(minor, c)
            };
            adj.set(j, i, cof);
        }
    }
    Ok(adj)
}

/// `adj(A) / det(A)` entrywise.
pub fn inverse_adjugate(
    a: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    if a.n > LAPLACE_ADJ_CAP {
        return Err(LinalgError::DimensionTooLarge {
            n: a.n,
            cap: LAPLACE_ADJ_CAP,
        });
    }
    let det = det_laplace(a, c)?;
    if det.contains_zero() {
        return Err(LinalgError::SingularEnclosure);
    }
    let adj = adjugate_laplace(a, c)?;
    c.inversions += 1;
    let mut entries = Vec::with_capacity(a.n * a.n);
    for &e in adj.entries() {
        entries.push(arith::div(e, det, c).map_err(|_| LinalgError::SingularEnclosure)?);
    }
    Ok(IntervalMatrix { n: a.n, entries })
}

/// In-place interval LU factorization with mignitude pivoting.
struct GaussFactor {
    n: usize,
    /// Upper triangle holds `U`; strict lower triangle holds the multipliers.
    lu: Vec<Interval>,
    /// `perm[i]` is the original row now stored at position `i`.
    perm: Vec<usize>,
    swaps: usize,
}

impl GaussFactor {
    fn new(a: &IntervalMatrix, c: &mut OpCounters) -> Result<GaussFactor, LinalgError> {
        let n = a.n;
        if n == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        let mut lu = a.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            c.comparisons += (n - k - 1) as u64;
            let mut p = k;
            let mut best = lu[k * n + k].mig();
            for i in k + 1..n {
                let g = lu[i * n + k].mig();
                if g > best {
                    best = g;
                    p = i;
                }
            }
            // Also rejects NaN.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(best > 0.0) {
                return Err(LinalgError::PivotContainsZero { column: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = arith::div(lu[i * n + k], pivot, c)
                    .map_err(|_| LinalgError::PivotContainsZero { column: k })?;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let prod = arith::mul(l, lu[k * n + j], c);
                    lu[i * n + j] = arith::sub(lu[i * n + j], prod, c);
                }
            }
        }
        Ok(GaussFactor { n, lu, perm, swaps })
    }

    fn det(&self, c: &mut OpCounters) -> Interval {
        let n = self.n;
        let mut d = self.lu[0];
        for k in 1..n {
            d = arith::mul(d, self.lu[k * n + k], c);
        }
        if self.swaps % 2 == 1 {
            arith::neg(d, c)
        } else {
            d
        }
    }

    /// Solves `A x = b` by forward and back substitution.
    fn solve(&self, b: &[Interval], c: &mut OpCounters) -> Result<Vec<Interval>, LinalgError> {
        let n = self.n;
        let mut y: Vec<Interval> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            for k in 0..i {
                let prod = arith::mul(self.lu[i * n + k], y[k], c);
                y[i] = arith::sub(y[i], prod, c);
            }
        }
        let mut x = vec![Interval::ZERO; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                let prod = arith::mul(self.lu[i * n + k], x[k], c);
                s = arith::sub(s, prod, c);
            }
            x[i] =
                arith::div(s, self.lu[i * n + i], c).map_err(|_| LinalgError::SingularEnclosure)?;
        }
        Ok(x)
    }
}

/// Determinant enclosure by interval Gaussian elimination.
pub fn det_gauss(a: &IntervalMatrix, c: &mut OpCounters) -> Result<Interval, LinalgError> {
    let f = GaussFactor::new(a, c)?;
    Ok(f.det(c))
}

/// Interval multiplications performed by [`det_gauss`] when it succeeds.
pub fn gauss_det_mul_count(n: usize) -> u64 {
    let n = n as u64;
    if n == 0 {
        return 0;
    }
    (n - 1) * n * (2 * n - 1) / 6 + (n - 1)
}

/// Inverse enclosure by interval Gaussian elimination against the identity.
pub fn inverse_gauss(
    a: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    let f = GaussFactor::new(a, c).map_err(|e| match e {
        LinalgError::PivotContainsZero { .. } => LinalgError::SingularEnclosure,
        other => other,
    })?;
    c.inversions += 1;
    let n = a.n;
    let mut inv = IntervalMatrix::filled(n, Interval::ZERO);
    let mut e = vec![Interval::ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = Interval::ZERO);
        e[j] = Interval::ONE;
        let col = f.solve(&e, c)?;
        for (i, v) in col.into_iter().enumerate() {
            inv.set(i, j, v);
        }
    }
    Ok(inv)
}

/// Inverse enclosure by Krawczyk iteration with the midpoint inverse as
/// preconditioner.
///
/// With `Y ≈ mid(A)⁻¹` and `E = I − Y·A`, a contraction `‖E‖∞ < 1` gives the
/// starting enclosure `[−r, r]` with `r = ‖Y‖∞ / (1 − ‖E‖∞)`, which is then
/// refined by `X ← (Y + E·X) ∩ X`.
pub fn krawczyk_inverse(
    a: &IntervalMatrix,
    c: &mut OpCounters,
) -> Result<IntervalMatrix, LinalgError> {
    let n = a.n;
    if n == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    let y = real_inverse(&mid_matrix(a))?;
    c.inversions += 1;
    let ya = real_mat_interval_mat(&y, a, c)?;
    let mut e = IntervalMatrix::filled(n, Interval::ZERO);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j {
                Interval::ONE
            } else {
                Interval::ZERO
            };
            e.set(i, j, arith::sub(id, ya.get(i, j), c));
        }
    }
    let norm = e.norm_inf();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(norm < 1.0) {
        return Err(LinalgError::VerificationFailed { norm });
    }
    let y_norm = y.entries.iter().fold(0.0, |s, v| round::add_up(s, v.abs()));
    let r = round::div_up(y_norm, round::sub_down(1.0, norm));
    let mut x = IntervalMatrix::filled(n, Interval::new(-r, r));
    let y_iv = IntervalMatrix::from_point(&y);
    let mut width = x.max_width();
    for _ in 0..KRAWCZYK_INVERSE_MAX_ITER {
        let ex = mat_mat(&e, &x, c)?;
        let mut next = IntervalMatrix::filled(n, Interval::ZERO);
        for k in 0..n * n {
            next.entries[k] =
                arith::add(y_iv.entries[k], ex.entries[k], c).intersect(&x.entries[k]);
        }
        if next.is_empty() {
            // Cannot happen for a verified contraction; keep the last enclosure.
            break;
        }
        let w = next.max_width();
        x = next;
        let rel = if width > 0.0 {
            (width - w) / width
        } else {
            0.0
        };
        width = w;
        if rel < KRAWCZYK_INVERSE_STAGNATION {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    fn point(rows: &[Vec<f64>]) -> IntervalMatrix {
        IntervalMatrix::from_point(&RealMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn laplace_examples() {
        let mut c = OpCounters::new();
        assert_eq!(
            det_laplace(&IntervalMatrix::identity(3), &mut c).unwrap(),
            Interval::ONE
        );
        let a = IntervalMatrix::filled(2, iv(0.0, 1.0));
        assert_eq!(det_laplace(&a, &mut c).unwrap(), iv(-1.0, 1.0));
        let mut c = OpCounters::new();
        det_laplace(&IntervalMatrix::filled(4, iv(0.5, 1.0)), &mut c).unwrap();
        assert_eq!(c.iv_mul, 40);
        let big = IntervalMatrix::identity(9);
        assert!(matches!(
            det_laplace(&big, &mut c),
            Err(LinalgError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn laplace_recurrence_values() {
        let want = [0, 0, 2, 9, 40, 205, 1236, 8659];
        for n in 1..=7 {
            assert_eq!(laplace_mul_count(n), want[n]);
        }
    }

    #[test]
    fn adjugate_examples() {
        let mut c = OpCounters::new();
        assert_eq!(
            adjugate_laplace(&point(&[vec![5.0]]), &mut c).unwrap(),
            IntervalMatrix::identity(1)
        );
        assert_eq!(
            adjugate_laplace(&IntervalMatrix::identity(2), &mut c).unwrap(),
            IntervalMatrix::identity(2)
        );
        let adj = adjugate_laplace(&point(&[vec![1.0, 2.0], vec![3.0, 4.0]]), &mut c).unwrap();
        assert_eq!(adj, point(&[vec![4.0, -2.0], vec![-3.0, 1.0]]));
    }

    #[test]
    fn inverse_examples() {
        let mut c = OpCounters::new();
        let d = point(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let want = point(&[vec![0.5, 0.0], vec![0.0, 0.25]]);
        assert_eq!(inverse_adjugate(&d, &mut c).unwrap(), want);
        assert_eq!(inverse_gauss(&d, &mut c).unwrap(), want);
        assert_eq!(
            inverse_adjugate(&IntervalMatrix::identity(3), &mut c).unwrap(),
            IntervalMatrix::identity(3)
        );
        assert_eq!(
            inverse_gauss(&IntervalMatrix::identity(3), &mut c).unwrap(),
            IntervalMatrix::identity(3)
        );
        let sing = IntervalMatrix::filled(2, iv(0.0, 1.0));
        assert_eq!(
            inverse_adjugate(&sing, &mut c),
            Err(LinalgError::SingularEnclosure)
        );
    }

    #[test]
    fn gauss_determinant() {
        let mut c = OpCounters::new();
        assert_eq!(
            det_gauss(&IntervalMatrix::identity(4), &mut c).unwrap(),
            Interval::ONE
        );
        let a = IntervalMatrix::filled(2, iv(0.0, 1.0));
        assert_eq!(
            det_gauss(&a, &mut c),
            Err(LinalgError::PivotContainsZero { column: 0 })
        );
        let p = point(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(det_gauss(&p, &mut c).unwrap(), Interval::point(-1.0));
    }

    #[test]
    fn gauss_mul_count_matches_formula() {
        for n in [1, 2, 3, 4, 8] {
            let mut rows = vec![vec![0.1; n]; n];
            for (i, r) in rows.iter_mut().enumerate() {
                r[i] = n as f64;
            }
            let mut c = OpCounters::new();
            det_gauss(&point(&rows), &mut c).unwrap();
            assert_eq!(c.iv_mul, gauss_det_mul_count(n), "n = {n}");
        }
    }

    #[test]
    fn krawczyk_examples() {
        let mut c = OpCounters::new();
        let i3 = krawczyk_inverse(&IntervalMatrix::identity(3), &mut c).unwrap();
        assert_eq!(i3, IntervalMatrix::identity(3));
        let a = point(&[vec![4.0, 1.0], vec![2.0, 3.0]]);
        let inv = krawczyk_inverse(&a, &mut c).unwrap();
        let exact = [0.3, -0.1, -0.2, 0.4];
        for (e, want) in inv.entries().iter().zip(exact) {
            assert!(e.contains_point(want), "{e} ∌ {want}");
            assert!(e.diam().unwrap() < 1e-10);
        }
        let bad = IntervalMatrix::from_rows(&[
            vec![iv(-0.5, 1.5), iv(-1.0, 1.0)],
            vec![iv(-1.0, 1.0), iv(-0.5, 1.5)],
        ])
        .unwrap();
        assert!(matches!(
            krawczyk_inverse(&bad, &mut c),
            Err(LinalgError::VerificationFailed { .. })
        ));
    }

    #[test]
    fn real_inverse_examples() {
        let m = RealMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let inv = real_inverse(&m).unwrap();
        assert_eq!(
            inv,
            RealMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.25]]).unwrap()
        );
        let s = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(real_inverse(&s), Err(LinalgError::SingularMatrix));
        let a = point(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(mid_matrix(&a).get(1, 0), 3.0);
    }

    #[test]
    fn mat_vec_identity() {
        let mut c = OpCounters::new();
        let x = vec![iv(1.0, 2.0), iv(-3.0, 0.5)];
        assert_eq!(
            mat_vec(&IntervalMatrix::identity(2), &x, &mut c).unwrap(),
            x
        );
    }
}
