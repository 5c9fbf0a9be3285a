//! Dense exact linear algebra over the rationals.
//!
//! Everything below is plain Gaussian elimination kept exact; verdicts carry
//! certificates (a particular solution plus kernel basis for underdetermined
//! systems) so callers can re-verify every answer by substitution.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::rational::{Int, Rational};
use crate::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    a: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            a: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[Vec<Int>]) -> Result<Self> {
        QMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().cloned().map(Rational::from_int).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.a[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, xj) in x.iter().enumerate() {
                    acc += &(self.get(i, j) * xj);
                }
                acc
            })
            .collect())
    }

    /// In-place reduced row echelon form; returns pivot column per pivot row.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.get(row, col).recip().expect("pivot is nonzero");
            for j in col..self.cols {
                let v = self.get(row, j) * &inv;
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i != row && !self.get(i, col).is_zero() {
                    let factor = self.get(i, col).clone();
                    for j in col..self.cols {
                        let v = self.get(i, j) - &(&factor * self.get(row, j));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.cols {
            self.a.swap(i * self.cols + col, j * self.cols + col);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical kernel basis from the reduced echelon form: one vector per
    /// free column, with entry 1 at the free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m.get(prow, free);
            }
            basis.push(v);
        }
        basis
    }
}

/// Verdict of [`solve_exact`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolve {
    Unique(Vec<Rational>),
    NoSolution,
    /// Underdetermined: `particular + span(kernel)` is the full solution set.
    Family {
        particular: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
}

/// Exact Gaussian elimination on `M x = b`.
pub fn solve_exact(m: &QMatrix, b: &[Rational]) -> Result<LinearSolve> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has {}",
            m.rows,
            b.len()
        )));
    }
    let mut aug = QMatrix::zeros(m.rows, m.cols + 1);
    for (i, bi) in b.iter().enumerate() {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols, bi.clone());
    }
    let pivots = aug.rref();
    if pivots.contains(&m.cols) {
        return Ok(LinearSolve::NoSolution);
    }
    let mut particular = vec![Rational::zero(); m.cols];
    for (prow, &pcol) in pivots.iter().enumerate() {
        particular[pcol] = aug.get(prow, m.cols).clone();
    }
    if pivots.len() == m.cols {
        Ok(LinearSolve::Unique(particular))
    } else {
        Ok(LinearSolve::Family {
            particular,
            kernel: m.kernel_basis(),
        })
    }
}

/// Largest common divisor of the entries, zero for the zero vector.
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// Divides out the content, preserving direction. Zero stays zero.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = content(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn rational_to_primitive(v: &[Rational]) -> Vec<Int> {
    let mut lcm = Int::from(1);
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<Int> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    primitive(&ints)
}

/// Determinant of a square integer matrix, by fraction-free expansion via
/// the rational echelon form.
pub fn int_det(rows: &[Vec<Int>]) -> Result<Int> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
    }
    let mut m = QMatrix::from_int_rows(rows)?;
    let mut det = Rational::one();
    // square elimination never skips a column, so the pivot row is `col`
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m.get(i, col).is_zero()) else {
            return Ok(Int::zero());
        };
        if p != col {
            m.swap_rows(col, p);
            det = -det;
        }
        det *= m.get(col, col);
        let inv = m.get(col, col).recip().expect("pivot is nonzero");
        for j in col..n {
            let v = m.get(col, j) * &inv;
            m.set(col, j, v);
        }
        for i in (col + 1)..n {
            if !m.get(i, col).is_zero() {
                let factor = m.get(i, col).clone();
                for j in col..n {
                    let v = m.get(i, j) - &(&factor * m.get(col, j));
                    m.set(i, j, v);
                }
            }
        }
    }
    debug_assert!(det.is_integer());
    Ok(det.to_int().expect("integer matrix determinant is integral"))
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn neg_vec(v: &[Int]) -> Vec<Int> {
    v.iter().map(|x| -x).collect()
}

pub fn int_dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sign-normalizes so the first nonzero entry is positive; used only where a
/// line (not a ray) is being represented.
pub fn line_normalize(v: &[Int]) -> Vec<Int> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg_vec(v),
        _ => v.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn unique_solution_identity() {
        let m = QMatrix::from_rows(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(
            solve_exact(&m, &rv(&[3, 4])).unwrap(),
            LinearSolve::Unique(rv(&[3, 4]))
        );
    }

    #[test]
    fn unique_solution_2x2() {
        // x + y = 2, x - y = 0
        let m = QMatrix::from_rows(vec![rv(&[1, 1]), rv(&[1, -1])]).unwrap();
        assert_eq!(
            solve_exact(&m, &rv(&[2, 0])).unwrap(),
            LinearSolve::Unique(rv(&[1, 1]))
        );
    }

    #[test]
    fn no_solution() {
        let m = QMatrix::from_rows(vec![rv(&[1]), rv(&[1])]).unwrap();
        assert_eq!(solve_exact(&m, &rv(&[0, 1])).unwrap(), LinearSolve::NoSolution);
    }

    #[test]
    fn parametric_family() {
        let m = QMatrix::from_rows(vec![rv(&[1, 1])]).unwrap();
        match solve_exact(&m, &rv(&[1])).unwrap() {
            LinearSolve::Family { particular, kernel } => {
                assert_eq!(m.mul_vec(&particular).unwrap(), rv(&[1]));
                assert_eq!(kernel.len(), 1);
                // canonical form has 1 at the free column; spans (1,-1)
                assert_eq!(kernel[0], rv(&[-1, 1]));
                assert_eq!(m.mul_vec(&kernel[0]).unwrap(), rv(&[0]));
            }
            other => panic!("expected family, got {other:?}"),
        }
    }

    #[test]
    fn solutions_satisfy_system_exactly() {
        let m = QMatrix::from_rows(vec![
            rv(&[2, 3, -1]),
            rv(&[1, -1, 4]),
            rv(&[0, 5, 2]),
        ])
        .unwrap();
        let b = rv(&[7, -2, 11]);
        if let LinearSolve::Unique(x) = solve_exact(&m, &b).unwrap() {
            assert_eq!(m.mul_vec(&x).unwrap(), b);
        } else {
            panic!("expected unique solution");
        }
    }

    #[test]
    fn primitive_vectors() {
        let v: Vec<Int> = [4, -6, 8].iter().map(|&x| Int::from(x)).collect();
        let p = primitive(&v);
        assert_eq!(p, [2, -3, 4].iter().map(|&x| Int::from(x)).collect::<Vec<_>>());
        let q = rational_to_primitive(&[
            Rational::new(Int::from(1), Int::from(2)).unwrap(),
            Rational::new(Int::from(-1), Int::from(3)).unwrap(),
        ]);
        assert_eq!(q, [3, -2].iter().map(|&x| Int::from(x)).collect::<Vec<_>>());
    }

    #[test]
    fn determinant() {
        let rows: Vec<Vec<Int>> = vec![
            vec![Int::from(1), Int::from(2)],
            vec![Int::from(3), Int::from(4)],
        ];
        assert_eq!(int_det(&rows).unwrap(), Int::from(-2));
        let singular: Vec<Vec<Int>> = vec![
            vec![Int::from(1), Int::from(2)],
            vec![Int::from(2), Int::from(4)],
        ];
        assert_eq!(int_det(&singular).unwrap(), Int::from(0));
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let m = QMatrix::from_rows(vec![rv(&[1, 2, 3]), rv(&[2, 4, 6])]).unwrap();
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).unwrap().iter().all(Rational::is_zero));
        }
    }
}
