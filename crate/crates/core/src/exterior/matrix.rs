use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::symexpr::{gcd, lcm, Chart, Expr, ExprError, Poly, VarTable};

use super::ExteriorError;

/// Dense matrix of expressions, read as a matrix over the field of rational
/// functions.
#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl SymMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix {
            rows,
            cols,
            data: vec![Expr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    /// Builds a matrix from rows. Every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Expr>>) -> Result<Self, ExteriorError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(ExteriorError::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(SymMatrix { rows: n, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SymMatrix { rows, cols, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        SymMatrix::from_fn(rows.len(), cols, |i, j| Expr::int(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Expr>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> SymMatrix {
        SymMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &SymMatrix) -> Result<SymMatrix, ExteriorError> {
        if self.cols != other.rows {
            return Err(ExteriorError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(SymMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Vec<Expr> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> SymMatrix {
        SymMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Expr) -> Result<Expr, E>) -> Result<SymMatrix, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(SymMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Entries reduced on the surface described by `chart`.
    pub fn reduce(&self, chart: &Chart) -> Result<SymMatrix, ExprError> {
        self.try_map(|e| chart.reduce(e))
    }

    /// Reduced row echelon form and its pivot columns.
    ///
    /// Gauss–Jordan elimination: columns are scanned left to right and the
    /// pivot is the remaining row whose entry in that column is smallest.
    pub fn rref(&self) -> (SymMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).size())
            else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip().expect("pivot is nonzero");
            for j in c..m.cols {
                let e = m.get(r, j) * &inv;
                m.set(r, j, e);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let e = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, e);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace `{x : M x = 0}`.
    ///
    /// One vector per non-pivot column of the echelon form. Each vector is
    /// made primitive (see [`primitive_vector`]), so the basis is fixed by
    /// the matrix alone.
    pub fn nullspace(&self) -> Vec<Vec<Expr>> {
        let (r, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![Expr::zero(); self.cols];
                v[free] = Expr::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, free);
                }
                primitive_vector(&v)
            })
            .collect()
    }

    /// Basis of the left nullspace `{y : yᵀ M = 0}`.
    pub fn left_nullspace(&self) -> Vec<Vec<Expr>> {
        self.transpose().nullspace()
    }

    pub fn inverse(&self) -> Result<SymMatrix, ExteriorError> {
        if self.rows != self.cols {
            return Err(ExteriorError::Shape(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(SymMatrix::zeros(0, 0));
        }
        let aug = SymMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Expr::one()
            } else {
                Expr::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(ExteriorError::Singular);
        }
        Ok(SymMatrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn render(&self, vars: &VarTable) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.render(vars)).collect())
            .collect()
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// Rescales a vector by a nonzero function so that its entries are
/// polynomials with coprime integer coefficients and no common polynomial
/// factor, and the first nonzero entry has a positive leading coefficient.
pub fn primitive_vector(v: &[Expr]) -> Vec<Expr> {
    if v.iter().all(Expr::is_zero) {
        return v.to_vec();
    }
    let den = v.iter().fold(Poly::one(), |acc, e| lcm(&acc, e.denominator()));
    let mut nums: Vec<Poly> = v
        .iter()
        .map(|e| {
            let cofactor = den.div_exact(e.denominator()).expect("lcm is a multiple");
            e.numerator().mul(&cofactor)
        })
        .collect();
    let common = nums.iter().fold(Poly::zero(), |acc, p| gcd(&acc, p));
    for p in &mut nums {
        *p = p.div_exact(&common).expect("gcd divides every entry");
    }
    let den_lcm = nums.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
    let scaled: Vec<Poly> = nums
        .iter()
        .map(|p| p.scale(&den_lcm.clone().into()))
        .collect();
    let num_gcd = scaled
        .iter()
        .filter(|p| !p.is_zero())
        .fold(BigInt::zero(), |acc, p| acc.gcd(&p.numerator_gcd()));
    let negate = scaled
        .iter()
        .find(|p| !p.is_zero())
        .is_some_and(|p| p.leading_is_negative());
    let factor = num_rational::BigRational::new(if negate { -BigInt::one() } else { BigInt::one() }, num_gcd);
    scaled.iter().map(|p| Expr::from_poly(p.scale(&factor))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn ints(v: &[i64]) -> Vec<Expr> {
        v.iter().map(|&x| Expr::int(x)).collect()
    }

    #[test]
    fn example_one_hessian_nullspace() {
        let w = SymMatrix::from_ints(&[&[0, 0, 0, 0], &[0, 2, 1, -1], &[0, 1, 1, 0], &[0, -1, 0, 1]]);
        assert_eq!(w.rank(), 2);
        assert_eq!(w.nullspace(), vec![ints(&[1, 0, 0, 0]), ints(&[0, 1, -1, 1])]);
    }

    #[test]
    fn rank_one_and_identity() {
        let w = SymMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(w.nullspace(), vec![ints(&[1, -1])]);
        assert!(SymMatrix::identity(3).nullspace().is_empty());
    }

    #[test]
    fn inverse_of_second_class_block() {
        let c = SymMatrix::from_ints(&[&[0, -2], &[2, 0]]);
        let inv = c.inverse().unwrap();
        let half = Expr::frac(1, 2);
        assert_eq!(inv.to_rows(), vec![vec![Expr::zero(), half.clone()], vec![-&half, Expr::zero()]]);
        assert_eq!(c.mul(&inv).unwrap(), SymMatrix::identity(2));
        assert_eq!(SymMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse(), Err(ExteriorError::Singular));
    }

    #[test]
    fn functional_entries() {
        let t = VarTable::mechanics(1, false, "l", 0);
        let p = parse_expr("p1", &t).unwrap();
        let m = SymMatrix::from_rows(2, vec![vec![p.clone(), Expr::one()], vec![&p * &p, p.clone()]]).unwrap();
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![Expr::one(), -&p]]);
        assert!(m.mul_vec(&ns[0]).iter().all(Expr::is_zero));
    }

    #[test]
    fn primitive_vector_clears_fractions() {
        let t = VarTable::mechanics(1, false, "l", 0);
        let p = parse_expr("p1", &t).unwrap();
        let v = vec![Expr::frac(-1, 2), Expr::one().checked_div(&p).unwrap()];
        assert_eq!(primitive_vector(&v), vec![p.clone(), Expr::int(-2)]);
    }
}
