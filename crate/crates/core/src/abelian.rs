//! Exact finitely generated abelian group computations: integer matrices over
//! arbitrary-precision integers, Smith normal form by elementary operations,
//! and the arithmetic lift decision for Z onto Z/m.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A dense integer matrix, row-major, over arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            data: entries,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&x| BigInt::from(x))
            })
            .collect();
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination; exact over Z.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut prev = BigInt::one();
        let mut sign = 1i8;
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                // Pivot search within the column.
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = &num / &prev;
                }
                a[i * n + k] = BigInt::zero();
            }
            prev = a[k * n + k].clone();
        }
        let det = a[(n - 1) * n + (n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    /// Rank over Q by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        let (r, c) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut prev = BigInt::one();
        let mut rank = 0usize;
        let mut row = 0usize;
        for col in 0..c {
            let pivot = (row..r).find(|&i| !a[i * c + col].is_zero());
            let Some(p) = pivot else { continue };
            if p != row {
                for j in 0..c {
                    a.swap(row * c + j, p * c + j);
                }
            }
            for i in row + 1..r {
                for j in col + 1..c {
                    let num = &a[i * c + j] * &a[row * c + col] - &a[i * c + col] * &a[row * c + j];
                    a[i * c + j] = &num / &prev;
                }
                a[i * c + col] = BigInt::zero();
            }
            prev = a[row * c + col].clone();
            rank += 1;
            row += 1;
            if row == r {
                break;
            }
        }
        rank
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal with successive
/// divisibility.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `S`: non-negative, each dividing the next, zeros last.
    pub invariant_factors: Vec<BigInt>,
}

/// Smith normal form by elementary row/column reduction with
/// smallest-nonzero-pivot selection.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let swap_rows = |s: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for j in 0..s.cols {
            s.data.swap(a * s.cols + j, b * s.cols + j);
        }
        for j in 0..u.cols {
            u.data.swap(a * u.cols + j, b * u.cols + j);
        }
    };
    let swap_cols = |s: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for i in 0..s.rows {
            s.data.swap(i * s.cols + a, i * s.cols + b);
        }
        for i in 0..v.rows {
            v.data.swap(i * v.cols + a, i * v.cols + b);
        }
    };
    // row[target] -= q * row[source], mirrored into U.
    let row_op =
        |s: &mut IntMatrix, u: &mut IntMatrix, target: usize, source: usize, q: &BigInt| {
            for j in 0..s.cols {
                let x = s.get(target, j) - q * s.get(source, j);
                s.set(target, j, x);
            }
            for j in 0..u.cols {
                let x = u.get(target, j) - q * u.get(source, j);
                u.set(target, j, x);
            }
        };
    let col_op =
        |s: &mut IntMatrix, v: &mut IntMatrix, target: usize, source: usize, q: &BigInt| {
            for i in 0..s.rows {
                let x = s.get(i, target) - q * s.get(i, source);
                s.set(i, target, x);
            }
            for i in 0..v.rows {
                let x = v.get(i, target) - q * v.get(i, source);
                v.set(i, target, x);
            }
        };

    for k in 0..rows.min(cols) {
        'reduce: loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if !s.get(i, j).is_zero()
                        && pivot
                            .map(|(pi, pj)| s.get(i, j).abs() < s.get(pi, pj).abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break 'reduce };
            swap_rows(&mut s, &mut u, k, pi);
            swap_cols(&mut s, &mut v, k, pj);

            let mut dirty = false;
            for i in k + 1..rows {
                if !s.get(i, k).is_zero() {
                    let q = s.get(i, k) / s.get(k, k);
                    row_op(&mut s, &mut u, i, k, &q);
                    if !s.get(i, k).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !s.get(k, j).is_zero() {
                    let q = s.get(k, j) / s.get(k, k);
                    col_op(&mut s, &mut v, j, k, &q);
                    if !s.get(k, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'reduce;
            }
            // Divisibility pass: fold any non-divisible trailing entry into
            // row k and keep reducing.
            let pivot_val = s.get(k, k).clone();
            let offender = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(s.get(i, j) % &pivot_val).is_zero());
            match offender {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    row_op(&mut s, &mut u, k, i, &minus_one);
                }
                None => break 'reduce,
            }
        }
        if s.get(k, k).is_negative() {
            for j in 0..cols {
                let x = -s.get(k, j).clone();
                s.set(k, j, x);
            }
            for j in 0..rows {
                let x = -u.get(k, j).clone();
                u.set(k, j, x);
            }
        }
    }

    let invariant_factors = s.diagonal();
    debug_assert!(invariant_factors
        .windows(2)
        .all(|w| w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero())));
    // Postcondition: the decomposition re-multiplies.
    assert_eq!(u.mul(m).mul(&v), s, "U·M·V = S must hold");
    SnfDecomposition {
        s,
        u,
        v,
        invariant_factors,
    }
}

/// Minimal number of generators of `Z^rows / (column lattice of the
/// presentation)`: invariant factors different from 1, plus the free rank.
pub fn abelian_min_generators(presentation: &IntMatrix) -> usize {
    let snf = smith_normal_form(presentation);
    let non_unit = snf.invariant_factors.iter().filter(|d| !d.is_one()).count();
    let free = presentation.rows() - snf.invariant_factors.len();
    non_unit + free
}

/// True iff the vectors generate `Z^r`: the stacked matrix has `r` invariant
/// factors all equal to 1.
pub fn lattice_tuple_generates(r: usize, tuple: &[Vec<BigInt>]) -> Result<bool> {
    for v in tuple {
        if v.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: v.len(),
            });
        }
    }
    // Vectors as columns of an r × t matrix.
    let t = tuple.len();
    let mut m = IntMatrix::zero(r, t);
    for (j, v) in tuple.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    let snf = smith_normal_form(&m);
    let units = snf.invariant_factors.iter().filter(|d| d.is_one()).count();
    Ok(units >= r)
}

/// Outcome of deciding whether a generator of Z/m admits a generating lift
/// to Z. The only generators of Z are ±1, so the decision is the pair of
/// congruences ±1 ≡ h (mod m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLiftReport {
    pub modulus: BigInt,
    pub residue: BigInt,
    /// A generating lift (1 or −1) when one exists.
    pub witness: Option<BigInt>,
    /// The two congruence checks: (candidate lift, candidate mod m, matches).
    pub congruences: Vec<(BigInt, BigInt, bool)>,
}

impl ZLiftReport {
    pub fn lift_exists(&self) -> bool {
        self.witness.is_some()
    }
}

/// Decides whether the residue `h` (a generator of Z/m) admits a generating
/// lift along Z -> Z/m.
pub fn cyclic_quotient_lift_exists(modulus: &BigInt, h: &BigInt) -> Result<ZLiftReport> {
    if modulus < &BigInt::one() {
        return Err(Error::InvalidArgument("modulus must be >= 1".into()));
    }
    let residue = h.mod_floor(modulus);
    if !residue.gcd(modulus).is_one() {
        return Err(Error::NotAGenerator {
            residue: residue.to_string(),
            modulus: modulus.to_string(),
        });
    }
    let mut witness = None;
    let mut congruences = Vec::new();
    for candidate in [BigInt::one(), -BigInt::one()] {
        let reduced = candidate.mod_floor(modulus);
        let matches = reduced == residue;
        if matches && witness.is_none() {
            witness = Some(candidate.clone());
        }
        congruences.push((candidate, reduced, matches));
    }
    Ok(ZLiftReport {
        modulus: modulus.clone(),
        residue,
        witness,
        congruences,
    })
}
