//! Exact rational Gaussian elimination for small integer matrices.
//!
//! Elimination runs over `Ratio<i64>` with checked arithmetic and falls back
//! to arbitrary-precision rationals when any intermediate overflows, so the
//! result is always exact.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Overflow;

trait Scalar: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `self - a * b`
    fn sub_mul(&self, a: &Self, b: &Self) -> Result<Self, Overflow>;
    fn div(&self, d: &Self) -> Result<Self, Overflow>;
    fn to_big(&self) -> BigRational;
}

impl Scalar for Ratio<i64> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub_mul(&self, a: &Self, b: &Self) -> Result<Self, Overflow> {
        let prod = a.checked_mul(b).ok_or(Overflow)?;
        self.checked_sub(&prod).ok_or(Overflow)
    }
    fn div(&self, d: &Self) -> Result<Self, Overflow> {
        self.checked_div(d).ok_or(Overflow)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub_mul(&self, a: &Self, b: &Self) -> Result<Self, Overflow> {
        Ok(self - a * b)
    }
    fn div(&self, d: &Self) -> Result<Self, Overflow> {
        Ok(self / d)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

#[derive(Clone, Debug)]
struct Row<T> {
    pivot: usize,
    values: Vec<T>,
    support: Vec<usize>,
    /// Row as a combination of the original inserted vectors.
    repr: BTreeMap<usize, T>,
}

/// Row echelon form built one vector at a time. Row `j` is zero on the pivot
/// columns of every earlier row, so reducing against rows in insertion order
/// never reintroduces an eliminated pivot.
#[derive(Clone, Debug)]
struct Echelon<T> {
    dim: usize,
    inserted: usize,
    rows: Vec<Row<T>>,
}

struct Reduced<T> {
    residual: Vec<T>,
    /// `(row, factor)`: the input equals residual + sum of factor * row.
    factors: Vec<(usize, T)>,
}

impl<T: Scalar> Echelon<T> {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    fn reduce(&self, v: &[i64]) -> Result<Reduced<T>, Overflow> {
        assert_eq!(v.len(), self.dim, "vector length does not match");
        let mut residual: Vec<T> = v.iter().map(|&x| T::from_i64(x)).collect();
        let mut factors = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            let f = residual[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            for &c in &row.support {
                residual[c] = residual[c].sub_mul(&f, &row.values[c])?;
            }
            factors.push((j, f));
        }
        Ok(Reduced { residual, factors })
    }

    /// Returns whether `v` was independent of the rows so far.
    fn insert(&mut self, v: &[i64]) -> Result<bool, Overflow> {
        let Reduced { residual, factors } = self.reduce(v)?;
        let index = self.inserted;
        let Some(pivot) = residual.iter().position(|x| !x.is_zero()) else {
            self.inserted += 1;
            return Ok(false);
        };
        let lead = residual[pivot].clone();
        let values: Vec<T> = residual
            .iter()
            .map(|x| x.div(&lead))
            .collect::<Result<_, _>>()?;
        let support = values
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(c, _)| c)
            .collect();
        // residual = e_index - sum f_j row_j, so row = (e_index - sum f_j repr_j) / lead.
        let mut repr: BTreeMap<usize, T> = BTreeMap::new();
        repr.insert(index, T::from_i64(1));
        for (j, f) in &factors {
            for (&k, r) in &self.rows[*j].repr {
                let cur = repr.get(&k).cloned().unwrap_or_else(T::zero);
                let next = cur.sub_mul(f, r)?;
                if next.is_zero() {
                    repr.remove(&k);
                } else {
                    repr.insert(k, next);
                }
            }
        }
        for r in repr.values_mut() {
            *r = r.div(&lead)?;
        }
        self.rows.push(Row {
            pivot,
            values,
            support,
            repr,
        });
        self.inserted += 1;
        Ok(true)
    }

    fn contains(&self, v: &[i64]) -> Result<bool, Overflow> {
        Ok(self.reduce(v)?.residual.iter().all(|x| x.is_zero()))
    }

    fn represent(&self, v: &[i64]) -> Result<Option<Vec<BigRational>>, Overflow> {
        let Reduced { residual, factors } = self.reduce(v)?;
        if !residual.iter().all(|x| x.is_zero()) {
            return Ok(None);
        }
        let mut coeffs = vec![<BigRational as Zero>::zero(); self.inserted];
        for (j, f) in &factors {
            let f = f.to_big();
            for (&k, r) in &self.rows[*j].repr {
                coeffs[k] += &f * r.to_big();
            }
        }
        Ok(Some(coeffs))
    }
}

/// Incrementally built rational span of integer vectors.
#[derive(Debug)]
pub struct ExactSpan {
    dim: usize,
    inputs: Vec<Vec<i64>>,
    independent: Vec<bool>,
    small: Option<Echelon<Ratio<i64>>>,
    big: OnceLock<Echelon<BigRational>>,
}

impl Clone for ExactSpan {
    fn clone(&self) -> Self {
        let big = OnceLock::new();
        if let Some(b) = self.big.get() {
            let _ = big.set(b.clone());
        }
        Self {
            dim: self.dim,
            inputs: self.inputs.clone(),
            independent: self.independent.clone(),
            small: self.small.clone(),
            big,
        }
    }
}

impl ExactSpan {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            inputs: Vec::new(),
            independent: Vec::new(),
            small: Some(Echelon::new(dim)),
            big: OnceLock::new(),
        }
    }

    pub fn from_vectors<'a>(dim: usize, vectors: impl IntoIterator<Item = &'a [i64]>) -> Self {
        let mut s = Self::new(dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn big(&self) -> &Echelon<BigRational> {
        self.big.get_or_init(|| {
            let mut e = Echelon::new(self.dim);
            for v in &self.inputs {
                e.insert(v).expect("big rationals do not overflow");
            }
            e
        })
    }

    /// Adds `v`; returns whether it was independent of everything before it.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        self.inputs.push(v.to_vec());
        let small_result = self.small.as_mut().map(|e| e.insert(v));
        let independent = match small_result {
            Some(Ok(ind)) => {
                // A lazily built fallback no longer matches the inputs.
                self.big.take();
                ind
            }
            Some(Err(Overflow)) | None => {
                self.small = None;
                self.inputs.pop();
                let mut big = self.big.take().unwrap_or_else(|| {
                    let mut e = Echelon::new(self.dim);
                    for v in &self.inputs {
                        e.insert(v).expect("big rationals do not overflow");
                    }
                    e
                });
                self.inputs.push(v.to_vec());
                let ind = big.insert(v).expect("big rationals do not overflow");
                let _ = self.big.set(big);
                ind
            }
        };
        self.independent.push(independent);
        independent
    }

    pub fn rank(&self) -> usize {
        self.independent.iter().filter(|&&b| b).count()
    }

    /// Inserted vectors, in order.
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Input positions that were independent of their predecessors.
    pub fn pivot_inputs(&self) -> Vec<usize> {
        self.independent
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if let Some(small) = &self.small {
            if let Ok(r) = small.contains(v) {
                return r;
            }
        }
        self.big()
            .contains(v)
            .expect("big rationals do not overflow")
    }

    /// Coefficients `c` over the inserted vectors with `v = sum c_i input_i`,
    /// dependent inputs getting zero, or `None` if `v` is outside the span.
    pub fn represent(&self, v: &[i64]) -> Option<Vec<BigRational>> {
        if let Some(small) = &self.small {
            if let Ok(r) = small.represent(v) {
                return r;
            }
        }
        self.big()
            .represent(v)
            .expect("big rationals do not overflow")
    }
}

/// Exact rank of a list of integer row vectors of length `dim`.
pub fn rank(dim: usize, rows: &[Vec<i64>]) -> usize {
    ExactSpan::from_vectors(dim, rows.iter().map(Vec::as_slice)).rank()
}

/// Greedy scan in input order: keeps an index iff its vector is independent
/// of the vectors kept before it.
pub fn greedy_independent(dim: usize, rows: &[Vec<i64>]) -> Vec<usize> {
    ExactSpan::from_vectors(dim, rows.iter().map(Vec::as_slice)).pivot_inputs()
}

pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}
