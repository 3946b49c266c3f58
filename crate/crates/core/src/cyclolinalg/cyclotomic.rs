//! The cyclotomic fields Q(w_k) = Q[x]/Psi_k(x) in the power basis, and dense
//! linear algebra over them.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numtheory::divisors;

/// Coefficients of Psi_k, lowest degree first. Monic, degree phi(k).
pub fn cyclotomic_poly(k: usize) -> Vec<i64> {
    assert!(k >= 1);
    // x^k - 1 divided by every Psi_d with d | k, d < k.
    let mut num = vec![0i64; k + 1];
    num[0] = -1;
    num[k] = 1;
    for d in divisors(k as u64) {
        let d = d as usize;
        if d == k {
            continue;
        }
        num = div_exact_monic(&num, &cyclotomic_poly_cached(d));
    }
    num
}

fn cyclotomic_poly_cached(k: usize) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&k) {
        return p.clone();
    }
    let p = cyclotomic_poly(k);
    cache.lock().unwrap().insert(k, p.clone());
    p
}

/// Exact quotient of integer polynomials; the divisor is monic.
fn div_exact_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let mut rem = num.to_vec();
    while rem.len() > 1 && rem[rem.len() - 1] == 0 {
        rem.pop();
    }
    if rem.len() <= dd {
        return vec![0];
    }
    let mut q = vec![0i64; rem.len() - dd];
    for i in (0..q.len()).rev() {
        let lead = rem[i + dd];
        q[i] = lead;
        if lead != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= lead * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&v| v == 0), "division was not exact");
    q
}

/// Q(w_k) with its defining polynomial.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    k: usize,
    psi: Vec<i64>,
}

impl CycloField {
    pub fn get(k: usize) -> Arc<CycloField> {
        static FIELDS: OnceLock<Mutex<HashMap<usize, Arc<CycloField>>>> = OnceLock::new();
        let fields = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = fields.lock().unwrap();
        guard
            .entry(k)
            .or_insert_with(|| {
                Arc::new(CycloField {
                    k,
                    psi: cyclotomic_poly_cached(k),
                })
            })
            .clone()
    }

    pub fn conductor(&self) -> usize {
        self.k
    }

    /// phi(k), the field degree.
    pub fn degree(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn psi(&self) -> &[i64] {
        &self.psi
    }

    /// Reduce a rational polynomial in x modulo Psi_k. `x^k = 1` is applied first.
    pub fn reduce(&self, poly: &[BigRational]) -> Vec<BigRational> {
        let mut folded = vec![BigRational::zero(); self.k];
        for (e, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                folded[e % self.k] += c;
            }
        }
        self.reduce_low(folded)
    }

    /// Reduction of a polynomial of any degree by long division with the monic Psi_k.
    fn reduce_low(&self, mut p: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        for i in (d..p.len()).rev() {
            if p[i].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut p[i]);
            for j in 0..d {
                let pj = self.psi[j];
                if pj != 0 {
                    p[i - d + j] -= &lead * BigInt::from(pj);
                }
            }
        }
        p.truncate(d);
        p.resize(d, BigRational::zero());
        p
    }

    /// Same as `reduce_low` over the integers; used for exact verification.
    pub fn reduce_int(&self, mut p: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree();
        for i in (d..p.len()).rev() {
            if p[i].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut p[i]);
            for j in 0..d {
                let pj = self.psi[j];
                if pj != 0 {
                    p[i - d + j] -= &lead * pj;
                }
            }
        }
        p.truncate(d);
        p.resize(d, BigInt::zero());
        p
    }
}

/// An element of Q(w_k) as phi(k) rational coordinates in the power basis.
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<CycloField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.k == other.field.k && self.coeffs == other.coeffs
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match e {
                0 => format!("{c}"),
                1 => format!("{c}*w{}", self.field.k),
                _ => format!("{c}*w{}^{e}", self.field.k),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl CycloNumber {
    pub fn zero(k: usize) -> Self {
        let field = CycloField::get(k);
        let coeffs = vec![BigRational::zero(); field.degree()];
        Self { field, coeffs }
    }

    pub fn one(k: usize) -> Self {
        Self::from_rational(k, BigRational::one())
    }

    pub fn from_rational(k: usize, q: BigRational) -> Self {
        let mut z = Self::zero(k);
        z.coeffs[0] = q;
        z
    }

    pub fn from_int(k: usize, v: i64) -> Self {
        Self::from_rational(k, BigRational::from_integer(v.into()))
    }

    /// w_k^e for any integer e.
    pub fn root_power(k: usize, e: i64) -> Self {
        let e = e.rem_euclid(k as i64) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_poly(k, &poly)
    }

    /// The image of a rational polynomial under x -> w_k.
    pub fn from_poly(k: usize, poly: &[BigRational]) -> Self {
        let field = CycloField::get(k);
        let coeffs = field.reduce(poly);
        Self { field, coeffs }
    }

    /// Coordinates already reduced (length phi(k)).
    pub fn from_coeffs(k: usize, coeffs: Vec<BigRational>) -> Self {
        let field = CycloField::get(k);
        assert_eq!(
            coeffs.len(),
            field.degree(),
            "coordinate vector has wrong length"
        );
        Self { field, coeffs }
    }

    pub fn conductor(&self) -> usize {
        self.field.k
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.field.k, other.field.k, "mixed cyclotomic conductors");
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against Psi_k.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement("inverse"));
        }
        let psi: Vec<BigRational> = self
            .field
            .psi
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        // Invariant: s * self == r (mod psi).
        let (mut r0, mut r1) = (psi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while !(r1.len() == 1 && !r1[0].is_zero()) {
            let (q, r) = divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            debug_assert!(!r1.is_empty(), "Psi_k is irreducible, gcd must be a unit");
        }
        let scale = r1[0].recip();
        let s: Vec<BigRational> = s1.into_iter().map(|c| c * &scale).collect();
        let field = self.field.clone();
        let coeffs = field.reduce_low(pad(s, field.degree()));
        Ok(Self { field, coeffs })
    }

    /// Scale so all coordinates are integers, returning (integer coords, denominator).
    pub fn to_integer_coords(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
        let coords = self
            .coeffs
            .iter()
            .map(|c| (c * &den).to_integer())
            .collect();
        (coords, den)
    }
}

fn pad(mut p: Vec<BigRational>, len: usize) -> Vec<BigRational> {
    if p.len() < len {
        p.resize(len, BigRational::zero());
    }
    p
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = pad(a.to_vec(), b.len());
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b[b.len() - 1].recip();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = &r[r.len() - 1] * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &f * bj;
        }
        q[shift] = f;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycloNumber {
            field: self.field.clone(),
            coeffs,
        }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycloNumber {
            field: self.field.clone(),
            coeffs,
        }
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        let d = self.field.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycloNumber {
            field: self.field.clone(),
            coeffs: self.field.reduce_low(prod),
        }
    }
}

/// Dense matrix over a single cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloMatrix {
    k: usize,
    rows: usize,
    cols: usize,
    entries: Vec<CycloNumber>,
}

impl CycloMatrix {
    pub fn zeros(k: usize, rows: usize, cols: usize) -> Self {
        Self {
            k,
            rows,
            cols,
            entries: vec![CycloNumber::zero(k); rows * cols],
        }
    }

    pub fn identity(k: usize, t: usize) -> Self {
        let mut m = Self::zeros(k, t, t);
        for i in 0..t {
            m.set(i, i, CycloNumber::one(k));
        }
        m
    }

    /// Rows of equal length, all in the same field.
    pub fn from_rows(rows: Vec<Vec<CycloNumber>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let k = rows
            .first()
            .and_then(|r| r.first())
            .map_or(1, CycloNumber::conductor);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for e in row {
                if e.conductor() != k {
                    return Err(Error::MixedConductor(k, e.conductor()));
                }
                entries.push(e);
            }
        }
        Ok(Self {
            k,
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn conductor(&self) -> usize {
        self.k
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNumber {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloNumber) {
        assert_eq!(v.conductor(), self.k);
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycloNumber] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Row echelon form by Gaussian elimination; the pivot is the first nonzero
    /// entry of the column. Returns (rank, determinant sign-and-product when square).
    fn eliminate(&self) -> (usize, CycloNumber) {
        let mut m: Vec<Vec<CycloNumber>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut det = CycloNumber::one(self.k);
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !m[i][col].is_zero()) else {
                det = CycloNumber::zero(self.k);
                continue;
            };
            if p != rank {
                m.swap(p, rank);
                det = -&det;
            }
            det = &det * &m[rank][col];
            let inv = m[rank][col].inv().expect("pivot is nonzero");
            let pivot_row: Vec<CycloNumber> = m[rank][col..].iter().map(|v| v * &inv).collect();
            for row in m.iter_mut().skip(rank + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (j, pv) in pivot_row.iter().enumerate() {
                    if !pv.is_zero() {
                        row[col + j] = &row[col + j] - &(&f * pv);
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        if rank < self.rows.min(self.cols) || self.rows != self.cols {
            det = CycloNumber::zero(self.k);
        }
        (rank, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn mul_matrix(&self, rhs: &CycloMatrix) -> Result<CycloMatrix> {
        if self.k != rhs.k {
            return Err(Error::MixedConductor(self.k, rhs.k));
        }
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = CycloMatrix::zeros(self.k, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = CycloNumber::zero(self.k);
                for l in 0..self.cols {
                    let (a, b) = (self.get(i, l), rhs.get(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

/// Exact determinant; the zero test is exact.
pub fn cyclo_det(m: &CycloMatrix) -> Result<CycloNumber> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    if m.rows == 0 {
        return Ok(CycloNumber::one(m.k));
    }
    Ok(m.eliminate().1)
}

/// Dimension of the right kernel, by exact elimination.
pub fn cyclo_nullity(m: &CycloMatrix) -> usize {
    m.cols - m.rank()
}

/// Whether `v * m == 0` exactly.
pub fn cyclo_left_kernel_check(v: &[CycloNumber], m: &CycloMatrix) -> Result<bool> {
    if v.len() != m.rows {
        return Err(Error::Dimension(format!(
            "vector of length {} against {} rows",
            v.len(),
            m.rows
        )));
    }
    if let Some(e) = v.iter().find(|e| e.conductor() != m.k) {
        return Err(Error::MixedConductor(m.k, e.conductor()));
    }
    for j in 0..m.cols {
        let mut acc = CycloNumber::zero(m.k);
        for (i, vi) in v.iter().enumerate() {
            let a = m.get(i, j);
            if !vi.is_zero() && !a.is_zero() {
                acc = &acc + &(vi * a);
            }
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An integer polynomial, reduced mod Psi_k.
pub fn int_coords_to_number(k: usize, coords: &[BigInt]) -> CycloNumber {
    let q: Vec<BigRational> = coords
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    CycloNumber::from_poly(k, &q)
}

/// Inverse by Gauss-Jordan elimination; fails on a singular matrix.
pub fn cyclo_inverse(m: &CycloMatrix) -> Result<CycloMatrix> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "inverse of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let t = m.rows;
    let mut a: Vec<Vec<CycloNumber>> = (0..t).map(|i| m.row(i).to_vec()).collect();
    let mut b: Vec<Vec<CycloNumber>> = (0..t)
        .map(|i| CycloMatrix::identity(m.k, t).row(i).to_vec())
        .collect();
    for col in 0..t {
        let p = (col..t)
            .find(|&i| !a[i][col].is_zero())
            .ok_or(Error::ZeroElement("inverse: the matrix is singular"))?;
        a.swap(p, col);
        b.swap(p, col);
        let inv = a[col][col].inv()?;
        for v in a[col].iter_mut().chain(b[col].iter_mut()) {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let (pa, pb) = (a[col].clone(), b[col].clone());
        for i in (0..t).filter(|&i| i != col) {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for (v, pv) in a[i].iter_mut().zip(&pa).chain(b[i].iter_mut().zip(&pb)) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
    }
    CycloMatrix::from_rows(b)
}
