//! Matrices with circulant blocks (MCB_{r,t}) and their singularity test.
//!
//! Block (i, j) is g_{i,j}(P), where P is the r x r cyclic shift whose first
//! column is e_1, so P^e has its first column at e_e. The dense matrix has rows
//! i*r + a and columns j*r + b, with entry coefficient e = (a - b) mod r.
//!
//! Conjugating every block by the DFT matrix F[k][l] = w^(-kl), w = exp(2 pi i / r),
//! turns P into diag(w^(-m)). After the permutation a*r + b -> b*t + a the matrix
//! is block diagonal with blocks E(w^(-m)), m = 0..r-1. Conjugate roots give
//! the same rank, so only one primitive k-th root per divisor k of r is needed.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cyclolinalg::{
    certified_rank, cyclo_inverse, cyclotomic_poly, CycloField, CycloMatrix, CycloNumber,
    RationalMatrix, ZwMatrix,
};
use crate::error::{Error, Result};
use crate::numtheory::{divisors, euler_phi};

/// A polynomial in P: sorted (exponent, nonzero coefficient) pairs with exponents below r.
pub type SparsePoly = Vec<(usize, BigRational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McbMatrix {
    r: usize,
    t: usize,
    blocks: Vec<SparsePoly>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn normalize(terms: impl IntoIterator<Item = (usize, BigRational)>, r: usize) -> SparsePoly {
    let mut dense: std::collections::BTreeMap<usize, BigRational> = Default::default();
    for (e, v) in terms {
        *dense.entry(e % r).or_insert_with(BigRational::zero) += v;
    }
    dense.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Product in Q[P]/(P^r - 1).
pub fn poly_mul_mod(
    a: &[(usize, BigRational)],
    b: &[(usize, BigRational)],
    r: usize,
) -> SparsePoly {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for (ea, va) in a {
        for (eb, vb) in b {
            terms.push((ea + eb, va * vb));
        }
    }
    normalize(terms, r)
}

impl McbMatrix {
    /// The zero matrix.
    pub fn zeros(r: usize, t: usize) -> Result<Self> {
        if r == 0 || t == 0 {
            return Err(Error::Dimension(format!(
                "MCB sizes must be positive, got r={r}, t={t}"
            )));
        }
        Ok(Self {
            r,
            t,
            blocks: vec![Vec::new(); t * t],
        })
    }

    pub fn identity(r: usize, t: usize) -> Result<Self> {
        let mut m = Self::zeros(r, t)?;
        for i in 0..t {
            m.blocks[i * t + i] = vec![(0, BigRational::one())];
        }
        Ok(m)
    }

    /// From dense coefficient vectors g[i][j] of length r.
    pub fn from_dense_blocks(r: usize, t: usize, g: &[Vec<Vec<BigRational>>]) -> Result<Self> {
        let mut m = Self::zeros(r, t)?;
        if g.len() != t || g.iter().any(|row| row.len() != t) {
            return Err(Error::Dimension(format!(
                "expected a {t}x{t} grid of blocks"
            )));
        }
        for (i, row) in g.iter().enumerate() {
            for (j, coeffs) in row.iter().enumerate() {
                if coeffs.len() != r {
                    return Err(Error::Dimension(format!(
                        "block ({i},{j}) has {} coefficients, expected {r}",
                        coeffs.len()
                    )));
                }
                m.blocks[i * t + j] = coeffs
                    .iter()
                    .cloned()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
            }
        }
        Ok(m)
    }

    /// From integer coefficient vectors g[i][j] of length r.
    pub fn from_int_blocks(r: usize, t: usize, g: &[Vec<Vec<i64>>]) -> Result<Self> {
        let q: Vec<Vec<Vec<BigRational>>> = g
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| b.iter().map(|&v| int(v)).collect())
                    .collect()
            })
            .collect();
        Self::from_dense_blocks(r, t, &q)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn block(&self, i: usize, j: usize) -> &[(usize, BigRational)] {
        &self.blocks[i * self.t + j]
    }

    pub fn block_dense(&self, i: usize, j: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.r];
        for (e, c) in self.block(i, j) {
            v[*e] = c.clone();
        }
        v
    }

    pub fn set_block(
        &mut self,
        i: usize,
        j: usize,
        terms: impl IntoIterator<Item = (usize, BigRational)>,
    ) {
        let r = self.r;
        self.blocks[i * self.t + j] = normalize(terms, r);
    }

    /// Adds v * P^e to block (i, j).
    pub fn add_term(&mut self, i: usize, j: usize, e: usize, v: BigRational) {
        let r = self.r;
        let b = &mut self.blocks[i * self.t + j];
        let old = std::mem::take(b);
        *b = normalize(old.into_iter().chain(std::iter::once((e, v))), r);
    }

    /// Number of nonzero polynomial terms over all blocks.
    pub fn term_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn dense_entry(&self, row: usize, col: usize) -> BigRational {
        let (i, a) = (row / self.r, row % self.r);
        let (j, b) = (col / self.r, col % self.r);
        let e = (a + self.r - b) % self.r;
        self.block(i, j)
            .iter()
            .find(|(x, _)| *x == e)
            .map_or_else(BigRational::zero, |(_, v)| v.clone())
    }

    /// The rt x rt expansion.
    pub fn to_dense(&self) -> RationalMatrix {
        let n = self.r * self.t;
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..self.t {
            for j in 0..self.t {
                for (e, v) in self.block(i, j) {
                    for b in 0..self.r {
                        m.set(i * self.r + (b + e) % self.r, j * self.r + b, v.clone());
                    }
                }
            }
        }
        m
    }

    /// Sparse integer rows of the dense expansion, each row scaled to integers.
    pub fn to_sparse_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let (r, t) = (self.r, self.t);
        let mut rows: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); r * t];
        for i in 0..t {
            for j in 0..t {
                for (e, v) in self.block(i, j) {
                    for b in 0..r {
                        rows[i * r + (b + e) % r].push((j * r + b, v.clone()));
                    }
                }
            }
        }
        rows.into_iter()
            .map(|mut row| {
                row.sort_by_key(|(c, _)| *c);
                let den = row
                    .iter()
                    .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
                row.into_iter()
                    .map(|(c, v)| (c, (v * &den).to_integer()))
                    .collect()
            })
            .collect()
    }

    /// Reads an MCB off a dense matrix, failing if some block is not circulant.
    pub fn from_dense(m: &RationalMatrix, r: usize, t: usize) -> Result<Self> {
        if m.nrows() != r * t || m.ncols() != r * t {
            return Err(Error::Dimension(format!(
                "{}x{} is not {r}*{t} square",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = Self::zeros(r, t)?;
        for i in 0..t {
            for j in 0..t {
                let first: Vec<BigRational> =
                    (0..r).map(|a| m.get(i * r + a, j * r).clone()).collect();
                for a in 0..r {
                    for b in 0..r {
                        if m.get(i * r + a, j * r + b) != &first[(a + r - b) % r] {
                            return Err(Error::NotCirculant { row: i, col: j });
                        }
                    }
                }
                out.set_block(i, j, first.into_iter().enumerate());
            }
        }
        Ok(out)
    }
}

/// E evaluated at a primitive k-th root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarEval {
    pub k: usize,
    pub matrix: CycloMatrix,
}

fn check_divisor(e: &McbMatrix, k: usize) -> Result<()> {
    if k == 0 || !e.r.is_multiple_of(k) {
        return Err(Error::NotADivisor { k, r: e.r });
    }
    Ok(())
}

fn eval_poly(poly: &[(usize, BigRational)], k: usize, root_exp: usize) -> CycloNumber {
    let mut folded = vec![BigRational::zero(); k];
    for (e, v) in poly {
        folded[(e * root_exp) % k] += v;
    }
    CycloNumber::from_poly(k, &folded)
}

/// E(w_k) over Q(w_k), with w_k = exp(2 pi i / k).
pub fn evaluate(e: &McbMatrix, k: usize) -> Result<ScalarEval> {
    check_divisor(e, k)?;
    Ok(ScalarEval {
        k,
        matrix: evaluate_at(e, k, 1),
    })
}

/// E(w_k^j) over Q(w_k).
pub fn evaluate_at(e: &McbMatrix, k: usize, j: usize) -> CycloMatrix {
    let mut m = CycloMatrix::zeros(k, e.t, e.t);
    for a in 0..e.t {
        for b in 0..e.t {
            let p = e.block(a, b);
            if !p.is_empty() {
                m.set(a, b, eval_poly(p, k, j % k));
            }
        }
    }
    m
}

/// E(w_k) as sparse integer coordinate rows, each row cleared of denominators.
pub fn evaluate_zw(e: &McbMatrix, k: usize) -> Result<ZwMatrix> {
    check_divisor(e, k)?;
    let field = CycloField::get(k);
    let rows = (0..e.t)
        .map(|a| {
            let den = (0..e.t)
                .flat_map(|b| e.block(a, b).iter())
                .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            (0..e.t)
                .filter_map(|b| {
                    let p = e.block(a, b);
                    if p.is_empty() {
                        return None;
                    }
                    let mut folded = vec![BigInt::zero(); k];
                    for (x, v) in p {
                        folded[x % k] += (v * &den).to_integer();
                    }
                    let coords = field.reduce_int(folded);
                    coords.iter().any(|c| !c.is_zero()).then_some((b, coords))
                })
                .collect()
        })
        .collect();
    Ok(ZwMatrix::from_coord_rows(k, e.t, rows))
}

/// Exact rank of E(w_k) over Q(w_k).
pub fn rank_at(e: &McbMatrix, k: usize, seed: u64) -> Result<usize> {
    let zw = evaluate_zw(e, k)?;
    Ok(certified_rank(&zw, seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)).rank)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularityDecision {
    pub singular: bool,
    /// Smallest divisor k of r with E(w_k) singular.
    pub witness_k: Option<usize>,
}

/// Walks the divisors of r in ascending order and stops at the first singular E(w_k).
pub fn is_singular_fast(e: &McbMatrix) -> SingularityDecision {
    is_singular_fast_seeded(e, 0)
}

pub fn is_singular_fast_seeded(e: &McbMatrix, seed: u64) -> SingularityDecision {
    for k in divisors(e.r as u64) {
        let k = k as usize;
        if rank_at(e, k, seed).expect("k divides r") < e.t {
            return SingularityDecision {
                singular: true,
                witness_k: Some(k),
            };
        }
    }
    SingularityDecision {
        singular: false,
        witness_k: None,
    }
}

/// (k, nullity of E(w_k)) for every divisor k of r, ascending. The divisors run in parallel.
pub fn nullity_profile(e: &McbMatrix, seed: u64) -> Vec<(usize, usize)> {
    let ks: Vec<usize> = divisors(e.r as u64)
        .into_iter()
        .map(|k| k as usize)
        .collect();
    ks.into_par_iter()
        .map(|k| (k, e.t - rank_at(e, k, seed).expect("k divides r")))
        .collect()
}

/// rt - rank(E) = sum over k | r of phi(k) * nullity(E(w_k)).
pub fn codimension(e: &McbMatrix) -> usize {
    codimension_seeded(e, 0)
}

pub fn codimension_seeded(e: &McbMatrix, seed: u64) -> usize {
    nullity_profile(e, seed)
        .into_iter()
        .map(|(k, null)| euler_phi(k as u64) as usize * null)
        .sum()
}

/// a*r + b -> b*t + a.
pub fn phi_permutation(r: usize, t: usize) -> Vec<usize> {
    (0..r * t).map(|i| (i % r) * t + i / r).collect()
}

/// Largest entry outside the t x t diagonal blocks after the block DFT and the
/// permutation, together with the conjugated matrix.
fn conjugate(dense: &[Vec<f64>], r: usize, t: usize) -> Vec<Vec<Complex64>> {
    let n = r * t;
    let w = |e: i64| {
        Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * (e.rem_euclid(r as i64)) as f64 / r as f64,
        )
    };
    // Y = L E L^{-1}, L = I_t (x) F, F[k][l] = w^(-kl), F^{-1}[k][l] = w^(kl) / r
    let mut y = vec![vec![Complex64::zero(); n]; n];
    for bi in 0..t {
        for bj in 0..t {
            // G = B F^{-1}
            let mut g = vec![vec![Complex64::zero(); r]; r];
            for a in 0..r {
                let row = &dense[bi * r + a];
                for l in 0..r {
                    let mut acc = Complex64::zero();
                    for b in 0..r {
                        let v = row[bj * r + b];
                        if v != 0.0 {
                            acc += w((b * l) as i64) * v;
                        }
                    }
                    g[a][l] = acc / r as f64;
                }
            }
            for kk in 0..r {
                for l in 0..r {
                    let mut acc = Complex64::zero();
                    for a in 0..r {
                        acc += w(-((kk * a) as i64)) * g[a][l];
                    }
                    y[bi * r + kk][bj * r + l] = acc;
                }
            }
        }
    }
    let perm = phi_permutation(r, t);
    let mut z = vec![vec![Complex64::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            z[perm[a]][perm[b]] = y[a][b];
        }
    }
    z
}

/// Max-norm of the part of the conjugated matrix outside the diagonal t x t blocks.
pub fn block_diagonal_defect(dense: &[Vec<f64>], r: usize, t: usize) -> f64 {
    let z = conjugate(dense, r, t);
    let mut worst = 0.0f64;
    for (a, row) in z.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if a / t != b / t {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

/// Numerically checks that the DFT conjugation is block diagonal with blocks E(w_r^(-m)).
pub fn verify_block_diagonalization(e: &McbMatrix, tol: f64) -> bool {
    let (r, t) = (e.r, e.t);
    let n = r * t;
    let dense: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| e.dense_entry(a, b).to_f64().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let z = conjugate(&dense, r, t);
    for (a, row) in z.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let expect = if a / t == b / t {
                let m = a / t;
                let root =
                    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * m as f64 / r as f64);
                e.block(a % t, b % t)
                    .iter()
                    .map(|(x, c)| root.powu(*x as u32) * c.to_f64().unwrap_or(f64::NAN))
                    .sum::<Complex64>()
            } else {
                Complex64::zero()
            };
            if !((v - expect).norm() <= tol) {
                return false;
            }
        }
    }
    true
}

pub fn mcb_multiply(a: &McbMatrix, b: &McbMatrix) -> Result<McbMatrix> {
    if (a.r, a.t) != (b.r, b.t) {
        return Err(Error::Dimension(format!(
            "MCB_{{{},{}}} times MCB_{{{},{}}}",
            a.r, a.t, b.r, b.t
        )));
    }
    let mut out = McbMatrix::zeros(a.r, a.t)?;
    for i in 0..a.t {
        for j in 0..a.t {
            let mut terms = Vec::new();
            for l in 0..a.t {
                terms.extend(poly_mul_mod(a.block(i, l), b.block(l, j), a.r));
            }
            out.set_block(i, j, terms);
        }
    }
    Ok(out)
}

/// Integer polynomials, lowest degree first.
fn int_poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut q = vec![0i64; num.len() - dd];
    for i in (0..q.len()).rev() {
        let lead = rem[i + dd];
        q[i] = lead;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= lead * d;
        }
    }
    debug_assert!(rem.iter().all(|&v| v == 0));
    q
}

/// The idempotent of Q[x]/(x^r - 1) that is 1 mod Psi_k and 0 mod the other factors.
fn idempotent(r: usize, k: usize) -> SparsePoly {
    let mut xr = vec![0i64; r + 1];
    xr[0] = -1;
    xr[r] = 1;
    let cofactor = int_poly_div_exact(&xr, &cyclotomic_poly(k));
    let q: Vec<BigRational> = cofactor.iter().map(|&v| int(v)).collect();
    let inv = CycloNumber::from_poly(k, &q)
        .inv()
        .expect("cofactor is a unit mod Psi_k");
    let a: SparsePoly = q
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let b: SparsePoly = inv
        .coeffs()
        .iter()
        .cloned()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    poly_mul_mod(&a, &b, r)
}

/// Inverse through Q[P]/(P^r - 1) = prod over k | r of Q(w_k): invert E(w_k) in each
/// field and recombine with the idempotents.
pub fn mcb_inverse(e: &McbMatrix) -> Result<McbMatrix> {
    let decision = is_singular_fast(e);
    if let Some(witness_k) = decision.witness_k {
        return Err(Error::Singular { witness_k });
    }
    let mut out = McbMatrix::zeros(e.r, e.t)?;
    for k in divisors(e.r as u64) {
        let k = k as usize;
        let inv = cyclo_inverse(&evaluate(e, k)?.matrix)?;
        let idem = idempotent(e.r, k);
        for i in 0..e.t {
            for j in 0..e.t {
                let h: SparsePoly = inv
                    .get(i, j)
                    .coeffs()
                    .iter()
                    .cloned()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                if h.is_empty() {
                    continue;
                }
                let prod = poly_mul_mod(&idem, &h, e.r);
                let old = out.block(i, j).to_vec();
                out.set_block(i, j, old.into_iter().chain(prod));
            }
        }
    }
    Ok(out)
}

/// det of the t x t matrix over Q[P]/(P^r - 1), by cofactor expansion. For small t.
pub fn polynomial_determinant(e: &McbMatrix) -> SparsePoly {
    fn rec(e: &McbMatrix, rows: &[usize], cols: &[usize]) -> SparsePoly {
        if rows.is_empty() {
            return vec![(0, BigRational::one())];
        }
        let i = rows[0];
        let mut terms = Vec::new();
        for (pos, &j) in cols.iter().enumerate() {
            let b = e.block(i, j);
            if b.is_empty() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
            let minor = rec(e, &rows[1..], &rest);
            let sign = if pos % 2 == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            terms.extend(
                poly_mul_mod(b, &minor, e.r)
                    .into_iter()
                    .map(|(x, v)| (x, v * &sign)),
            );
        }
        normalize(terms, e.r)
    }
    let idx: Vec<usize> = (0..e.t).collect();
    rec(e, &idx, &idx)
}

/// Coefficient vector of a polynomial in P with small integer entries, for display and dumps.
pub fn poly_to_i64(poly: &[(usize, BigRational)], r: usize) -> Option<Vec<i64>> {
    let mut v = vec![0i64; r];
    for (e, c) in poly {
        if !c.is_integer() {
            return None;
        }
        v[*e] = c.to_integer().to_i64()?;
    }
    Some(v)
}

/// Largest absolute coefficient, or zero for the zero matrix.
pub fn max_abs_coefficient(e: &McbMatrix) -> BigRational {
    e.blocks
        .iter()
        .flatten()
        .map(|(_, v)| v.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
