//! Certified exact rank over Q(w_k) by modular reduction.
//!
//! For a prime p = 1 (mod k) and an element g of order k in F_p, the map
//! w_k -> g is a ring homomorphism from Z[w_k] to F_p, so the rank of the
//! reduced matrix never exceeds the true rank. That gives a lower bound.
//! The matching upper bound comes from kernel vectors: the reduced row echelon
//! form is computed at every conjugate embedding for several primes, the free
//! part is interpolated back to power-basis coordinates, lifted by CRT and
//! rational reconstruction, and each lifted vector is checked exactly.
//! Only verified vectors count, so the answer never depends on luck.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use super::cyclotomic::{CycloField, CycloMatrix, CycloNumber};
use super::rational::integer_rank;
use crate::numtheory::{mul_mod, pow_mod, prime_factors};

const PRIME_LO: u64 = 1 << 30;
const PRIME_HI: u64 = 1 << 31;
/// Primes tried before giving up on lifting and eliminating exactly.
const MAX_LIFT_PRIMES: usize = 160;

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A word-size prime p = 1 (mod k) together with an element of order exactly k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPrime {
    pub p: u64,
    pub root: u64,
}

impl SplitPrime {
    /// The images of w_k under the phi(k) embeddings: root^e with gcd(e, k) = 1.
    pub fn embeddings(&self, k: usize) -> Vec<u64> {
        (1..=k)
            .filter(|&e| e.gcd(&k) == 1)
            .map(|e| pow_mod(self.root, e as u64, self.p))
            .collect()
    }
}

/// Random distinct primes in [2^30, 2^31) that split completely in Q(w_k).
pub struct PrimeStream {
    k: u64,
    rng: ChaCha8Rng,
    used: Vec<u64>,
}

impl PrimeStream {
    pub fn new(k: usize, seed: u64) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Self {
            k: k as u64,
            rng,
            used: Vec::new(),
        }
    }

    pub fn next_prime(&mut self) -> SplitPrime {
        let k = self.k;
        let lo = PRIME_LO.div_ceil(k);
        let hi = (PRIME_HI - 1) / k;
        loop {
            let m = self.rng.gen_range(lo..hi);
            let p = m * k + 1;
            if !(PRIME_LO..PRIME_HI).contains(&p) || self.used.contains(&p) || !is_prime_u64(p) {
                continue;
            }
            self.used.push(p);
            let root = self.root_of_order(p);
            return SplitPrime { p, root };
        }
    }

    fn root_of_order(&mut self, p: u64) -> u64 {
        let k = self.k;
        let factors = prime_factors(k);
        loop {
            let a = self.rng.gen_range(2..p - 1);
            let g = pow_mod(a, (p - 1) / k, p);
            if factors.iter().all(|&q| pow_mod(g, k / q, p) != 1) {
                return g;
            }
        }
    }
}

/// A sparse matrix over Z[w_k]; every entry is a coordinate vector of length phi(k).
#[derive(Debug, Clone)]
pub struct ZwMatrix {
    k: usize,
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, Vec<BigInt>)>>,
}

impl ZwMatrix {
    /// An integer matrix (k = 1) from sparse rows.
    pub fn from_int_rows(ncols: usize, rows: Vec<Vec<(usize, BigInt)>>) -> Self {
        let nrows = rows.len();
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, vec![v]))
                    .collect()
            })
            .collect();
        Self {
            k: 1,
            nrows,
            ncols,
            rows,
        }
    }

    /// Clears denominators row by row; the rank is unchanged.
    pub fn from_cyclo(m: &CycloMatrix) -> Self {
        let k = m.conductor();
        let mut rows = Vec::with_capacity(m.nrows());
        for i in 0..m.nrows() {
            let row = m.row(i);
            let den = row
                .iter()
                .flat_map(|e| e.coeffs())
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let sparse = row
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(j, e)| {
                    (
                        j,
                        e.coeffs().iter().map(|c| (c * &den).to_integer()).collect(),
                    )
                })
                .collect();
            rows.push(sparse);
        }
        Self {
            k,
            nrows: m.nrows(),
            ncols: m.ncols(),
            rows,
        }
    }

    /// Entries given as coordinate vectors already reduced mod Psi_k.
    pub fn from_coord_rows(k: usize, ncols: usize, rows: Vec<Vec<(usize, Vec<BigInt>)>>) -> Self {
        let phi = CycloField::get(k).degree();
        debug_assert!(rows.iter().flatten().all(|(_, c)| c.len() == phi));
        Self {
            k,
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    pub fn conductor(&self) -> usize {
        self.k
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<(usize, Vec<BigInt>)>] {
        &self.rows
    }

    fn to_cyclo(&self) -> CycloMatrix {
        let mut m = CycloMatrix::zeros(self.k, self.nrows, self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, c) in row {
                let q = c
                    .iter()
                    .map(|v| BigRational::from_integer(v.clone()))
                    .collect();
                m.set(i, *j, CycloNumber::from_coeffs(self.k, q));
            }
        }
        m
    }

    /// Dense reduction at one embedding w_k -> x (mod p).
    pub fn reduce_mod(&self, p: u64, x: u64) -> Vec<Vec<u32>> {
        let phi = self
            .rows
            .iter()
            .flatten()
            .map(|(_, c)| c.len())
            .next()
            .unwrap_or(1);
        let mut xpow = vec![1u64; phi];
        for e in 1..phi {
            xpow[e] = mul_mod(xpow[e - 1], x, p);
        }
        let pb = BigInt::from(p);
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0u32; self.ncols];
                for (j, coords) in row {
                    let mut acc = 0u64;
                    for (e, c) in coords.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let cm = small_mod(c, p, &pb);
                        acc = (acc + mul_mod(cm, xpow[e], p)) % p;
                    }
                    dense[*j] = acc as u32;
                }
                dense
            })
            .collect()
    }
}

fn small_mod(c: &BigInt, p: u64, pb: &BigInt) -> u64 {
    if let Some(v) = c.to_i64() {
        v.rem_euclid(p as i64) as u64
    } else {
        c.mod_floor(pb).to_u64().expect("reduced below p")
    }
}

/// Reduced row echelon form over F_p.
#[derive(Debug, Clone)]
pub struct RrefMod {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// The first `rank` rows are the nonzero rows of the echelon form.
    pub rows: Vec<Vec<u32>>,
}

/// Gaussian elimination mod p. With `full` set, entries above pivots are cleared too.
pub fn rref_mod(m: Vec<Vec<u32>>, ncols: usize, p: u64, full: bool) -> RrefMod {
    rref_mod_until(m, ncols, p, full, None).expect("no deadline")
}

/// As [`rref_mod`], giving up with `None` once `deadline` has passed.
pub fn rref_mod_until(
    mut m: Vec<Vec<u32>>,
    ncols: usize,
    p: u64,
    full: bool,
    deadline: Option<Instant>,
) -> Option<RrefMod> {
    let nrows = m.len();
    let mut rank = 0;
    let mut pivots = Vec::new();
    let mut nz: Vec<usize> = Vec::with_capacity(ncols);
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let Some(r) = (rank..nrows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, rank);
        let inv = pow_mod(m[rank][col] as u64, p - 2, p);
        nz.clear();
        {
            let prow = &mut m[rank];
            for j in col..ncols {
                if prow[j] != 0 {
                    prow[j] = mul_mod(prow[j] as u64, inv, p) as u32;
                    nz.push(j);
                }
            }
        }
        let (above, rest) = m.split_at_mut(rank);
        let (prow, below) = rest.split_first_mut().unwrap();
        let eliminate = |row: &mut Vec<u32>| {
            let f = row[col] as u64;
            if f == 0 {
                return;
            }
            let nf = p - f;
            for &j in &nz {
                row[j] = ((row[j] as u64 + nf * prow[j] as u64) % p) as u32;
            }
        };
        below.iter_mut().for_each(eliminate);
        if full {
            above.iter_mut().for_each(eliminate);
        }
        pivots.push(col);
        rank += 1;
    }
    Some(RrefMod {
        rank,
        pivots,
        rows: m,
    })
}

pub fn rank_mod(m: &ZwMatrix, sp: SplitPrime) -> usize {
    rref_mod(m.reduce_mod(sp.p, sp.root), m.ncols, sp.p, false).rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Full rank mod p, which is already a proof.
    ModularFullRank,
    /// Modular lower bound plus exactly verified kernel vectors.
    LiftedKernel { primes: usize },
    /// Plain exact elimination after lifting did not converge.
    ExactElimination,
}

/// Exact rank with the right-kernel basis that certifies it.
#[derive(Debug, Clone)]
pub struct CertifiedRank {
    pub rank: usize,
    /// One vector per free column, each a list of phi(k) rational coordinates per entry.
    pub kernel: Vec<Vec<Vec<BigRational>>>,
    pub method: RankMethod,
}

impl CertifiedRank {
    pub fn nullity(&self, ncols: usize) -> usize {
        ncols - self.rank
    }
}

/// Incrementally combined residues for one rational coordinate.
#[derive(Clone)]
struct Crt {
    residue: BigInt,
}

fn crt_step(acc: &mut Crt, modulus: &BigInt, r: u64, p: u64) {
    // residue' = residue + modulus * ((r - residue) * modulus^{-1} mod p)
    let pb = BigInt::from(p);
    let cur = small_mod(&acc.residue, p, &pb);
    let m_mod = small_mod(modulus, p, &pb);
    let minv = pow_mod(m_mod, p - 2, p);
    let t = mul_mod((r + p - cur) % p, minv, p);
    acc.residue += modulus * BigInt::from(t);
}

/// Finds a/b = r (mod m) with |a|, b below sqrt(m/2).
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Interpolation matrix: coefficients = vinv * values over the embedding points.
fn inverse_vandermonde(points: &[u64], p: u64) -> Vec<Vec<u64>> {
    let n = points.len();
    let mut aug: Vec<Vec<u32>> = points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row = vec![0u32; 2 * n];
            let mut v = 1u64;
            for slot in row.iter_mut().take(n) {
                *slot = v as u32;
                v = mul_mod(v, x, p);
            }
            row[n + i] = 1;
            row
        })
        .collect();
    aug = rref_mod(aug, 2 * n, p, true).rows;
    aug.into_iter()
        .map(|row| row[n..].iter().map(|&v| v as u64).collect())
        .collect()
}

/// Exact check that `m * v == 0` for a vector with rational coordinates.
fn verify_kernel_vector(m: &ZwMatrix, v: &[Option<Vec<BigRational>>]) -> bool {
    let field = CycloField::get(m.k);
    let den = v
        .iter()
        .flatten()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let w: Vec<Option<Vec<BigInt>>> = v
        .iter()
        .map(|e| {
            e.as_ref()
                .map(|cs| cs.iter().map(|c| (c * &den).to_integer()).collect())
        })
        .collect();
    let phi = field.degree();
    for row in &m.rows {
        let mut acc = vec![BigInt::zero(); 2 * phi - 1];
        for (j, a) in row {
            let Some(b) = &w[*j] else { continue };
            for (e1, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (e2, y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        acc[e1 + e2] += x * y;
                    }
                }
            }
        }
        if field
            .reduce_int(acc)
            .iter()
            .any(|c| c.sign() != Sign::NoSign)
        {
            return false;
        }
    }
    true
}

/// Rank over Q(w_k), proven either by a full-rank reduction or by verified kernel vectors.
pub fn certified_rank(m: &ZwMatrix, seed: u64) -> CertifiedRank {
    certified_rank_with(m, seed, 1)
}

/// As [`certified_rank`], requiring `min_primes` agreeing full-rank reductions before
/// accepting the modular answer.
pub fn certified_rank_with(m: &ZwMatrix, seed: u64, min_primes: usize) -> CertifiedRank {
    certified_rank_until(m, seed, min_primes, None).expect("no deadline")
}

/// As [`certified_rank_with`], giving up with `None` once `deadline` has passed.
pub fn certified_rank_until(
    m: &ZwMatrix,
    seed: u64,
    min_primes: usize,
    deadline: Option<Instant>,
) -> Option<CertifiedRank> {
    let k = m.k;
    let ncols = m.ncols;
    if ncols == 0 {
        return Some(CertifiedRank {
            rank: 0,
            kernel: Vec::new(),
            method: RankMethod::ModularFullRank,
        });
    }
    let mut stream = PrimeStream::new(k, seed);
    let phi = CycloField::get(k).degree();

    // Best (rank, pivots) seen so far; only primes that reproduce it are used.
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut full_rank_hits = 0;
    let mut modulus = BigInt::one();
    let mut lifts: Vec<Crt> = Vec::new();
    let mut used = 0usize;

    for _ in 0..MAX_LIFT_PRIMES {
        let sp = stream.next_prime();
        let points = sp.embeddings(k);
        let first = rref_mod_until(m.reduce_mod(sp.p, points[0]), ncols, sp.p, true, deadline)?;
        if first.rank == ncols {
            full_rank_hits += 1;
            if full_rank_hits >= min_primes {
                return Some(CertifiedRank {
                    rank: ncols,
                    kernel: Vec::new(),
                    method: RankMethod::ModularFullRank,
                });
            }
            continue;
        }
        let key = (first.rank, first.pivots.clone());
        match &best {
            Some((r, piv)) if (first.rank, &first.pivots) != (*r, piv) => {
                let better = first.rank > *r || (first.rank == *r && first.pivots < *piv);
                if !better {
                    continue;
                }
            }
            _ => {}
        }
        let mut forms = vec![first];
        let mut consistent = true;
        for &x in &points[1..] {
            let f = rref_mod_until(m.reduce_mod(sp.p, x), ncols, sp.p, true, deadline)?;
            if (f.rank, &f.pivots) != (key.0, &key.1) {
                consistent = false;
                break;
            }
            forms.push(f);
        }
        if !consistent {
            continue;
        }
        if best.as_ref() != Some(&key) {
            best = Some(key.clone());
            modulus = BigInt::one();
            lifts.clear();
            used = 0;
        }
        let (rank, pivots) = key;
        let free: Vec<usize> = (0..ncols)
            .filter(|c| pivots.binary_search(c).is_err())
            .collect();
        let vinv = inverse_vandermonde(&points, sp.p);
        // coordinate layout: ((free index * rank) + pivot row) * phi + e
        let mut residues = Vec::with_capacity(free.len() * rank * phi);
        for &f in &free {
            for i in 0..rank {
                for row in vinv.iter() {
                    let mut acc = 0u64;
                    for (form, &coef) in forms.iter().zip(row) {
                        acc = (acc + mul_mod(form.rows[i][f] as u64, coef, sp.p)) % sp.p;
                    }
                    residues.push(acc);
                }
            }
        }
        if lifts.is_empty() {
            lifts = residues
                .iter()
                .map(|&r| Crt {
                    residue: BigInt::from(r),
                })
                .collect();
        } else {
            for (acc, &r) in lifts.iter_mut().zip(&residues) {
                crt_step(acc, &modulus, r, sp.p);
            }
        }
        modulus *= BigInt::from(sp.p);
        used += 1;

        if let Some(kernel) = try_lift(m, &lifts, &modulus, &free, &pivots, phi) {
            return Some(CertifiedRank {
                rank,
                kernel,
                method: RankMethod::LiftedKernel { primes: used },
            });
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
    }
    Some(exact_fallback(m))
}

fn try_lift(
    m: &ZwMatrix,
    lifts: &[Crt],
    modulus: &BigInt,
    free: &[usize],
    pivots: &[usize],
    phi: usize,
) -> Option<Vec<Vec<Vec<BigRational>>>> {
    let rank = pivots.len();
    let mut kernel = Vec::with_capacity(free.len());
    for (fi, &f) in free.iter().enumerate() {
        let mut v: Vec<Option<Vec<BigRational>>> = vec![None; m.ncols];
        let mut unit = vec![BigRational::zero(); phi];
        unit[0] = BigRational::one();
        v[f] = Some(unit);
        for (i, &pc) in pivots.iter().enumerate() {
            let base = (fi * rank + i) * phi;
            let mut coords = Vec::with_capacity(phi);
            for acc in &lifts[base..base + phi] {
                coords.push(-rational_reconstruct(&acc.residue, modulus)?);
            }
            if coords.iter().any(|c| !c.is_zero()) {
                v[pc] = Some(coords);
            }
        }
        if !verify_kernel_vector(m, &v) {
            return None;
        }
        kernel.push(
            v.into_iter()
                .map(|e| e.unwrap_or_else(|| vec![BigRational::zero(); phi]))
                .collect(),
        );
    }
    Some(kernel)
}

fn exact_fallback(m: &ZwMatrix) -> CertifiedRank {
    let rank = if m.k == 1 {
        let rows: Vec<Vec<(usize, BigInt)>> = m
            .rows
            .iter()
            .map(|r| r.iter().map(|(j, c)| (*j, c[0].clone())).collect())
            .collect();
        integer_rank(rows)
    } else {
        m.to_cyclo().rank()
    };
    CertifiedRank {
        rank,
        kernel: Vec::new(),
        method: RankMethod::ExactElimination,
    }
}
