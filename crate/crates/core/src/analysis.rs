//! Which X_{2,n,c} are hypertrees: the order-of-c predictor, explicit kernel
//! certificates, per-(n,c) classification and the acyclic-ratio statistics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{build_boundary, build_s_polynomial, BlockIndexing};
use crate::cyclolinalg::{cyclo_left_kernel_check, sparse_rank, CycloNumber, ZwMatrix};
use crate::error::{Error, Result};
use crate::mcb::{evaluate, is_singular_fast, nullity_profile};
use crate::numtheory::{binomial, divisors, euler_phi, gcd_criterion, PrimeModulus};
use crate::scomplex::{build_complex, check_eligible, eligible_cs, ComplexSpec};

/// gcd((n-1)/o(c), (n-1)/2): every divisor k >= 2 of it gives an explicit kernel vector.
pub fn kernel_gcd(pm: &PrimeModulus, c: u64) -> Result<u64> {
    check_eligible(pm.n(), c)?;
    Ok(gcd_criterion(pm, c)?.g_order)
}

/// Non-acyclic by the order criterion: c is neither primitive nor, for n = 3 mod 4,
/// of order (n-1)/2. Equivalently gcd((n-1)/o(c), (n-1)/2) > 1.
pub fn predict_nonacyclic(n: u64, c: u64) -> Result<bool> {
    let pm = PrimeModulus::new(n)?;
    Ok(kernel_gcd(&pm, c)? > 1)
}

/// The k >= 2 for which the order criterion supplies a kernel vector of E(w_k), ascending.
pub fn valid_ks(n: u64, c: u64) -> Result<Vec<usize>> {
    let pm = PrimeModulus::new(n)?;
    let g = kernel_gcd(&pm, c)?;
    Ok(divisors(g)
        .into_iter()
        .filter(|&k| k >= 2)
        .map(|k| k as usize)
        .collect())
}

/// A left-kernel candidate for S(w_k), one coordinate per edge leader in block order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelVector {
    pub n: u64,
    pub c: u64,
    pub k: usize,
    pub leaders: Vec<u64>,
    pub coords: Vec<CycloNumber>,
}

impl KernelVector {
    /// Exact check that the vector annihilates S(w_k) from the left.
    pub fn verify(&self) -> Result<bool> {
        let pm = PrimeModulus::new(self.n)?;
        let s = build_s_polynomial(self.n, self.c, &pm)?;
        let m = evaluate(&s, self.k)?.matrix;
        cyclo_left_kernel_check(&self.coords, &m)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(CycloNumber::is_zero)
    }
}

fn base_vector(pm: &PrimeModulus, c: u64, k: usize) -> Result<KernelVector> {
    let idx = BlockIndexing::new(pm, c)?;
    let one = CycloNumber::one(k);
    let coords = idx
        .row_leaders
        .iter()
        .map(|&x| Ok(&one - &CycloNumber::root_power(k, pm.log(x)? as i64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelVector {
        n: pm.n(),
        c,
        k,
        leaders: idx.row_leaders,
        coords,
    })
}

/// v[x] = 1 - w_k^log(x). Requires k >= 2 dividing (n-1)/o(c) and (n-1)/2.
pub fn kernel_vector(n: u64, c: u64, k: usize) -> Result<KernelVector> {
    let pm = PrimeModulus::new(n)?;
    let g = kernel_gcd(&pm, c)?;
    if k < 2 || g % k as u64 != 0 {
        return Err(Error::Precondition(format!(
            "k = {k} must be at least 2 and divide gcd((n-1)/o(c), (n-1)/2) = {g}"
        )));
    }
    base_vector(&pm, c, k)
}

/// For c^2 + c - 1 = 0: the vector for k = (n-1)/2 with the coordinate of the
/// edge class of -c-1 set to zero.
pub fn golden_ratio_kernel(n: u64, c: u64) -> Result<KernelVector> {
    let pm = PrimeModulus::new(n)?;
    check_eligible(n, c)?;
    if pm.add(pm.mul(c, c), pm.sub(c, 1)) != 0 {
        return Err(Error::Precondition(format!(
            "c^2 + c - 1 is not 0 mod {n} for c = {c}"
        )));
    }
    let k = ((n - 1) / 2) as usize;
    let mut v = base_vector(&pm, c, k)?;
    let target = pm.neg(pm.add(c, 1));
    let inv = pm.inv(target)?;
    let pos = v
        .leaders
        .iter()
        .position(|&x| x == target || x == inv)
        .ok_or_else(|| Error::Precondition(format!("-c-1 = {target} is not an edge class")))?;
    v.coords[pos] = CycloNumber::zero(k);
    Ok(v)
}

/// The c with c^2 + c - 1 = 0 mod n that are eligible.
pub fn golden_ratio_cs(n: u64) -> Vec<u64> {
    eligible_cs(n)
        .into_iter()
        .filter(|&c| (c * c + c + n - 1).is_multiple_of(n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Nullities of S(w_k) over all divisors k of n - 1.
    Fast,
    /// Exact rank of the boundary matrix A.
    Exact,
    /// Both, failing on disagreement.
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Self::Fast),
            "exact" => Ok(Self::Exact),
            "both" => Ok(Self::Both),
            other => Err(Error::Precondition(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub n: u64,
    pub c: u64,
    pub o_c: u64,
    pub log_c: u64,
    pub predicted_nonacyclic: bool,
    pub fast_singular: bool,
    /// Smallest divisor k of n - 1 with S(w_k) singular; only set by the fast method.
    pub witness_k: Option<usize>,
    pub codim: usize,
    pub is_hypertree: bool,
}

/// Codimension of the column space of A, by its exact rank.
pub fn exact_codim(n: u64, c: u64, seed: u64) -> Result<usize> {
    check_eligible(n, c)?;
    let fs = build_complex(ComplexSpec::new(2, n, c)?)?;
    let a = build_boundary(&fs)?;
    let rank = sparse_rank(ZwMatrix::from_int_rows(a.n_cols, a.int_rows()), seed);
    Ok(binomial(n - 1, 2) as usize - rank)
}

/// (codim, witness) from the nullities of S(w_k).
pub fn fast_codim(n: u64, c: u64, seed: u64) -> Result<(usize, Option<usize>)> {
    let pm = PrimeModulus::new(n)?;
    let s = build_s_polynomial(n, c, &pm)?;
    let profile = nullity_profile(&s, seed);
    let witness = profile.iter().find(|(_, null)| *null > 0).map(|(k, _)| *k);
    let codim = profile
        .iter()
        .map(|&(k, null)| euler_phi(k as u64) as usize * null)
        .sum();
    Ok((codim, witness))
}

pub fn classify(n: u64, c: u64, method: Method) -> Result<ClassificationRecord> {
    classify_seeded(n, c, method, 0)
}

pub fn classify_seeded(n: u64, c: u64, method: Method, seed: u64) -> Result<ClassificationRecord> {
    let pm = PrimeModulus::new(n)?;
    check_eligible(n, c)?;
    let predicted = kernel_gcd(&pm, c)? > 1;
    let (codim, witness_k) = match method {
        Method::Fast => fast_codim(n, c, seed)?,
        Method::Exact => (exact_codim(n, c, seed)?, None),
        Method::Both => {
            let (fast, witness) = fast_codim(n, c, seed)?;
            let exact = exact_codim(n, c, seed)?;
            if fast != exact {
                return Err(Error::Disagreement(format!(
                    "n={n} c={c}: codimension {fast} via S, {exact} via A"
                )));
            }
            (fast, witness)
        }
    };
    Ok(ClassificationRecord {
        n,
        c,
        o_c: pm.order(c)?,
        log_c: pm.log(c)?,
        predicted_nonacyclic: predicted,
        fast_singular: codim > 0,
        witness_k,
        codim,
        is_hypertree: codim == 0,
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))
}

/// Classifies every eligible c for every prime in `primes`, in (n, c) order.
pub fn scan(primes: &[u64], method: Method, jobs: usize) -> Result<Vec<ClassificationRecord>> {
    for &n in primes {
        if n < 11 {
            return Err(Error::ModulusTooSmall { n, min: 11 });
        }
    }
    let tasks: Vec<(u64, u64)> = primes
        .iter()
        .flat_map(|&n| eligible_cs(n).into_iter().map(move |c| (n, c)))
        .collect();
    pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(n, c)| classify(n, c, method))
            .collect()
    })
}

/// Singular or not, by the early-exit test on S; cheaper than the full codimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub n: u64,
    pub c: u64,
    pub predicted_nonacyclic: bool,
    pub singular: bool,
    pub witness_k: Option<usize>,
}

pub fn decide(n: u64, c: u64) -> Result<Decision> {
    let pm = PrimeModulus::new(n)?;
    let predicted = kernel_gcd(&pm, c)? > 1;
    let d = is_singular_fast(&build_s_polynomial(n, c, &pm)?);
    Ok(Decision {
        n,
        c,
        predicted_nonacyclic: predicted,
        singular: d.singular,
        witness_k: d.witness_k,
    })
}

pub fn decide_all(primes: &[u64], jobs: usize) -> Result<Vec<Decision>> {
    let tasks: Vec<(u64, u64)> = primes
        .iter()
        .flat_map(|&n| eligible_cs(n).into_iter().map(move |c| (n, c)))
        .collect();
    pool(jobs)?.install(|| tasks.par_iter().map(|&(n, c)| decide(n, c)).collect())
}

/// Per-prime counts over the n - 4 eligible c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioRow {
    pub n: u64,
    /// Acyclic (hypertree) count.
    pub a_n: u64,
    /// Non-acyclic count.
    pub n_n: u64,
    /// Non-acyclic cases explained by the order criterion.
    pub e_n: u64,
}

fn ratio(a: u64, b: u64) -> Option<BigRational> {
    (b != 0).then(|| BigRational::new(BigInt::from(a), BigInt::from(b)))
}

impl RatioRow {
    /// From (predicted, hypertree) pairs for every eligible c of one prime.
    pub fn from_verdicts(n: u64, verdicts: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let (mut a_n, mut n_n, mut e_n) = (0, 0, 0);
        for (predicted, hypertree) in verdicts {
            if hypertree {
                a_n += 1;
            } else {
                n_n += 1;
            }
            e_n += predicted as u64;
        }
        Self { n, a_n, n_n, e_n }
    }

    /// A_n / (n - 4): the fraction of eligible c giving a hypertree.
    pub fn acyclic_ratio(&self) -> BigRational {
        ratio(self.a_n, self.n - 4).expect("n >= 5")
    }

    /// A_n / (n - 4 - E_n): hypertrees among the c not ruled out by the order criterion.
    pub fn conditional_acyclic_ratio(&self) -> Option<BigRational> {
        ratio(self.a_n, self.n - 4 - self.e_n)
    }

    /// N_n / E_n, undefined when E_n = 0.
    pub fn nonacyclic_ratio(&self) -> Option<BigRational> {
        ratio(self.n_n, self.e_n)
    }

    pub fn bound(&self) -> BigRational {
        ratio_bound(self.n)
    }
}

/// phi((n-1)/2) / ((n-1)/2).
pub fn ratio_bound(n: u64) -> BigRational {
    let h = (n - 1) / 2;
    BigRational::new(BigInt::from(euler_phi(h)), BigInt::from(h))
}

/// A_n / (n - 4) for one prime, classifying every eligible c by the fast test.
pub fn acyclic_ratio(n: u64) -> Result<BigRational> {
    Ok(ratio_rows(&decide_all(&[n], 1)?).remove(0).acyclic_ratio())
}

pub fn ratio_rows(decisions: &[Decision]) -> Vec<RatioRow> {
    let mut rows = Vec::new();
    for chunk in decisions.chunk_by(|a, b| a.n == b.n) {
        rows.push(RatioRow::from_verdicts(
            chunk[0].n,
            chunk.iter().map(|d| (d.predicted_nonacyclic, !d.singular)),
        ));
    }
    rows
}

pub fn ratio_rows_from_records(records: &[ClassificationRecord]) -> Vec<RatioRow> {
    let mut rows = Vec::new();
    for chunk in records.chunk_by(|a, b| a.n == b.n) {
        rows.push(RatioRow::from_verdicts(
            chunk[0].n,
            chunk
                .iter()
                .map(|r| (r.predicted_nonacyclic, r.is_hypertree)),
        ));
    }
    rows
}

/// phi(n-1) = 2 phi((n-1)/2) for n = 1 mod 4, phi(n-1) = phi((n-1)/2) for n = 3 mod 4.
pub fn totient_identity_holds(n: u64) -> bool {
    let (full, half) = (euler_phi(n - 1), euler_phi((n - 1) / 2));
    match n % 4 {
        1 => full == 2 * half,
        3 => full == half,
        _ => false,
    }
}

/// The bound as a fraction over all of F_n^*: elements of order (n-1) or, for
/// n = 3 mod 4, (n-1)/2, divided by n - 1.
pub fn bound_by_orders(n: u64) -> BigRational {
    let m = n - 1;
    let mut count = euler_phi(m);
    if n % 4 == 3 {
        count += euler_phi(m / 2);
    }
    BigRational::new(BigInt::from(count), BigInt::from(m))
}

/// Order-criterion kernel contributes phi(k) to the rational nullity, so codim >= phi(k_min).
pub fn minimum_predicted_codim(n: u64, c: u64) -> Result<usize> {
    Ok(valid_ks(n, c)?
        .first()
        .map_or(0, |&k| euler_phi(k as u64) as usize))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
