//! Arithmetic in the prime field F_n: orders, a canonical primitive root,
//! discrete logarithms, totients and divisor lists.

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Moduli up to this bound get a full logarithm table.
const LOG_TABLE_LIMIT: u64 = 100_000;

/// Deterministic trial division. Fine for the n <= 10^7 range used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Distinct prime factors in ascending order.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// All positive divisors of `m`, ascending.
pub fn divisors(m: u64) -> Vec<u64> {
    assert!(m >= 1, "divisors of 0 are not defined");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Euler's totient. `euler_phi(1) == 1`.
pub fn euler_phi(m: u64) -> u64 {
    assert!(m >= 1);
    prime_factors(m)
        .into_iter()
        .fold(m, |acc, p| acc / p * (p - 1))
}

/// Multiplicative order of `x` modulo the prime `n`, using the factorisation of n-1.
pub fn order_mod(x: u64, n: u64) -> Result<u64> {
    let x = x % n;
    if x == 0 {
        return Err(Error::ZeroElement("multiplicative order"));
    }
    let mut ord = n - 1;
    for p in prime_factors(n - 1) {
        while ord.is_multiple_of(p) && pow_mod(x, ord / p, n) == 1 {
            ord /= p;
        }
    }
    Ok(ord)
}

/// Smallest generator of F_n^* that is >= 2.
pub fn primitive_root(n: u64) -> Result<u64> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if n == 2 {
        return Ok(1);
    }
    let factors = prime_factors(n - 1);
    (2..n)
        .find(|&g| factors.iter().all(|&p| pow_mod(g, (n - 1) / p, n) != 1))
        .ok_or(Error::NotPrime(n))
}

#[derive(Debug, Clone)]
enum LogIndex {
    /// `table[u] = log(u)`; entry 0 unused.
    Table(Vec<u32>),
    /// Baby steps `lambda^j -> j` for j < m.
    BabyGiant {
        baby: HashMap<u64, u64>,
        m: u64,
        giant: u64,
    },
}

/// A prime n together with its canonical generator and logarithms w.r.t. it.
///
/// Immutable after construction and cheap to share between threads.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    n: u64,
    lambda: u64,
    logs: LogIndex,
}

impl PrimeModulus {
    /// Requires n prime and n >= 5.
    pub fn new(n: u64) -> Result<Self> {
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        if n < 5 {
            return Err(Error::ModulusTooSmall { n, min: 5 });
        }
        let lambda = primitive_root(n)?;
        let logs = if n <= LOG_TABLE_LIMIT {
            let mut table = vec![0u32; n as usize];
            let mut v = 1u64;
            for k in 0..n - 1 {
                table[v as usize] = k as u32;
                v = v * lambda % n;
            }
            LogIndex::Table(table)
        } else {
            let m = ((n - 1) as f64).sqrt().ceil() as u64;
            let mut baby = HashMap::with_capacity(m as usize);
            let mut v = 1u64;
            for j in 0..m {
                baby.entry(v).or_insert(j);
                v = mul_mod(v, lambda, n);
            }
            // giant step multiplier lambda^{-m}
            let giant = pow_mod(pow_mod(lambda, m, n), n - 2, n);
            LogIndex::BabyGiant { baby, m, giant }
        };
        Ok(Self { n, lambda, logs })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn generator(&self) -> u64 {
        self.lambda
    }

    /// Reduce an arbitrary signed integer into [0, n).
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.n as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.n
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.n - b % self.n) % self.n
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.n - a % self.n) % self.n
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.n)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.n)
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.n) {
            return Err(Error::ZeroElement("inverse"));
        }
        Ok(pow_mod(a, self.n - 2, self.n))
    }

    /// lambda^k for any integer k (negative exponents allowed).
    pub fn lambda_pow(&self, k: i64) -> u64 {
        pow_mod(self.lambda, k.rem_euclid(self.n as i64 - 1) as u64, self.n)
    }

    pub fn order(&self, x: u64) -> Result<u64> {
        order_mod(x, self.n)
    }

    /// The unique k in {0, ..., n-2} with lambda^k = u.
    pub fn log(&self, u: u64) -> Result<u64> {
        let u = u % self.n;
        if u == 0 {
            return Err(Error::ZeroElement("discrete logarithm"));
        }
        match &self.logs {
            LogIndex::Table(t) => Ok(t[u as usize] as u64),
            LogIndex::BabyGiant { baby, m, giant } => {
                let mut gamma = u;
                for i in 0..=*m {
                    if let Some(j) = baby.get(&gamma) {
                        return Ok((i * m + j) % (self.n - 1));
                    }
                    gamma = mul_mod(gamma, *giant, self.n);
                }
                unreachable!("lambda generates F_n^*")
            }
        }
    }

    /// o(x^j) from the gcd formula o(x)/gcd(j, o(x)).
    pub fn order_of_power(&self, x: u64, j: u64) -> Result<u64> {
        let o = self.order(x)?;
        Ok(o / j.gcd(&o))
    }

    /// All of F_n^* as `(u, log u, o(u))` in increasing log order.
    pub fn log_order_table(&self) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::with_capacity(self.n as usize - 1);
        let mut u = 1;
        for k in 0..self.n - 1 {
            let o = (self.n - 1) / k.gcd(&(self.n - 1));
            out.push((u, k, o));
            u = mul_mod(u, self.lambda, self.n);
        }
        out
    }
}

/// The three gcds that decide whether the non-acyclicity certificate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcdCriterion {
    /// gcd(log c, (n-1)/2)
    pub g_log: u64,
    /// gcd((n-1)/o(c), (n-1)/2)
    pub g_order: u64,
    /// gcd(log(-c), (n-1)/2)
    pub g_log_neg: u64,
}

impl GcdCriterion {
    pub fn equal(&self) -> bool {
        self.g_log == self.g_order && self.g_order == self.g_log_neg
    }
}

pub fn gcd_criterion(pm: &PrimeModulus, c: u64) -> Result<GcdCriterion> {
    let n = pm.n();
    let c = c % n;
    if c == 0 {
        return Err(Error::ZeroElement("gcd criterion"));
    }
    if c == 1 || c == n - 1 {
        return Err(Error::IneligibleC {
            n,
            c,
            rule: "c must not be +1 or -1",
        });
    }
    let half = (n - 1) / 2;
    let g_log = pm.log(c)?.gcd(&half);
    let g_order = ((n - 1) / pm.order(c)?).gcd(&half);
    let g_log_neg = pm.log(pm.neg(c))?.gcd(&half);
    Ok(GcdCriterion {
        g_log,
        g_order,
        g_log_neg,
    })
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p)).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
