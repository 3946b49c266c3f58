//! Exact rank of rational matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::modular::{certified_rank_until, rref_mod_until, PrimeStream, ZwMatrix};
use std::time::Instant;

/// Dense matrix of arbitrary-precision rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigRational::from_integer(v.into()));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Each row scaled by the lcm of its denominators, as sparse integer rows.
    pub fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let den = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, (v * &den).to_integer()))
                    .collect()
            })
            .collect()
    }

    pub fn to_zw(&self) -> ZwMatrix {
        ZwMatrix::from_int_rows(self.cols, self.integer_rows())
    }
}

fn content(row: &[(usize, BigInt)]) -> BigInt {
    row.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v))
}

/// `a * x - b * y` on sorted sparse rows, then divided by its content.
fn combine(
    a: &BigInt,
    x: &[(usize, BigInt)],
    b: &BigInt,
    y: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let v = match (x.get(i), y.get(j)) {
            (Some((cx, vx)), Some((cy, _))) if cx < cy => {
                i += 1;
                (*cx, a * vx)
            }
            (Some((cx, _)), Some((cy, vy))) if cy < cx => {
                j += 1;
                (*cy, -(b * vy))
            }
            (Some((cx, vx)), Some((_, vy))) => {
                i += 1;
                j += 1;
                (*cx, a * vx - b * vy)
            }
            (Some((cx, vx)), None) => {
                i += 1;
                (*cx, a * vx)
            }
            (None, Some((cy, vy))) => {
                j += 1;
                (*cy, -(b * vy))
            }
            (None, None) => unreachable!(),
        };
        if !v.1.is_zero() {
            out.push(v);
        }
    }
    let g = content(&out);
    if !g.is_zero() && !g.is_one() {
        for (_, v) in out.iter_mut() {
            *v /= &g;
        }
    }
    out
}

/// Fraction-free row echelon reduction over the integers. Each incoming row is
/// reduced against the current basis by cross-multiplication and then divided by
/// its content, which keeps entries small on incidence-like matrices.
pub fn integer_rank(rows: Vec<Vec<(usize, BigInt)>>) -> usize {
    let mut basis: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|(_, v)| !v.is_zero());
        row.sort_by_key(|(j, _)| *j);
        loop {
            let Some((lead, lv)) = row.first().cloned() else {
                break;
            };
            match basis.get(&lead) {
                Some(b) => {
                    let bv = &b[0].1;
                    let g = bv.gcd(&lv);
                    row = combine(&(bv / &g), &row, &(&lv / &g), b);
                }
                None => {
                    let g = content(&row);
                    if !g.is_one() {
                        for (_, v) in row.iter_mut() {
                            *v /= &g;
                        }
                    }
                    basis.insert(lead, row);
                    break;
                }
            }
        }
    }
    basis.len()
}

/// Exact rank through fraction-free integer elimination alone.
pub fn rational_rank_fraction_free(m: &RationalMatrix) -> usize {
    // eliminate along the shorter side
    if m.rows < m.cols {
        integer_rank(m.transpose().integer_rows())
    } else {
        integer_rank(m.integer_rows())
    }
}

/// Exact rank. Two random word-size primes are tried first; if both give full
/// rank the answer is proven. Otherwise the rank is certified by verified
/// kernel vectors, with plain fraction-free elimination as the last resort.
pub fn rational_rank(m: &RationalMatrix, seed: u64) -> usize {
    sparse_rank(m.to_zw(), seed)
}

/// Same as [`rational_rank`] for a sparse integer matrix.
pub fn sparse_rank(m: ZwMatrix, seed: u64) -> usize {
    sparse_rank_until(m, seed, None).expect("no deadline")
}

/// As [`sparse_rank`], giving up with `None` once `deadline` has passed.
pub fn sparse_rank_until(m: ZwMatrix, seed: u64, deadline: Option<Instant>) -> Option<usize> {
    // work on the side with fewer columns so the full-rank shortcut can apply
    let m = if m.ncols() > m.nrows() {
        transpose_zw(&m)
    } else {
        m
    };
    certified_rank_until(&m, seed, 2, deadline).map(|c| c.rank)
}

pub fn transpose_zw(m: &ZwMatrix) -> ZwMatrix {
    let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); m.ncols()];
    for (i, row) in m.rows().iter().enumerate() {
        for (j, c) in row {
            cols[*j].push((i, c[0].clone()));
        }
    }
    ZwMatrix::from_int_rows(m.nrows(), cols)
}

/// Rank over F_p of a sparse integer matrix; a one-sided bound on the rational rank.
pub fn rank_mod_prime(m: &ZwMatrix, seed: u64) -> (u64, usize) {
    rank_mod_prime_until(m, seed, None).expect("no deadline")
}

/// As [`rank_mod_prime`], giving up with `None` once `deadline` has passed.
pub fn rank_mod_prime_until(
    m: &ZwMatrix,
    seed: u64,
    deadline: Option<Instant>,
) -> Option<(u64, usize)> {
    let sp = PrimeStream::new(1, seed).next_prime();
    let r = rref_mod_until(m.reduce_mod(sp.p, 1), m.ncols(), sp.p, false, deadline)?.rank;
    Some((sp.p, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_ranks() {
        assert_eq!(rational_rank_fraction_free(&RationalMatrix::zeros(3, 4)), 0);
        let m = RationalMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rational_rank_fraction_free(&m), 2);
        assert_eq!(rational_rank(&m, 0), 2);
        let id = RationalMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(rational_rank(&id, 0), 2);
        assert_eq!(rational_rank(&RationalMatrix::zeros(2, 5), 0), 0);
    }

    #[test]
    fn rank_is_invariant_under_permutation_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..8));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let base = rational_rank_fraction_free(&RationalMatrix::from_i64_rows(&rows));
            let mut shuffled = rows.clone();
            shuffled.reverse();
            for row in shuffled.iter_mut() {
                row.rotate_left(1);
            }
            let mut scaled = RationalMatrix::from_i64_rows(&shuffled);
            let i = rng.gen_range(0..r);
            for j in 0..c {
                let v = scaled.get(i, j) * BigRational::new(3.into(), 7.into());
                scaled.set(i, j, v);
            }
            assert_eq!(rational_rank_fraction_free(&scaled), base);
            assert_eq!(rational_rank(&scaled, 5), base);
        }
    }

    #[test]
    fn accelerated_and_fraction_free_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..500 {
            let r = rng.gen_range(1..=20);
            let c = rng.gen_range(1..=20);
            // low-rank products exercise the deficient path
            let inner = rng.gen_range(1..=r.min(c).max(1));
            let a: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..inner).map(|_| rng.gen_range(-3..=3)).collect())
                .collect();
            let b: Vec<Vec<i64>> = (0..inner)
                .map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect())
                .collect();
            let rows: Vec<Vec<i64>> = if trial % 2 == 0 {
                (0..r)
                    .map(|i| {
                        (0..c)
                            .map(|j| (0..inner).map(|l| a[i][l] * b[l][j]).sum())
                            .collect()
                    })
                    .collect()
            } else {
                (0..r)
                    .map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect())
                    .collect()
            };
            let m = RationalMatrix::from_i64_rows(&rows);
            assert_eq!(
                rational_rank(&m, trial),
                rational_rank_fraction_free(&m),
                "trial {trial}"
            );
        }
    }
}
