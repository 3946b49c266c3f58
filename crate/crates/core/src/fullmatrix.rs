//! The full matrix F = I + P_yz + P_zx over ordered pairs, its row-difference
//! image M (which is the boundary matrix A), the pruned square matrix and the
//! rank implication rank F = n^2 - n => hypertree.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_seeded, Method};
use crate::boundary::{build_boundary, SignedSparseMatrix};
use crate::cyclolinalg::{sparse_rank, ZwMatrix};
use crate::error::{Error, Result};
use crate::numtheory::{binomial, PrimeModulus};
use crate::scomplex::{build_complex, check_eligible, ComplexSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntryKind {
    Xy,
    Yz,
    Zx,
}

/// F_{n,c}: rows are pairs (x, y) != (0, 0), columns are triples (x, y, z) with
/// x + y + cz = 0, both ordered lexicographically by (x, y), so the xy-part is I.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullMatrix {
    pub n: u64,
    pub c: u64,
    pub row_labels: Vec<(u64, u64)>,
    pub col_labels: Vec<(u64, u64, u64)>,
    /// Three (row, kind) entries per column.
    pub columns: Vec<[(usize, EntryKind); 3]>,
}

fn pair_index(n: u64, x: u64, y: u64) -> usize {
    // (0, 0) is skipped
    (x * n + y - 1) as usize
}

impl FullMatrix {
    pub fn dim(&self) -> usize {
        self.row_labels.len()
    }

    pub fn row_of(&self, x: u64, y: u64) -> usize {
        pair_index(self.n, x, y)
    }

    pub fn int_columns(&self) -> Vec<Vec<(usize, BigInt)>> {
        self.columns
            .iter()
            .map(|col| {
                let mut v: Vec<(usize, BigInt)> =
                    col.iter().map(|&(r, _)| (r, BigInt::from(1))).collect();
                v.sort_by_key(|(r, _)| *r);
                v
            })
            .collect()
    }

    /// Rows of F as sparse integer vectors.
    pub fn int_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows = vec![Vec::new(); self.dim()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, _) in col {
                rows[r].push((j, BigInt::from(1)));
            }
        }
        rows
    }

    /// The permutation (column -> row) of one kind of entries.
    pub fn summand(&self, kind: EntryKind) -> Vec<usize> {
        self.columns
            .iter()
            .map(|col| {
                col.iter()
                    .find(|e| e.1 == kind)
                    .expect("every kind present")
                    .0
            })
            .collect()
    }
}

pub fn build_full(n: u64, c: u64) -> Result<FullMatrix> {
    let pm = PrimeModulus::new(n)?;
    check_eligible(n, c)?;
    let neg_c_inv = pm.neg(pm.inv(c)?);
    let row_labels: Vec<(u64, u64)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .skip(1)
        .collect();
    let mut col_labels = Vec::with_capacity(row_labels.len());
    let mut columns = Vec::with_capacity(row_labels.len());
    for &(x, y) in &row_labels {
        let z = pm.mul(pm.add(x, y), neg_c_inv);
        col_labels.push((x, y, z));
        columns.push([
            (pair_index(n, x, y), EntryKind::Xy),
            (pair_index(n, y, z), EntryKind::Yz),
            (pair_index(n, z, x), EntryKind::Zx),
        ]);
    }
    Ok(FullMatrix {
        n,
        c,
        row_labels,
        col_labels,
        columns,
    })
}

/// Column pairs of F with identical support.
pub fn duplicate_column_pairs(f: &FullMatrix) -> Vec<(usize, usize)> {
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for (j, col) in f.columns.iter().enumerate() {
        let mut key: Vec<usize> = col.iter().map(|e| e.0).collect();
        key.sort_unstable();
        match seen.get(&key) {
            Some(&i) => pairs.push((i, j)),
            None => {
                seen.insert(key, j);
            }
        }
    }
    pairs
}

/// Rows R_(u,v) = rho_(u,v) - rho_(v,u) for u < v, restricted to the columns of genuine faces
/// (x < y, z different from x and y).
pub fn build_m(n: u64, c: u64) -> Result<SignedSparseMatrix> {
    let f = build_full(n, c)?;
    let row_labels: Vec<(u64, u64)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    // F row -> (M row, sign)
    let mut row_map: HashMap<usize, (usize, i8)> = HashMap::new();
    for (i, &(u, v)) in row_labels.iter().enumerate() {
        row_map.insert(f.row_of(u, v), (i, 1));
        row_map.insert(f.row_of(v, u), (i, -1));
    }
    let mut col_labels = Vec::new();
    let mut entries = Vec::new();
    for (jf, &(x, y, z)) in f.col_labels.iter().enumerate() {
        if !(x < y && z != x && z != y) {
            continue;
        }
        let j = col_labels.len();
        col_labels.push((x, y, z));
        let mut acc: HashMap<usize, i8> = HashMap::new();
        for &(r, _) in &f.columns[jf] {
            if let Some(&(i, s)) = row_map.get(&r) {
                *acc.entry(i).or_default() += s;
            }
        }
        let mut col: Vec<(usize, usize, i8)> = acc
            .into_iter()
            .filter(|e| e.1 != 0)
            .map(|(i, s)| (i, j, s))
            .collect();
        col.sort_unstable();
        entries.extend(col);
    }
    Ok(SignedSparseMatrix {
        n,
        c,
        n_rows: row_labels.len(),
        n_cols: col_labels.len(),
        entries,
        row_labels,
        col_labels,
    })
}

/// Entries sorted by (column, row), for comparing matrices built in different ways.
pub fn canonical_entries(m: &SignedSparseMatrix) -> Vec<(usize, usize, i8)> {
    let mut e: Vec<(usize, usize, i8)> = m.entries.iter().map(|&(i, j, s)| (j, i, s)).collect();
    e.sort_unstable();
    e
}

/// The (n^2 - n)-square matrix left after deleting the rows (0, k) and one column of
/// each duplicate pair, in the block layout used by the rank argument:
/// rows (x, y) for 1 <= x < y, then (y, x), then (x, x), then (x, 0);
/// columns (x, y, z) for faces with x < y, then (y, x, z), then (x, x, -2x/c),
/// then (-(c+1)x, x, x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedFull {
    pub n: u64,
    pub c: u64,
    pub row_labels: Vec<(u64, u64)>,
    pub col_labels: Vec<(u64, u64, u64)>,
    /// Sparse columns of 0/1 entries (row indices).
    pub columns: Vec<Vec<usize>>,
}

pub fn build_pruned(f: &FullMatrix) -> Result<PrunedFull> {
    let (n, c) = (f.n, f.c);
    let pm = PrimeModulus::new(n)?;
    let upper: Vec<(u64, u64)> = (1..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let mut row_labels = upper.clone();
    row_labels.extend(upper.iter().map(|&(x, y)| (y, x)));
    row_labels.extend((1..n).map(|x| (x, x)));
    row_labels.extend((1..n).map(|x| (x, 0)));

    let faces: Vec<(u64, u64, u64)> = f
        .col_labels
        .iter()
        .copied()
        .filter(|&(x, y, z)| x < y && z != x && z != y)
        .collect();
    let mut col_labels = faces.clone();
    col_labels.extend(faces.iter().map(|&(x, y, z)| (y, x, z)));
    let neg_2_over_c = pm.neg(pm.mul(2, pm.inv(c)?));
    col_labels.extend((1..n).map(|x| (x, x, pm.mul(x, neg_2_over_c))));
    let neg_c1 = pm.neg(pm.add(c, 1));
    col_labels.extend((1..n).map(|x| (pm.mul(neg_c1, x), x, x)));

    let size = (n * n - n) as usize;
    if row_labels.len() != size || col_labels.len() != size {
        return Err(Error::Dimension(format!(
            "pruned matrix is {}x{}, expected {size}",
            row_labels.len(),
            col_labels.len()
        )));
    }
    let row_pos: HashMap<(u64, u64), usize> = row_labels
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut columns = Vec::with_capacity(size);
    for &(x, y, z) in &col_labels {
        let j = f.row_of(x, y);
        if f.col_labels[j] != (x, y, z) {
            return Err(Error::Precondition(format!(
                "({x},{y},{z}) is not a column of F"
            )));
        }
        let mut col: Vec<usize> = f.columns[j]
            .iter()
            .filter_map(|&(r, _)| row_pos.get(&f.row_labels[r]).copied())
            .collect();
        col.sort_unstable();
        columns.push(col);
    }
    Ok(PrunedFull {
        n,
        c,
        row_labels,
        col_labels,
        columns,
    })
}

impl PrunedFull {
    pub fn to_zw(&self) -> ZwMatrix {
        let mut rows = vec![Vec::new(); self.row_labels.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                rows[i].push((j, BigInt::from(1)));
            }
        }
        ZwMatrix::from_int_rows(self.col_labels.len(), rows)
    }
}

/// Checks (I -I 0) F_pruned (I; 0) = A with the rows (0, k) removed.
pub fn check_f_into_a(p: &PrunedFull) -> Result<bool> {
    let (n, c) = (p.n, p.c);
    let m = binomial(n - 1, 2) as usize;
    let a = build_boundary(&build_complex(ComplexSpec::new(2, n, c)?)?)?;
    // A without star rows: rows (u, v) with u >= 1 keep their lexicographic order
    let kept: Vec<usize> = (0..a.n_rows).filter(|&i| a.row_labels[i].0 != 0).collect();
    let new_row: HashMap<usize, usize> = kept.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    if kept.len() != m || a.n_cols != m {
        return Err(Error::Dimension(
            "boundary matrix has the wrong size".into(),
        ));
    }
    if p.row_labels[..m] != kept.iter().map(|&i| a.row_labels[i]).collect::<Vec<_>>()[..]
        || p.col_labels[..m] != a.col_labels[..]
    {
        return Ok(false);
    }
    let mut lhs = vec![vec![0i64; m]; m];
    for (j, col) in p.columns.iter().take(m).enumerate() {
        for &i in col {
            if i < m {
                lhs[i][j] += 1;
            } else if i < 2 * m {
                lhs[i - m][j] -= 1;
            }
        }
    }
    let mut rhs = vec![vec![0i64; m]; m];
    for &(i, j, s) in &a.entries {
        if let Some(&k) = new_row.get(&i) {
            rhs[k][j] = s as i64;
        }
    }
    Ok(lhs == rhs)
}

/// sum_{j != k} rho_(k,j) = sum_{i != k} rho_(i,k) for every k in F_n.
pub fn check_star_dependency(f: &FullMatrix) -> bool {
    let n = f.n;
    let rows = f.int_rows();
    (0..n).all(|k| {
        let mut out = vec![0i64; f.dim()];
        let mut inc = vec![0i64; f.dim()];
        for j in (0..n).filter(|&j| j != k) {
            for (col, _) in &rows[f.row_of(k, j)] {
                out[*col] += 1;
            }
            for (col, _) in &rows[f.row_of(j, k)] {
                inc[*col] += 1;
            }
        }
        out == inc
    })
}

/// Exact rank of F.
pub fn rank_full(n: u64, c: u64) -> Result<usize> {
    rank_full_seeded(n, c, 0)
}

pub fn rank_full_seeded(n: u64, c: u64, seed: u64) -> Result<usize> {
    let f = build_full(n, c)?;
    Ok(sparse_rank(
        ZwMatrix::from_int_rows(f.dim(), f.int_rows()),
        seed,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullRankRecord {
    pub n: u64,
    pub c: u64,
    pub rank_f: usize,
    pub full: bool,
    pub hypertree: bool,
    pub implication_holds: bool,
}

/// Whether rank F = n^2 - n => hypertree holds for this (n, c).
pub fn check_full_rank_implication(n: u64, c: u64) -> Result<FullRankRecord> {
    check_full_rank_implication_seeded(n, c, 0)
}

pub fn check_full_rank_implication_seeded(n: u64, c: u64, seed: u64) -> Result<FullRankRecord> {
    let rank_f = rank_full_seeded(n, c, seed)?;
    let full = rank_f as u64 == n * n - n;
    let hypertree = classify_seeded(n, c, Method::Fast, seed)?.is_hypertree;
    Ok(FullRankRecord {
        n,
        c,
        rank_f,
        full,
        hypertree,
        implication_holds: !full || hypertree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclolinalg::{integer_rank, sparse_rank};
    use crate::numtheory::primes_in;
    use crate::scomplex::eligible_cs;

    #[test]
    fn full_matrix_structure() {
        let f = build_full(13, 5).unwrap();
        assert_eq!(f.dim(), 168);
        for kind in [EntryKind::Xy, EntryKind::Yz, EntryKind::Zx] {
            let mut p = f.summand(kind);
            if kind == EntryKind::Xy {
                assert_eq!(p, (0..168).collect::<Vec<_>>());
            }
            p.sort_unstable();
            p.dedup();
            assert_eq!(p.len(), 168, "{kind:?} is not a permutation");
        }
        // three distinct rows per column
        for col in &f.columns {
            assert!(col[0].0 != col[1].0 && col[1].0 != col[2].0 && col[0].0 != col[2].0);
        }
    }

    #[test]
    fn duplicate_columns() {
        for n in primes_in(11, 31) {
            let pm = PrimeModulus::new(n).unwrap();
            for c in eligible_cs(n) {
                let f = build_full(n, c).unwrap();
                let pairs = duplicate_column_pairs(&f);
                assert_eq!(pairs.len() as u64, n - 1);
                let neg_c1 = pm.neg(pm.add(c, 1));
                for a in 1..n {
                    let p = f
                        .col_labels
                        .iter()
                        .position(|&l| l == (a, pm.mul(neg_c1, a), a))
                        .unwrap();
                    let q = f
                        .col_labels
                        .iter()
                        .position(|&l| l == (pm.mul(neg_c1, a), a, a))
                        .unwrap();
                    assert!(pairs.contains(&(p.min(q), p.max(q))));
                }
            }
        }
    }

    #[test]
    fn m_equals_a() {
        for n in primes_in(11, 31) {
            for c in eligible_cs(n) {
                let m = build_m(n, c).unwrap();
                let a = build_boundary(&build_complex(ComplexSpec::new(2, n, c).unwrap()).unwrap())
                    .unwrap();
                assert_eq!(m.row_labels, a.row_labels);
                assert_eq!(m.col_labels, a.col_labels);
                assert_eq!(canonical_entries(&m), canonical_entries(&a), "n={n} c={c}");
            }
        }
    }

    #[test]
    fn pruned_relation_and_star_dependency() {
        for n in primes_in(11, 31) {
            for c in eligible_cs(n) {
                let f = build_full(n, c).unwrap();
                assert!(check_star_dependency(&f));
                let p = build_pruned(&f).unwrap();
                assert!(check_f_into_a(&p).unwrap(), "n={n} c={c}");
            }
        }
    }

    #[test]
    fn pruning_keeps_the_rank() {
        for (n, c) in [(11, 2), (11, 3), (13, 5), (13, 2)] {
            let f = build_full(n, c).unwrap();
            let p = build_pruned(&f).unwrap();
            let rf = integer_rank(f.int_rows());
            assert_eq!(sparse_rank(p.to_zw(), 1), rf);
            assert_eq!(rank_full(n, c).unwrap(), rf);
            assert!(rf as u64 <= n * n - n);
        }
    }

    #[test]
    fn rank_implication() {
        let r = check_full_rank_implication(13, 5).unwrap();
        assert!(!r.hypertree && r.rank_f < 156 && r.implication_holds);
        let r = check_full_rank_implication(13, 2).unwrap();
        assert!(r.implication_holds);
        for n in primes_in(11, 19) {
            for c in eligible_cs(n) {
                assert!(check_full_rank_implication(n, c).unwrap().implication_holds);
            }
        }
    }
}
