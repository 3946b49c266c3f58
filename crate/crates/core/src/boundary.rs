//! The boundary matrix of X_{2,n,c} and its reduction to a matrix with
//! circulant blocks.
//!
//! Rows of S are the scaled edges l^i (1, x) for each edge leader x, and its
//! columns are the scaled faces l^k (1, y, z) with z = -(1 + y)/c in the
//! c-position, for each face leader y. Edges through 0 are spanned by the
//! others and are dropped. The faces {u, -u, 0} each meet the remaining rows
//! only in the edge {u, -u}, so those rows and columns are eliminated together.
//! Hence rank A = rank S + (n - 1)/2.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcb::{poly_to_i64, McbMatrix};
use crate::numtheory::PrimeModulus;
use crate::scomplex::{check_eligible, FaceSet};

/// A {0, +1, -1} matrix with labelled rows (oriented edges) and columns (oriented faces).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSparseMatrix {
    pub n: u64,
    pub c: u64,
    pub n_rows: usize,
    pub n_cols: usize,
    /// (row, col, sign), column-major.
    pub entries: Vec<(usize, usize, i8)>,
    /// Edges (u, v), u < v.
    pub row_labels: Vec<(u64, u64)>,
    /// Faces (x, y, z) with x < y and z in the c-position.
    pub col_labels: Vec<(u64, u64, u64)>,
}

impl SignedSparseMatrix {
    pub fn column(&self, j: usize) -> Vec<(usize, i8)> {
        self.entries
            .iter()
            .filter(|e| e.1 == j)
            .map(|e| (e.0, e.2))
            .collect()
    }

    /// Sparse integer rows.
    pub fn int_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows = vec![Vec::new(); self.n_rows];
        for &(i, j, s) in &self.entries {
            rows[i].push((j, BigInt::from(s)));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|(j, _)| *j);
        }
        rows
    }

    pub fn dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.n_cols]; self.n_rows];
        for &(i, j, s) in &self.entries {
            m[i][j] = s as i64;
        }
        m
    }
}

/// Discrete log of an element known to be nonzero.
fn lg(pm: &PrimeModulus, x: u64) -> u64 {
    pm.log(x).expect("nonzero element")
}

fn edge_index(n: u64, u: u64, v: u64) -> usize {
    // position of (u, v), u < v, in lexicographic order of all pairs
    debug_assert!(u < v && v < n);
    (u * (2 * n - u - 1) / 2 + (v - u - 1)) as usize
}

/// The signed boundary map from 2-chains to 1-chains: all C(n,2) edges by all faces.
pub fn build_boundary(fs: &FaceSet) -> Result<SignedSparseMatrix> {
    let spec = fs.spec;
    if spec.d != 2 {
        return Err(Error::Precondition(format!(
            "boundary matrix needs d = 2, got d = {}",
            spec.d
        )));
    }
    let n = spec.n;
    let row_labels: Vec<(u64, u64)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut col_labels: Vec<(u64, u64, u64)> = fs
        .faces
        .iter()
        .map(|f| {
            let p = f.plain_vertices();
            (p[0], p[1], f.c_vertex())
        })
        .collect();
    col_labels.sort_unstable();
    let mut entries = Vec::with_capacity(3 * col_labels.len());
    for (j, &(x, y, z)) in col_labels.iter().enumerate() {
        for (a, b, s) in [(x, y, 1i8), (x, z, -1), (y, z, 1)] {
            let (row, sign) = if a < b {
                (edge_index(n, a, b), s)
            } else {
                (edge_index(n, b, a), -s)
            };
            entries.push((row, j, sign));
        }
    }
    Ok(SignedSparseMatrix {
        n,
        c: spec.c,
        n_rows: row_labels.len(),
        n_cols: col_labels.len(),
        entries,
        row_labels,
        col_labels,
    })
}

/// Edge and face leaders, each ordered by discrete logarithm (face leader 0 last).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndexing {
    pub n: u64,
    pub c: u64,
    pub row_leaders: Vec<u64>,
    pub col_leaders: Vec<u64>,
}

impl BlockIndexing {
    pub fn new(pm: &PrimeModulus, c: u64) -> Result<Self> {
        let n = pm.n();
        check_eligible(n, c)?;
        if n < 5 {
            return Err(Error::ModulusTooSmall { n, min: 5 });
        }
        let smaller_log = |x: u64| lg(pm, x) <= lg(pm, pm.inv(x).unwrap());
        let mut row_leaders: Vec<u64> = (2..n - 1).filter(|&x| smaller_log(x)).collect();
        row_leaders.sort_by_key(|&x| lg(pm, x));
        let one_plus_c = pm.add(1, c);
        let excluded = [1, n - 1, pm.neg(one_plus_c), pm.neg(pm.inv(one_plus_c)?)];
        let mut col_leaders: Vec<u64> = (1..n)
            .filter(|y| !excluded.contains(y) && smaller_log(*y))
            .collect();
        col_leaders.sort_by_key(|&y| lg(pm, y));
        col_leaders.push(0);
        let expected = ((n - 3) / 2) as usize;
        for found in [row_leaders.len(), col_leaders.len()] {
            if found != expected {
                return Err(Error::LeaderCount { expected, found });
            }
        }
        Ok(Self {
            n,
            c,
            row_leaders,
            col_leaders,
        })
    }

    pub fn t(&self) -> usize {
        self.row_leaders.len()
    }

    /// z = -(1 + y)/c, the c-vertex of the face leader (1, y, z).
    pub fn z_of(&self, pm: &PrimeModulus, y: u64) -> u64 {
        pm.mul(pm.neg(pm.add(1, y)), pm.inv(self.c).unwrap())
    }
}

/// (row leader index, power of l, sign) of the oriented edge (a, b), or None for
/// edges through 0 and edges {u, -u}.
fn edge_position(
    pm: &PrimeModulus,
    leader_pos: &HashMap<u64, usize>,
    a: u64,
    b: u64,
) -> Option<(usize, usize, i8)> {
    if a == 0 || b == 0 || pm.add(a, b) == 0 {
        return None;
    }
    let ratio = pm.mul(b, pm.inv(a).unwrap());
    if let Some(&x) = leader_pos.get(&ratio) {
        // (a, b) = l^log(a) (1, x)
        return Some((x, lg(pm, a) as usize, 1));
    }
    let x = *leader_pos
        .get(&pm.inv(ratio).unwrap())
        .expect("every ratio or its inverse is a leader");
    Some((x, lg(pm, b) as usize, -1))
}

/// Reduces A to S. Every block of S must come out circulant.
pub fn reduce_to_s(a: &SignedSparseMatrix, pm: &PrimeModulus) -> Result<McbMatrix> {
    let n = pm.n();
    if a.n != n {
        return Err(Error::Dimension(format!(
            "matrix for n = {} reduced with modulus {n}",
            a.n
        )));
    }
    let idx = BlockIndexing::new(pm, a.c)?;
    let (r, t) = ((n - 1) as usize, idx.t());
    let row_pos: HashMap<u64, usize> = idx
        .row_leaders
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let col_pos: HashMap<u64, usize> = idx
        .col_leaders
        .iter()
        .enumerate()
        .map(|(i, &y)| (y, i))
        .collect();

    // rows: oriented A-edge (u, v) -> (block, offset, sign) of l^i (1, x)
    let rows: Vec<Option<(usize, usize, i8)>> = a
        .row_labels
        .iter()
        .map(|&(u, v)| edge_position(pm, &row_pos, u, v))
        .collect();
    let kept_rows = rows.iter().flatten().count();
    if kept_rows != r * t {
        return Err(Error::Dimension(format!(
            "{kept_rows} edges kept, expected {}",
            r * t
        )));
    }

    // columns: oriented A-face (x, y, z) -> (block, offset, sign) of l^k (1, y', z')
    let mut cols: Vec<Option<(usize, usize, i8)>> = Vec::with_capacity(a.n_cols);
    for &(x, y, z) in &a.col_labels {
        if z == 0 && pm.add(x, y) == 0 {
            cols.push(None);
            continue;
        }
        let mut found = None;
        for (lead, other, sign) in [(x, y, 1i8), (y, x, -1)] {
            if lead == 0 {
                continue;
            }
            let yy = pm.mul(other, pm.inv(lead).unwrap());
            if let Some(&b) = col_pos.get(&yy) {
                found = Some((b, lg(pm, lead) as usize, sign));
                break;
            }
        }
        match found {
            Some(f) => cols.push(Some(f)),
            None => {
                return Err(Error::Precondition(format!(
                    "face ({x},{y},{z}) has no leader"
                )))
            }
        }
    }
    if cols.iter().flatten().count() != r * t {
        return Err(Error::Dimension(
            "face count does not match the block grid".into(),
        ));
    }

    // entries of block (bi, bj) keyed by (i, k)
    let mut blocks: Vec<HashMap<(usize, usize), i64>> = vec![HashMap::new(); t * t];
    for &(row, col, s) in &a.entries {
        let (Some((bi, i, sr)), Some((bj, k, sc))) = (rows[row], cols[col]) else {
            continue;
        };
        blocks[bi * t + bj].insert((i, k), (s * sr * sc) as i64);
    }
    let mut s = McbMatrix::zeros(r, t)?;
    for bi in 0..t {
        for bj in 0..t {
            let entries = &blocks[bi * t + bj];
            let mut first = vec![0i64; r];
            for (&(i, k), &v) in entries {
                first[(i + r - k) % r] = v;
            }
            let support = first.iter().filter(|v| **v != 0).count();
            let circulant = entries.len() == support * r
                && entries
                    .iter()
                    .all(|(&(i, k), &v)| first[(i + r - k) % r] == v);
            if !circulant {
                return Err(Error::NotCirculant { row: bi, col: bj });
            }
            s.set_block(
                bi,
                bj,
                first
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| *v != 0)
                    .map(|(e, v)| (e, BigRational::from_integer(v.into()))),
            );
        }
    }
    Ok(s)
}

/// S built straight from the three edge terms of each face leader (1, y, z):
/// +e(1,y), -e(1,z), +e(y,z). A term whose edge passes through 0 or joins u to -u
/// is absent.
pub fn build_s_polynomial(n: u64, c: u64, pm: &PrimeModulus) -> Result<McbMatrix> {
    if pm.n() != n {
        return Err(Error::Dimension(format!(
            "modulus {} given for n = {n}",
            pm.n()
        )));
    }
    let idx = BlockIndexing::new(pm, c)?;
    let (r, t) = ((n - 1) as usize, idx.t());
    let row_pos: HashMap<u64, usize> = idx
        .row_leaders
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let mut s = McbMatrix::zeros(r, t)?;
    for (bj, &y) in idx.col_leaders.iter().enumerate() {
        let z = idx.z_of(pm, y);
        for (a, b, sign) in [(1, y, 1i64), (1, z, -1), (y, z, 1)] {
            // (a, b) = sign' * l^i (1, x): block entry sign * sign' * P^i
            if let Some((bi, i, se)) = edge_position(pm, &row_pos, a, b) {
                s.add_term(
                    bi,
                    bj,
                    i,
                    BigRational::from_integer((sign * se as i64).into()),
                );
            }
        }
    }
    Ok(s)
}

/// Convenience: S_{n,c} from the polynomial formulas.
pub fn s_matrix(n: u64, c: u64) -> Result<McbMatrix> {
    let pm = PrimeModulus::new(n)?;
    build_s_polynomial(n, c, &pm)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub row_leader: u64,
    pub col_leader: u64,
    pub poly: Vec<i64>,
}

/// The nonzero blocks of S, labelled by leaders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SBlockMap {
    pub n: u64,
    pub c: u64,
    pub blocks: Vec<BlockEntry>,
}

impl SBlockMap {
    pub fn new(s: &McbMatrix, idx: &BlockIndexing) -> Result<Self> {
        let mut blocks = Vec::new();
        for (i, &x) in idx.row_leaders.iter().enumerate() {
            for (j, &y) in idx.col_leaders.iter().enumerate() {
                if s.block(i, j).is_empty() {
                    continue;
                }
                let poly = poly_to_i64(s.block(i, j), s.r())
                    .ok_or_else(|| Error::Precondition("S has non-integer coefficients".into()))?;
                blocks.push(BlockEntry {
                    row_leader: x,
                    col_leader: y,
                    poly,
                });
            }
        }
        Ok(Self {
            n: idx.n,
            c: idx.c,
            blocks,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Precondition(format!("bad block map: {e}")))
    }

    /// Rebuilds S, checking the leaders against the canonical indexing.
    pub fn to_mcb(&self) -> Result<McbMatrix> {
        let pm = PrimeModulus::new(self.n)?;
        let idx = BlockIndexing::new(&pm, self.c)?;
        let r = (self.n - 1) as usize;
        let mut s = McbMatrix::zeros(r, idx.t())?;
        for b in &self.blocks {
            let i = idx.row_leaders.iter().position(|&x| x == b.row_leader);
            let j = idx.col_leaders.iter().position(|&y| y == b.col_leader);
            let (Some(i), Some(j)) = (i, j) else {
                return Err(Error::Precondition(format!(
                    "unknown leaders ({}, {})",
                    b.row_leader, b.col_leader
                )));
            };
            if b.poly.len() != r {
                return Err(Error::Dimension(format!(
                    "block polynomial of length {}, expected {r}",
                    b.poly.len()
                )));
            }
            s.set_block(
                i,
                j,
                b.poly
                    .iter()
                    .enumerate()
                    .map(|(e, &v)| (e, BigRational::from_integer(v.into()))),
            );
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclolinalg::{
        cyclo_left_kernel_check, integer_rank, rational_rank_fraction_free, CycloNumber,
        RationalMatrix,
    };
    use crate::mcb::{evaluate, is_singular_fast};
    use crate::numtheory::{binomial, primes_in};
    use crate::scomplex::{build_complex, eligible_cs, ComplexSpec};

    fn boundary(n: u64, c: u64) -> SignedSparseMatrix {
        build_boundary(&build_complex(ComplexSpec::new(2, n, c).unwrap()).unwrap()).unwrap()
    }

    fn p(e: usize, v: i64) -> Vec<(usize, BigRational)> {
        vec![(e, BigRational::from_integer(v.into()))]
    }

    #[test]
    fn boundary_columns() {
        let a = boundary(13, 5);
        assert_eq!((a.n_rows, a.n_cols), (78, 66));
        let j = a.col_labels.iter().position(|&f| f == (1, 4, 12)).unwrap();
        let mut col: Vec<((u64, u64), i8)> = a
            .column(j)
            .into_iter()
            .map(|(i, s)| (a.row_labels[i], s))
            .collect();
        col.sort();
        assert_eq!(col, vec![((1, 4), 1), ((1, 12), -1), ((4, 12), 1)]);
        for j in 0..a.n_cols {
            assert_eq!(a.column(j).len(), 3);
        }
    }

    #[test]
    fn boundary_has_full_column_rank_without_the_c_condition() {
        // all 2-faces of the simplex on 7 vertices: rank C(6,2)
        let n = 7u64;
        let mut rows = Vec::new();
        let edges: Vec<(u64, u64)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let faces: Vec<(u64, u64, u64)> = (0..n)
            .flat_map(|x| (x + 1..n).flat_map(move |y| (y + 1..n).map(move |z| (x, y, z))))
            .collect();
        for &(u, v) in &edges {
            rows.push(
                faces
                    .iter()
                    .map(|&(x, y, z)| match (u, v) {
                        _ if (u, v) == (x, y) => 1,
                        _ if (u, v) == (x, z) => -1,
                        _ if (u, v) == (y, z) => 1,
                        _ => 0,
                    })
                    .collect::<Vec<i64>>(),
            );
        }
        assert_eq!(
            rational_rank_fraction_free(&RationalMatrix::from_i64_rows(&rows)),
            15
        );
    }

    #[test]
    fn running_example_leaders_and_blocks() {
        let pm = PrimeModulus::new(13).unwrap();
        let idx = BlockIndexing::new(&pm, 5).unwrap();
        assert_eq!(idx.row_leaders, vec![2, 4, 8, 3, 6]);
        assert_eq!(idx.col_leaders, vec![4, 8, 3, 6, 0]);
        let s = reduce_to_s(&boundary(13, 5), &pm).unwrap();
        assert_eq!((s.r(), s.t()), (12, 5));
        let expect: [[Option<(usize, i64)>; 5]; 5] = [
            [None, None, Some((11, 1)), None, None],
            [Some((0, 1)), Some((3, 1)), None, None, None],
            [None, Some((0, 1)), None, Some((5, 1)), Some((9, 1))],
            [Some((2, 1)), None, Some((0, 1)), Some((8, 1)), None],
            [None, Some((0, -1)), Some((11, -1)), Some((0, 1)), None],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let want = e.map_or_else(Vec::new, |(x, v)| p(x, v));
                assert_eq!(s.block(i, j), &want[..], "block ({i},{j})");
            }
        }
        assert_eq!(build_s_polynomial(13, 5, &pm).unwrap(), s);
    }

    #[test]
    fn running_example_at_cube_root() {
        let s = s_matrix(13, 5).unwrap();
        let m = evaluate(&s, 3).unwrap().matrix;
        let w2 = CycloNumber::root_power(3, 2);
        let one = CycloNumber::one(3);
        let zero = CycloNumber::zero(3);
        let expect = [
            [&zero, &zero, &w2, &zero, &zero],
            [&one, &one, &zero, &zero, &zero],
            [&zero, &one, &zero, &w2, &one],
            [&w2, &zero, &one, &w2, &zero],
            [&zero, &-&one, &-&w2, &one, &zero],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert_eq!(m.get(i, j), *e, "entry ({i},{j})");
            }
        }
        let v: Vec<CycloNumber> = [1i64, 2, 3, 4, 5]
            .iter()
            .map(|&l| &one - &CycloNumber::root_power(3, l))
            .collect();
        assert!(cyclo_left_kernel_check(&v, &m).unwrap());
        // S(1) is singular too, so the smallest witness is k = 1
        let at_one = evaluate(&s, 1).unwrap().matrix;
        let u: Vec<CycloNumber> = [2i64, 1, 0, -1, 1]
            .iter()
            .map(|&x| CycloNumber::from_int(1, x))
            .collect();
        assert!(cyclo_left_kernel_check(&u, &at_one).unwrap());
        assert_eq!(is_singular_fast(&s).witness_k, Some(1));
        assert_eq!(
            crate::mcb::nullity_profile(&s, 0),
            vec![(1, 1), (2, 0), (3, 1), (4, 0), (6, 0), (12, 0)]
        );
    }

    #[test]
    fn two_constructions_agree() {
        for n in primes_in(11, 59) {
            let pm = PrimeModulus::new(n).unwrap();
            for c in eligible_cs(n) {
                let s = reduce_to_s(&boundary(n, c), &pm).unwrap();
                assert_eq!(build_s_polynomial(n, c, &pm).unwrap(), s, "n={n} c={c}");
                // unit terms: one in the column of y = 0, two or three elsewhere
                for j in 0..s.t() {
                    let terms: Vec<&(usize, BigRational)> =
                        (0..s.t()).flat_map(|i| s.block(i, j)).collect();
                    if j == s.t() - 1 {
                        assert_eq!(terms.len(), 1, "n={n} c={c}");
                    } else {
                        assert!(terms.len() == 2 || terms.len() == 3, "n={n} c={c} col {j}");
                    }
                    assert!(terms
                        .iter()
                        .all(|(_, v)| v.numer().magnitude() == &1u32.into() && v.is_integer()));
                }
            }
        }
    }

    #[test]
    fn boundary_commutes_with_scaling() {
        for n in primes_in(11, 31) {
            let pm = PrimeModulus::new(n).unwrap();
            let l = pm.generator();
            for c in eligible_cs(n) {
                let a = boundary(n, c);
                let col_of: HashMap<(u64, u64, u64), usize> = a
                    .col_labels
                    .iter()
                    .enumerate()
                    .map(|(j, &f)| (f, j))
                    .collect();
                for (j, &(x, y, z)) in a.col_labels.iter().enumerate() {
                    let (sx, sy, sz) = (pm.mul(l, x), pm.mul(l, y), pm.mul(l, z));
                    // orientation of l*(x,y,z) relative to the stored label
                    let (key, flip) = if sx < sy {
                        ((sx, sy, sz), 1i8)
                    } else {
                        ((sy, sx, sz), -1)
                    };
                    let jj = col_of[&key];
                    let mut lhs: Vec<((u64, u64), i8)> = a
                        .column(jj)
                        .into_iter()
                        .map(|(i, s)| (a.row_labels[i], s * flip))
                        .collect();
                    let mut rhs: Vec<((u64, u64), i8)> = a
                        .column(j)
                        .into_iter()
                        .map(|(i, s)| {
                            let (u, v) = a.row_labels[i];
                            let (su, sv) = (pm.mul(l, u), pm.mul(l, v));
                            if su < sv {
                                ((su, sv), s)
                            } else {
                                ((sv, su), -s)
                            }
                        })
                        .collect();
                    lhs.sort();
                    rhs.sort();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn singularity_matches_boundary_rank() {
        for n in primes_in(11, 31) {
            let pm = PrimeModulus::new(n).unwrap();
            for c in eligible_cs(n) {
                let a = boundary(n, c);
                let rank_a = integer_rank(a.int_rows());
                let s = reduce_to_s(&a, &pm).unwrap();
                let rank_s = s.r() * s.t() - crate::mcb::codimension(&s);
                assert_eq!(rank_a, rank_s + ((n - 1) / 2) as usize, "n={n} c={c}");
                let hypertree = rank_a as u64 == binomial(n - 1, 2);
                assert_eq!(is_singular_fast(&s).singular, !hypertree, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn dense_rank_of_running_example() {
        let s = s_matrix(13, 5).unwrap();
        let dense = rational_rank_fraction_free(&s.to_dense());
        assert_eq!(60 - dense, crate::mcb::codimension(&s));
    }

    #[test]
    fn json_round_trip() {
        let pm = PrimeModulus::new(13).unwrap();
        let idx = BlockIndexing::new(&pm, 5).unwrap();
        let s = build_s_polynomial(13, 5, &pm).unwrap();
        let map = SBlockMap::new(&s, &idx).unwrap();
        let json = map.to_json();
        assert!(json.starts_with(r#"{"n":13,"c":5,"blocks":[{"row_leader":2,"col_leader":3,"poly":[0,0,0,0,0,0,0,0,0,0,0,1]}"#));
        let back = SBlockMap::from_json(&json).unwrap();
        assert_eq!(back, map);
        assert_eq!(back.to_mcb().unwrap(), s);
    }

    #[test]
    fn leader_counts_hold_on_a_wide_range() {
        for n in primes_in(5, 400) {
            let pm = PrimeModulus::new(n).unwrap();
            for c in eligible_cs(n) {
                let idx = BlockIndexing::new(&pm, c).unwrap();
                assert_eq!(idx.t() as u64, (n - 3) / 2);
            }
        }
    }
}
