//! Golden checks on the running example X_{2,13,5}, the random MCB agreement
//! suite and verification of the frozen golden files.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{classify, classify_seeded, scan, ClassificationRecord, Method};
use crate::boundary::{s_matrix, BlockIndexing, SBlockMap};
use crate::cyclolinalg::{cyclo_left_kernel_check, rational_rank_fraction_free, CycloNumber};
use crate::error::Result;
use crate::mcb::{codimension_seeded, evaluate, is_singular_fast_seeded, McbMatrix};
use crate::numtheory::{divisors, primes_in, PrimeModulus};
use crate::report::{classification_csv, parse_classification_csv, parse_table_csv, table_csv};
use crate::scomplex::{build_complex, ComplexSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// (exponent, sign) of the single term in each nonzero block of S_{13,5}; rows are
/// the edge leaders 2, 4, 8, 3, 6 and columns the face leaders 4, 8, 3, 6, 0.
pub const RUNNING_EXAMPLE_S: [[Option<(usize, i64)>; 5]; 5] = [
    [None, None, Some((11, 1)), None, None],
    [Some((0, 1)), Some((3, 1)), None, None, None],
    [None, Some((0, 1)), None, Some((5, 1)), Some((9, 1))],
    [Some((2, 1)), None, Some((0, 1)), Some((8, 1)), None],
    [None, Some((0, -1)), Some((11, -1)), Some((0, 1)), None],
];

/// The log table of F_13 for the generator 2: u in increasing log order, and o(u).
pub const LOG_TABLE_13: [(u64, u64); 12] = [
    (1, 1),
    (2, 12),
    (4, 6),
    (8, 4),
    (3, 3),
    (6, 12),
    (12, 2),
    (11, 12),
    (9, 3),
    (5, 4),
    (10, 6),
    (7, 12),
];

fn block_is(s: &McbMatrix, i: usize, j: usize, want: Option<(usize, i64)>) -> bool {
    let want: Vec<(usize, BigRational)> = want.map_or_else(Vec::new, |(e, v)| {
        vec![(e, BigRational::from_integer(BigInt::from(v)))]
    });
    s.block(i, j) == &want[..]
}

/// The facts about X_{2,13,5} that are checked exactly.
pub fn running_example_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let fs = build_complex(ComplexSpec::new(2, 13, 5).expect("valid spec")).expect("d = 2 complex");
    out.push(Check::new(
        "X_{2,13,5} has C(12,2) = 66 faces",
        fs.len() == 66,
        format!("{} faces", fs.len()),
    ));
    let present = [[0, 1, 5], [2, 3, 12], [2, 9, 3]]
        .iter()
        .all(|f| fs.contains(f));
    out.push(Check::new(
        "faces {0,1,5}, {2,3,12}, {2,9,3} are present",
        present,
        "",
    ));
    let (d15, d14) = (
        fs.faces_containing(&[1, 5]).len(),
        fs.faces_containing(&[1, 4]).len(),
    );
    out.push(Check::new(
        "edge {1,5} lies in 3 faces and {1,4} in 2",
        d15 == 3 && d14 == 2,
        format!("{d15} and {d14}"),
    ));

    let pm = PrimeModulus::new(13).expect("13 is prime");
    let table: Vec<(u64, u64)> = pm
        .log_order_table()
        .into_iter()
        .map(|(u, _, o)| (u, o))
        .collect();
    out.push(Check::new(
        "log/order table of F_13 for generator 2",
        pm.generator() == 2 && table == LOG_TABLE_13,
        format!("{table:?}"),
    ));

    let s = s_matrix(13, 5).expect("S builds");
    out.push(Check::new(
        "S is 60x60 with 5x5 blocks of size 12",
        (s.r(), s.t()) == (12, 5),
        format!("r = {}, t = {}", s.r(), s.t()),
    ));
    let idx = BlockIndexing::new(&pm, 5).expect("leaders");
    let at = |x: u64, y: u64| {
        let i = idx
            .row_leaders
            .iter()
            .position(|&v| v == x)
            .expect("row leader");
        let j = idx
            .col_leaders
            .iter()
            .position(|&v| v == y)
            .expect("column leader");
        (i, j)
    };
    let (i, j) = at(3, 4);
    out.push(Check::new(
        "block [3,4] is P^2",
        block_is(&s, i, j, Some((2, 1))),
        "",
    ));
    // edge (1,2) has leader 2, face (1,3,7) has leader 3
    let (i, j) = at(2, 3);
    out.push(Check::new(
        "block at row (1,2), column (1,3,7) is P^11",
        block_is(&s, i, j, Some((11, 1))),
        "",
    ));
    let table_ok = (0..5).all(|i| (0..5).all(|j| block_is(&s, i, j, RUNNING_EXAMPLE_S[i][j])));
    out.push(Check::new("full 5x5 polynomial table of S", table_ok, ""));

    let m = evaluate(&s, 3).expect("3 divides 12").matrix;
    let one = CycloNumber::one(3);
    let v: Vec<CycloNumber> = idx
        .row_leaders
        .iter()
        .map(|&x| &one - &CycloNumber::root_power(3, pm.log(x).expect("nonzero") as i64))
        .collect();
    let kernel_ok =
        cyclo_left_kernel_check(&v, &m).unwrap_or(false) && v.iter().any(|c| !c.is_zero());
    out.push(Check::new(
        "v_{13,3} S(w_3) = 0 with v nonzero",
        kernel_ok,
        "",
    ));

    match classify(13, 5, Method::Fast) {
        Ok(r) => {
            out.push(Check::new(
                "classify(13,5): not a hypertree, k = 3 a certified singular divisor",
                !r.is_hypertree && kernel_ok,
                format!(
                    "codim = {}, smallest witness k = {:?}",
                    r.codim, r.witness_k
                ),
            ));
        }
        Err(e) => out.push(Check::new("classify(13,5)", false, e.to_string())),
    }
    out
}

/// A random MCB with coefficients in [-bound, bound]. Some instances are sparse and
/// some get a planted dependency so that singular cases are well represented.
pub fn random_mcb(rng: &mut ChaCha8Rng, r: usize, t: usize, bound: i64) -> McbMatrix {
    let mut g = vec![vec![vec![0i64; r]; t]; t];
    let style = rng.gen_range(0..3);
    let density = if style == 1 { 0.25 } else { 1.0 };
    for row in g.iter_mut() {
        for block in row.iter_mut() {
            for v in block.iter_mut() {
                if rng.gen_bool(density) {
                    *v = rng.gen_range(-bound..=bound);
                }
            }
        }
    }
    if style == 2 && t >= 2 {
        // block row 0 := (1 - P^s) * x with x in {-1, 0, 1}: singular at every w_k with k | s
        let divs = divisors(r as u64);
        let s = divs[rng.gen_range(0..divs.len())] as usize % r;
        for j in 0..t {
            let x: Vec<i64> = (0..r).map(|_| rng.gen_range(-1..=1)).collect();
            g[0][j] = (0..r).map(|e| x[e] - x[(e + r - s) % r]).collect();
        }
        if s == 0 {
            // 1 - P^0 = 0 would zero the whole row; copy row 1 shifted instead
            let shift = rng.gen_range(0..r);
            for j in 0..t {
                g[0][j] = (0..r).map(|e| g[1][j][(e + r - shift) % r]).collect();
            }
        }
    }
    McbMatrix::from_int_blocks(r, t, &g).expect("consistent sizes")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub instances: usize,
    pub singular: usize,
    pub decision_agree: usize,
    pub codim_agree: usize,
    pub first_mismatch: Option<String>,
}

/// Fast decision and codimension against fraction-free rank of the dense matrix.
pub fn oracle_agreement(
    instances: usize,
    max_r: usize,
    max_t: usize,
    bound: i64,
    seed: u64,
) -> Agreement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement {
        instances,
        singular: 0,
        decision_agree: 0,
        codim_agree: 0,
        first_mismatch: None,
    };
    for i in 0..instances {
        let r = rng.gen_range(1..=max_r);
        let t = rng.gen_range(1..=max_t);
        let e = random_mcb(&mut rng, r, t, bound);
        let deficiency = r * t - rational_rank_fraction_free(&e.to_dense());
        let fast = is_singular_fast_seeded(&e, seed);
        let codim = codimension_seeded(&e, seed);
        out.singular += (deficiency > 0) as usize;
        let decision_ok = fast.singular == (deficiency > 0);
        let codim_ok = codim == deficiency;
        out.decision_agree += decision_ok as usize;
        out.codim_agree += codim_ok as usize;
        if (!decision_ok || !codim_ok) && out.first_mismatch.is_none() {
            out.first_mismatch = Some(format!(
                "instance {i} (r = {r}, t = {t}): fast singular = {}, codim = {codim}, dense deficiency = {deficiency}",
                fast.singular
            ));
        }
    }
    out
}

pub const S_GOLDEN: &str = "s_13_5.json";
pub const LOG_GOLDEN: &str = "log_table_13.csv";
pub const TABLE_GOLDEN: &str = "table_11_59.csv";
pub const CLASSIFICATION_GOLDEN: &str = "classification_11_59.csv";

pub fn running_example_json() -> Result<String> {
    let pm = PrimeModulus::new(13)?;
    Ok(SBlockMap::new(&s_matrix(13, 5)?, &BlockIndexing::new(&pm, 5)?)?.to_json() + "\n")
}

pub fn log_table_csv(n: u64) -> Result<String> {
    let pm = PrimeModulus::new(n)?;
    let mut s = String::from("u,log,order\n");
    for (u, l, o) in pm.log_order_table() {
        s.push_str(&format!("{u},{l},{o}\n"));
    }
    Ok(s)
}

/// Classification by the exact oracle (cross-checked against the fast test) and the
/// matching table layout.
pub fn exact_table(min: u64, max: u64, jobs: usize) -> Result<(Vec<ClassificationRecord>, String)> {
    let records = scan(&primes_in(min, max), Method::Both, jobs)?;
    let table = table_csv(&records)?;
    Ok((records, table))
}

fn read(dir: &Path, name: &str) -> std::result::Result<String, String> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Verifies each golden file in `dir`; a failed check names the file.
pub fn golden_file_checks(dir: &Path) -> Vec<Check> {
    let mut out = Vec::new();
    let mut file_check = |name: &str, f: &dyn Fn(&str) -> std::result::Result<(), String>| {
        let path = dir.join(name).display().to_string();
        let result = read(dir, name).and_then(|text| f(&text));
        out.push(match result {
            Ok(()) => Check::new(&format!("golden file {path}"), true, ""),
            Err(e) => Check::new(&format!("golden file {path}"), false, e),
        });
    };
    file_check(S_GOLDEN, &|text| {
        let fresh = running_example_json().map_err(|e| e.to_string())?;
        let parsed = SBlockMap::from_json(text.trim()).map_err(|e| e.to_string())?;
        let rebuilt = parsed.to_mcb().map_err(|e| e.to_string())?;
        if text != fresh || rebuilt != s_matrix(13, 5).map_err(|e| e.to_string())? {
            return Err("block map differs from the S built now".into());
        }
        Ok(())
    });
    file_check(LOG_GOLDEN, &|text| {
        if text != log_table_csv(13).map_err(|e| e.to_string())? {
            return Err("log table differs".into());
        }
        Ok(())
    });
    file_check(CLASSIFICATION_GOLDEN, &|text| {
        let records = parse_classification_csv(text).map_err(|e| e.to_string())?;
        if classification_csv(&records).map_err(|e| e.to_string())? != text {
            return Err("does not round-trip".into());
        }
        let expected: usize = primes_in(11, 59).iter().map(|&n| n as usize - 4).sum();
        if records.len() != expected {
            return Err(format!("{} records, expected {expected}", records.len()));
        }
        for r in &records {
            let fresh = classify_seeded(r.n, r.c, Method::Fast, 0).map_err(|e| e.to_string())?;
            if fresh != *r {
                return Err(format!(
                    "record n={} c={} differs from the fast test",
                    r.n, r.c
                ));
            }
        }
        Ok(())
    });
    file_check(TABLE_GOLDEN, &|text| {
        let cells = parse_table_csv(text).map_err(|e| e.to_string())?;
        if !cells.get(&(13, 5)).is_some_and(|&c| c > 0) {
            return Err("cell (13, 5) is not positive".into());
        }
        let mut records = Vec::new();
        for (&(n, c), &codim) in &cells {
            let fresh = classify_seeded(n, c, Method::Fast, 0).map_err(|e| e.to_string())?;
            if fresh.codim != codim {
                return Err(format!(
                    "cell n={n} c={c} is {codim}, fast test gives {}",
                    fresh.codim
                ));
            }
            records.push(fresh);
        }
        records.sort_by_key(|r| (r.n, r.c));
        if table_csv(&records).map_err(|e| e.to_string())? != text {
            return Err("layout is not canonical".into());
        }
        Ok(())
    });
    out
}

/// Location of the golden files in the source tree.
pub fn default_golden_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}
