//! The complexes X_{d,n,c}, their face counts, cofacet degrees and the
//! orbits of 2-faces under scaling by F_n^*.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, PrimeModulus};

/// Parameters (d, n, c) of X_{d,n,c}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComplexSpec {
    pub d: usize,
    pub n: u64,
    pub c: u64,
}

impl ComplexSpec {
    /// Any c in F_n is accepted; n must be a prime with n >= d + 3.
    pub fn new(d: usize, n: u64, c: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        if n < d as u64 + 3 {
            return Err(Error::ModulusTooSmall {
                n,
                min: d as u64 + 3,
            });
        }
        if c >= n {
            return Err(Error::IneligibleC {
                n,
                c,
                rule: "c must lie in 0..n",
            });
        }
        Ok(Self { d, n, c })
    }

    /// A spec for the two-dimensional pipeline, where c must avoid 0, 1, -1 and -2.
    pub fn eligible(n: u64, c: u64) -> Result<Self> {
        let spec = Self::new(2, n, c)?;
        check_eligible(n, c)?;
        Ok(spec)
    }
}

/// The exclusion rules for the d = 2 pipeline, reported by name.
pub fn check_eligible(n: u64, c: u64) -> Result<()> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    let rule = if c >= n {
        "c must lie in 0..n"
    } else if c == 0 {
        "c = 0 is excluded"
    } else if c == 1 {
        "c = 1 is excluded"
    } else if c == n - 1 {
        "c = -1 is excluded"
    } else if c == n - 2 {
        "c = -2 is excluded"
    } else {
        return Ok(());
    };
    Err(Error::IneligibleC { n, c, rule })
}

/// The eligible c values for prime n: F_n minus {0, 1, -1, -2}.
pub fn eligible_cs(n: u64) -> Vec<u64> {
    (2..n.saturating_sub(2)).collect()
}

/// A d-face: sorted distinct vertices plus the index of the vertex multiplied by c.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedFace {
    pub vertices: Vec<u64>,
    pub c_position: usize,
}

impl OrientedFace {
    pub fn c_vertex(&self) -> u64 {
        self.vertices[self.c_position]
    }

    /// The vertices that are not in the c-position, ascending.
    pub fn plain_vertices(&self) -> Vec<u64> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.c_position)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// All d-faces of X_{d,n,c}.
#[derive(Debug, Clone)]
pub struct FaceSet {
    pub spec: ComplexSpec,
    pub faces: Vec<OrientedFace>,
    index: HashMap<Vec<u64>, usize>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Position of the face on the given vertex set, in any order.
    pub fn position(&self, vertices: &[u64]) -> Option<usize> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    pub fn contains(&self, vertices: &[u64]) -> bool {
        self.position(vertices).is_some()
    }

    /// Faces containing the (d-1)-simplex `sigma`.
    pub fn faces_containing(&self, sigma: &[u64]) -> Vec<&OrientedFace> {
        self.faces
            .iter()
            .filter(|f| sigma.iter().all(|v| f.vertices.contains(v)))
            .collect()
    }
}

fn weighted_sum(vertices: &[u64], c_pos: usize, c: u64, n: u64) -> u64 {
    vertices.iter().enumerate().fold(0u64, |acc, (i, &v)| {
        (acc + if i == c_pos { c * v % n } else { v }) % n
    })
}

/// Calls `f` on every `size`-subset of 0..n in lexicographic order.
fn for_each_subset(n: u64, size: usize, mut f: impl FnMut(&[u64])) {
    if size as u64 > n {
        return;
    }
    let mut cur: Vec<u64> = (0..size as u64).collect();
    loop {
        f(&cur);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < n - (size - i) as u64 {
                break;
            }
            if i == 0 {
                return;
            }
        }
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Enumerates X_{d,n,c}.
///
/// For c != 0 every d-subset S determines the c-vertex y = -sum(S)/c, kept when
/// y is not in S. For c = 0 the d-subsets with zero sum are extended by every
/// other vertex.
pub fn build_complex(spec: ComplexSpec) -> Result<FaceSet> {
    let ComplexSpec { d, n, c } = ComplexSpec::new(spec.d, spec.n, spec.c)?;
    let mut faces = Vec::new();
    let mut index = HashMap::new();
    let mut push = |set: &[u64], y: u64| {
        let mut vertices = set.to_vec();
        vertices.push(y);
        vertices.sort_unstable();
        if index.contains_key(&vertices) {
            return;
        }
        let c_position = vertices.iter().position(|&v| v == y).unwrap();
        index.insert(vertices.clone(), faces.len());
        faces.push(OrientedFace {
            vertices,
            c_position,
        });
    };
    if c == 0 {
        for_each_subset(n, d, |set| {
            if set.iter().sum::<u64>() % n == 0 {
                for y in (0..n).filter(|y| !set.contains(y)) {
                    push(set, y);
                }
            }
        });
    } else {
        let pm = PrimeModulus::new(n)?;
        let neg_c_inv = pm.neg(pm.inv(c)?);
        for_each_subset(n, d, |set| {
            let s = set.iter().sum::<u64>() % n;
            let y = pm.mul(s, neg_c_inv);
            if !set.contains(&y) {
                push(set, y);
            }
        });
    }
    faces.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    index = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.vertices.clone(), i))
        .collect();
    debug_assert!(faces
        .iter()
        .all(|f| weighted_sum(&f.vertices, f.c_position, c, n) == 0));
    Ok(FaceSet {
        spec: ComplexSpec { d, n, c },
        faces,
        index,
    })
}

/// Number of d-faces, by enumeration.
pub fn count_faces(spec: ComplexSpec) -> Result<usize> {
    Ok(build_complex(spec)?.len())
}

/// All positions at which c may sit for this vertex set; a single one when c is not 0 or 1.
pub fn c_positions(vertices: &[u64], c: u64, n: u64) -> Vec<usize> {
    (0..vertices.len())
        .filter(|&i| weighted_sum(vertices, i, c, n) == 0)
        .collect()
}

/// Number of d-faces on each (d-1)-simplex that lies in some face.
pub fn cofacet_degrees(fs: &FaceSet) -> HashMap<Vec<u64>, usize> {
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for f in &fs.faces {
        for skip in 0..f.vertices.len() {
            let mut sub = f.vertices.clone();
            sub.remove(skip);
            *counts.entry(sub).or_default() += 1;
        }
    }
    counts
}

pub fn max_cofacet_degree(fs: &FaceSet) -> usize {
    cofacet_degrees(fs).into_values().max().unwrap_or(0)
}

/// Orbits of the faces under x -> u*x for u in F_n^*, as lists of face
/// positions. Orbits are listed by their smallest member.
pub fn orbit_decomposition(fs: &FaceSet) -> Result<Vec<Vec<usize>>> {
    let n = fs.spec.n;
    let pm = PrimeModulus::new(n)?;
    let mut seen = vec![false; fs.len()];
    let mut orbits = Vec::new();
    for start in 0..fs.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = HashSet::new();
        for u in 1..n {
            let scaled: Vec<u64> = fs.faces[start]
                .vertices
                .iter()
                .map(|&v| pm.mul(u, v))
                .collect();
            let pos = fs.position(&scaled).ok_or_else(|| {
                Error::Precondition(format!("complex is not closed under scaling by {u}"))
            })?;
            orbit.insert(pos);
        }
        let mut orbit: Vec<usize> = orbit.into_iter().collect();
        orbit.sort_unstable();
        for &i in &orbit {
            seen[i] = true;
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}
