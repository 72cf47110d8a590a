//! Fourier-Motzkin projection of split-rate constraints onto (R1, R2).
//!
//! Each input constraint's right-hand side is an *atom*. Combined constraints carry the
//! multiset of atoms they sum, so a projection can be compared structurally with a
//! closed form (which sums of which mutual informations appear under the min).

use std::collections::BTreeMap;

use super::region2::{Conjunction, HalfPlane, RateRegion2};
use crate::error::{Error, Result};

/// Linear constraint `coeffs . x <= rhs` with the atom multiplicities of `rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct FmConstraint {
    pub coeffs: Vec<i64>,
    pub rhs: f64,
    pub atoms: Vec<u32>,
}

/// Constraints over split rates. Part `i` belongs to stream `stream_of[i]` (0 or 1).
#[derive(Clone, Debug, Default)]
pub struct FmSystem {
    stream_of: Vec<usize>,
    constraints: Vec<FmConstraint>,
    atoms: Vec<f64>,
}

/// How duplicate constraints are merged during elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmMode {
    /// Equal coefficients: keep the smallest right-hand side.
    Numeric,
    /// Equal coefficients and equal atoms: keep one. Distinct sums all survive.
    Symbolic,
}

/// A projected constraint a R1 + b R2 <= rhs.
#[derive(Clone, Debug, PartialEq)]
pub struct Projected {
    pub a: u32,
    pub b: u32,
    pub rhs: f64,
    pub atoms: Vec<u32>,
}

/// Result of a projection: one conjunction over (R1, R2).
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub constraints: Vec<Projected>,
}

impl Projection {
    pub fn to_conjunction(&self, label: impl Into<String>) -> Conjunction {
        Conjunction::new(
            label,
            self.constraints.iter().map(|p| HalfPlane::new(p.a, p.b, p.rhs)).collect(),
        )
        .simplified()
    }

    pub fn to_region(&self, label: impl Into<String>) -> RateRegion2 {
        RateRegion2::single(self.to_conjunction(label))
    }

    /// Atom multisets of the constraints with coefficients (a, b), sorted.
    pub fn atom_sets(&self, a: u32, b: u32) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self
            .constraints
            .iter()
            .filter(|p| p.a == a && p.b == b)
            .map(|p| p.atoms.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

impl FmSystem {
    pub fn new(stream_of: Vec<usize>) -> Result<Self> {
        if stream_of.iter().any(|&s| s > 1) {
            return Err(Error::InvalidParameter("parts must belong to stream 0 or 1".into()));
        }
        Ok(Self { stream_of, ..Default::default() })
    }

    pub fn num_parts(&self) -> usize {
        self.stream_of.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_values(&self) -> &[f64] {
        &self.atoms
    }

    /// Adds `sum over parts of R_part <= rhs`; returns the new atom index.
    pub fn add(&mut self, parts: &[usize], rhs: f64) -> Result<usize> {
        let mut coeffs = vec![0i64; self.num_parts()];
        for &p in parts {
            if p >= coeffs.len() {
                return Err(Error::InvalidParameter(format!("part {p} does not exist")));
            }
            coeffs[p] += 1;
        }
        self.add_coeffs(&coeffs, rhs)
    }

    /// Adds `coeffs . R <= rhs` with nonnegative integer coefficients.
    pub fn add_coeffs(&mut self, coeffs: &[i64], rhs: f64) -> Result<usize> {
        if coeffs.len() != self.num_parts() || coeffs.iter().any(|&c| c < 0) || !rhs.is_finite() {
            return Err(Error::InvalidParameter("malformed constraint".into()));
        }
        let atom = self.atoms.len();
        self.atoms.push(rhs);
        let mut c = coeffs.to_vec();
        c.extend([0, 0]);
        let mut atoms = vec![0; atom + 1];
        atoms[atom] = 1;
        self.constraints.push(FmConstraint { coeffs: c, rhs, atoms });
        Ok(atom)
    }
}

/// Projects onto (R1, R2) = (sum of stream-0 parts, sum of stream-1 parts), with all
/// parts nonnegative.
pub fn fm_project(sys: &FmSystem, mode: FmMode) -> Result<Projection> {
    let n = sys.num_parts();
    let na = sys.num_atoms();
    let (r1, r2) = (n, n + 1);
    let pad = |c: &FmConstraint| {
        let mut c = c.clone();
        c.atoms.resize(na, 0);
        c
    };
    let mut rows: Vec<FmConstraint> = sys.constraints.iter().map(pad).collect();
    let zero = FmConstraint { coeffs: vec![0; n + 2], rhs: 0.0, atoms: vec![0; na] };
    let mut eliminate = Vec::new();
    for (s, rv) in [(0usize, r1), (1, r2)] {
        let parts: Vec<usize> = (0..n).filter(|&i| sys.stream_of[i] == s).collect();
        let Some((&last, others)) = parts.split_last() else {
            let mut c = zero.clone();
            c.coeffs[rv] = 1;
            rows.push(c);
            continue;
        };
        // last = R_s - sum(others)
        for row in rows.iter_mut() {
            let k = std::mem::take(&mut row.coeffs[last]);
            if k != 0 {
                row.coeffs[rv] += k;
                for &o in others {
                    row.coeffs[o] -= k;
                }
            }
        }
        let mut nonneg = zero.clone();
        nonneg.coeffs[rv] = -1;
        for &o in others {
            nonneg.coeffs[o] = 1;
        }
        rows.push(nonneg);
        for &o in others {
            let mut c = zero.clone();
            c.coeffs[o] = -1;
            rows.push(c);
        }
        eliminate.extend_from_slice(others);
    }
    rows = merge(rows, mode)?;
    for &v in &eliminate {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            match r.coeffs[v].signum() {
                1 => pos.push(r),
                -1 => neg.push(r),
                _ => keep.push(r),
            }
        }
        for p in &pos {
            for q in &neg {
                let (mp, mq) = (-q.coeffs[v], p.coeffs[v]);
                keep.push(FmConstraint {
                    coeffs: p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| mp * a + mq * b).collect(),
                    rhs: mp as f64 * p.rhs + mq as f64 * q.rhs,
                    atoms: p.atoms.iter().zip(&q.atoms).map(|(a, b)| mp as u32 * a + mq as u32 * b).collect(),
                });
            }
        }
        rows = merge(keep, mode)?;
    }
    finish(rows)
}

/// Drops trivially true rows, detects contradictions, and merges duplicates.
fn merge(rows: Vec<FmConstraint>, mode: FmMode) -> Result<Vec<FmConstraint>> {
    let mut map: BTreeMap<(Vec<i64>, Vec<u32>), FmConstraint> = BTreeMap::new();
    for r in rows {
        if r.coeffs.iter().all(|&c| c == 0) {
            if r.rhs < -1e-12 {
                return Err(Error::Infeasible);
            }
            continue;
        }
        let key = match mode {
            FmMode::Numeric => (r.coeffs.clone(), Vec::new()),
            FmMode::Symbolic => (r.coeffs.clone(), r.atoms.clone()),
        };
        match map.get_mut(&key) {
            Some(e) if r.rhs < e.rhs => *e = r,
            Some(_) => {}
            None => {
                map.insert(key, r);
            }
        }
    }
    Ok(map.into_values().collect())
}

fn finish(rows: Vec<FmConstraint>) -> Result<Projection> {
    let n = rows.first().map_or(0, |r| r.coeffs.len() - 2);
    let mut out = Vec::new();
    let mut mixed = Vec::new();
    for r in rows {
        let (a, b) = (r.coeffs[n], r.coeffs[n + 1]);
        if a <= 0 && b <= 0 {
            // Implied by R1, R2 >= 0 when rhs >= 0.
            if r.rhs < -1e-12 {
                return Err(Error::Infeasible);
            }
        } else if a >= 0 && b >= 0 {
            if r.rhs < -1e-12 {
                return Err(Error::Infeasible);
            }
            out.push(Projected { a: a as u32, b: b as u32, rhs: r.rhs.max(0.0), atoms: r.atoms });
        } else {
            mixed.push(r);
        }
    }
    let proj = Projection { constraints: out };
    if !mixed.is_empty() {
        let verts = proj.to_conjunction("").vertices();
        for r in mixed {
            let (a, b) = (r.coeffs[n] as f64, r.coeffs[n + 1] as f64);
            if verts.iter().any(|&(x, y)| a * x + b * y > r.rhs + 1e-12) {
                return Err(Error::MixedSignProjection(format!(
                    "{} R1 + {} R2 <= {}",
                    a, b, r.rhs
                )));
            }
        }
    }
    Ok(proj)
}
