//! Property suites over the bundled seeded corpus. Each suite reports the worst residual
//! of every check against a pinned tolerance.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::DiscreteIc;
use crate::corpus::{discrete_corpus, mac3_corpus, tiny_hk, CORPUS_SEED};
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::regions::{
    fm_project, hk_coverage, mac3_corner_combination, mac3_layered_rates, region_mac3, region_swsc,
    region_swsc_union, FmMode, FmSystem, IcInfo, OrderFamily, OrderPair, RateRegion2,
};
use crate::splits::{erasure_split, unit_grid, LayerSplit, SenderSplit};

/// Channels in the identity suites.
pub const IDENTITY_CHANNELS: usize = 20;
/// Channels in the union-coverage suites.
pub const UNION_CHANNELS: usize = 5;
/// Erasure grid of the identity suites.
pub const ALPHA_GRID: usize = 21;
/// Split grid of the union and HK suites.
pub const UNION_GRID: usize = 41;
/// Rate grid of the SND decomposition check (per axis).
pub const RATE_GRID: usize = 200;
/// Random vectors in the projection suite.
pub const FM_VECTORS: usize = 1000;
/// Distance allowed between a union boundary and the region it should reach.
pub const COVER_TOL: f64 = 0.02;
/// Amount a union may poke out of the region it should stay inside.
pub const EXCESS_TOL: f64 = 1e-9;
/// Exact identities on finite alphabets.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Boundary samples used to measure coverage.
const COVER_SAMPLES: usize = 400;
/// Seed of the random vectors of the projection suite.
const FM_SEED: u64 = 10;

/// The named property suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma1,
    Prop1,
    Prop2,
    Thm2,
    Thm3,
    Eq5,
    Fm,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Lemma1, Suite::Prop1, Suite::Prop2, Suite::Thm2, Suite::Thm3, Suite::Eq5, Suite::Fm];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Thm2 => "thm2",
            Suite::Thm3 => "thm3",
            Suite::Eq5 => "eq5",
            Suite::Fm => "fm",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Unknown { kind: "suite", name: s.to_string() })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One check: the worst residual over its cases and the tolerance it must stay below.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when the residual is strictly below the tolerance.
    pub fn below(name: impl Into<String>, cases: usize, max_residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), cases, max_residual, tolerance, passed: max_residual < tolerance }
    }

    /// Passes when the residual is at most the tolerance.
    pub fn at_most(name: impl Into<String>, cases: usize, max_residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), cases, max_residual, tolerance, passed: max_residual <= tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max residual {:.3e} (tol {:.1e}, {} cases)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.tolerance,
            self.cases
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {c}", self.suite)?;
        }
        write!(
            f,
            "{} {} in {:.2} s",
            self.suite,
            if self.passed() { "passed" } else { "FAILED" },
            self.elapsed_s
        )
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let t = Instant::now();
    let checks = match suite {
        Suite::Lemma1 => lemma1()?,
        Suite::Prop1 => prop1()?,
        Suite::Prop2 => union_suite(OrderFamily::Prop2)?,
        Suite::Thm2 => union_suite(OrderFamily::Thm2)?,
        Suite::Thm3 => thm3()?,
        Suite::Eq5 => eq5()?,
        Suite::Fm => fm()?,
    };
    Ok(SuiteReport { suite, checks, elapsed_s: t.elapsed().as_secs_f64() })
}

fn identity_corpus() -> Vec<DiscreteIc> {
    discrete_corpus(CORPUS_SEED, IDENTITY_CHANNELS)
}

/// Maximum of per-channel results computed in parallel.
fn par_max<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    let v: Vec<f64> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

/// X split by an alpha-erasure into (X1, X2), W unsplit.
fn erasure_21(ic: &DiscreteIc, alpha: f64) -> Result<LayerSplit> {
    Ok(LayerSplit::new(vec![erasure_split(ic.px(), alpha)?, SenderSplit::trivial(ic.pw().clone())]))
}

/// I(W;Y_k|X1) against its interpolation between I(W;Y_k) and I(W;Y_k|X), plus the
/// pushforward of the split.
fn lemma1() -> Result<Vec<Check>> {
    let corpus = identity_corpus();
    let grid = unit_grid(ALPHA_GRID);
    let cases = corpus.len() * grid.len();
    let mut checks = Vec::new();
    for k in 0..2 {
        let worst = par_max(&corpus, |ic| {
            let cache = MiCache::new(ic.to_joint());
            let mut worst: f64 = 0.0;
            for &a in &grid {
                let split = erasure_21(ic, a)?;
                let mi = Mi::new(&cache, &split)?;
                let lhs = mi.cond_mi(k, &[0, 1], &[0b01, 0]);
                let rhs = a * mi.cond_mi(k, &[0, 1], &[0, 0]) + (1.0 - a) * mi.cond_mi(k, &[0, 1], &[0b11, 0]);
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        })?;
        checks.push(Check::below(format!("interpolation at receiver {}", k + 1), cases, worst, IDENTITY_TOL));
    }
    let worst = par_max(&corpus, |ic| {
        let mut worst: f64 = 0.0;
        for &a in &grid {
            worst = worst.max(erasure_split(ic.px(), a)?.pushforward_deviation());
        }
        Ok(worst)
    })?;
    checks.push(Check::below("erasure split reproduces p(x)", cases, worst, IDENTITY_TOL));
    Ok(checks)
}

/// The 2-1 SWSC rectangle against its closed form.
fn prop1() -> Result<Vec<Check>> {
    let corpus = identity_corpus();
    let grid = unit_grid(ALPHA_GRID);
    let orders: OrderPair = "d1=m1@-1>m2@0;d2=m1@-1>m2@-1".parse()?;
    let worst = par_max(&corpus, |ic| {
        let cache = MiCache::new(ic.to_joint());
        let mut worst: f64 = 0.0;
        for &a in &grid {
            let split = erasure_21(ic, a)?;
            let mi = Mi::new(&cache, &split)?;
            let (r1, r2) = region_swsc(&mi, &orders)?.conjunctions[0]
                .as_rect()
                .expect("swsc regions are rectangles");
            let c1 = (mi.cond_mi(0, &[0b01, 0], &[0, 0]) + mi.cond_mi(0, &[0b11, 0], &[0b01, 1]))
                .min(mi.cond_mi(1, &[0b11, 0], &[0, 0]));
            let c2 = mi.cond_mi(0, &[0, 1], &[0b01, 0]).min(mi.cond_mi(1, &[0, 1], &[0b11, 0]));
            worst = worst.max((r1 - c1).abs()).max((r2 - c2).abs());
        }
        Ok(worst)
    })?;
    Ok(vec![Check::below("2-1 rectangle matches closed form", corpus.len() * grid.len(), worst, IDENTITY_TOL)])
}

/// How well a union of rectangles matches a target region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnionFit {
    /// Largest l-infinity distance from a target boundary sample to the union.
    pub cover: f64,
    /// Largest diagonal distance from a rectangle corner back into the target.
    pub excess: f64,
}

/// Compares a pruned union of rectangles with the region it should equal.
pub fn union_fit(union: &RateRegion2, target: &RateRegion2, samples: usize) -> UnionFit {
    let rects: Vec<(f64, f64)> = union.conjunctions.iter().filter_map(|c| c.as_rect()).collect();
    let cover = target
        .boundary(samples)
        .iter()
        .map(|p| {
            rects
                .iter()
                .map(|&(a, b)| (p.r1 - a).max(p.r2 - b).max(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let excess = rects.iter().map(|&(a, b)| outside_by(target, a, b)).fold(0.0, f64::max);
    UnionFit { cover, excess }
}

/// Smallest t >= 0 with (r1 - t, r2 - t), clamped at zero, in the region, by bisection.
fn outside_by(region: &RateRegion2, r1: f64, r2: f64) -> f64 {
    if region.contains(r1, r2, 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, r1.max(r2));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if region.contains((r1 - mid).max(0.0), (r2 - mid).max(0.0), 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The 3-1 SWSC union against SD1 n SD2 (orders 15, 16) or SND (all five families).
fn union_suite(family: OrderFamily) -> Result<Vec<Check>> {
    let corpus = discrete_corpus(CORPUS_SEED, UNION_CHANNELS);
    let fits: Vec<UnionFit> = corpus
        .iter()
        .map(|ic| {
            let cache = MiCache::new(ic.to_joint());
            let info = IcInfo::new(&cache)?;
            let target = match family {
                OrderFamily::Prop2 => info.sd(0).intersect(&info.sd(1)),
                OrderFamily::Thm2 => info.snd(),
            };
            let union = region_swsc_union(&cache, family, UNION_GRID)?;
            Ok(union_fit(&union, &target, COVER_SAMPLES))
        })
        .collect::<Result<_>>()?;
    let what = match family {
        OrderFamily::Prop2 => "SD1 n SD2",
        OrderFamily::Thm2 => "SND",
    };
    let n = fits.len();
    Ok(vec![
        Check::at_most(format!("union covers {what}"), n, fits.iter().map(|f| f.cover).fold(0.0, f64::max), COVER_TOL),
        Check::at_most(
            format!("union stays inside {what}"),
            n,
            fits.iter().map(|f| f.excess).fold(0.0, f64::max),
            EXCESS_TOL,
        ),
    ])
}

/// Layered MAC rates against corner combinations, and HK coverage of the MAC corners.
fn thm3() -> Result<Vec<Check>> {
    let macs = mac3_corpus(CORPUS_SEED, UNION_CHANNELS);
    let grid = unit_grid(UNION_GRID);
    let worst = par_max(&macs, |ch| {
        let cache = MiCache::new(ch.clone());
        let region = region_mac3(&cache)?;
        let mut worst: f64 = 0.0;
        for &a in &grid {
            for &b in &grid {
                for lambda in 1..=3 {
                    let r = mac3_layered_rates(&cache, a, b, lambda)?;
                    let c = mac3_corner_combination(&region, a, b, lambda)?;
                    for i in 0..3 {
                        worst = worst.max((r[i] - c[i]).abs());
                    }
                }
            }
        }
        Ok(worst)
    })?;
    let cases = macs.len() * grid.len() * grid.len() * 3;
    let cov = hk_coverage(&MiCache::new(tiny_hk(CORPUS_SEED)), UNION_GRID)?;
    Ok(vec![
        Check::below("layered MAC rates match corner combinations", cases, worst, IDENTITY_TOL),
        Check::at_most("HK union covers the MAC-intersection vertices", cov.vertices, cov.worst_gap, COVER_TOL),
    ])
}

/// Membership in SND against membership in its IAN/SD decomposition on a rate grid.
fn eq5() -> Result<Vec<Check>> {
    let corpus = identity_corpus();
    let mismatches: Vec<usize> = corpus
        .par_iter()
        .map(|ic| {
            let info = IcInfo::new(&MiCache::new(ic.to_joint()))?;
            let (a, b) = (info.snd(), info.snd_decomposed());
            let m1 = 1.05 * info.rx[0].both.max(info.rx[1].both);
            let step = m1 / (RATE_GRID - 1) as f64;
            let mut count = 0;
            for i in 0..RATE_GRID {
                for j in 0..RATE_GRID {
                    let (r1, r2) = (i as f64 * step, j as f64 * step);
                    if a.contains(r1, r2, IDENTITY_TOL) != b.contains(r1, r2, IDENTITY_TOL) {
                        count += 1;
                    }
                }
            }
            Ok(count)
        })
        .collect::<Result<_>>()?;
    let total: usize = mismatches.iter().sum();
    Ok(vec![Check::at_most(
        "SND membership equals the IAN/SD decomposition",
        corpus.len() * RATE_GRID * RATE_GRID,
        total as f64,
        0.0,
    )])
}

/// The atoms of the 2-1 rate-splitting system: (parts, value index) with parts
/// 0 = m11, 1 = m12, 2 = m2.
const FM_ATOMS: [&[usize]; 6] = [&[0], &[2], &[1], &[0], &[1], &[2]];

/// Projects the single-block 2-1 system with atoms
/// a0 = I(X1;Y1), a1 = I(W;Y1|X1), a2 = I(X;Y1|X1,W), a3 = I(X1;Y2), a4 = I(X;Y2|X1),
/// a5 = I(W;Y2|X) and compares with R1 <= min(a0,a3) + min(a2,a4), R2 <= min(a1,a5).
fn fm() -> Result<Vec<Check>> {
    let r1_sets: Vec<Vec<u32>> =
        vec![vec![0, 0, 0, 1, 1, 0], vec![0, 0, 1, 1, 0, 0], vec![1, 0, 0, 0, 1, 0], vec![1, 0, 1, 0, 0, 0]];
    let r2_sets: Vec<Vec<u32>> = vec![vec![0, 0, 0, 0, 0, 1], vec![0, 1, 0, 0, 0, 0]];
    let mut rng = ChaCha8Rng::seed_from_u64(FM_SEED);
    let mut mismatches = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..FM_VECTORS {
        let a: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
        let mut sys = FmSystem::new(vec![0, 0, 1])?;
        for (parts, &v) in FM_ATOMS.iter().zip(&a) {
            sys.add(parts, v)?;
        }
        let sym = fm_project(&sys, FmMode::Symbolic)?;
        let mut s1 = sym.atom_sets(1, 0);
        let mut s2 = sym.atom_sets(0, 1);
        s1.sort();
        s2.sort();
        let mut e1 = r1_sets.clone();
        let mut e2 = r2_sets.clone();
        e1.sort();
        e2.sort();
        if s1 != e1 || s2 != e2 || !sym.atom_sets(1, 1).is_empty() {
            mismatches += 1;
        }
        let num = fm_project(&sys, FmMode::Numeric)?.to_region("fm");
        let c1 = a[0].min(a[3]) + a[2].min(a[4]);
        let c2 = a[1].min(a[5]);
        worst = worst.max((num.r1_max() - c1).abs()).max((num.r2_max() - c2).abs());
    }
    Ok(vec![
        Check::at_most("symbolic projection matches closed form", FM_VECTORS, mismatches as f64, 0.0),
        Check::below("numeric projection matches closed form", FM_VECTORS, worst, IDENTITY_TOL),
    ])
}
