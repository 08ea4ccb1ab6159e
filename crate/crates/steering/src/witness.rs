//! Steering witnesses: construction, evaluation, enumeration of Alice's
//! deterministic strategies, exact LHS bounds for ideal measurements,
//! quantum values and the plateau-existence test.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::linalg::{c, eig_max, kron, ComplexMatrix, HermitianOperator};
use crate::quantum::{
    anticommuting_set, assemblage_from, max_entangled, observable_from_bloch, Assemblage, BlochVector, Observable,
};

/// Largest number of Alice inputs enumerated strategy by strategy.
pub const ENUMERATION_CAP: usize = 24;
/// Inputs above this count go through the lattice path when the witness allows it.
const LATTICE_THRESHOLD: usize = 20;
/// Strategies kept per class; `count` always holds the full size.
pub const MEMBER_LIST_CAP: usize = 4096;
/// Absolute tolerance for "attains the LHS bound".
pub const TIE_TOL: f64 = 1e-9;

/// A linear steering functional Σ c_{abxy} tr(σ_{a|x} B_{b|y}).
#[derive(Clone, Debug)]
pub struct Witness {
    name: String,
    n_x: usize,
    n_y: usize,
    /// Flattened c_{abxy}, index ((a·2 + b)·n_x + x)·n_y + y.
    coeffs: Vec<f64>,
    targets: Vec<Observable>,
    full_correlation: Option<DMatrix<f64>>,
}

impl Witness {
    /// Builds a witness from its full coefficient tensor `coeffs[a][b][x][y]`.
    pub fn from_tensor(name: &str, coeffs: &[[Vec<Vec<f64>>; 2]; 2], targets: Vec<Observable>) -> Result<Self> {
        let n_x = coeffs[0][0].len();
        if n_x == 0 {
            return Err(invalid("witness needs at least one Alice input"));
        }
        let n_y = targets.len();
        if n_y == 0 {
            return Err(invalid("witness needs at least one target"));
        }
        let d = targets[0].dim();
        if targets.iter().any(|t| t.dim() != d) {
            return Err(invalid("targets have different dimensions"));
        }
        let mut flat = vec![0.0; 4 * n_x * n_y];
        for a in 0..2 {
            for b in 0..2 {
                if coeffs[a][b].len() != n_x {
                    return Err(invalid("coefficient tensor is ragged in x"));
                }
                for x in 0..n_x {
                    if coeffs[a][b][x].len() != n_y {
                        return Err(invalid(format!("coefficient row has {} entries, expected {n_y}", coeffs[a][b][x].len())));
                    }
                    for y in 0..n_y {
                        flat[((a * 2 + b) * n_x + x) * n_y + y] = coeffs[a][b][x][y];
                    }
                }
            }
        }
        let mut w = Self { name: name.to_string(), n_x, n_y, coeffs: flat, targets, full_correlation: None };
        w.full_correlation = w.detect_full_correlation();
        Ok(w)
    }

    /// Builds Σ c_{xy} ⟨A_x ⊗ B_y⟩, i.e. c_{abxy} = (−1)^{a+b} c_{xy}.
    pub fn from_correlators(name: &str, c_xy: DMatrix<f64>, targets: Vec<Observable>) -> Result<Self> {
        if c_xy.ncols() != targets.len() {
            return Err(invalid(format!("{} coefficient columns for {} targets", c_xy.ncols(), targets.len())));
        }
        if c_xy.nrows() == 0 || targets.is_empty() {
            return Err(invalid("empty witness"));
        }
        let d = targets[0].dim();
        if targets.iter().any(|t| t.dim() != d) {
            return Err(invalid("targets have different dimensions"));
        }
        let (n_x, n_y) = c_xy.shape();
        let mut flat = vec![0.0; 4 * n_x * n_y];
        for a in 0..2 {
            for b in 0..2 {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                for x in 0..n_x {
                    for y in 0..n_y {
                        flat[((a * 2 + b) * n_x + x) * n_y + y] = sign * c_xy[(x, y)];
                    }
                }
            }
        }
        Ok(Self { name: name.to_string(), n_x, n_y, coeffs: flat, targets, full_correlation: Some(c_xy) })
    }

    fn detect_full_correlation(&self) -> Option<DMatrix<f64>> {
        let m = DMatrix::from_fn(self.n_x, self.n_y, |x, y| self.coeff(0, 0, x, y));
        for a in 0..2 {
            for b in 0..2 {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                for x in 0..self.n_x {
                    for y in 0..self.n_y {
                        if (self.coeff(a, b, x, y) - sign * m[(x, y)]).abs() > 1e-14 {
                            return None;
                        }
                    }
                }
            }
        }
        Some(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn coeff(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.coeffs[((a * 2 + b) * self.n_x + x) * self.n_y + y]
    }

    pub fn targets(&self) -> &[Observable] {
        &self.targets
    }

    /// Bob's local dimension.
    pub fn dim(&self) -> usize {
        self.targets[0].dim()
    }

    pub fn full_correlation(&self) -> Option<&DMatrix<f64>> {
        self.full_correlation.as_ref()
    }

    /// Target projectors B_{b|y} = (I + (−1)^b B_y)/2.
    pub fn target_projector(&self, b: usize, y: usize) -> HermitianOperator {
        self.targets[y].projector(b)
    }

    /// Weights k_{by} = Σ_x c_{λ(x) b x y}: the strategy's value is Σ k_{by} tr(σ_λ B_{b|y}).
    pub fn strategy_weights(&self, s: &DeterministicStrategy) -> Vec<[f64; 2]> {
        let mut k = vec![[0.0; 2]; self.n_y];
        for x in 0..self.n_x {
            let a = s.output(x);
            for (y, ky) in k.iter_mut().enumerate() {
                ky[0] += self.coeff(a, 0, x, y);
                ky[1] += self.coeff(a, 1, x, y);
            }
        }
        k
    }

    /// Splits the strategy operator into t₀·I + Σ t_y B_y; returns (t, t₀).
    pub fn t_vector(&self, s: &DeterministicStrategy) -> (Vec<f64>, f64) {
        let k = self.strategy_weights(s);
        let t = k.iter().map(|ky| (ky[0] - ky[1]) / 2.0).collect();
        let t0 = k.iter().map(|ky| (ky[0] + ky[1]) / 2.0).sum();
        (t, t0)
    }

    /// t₀·I + Σ_y t_y B_y.
    pub fn strategy_operator(&self, t: &[f64], t0: f64) -> HermitianOperator {
        let d = self.dim();
        let mut op = HermitianOperator::identity(d).scale(t0);
        for (ty, b) in t.iter().zip(self.targets.iter()) {
            if *ty != 0.0 {
                op = &op + &b.op().scale(*ty);
            }
        }
        op
    }

    /// Whether all targets pairwise anticommute (to 1e−12).
    pub fn targets_anticommute(&self) -> bool {
        for j in 0..self.n_y {
            for k in (j + 1)..self.n_y {
                if self.targets[j].op().anticommutator(self.targets[k].op()).operator_norm() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }

    /// Ideal-measurement value of a strategy: t₀ + λ_max(Σ t_y B_y).
    pub fn strategy_value(&self, t: &[f64], t0: f64) -> f64 {
        if self.targets_anticommute() {
            return t0 + t.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        eig_max(&self.strategy_operator(t, t0)).0
    }

    /// E_{a|x} = Σ_{b,y} c_{abxy} B_{b|y}, so the value is Σ tr(σ_{a|x} E_{a|x}).
    pub fn effective_operator(&self, a: usize, x: usize) -> HermitianOperator {
        let mut op = HermitianOperator::zeros(self.dim());
        for y in 0..self.n_y {
            for b in 0..2 {
                let cf = self.coeff(a, b, x, y);
                if cf != 0.0 {
                    op = &op + &self.target_projector(b, y).scale(cf);
                }
            }
        }
        op
    }

    /// Witness value of an assemblage against the target measurements.
    pub fn value_on(&self, assemblage: &Assemblage) -> Result<f64> {
        if assemblage.n_x() != self.n_x || assemblage.dim() != self.dim() {
            return Err(invalid("assemblage does not match the witness scenario"));
        }
        let mut total = 0.0;
        for y in 0..self.n_y {
            let proj = [self.target_projector(0, y), self.target_projector(1, y)];
            for x in 0..self.n_x {
                for a in 0..2 {
                    for (b, p) in proj.iter().enumerate() {
                        let cf = self.coeff(a, b, x, y);
                        if cf != 0.0 {
                            total += cf * assemblage.member(a, x).inner(p);
                        }
                    }
                }
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&WitnessFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WitnessFile = serde_json::from_str(text)?;
        file.into_witness()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// On-disk witness description.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct WitnessFile {
    name: String,
    n_x: usize,
    n_y: usize,
    /// coeffs[a][b][x][y]
    coeffs: Vec<Vec<Vec<Vec<f64>>>>,
    /// targets[y][row][col] = [re, im]
    targets: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        let coeffs = (0..2)
            .map(|a| (0..2).map(|b| (0..w.n_x).map(|x| (0..w.n_y).map(|y| w.coeff(a, b, x, y)).collect()).collect()).collect())
            .collect();
        let targets = w
            .targets
            .iter()
            .map(|t| {
                let m = t.op().matrix();
                (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
            })
            .collect();
        Self { name: w.name.clone(), n_x: w.n_x, n_y: w.n_y, coeffs, targets }
    }
}

impl WitnessFile {
    fn into_witness(self) -> Result<Witness> {
        if self.coeffs.len() != 2 || self.coeffs.iter().any(|r| r.len() != 2) {
            return Err(invalid("coeffs must be indexed [a][b][x][y] with binary a and b"));
        }
        if self.targets.len() != self.n_y {
            return Err(invalid(format!("nY is {} but {} targets given", self.n_y, self.targets.len())));
        }
        let mut targets = Vec::with_capacity(self.targets.len());
        for (y, rows) in self.targets.iter().enumerate() {
            let d = rows.len();
            if d == 0 || rows.iter().any(|r| r.len() != d) {
                return Err(invalid(format!("target {y} is not a square matrix")));
            }
            let m = ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1]));
            let op = HermitianOperator::new(m)?;
            targets.push(Observable::new(op)?);
        }
        let mut it = self.coeffs.into_iter();
        let mut row0 = it.next().unwrap().into_iter();
        let mut row1 = it.next().unwrap().into_iter();
        let tensor = [[row0.next().unwrap(), row0.next().unwrap()], [row1.next().unwrap(), row1.next().unwrap()]];
        let w = Witness::from_tensor(&self.name, &tensor, targets)?;
        if w.n_x != self.n_x {
            return Err(invalid(format!("nX is {} but coefficients cover {} inputs", self.n_x, w.n_x)));
        }
        Ok(w)
    }
}

/// Alice's deterministic response function; bit x of `bits` is the output for input x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    bits: u64,
    n_x: usize,
}

impl DeterministicStrategy {
    pub fn new(outputs: &[usize]) -> Result<Self> {
        if outputs.len() > 64 {
            return Err(invalid("at most 64 inputs"));
        }
        let mut bits = 0u64;
        for (x, &a) in outputs.iter().enumerate() {
            match a {
                0 => {}
                1 => bits |= 1 << x,
                _ => return Err(invalid(format!("output {a} for input {x} is not binary"))),
            }
        }
        Ok(Self { bits, n_x: outputs.len() })
    }

    pub fn from_bits(bits: u64, n_x: usize) -> Self {
        Self { bits, n_x }
    }

    pub fn output(&self, x: usize) -> usize {
        ((self.bits >> x) & 1) as usize
    }

    pub fn outputs(&self) -> Vec<usize> {
        (0..self.n_x).map(|x| self.output(x)).collect()
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
}

/// Strategies sharing the same multiset of |t_y| values (and the same ideal value).
#[derive(Clone, Debug, Serialize)]
pub struct StrategyClass {
    /// Representative t-vector (that of the first member).
    pub t_vector: Vec<f64>,
    /// Identity component t₀; zero for full-correlation witnesses.
    pub offset: f64,
    /// Ideal-measurement value t₀ + λ_max(Σ t_y B_y).
    pub value: f64,
    pub single_observable: bool,
    /// Number of strategies in the class.
    pub count: u64,
    /// Up to [`MEMBER_LIST_CAP`] members, in increasing bit order when enumerated directly.
    pub members: Vec<DeterministicStrategy>,
}

impl StrategyClass {
    /// Sorted absolute t-vector, the grouping key.
    pub fn pattern(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.t_vector.iter().map(|v| v.abs()).filter(|v| *v > 1e-12).collect();
        p.sort_by(|a, b| b.partial_cmp(a).unwrap());
        p
    }
}

fn class_key(t: &[f64], t0: f64, value: f64) -> Vec<i64> {
    let mut k: Vec<i64> = t.iter().map(|v| (v.abs() * 1e12).round() as i64).collect();
    k.sort_unstable();
    k.push((t0 * 1e12).round() as i64);
    k.push((value * 1e9).round() as i64);
    k
}

fn is_single(t: &[f64]) -> bool {
    t.iter().filter(|v| v.abs() > 1e-12).count() == 1
}

/// Enumerates Alice's 2^{n_X} deterministic strategies and groups them into classes.
///
/// Classes are returned in decreasing order of ideal value. Full-correlation
/// witnesses with commensurate coefficients and more than 20 inputs are
/// handled on the lattice of reachable integer t-vectors rather than strategy
/// by strategy, so only class representatives are listed there.
pub fn enumerate_strategies(w: &Witness) -> Result<Vec<StrategyClass>> {
    if w.n_x > LATTICE_THRESHOLD {
        if let Some(classes) = lattice_classes(w)? {
            return Ok(classes);
        }
    }
    if w.n_x > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { n_x: w.n_x, cap: ENUMERATION_CAP });
    }
    let total = 1u64 << w.n_x;
    let anticommute = w.targets_anticommute();
    let eval = |bits: u64| {
        let s = DeterministicStrategy::from_bits(bits, w.n_x);
        let (t, t0) = w.t_vector(&s);
        let value = if anticommute {
            t0 + t.iter().map(|v| v * v).sum::<f64>().sqrt()
        } else {
            eig_max(&w.strategy_operator(&t, t0)).0
        };
        (bits, t, t0, value)
    };
    let chunk = 1u64 << 12;
    let chunks: Vec<u64> = (0..total.div_ceil(chunk)).collect();
    let partial: Vec<BTreeMap<Vec<i64>, StrategyClass>> = chunks
        .par_iter()
        .map(|&ci| {
            let mut map: BTreeMap<Vec<i64>, StrategyClass> = BTreeMap::new();
            for bits in (ci * chunk)..((ci + 1) * chunk).min(total) {
                let (bits, t, t0, value) = eval(bits);
                let key = class_key(&t, t0, value);
                let s = DeterministicStrategy::from_bits(bits, w.n_x);
                let entry = map.entry(key).or_insert_with(|| StrategyClass {
                    single_observable: is_single(&t),
                    t_vector: t,
                    offset: t0,
                    value,
                    count: 0,
                    members: Vec::new(),
                });
                entry.count += 1;
                if entry.members.len() < MEMBER_LIST_CAP {
                    entry.members.push(s);
                }
            }
            map
        })
        .collect();
    let mut merged: BTreeMap<Vec<i64>, StrategyClass> = BTreeMap::new();
    for map in partial {
        for (key, class) in map {
            match merged.get_mut(&key) {
                Some(existing) => {
                    existing.count += class.count;
                    let room = MEMBER_LIST_CAP.saturating_sub(existing.members.len());
                    existing.members.extend(class.members.into_iter().take(room));
                }
                None => {
                    merged.insert(key, class);
                }
            }
        }
    }
    Ok(sorted_classes(merged.into_values().collect()))
}

fn sorted_classes(mut classes: Vec<StrategyClass>) -> Vec<StrategyClass> {
    classes.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap()
            .then_with(|| b.pattern().partial_cmp(&a.pattern()).unwrap())
    });
    classes
}

/// Class enumeration over reachable integer t-vectors, for full-correlation
/// witnesses whose coefficients are integer multiples of a common unit.
fn lattice_classes(w: &Witness) -> Result<Option<Vec<StrategyClass>>> {
    let Some(cm) = w.full_correlation() else { return Ok(None) };
    let unit = cm.iter().map(|v| v.abs()).filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    if !unit.is_finite() {
        return Ok(None);
    }
    let mut ints = vec![vec![0i32; w.n_y]; w.n_x];
    for x in 0..w.n_x {
        for y in 0..w.n_y {
            let r = cm[(x, y)] / unit;
            if (r - r.round()).abs() > 1e-9 || r.abs() > 1e6 {
                return Ok(None);
            }
            ints[x][y] = r.round() as i32;
        }
    }
    if w.n_x > 64 {
        return Err(Error::EnumerationCap { n_x: w.n_x, cap: 64 });
    }
    let reach = reachable_sums(&ints, w.n_y);
    let anticommute = w.targets_anticommute();
    let mut merged: BTreeMap<Vec<i64>, StrategyClass> = BTreeMap::new();
    let mut entries = reach;
    entries.sort_by_key(|(_, (_, rep))| *rep);
    for (ti, (count, rep)) in entries {
        let t: Vec<f64> = ti.iter().map(|v| *v as f64 * unit).collect();
        let value = if anticommute {
            t.iter().map(|v| v * v).sum::<f64>().sqrt()
        } else {
            eig_max(&w.strategy_operator(&t, 0.0)).0
        };
        let key = class_key(&t, 0.0, value);
        let s = DeterministicStrategy::from_bits(rep, w.n_x);
        let entry = merged.entry(key).or_insert_with(|| StrategyClass {
            single_observable: is_single(&t),
            t_vector: t,
            offset: 0.0,
            value,
            count: 0,
            members: Vec::new(),
        });
        entry.count += count;
        if entry.members.len() < MEMBER_LIST_CAP {
            entry.members.push(s);
        }
    }
    Ok(Some(sorted_classes(merged.into_values().collect())))
}

/// Reachable Σ_x (−1)^{a_x} k_x with strategy count and lowest-bit representative.
fn reachable_sums(ints: &[Vec<i32>], n_y: usize) -> Vec<(Vec<i32>, (u64, u64))> {
    // each coordinate lives in [−B_y, B_y]; stored shifted by B_y in its own bit field
    let bound: Vec<i64> = (0..n_y).map(|y| ints.iter().map(|k| k[y].abs() as i64).sum()).collect();
    let width: Vec<u32> = bound.iter().map(|b| 64 - ((2 * b + 1) as u64).leading_zeros()).collect();
    if width.iter().sum::<u32>() <= 64 {
        let shift: Vec<u32> = width.iter().scan(0, |acc, w| {
            let s = *acc;
            *acc += w;
            Some(s)
        }).collect();
        let pack = |v: &dyn Fn(usize) -> i64| (0..n_y).fold(0u64, |acc, y| acc | ((v(y) as u64) << shift[y]));
        let start = pack(&|y| bound[y]);
        // (key, count, representative), kept sorted by key and merged after each input
        let mut reach: Vec<(u64, u64, u64)> = vec![(start, 1, 0)];
        for (x, kx) in ints.iter().enumerate() {
            // partial sums stay inside [0, 2B_y], so adding the positive part first never carries
            let pos = pack(&|y| kx[y].max(0) as i64);
            let neg = pack(&|y| (-kx[y]).max(0) as i64);
            let mut next: Vec<(u64, u64, u64)> = Vec::with_capacity(reach.len() * 2);
            for &(t, count, rep) in &reach {
                next.push((t + pos - neg, count, rep));
                next.push((t + neg - pos, count, rep | (1 << x)));
            }
            next.sort_unstable_by_key(|e| e.0);
            next.dedup_by(|b, a| {
                if a.0 != b.0 {
                    return false;
                }
                a.1 += b.1;
                a.2 = a.2.min(b.2);
                true
            });
            reach = next;
        }
        return reach
            .into_iter()
            .map(|(key, count, rep)| {
                let t = (0..n_y)
                    .map(|y| ((key >> shift[y]) & ((1u64 << width[y]) - 1)) as i64 - bound[y])
                    .map(|v| v as i32)
                    .collect();
                (t, (count, rep))
            })
            .collect();
    }
    let mut reach: HashMap<Vec<i32>, (u64, u64)> = HashMap::new();
    reach.insert(vec![0; n_y], (1, 0));
    for (x, kx) in ints.iter().enumerate() {
        let mut next: HashMap<Vec<i32>, (u64, u64)> = HashMap::with_capacity(reach.len() * 2);
        for (t, (count, rep)) in &reach {
            for a in 0..2u64 {
                let key: Vec<i32> = t.iter().zip(kx).map(|(tv, kv)| if a == 0 { tv + kv } else { tv - kv }).collect();
                let rep = rep | (a << x);
                let e = next.entry(key).or_insert((0, rep));
                e.0 += count;
                e.1 = e.1.min(rep);
            }
        }
        reach = next;
    }
    reach.into_iter().collect()
}

/// Distinct strategy t-vectors (exact match), with one representative each.
///
/// This is the unit of work for the relaxations: strategies with identical
/// t-vectors and offsets have identical constrained values.
pub fn distinct_strategies(w: &Witness) -> Result<Vec<(DeterministicStrategy, Vec<f64>, f64)>> {
    if w.n_x > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { n_x: w.n_x, cap: ENUMERATION_CAP });
    }
    let mut seen: BTreeMap<Vec<i64>, (DeterministicStrategy, Vec<f64>, f64)> = BTreeMap::new();
    for bits in 0..(1u64 << w.n_x) {
        let s = DeterministicStrategy::from_bits(bits, w.n_x);
        let (t, t0) = w.t_vector(&s);
        let mut key: Vec<i64> = t.iter().map(|v| (v * 1e12).round() as i64).collect();
        key.push((t0 * 1e12).round() as i64);
        seen.entry(key).or_insert((s, t, t0));
    }
    let mut out: Vec<_> = seen.into_values().collect();
    out.sort_by_key(|(s, _, _)| s.bits());
    Ok(out)
}

/// β₀ = max over strategies of t₀ + λ_max(Σ_y t_y B_y).
pub fn lhs_bound(w: &Witness) -> Result<f64> {
    let classes = enumerate_strategies(w)?;
    Ok(classes.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max))
}

/// True iff every class attaining β₀ depends on a single target.
pub fn has_plateau(w: &Witness) -> Result<bool> {
    let classes = enumerate_strategies(w)?;
    let beta = classes.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(classes.iter().filter(|c| c.value >= beta - TIE_TOL).all(|c| c.single_observable))
}

/// Witness value for a shared state and Alice's observables.
pub fn evaluate(w: &Witness, state: &HermitianOperator, alice: &[Observable]) -> Result<f64> {
    if alice.len() != w.n_x {
        return Err(invalid(format!("{} Alice observables for {} inputs", alice.len(), w.n_x)));
    }
    let assemblage = assemblage_from(state, alice)?;
    w.value_on(&assemblage)
}

/// Quantum value attained with a maximally entangled state and optimal Alice observables.
#[derive(Clone, Debug)]
pub struct QuantumValue {
    pub value: f64,
    pub state: HermitianOperator,
    pub alice: Vec<Observable>,
}

/// Shares |φ⁺⟩ of Bob's dimension and lets Alice measure the sign of each
/// input's effective operator, which maximizes the witness for that state.
///
/// For anticommuting targets in full-correlation form this is
/// A_x = (Σ_y c_{xy} B_y)ᵀ/‖c_x‖ and reaches Σ_x ‖c_x‖₂, e.g. √n for the family.
pub fn quantum_value(w: &Witness) -> Result<QuantumValue> {
    let d = w.dim();
    let state = max_entangled(d)?;
    let mut alice = Vec::with_capacity(w.n_x);
    for x in 0..w.n_x {
        // M_{a,x} = Σ_{b,y} c_{abxy} B_{b|y}; σ_{a|x} = A_{a|x}ᵀ/d for |φ⁺⟩
        let mut diff = HermitianOperator::zeros(d);
        for y in 0..w.n_y {
            for b in 0..2 {
                let k = w.coeff(0, b, x, y) - w.coeff(1, b, x, y);
                if k != 0.0 {
                    diff = &diff + &w.target_projector(b, y).scale(k);
                }
            }
        }
        let (vals, vecs) = diff.eigen();
        let signs: Vec<f64> = vals.iter().map(|v| if *v >= -1e-14 { 1.0 } else { -1.0 }).collect();
        let sgn = HermitianOperator::diagonal(&signs).conjugate_by(&vecs);
        alice.push(Observable::new(sgn.transpose())?);
    }
    let value = evaluate(w, &state, &alice)?;
    Ok(QuantumValue { value, state, alice })
}

fn pauli_targets() -> Vec<Observable> {
    vec![
        Observable::new(HermitianOperator::pauli_x()).unwrap(),
        Observable::new(HermitianOperator::pauli_y()).unwrap(),
        Observable::new(HermitianOperator::pauli_z()).unwrap(),
    ]
}

/// The four-input, three-target elegant steering inequality, LHS bound 1.
pub fn esi_witness() -> Witness {
    let rows = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let c_xy = DMatrix::from_fn(4, 3, |x, y| rows[x][y] / 4.0);
    Witness::from_correlators("esi", c_xy, pauli_targets()).unwrap()
}

/// (⟨A₁X⟩ − ⟨A₂Y⟩ + ⟨A₃Z⟩)/√3, LHS bound 1.
pub fn pauli_witness() -> Witness {
    let s = 1.0 / 3f64.sqrt();
    let c_xy = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![s, -s, s]));
    Witness::from_correlators("pauli", c_xy, pauli_targets()).unwrap()
}

/// Alice inputs of the n-family: strings (0, x₂, …, x_n) in binary order.
pub fn family_inputs(n: usize) -> Vec<Vec<usize>> {
    let n_x = 1usize << (n - 1);
    (0..n_x).map(|k| std::iter::once(0).chain((1..n).map(|j| (k >> (n - 1 - j)) & 1)).collect()).collect()
}

/// c_{xy} = (−1)^{x_y}/2^{n−1} with n pairwise anticommuting targets.
pub fn family_witness(n: usize) -> Result<Witness> {
    if n < 3 {
        return Err(invalid("the family is defined for n ≥ 3"));
    }
    if n > 12 {
        return Err(invalid("family witnesses above n = 12 are not supported"));
    }
    let inputs = family_inputs(n);
    let n_x = inputs.len() as f64;
    let c_xy = DMatrix::from_fn(inputs.len(), n, |x, y| if inputs[x][y] == 0 { 1.0 / n_x } else { -1.0 / n_x });
    Witness::from_correlators(&format!("family{n}"), c_xy, anticommuting_set(n)?)
}

/// Integer matrix S_{x,z} = Σ_y (−1)^{x_y + z_y} over the family's inputs.
pub fn family_projector_matrix(n: usize) -> Vec<Vec<i64>> {
    let inputs = family_inputs(n);
    inputs
        .iter()
        .map(|x| {
            inputs
                .iter()
                .map(|z| x.iter().zip(z).map(|(a, b)| if (a + b) % 2 == 0 { 1 } else { -1 }).sum())
                .collect()
        })
        .collect()
}

/// One vertex from each antipodal pair of the regular dodecahedron, normalized.
pub fn dodecahedron_directions() -> Vec<BlochVector> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let inv = 1.0 / phi;
    let raw = [
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
        [0.0, inv, phi],
        [0.0, inv, -phi],
        [inv, phi, 0.0],
        [inv, -phi, 0.0],
        [phi, 0.0, inv],
        [phi, 0.0, -inv],
    ];
    raw.iter().map(|v| BlochVector::unit(*v)).collect()
}

/// (1/10) Σ_x ⟨A_x ⊗ B_x⟩ with targets along the dodecahedron's vertex directions.
pub fn dodecahedron_witness() -> Witness {
    let targets = dodecahedron_directions().iter().map(|n| observable_from_bloch(n).unwrap()).collect();
    let c_xy = DMatrix::from_fn(10, 10, |x, y| if x == y { 0.1 } else { 0.0 });
    Witness::from_correlators("dodecahedron", c_xy, targets).unwrap()
}

/// Tetrahedron directions that reach √3 on the elegant inequality.
pub fn tetrahedron_directions() -> Vec<BlochVector> {
    [[1.0, -1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0], [-1.0, 1.0, 1.0]]
        .iter()
        .map(|v| BlochVector::unit(*v))
        .collect()
}

pub fn tetrahedron_observables() -> Vec<Observable> {
    tetrahedron_directions().iter().map(|n| observable_from_bloch(n).unwrap()).collect()
}

/// Built-in witness by name: esi, pauli, dodecahedron, family<n> (e.g. family4).
pub fn builtin(name: &str) -> Result<Witness> {
    match name {
        "esi" => Ok(esi_witness()),
        "pauli" => Ok(pauli_witness()),
        "dodecahedron" => Ok(dodecahedron_witness()),
        other => match other.strip_prefix("family").map(str::parse::<usize>) {
            Some(Ok(n)) => family_witness(n),
            _ => Err(invalid(format!("unknown witness '{other}'"))),
        },
    }
}

/// ⟨O ⊗ O'⟩ for a two-party state, a convenience used by the examples.
pub fn correlator(state: &HermitianOperator, a: &Observable, b: &Observable) -> f64 {
    state.inner(&kron(a.op(), b.op()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn esi_strategy_values_match_reference_table() {
        let w = esi_witness();
        let cases: [([usize; 4], [f64; 3]); 4] = [
            ([0, 0, 0, 0], [0.0, 0.0, 0.0]),
            ([0, 1, 1, 1], [0.5, 0.5, 0.5]),
            ([0, 0, 0, 1], [0.5, 0.5, -0.5]),
            ([0, 1, 1, 0], [0.0, 0.0, 1.0]),
        ];
        for (out, t_ref) in cases {
            let (t, t0) = w.t_vector(&DeterministicStrategy::new(&out).unwrap());
            assert_eq!(t0, 0.0);
            for (a, b) in t.iter().zip(t_ref) {
                assert!((a - b).abs() < 1e-15, "{out:?}: {t:?}");
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_witness() {
        let w = esi_witness();
        let back = Witness::from_json(&w.to_json().unwrap()).unwrap();
        assert_eq!(back.n_x(), 4);
        assert!(back.full_correlation().is_some());
        assert!((lhs_bound(&back).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn family_inputs_start_with_zero() {
        let inputs = family_inputs(4);
        assert_eq!(inputs.len(), 8);
        assert!(inputs.iter().all(|x| x[0] == 0 && x.len() == 4));
        assert_eq!(inputs[1], vec![0, 0, 0, 1]);
    }
}
