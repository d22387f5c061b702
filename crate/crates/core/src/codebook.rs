//! Codebook constructions from vectorial dual-bent functions, exact
//! cross-correlation spectra, Welch-bound figures, and the sequence-pair
//! cross-correlation distribution.
//!
//! A codebook is stored as an N×K exponent matrix: entry e represents
//! ζ_p^e, and every codeword carries the common scale 1/√K, so the artifact
//! of record is integer-exact. Three constructions:
//!
//! * `build_cd` (regime I): codewords χ_b restricted to
//!   D = {x : η_m(F(x)) = −1};
//! * `build_cd1` (regime II): codewords χ_b restricted to
//!   D₁ = {x ≠ 0 : F(x) = 0};
//! * `build_partial_hadamard` (regime I, single-component domain): columns
//!   of the rows of the p-ary Hadamard matrix selected by the binary row
//!   selection sequence r_m.
//!
//! Spectra come in two modes. `Pairwise` evaluates all N(N−1) inner
//! products and is the ground-truth oracle. `Translate` uses the fact that
//! the character-restriction codebooks satisfy
//! c_{b₁}·c_{b₂}^H = (1/K)·χ_{b₁−b₂}(D): one sum per difference b ≠ 0 with
//! multiplicity N (p^n ordered pairs per difference), which makes the
//! largest desk-scale case feasible.

use crate::bent::{BentInstance, Condition};
use crate::characters::unit_roots;
use crate::error::{Error, Result};
use crate::field::ExtField;
use crate::space::VectorSpace;
use crate::{round_sig, sum_tol, Complex};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Cap on materialized exponent matrices (N·K entries).
const MATRIX_CAP: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Cd,
    Cd1,
    Hadamard,
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Construction> {
        match s {
            "cd" => Ok(Construction::Cd),
            "cd1" => Ok(Construction::Cd1),
            "hadamard" => Ok(Construction::Hadamard),
            other => Err(Error::Invalid(format!(
                "unknown construction '{other}' (expected cd, cd1 or hadamard)"
            ))),
        }
    }
}

/// Generating structure, kept for the translate fast path.
pub enum Structure {
    /// Rows are χ_b over a fixed support set of the space.
    Translate {
        space: Arc<VectorSpace>,
        support: Vec<u64>,
    },
    /// Columns of selected rows of the p-ary Hadamard matrix.
    Hadamard {
        field: Arc<ExtField>,
        selected: Vec<u64>,
    },
    /// Loaded from a file; only pairwise mode applies.
    Opaque,
}

/// N unit-norm codewords of length K over the alphabet {ζ_p^j/√K}.
pub struct Codebook {
    pub p: u64,
    /// N, the codeword count.
    pub num_words: u64,
    /// K, the codeword length.
    pub length: u64,
    /// The b ∈ V_n^(p) (or column index) generating each row.
    pub labels: Vec<u64>,
    /// Exponent matrix: rows[i][k] ∈ [0, p) represents ζ_p^{rows[i][k]}.
    pub rows: Vec<Vec<u16>>,
    pub structure: Structure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMode {
    Pairwise,
    Translate,
}

impl std::str::FromStr for SpectrumMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<SpectrumMode> {
        match s {
            "pairwise" => Ok(SpectrumMode::Pairwise),
            "translate" => Ok(SpectrumMode::Translate),
            other => Err(Error::Invalid(format!(
                "unknown spectrum mode '{other}' (expected pairwise or translate)"
            ))),
        }
    }
}

/// Sorted multiset of cross-correlation magnitudes with Welch figures.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub num_words: u64,
    pub length: u64,
    /// (magnitude, count), ascending magnitude; counts sum to N(N−1).
    pub entries: Vec<(f64, u64)>,
    pub imax: f64,
    pub welch: f64,
    /// imax / welch.
    pub ratio: f64,
}

impl Spectrum {
    fn from_buckets(n: u64, k: u64, buckets: BTreeMap<u64, u64>) -> Result<Spectrum> {
        let entries: Vec<(f64, u64)> = buckets
            .into_iter()
            .map(|(bits, c)| (f64::from_bits(bits), c))
            .collect();
        let imax = entries.last().map(|e| e.0).unwrap_or(0.0);
        let welch = welch_bound(n, k)?;
        let ratio = if welch > 0.0 {
            imax / welch
        } else {
            f64::INFINITY
        };
        Ok(Spectrum {
            num_words: n,
            length: k,
            entries,
            imax,
            welch,
            ratio,
        })
    }

    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Compare against another spectrum: identical counts, magnitudes within
    /// `tol`. Entries are matched in ascending order.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.1 == b.1 && (a.0 - b.0).abs() < tol)
    }
}

/// I_W = √((N−K)/(K(N−1))).
pub fn welch_bound(n: u64, k: u64) -> Result<f64> {
    if k == 0 || n < k {
        return Err(Error::Precondition(format!(
            "the Welch bound needs N ≥ K ≥ 1 (got N={n}, K={k})"
        )));
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok(((n - k) as f64 / (k as f64 * (n - 1) as f64)).sqrt())
}

fn bucket_key(mag: f64) -> u64 {
    round_sig(mag, 12).to_bits()
}

fn check_matrix_size(n: u64, k: u64, p: u64) -> Result<()> {
    if p >= u16::MAX as u64 {
        return Err(Error::TableTooLarge { p, k: 1 });
    }
    if n.checked_mul(k).map_or(true, |c| c > MATRIX_CAP) {
        return Err(Error::TableTooLarge {
            p: n,
            k: k.min(u32::MAX as u64) as u32,
        });
    }
    Ok(())
}

fn translate_codebook(inst: &BentInstance, support: Vec<u64>) -> Result<Codebook> {
    let space = inst.spec.space().clone();
    let n = space.size();
    let k = support.len() as u64;
    check_matrix_size(n, k, space.p())?;
    let rows: Vec<Vec<u16>> = (0..n)
        .into_par_iter()
        .map(|b| {
            support
                .iter()
                .map(|&x| space.inner_product(b, x) as u16)
                .collect()
        })
        .collect();
    Ok(Codebook {
        p: space.p(),
        num_words: n,
        length: k,
        labels: (0..n).collect(),
        rows,
        structure: Structure::Translate { space, support },
    })
}

/// C_D: rows χ_b over D = {x : η_m(F(x)) = −1}; needs a verified regime-I
/// instance. K = (p^n − ε·p^{n/2})(p^m−1)/(2p^m).
pub fn build_cd(inst: &BentInstance) -> Result<Codebook> {
    inst.require_condition(Condition::I)?;
    let cod = inst.spec.codomain();
    let support: Vec<u64> = inst
        .spec
        .space()
        .enumerate()
        .filter(|&x| cod.eta(inst.tables.values[x as usize]) == -1)
        .collect();
    let expected = cd_length(inst)?;
    if support.len() as u64 != expected {
        return Err(Error::Invalid(format!(
            "support size {} disagrees with the count formula {expected}",
            support.len()
        )));
    }
    translate_codebook(inst, support)
}

/// C_{D₁}: rows χ_b over D₁ = {x ≠ 0 : F(x) = 0}; needs a verified
/// regime-II instance. K = p^{n−m} − 1.
pub fn build_cd1(inst: &BentInstance) -> Result<Codebook> {
    inst.require_condition(Condition::II)?;
    let support: Vec<u64> = inst
        .spec
        .space()
        .enumerate()
        .filter(|&x| x != 0 && inst.tables.values[x as usize] == 0)
        .collect();
    let expected = cd1_length(inst);
    if support.len() as u64 != expected {
        return Err(Error::Invalid(format!(
            "support size {} disagrees with p^(n−m)−1 = {expected}",
            support.len()
        )));
    }
    translate_codebook(inst, support)
}

fn cd_length(inst: &BentInstance) -> Result<u64> {
    let p = inst.spec.p();
    let (n, m) = (inst.spec.n(), inst.spec.m());
    let eps =
        inst.spec
            .sign()
            .real_sign()
            .ok_or_else(|| Error::Constraint("regime I sign must be real".into()))? as i128;
    let q = (p as i128).pow(n);
    let r = (p as i128).pow(n / 2);
    let qm = (p as i128).pow(m);
    Ok((((q - eps * r) * (qm - 1)) / (2 * qm)) as u64)
}

fn cd1_length(inst: &BentInstance) -> u64 {
    inst.spec.p().pow(inst.spec.n() - inst.spec.m()) - 1
}

/// Exponent of h_{i,j} in the p^n × p^n Hadamard matrix: 0 on the first row
/// and column, Tr(α^{i+j−2}) otherwise.
fn hadamard_exponent(field: &ExtField, i: u64, j: u64) -> u16 {
    if i == 0 || j == 0 {
        0
    } else {
        field.trace_of_exp((i - 1 + j - 1) % field.group_order()) as u16
    }
}

/// The full p^n × p^n Hadamard exponent matrix.
pub fn hadamard_matrix(p: u64, n: u32) -> Result<Vec<Vec<u16>>> {
    let field = ExtField::new(p, n)?;
    let size = field.size();
    check_matrix_size(size, size, p)?;
    Ok((0..size)
        .map(|i| (0..size).map(|j| hadamard_exponent(&field, i, j)).collect())
        .collect())
}

/// The binary row selection sequence r_m: r_0 = 1, r_k = 1 iff
/// η_m(F(α^{k−1})) = −1. Needs a single-component domain F_{p^n}.
pub fn row_selection(inst: &BentInstance) -> Result<Vec<u8>> {
    inst.require_condition(Condition::I)?;
    let space = inst.spec.space();
    if space.num_parts() != 1 {
        return Err(Error::Constraint(
            "the row selection sequence needs the single-component domain F_{p^n}".into(),
        ));
    }
    let field = &space.components()[0];
    let cod = inst.spec.codomain();
    let mut bits = vec![0u8; space.size() as usize];
    bits[0] = 1;
    for s in 0..field.group_order() {
        let x = field.exp(s) as u64;
        // q_m maps to 1 exactly on the non-square values of F
        bits[(s + 1) as usize] = (cod.eta(inst.tables.values[x as usize]) == -1) as u8;
    }
    Ok(bits)
}

/// C_H(r_m): the (p^n, K) partial Hadamard codebook whose codewords are the
/// columns of the rows selected by r_m, scaled 1/√K.
pub fn build_partial_hadamard(inst: &BentInstance) -> Result<Codebook> {
    let bits = row_selection(inst)?;
    let space = inst.spec.space();
    let field = space.components()[0].clone();
    let selected: Vec<u64> = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i as u64)
        .collect();
    let n = space.size();
    let k = selected.len() as u64;
    let expected = cd_length(inst)? + 1;
    if k != expected {
        return Err(Error::Invalid(format!(
            "selection support {k} disagrees with the count formula {expected}"
        )));
    }
    check_matrix_size(n, k, space.p())?;
    let rows: Vec<Vec<u16>> = (0..n)
        .into_par_iter()
        .map(|j| {
            selected
                .iter()
                .map(|&d| hadamard_exponent(&field, d, j))
                .collect()
        })
        .collect();
    Ok(Codebook {
        p: space.p(),
        num_words: n,
        length: k,
        labels: (0..n).collect(),
        rows,
        structure: Structure::Hadamard { field, selected },
    })
}

impl Codebook {
    /// The codebook definition requires N distinct codewords; a violation is
    /// reported by this predicate rather than blocking construction.
    pub fn rows_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.rows.len());
        self.rows.iter().all(|row| seen.insert(row.as_slice()))
    }

    /// Exact multiset of pairwise cross-correlation magnitudes.
    pub fn spectrum(&self, mode: SpectrumMode) -> Result<Spectrum> {
        match mode {
            SpectrumMode::Pairwise => self.spectrum_pairwise(),
            SpectrumMode::Translate => self.spectrum_translate(),
        }
    }

    fn spectrum_pairwise(&self) -> Result<Spectrum> {
        let p = self.p as usize;
        let zeta = unit_roots(self.p);
        let k = self.length as f64;
        let n = self.rows.len();
        let buckets = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut local: BTreeMap<u64, u64> = BTreeMap::new();
                for j in i + 1..n {
                    let mut counts = vec![0u64; p];
                    for (&a, &b) in self.rows[i].iter().zip(&self.rows[j]) {
                        let mut d = a as u32 + self.p as u32 - b as u32;
                        if d >= self.p as u32 {
                            d -= self.p as u32;
                        }
                        counts[d as usize] += 1;
                    }
                    let v: Complex = counts.iter().zip(&zeta).map(|(&c, z)| z * c as f64).sum();
                    // each unordered pair contributes two ordered pairs
                    *local.entry(bucket_key(v.norm() / k)).or_insert(0) += 2;
                }
                local
            })
            .reduce(BTreeMap::new, merge_buckets);
        Spectrum::from_buckets(self.num_words, self.length, buckets)
    }

    fn spectrum_translate(&self) -> Result<Spectrum> {
        let (space, support) = match &self.structure {
            Structure::Translate { space, support } => (space, support),
            Structure::Hadamard { .. } => {
                return Err(Error::Precondition(
                    "translate mode applies to the character-restriction codebooks; \
                     partial Hadamard pairs map through the Hadamard transform instead"
                        .into(),
                ))
            }
            Structure::Opaque => {
                return Err(Error::Precondition(
                    "translate mode needs the generating structure; a codebook loaded \
                     from a file supports pairwise mode only"
                        .into(),
                ))
            }
        };
        let p = space.p() as usize;
        let zeta = unit_roots(space.p());
        let k = self.length as f64;
        let n = self.num_words;
        let buckets = (1..n)
            .into_par_iter()
            .map(|b| {
                let mut counts = vec![0u64; p];
                for &x in support.iter() {
                    counts[space.inner_product(b, x) as usize] += 1;
                }
                let v: Complex = counts.iter().zip(&zeta).map(|(&c, z)| z * c as f64).sum();
                // p^n ordered pairs (b₁, b₂) share each difference b
                let mut local = BTreeMap::new();
                local.insert(bucket_key(v.norm() / k), n);
                local
            })
            .reduce(BTreeMap::new, merge_buckets);
        Spectrum::from_buckets(self.num_words, self.length, buckets)
    }

    /// Serialize to the codebook file schema.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "N": self.num_words,
            "K": self.length,
            "scale": format!("1/sqrt({})", self.length),
            "labels": self.labels,
            "rows": self.rows,
        })
    }

    /// Load a codebook file (opaque structure: pairwise spectra only).
    pub fn from_json(v: &serde_json::Value) -> Result<Codebook> {
        let bad = |m: &str| Error::Invalid(format!("codebook file: {m}"));
        let p = v["p"].as_u64().ok_or_else(|| bad("missing p"))?;
        let n = v["N"].as_u64().ok_or_else(|| bad("missing N"))?;
        let k = v["K"].as_u64().ok_or_else(|| bad("missing K"))?;
        let labels: Vec<u64> = v["labels"]
            .as_array()
            .ok_or_else(|| bad("missing labels"))?
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| bad("bad label")))
            .collect::<Result<_>>()?;
        let rows_v = v["rows"].as_array().ok_or_else(|| bad("missing rows"))?;
        if rows_v.len() as u64 != n || labels.len() as u64 != n {
            return Err(bad("row/label count disagrees with N"));
        }
        let mut rows = Vec::with_capacity(rows_v.len());
        for r in rows_v {
            let row: Vec<u16> = r
                .as_array()
                .ok_or_else(|| bad("bad row"))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .filter(|&e| e < p)
                        .map(|e| e as u16)
                        .ok_or_else(|| bad("exponent out of range"))
                })
                .collect::<Result<_>>()?;
            if row.len() as u64 != k {
                return Err(bad("row length disagrees with K"));
            }
            rows.push(row);
        }
        Ok(Codebook {
            p,
            num_words: n,
            length: k,
            labels,
            rows,
            structure: Structure::Opaque,
        })
    }
}

fn merge_buckets(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn push_entry(buckets: &mut BTreeMap<u64, u64>, mag: f64, count: u64) {
    if count > 0 {
        *buckets.entry(bucket_key(mag)).or_insert(0) += count;
    }
}

/// The spectrum predicted by the closed formulas of each construction;
/// counts are exact integers, magnitudes evaluated in double precision.
pub fn closed_spectrum(kind: Construction, inst: &BentInstance) -> Result<Spectrum> {
    let p = inst.spec.p();
    let (n, m) = (inst.spec.n(), inst.spec.m());
    let q = (p as i128).pow(n);
    let qm = (p as i128).pow(m);
    let mut buckets = BTreeMap::new();
    match kind {
        Construction::Cd => {
            inst.require_condition(Condition::I)?;
            let eps = inst.spec.sign().real_sign().expect("regime I") as i128;
            let r = (p as i128).pow(n / 2);
            let k = cd_length(inst)?;
            let scale = (p as f64).powi(n as i32 / 2) / (2.0 * qm as f64 * k as f64);
            // small magnitude: F*(b) = 0 or η(F*(b)) = 1; large: η = −1
            let count_small = (q * q * (qm + 1) + eps * q * r * (qm - 1)) / (2 * qm) - q;
            let count_large = (q * q - eps * q * r) * (qm - 1) / (2 * qm);
            push_entry(&mut buckets, (qm - 1) as f64 * scale, count_small as u64);
            push_entry(&mut buckets, (qm + 1) as f64 * scale, count_large as u64);
            Spectrum::from_buckets(q as u64, k, buckets)
        }
        Construction::Cd1 => {
            inst.require_condition(Condition::II)?;
            let k = cd1_length(inst);
            // A = υ·(−1)^{m−1}·ε^m·p^{(n−m)/2}, a real signed integer
            let sgn = inst
                .spec
                .sign()
                .mul(crate::characters::quad_gauss_unit(p, m))
                .real_sign()
                .expect("regime II product sign is real");
            let a_val = sgn as f64 * (p as f64).powi((n - m) as i32 / 2);
            let ctx = crate::sums::SumContext::new(inst);
            let dual_counts = ctx.counts_closed_dual()?;
            let count_zero = q * q / qm - q;
            push_entry(&mut buckets, 1.0 / k as f64, count_zero as u64);
            push_entry(
                &mut buckets,
                (a_val - 1.0).abs() / k as f64,
                q as u64 * dual_counts.n1,
            );
            push_entry(
                &mut buckets,
                (a_val + 1.0).abs() / k as f64,
                q as u64 * dual_counts.n_minus1,
            );
            Spectrum::from_buckets(q as u64, k, buckets)
        }
        Construction::Hadamard => {
            inst.require_condition(Condition::I)?;
            if inst.spec.space().num_parts() != 1 {
                return Err(Error::Constraint(
                    "the partial Hadamard construction needs the domain F_{p^n}".into(),
                ));
            }
            let eps = inst.spec.sign().real_sign().expect("regime I") as i128;
            let k = cd_length(inst)? + 1;
            let (c1, c2) = seq_closed_counts(p, n, m, eps);
            let rr = (p as f64).powi(n as i32 / 2);
            let qmf = qm as f64;
            let e = eps as f64;
            let v1 = ((qmf - 1.0) / qmf * e * rr - 2.0).abs() / (2.0 * k as f64);
            let v2 = (-(qmf + 1.0) / qmf * e * rr - 2.0).abs() / (2.0 * k as f64);
            push_entry(&mut buckets, v1, (q * c1) as u64);
            push_entry(&mut buckets, v2, (q * c2) as u64);
            Spectrum::from_buckets(q as u64, k, buckets)
        }
    }
}

/// Frequencies of the two C(τ) values over τ ∈ [0, p^n−2]:
/// value₁ = (p^m−1)/p^m·ε·p^{n/2} − 1 and value₂ = −(p^m+1)/p^m·ε·p^{n/2} − 1.
fn seq_closed_counts(p: u64, n: u32, m: u32, eps: i128) -> (i128, i128) {
    let q = (p as i128).pow(n);
    let r = (p as i128).pow(n / 2);
    let qm = (p as i128).pow(m);
    let c1 = -1 + ((qm + 1) * q + eps * r * (qm - 1)) / (2 * qm);
    let c2 = (q - eps * r) * (qm - 1) / (2 * qm);
    (c1, c2)
}

/// Cross-correlation distribution of the m-sequence Tr(α^t) against the
/// binary sequence q_m(F(α^t)).
pub struct SeqCrossCorr {
    /// Distinct C(τ) values with multiplicities (direct computation).
    pub observed: Vec<(Complex, u64)>,
    /// The predicted two (value, count) pairs, ascending by value.
    pub predicted: Vec<(f64, u64)>,
}

impl SeqCrossCorr {
    /// Direct distribution equals the predicted one (values within `tol`).
    pub fn matches(&self, tol: f64) -> bool {
        if self.observed.len() != self.predicted.len() {
            return false;
        }
        let mut obs: Vec<(f64, u64)> = self.observed.iter().map(|(v, c)| (v.re, *c)).collect();
        obs.sort_by(|a, b| a.0.total_cmp(&b.0));
        obs.iter()
            .zip(&self.predicted)
            .all(|(o, p)| o.1 == p.1 && (o.0 - p.0).abs() < tol)
            && self.observed.iter().all(|(v, _)| v.im.abs() < tol)
    }
}

/// C(τ) = Σ_{x∈F*} χ₁(α^τ·x)·(−1)^{q_m(F(x))} for every τ, with the
/// two-valued prediction. Needs a regime-I instance on F_{p^n}.
pub fn seq_crosscorr(inst: &BentInstance) -> Result<SeqCrossCorr> {
    inst.require_condition(Condition::I)?;
    let space = inst.spec.space();
    if space.num_parts() != 1 {
        return Err(Error::Constraint(
            "the sequence pair needs the single-component domain F_{p^n}".into(),
        ));
    }
    let field = &space.components()[0];
    let cod = inst.spec.codomain();
    let p = space.p() as usize;
    let zeta = unit_roots(space.p());
    let q1 = field.group_order();

    // signs (−1)^{q_m(F(x))} in log order of x
    let sign_log: Vec<i64> = (0..q1)
        .map(|s| {
            let x = field.exp(s) as u64;
            if cod.eta(inst.tables.values[x as usize]) == -1 {
                -1
            } else {
                1
            }
        })
        .collect();

    let mut dist: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for tau in 0..q1 {
        // a·x = β^{τ+s}: bucket signed counts per trace residue
        let mut signed = vec![0i64; p];
        for (s, &sg) in sign_log.iter().enumerate() {
            let mut e = tau + s as u64;
            if e >= q1 {
                e -= q1;
            }
            signed[field.trace_of_exp(e) as usize] += sg;
        }
        let v: Complex = (0..p).map(|r| zeta[r] * signed[r] as f64).sum();
        let key = ((v.re * 1e9).round() as i64, (v.im * 1e9).round() as i64);
        *dist.entry(key).or_insert(0) += 1;
    }
    let observed: Vec<(Complex, u64)> = dist
        .into_iter()
        .map(|((re, im), c)| (Complex::new(re as f64 / 1e9, im as f64 / 1e9), c))
        .collect();

    let eps = inst.spec.sign().real_sign().expect("regime I") as i128;
    let (c1, c2) = seq_closed_counts(inst.spec.p(), inst.spec.n(), inst.spec.m(), eps);
    let qm = (inst.spec.p() as f64).powi(inst.spec.m() as i32);
    let r = (inst.spec.p() as f64).powi(inst.spec.n() as i32 / 2);
    let e = eps as f64;
    let mut predicted = vec![
        ((qm - 1.0) / qm * e * r - 1.0, c1 as u64),
        (-(qm + 1.0) / qm * e * r - 1.0, c2 as u64),
    ];
    predicted.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(SeqCrossCorr {
        observed,
        predicted,
    })
}

/// The asymptotic-optimality ratio bounds extracted from each construction's
/// proof chain. The returned value is NaN when 1 − c/p^m ≤ 0 (the chain's
/// final bound is not a real number there).
pub fn ratio_bound(kind: Construction, p: u64, m: u32) -> f64 {
    let pm = (p as f64).powi(m as i32);
    let c = match kind {
        Construction::Cd => 2.0,
        Construction::Cd1 => 1.0,
        Construction::Hadamard => 4.0,
    };
    (1.0 / (1.0 - c / pm)).sqrt()
}

/// Serialize a spectrum to the file schema (12 significant digits).
pub fn spectrum_to_json(s: &Spectrum) -> serde_json::Value {
    serde_json::json!({
        "N": s.num_words,
        "K": s.length,
        "imax": round_sig(s.imax, 12),
        "welch": round_sig(s.welch, 12),
        "ratio": round_sig(s.ratio, 12),
        "entries": s.entries.iter().map(|(mag, count)| {
            serde_json::json!({"magnitude": round_sig(*mag, 12), "count": count})
        }).collect::<Vec<_>>(),
    })
}

/// Pairwise-vs-closed comparison tolerance for magnitudes scaled by 1/K.
pub fn spectrum_tol(k: u64) -> f64 {
    sum_tol(k) / k as f64 + 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bent::{make_bent, FamilyParams};

    fn cd_9_4() -> Codebook {
        // Table-style instance: p=3, n=2, m=1, e non-square → ε = −1, K = 4
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })
            .unwrap()
            .build()
            .unwrap();
        build_cd(&inst).unwrap()
    }

    #[test]
    fn welch_examples() {
        assert!((welch_bound(9, 4).unwrap() - (5f64 / 32.0).sqrt()).abs() < 1e-12);
        assert_eq!(welch_bound(7, 7).unwrap(), 0.0);
        assert!(welch_bound(4, 9).is_err());
        assert!((welch_bound(6561, 2880).unwrap() - 0.0139584).abs() < 1e-6);
    }

    #[test]
    fn cd_small_instance() {
        let cb = cd_9_4();
        assert_eq!((cb.num_words, cb.length), (9, 4));
        assert!(cb.rows_distinct());
        let s = cb.spectrum(SpectrumMode::Pairwise).unwrap();
        assert_eq!(s.total_count(), 72);
        assert_eq!(s.entries.len(), 2);
        assert!((s.entries[0].0 - 0.25).abs() < 1e-12 && s.entries[0].1 == 36);
        assert!((s.entries[1].0 - 0.5).abs() < 1e-12 && s.entries[1].1 == 36);
        assert!((s.imax - 0.5).abs() < 1e-12);
        assert!((s.welch - 0.39528470752).abs() < 1e-9);
        assert!(s.imax >= s.welch);

        let t = cb.spectrum(SpectrumMode::Translate).unwrap();
        assert!(s.matches(&t, 1e-9));

        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })
            .unwrap()
            .build()
            .unwrap();
        let closed = closed_spectrum(Construction::Cd, &inst).unwrap();
        assert!(s.matches(&closed, spectrum_tol(4)));
    }

    #[test]
    fn cd_degenerate_small_case_reports_duplicates() {
        // ε = +1, K = 2: well-formed but the rows collide
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 1 })
            .unwrap()
            .build()
            .unwrap();
        let cb = build_cd(&inst).unwrap();
        assert_eq!((cb.num_words, cb.length), (9, 2));
        assert!(!cb.rows_distinct());
    }

    #[test]
    fn cd1_table_instance() {
        // p=3, n=5, m=1 → (243, 80), I_max = 0.125, three magnitudes
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 5, e: 1 })
            .unwrap()
            .build()
            .unwrap();
        let cb = build_cd1(&inst).unwrap();
        assert_eq!((cb.num_words, cb.length), (243, 80));
        assert!(cb.rows_distinct());
        let s = cb.spectrum(SpectrumMode::Translate).unwrap();
        assert_eq!(s.total_count(), 243 * 242);
        assert_eq!(s.entries.len(), 3);
        assert!((s.imax - 0.125).abs() < 1e-12);
        let mags: Vec<f64> = s.entries.iter().map(|e| e.0).collect();
        assert!((mags[0] - 0.0125).abs() < 1e-9);
        assert!((mags[1] - 0.1).abs() < 1e-9);
        assert!((mags[2] - 0.125).abs() < 1e-9);
        let closed = closed_spectrum(Construction::Cd1, &inst).unwrap();
        assert!(s.matches(&closed, spectrum_tol(80)), "{s:?} vs {closed:?}");
        // pairwise ground truth at this size
        let pw = cb.spectrum(SpectrumMode::Pairwise).unwrap();
        assert!(s.matches(&pw, 1e-9));
    }

    #[test]
    fn hadamard_matrix_shape() {
        let h = hadamard_matrix(3, 1).unwrap();
        assert_eq!(h[0], vec![0, 0, 0]);
        // second row: (1, ζ^{Tr(1)}, ζ^{Tr(α)}) = exponents (0, 1, 2) over F_3
        assert_eq!(h[1], vec![0, 1, 2]);
        // column sums vanish for j ≠ 0
        let zeta = unit_roots(3);
        for j in 1..3 {
            let sum: Complex = (0..3).map(|i| zeta[h[i][j] as usize]).sum();
            assert!(sum.norm() < 1e-12);
        }
        let h9 = hadamard_matrix(3, 2).unwrap();
        for j in 1..9 {
            let sum: Complex = (0..9).map(|i| zeta[h9[i][j] as usize]).sum();
            assert!(sum.norm() < 1e-9, "column {j}");
        }
    }

    #[test]
    fn row_selection_support() {
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })
            .unwrap()
            .build()
            .unwrap();
        let bits = row_selection(&inst).unwrap();
        assert_eq!(bits[0], 1);
        assert_eq!(bits.iter().map(|&b| b as u64).sum::<u64>(), 5);
    }

    #[test]
    fn partial_hadamard_small() {
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })
            .unwrap()
            .build()
            .unwrap();
        let cb = build_partial_hadamard(&inst).unwrap();
        assert_eq!((cb.num_words, cb.length), (9, 5));
        assert!(cb.rows_distinct());
        let s = cb.spectrum(SpectrumMode::Pairwise).unwrap();
        assert_eq!(s.total_count(), 72);
        let closed = closed_spectrum(Construction::Hadamard, &inst).unwrap();
        assert!(s.matches(&closed, spectrum_tol(5)), "{s:?} vs {closed:?}");
        // translate mode is meaningless here
        assert!(cb.spectrum(SpectrumMode::Translate).is_err());
    }

    #[test]
    fn partial_hadamard_multiset_identity() {
        // pairwise magnitudes = {(1/2K)|r̂_l| : l = 1..N−1}, multiplicity N
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })
            .unwrap()
            .build()
            .unwrap();
        let cb = build_partial_hadamard(&inst).unwrap();
        let bits = row_selection(&inst).unwrap();
        let field = &inst.spec.space().components()[0];
        let zeta = unit_roots(3);
        let n = cb.num_words;
        let mut buckets = BTreeMap::new();
        for l in 1..n {
            let mut acc = Complex::new(0.0, 0.0);
            for (kk, &bit) in bits.iter().enumerate() {
                let sign = if bit == 1 { -1.0 } else { 1.0 };
                acc += sign * zeta[hadamard_exponent(field, kk as u64, l) as usize];
            }
            push_entry(&mut buckets, acc.norm() / (2.0 * cb.length as f64), n);
        }
        let via_transform = Spectrum::from_buckets(n, cb.length, buckets).unwrap();
        let pairwise = cb.spectrum(SpectrumMode::Pairwise).unwrap();
        assert!(pairwise.matches(&via_transform, 1e-9));
    }

    #[test]
    fn seq_crosscorr_example() {
        // p=3, n=2, m=1, e=1 (ε = +1): values {1, −5} with counts {6, 2}
        let inst = make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 1 })
            .unwrap()
            .build()
            .unwrap();
        let d = seq_crosscorr(&inst).unwrap();
        assert_eq!(d.predicted, vec![(-5.0, 2), (1.0, 6)]);
        assert!(d.matches(1e-9));
        let total: u64 = d.observed.iter().map(|e| e.1).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn ratio_bound_values() {
        assert!((ratio_bound(Construction::Cd, 3, 1) - 3f64.sqrt()).abs() < 1e-12);
        assert!((ratio_bound(Construction::Cd1, 3, 1) - 1.5f64.sqrt()).abs() < 1e-12);
        // 1 − 4/3 < 0: not a real bound
        assert!(ratio_bound(Construction::Hadamard, 3, 1).is_nan());
    }

    #[test]
    fn json_round_trip() {
        let cb = cd_9_4();
        let v = cb.to_json();
        assert_eq!(v["scale"], "1/sqrt(4)");
        let back = Codebook::from_json(&v).unwrap();
        assert_eq!(back.rows, cb.rows);
        assert_eq!(back.num_words, cb.num_words);
        // opaque codebooks still produce the pairwise spectrum
        let s = back.spectrum(SpectrumMode::Pairwise).unwrap();
        assert!((s.imax - 0.5).abs() < 1e-12);
        assert!(back.spectrum(SpectrumMode::Translate).is_err());
    }
}
