//! Catalog of vectorial dual-bent functions F : V_n^(p) → F_{p^m}, Walsh
//! transforms, weak-regularity classification, vectorial-dual recovery, and
//! the full verification report for the two sign regimes.
//!
//! A function is kept as its full value table over the domain (every
//! downstream sum sweeps the whole domain anyway). Building an instance
//! classifies all q−1 component functions F_c(x) = Tr_{p^m/p}(c·F(x)) from
//! their Walsh spectra W_f(a) = Σ_x ζ_p^{f(x)−⟨a,x⟩}, recovers the vectorial
//! dual F* from the component duals through the index map c ↦ c^{1−d}, and
//! re-verifies every defining identity on the finished tables.
//!
//! Sign regimes:
//! * regime I: every component sign equals a constant ε ∈ {±1}
//!   (needs 2 | n, t | n_j, t | m, m ≤ n/2);
//! * regime II: component signs are υ·η_m(c) with υ ∈ {±ε^m}
//!   (needs 2 | (n−m), n ≥ 3m).

use crate::characters::{epsilon_const, unit_roots};
use crate::error::{Error, Result};
use crate::field::{Embedding, ExtField};
use crate::phase::UnitPhase;
use crate::space::VectorSpace;
use crate::{sum_tol, Complex};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    I,
    II,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::I => f.write_str("I"),
            Condition::II => f.write_str("II"),
        }
    }
}

/// Family parameters; element codes refer to the field named in each variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyParams {
    /// F(x₁,x₂) = Tr_{p^{n'}/p^m}(e·x₁·x₂^u) on F_{p^{n'}} × F_{p^{n'}};
    /// e is a code in F_{p^{n'}}.
    PairMonomial { half_degree: u32, u: u64, e: u32 },
    /// F(x) = Tr_{p^n/p^m}(e·x²) on F_{p^n}; e is a code in F_{p^n}.
    ExtSquare { n: u32, e: u32 },
    /// F(x₁,…,x_s) = Σ α_i·x_i² on F_{p^m}^s; α_i are codes in F_{p^m}.
    DiagQuadratic { alphas: Vec<u32> },
    /// F(x) = Tr_{p^{n/2}/p^m}(e·x^{p^{n/2}+1}) on F_{p^n}; e is a code in
    /// F_{p^n} constrained to the half-field.
    UnitaryForm { n: u32, e: u32 },
    /// F(x,y₁,y₂) = H(Tr_{p^{n''}/p^m}(γ·y₂²), x) + Tr_{p^{n''}/p^m}(β·y₁·L(y₂))
    /// on F_{p^{n'}} × F_{p^{n''}} × F_{p^{n''}}, with H(i,x) = Tr(α·x²)
    /// selecting α₁/α₂/α₃ by the quadratic class of i, and L a p^m-polynomial
    /// permutation with the given coefficients.
    CompositeMaiorana {
        n1: u32,
        n2: u32,
        alphas: [u32; 3],
        beta: u32,
        gamma: u32,
        l_coeffs: Vec<u32>,
    },
}

impl FamilyParams {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilyParams::PairMonomial { .. } => "pair_monomial",
            FamilyParams::ExtSquare { .. } => "ext_square",
            FamilyParams::DiagQuadratic { .. } => "diag_quadratic",
            FamilyParams::UnitaryForm { .. } => "unitary_form",
            FamilyParams::CompositeMaiorana { .. } => "composite_maiorana",
        }
    }
}

/// A cataloged function with its predicted metadata (l, d, regime, sign).
#[derive(Debug)]
pub struct BentSpec {
    p: u64,
    m: u32,
    t: u32,
    params: FamilyParams,
    space: Arc<VectorSpace>,
    codomain: Arc<ExtField>,
    scalar: Arc<ExtField>,
    /// Embedding of the scalar field F_{p^t} into each component field.
    scalar_up: Vec<Embedding>,
    /// Embedding of the scalar field into the codomain.
    scalar_in_codomain: Embedding,
    /// Embedding of the codomain into the field(s) a trace is taken from,
    /// when the family needs one.
    trace_embeddings: Vec<Embedding>,
    l: u64,
    d: u64,
    condition: Condition,
    sign: UnitPhase,
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

pub(crate) fn mod_inverse(a: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (s0, s1) = (s1, s0 - quo * s1);
    }
    if r0 == 1 {
        Some(s0.rem_euclid(q as i128) as u64)
    } else {
        None
    }
}

/// y ↦ y^{p^m} inside `field`.
fn frobenius_pow(field: &ExtField, y: u32, m: u32) -> u32 {
    let mut z = y;
    for _ in 0..m {
        z = field.frobenius(z);
    }
    z
}

/// Build a cataloged vectorial dual-bent function. Every family constraint
/// is validated here; the returned spec carries the predicted l, d, regime
/// and sign from the catalog formulas.
pub fn make_bent(p: u64, m: u32, t: u32, params: FamilyParams) -> Result<BentSpec> {
    if m == 0 || t == 0 {
        return Err(Error::Constraint("m and t must be ≥ 1".into()));
    }
    if m % t != 0 {
        return Err(Error::Constraint(format!(
            "t must divide m (got t={t}, m={m})"
        )));
    }
    let codomain = ExtField::new(p, m)?;
    let scalar = ExtField::new(p, t)?;
    let eps = epsilon_const(p);
    let qm_1 = codomain.group_order();

    let (space, trace_embeddings, l, d, condition, sign): (
        Arc<VectorSpace>,
        Vec<Embedding>,
        u64,
        u64,
        Condition,
        UnitPhase,
    ) = match &params {
        FamilyParams::ExtSquare { n, e } => {
            let n = *n;
            if n % m != 0 {
                return Err(Error::Constraint(format!(
                    "m must divide n (got m={m}, n={n})"
                )));
            }
            let ratio = n / m;
            if ratio < 2 {
                return Err(Error::Constraint(
                    "n/m must be ≥ 2 (even for regime I, odd ≥ 3 for regime II)".into(),
                ));
            }
            let space = VectorSpace::new(p, &[n])?;
            let dom = space.components()[0].clone();
            let e = dom.check_code(*e as u64)?;
            if e == 0 {
                return Err(Error::Constraint("e must be nonzero".into()));
            }
            let emb = Embedding::new(codomain.clone(), dom.clone())?;
            let eta_e = dom.eta(e);
            if ratio % 2 == 0 {
                // ε = −ε^n η_n(e)
                let sign = eps
                    .pow(n as i64)
                    .mul(UnitPhase::MINUS_ONE)
                    .mul(UnitPhase::from_sign(eta_e));
                (space, vec![emb], 2, 2, Condition::I, sign)
            } else {
                if ratio < 3 {
                    return Err(Error::Constraint("odd n/m must be ≥ 3".into()));
                }
                // υ = (−1)^{n−1} ε^n η_n(e)
                let sign = eps
                    .pow(n as i64)
                    .mul(UnitPhase::MINUS_ONE.pow(n as i64 - 1))
                    .mul(UnitPhase::from_sign(eta_e));
                (space, vec![emb], 2, 2, Condition::II, sign)
            }
        }
        FamilyParams::PairMonomial { half_degree, u, e } => {
            let np = *half_degree;
            if np % m != 0 || np == m {
                return Err(Error::Constraint(format!(
                    "m must properly divide n' (got m={m}, n'={np})"
                )));
            }
            let space = VectorSpace::new(p, &[np, np])?;
            let dom = space.components()[0].clone();
            let e = dom.check_code(*e as u64)?;
            if e == 0 {
                return Err(Error::Constraint("e must be nonzero".into()));
            }
            let group = dom.group_order();
            if gcd64(*u % group, group) != 1 {
                return Err(Error::Constraint(format!(
                    "u must be coprime to p^n'−1 (got u={u}, p^n'−1={group})"
                )));
            }
            let u_inv = mod_inverse(*u % group, group).expect("coprime");
            let emb = Embedding::new(codomain.clone(), dom.clone())?;
            (
                space,
                vec![emb],
                1 + *u,
                1 + u_inv,
                Condition::I,
                UnitPhase::ONE,
            )
        }
        FamilyParams::DiagQuadratic { alphas } => {
            let s = alphas.len() as u32;
            if s < 2 {
                return Err(Error::Constraint("the diagonal form needs s ≥ 2".into()));
            }
            for &a in alphas {
                codomain.check_code(a as u64)?;
                if a == 0 {
                    return Err(Error::Constraint("all α_i must be nonzero".into()));
                }
            }
            let space = VectorSpace::new(p, &vec![m; s as usize])?;
            let prod = alphas.iter().fold(1u32, |acc, &a| codomain.mul(acc, a));
            let eta_prod = codomain.eta(prod);
            let n = m as i64 * s as i64;
            let (cond, sign) = if s % 2 == 0 {
                // ε = ε^{ms} η_m(α₁⋯α_s)
                (Condition::I, eps.pow(n).mul(UnitPhase::from_sign(eta_prod)))
            } else {
                // υ = (−1)^{m−1} ε^{ms} η_m(α₁⋯α_s)
                (
                    Condition::II,
                    eps.pow(n)
                        .mul(UnitPhase::MINUS_ONE.pow(m as i64 - 1))
                        .mul(UnitPhase::from_sign(eta_prod)),
                )
            };
            (space, Vec::new(), 2, 2, cond, sign)
        }
        FamilyParams::UnitaryForm { n, e } => {
            let n = *n;
            if n % m != 0 || (n / m) % 2 != 0 {
                return Err(Error::Constraint(format!(
                    "n/m must be even (got m={m}, n={n})"
                )));
            }
            let space = VectorSpace::new(p, &[n])?;
            let dom = space.components()[0].clone();
            let e = dom.check_code(*e as u64)?;
            if e == 0 {
                return Err(Error::Constraint("e must be nonzero".into()));
            }
            if frobenius_pow(&dom, e, n / 2) != e {
                return Err(Error::Constraint(
                    "e must lie in the half field F_{p^{n/2}} (fixed by x ↦ x^{p^{n/2}})".into(),
                ));
            }
            let emb = Embedding::new(codomain.clone(), dom.clone())?;
            (space, vec![emb], 2, 2, Condition::I, UnitPhase::MINUS_ONE)
        }
        FamilyParams::CompositeMaiorana {
            n1,
            n2,
            alphas,
            beta,
            gamma,
            l_coeffs,
        } => {
            let (n1, n2) = (*n1, *n2);
            if n1 % m != 0 || (n1 / m) % 2 != 1 {
                return Err(Error::Constraint(format!(
                    "n'/m must be odd (got m={m}, n'={n1})"
                )));
            }
            if n2 % m != 0 {
                return Err(Error::Constraint(format!(
                    "m must divide n'' (got m={m}, n''={n2})"
                )));
            }
            let space = VectorSpace::new(p, &[n1, n2, n2])?;
            let f1 = space.components()[0].clone();
            let f2 = space.components()[1].clone();
            for &a in alphas {
                f1.check_code(a as u64)?;
                if a == 0 {
                    return Err(Error::Constraint("α₁, α₂, α₃ must be nonzero".into()));
                }
            }
            let classes: Vec<i64> = alphas.iter().map(|&a| f1.eta(a)).collect();
            if !(classes.iter().all(|&c| c == 1) || classes.iter().all(|&c| c == -1)) {
                return Err(Error::Constraint(
                    "α₁, α₂, α₃ must be all squares or all non-squares in F_{p^{n'}}".into(),
                ));
            }
            let beta = f2.check_code(*beta as u64)?;
            let gamma = f2.check_code(*gamma as u64)?;
            if beta == 0 || gamma == 0 {
                return Err(Error::Constraint("β and γ must be nonzero".into()));
            }
            if l_coeffs.is_empty() {
                return Err(Error::Constraint("L needs at least one coefficient".into()));
            }
            for &c in l_coeffs {
                f2.check_code(c as u64)?;
            }
            // permutation check by exhaustive image count
            let mut seen = vec![false; f2.size() as usize];
            let mut distinct = 0u64;
            for y in f2.enumerate() {
                let img = eval_linearized(&f2, l_coeffs, m, y);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    distinct += 1;
                }
            }
            if distinct != f2.size() {
                return Err(Error::Constraint(
                    "L(x) = Σ aᵢ x^{p^{mi}} must permute F_{p^{n''}}".into(),
                ));
            }
            // υ = (−1)^{n'−1} ε^{n'} η_{n'}(α₁)
            let sign = eps
                .pow(n1 as i64)
                .mul(UnitPhase::MINUS_ONE.pow(n1 as i64 - 1))
                .mul(UnitPhase::from_sign(f1.eta(alphas[0])));
            let emb1 = Embedding::new(codomain.clone(), f1)?;
            let emb2 = Embedding::new(codomain.clone(), f2)?;
            (space, vec![emb1, emb2], 2, 2, Condition::II, sign)
        }
    };

    let n = space.dimension();
    for &nj in space.degrees() {
        if nj % t != 0 {
            return Err(Error::Constraint(format!(
                "t must divide every component degree (t={t}, n_j={nj})"
            )));
        }
    }
    match condition {
        Condition::I => {
            if n % 2 != 0 {
                return Err(Error::Constraint("regime I requires 2 | n".into()));
            }
            if 2 * m > n {
                return Err(Error::Constraint("regime I requires m ≤ n/2".into()));
            }
            if !sign.is_real() {
                return Err(Error::Constraint(
                    "regime I sign must be real (internal prediction error)".into(),
                ));
            }
        }
        Condition::II => {
            if (n - m) % 2 != 0 {
                return Err(Error::Constraint("regime II requires 2 | (n−m)".into()));
            }
            if n < 3 * m {
                return Err(Error::Constraint("regime II requires n ≥ 3m".into()));
            }
            // υ ∈ {±ε^m}
            let ratio = sign.mul(epsilon_const(p).pow(m as i64).conj());
            if !ratio.is_real() {
                return Err(Error::Constraint(
                    "regime II sign must lie in {±ε^m} (internal prediction error)".into(),
                ));
            }
        }
    }
    // exponent bookkeeping: gcd(d−1, p^m−1) = 1, (l−1)(d−1) ≡ 1, d even
    if gcd64((d - 1) % qm_1, qm_1) != 1 {
        return Err(Error::Constraint(format!(
            "gcd(d−1, p^m−1) must be 1 (d={d}, p^m−1={qm_1})"
        )));
    }
    if ((l - 1) % qm_1) * ((d - 1) % qm_1) % qm_1 != 1 % qm_1 {
        return Err(Error::Constraint(format!(
            "(l−1)(d−1) ≡ 1 (mod p^m−1) fails (l={l}, d={d})"
        )));
    }
    if d % 2 != 0 {
        return Err(Error::Constraint(format!("d must be even (d={d})")));
    }

    let scalar_up = space
        .components()
        .iter()
        .map(|fld| Embedding::new(scalar.clone(), fld.clone()))
        .collect::<Result<Vec<_>>>()?;
    let scalar_in_codomain = Embedding::new(scalar.clone(), codomain.clone())?;

    Ok(BentSpec {
        p,
        m,
        t,
        params,
        space,
        codomain,
        scalar,
        scalar_up,
        scalar_in_codomain,
        trace_embeddings,
        l,
        d,
        condition,
        sign,
    })
}

fn eval_linearized(field: &ExtField, coeffs: &[u32], m: u32, y: u32) -> u32 {
    let mut acc = 0u32;
    let mut yp = y;
    for &c in coeffs {
        acc = field.add(acc, field.mul(c, yp));
        yp = frobenius_pow(field, yp, m);
    }
    acc
}

impl BentSpec {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn t(&self) -> u32 {
        self.t
    }
    pub fn l(&self) -> u64 {
        self.l
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn condition(&self) -> Condition {
        self.condition
    }
    /// Predicted sign: ε for regime I, υ for regime II.
    pub fn sign(&self) -> UnitPhase {
        self.sign
    }
    pub fn space(&self) -> &Arc<VectorSpace> {
        &self.space
    }
    /// The standalone codomain field F_{p^m}.
    pub fn codomain(&self) -> &Arc<ExtField> {
        &self.codomain
    }
    pub fn params(&self) -> &FamilyParams {
        &self.params
    }
    /// n = dim V_n^(p).
    pub fn n(&self) -> u32 {
        self.space.dimension()
    }

    /// F(x) as a code in the codomain.
    pub fn eval(&self, x: u64) -> u32 {
        let parts = self.space.parts_of(x);
        match &self.params {
            FamilyParams::ExtSquare { e, .. } => {
                let dom = &self.space.components()[0];
                let y = dom.mul(*e, dom.mul(parts[0], parts[0]));
                self.trace_embeddings[0]
                    .rel_trace(y)
                    .expect("trace lands in subfield")
            }
            FamilyParams::PairMonomial { u, e, .. } => {
                let dom = &self.space.components()[0];
                let x2u = dom.pow(parts[1], *u as i64).expect("nonnegative exponent");
                let y = dom.mul(*e, dom.mul(parts[0], x2u));
                self.trace_embeddings[0]
                    .rel_trace(y)
                    .expect("trace lands in subfield")
            }
            FamilyParams::DiagQuadratic { alphas } => {
                let cod = &self.codomain;
                let mut acc = 0u32;
                for (j, &a) in alphas.iter().enumerate() {
                    acc = cod.add(acc, cod.mul(a, cod.mul(parts[j], parts[j])));
                }
                acc
            }
            FamilyParams::UnitaryForm { n, e } => {
                let dom = &self.space.components()[0];
                let half = n / 2;
                let norm_exp = self.p.pow(half) + 1;
                let w = dom.pow(parts[0], norm_exp as i64).expect("nonnegative");
                let z = dom.mul(*e, w);
                // z lies in F_{p^{n/2}}, so the partial Frobenius sum below is
                // exactly Tr_{p^{n/2}/p^m}(z) computed inside F_{p^n}.
                let steps = half / self.m;
                let mut acc = 0u32;
                let mut y = z;
                for _ in 0..steps {
                    acc = dom.add(acc, y);
                    y = frobenius_pow(dom, y, self.m);
                }
                self.trace_embeddings[0]
                    .down(acc)
                    .expect("trace lands in subfield")
            }
            FamilyParams::CompositeMaiorana {
                alphas,
                beta,
                gamma,
                l_coeffs,
                ..
            } => {
                let f1 = &self.space.components()[0];
                let f2 = &self.space.components()[1];
                let (x, y1, y2) = (parts[0], parts[1], parts[2]);
                let sel = self.trace_embeddings[1]
                    .rel_trace(f2.mul(*gamma, f2.mul(y2, y2)))
                    .expect("trace lands in subfield");
                let alpha = if sel == 0 {
                    alphas[0]
                } else if self.codomain.eta(sel) == 1 {
                    alphas[1]
                } else {
                    alphas[2]
                };
                let h = self.trace_embeddings[0]
                    .rel_trace(f1.mul(alpha, f1.mul(x, x)))
                    .expect("trace lands in subfield");
                let ly2 = eval_linearized(f2, l_coeffs, self.m, y2);
                let g = self.trace_embeddings[1]
                    .rel_trace(f2.mul(*beta, f2.mul(y1, ly2)))
                    .expect("trace lands in subfield");
                self.codomain.add(h, g)
            }
        }
    }

    /// Full value table in enumeration order.
    pub fn values_table(&self) -> Vec<u32> {
        self.space.enumerate().map(|x| self.eval(x)).collect()
    }

    /// Component function value F_c(x) = Tr_{p^m/p}(c·F(x)) as a residue.
    pub fn component_of_value(&self, c: u32, fx: u32) -> u32 {
        self.codomain.trace_inner(c, fx)
    }

    /// F_c(x) = ⟨c, F(x)⟩_m at a domain point.
    pub fn component(&self, c: u32, x: u64) -> u32 {
        self.component_of_value(c, self.eval(x))
    }

    /// b·x for b a scalar-field code, acting componentwise.
    pub fn scale_point(&self, b: u32, x: u64) -> u64 {
        let scalars: Vec<u32> = self.scalar_up.iter().map(|emb| emb.up(b)).collect();
        self.space.scale(&scalars, x)
    }

    /// b^e lifted into the codomain.
    fn scalar_pow_in_codomain(&self, b: u32, e: u64) -> u32 {
        let be = self.scalar.pow(b, e as i64).expect("nonnegative");
        self.scalar_in_codomain.up(be)
    }

    /// JSON description: family, parameters (as element codes), predicted
    /// metadata.
    pub fn to_json(&self) -> serde_json::Value {
        let params = match &self.params {
            FamilyParams::ExtSquare { n, e } => serde_json::json!({"n": n, "e": e}),
            FamilyParams::PairMonomial { half_degree, u, e } => {
                serde_json::json!({"half_degree": half_degree, "u": u, "e": e})
            }
            FamilyParams::DiagQuadratic { alphas } => serde_json::json!({ "alphas": alphas }),
            FamilyParams::UnitaryForm { n, e } => serde_json::json!({"n": n, "e": e}),
            FamilyParams::CompositeMaiorana {
                n1,
                n2,
                alphas,
                beta,
                gamma,
                l_coeffs,
            } => serde_json::json!({
                "n1": n1, "n2": n2, "alphas": alphas,
                "beta": beta, "gamma": gamma, "l_coeffs": l_coeffs,
            }),
        };
        serde_json::json!({
            "family": self.params.family_name(),
            "p": self.p,
            "degrees": self.space.degrees(),
            "m": self.m,
            "t": self.t,
            "params": params,
            "l": self.l,
            "d": self.d,
            "condition": self.condition.to_string(),
            "sign": self.sign.to_string(),
        })
    }

    /// Build tables, classify every component, recover the vectorial dual,
    /// and run the verification report.
    pub fn build(self) -> Result<BentInstance> {
        BentInstance::build(self)
    }
}

/// Walsh transform W_f(a) = Σ_x ζ_p^{f(x) − ⟨a,x⟩_n} at a single point.
pub fn walsh_at(space: &VectorSpace, f: &[u32], a: u64) -> Complex {
    let zeta = unit_roots(space.p());
    combine(&walsh_counts(space, f, a), &zeta)
}

/// Full Walsh spectrum, one value per a in enumeration order.
pub fn walsh_all(space: &VectorSpace, f: &[u32]) -> Vec<Complex> {
    let p = space.p();
    let zeta = unit_roots(p);
    let size = space.size();
    if space.num_parts() == 1 {
        // log-ordered sweep: ⟨a,x⟩ = Tr(β^{log a + log x})
        let field = &space.components()[0];
        let q1 = field.group_order();
        let f_log: Vec<u32> = (0..q1).map(|s| f[field.exp(s) as usize]).collect();
        (0..size)
            .into_par_iter()
            .map(|a| {
                let mut counts = vec![0u64; p as usize];
                if a == 0 {
                    for &v in f {
                        counts[v as usize] += 1;
                    }
                } else {
                    counts[f[0] as usize] += 1;
                    let la = field.log_or_sentinel(a as u32) as u64;
                    let p32 = p as u32;
                    for (s, &fv) in f_log.iter().enumerate() {
                        let mut e = la + s as u64;
                        if e >= q1 {
                            e -= q1;
                        }
                        let mut r = fv + p32 - field.trace_of_exp(e);
                        if r >= p32 {
                            r -= p32;
                        }
                        counts[r as usize] += 1;
                    }
                }
                combine(&counts, &zeta)
            })
            .collect()
    } else {
        (0..size)
            .into_par_iter()
            .map(|a| combine(&walsh_counts(space, f, a), &zeta))
            .collect()
    }
}

fn walsh_counts(space: &VectorSpace, f: &[u32], a: u64) -> Vec<u64> {
    let p = space.p() as u32;
    let mut counts = vec![0u64; p as usize];
    for x in space.enumerate() {
        let mut r = f[x as usize] + p - space.inner_product(a, x);
        if r >= p {
            r -= p;
        }
        counts[r as usize] += 1;
    }
    counts
}

fn combine(counts: &[u64], zeta: &[Complex]) -> Complex {
    counts.iter().zip(zeta).map(|(&c, z)| z * c as f64).sum()
}

/// Outcome of classifying one p-ary function from its Walsh spectrum.
pub struct WalshClassification {
    pub is_bent: bool,
    pub is_weakly_regular: bool,
    /// The constant sign ε_f when weakly regular.
    pub sign: Option<UnitPhase>,
    /// Dual table f*(a) as residues mod p (phase of the Walsh value).
    pub dual: Vec<u32>,
    pub max_modulus_residual: f64,
    pub max_phase_residual: f64,
}

/// Classify a p-ary function: bent iff every |W_f(a)| = p^{n/2}; weakly
/// regular iff one sign s ∈ {±1, ±i} fits W_f(a) = s·p^{n/2}·ζ_p^{f*(a)}
/// for all a. A phase candidate is accepted only when its residual is below
/// 0.1·p^{n/2}; distinct candidates differ by at least p^{n/2}·|1−ζ_p|, so
/// acceptance is unambiguous.
pub fn classify_weakly_regular(space: &VectorSpace, f: &[u32]) -> WalshClassification {
    let w = walsh_all(space, f);
    classify_from_walsh(space, &w)
}

pub(crate) fn classify_from_walsh(space: &VectorSpace, w: &[Complex]) -> WalshClassification {
    let p = space.p();
    let size = space.size();
    let scale = (size as f64).sqrt();
    let zeta = unit_roots(p);
    let modulus_tol = sum_tol(size);
    let phase_threshold = 0.1 * scale;

    let mut is_bent = true;
    let mut max_modulus_residual = 0f64;
    let mut max_phase_residual = 0f64;
    let mut phases_ok = true;
    let mut dual = vec![0u32; size as usize];
    let mut signs = vec![UnitPhase::ONE; size as usize];

    for (a, wa) in w.iter().enumerate() {
        let mres = (wa.norm() - scale).abs();
        max_modulus_residual = max_modulus_residual.max(mres);
        if mres > modulus_tol {
            is_bent = false;
        }
        let mut best = (UnitPhase::ONE, 0u32, f64::INFINITY);
        for s in UnitPhase::ALL {
            let sc = s.to_complex() * scale;
            for (j, z) in zeta.iter().enumerate() {
                let res = (wa - sc * z).norm();
                if res < best.2 {
                    best = (s, j as u32, res);
                }
            }
        }
        max_phase_residual = max_phase_residual.max(best.2);
        if best.2 > phase_threshold {
            phases_ok = false;
        }
        signs[a] = best.0;
        dual[a] = best.1;
    }
    let uniform = signs.windows(2).all(|w| w[0] == w[1]);
    let is_weakly_regular = is_bent && phases_ok && uniform;
    WalshClassification {
        is_bent,
        is_weakly_regular,
        sign: if is_weakly_regular {
            Some(signs[0])
        } else {
            None
        },
        dual,
        max_modulus_residual,
        max_phase_residual,
    }
}

/// Value and dual tables of a verified instance.
pub struct BentTables {
    /// F(x) codes in the codomain, enumeration order.
    pub values: Vec<u32>,
    /// F*(a) codes in the codomain.
    pub dual: Vec<u32>,
    /// Component signs ε_{F_c}, indexed by c−1 for c ∈ 1..q_m.
    pub comp_signs: Vec<UnitPhase>,
    /// Component signs of the dual, same indexing.
    pub dual_comp_signs: Vec<UnitPhase>,
}

/// One verification check: the identity it reproduces, whether the tables
/// satisfy it, the worst residual seen, and a counterexample when they don't.
pub struct CheckOutcome {
    pub name: &'static str,
    pub identity: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub detail: String,
}

pub struct ConditionReport {
    pub checks: Vec<CheckOutcome>,
    pub all_pass: bool,
}

impl ConditionReport {
    fn push(
        &mut self,
        name: &'static str,
        identity: &'static str,
        passed: bool,
        max_residual: f64,
        detail: String,
    ) {
        self.all_pass &= passed;
        self.checks.push(CheckOutcome {
            name,
            identity,
            passed,
            max_residual,
            detail,
        });
    }
}

/// A cataloged function together with its verified tables and report.
pub struct BentInstance {
    pub spec: BentSpec,
    pub tables: BentTables,
    pub report: ConditionReport,
}

impl BentInstance {
    fn build(spec: BentSpec) -> Result<BentInstance> {
        let space = spec.space.clone();
        let cod = spec.codomain.clone();
        let size = space.size();
        let qm = cod.size();
        let qm_1 = qm - 1;

        let values = spec.values_table();

        // classify every component F_c, c ∈ F_{p^m}^*
        let mut comp_duals: Vec<Vec<u32>> = Vec::with_capacity(qm_1 as usize);
        let mut comp_signs: Vec<UnitPhase> = Vec::with_capacity(qm_1 as usize);
        let mut worst_modulus = 0f64;
        let mut worst_phase = 0f64;
        let mut parseval_residual = 0f64;
        let target_energy = (size as f64) * (size as f64);
        for c in 1..=qm_1 {
            let table: Vec<u32> = values
                .iter()
                .map(|&fx| cod.trace_inner(c as u32, fx))
                .collect();
            let w = walsh_all(&space, &table);
            let energy: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            parseval_residual = parseval_residual.max((energy - target_energy).abs());
            let cls = classify_from_walsh(&space, &w);
            if !cls.is_bent {
                return Err(Error::NotBent(format!(
                    "component c={c} has |W| ≠ p^(n/2) (worst residual {:.3e})",
                    cls.max_modulus_residual
                )));
            }
            if !cls.is_weakly_regular {
                return Err(Error::NotBent(format!(
                    "component c={c} is bent but not weakly regular"
                )));
            }
            worst_modulus = worst_modulus.max(cls.max_modulus_residual);
            worst_phase = worst_phase.max(cls.max_phase_residual);
            comp_signs.push(cls.sign.unwrap());
            comp_duals.push(cls.dual);
        }

        // recover F*: the unique z with Tr(c^{1−d}·z) = (F_c)*(a) for all c
        let sigma: Vec<u32> = (1..=qm_1)
            .map(|c| cod.pow(c as u32, 1 - spec.d as i64).expect("nonzero base"))
            .collect();
        let mut dual = vec![0u32; size as usize];
        for a in 0..size {
            let mut found = None;
            'zs: for z in 0..qm as u32 {
                for c in 1..=qm_1 {
                    let lhs = cod.trace_inner(sigma[(c - 1) as usize], z);
                    if lhs != comp_duals[(c - 1) as usize][a as usize] {
                        continue 'zs;
                    }
                }
                found = Some(z);
                break;
            }
            dual[a as usize] = found.ok_or_else(|| {
                Error::NotBent(format!(
                    "no consistent vectorial dual value at a={a}: the component duals \
                     do not assemble through c ↦ c^(1−d)"
                ))
            })?;
        }

        // classify the dual's components
        let mut dual_comp_signs = Vec::with_capacity(qm_1 as usize);
        let mut dual_comp_duals: Vec<Vec<u32>> = Vec::with_capacity(qm_1 as usize);
        for c in 1..=qm_1 {
            let table: Vec<u32> = dual
                .iter()
                .map(|&fx| cod.trace_inner(c as u32, fx))
                .collect();
            let cls = classify_weakly_regular(&space, &table);
            if !cls.is_weakly_regular {
                return Err(Error::NotBent(format!(
                    "dual component c={c} is not weakly regular bent"
                )));
            }
            dual_comp_signs.push(cls.sign.unwrap());
            dual_comp_duals.push(cls.dual);
        }

        let tables = BentTables {
            values,
            dual,
            comp_signs,
            dual_comp_signs,
        };
        let mut report = ConditionReport {
            checks: Vec::new(),
            all_pass: true,
        };

        report.push(
            "origin",
            "F(0) = 0 and F*(0) = 0",
            tables.values[0] == 0 && tables.dual[0] == 0,
            0.0,
            format!("F(0)={}, F*(0)={}", tables.values[0], tables.dual[0]),
        );

        let mut scaling_ok = true;
        let mut scaling_detail = String::from("all b, x");
        'scal: for b in 1..spec.scalar.size() as u32 {
            let bl = spec.scalar_pow_in_codomain(b, spec.l);
            for x in space.enumerate() {
                let lhs = tables.values[spec.scale_point(b, x) as usize];
                let rhs = cod.mul(bl, tables.values[x as usize]);
                if lhs != rhs {
                    scaling_ok = false;
                    scaling_detail = format!("fails at b={b}, x={x}");
                    break 'scal;
                }
            }
        }
        report.push(
            "scaling",
            "F(b·x) = b^l·F(x) for b ∈ F_{p^t}*",
            scaling_ok,
            0.0,
            scaling_detail,
        );

        report.push(
            "components-bent",
            "|W_{F_c}(a)| = p^{n/2} for all c ≠ 0, a",
            true,
            worst_modulus,
            format!("{qm_1} components classified"),
        );
        report.push(
            "components-weakly-regular",
            "W_{F_c}(a) = ε_{F_c}·p^{n/2}·ζ_p^{(F_c)*(a)}",
            true,
            worst_phase,
            "single sign per component".into(),
        );
        report.push(
            "parseval",
            "Σ_a |W_{F_c}(a)|² = p^{2n}",
            parseval_residual <= target_energy * 1e-6,
            parseval_residual,
            format!("target {target_energy}"),
        );

        let mut sign_ok = true;
        let mut sign_detail = String::from("all components");
        for c in 1..=qm_1 {
            let predicted = match spec.condition {
                Condition::I => spec.sign,
                Condition::II => spec.sign.mul(UnitPhase::from_sign(cod.eta(c as u32))),
            };
            if tables.comp_signs[(c - 1) as usize] != predicted {
                sign_ok = false;
                sign_detail = format!(
                    "c={c}: recovered {} ≠ predicted {predicted}",
                    tables.comp_signs[(c - 1) as usize]
                );
                break;
            }
        }
        report.push(
            "sign-prediction",
            "ε_{F_c} = ε (regime I) or υ·η_m(c) (regime II)",
            sign_ok,
            0.0,
            sign_detail,
        );

        let mut rel_ok = true;
        let mut rel_detail = String::from("all c, a");
        'rel: for c in 1..=qm_1 {
            for a in 0..size {
                let lhs = comp_duals[(c - 1) as usize][a as usize];
                let rhs = cod.trace_inner(sigma[(c - 1) as usize], tables.dual[a as usize]);
                if lhs != rhs {
                    rel_ok = false;
                    rel_detail = format!("fails at c={c}, a={a}");
                    break 'rel;
                }
            }
        }
        report.push(
            "dual-relation",
            "(F_c)* = (F*)_{c^{1−d}} for all c ∈ F_{p^m}*",
            rel_ok,
            0.0,
            rel_detail,
        );

        let mut dscaling_ok = true;
        let mut dscaling_detail = String::from("all b, a");
        'dscal: for b in 1..spec.scalar.size() as u32 {
            let bd = spec.scalar_pow_in_codomain(b, spec.d);
            for a in space.enumerate() {
                let lhs = tables.dual[spec.scale_point(b, a) as usize];
                let rhs = cod.mul(bd, tables.dual[a as usize]);
                if lhs != rhs {
                    dscaling_ok = false;
                    dscaling_detail = format!("fails at b={b}, a={a}");
                    break 'dscal;
                }
            }
        }
        report.push(
            "dual-scaling",
            "F*(b·a) = b^d·F*(a) for b ∈ F_{p^t}*",
            dscaling_ok,
            0.0,
            dscaling_detail,
        );

        let mut dsign_ok = true;
        let mut dsign_detail = String::from("all components");
        for c in 1..=qm_1 {
            let predicted = match spec.condition {
                Condition::I => spec.sign,
                Condition::II => spec
                    .sign
                    .conj()
                    .mul(UnitPhase::from_sign(cod.eta(c as u32))),
            };
            if tables.dual_comp_signs[(c - 1) as usize] != predicted {
                dsign_ok = false;
                dsign_detail = format!(
                    "c={c}: recovered {} ≠ predicted {predicted}",
                    tables.dual_comp_signs[(c - 1) as usize]
                );
                break;
            }
        }
        report.push(
            "dual-signs",
            "ε_{(F*)_c} = ε (regime I) or υ⁻¹·η_m(c) (regime II)",
            dsign_ok,
            0.0,
            dsign_detail,
        );

        let mut invol_ok = true;
        let mut invol_detail = String::from("all c, x");
        let sigma_l: Vec<u32> = (1..=qm_1)
            .map(|c| cod.pow(c as u32, 1 - spec.l as i64).expect("nonzero base"))
            .collect();
        'inv: for c in 1..=qm_1 {
            let target_c = sigma_l[(c - 1) as usize];
            for x in 0..size {
                let lhs = dual_comp_duals[(c - 1) as usize][x as usize];
                let rhs = cod.trace_inner(target_c, tables.values[x as usize]);
                if lhs != rhs {
                    invol_ok = false;
                    invol_detail = format!("fails at c={c}, x={x}");
                    break 'inv;
                }
            }
        }
        report.push(
            "dual-of-dual",
            "((F*)_c)* = F_{c^{1−l}}",
            invol_ok,
            0.0,
            invol_detail,
        );

        let mut sym_ok = true;
        for a in 0..size {
            if tables.dual[space.neg(a) as usize] != tables.dual[a as usize] {
                sym_ok = false;
                break;
            }
        }
        report.push(
            "dual-even",
            "F*(−a) = F*(a) (d even)",
            sym_ok,
            0.0,
            String::new(),
        );

        Ok(BentInstance {
            spec,
            tables,
            report,
        })
    }

    /// Component residues Tr(c·F(x)) for one c, full table.
    pub fn component_table(&self, c: u32) -> Vec<u32> {
        self.tables
            .values
            .iter()
            .map(|&fx| self.spec.codomain.trace_inner(c, fx))
            .collect()
    }

    /// Counts (N₀, N₁, N₋₁) of η_m(F(x)) over the domain.
    pub fn value_counts(&self) -> (u64, u64, u64) {
        count_eta(&self.spec, &self.tables.values)
    }

    /// Counts (N₀, N₁, N₋₁) of η_m(F*(a)).
    pub fn dual_counts(&self) -> (u64, u64, u64) {
        count_eta(&self.spec, &self.tables.dual)
    }

    pub fn require_condition(&self, cond: Condition) -> Result<()> {
        if self.spec.condition != cond {
            return Err(Error::Constraint(format!(
                "this construction needs a regime-{cond} function, got regime {}",
                self.spec.condition
            )));
        }
        if !self.report.all_pass {
            return Err(Error::Unverified(
                "the verification report has failing checks".into(),
            ));
        }
        Ok(())
    }
}

fn count_eta(spec: &BentSpec, table: &[u32]) -> (u64, u64, u64) {
    let cod = &spec.codomain;
    let (mut n0, mut n1, mut nm1) = (0u64, 0u64, 0u64);
    for &v in table {
        match cod.eta(v) {
            0 => n0 += 1,
            1 => n1 += 1,
            _ => nm1 += 1,
        }
    }
    (n0, n1, nm1)
}

/// The desk-scale battery used by the verification suites: every family in
/// both regimes, all with p^n ≤ 3^6 except the optional large case.
pub fn standard_battery(include_large: bool) -> Result<Vec<BentSpec>> {
    let mut out = vec![
        // regime I
        make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 1 })?,
        make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 2, e: 4 })?, // e non-square
        make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 4, e: 1 })?,
        make_bent(
            3,
            2,
            2,
            FamilyParams::ExtSquare {
                n: 4,
                e: ExtField::new(3, 4)?.alpha(),
            },
        )?,
        make_bent(5, 1, 1, FamilyParams::ExtSquare { n: 2, e: 1 })?,
        make_bent(
            3,
            1,
            1,
            FamilyParams::PairMonomial {
                half_degree: 2,
                u: 1,
                e: 1,
            },
        )?,
        make_bent(
            3,
            1,
            1,
            FamilyParams::PairMonomial {
                half_degree: 2,
                u: 3,
                e: 4,
            },
        )?,
        make_bent(3, 1, 1, FamilyParams::DiagQuadratic { alphas: vec![1, 2] })?,
        make_bent(3, 2, 1, FamilyParams::DiagQuadratic { alphas: vec![4, 1] })?,
        make_bent(5, 1, 1, FamilyParams::DiagQuadratic { alphas: vec![1, 1] })?,
        make_bent(
            3,
            1,
            1,
            FamilyParams::UnitaryForm {
                n: 4,
                e: unitary_e(3, 4)?,
            },
        )?,
        make_bent(
            3,
            2,
            2,
            FamilyParams::UnitaryForm {
                n: 4,
                e: unitary_e(3, 4)?,
            },
        )?,
        // regime II
        make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 3, e: 1 })?,
        make_bent(3, 1, 1, FamilyParams::ExtSquare { n: 5, e: 1 })?,
        make_bent(
            3,
            2,
            2,
            FamilyParams::ExtSquare {
                n: 6,
                e: ExtField::new(3, 6)?.alpha(),
            },
        )?,
        make_bent(5, 1, 1, FamilyParams::ExtSquare { n: 3, e: 1 })?,
        make_bent(
            3,
            1,
            1,
            FamilyParams::DiagQuadratic {
                alphas: vec![1, 1, 2],
            },
        )?,
        make_bent(
            3,
            1,
            1,
            FamilyParams::CompositeMaiorana {
                n1: 1,
                n2: 2,
                alphas: [2, 2, 2],
                beta: 1,
                gamma: 4,
                l_coeffs: vec![0, 1], // L(x) = x³, the Frobenius permutation
            },
        )?,
        make_bent(
            3,
            2,
            2,
            FamilyParams::CompositeMaiorana {
                n1: 2,
                n2: 2,
                alphas: [1, 1, 1],
                beta: 4,
                gamma: 1,
                l_coeffs: vec![3],
            },
        )?,
    ];
    if include_large {
        out.push(make_bent(
            3,
            2,
            2,
            FamilyParams::ExtSquare {
                n: 8,
                e: ExtField::new(3, 8)?.alpha(),
            },
        )?);
    }
    Ok(out)
}

/// Smallest nonzero code in F_{p^n} fixed by x ↦ x^{p^{n/2}} (for the
/// unitary-form battery entries).
fn unitary_e(p: u64, n: u32) -> Result<u32> {
    let f = ExtField::new(p, n)?;
    for e in 1..f.size() as u32 {
        if frobenius_pow(&f, e, n / 2) == e {
            return Ok(e);
        }
    }
    unreachable!("half field always has nonzero elements")
}
