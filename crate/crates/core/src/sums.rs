//! The four hybrid character sums and the auxiliary sums and counts they
//! rest on, each computed two ways: direct summation over the domain and the
//! closed form driven by the dual table.
//!
//! With F vectorial dual-bent, ψ a multiplicative character of the codomain
//! F_{p^m} and χ₁ the canonical additive character of V_n^(p):
//!
//! * S  = Σ_x η_m(F(x))·χ₁(ax)   (regime I: S₁, regime II: S₂)
//! * Ŝ  = Σ_x ψ(F(x))·χ₁(ax) for ord(ψ) > 2   (Ŝ₁ / Ŝ₂)
//! * T  = Σ_{F(x)=0} χ₁(ax)
//! * (N₀, N₁, N₋₁) = counts of η_m(F(x)) over the domain, for F and F*
//!
//! Direct sums bucket integer counts per ζ_p-exponent before touching any
//! floating point, so their values are independent of evaluation order.

use crate::bent::{BentInstance, Condition};
use crate::characters::{unit_roots, CharSystem};
use crate::error::{Error, Result};
use crate::{sum_tol, Complex};

/// How a computed value relates to the closed-form value set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Value 0.
    Zero,
    /// Value +p^{n/2} (real).
    PlusMain,
    /// Value −p^{n/2} (real).
    MinusMain,
    /// Any other nonzero closed-form value (Gauss-sum products and their
    /// rational multiples).
    GaussProduct,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Zero => "zero",
            Classification::PlusMain => "plus_main",
            Classification::MinusMain => "minus_main",
            Classification::GaussProduct => "gauss_product",
        };
        f.write_str(s)
    }
}

/// Whether the closed-form preconditions applied to this evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// a ≠ 0: the closed-form value set applies.
    Theorem,
    /// a = 0: the sum collapses to an orthogonality/count value, kept
    /// separate so the two regimes are never conflated.
    TrivialAtZero,
}

/// A hybrid-sum value with its classification against {0, ±p^{n/2}, other}.
#[derive(Debug, Clone, Copy)]
pub struct HybridValue {
    pub value: Complex,
    pub classification: Classification,
    /// p^{n/2}.
    pub main_scale: f64,
    pub regime: Regime,
}

fn classify(value: Complex, main_scale: f64, terms: u64, regime: Regime) -> HybridValue {
    // a candidate in {0, ±p^{n/2}} must be hit within numerical accuracy
    // (far below half the candidate gap, so the pick is unambiguous);
    // everything else is a Gauss-product form
    let tol = sum_tol(terms).max(1e-9 * main_scale).min(0.5 * main_scale);
    let classification = if value.norm() < tol {
        Classification::Zero
    } else if (value - main_scale).norm() < tol {
        Classification::PlusMain
    } else if (value + main_scale).norm() < tol {
        Classification::MinusMain
    } else {
        Classification::GaussProduct
    };
    HybridValue {
        value,
        classification,
        main_scale,
        regime,
    }
}

/// Counts N₀, N₁, N₋₁ of a table under η_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountTriple {
    pub n0: u64,
    pub n1: u64,
    pub n_minus1: u64,
}

impl CountTriple {
    pub fn total(&self) -> u64 {
        self.n0 + self.n1 + self.n_minus1
    }
}

pub enum Method {
    Direct,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    S1,
    SHat1,
    S2,
    SHat2,
    T,
}

impl std::str::FromStr for SumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<SumKind> {
        match s {
            "s1" => Ok(SumKind::S1),
            "s-hat1" | "s_hat1" | "shat1" => Ok(SumKind::SHat1),
            "s2" => Ok(SumKind::S2),
            "s-hat2" | "s_hat2" | "shat2" => Ok(SumKind::SHat2),
            "t" => Ok(SumKind::T),
            other => Err(Error::Invalid(format!(
                "unknown sum kind '{other}' (expected s1, s-hat1, s2, s-hat2 or t)"
            ))),
        }
    }
}

/// Shared context for evaluating the sums of one verified instance.
pub struct SumContext<'a> {
    pub inst: &'a BentInstance,
    chars: CharSystem,
    zeta_p: Vec<Complex>,
}

impl<'a> SumContext<'a> {
    pub fn new(inst: &'a BentInstance) -> SumContext<'a> {
        let chars = CharSystem::new(inst.spec.codomain().clone());
        let zeta_p = unit_roots(inst.spec.p());
        SumContext {
            inst,
            chars,
            zeta_p,
        }
    }

    pub fn chars(&self) -> &CharSystem {
        &self.chars
    }

    fn main_scale(&self) -> f64 {
        (self.inst.spec.space().size() as f64).sqrt()
    }

    fn domain_size(&self) -> u64 {
        self.inst.spec.space().size()
    }

    /// Direct S = Σ_x η_m(F(x))·χ₁(ax), bucketed by inner-product residue.
    fn s_direct(&self, a: u64) -> Complex {
        let space = self.inst.spec.space();
        let cod = self.inst.spec.codomain();
        let p = space.p() as usize;
        let values = &self.inst.tables.values;
        let mut plus = vec![0u64; p];
        let mut minus = vec![0u64; p];
        for x in space.enumerate() {
            match cod.eta(values[x as usize]) {
                1 => plus[space.inner_product(a, x) as usize] += 1,
                -1 => minus[space.inner_product(a, x) as usize] += 1,
                _ => {}
            }
        }
        (0..p)
            .map(|r| self.zeta_p[r] * (plus[r] as f64 - minus[r] as f64))
            .sum()
    }

    /// S₁ (regime I): 0 / +εp^{n/2} / −εp^{n/2} by η_m(F*(a)).
    pub fn s1(&self, a: u64, method: Method) -> Result<HybridValue> {
        self.inst.require_condition(Condition::I)?;
        self.inst.spec.space().check_index(a)?;
        let scale = self.main_scale();
        if a == 0 {
            // Σ_x η_m(F(x)) = N₁ − N₋₁ = 0 under regime I
            let value = match method {
                Method::Direct => self.s_direct(0),
                Method::Closed => {
                    let c = self.counts_closed_f()?;
                    Complex::new(c.n1 as f64 - c.n_minus1 as f64, 0.0)
                }
            };
            return Ok(classify(
                value,
                scale,
                self.domain_size(),
                Regime::TrivialAtZero,
            ));
        }
        let value = match method {
            Method::Direct => self.s_direct(a),
            Method::Closed => {
                let eps = self
                    .inst
                    .spec
                    .sign()
                    .real_sign()
                    .expect("regime I sign is real");
                let fs = self.inst.tables.dual[a as usize];
                match self.inst.spec.codomain().eta(fs) {
                    0 => Complex::new(0.0, 0.0),
                    s => Complex::new(eps as f64 * s as f64 * scale, 0.0),
                }
            }
        };
        Ok(classify(value, scale, self.domain_size(), Regime::Theorem))
    }

    /// S₂ (regime II): two-valued by whether F*(a) = 0.
    pub fn s2(&self, a: u64, method: Method) -> Result<HybridValue> {
        self.inst.require_condition(Condition::II)?;
        self.inst.spec.space().check_index(a)?;
        let scale = self.main_scale();
        if a == 0 {
            let value = match method {
                Method::Direct => self.s_direct(0),
                Method::Closed => {
                    let c = self.counts_closed_f()?;
                    Complex::new(c.n1 as f64 - c.n_minus1 as f64, 0.0)
                }
            };
            return Ok(classify(
                value,
                scale,
                self.domain_size(),
                Regime::TrivialAtZero,
            ));
        }
        let value = match method {
            Method::Direct => self.s_direct(a),
            Method::Closed => {
                let spec = &self.inst.spec;
                let cod = spec.codomain();
                let qm = cod.size() as f64;
                // υ·p^{n/2}·(−1)^{m−1}·ε^m·√(p^m)·η_m(−1), scaled by
                // (p^m−1)/p^m when F*(a) = 0 and by −1/p^m otherwise
                let unit = spec
                    .sign()
                    .mul(crate::characters::quad_gauss_unit(spec.p(), spec.m()));
                let eta_m1 = cod.eta(cod.neg(1)) as f64;
                let base = unit.to_complex() * (scale * qm.sqrt() * eta_m1);
                if self.inst.tables.dual[a as usize] == 0 {
                    base * ((qm - 1.0) / qm)
                } else {
                    base * (-1.0 / qm)
                }
            }
        };
        Ok(classify(value, scale, self.domain_size(), Regime::Theorem))
    }

    /// Direct Ŝ = Σ_x ψ_j(F(x))·χ₁(ax), bucketed by (log F(x), ⟨a,x⟩).
    fn s_hat_direct(&self, j: u64, a: u64) -> Complex {
        let space = self.inst.spec.space();
        let cod = self.inst.spec.codomain();
        let p = space.p() as usize;
        let q1 = cod.group_order();
        let values = &self.inst.tables.values;
        // F(x) = 0 terms vanish: ψ_j(0) = 0 for the nontrivial ψ used here
        let mut counts = vec![0u64; q1 as usize * p];
        for x in space.enumerate() {
            let fx = values[x as usize];
            if fx == 0 {
                continue;
            }
            let s = cod.log_or_sentinel(fx) as usize;
            let r = space.inner_product(a, x) as usize;
            counts[s * p + r] += 1;
        }
        let mut acc = Complex::new(0.0, 0.0);
        for s in 0..q1 as usize {
            for r in 0..p {
                let c = counts[s * p + r];
                if c != 0 {
                    acc += self.chars.mult_char(j, cod.exp(s as u64)) * self.zeta_p[r] * c as f64;
                }
            }
        }
        acc
    }

    /// μ' index for Ŝ₁: the unique solution of μ'^{d−1} = ψ^{−1}, computed
    /// in exponents as −j·(d−1)^{−1} mod (q−1).
    fn mu_prime_index(&self, j: u64) -> u64 {
        let q1 = self.inst.spec.codomain().group_order();
        let dinv = crate::bent::mod_inverse((self.inst.spec.d() - 1) % q1, q1)
            .expect("gcd(d−1, q−1) = 1 was checked at construction");
        ((q1 - j % q1) % q1) * dinv % q1
    }

    /// μ' index for Ŝ₂: the unique solution of μ'^{d−1} = ψ^{−1}·η_m.
    fn mu_prime_index_eta(&self, j: u64) -> u64 {
        let q1 = self.inst.spec.codomain().group_order();
        let dinv = crate::bent::mod_inverse((self.inst.spec.d() - 1) % q1, q1)
            .expect("gcd(d−1, q−1) = 1 was checked at construction");
        ((q1 - j % q1 + q1 / 2) % q1) * dinv % q1
    }

    fn require_psi_order(&self, j: u64) -> Result<()> {
        if self.chars.char_order(j) <= 2 {
            return Err(Error::Precondition(format!(
                "ord(ψ_{j}) must exceed 2 (use the quadratic-character sum for η_m)"
            )));
        }
        Ok(())
    }

    fn require_nonzero_a(&self, a: u64, what: &str) -> Result<()> {
        self.inst.spec.space().check_index(a)?;
        if a == 0 {
            return Err(Error::Precondition(format!(
                "{what} requires a ≠ 0; the closed-form value set excludes a = 0"
            )));
        }
        Ok(())
    }

    /// Ŝ₁ (regime I, ord(ψ) > 2): 0 when F*(a) = 0, otherwise
    /// (1/p^m)·ε·p^{n/2}·G(ψ,λ₁)·ψ(−1)·G(μ̄',λ₁)·μ'(F*(a)).
    pub fn s_hat1(&self, j: u64, a: u64, method: Method) -> Result<HybridValue> {
        self.inst.require_condition(Condition::I)?;
        self.require_psi_order(j)?;
        self.require_nonzero_a(a, "Ŝ₁")?;
        let scale = self.main_scale();
        let value = match method {
            Method::Direct => self.s_hat_direct(j, a),
            Method::Closed => {
                let fs = self.inst.tables.dual[a as usize];
                if fs == 0 {
                    Complex::new(0.0, 0.0)
                } else {
                    let cod = self.inst.spec.codomain();
                    let qm = cod.size() as f64;
                    let q1 = cod.group_order();
                    let eps = self.inst.spec.sign().real_sign().expect("regime I") as f64;
                    let mu = self.mu_prime_index(j);
                    let g_psi = self.chars.gauss_sum(j, 1);
                    let g_mu_conj = self.chars.gauss_sum((q1 - mu) % q1, 1);
                    let psi_m1 = self.chars.mult_char(j, cod.neg(1));
                    eps * scale / qm * g_psi * psi_m1 * g_mu_conj * self.chars.mult_char(mu, fs)
                }
            }
        };
        Ok(classify(value, scale, self.domain_size(), Regime::Theorem))
    }

    /// Ŝ₂ (regime II, ord(ψ) > 2): as Ŝ₁ with υ in place of ε and the
    /// η_m-twisted μ'.
    pub fn s_hat2(&self, j: u64, a: u64, method: Method) -> Result<HybridValue> {
        self.inst.require_condition(Condition::II)?;
        self.require_psi_order(j)?;
        self.require_nonzero_a(a, "Ŝ₂")?;
        let scale = self.main_scale();
        let value = match method {
            Method::Direct => self.s_hat_direct(j, a),
            Method::Closed => {
                let fs = self.inst.tables.dual[a as usize];
                if fs == 0 {
                    Complex::new(0.0, 0.0)
                } else {
                    let cod = self.inst.spec.codomain();
                    let qm = cod.size() as f64;
                    let q1 = cod.group_order();
                    let upsilon = self.inst.spec.sign().to_complex();
                    let mu = self.mu_prime_index_eta(j);
                    let g_psi = self.chars.gauss_sum(j, 1);
                    let g_mu_conj = self.chars.gauss_sum((q1 - mu) % q1, 1);
                    let psi_m1 = self.chars.mult_char(j, cod.neg(1));
                    upsilon
                        * (scale / qm)
                        * g_psi
                        * psi_m1
                        * g_mu_conj
                        * self.chars.mult_char(mu, fs)
                }
            }
        };
        Ok(classify(value, scale, self.domain_size(), Regime::Theorem))
    }

    /// Direct T = Σ_{F(x)=0} χ₁(ax).
    fn t_direct(&self, a: u64) -> Complex {
        let space = self.inst.spec.space();
        let p = space.p() as usize;
        let values = &self.inst.tables.values;
        let mut counts = vec![0u64; p];
        for x in space.enumerate() {
            if values[x as usize] == 0 {
                counts[space.inner_product(a, x) as usize] += 1;
            }
        }
        (0..p).map(|r| self.zeta_p[r] * counts[r] as f64).sum()
    }

    /// T over the zero set of F. At a = 0 it degenerates to N₀ and is
    /// flagged as the trivial regime.
    pub fn t_sum(&self, a: u64, method: Method) -> Result<HybridValue> {
        self.inst.spec.space().check_index(a)?;
        if !self.inst.report.all_pass {
            return Err(Error::Unverified(
                "the verification report has failing checks".into(),
            ));
        }
        let scale = self.main_scale();
        if a == 0 {
            let value = match method {
                Method::Direct => self.t_direct(0),
                Method::Closed => Complex::new(self.counts_closed_f()?.n0 as f64, 0.0),
            };
            return Ok(classify(
                value,
                scale,
                self.domain_size(),
                Regime::TrivialAtZero,
            ));
        }
        let value = match method {
            Method::Direct => self.t_direct(a),
            Method::Closed => {
                let spec = &self.inst.spec;
                let cod = spec.codomain();
                let qm = cod.size() as f64;
                let fs_zero = self.inst.tables.dual[a as usize] == 0;
                match spec.condition() {
                    Condition::I => {
                        let eps = spec.sign().real_sign().expect("regime I sign is real") as f64;
                        if fs_zero {
                            Complex::new((qm - 1.0) / qm * eps * scale, 0.0)
                        } else {
                            Complex::new(-eps * scale / qm, 0.0)
                        }
                    }
                    Condition::II => {
                        if fs_zero {
                            Complex::new(0.0, 0.0)
                        } else {
                            // ±(1/p^m)·υ·p^{n/2}·(−1)^{m−1}·ε^m·√(p^m)
                            let unit = spec
                                .sign()
                                .mul(crate::characters::quad_gauss_unit(spec.p(), spec.m()));
                            let eta_fs = cod.eta(self.inst.tables.dual[a as usize]) as f64;
                            unit.to_complex() * (scale * qm.sqrt() / qm) * eta_fs
                        }
                    }
                }
            }
        };
        Ok(classify(value, scale, self.domain_size(), Regime::Theorem))
    }

    /// Enumerated counts of η_m(F(x)).
    pub fn counts_enumerated_f(&self) -> CountTriple {
        let (n0, n1, n_minus1) = self.inst.value_counts();
        CountTriple { n0, n1, n_minus1 }
    }

    /// Enumerated counts of η_m(F*(a)).
    pub fn counts_enumerated_dual(&self) -> CountTriple {
        let (n0, n1, n_minus1) = self.inst.dual_counts();
        CountTriple { n0, n1, n_minus1 }
    }

    /// Closed-form counts for F.
    pub fn counts_closed_f(&self) -> Result<CountTriple> {
        closed_counts(self.inst, false)
    }

    /// Closed-form counts for F*.
    pub fn counts_closed_dual(&self) -> Result<CountTriple> {
        closed_counts(self.inst, true)
    }

    /// |direct − closed| for any of the sums, at one a (and ψ for Ŝ).
    pub fn residual(&self, kind: SumKind, j: Option<u64>, a: u64) -> Result<f64> {
        let direct = self.eval(kind, j, a, Method::Direct)?;
        let closed = self.eval(kind, j, a, Method::Closed)?;
        Ok((direct.value - closed.value).norm())
    }

    pub fn eval(
        &self,
        kind: SumKind,
        j: Option<u64>,
        a: u64,
        method: Method,
    ) -> Result<HybridValue> {
        match kind {
            SumKind::S1 => self.s1(a, method),
            SumKind::S2 => self.s2(a, method),
            SumKind::SHat1 => self.s_hat1(j.ok_or_else(missing_psi)?, a, method),
            SumKind::SHat2 => self.s_hat2(j.ok_or_else(missing_psi)?, a, method),
            SumKind::T => self.t_sum(a, method),
        }
    }
}

fn missing_psi() -> Error {
    Error::Precondition("this sum needs a multiplicative-character index ψ_j".into())
}

fn pow_i128(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn exact_div(a: i128, b: i128) -> i128 {
    debug_assert_eq!(a % b, 0, "count formula must divide exactly ({a}/{b})");
    a / b
}

/// Closed-form count formulas.
///
/// Regime I (same for F and F*):
///   N₀ = p^{n−m} + ε·p^{n/2−m}·(p^m−1),
///   N₁ = N₋₁ = (p^n − ε·p^{n/2})·(p^m−1)/(2p^m).
/// Regime II:
///   N₀ = p^{n−m},
///   N±₁ = (p^{n−m} ± (−1)^{m−1}·ε^m·η_m(−1)·υ̃·p^{(n−m)/2})·(p^m−1)/2,
/// where υ̃ = υ for F and υ⁻¹ for F*.
fn closed_counts(inst: &BentInstance, dual: bool) -> Result<CountTriple> {
    let spec = &inst.spec;
    let p = spec.p();
    let n = spec.n();
    let m = spec.m();
    let cod = spec.codomain();
    let qm = pow_i128(p, m);
    match spec.condition() {
        Condition::I => {
            let eps = spec.sign().real_sign().expect("regime I sign is real") as i128;
            let n0 = pow_i128(p, n - m) + eps * pow_i128(p, n / 2 - m) * (qm - 1);
            let n1 = exact_div(
                (pow_i128(p, n) - eps * pow_i128(p, n / 2)) * (qm - 1),
                2 * qm,
            );
            Ok(CountTriple {
                n0: n0 as u64,
                n1: n1 as u64,
                n_minus1: n1 as u64,
            })
        }
        Condition::II => {
            let upsilon = if dual {
                spec.sign().conj()
            } else {
                spec.sign()
            };
            let unit = upsilon.mul(crate::characters::quad_gauss_unit(p, m));
            let eta_m1 = cod.eta(cod.neg(1));
            let s = unit
                .real_sign()
                .ok_or_else(|| Error::Constraint("regime II count sign must be real".into()))?
                * eta_m1;
            let n0 = pow_i128(p, n - m);
            let half = pow_i128(p, (n - m) / 2);
            let n1 = exact_div((n0 + s as i128 * half) * (qm - 1), 2);
            let nm1 = exact_div((n0 - s as i128 * half) * (qm - 1), 2);
            Ok(CountTriple {
                n0: n0 as u64,
                n1: n1 as u64,
                n_minus1: nm1 as u64,
            })
        }
    }
}

/// The canonical per-a tolerance for direct-vs-closed comparison.
pub fn agreement_tol(domain_size: u64) -> f64 {
    sum_tol(domain_size)
}
