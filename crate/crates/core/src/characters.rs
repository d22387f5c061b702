//! Characters of GF(q) and of product spaces, Gaussian sums, and the two
//! Fourier expansions connecting them.
//!
//! Conventions, pinned once and used everywhere:
//!
//! * ζ_p = e^{2πi/p}; the additive character λ_a(x) = ζ_p^{Tr_{q/p}(ax)};
//!   the space character χ_a(x) = ζ_p^{⟨a,x⟩_n}.
//! * ψ_j(β^s) = ζ_{q−1}^{sj} against the pinned primitive element β, with
//!   the extension ψ_j(0) = 1 if j = 0 and 0 otherwise.
//! * η_m = ψ_{(q−1)/2} is the quadratic character; η_m(0) = 0.
//! * G(ψ, λ) = Σ_{x≠0} ψ(x)λ(x).

use crate::error::{Error, Result};
use crate::field::ExtField;
use crate::phase::UnitPhase;
use crate::space::VectorSpace;
use crate::Complex;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

/// ε = √((−1)^{(p−1)/2}): 1 for p ≡ 1 (mod 4), i for p ≡ 3 (mod 4).
pub fn epsilon_const(p: u64) -> UnitPhase {
    if p % 4 == 1 {
        UnitPhase::ONE
    } else {
        UnitPhase::I
    }
}

/// G(η_m, λ₁) = (−1)^{m−1} ε^m √q; this returns the exact unit factor
/// (−1)^{m−1} ε^m, the caller supplies the √q scale.
pub fn quad_gauss_unit(p: u64, m: u32) -> UnitPhase {
    epsilon_const(p)
        .pow(m as i64)
        .mul(UnitPhase::MINUS_ONE.pow(m as i64 - 1))
}

/// The complex roots of unity 1, ζ, ζ², … of the given order.
pub fn unit_roots(order: u64) -> Vec<Complex> {
    (0..order)
        .map(|r| Complex::from_polar(1.0, TAU * r as f64 / order as f64))
        .collect()
}

/// Character machinery of one finite field: precomputed roots of unity of
/// orders p and q−1, plus a lazily built table of all Gaussian sums.
pub struct CharSystem {
    field: Arc<ExtField>,
    zeta_p: Vec<Complex>,
    zeta_q1: Vec<Complex>,
    /// G(ψ_j, λ_a) at [j * q + a], built on first use.
    gauss: OnceLock<Vec<Complex>>,
}

impl CharSystem {
    pub fn new(field: Arc<ExtField>) -> CharSystem {
        let zeta_p = unit_roots(field.p());
        let zeta_q1 = unit_roots(field.group_order());
        CharSystem {
            field,
            zeta_p,
            zeta_q1,
            gauss: OnceLock::new(),
        }
    }

    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    #[inline]
    pub fn zeta_p(&self, r: u32) -> Complex {
        self.zeta_p[(r as u64 % self.field.p()) as usize]
    }

    /// λ_a(x) = ζ_p^{Tr(ax)}.
    #[inline]
    pub fn add_char(&self, a: u32, x: u32) -> Complex {
        self.zeta_p[self.field.trace_inner(a, x) as usize]
    }

    /// Index of the quadratic character η_m.
    pub fn eta_index(&self) -> u64 {
        self.field.group_order() / 2
    }

    /// ord(ψ_j) = (q−1)/gcd(j, q−1).
    pub fn char_order(&self, j: u64) -> u64 {
        let q1 = self.field.group_order();
        q1 / gcd(j % q1, q1)
    }

    /// ψ_j(x) with the ψ_j(0) extension.
    pub fn mult_char(&self, j: u64, x: u32) -> Complex {
        let q1 = self.field.group_order();
        let j = j % q1;
        if x == 0 {
            return if j == 0 {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        let s = self.field.log_or_sentinel(x) as u64;
        self.zeta_q1[((s * j) % q1) as usize]
    }

    /// Quadratic character value in {−1, 0, +1} from discrete-log parity.
    #[inline]
    pub fn eta(&self, x: u32) -> i64 {
        self.field.eta(x)
    }

    /// Brute-force Gaussian sum G(ψ_j, λ_a) over the q−1 nonzero elements.
    pub fn gauss_sum(&self, j: u64, a: u32) -> Complex {
        let q1 = self.field.group_order();
        let j = j % q1;
        let mut acc = Complex::new(0.0, 0.0);
        for s in 0..q1 {
            let x = self.field.exp(s);
            acc += self.zeta_q1[((s * j) % q1) as usize] * self.add_char(a, x);
        }
        acc
    }

    /// All Gaussian sums, cached: entry [j*q + a] = G(ψ_j, λ_a).
    pub fn gauss_table(&self) -> &[Complex] {
        self.gauss.get_or_init(|| {
            let q = self.field.size();
            let q1 = q - 1;
            let mut table = vec![Complex::new(0.0, 0.0); (q1 * q) as usize];
            for j in 0..q1 {
                for a in 0..q as u32 {
                    table[(j * q + a as u64) as usize] = self.gauss_sum(j, a);
                }
            }
            table
        })
    }

    #[inline]
    fn gauss_cached(&self, j: u64, a: u32) -> Complex {
        let q = self.field.size();
        self.gauss_table()[((j % (q - 1)) * q + a as u64) as usize]
    }

    /// Closed-form quadratic Gaussian sum
    /// G(η_m, λ₁) = (−1)^{m−1} (√−1)^{((p−1)/2)² m} √q.
    pub fn gauss_sum_quadratic_closed(&self) -> Complex {
        let p = self.field.p();
        let m = self.field.degree() as i64;
        let sqrt_q = (self.field.size() as f64).sqrt();
        let i_exp = ((p as i64 - 1) / 2).pow(2) * m;
        let unit = UnitPhase::I.pow(i_exp).mul(UnitPhase::MINUS_ONE.pow(m - 1));
        unit.to_complex() * sqrt_q
    }

    /// Residual of the expansion ψ(x) = (1/q) Σ_λ G(ψ, λ̄) λ(x).
    ///
    /// The x = 0 term of each Gaussian sum is included per the ψ_j(0)
    /// extension (it is zero for every nontrivial ψ), which makes the
    /// identity hold pointwise on all of F_q for every character.
    pub fn fourier_mult_via_add(&self, j: u64, x: u32) -> f64 {
        let q = self.field.size();
        let q1 = q - 1;
        let j = j % q1;
        let zero_term = if j == 0 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        };
        let mut rhs = Complex::new(0.0, 0.0);
        for y in 0..q as u32 {
            let g = self.gauss_cached(j, self.field.neg(y)) + zero_term;
            rhs += g * self.add_char(y, x);
        }
        rhs /= q as f64;
        (self.mult_char(j, x) - rhs).norm()
    }

    /// Residual of the expansion λ(x) = (1/(q−1)) Σ_ψ G(ψ̄, λ) ψ(x), x ≠ 0.
    pub fn fourier_add_via_mult(&self, a: u32, x: u32) -> Result<f64> {
        if x == 0 {
            return Err(Error::Precondition(
                "the additive-character expansion over multiplicative characters requires x ≠ 0"
                    .into(),
            ));
        }
        let q1 = self.field.group_order();
        let mut rhs = Complex::new(0.0, 0.0);
        for j in 0..q1 {
            let j_conj = (q1 - j) % q1;
            rhs += self.gauss_cached(j_conj, a) * self.mult_char(j, x);
        }
        rhs /= q1 as f64;
        Ok((self.add_char(a, x) - rhs).norm())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// χ_a(x) = ζ_p^{⟨a,x⟩_n} over a product space.
pub struct SpaceChars {
    space: Arc<VectorSpace>,
    zeta_p: Vec<Complex>,
}

impl SpaceChars {
    pub fn new(space: Arc<VectorSpace>) -> SpaceChars {
        let zeta_p = unit_roots(space.p());
        SpaceChars { space, zeta_p }
    }

    pub fn space(&self) -> &Arc<VectorSpace> {
        &self.space
    }

    #[inline]
    pub fn zeta_p(&self, r: u32) -> Complex {
        self.zeta_p[(r as u64 % self.space.p()) as usize]
    }

    #[inline]
    pub fn chi(&self, a: u64, x: u64) -> Complex {
        self.zeta_p[self.space.inner_product(a, x) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum_tol;

    fn sys(p: u64, k: u32) -> CharSystem {
        CharSystem::new(ExtField::new(p, k).unwrap())
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_const(5), UnitPhase::ONE);
        assert_eq!(epsilon_const(3), UnitPhase::I);
        assert_eq!(epsilon_const(7), UnitPhase::I);
        assert_eq!(epsilon_const(13), UnitPhase::ONE);
    }

    #[test]
    fn additive_orthogonality() {
        let cs = sys(3, 2);
        let q = cs.field().size();
        for a in 0..q as u32 {
            let total: Complex = (0..q as u32).map(|x| cs.add_char(a, x)).sum();
            let expect = if a == 0 { q as f64 } else { 0.0 };
            assert!((total - expect).norm() < sum_tol(q), "a={a}: {total}");
        }
        // trivial character is identically 1
        for x in 0..q as u32 {
            assert!((cs.add_char(0, x) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn multiplicative_orthogonality_and_unit_values() {
        let cs = sys(3, 2);
        let q1 = cs.field().group_order();
        for j in 0..q1 {
            let total: Complex = (1..=q1).map(|s| cs.mult_char(j, cs.field().exp(s))).sum();
            let expect = if j == 0 { q1 as f64 } else { 0.0 };
            assert!((total - expect).norm() < sum_tol(q1));
            assert!((cs.mult_char(j, 1) - 1.0).norm() < 1e-12, "ψ_j(1) = 1");
        }
    }

    #[test]
    fn eta_examples() {
        let f5 = sys(5, 1);
        assert_eq!(f5.eta(4), 1); // 4 = 2²
        let f9 = sys(3, 2);
        assert_eq!(f9.eta(3), 1); // t is an even power of β
        assert_eq!(f9.eta(f9.field().alpha()), -1);
        assert_eq!(f9.eta(0), 0);
        // η agrees with ψ_{(q−1)/2} on nonzero arguments
        for x in 1..9u32 {
            let via_char = f9.mult_char(f9.eta_index(), x);
            assert!((via_char.re - f9.eta(x) as f64).abs() < 1e-12);
            assert!(via_char.im.abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_sum_values_lemma() {
        for (p, k) in [(3u64, 1u32), (3, 2), (3, 3), (5, 2), (7, 1)] {
            let cs = sys(p, k);
            let q = cs.field().size();
            let sqrt_q = (q as f64).sqrt();
            let tol = sum_tol(q);
            assert!((cs.gauss_sum(0, 0) - (q - 1) as f64).norm() < tol);
            assert!((cs.gauss_sum(0, 1) + 1.0).norm() < tol);
            for j in 1..q - 1 {
                assert!(cs.gauss_sum(j, 0).norm() < tol);
                for a in 1..q as u32 {
                    assert!(
                        (cs.gauss_sum(j, a).norm() - sqrt_q).abs() < tol,
                        "|G| = √q at q={q}, j={j}, a={a}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_property_suite_exhaustive() {
        // G(ψ, λ_{ab}) = conj(ψ(a)) G(ψ, λ_b);  G(ψ, λ̄) = ψ(−1) G(ψ, λ);
        // G(ψ̄, λ) = ψ(−1) conj(G(ψ, λ)).
        for (p, k) in [(3u64, 1u32), (3, 2), (3, 3), (5, 2)] {
            let cs = sys(p, k);
            let f = cs.field().clone();
            let q = f.size();
            let q1 = q - 1;
            let tol = sum_tol(q) * 2.0;
            let minus_one = f.neg(1);
            for j in 0..q1 {
                let psi_minus_one = cs.mult_char(j, minus_one);
                for b in 0..q as u32 {
                    let g_b = cs.gauss_cached(j, b);
                    for a in 1..q as u32 {
                        let ab = f.mul(a, b);
                        let lhs = cs.gauss_cached(j, ab);
                        let rhs = cs.mult_char(j, f.inv(a).unwrap()) * g_b;
                        assert!((lhs - rhs).norm() < tol, "translation law q={q} j={j}");
                    }
                    let conj_lambda = cs.gauss_cached(j, f.neg(b));
                    assert!((conj_lambda - psi_minus_one * g_b).norm() < tol);
                    let conj_psi = cs.gauss_cached((q1 - j) % q1, b);
                    assert!((conj_psi - psi_minus_one * g_b.conj()).norm() < tol);
                }
            }
        }
    }

    #[test]
    fn quadratic_gauss_closed_form() {
        // p=3, m=1 → i√3; p=5, m=1 → √5; p=3, m=2 → 3.
        let g31 = sys(3, 1).gauss_sum_quadratic_closed();
        assert!((g31 - Complex::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let g51 = sys(5, 1).gauss_sum_quadratic_closed();
        assert!((g51 - Complex::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let g32 = sys(3, 2).gauss_sum_quadratic_closed();
        assert!((g32 - Complex::new(3.0, 0.0)).norm() < 1e-12);

        // closed form = brute force for every odd prime power p^m ≤ 343
        let mut cases = Vec::new();
        for p in (3u64..=343).step_by(2) {
            if !(2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                let mut k = 1u32;
                while p.pow(k) <= 343 {
                    cases.push((p, k));
                    k += 1;
                }
            }
        }
        assert!(cases.contains(&(7, 3)) && cases.contains(&(343, 1)) == false);
        for (p, k) in cases {
            let cs = sys(p, k);
            let brute = cs.gauss_sum(cs.eta_index(), 1);
            let closed = cs.gauss_sum_quadratic_closed();
            assert!(
                (brute - closed).norm() < sum_tol(cs.field().size()),
                "quadratic Gauss mismatch at {p}^{k}: {brute} vs {closed}"
            );
            // unit-factor route agrees too
            let unit = quad_gauss_unit(p, k).to_complex() * (cs.field().size() as f64).sqrt();
            assert!((unit - closed).norm() < 1e-9);
            // G(η, λ₁)² = η(−1)·q
            let eta_m1 = cs.eta(cs.field().neg(1)) as f64;
            assert!(
                (brute * brute - eta_m1 * cs.field().size() as f64).norm()
                    < sum_tol(cs.field().size()) * 3.0 * (cs.field().size() as f64).sqrt()
            );
        }
    }

    #[test]
    fn fourier_expansions_pointwise() {
        // Both expansions for every character and admissible x, q ≤ 81.
        for (p, k) in [(3u64, 1u32), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (7, 1)] {
            let cs = sys(p, k);
            let q = cs.field().size();
            let tol = sum_tol(q * q);
            for j in 0..q - 1 {
                for x in 0..q as u32 {
                    let r = cs.fourier_mult_via_add(j, x);
                    assert!(r < tol, "mult-via-add q={q} j={j} x={x}: {r}");
                }
            }
            for a in 0..q as u32 {
                for x in 1..q as u32 {
                    let r = cs.fourier_add_via_mult(a, x).unwrap();
                    assert!(r < tol, "add-via-mult q={q} a={a} x={x}: {r}");
                }
            }
            assert!(cs.fourier_add_via_mult(1, 0).is_err());
        }
    }

    #[test]
    fn trivial_character_expansion_at_zero() {
        // ψ₀(0) = 1 under the extension and the expansion reproduces it.
        let cs = sys(3, 1);
        assert!(cs.fourier_mult_via_add(0, 0) < 1e-9);
    }

    #[test]
    fn space_char_is_multiplicative_in_x() {
        let v = VectorSpace::new(3, &[2, 1]).unwrap();
        let sc = SpaceChars::new(v.clone());
        for a in v.enumerate().step_by(5) {
            for x in v.enumerate().step_by(3) {
                for y in v.enumerate().step_by(7) {
                    let lhs = sc.chi(a, v.add(x, y));
                    let rhs = sc.chi(a, x) * sc.chi(a, y);
                    assert!((lhs - rhs).norm() < 1e-9);
                }
            }
        }
    }
}
