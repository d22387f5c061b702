//! Table-based arithmetic in GF(p^k) for odd primes p.
//!
//! Elements are identified by their integer code Σ c_j p^j, where c_j is the
//! coefficient of the degree-j monomial in the polynomial basis. The field
//! representation is pinned for reproducibility:
//!
//! * the modulus is the lexicographically smallest monic irreducible of
//!   degree k (coefficient tuple (c₀,…,c_{k−1}) compared left to right);
//! * the primitive element β is the one with the smallest code;
//! * enumeration order is ascending code.
//!
//! Multiplication, inversion and powers go through discrete-log tables, so
//! construction is capped at p^k ≤ 2^24.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Hard cap on table-based fields.
pub const TABLE_CAP: u64 = 1 << 24;

/// Sentinel stored in the log table at index 0 (zero has no discrete log).
const NO_LOG: u32 = u32::MAX;

/// A concrete GF(p^k) with discrete-log and trace tables.
#[derive(Debug)]
pub struct ExtField {
    p: u64,
    k: u32,
    q: u64,
    /// Monic modulus, coefficients c_0..c_k with c_k = 1. For k = 1 this is
    /// the polynomial x, i.e. [0, 1].
    modulus: Vec<u64>,
    /// Code of the primitive element β.
    alpha: u32,
    /// exp_table[s] = code of β^s, s ∈ [0, q−1).
    exp_table: Vec<u32>,
    /// log_table[code] = s with β^s = code; NO_LOG at 0.
    log_table: Vec<u32>,
    /// abs_trace[code] = Tr_{q/p}(x) as a residue in [0, p).
    abs_trace: Vec<u32>,
    /// trace_exp[s] = abs_trace[exp_table[s]] (hot-loop shortcut).
    trace_exp: Vec<u32>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        // Deterministic construction: (p, k) pins the whole representation.
        self.p == other.p && self.k == other.k
    }
}
impl Eq for ExtField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Multiply two polynomials over F_p and reduce by the monic `modulus`.
fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce: x^k ≡ −(c_0 + … + c_{k−1} x^{k−1})
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for j in 0..k {
            let sub = (c * modulus[j]) % p;
            prod[d - k + j] = (prod[d - k + j] + p - sub) % p;
        }
    }
    prod.truncate(k.max(1));
    prod
}

fn code_to_poly(mut code: u64, k: u32, p: u64) -> Vec<u64> {
    let mut c = vec![0u64; k as usize];
    for slot in c.iter_mut() {
        *slot = code % p;
        code /= p;
    }
    c
}

fn poly_to_code(poly: &[u64], p: u64) -> u64 {
    let mut code = 0u64;
    for &c in poly.iter().rev() {
        code = code * p + c;
    }
    code
}

/// Distinct prime factors by trial division.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Trial-division irreducibility test for a monic polynomial over F_p:
/// divide by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    // No roots ⇔ no linear factors; cheap first pass.
    for r in 0..p {
        let mut acc = 0u64;
        for &c in poly.iter().rev() {
            acc = (acc * r + c) % p;
        }
        if acc == 0 {
            return false;
        }
    }
    if deg <= 3 {
        return true;
    }
    for d in 2..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut divisor = code_to_poly(idx, d as u32, p);
            divisor.push(1); // monic
            if poly_rem_is_zero(poly, &divisor, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u64], den: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for j in 0..=dd {
                let sub = (lead * den[j]) % p;
                rem[shift + j] = (rem[shift + j] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

impl ExtField {
    /// Build GF(p^k) with the pinned deterministic representation.
    pub fn new(p: u64, k: u32) -> Result<Arc<ExtField>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if k == 0 {
            return Err(Error::Constraint("extension degree must be ≥ 1".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= TABLE_CAP)
            .ok_or(Error::TableTooLarge { p, k })?;

        // Lexicographically smallest monic irreducible modulus: scan the
        // coefficient tuples (c_0,…,c_{k−1}) in lex order, c_0 most
        // significant.
        let mut modulus = None;
        let total = q; // p^k tuples
        for idx in 0..total {
            // decode with c_0 as the most significant digit
            let mut rem = idx;
            let mut coeffs = vec![0u64; k as usize];
            for j in (0..k as usize).rev() {
                coeffs[j] = rem % p;
                rem /= p;
            }
            coeffs.push(1);
            if is_irreducible(&coeffs, p) {
                modulus = Some(coeffs);
                break;
            }
        }
        let modulus = modulus.expect("an irreducible polynomial of every degree exists");

        // Smallest primitive element by code order.
        let order = q - 1;
        let factors = prime_factors(order);
        let pow_raw = |base: &[u64], mut e: u64| -> Vec<u64> {
            let mut result = vec![0u64; k as usize];
            result[0] = 1;
            let mut acc = base.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    result = poly_mul_mod(&result, &acc, &modulus, p);
                }
                acc = poly_mul_mod(&acc, &acc, &modulus, p);
                e >>= 1;
            }
            result
        };
        let mut alpha = 0u32;
        'search: for cand in 2..q {
            let poly = code_to_poly(cand, k, p);
            for &f in &factors {
                let r = pow_raw(&poly, order / f);
                if poly_to_code(&r, p) == 1 {
                    continue 'search;
                }
            }
            alpha = cand as u32;
            break;
        }
        debug_assert!(alpha != 0 || q == 2);

        // exp/log tables
        let mut exp_table = vec![0u32; order as usize];
        let mut log_table = vec![NO_LOG; q as usize];
        let alpha_poly = code_to_poly(alpha as u64, k, p);
        let mut cur = vec![0u64; k as usize];
        cur[0] = 1;
        for s in 0..order as usize {
            let code = poly_to_code(&cur, p) as u32;
            exp_table[s] = code;
            log_table[code as usize] = s as u32;
            cur = poly_mul_mod(&cur, &alpha_poly, &modulus, p);
        }
        debug_assert_eq!(poly_to_code(&cur, p), 1, "alpha order must be q−1");

        let mut field = ExtField {
            p,
            k,
            q,
            modulus,
            alpha,
            exp_table,
            log_table,
            abs_trace: Vec::new(),
            trace_exp: Vec::new(),
        };

        // Absolute trace table: Tr(x) = Σ_{i<k} x^{p^i}. The sum lies in F_p,
        // so only the constant coefficient of the accumulated polynomial
        // survives.
        let mut abs_trace = vec![0u32; q as usize];
        for code in 1..q {
            let mut sum_poly = vec![0u64; k as usize];
            let mut y = code as u32;
            for _ in 0..k {
                let yp = code_to_poly(y as u64, k, p);
                for (j, &c) in yp.iter().enumerate() {
                    sum_poly[j] = (sum_poly[j] + c) % p;
                }
                y = field.frobenius(y);
            }
            debug_assert!(sum_poly[1..].iter().all(|&c| c == 0));
            abs_trace[code as usize] = sum_poly[0] as u32;
        }
        let trace_exp = field
            .exp_table
            .iter()
            .map(|&c| abs_trace[c as usize])
            .collect();
        field.abs_trace = abs_trace;
        field.trace_exp = trace_exp;
        Ok(Arc::new(field))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.k
    }
    /// q = p^k.
    pub fn size(&self) -> u64 {
        self.q
    }
    /// q − 1, the multiplicative group order.
    pub fn group_order(&self) -> u64 {
        self.q - 1
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    /// Code of the pinned primitive element β.
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// β^s (s taken mod q−1).
    pub fn exp(&self, s: u64) -> u32 {
        self.exp_table[(s % (self.q - 1)) as usize]
    }

    /// Discrete log of a nonzero code.
    pub fn log(&self, code: u32) -> Result<u32> {
        if code == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.log_table[code as usize])
    }

    /// Raw log table access for hot loops: NO_LOG (= u32::MAX) at zero.
    #[inline]
    pub fn log_or_sentinel(&self, code: u32) -> u32 {
        self.log_table[code as usize]
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        // digit-wise addition mod p
        let (p, k) = (self.p, self.k);
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..k {
            let d = (a % p + b % p) % p;
            out += d * mult;
            mult *= p;
            a /= p;
            b /= p;
        }
        out as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p;
        let mut a = a as u64;
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.k {
            let d = (p - a % p) % p;
            out += d * mult;
            mult *= p;
            a /= p;
        }
        out as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let la = self.log_table[a as usize] as u64;
        let lb = self.log_table[b as usize] as u64;
        let mut e = la + lb;
        let q1 = self.q - 1;
        if e >= q1 {
            e -= q1;
        }
        self.exp_table[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let la = self.log_table[a as usize] as u64;
        let q1 = self.q - 1;
        Ok(self.exp_table[((q1 - la) % q1) as usize])
    }

    /// a^e for any integer exponent (0^0 = 1; negative exponents of zero
    /// are an error).
    pub fn pow(&self, a: u32, e: i64) -> Result<u32> {
        if a == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(0),
                std::cmp::Ordering::Equal => Ok(1),
                std::cmp::Ordering::Less => Err(Error::ZeroInverse),
            };
        }
        let q1 = (self.q - 1) as i64;
        let la = self.log_table[a as usize] as i64;
        let s = (la as i128 * e as i128).rem_euclid(q1 as i128) as u64;
        Ok(self.exp_table[s as usize])
    }

    /// Frobenius x ↦ x^p.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let la = self.log_table[a as usize] as u64;
        self.exp_table[((la * (self.p % (self.q - 1))) % (self.q - 1)) as usize]
    }

    /// Absolute trace Tr_{p^k/p}(x) as a residue in [0, p).
    #[inline]
    pub fn abs_trace(&self, a: u32) -> u32 {
        self.abs_trace[a as usize]
    }

    /// Tr(β^s) for s ∈ [0, q−1) — hot-loop variant of `abs_trace`.
    #[inline]
    pub fn trace_of_exp(&self, s: u64) -> u32 {
        self.trace_exp[s as usize]
    }

    /// Tr(a·b) as a residue mod p; the trace inner product of GF(p^k).
    #[inline]
    pub fn trace_inner(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let la = self.log_table[a as usize] as u64;
        let lb = self.log_table[b as usize] as u64;
        let mut e = la + lb;
        let q1 = self.q - 1;
        if e >= q1 {
            e -= q1;
        }
        self.trace_exp[e as usize]
    }

    /// Relative trace Tr_{p^k/p^t}(x) = Σ_{i<k/t} x^{p^{ti}}, as an element of
    /// the size-p^t subfield of this field (still coded in this field).
    pub fn rel_trace_in_field(&self, t: u32, a: u32) -> Result<u32> {
        if t == 0 || self.k % t != 0 {
            return Err(Error::NotSubfieldDegree { t, k: self.k });
        }
        let mut acc = 0u32;
        let mut y = a;
        let steps = self.k / t;
        for _ in 0..steps {
            acc = self.add(acc, y);
            // y ↦ y^{p^t}
            let mut z = y;
            for _ in 0..t {
                z = self.frobenius(z);
            }
            y = z;
        }
        Ok(acc)
    }

    /// Quadratic-character value at `a` from discrete-log parity:
    /// +1 on nonzero squares, −1 on non-squares, 0 at zero.
    #[inline]
    pub fn eta(&self, a: u32) -> i64 {
        if a == 0 {
            0
        } else if self.log_table[a as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All element codes in enumeration order (ascending).
    pub fn enumerate(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.q as u32
    }

    pub fn check_code(&self, code: u64) -> Result<u32> {
        if code < self.q {
            Ok(code as u32)
        } else {
            Err(Error::CodeOutOfRange { code, size: self.q })
        }
    }
}

/// An element bundled with its field, for callers that want arithmetic
/// closed over a checked domain instead of raw codes.
#[derive(Debug, Clone)]
pub struct FieldElem {
    field: Arc<ExtField>,
    code: u32,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.code == other.code
    }
}
impl Eq for FieldElem {}

impl FieldElem {
    pub fn new(field: Arc<ExtField>, code: u64) -> Result<FieldElem> {
        let code = field.check_code(code)?;
        Ok(FieldElem { field, code })
    }

    pub fn code(&self) -> u32 {
        self.code
    }
    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem {
            field: self.field.clone(),
            code: self.field.add(self.code, other.code),
        })
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem {
            field: self.field.clone(),
            code: self.field.sub(self.code, other.code),
        })
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem {
            field: self.field.clone(),
            code: self.field.mul(self.code, other.code),
        })
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            code: self.field.neg(self.code),
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(FieldElem {
            field: self.field.clone(),
            code: self.field.inv(self.code)?,
        })
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        Ok(FieldElem {
            field: self.field.clone(),
            code: self.field.pow(self.code, e)?,
        })
    }
}

/// Deterministic embedding of a standalone GF(p^t) into GF(p^k), t | k.
///
/// The generator image is the root of the subfield's modulus in the big
/// field with the smallest code, so the map is pinned. `down` inverts the
/// embedding on the subfield image; relative traces computed in the big
/// field come back through it as standalone subfield elements.
#[derive(Debug)]
pub struct Embedding {
    sub: Arc<ExtField>,
    big: Arc<ExtField>,
    root: u32,
    fwd: Vec<u32>,
    back: std::collections::HashMap<u32, u32>,
}

impl Embedding {
    pub fn new(sub: Arc<ExtField>, big: Arc<ExtField>) -> Result<Embedding> {
        if sub.p() != big.p() {
            return Err(Error::FieldMismatch);
        }
        let (t, k) = (sub.degree(), big.degree());
        if t == 0 || k % t != 0 {
            return Err(Error::NotSubfieldDegree { t, k });
        }
        // Smallest-code root of the subfield modulus in the big field.
        let modulus = sub.modulus().to_vec();
        let mut root = None;
        for y in big.enumerate() {
            // evaluate the modulus at y inside `big` (coefficients are in F_p,
            // which embeds as constant polynomials = small codes)
            let mut acc = 0u32;
            for &c in modulus.iter().rev() {
                acc = big.add(big.mul(acc, y), c as u32);
            }
            if acc == 0 {
                root = Some(y);
                break;
            }
        }
        let root = root.ok_or_else(|| {
            Error::Invalid("no root of the subfield modulus found (internal error)".into())
        })?;

        let mut fwd = vec![0u32; sub.size() as usize];
        let mut back = std::collections::HashMap::with_capacity(sub.size() as usize);
        for code in sub.enumerate() {
            // Σ c_j root^j with c_j the coefficient digits of `code`
            let mut image = 0u32;
            let mut rem = code as u64;
            let mut rpow = 1u32; // root^0
            for _ in 0..t {
                let digit = (rem % sub.p()) as u32;
                rem /= sub.p();
                if digit != 0 {
                    // digit is an F_p constant, i.e. a valid small code in big
                    image = big.add(image, big.mul(digit, rpow));
                }
                rpow = big.mul(rpow, root);
            }
            fwd[code as usize] = image;
            back.insert(image, code);
        }
        Ok(Embedding {
            sub,
            big,
            root,
            fwd,
            back,
        })
    }

    pub fn sub(&self) -> &Arc<ExtField> {
        &self.sub
    }
    pub fn big(&self) -> &Arc<ExtField> {
        &self.big
    }
    pub fn root(&self) -> u32 {
        self.root
    }

    /// Image in the big field of a subfield code.
    #[inline]
    pub fn up(&self, sub_code: u32) -> u32 {
        self.fwd[sub_code as usize]
    }

    /// Inverse on the subfield image.
    pub fn down(&self, big_code: u32) -> Result<u32> {
        self.back.get(&big_code).copied().ok_or_else(|| {
            Error::Invalid(format!(
                "code {big_code} is not in the degree-{} subfield image",
                self.sub.degree()
            ))
        })
    }

    /// Relative trace Tr_{p^k/p^t}(x) landing in the standalone subfield.
    pub fn rel_trace(&self, x: u32) -> Result<u32> {
        let in_big = self.big.rel_trace_in_field(self.sub.degree(), x)?;
        self.down(in_big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_is_forced() {
        let f = ExtField::new(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]); // x
        assert_eq!(f.alpha(), 2);
        assert_eq!(f.size(), 3);
    }

    #[test]
    fn f9_modulus_is_smallest_irreducible() {
        // Independent oracle: a monic quadratic over F_3 is irreducible iff it
        // has no roots; scan tuples (c0, c1) in lex order.
        let mut expect = None;
        'outer: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                let has_root = (0..3u64).any(|r| (r * r + c1 * r + c0) % 3 == 0);
                if !has_root {
                    expect = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let f = ExtField::new(3, 2).unwrap();
        assert_eq!(f.modulus(), expect.unwrap().as_slice()); // x² + 1
        assert_eq!(f.size(), 9);
    }

    #[test]
    fn f25_alpha_has_full_order() {
        let f = ExtField::new(5, 2).unwrap();
        // Oracle: repeated multiplication.
        let a = f.alpha();
        let mut x = a;
        let mut order = 1;
        while x != 1 {
            x = f.mul(x, a);
            order += 1;
        }
        assert_eq!(order, 24);
    }

    #[test]
    fn f9_known_arithmetic() {
        // F_9 = F_3[t]/(t²+1): codes are c0 + 3·c1, so t has code 3.
        let f = ExtField::new(3, 2).unwrap();
        let t = 3u32;
        assert_eq!(f.mul(t, t), 2); // t² = −1 ≡ 2
        for x in f.enumerate() {
            assert_eq!(f.add(x, f.neg(x)), 0);
        }
        assert_eq!(f.pow(f.alpha(), f.group_order() as i64).unwrap(), 1);
    }

    #[test]
    fn exp_log_round_trip() {
        for (p, k) in [(3, 1), (3, 2), (3, 3), (5, 2), (7, 1)] {
            let f = ExtField::new(p, k).unwrap();
            for x in 1..f.size() as u32 {
                assert_eq!(f.exp(f.log(x).unwrap() as u64), x);
            }
        }
    }

    #[test]
    fn frobenius_is_field_automorphism() {
        for (p, k) in [(3, 2), (3, 3), (5, 2), (3, 6)] {
            let f = ExtField::new(p, k).unwrap();
            if f.size() > 729 {
                continue;
            }
            for a in f.enumerate() {
                for b in f.enumerate() {
                    assert_eq!(
                        f.frobenius(f.add(a, b)),
                        f.add(f.frobenius(a), f.frobenius(b))
                    );
                    assert_eq!(
                        f.frobenius(f.mul(a, b)),
                        f.mul(f.frobenius(a), f.frobenius(b))
                    );
                }
            }
        }
    }

    #[test]
    fn trace_examples_in_f9() {
        let f9 = ExtField::new(3, 2).unwrap();
        let f3 = ExtField::new(3, 1).unwrap();
        let emb = Embedding::new(f3, f9.clone()).unwrap();
        // Tr_{9/3}(1) = 2, Tr(t) = 0, Tr(t²) = Tr(2) = 1 with t the code-3
        // basis element.
        assert_eq!(emb.rel_trace(1).unwrap(), 2);
        assert_eq!(emb.rel_trace(3).unwrap(), 0);
        assert_eq!(emb.rel_trace(2).unwrap(), 1);
        assert_eq!(f9.abs_trace(1), 2);
        assert_eq!(f9.abs_trace(3), 0);
        assert_eq!(f9.abs_trace(2), 1);
    }

    #[test]
    fn rel_trace_is_linear_and_surjective() {
        // Exhaustive at desk scale: GF(3^4) → GF(3^2).
        let big = ExtField::new(3, 4).unwrap();
        let sub = ExtField::new(3, 2).unwrap();
        let emb = Embedding::new(sub.clone(), big.clone()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in big.enumerate() {
            seen.insert(emb.rel_trace(x).unwrap());
        }
        assert_eq!(seen.len() as u64, sub.size());
        for x in big.enumerate().step_by(7) {
            for y in big.enumerate().step_by(5) {
                let lhs = emb.rel_trace(big.add(x, y)).unwrap();
                let rhs = sub.add(emb.rel_trace(x).unwrap(), emb.rel_trace(y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        // F_{p^t}-linearity: Tr(c·x) = c·Tr(x) for c in the subfield image.
        for c in sub.enumerate() {
            let c_up = emb.up(c);
            for x in big.enumerate().step_by(11) {
                let lhs = emb.rel_trace(big.mul(c_up, x)).unwrap();
                assert_eq!(lhs, sub.mul(c, emb.rel_trace(x).unwrap()));
            }
        }
    }

    #[test]
    fn embedding_fixed_points_and_identity() {
        let f9 = ExtField::new(3, 2).unwrap();
        let f3 = ExtField::new(3, 1).unwrap();
        let emb = Embedding::new(f3.clone(), f9.clone()).unwrap();
        assert_eq!(emb.up(0), 0);
        assert_eq!(emb.up(1), 1);
        assert_eq!(emb.up(2), 2); // prime subfield is the constants
        for c in f3.enumerate() {
            assert_eq!(emb.down(emb.up(c)).unwrap(), c);
        }
        // t = k: identity map.
        let id = Embedding::new(f9.clone(), f9.clone()).unwrap();
        for x in f9.enumerate() {
            assert_eq!(id.up(x), x);
        }
        // image = fixed field of the p^t-power Frobenius
        let f81 = ExtField::new(3, 4).unwrap();
        let e = Embedding::new(f9.clone(), f81.clone()).unwrap();
        for x in f81.enumerate() {
            let frob2 = f81.frobenius(f81.frobenius(x));
            assert_eq!(frob2 == x, e.down(x).is_ok());
        }
    }

    #[test]
    fn determinism_across_constructions() {
        let a = ExtField::new(3, 4).unwrap();
        let b = ExtField::new(3, 4).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.alpha(), b.alpha());
        assert_eq!(a.exp_table, b.exp_table);
        assert_eq!(a.abs_trace, b.abs_trace);
    }

    #[test]
    fn typed_elements_check_their_field() {
        let f9 = ExtField::new(3, 2).unwrap();
        let f3 = ExtField::new(3, 1).unwrap();
        let t = FieldElem::new(f9.clone(), 3).unwrap();
        let one = FieldElem::new(f9.clone(), 1).unwrap();
        assert_eq!(t.mul(&t).unwrap().code(), 2); // t² = −1
        assert_eq!(t.add(&t.neg()).unwrap().code(), 0);
        assert_eq!(one.inv().unwrap(), one);
        let other = FieldElem::new(f3, 1).unwrap();
        assert!(matches!(t.add(&other), Err(Error::FieldMismatch)));
        assert!(FieldElem::new(f9, 9).is_err());
    }

    #[test]
    fn guards() {
        assert!(matches!(ExtField::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(
            ExtField::new(2, 3),
            Err(Error::EvenCharacteristic)
        ));
        assert!(matches!(
            ExtField::new(3, 20),
            Err(Error::TableTooLarge { .. })
        ));
        let f = ExtField::new(3, 2).unwrap();
        assert!(matches!(f.inv(0), Err(Error::ZeroInverse)));
        assert!(matches!(
            f.rel_trace_in_field(3, 1),
            Err(Error::NotSubfieldDegree { .. })
        ));
    }
}
