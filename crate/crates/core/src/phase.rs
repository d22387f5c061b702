//! Exact fourth roots of unity.
//!
//! Walsh-transform signs of weakly regular bent functions live in
//! {±1, ±i}; closed-form sign formulas such as −ε^n η_n(e) are products of
//! such units. Keeping them as an exact power of i avoids any floating-point
//! ambiguity when comparing a predicted sign against a recovered one.

use crate::Complex;
use std::fmt;

/// i^k for k ∈ {0,1,2,3}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitPhase(u8);

impl UnitPhase {
    pub const ONE: UnitPhase = UnitPhase(0);
    pub const I: UnitPhase = UnitPhase(1);
    pub const MINUS_ONE: UnitPhase = UnitPhase(2);
    pub const MINUS_I: UnitPhase = UnitPhase(3);

    /// All four units, in the fixed order 1, i, −1, −i.
    pub const ALL: [UnitPhase; 4] = [Self::ONE, Self::I, Self::MINUS_ONE, Self::MINUS_I];

    pub fn mul(self, other: UnitPhase) -> UnitPhase {
        UnitPhase((self.0 + other.0) % 4)
    }

    /// Multiply by −1.
    pub fn neg(self) -> UnitPhase {
        self.mul(Self::MINUS_ONE)
    }

    /// self^e for any integer exponent.
    pub fn pow(self, e: i64) -> UnitPhase {
        UnitPhase(((self.0 as i64 * e).rem_euclid(4)) as u8)
    }

    /// Complex conjugate (= multiplicative inverse on the unit circle).
    pub fn conj(self) -> UnitPhase {
        UnitPhase((4 - self.0) % 4)
    }

    /// Lift a value of the quadratic character (±1) to a unit.
    pub fn from_sign(s: i64) -> UnitPhase {
        debug_assert!(s == 1 || s == -1);
        if s == 1 {
            Self::ONE
        } else {
            Self::MINUS_ONE
        }
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// +1 or −1 when the unit is real.
    pub fn real_sign(self) -> Option<i64> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex {
        match self.0 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        }
    }

    /// Parse the textual form used in JSON ("1", "-1", "i", "-i").
    pub fn parse(s: &str) -> Option<UnitPhase> {
        match s {
            "1" | "+1" => Some(Self::ONE),
            "-1" => Some(Self::MINUS_ONE),
            "i" | "+i" => Some(Self::I),
            "-i" => Some(Self::MINUS_I),
            _ => None,
        }
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "1",
            1 => "i",
            2 => "-1",
            _ => "-i",
        };
        f.write_str(s)
    }
}

impl fmt::Debug for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law() {
        assert_eq!(UnitPhase::I.mul(UnitPhase::I), UnitPhase::MINUS_ONE);
        assert_eq!(UnitPhase::I.pow(4), UnitPhase::ONE);
        assert_eq!(UnitPhase::I.pow(-1), UnitPhase::MINUS_I);
        assert_eq!(UnitPhase::MINUS_I.conj(), UnitPhase::I);
        for u in UnitPhase::ALL {
            assert_eq!(u.mul(u.conj()), UnitPhase::ONE);
            let c = u.to_complex();
            assert!((c.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn text_round_trip() {
        for u in UnitPhase::ALL {
            assert_eq!(UnitPhase::parse(&u.to_string()), Some(u));
        }
    }
}
