//! Error type shared by all modules.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `p` is not prime.
    NotPrime(u64),
    /// `p` must be odd (all constructions require odd characteristic).
    EvenCharacteristic,
    /// p^k exceeds the table-based arithmetic cap of 2^24.
    TableTooLarge { p: u64, k: u32 },
    /// Operands belong to different fields.
    FieldMismatch,
    /// Elements belong to different vector spaces.
    SpaceMismatch,
    /// Multiplicative inverse of zero requested.
    ZeroInverse,
    /// `t` does not divide `k`, so there is no trace/subfield of that degree.
    NotSubfieldDegree { t: u32, k: u32 },
    /// An element code is out of range for its field or space.
    CodeOutOfRange { code: u64, size: u64 },
    /// A family or condition constraint was violated; the message names it.
    Constraint(String),
    /// A function that was claimed bent is not, or has inconsistent signs.
    NotBent(String),
    /// A builder that requires a verified function got an unverified one.
    Unverified(String),
    /// Precondition on an operation argument (e.g. a ≠ 0, ord(ψ) > 2).
    Precondition(String),
    /// Input/format problems on files or configs.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "p = {p} is not prime"),
            Error::EvenCharacteristic => write!(f, "characteristic must be an odd prime"),
            Error::TableTooLarge { p, k } => {
                write!(f, "{p}^{k} exceeds the table cap of 2^24 elements")
            }
            Error::FieldMismatch => write!(f, "operands belong to different fields"),
            Error::SpaceMismatch => write!(f, "elements belong to different vector spaces"),
            Error::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
            Error::NotSubfieldDegree { t, k } => {
                write!(f, "t = {t} does not divide the extension degree k = {k}")
            }
            Error::CodeOutOfRange { code, size } => {
                write!(f, "element code {code} out of range (size {size})")
            }
            Error::Constraint(m) => write!(f, "constraint violated: {m}"),
            Error::NotBent(m) => write!(f, "not bent as claimed: {m}"),
            Error::Unverified(m) => write!(f, "verification required: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
