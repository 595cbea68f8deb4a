use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree m = {m} outside supported range [{min}, {max}]")]
    DegreeOutOfRange { m: u32, min: u32, max: u32 },

    #[error("Frobenius exponent i = {i} outside [1, m) for m = {m}")]
    FrobeniusOutOfRange { i: u32, m: u32 },

    #[error("modulus {modulus} is not an irreducible polynomial of degree {m}")]
    NonIrreducibleModulus { modulus: String, m: u32 },

    #[error("gcd(i, m) = gcd({i}, {m}) = {gcd}, must be 1")]
    GcdViolation { i: u32, m: u32, gcd: u32 },

    #[error("the family results need odd m, got m = {m}")]
    EvenDegree { m: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parameter a must be nonzero")]
    ZeroParameter,

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("{op} is limited to m <= {limit}, got m = {m}")]
    FieldTooLarge {
        op: &'static str,
        m: u32,
        limit: u32,
    },

    #[error("cannot parse field element {input:?}: {reason}")]
    ParseElement { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_degree(op: &'static str, m: u32, limit: u32) -> Result<()> {
    if m > limit {
        return Err(Error::FieldTooLarge { op, m, limit });
    }
    Ok(())
}
