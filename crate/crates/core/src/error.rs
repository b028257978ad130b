//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input that must be nonzero (or nondegenerate) was zero/singular.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Square-class canonicalization over Q ran past the trial-division bound.
    #[error("factorization exceeds trial-division bound {bound} (cofactor {cofactor})")]
    FactorizationLimit { bound: u64, cofactor: String },

    /// A place argument was not the real place or a prime.
    #[error("invalid place: {0}")]
    InvalidPlace(String),

    /// Two values/forms from different base fields were mixed.
    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    /// The operation is only defined over the rationals.
    #[error("operation requires the rational field: {0}")]
    NotOverRationals(String),

    /// Witness search exhausted its height budget.
    #[error("search budget exceeded (height bound {0})")]
    SearchBudgetExceeded(u64),

    /// Asked for a witness of a value the form does not represent.
    #[error("not representable: {0}")]
    NotRepresentable(String),

    /// The group order is divisible by the field characteristic, so the
    /// group-theoretic classification does not apply; any such subgroup
    /// forces the form to be isotropic.
    #[error("p-irregular: |{group}| is divisible by the characteristic {p}")]
    PIrregular { group: String, p: u64 },

    /// A matrix failed the SO(q) membership check.
    #[error("matrix is not in SO(q): {0}")]
    NotInGroup(String),

    /// An element did not have the multiplicative order the operation requires.
    #[error("order mismatch: {0}")]
    OrderMismatch(String),

    /// Generator synthesis was requested for a non-embeddable group.
    #[error("group does not embed: {0}")]
    NotEmbeddable(String),

    /// Subgroup closure grew past the configured cap.
    #[error("closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("not an involution: {0}")]
    NotInvolution(String),

    #[error("not a Klein four-group: {0}")]
    NotKleinFour(String),

    #[error("not a dihedral group of the requested order: {0}")]
    NotDihedral(String),

    /// A square class failed membership in the norm group D(<1,-beta>).
    #[error("class {0} is not represented by the norm form")]
    NotInNormGroup(String),

    /// The brute-force oracle refuses inputs past its budget guard.
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Malformed textual/JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
