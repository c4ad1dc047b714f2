use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain errors. The variant name leads every message so that the CLI
/// surfaces it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotPrime: {0} is not a supported prime modulus")]
    NotPrime(u64),
    #[error("InvalidField: expected `q` or `fp:<p>`, got `{0}`")]
    InvalidField(String),
    #[error("VariableMismatch: {0}")]
    VariableMismatch(String),
    #[error("ExpressionSyntax at column {col}: expected {expected}")]
    ExpressionSyntax { col: usize, expected: String },
    #[error("UnknownVariable: `{0}`")]
    UnknownVariable(String),
    #[error("InvalidExpression: {0}")]
    InvalidExpression(String),
    #[error("MissingUniformizer: `{0}` is not among the variables")]
    MissingUniformizer(String),
    #[error("IllDefined({0}): relation does not map into the target relations")]
    IllDefined(String),
    #[error("TorsionInput: the algebra has w-power torsion; saturate first")]
    TorsionInput,
    #[error("NotAGenerator({0}): no such generator of the ideal")]
    NotAGenerator(usize),
    #[error("NotAdmissible: {0}")]
    NotAdmissible(String),
    #[error("EmptyOverlap({0}, {1}): the chart overlap is the zero ring")]
    EmptyOverlap(usize, usize),
    #[error("NotOpenLocally: the local ideal does not contain a power of the ideal of definition")]
    NotOpenLocally,
    #[error("ExtensionBoundExceeded({0})")]
    ExtensionBoundExceeded(u32),
    #[error("NotIntegral({0}): fraction is not integral over the algebra")]
    NotIntegral(usize),
    #[error("RelationViolated({0})")]
    RelationViolated(String),
    #[error("NotIntegral({0}): value has negative order")]
    PointNotIntegral(String),
    #[error("NotContinuous({0}): generator of the ideal of definition has order <= 0")]
    NotContinuous(String),
    #[error("NoFiniteOrder: every generator vanishes at the point")]
    NoFiniteOrder,
    #[error("IncompleteNormalization(chart {0})")]
    IncompleteNormalization(usize),
    #[error("NotContainingIdealOfDefinition: {0}")]
    NotContainingIdealOfDefinition(String),
    #[error("NoForcedImage({0}): the defining fraction has no image in the target")]
    NoForcedImage(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}
