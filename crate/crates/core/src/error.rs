use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while parsing, validating or shape-annotating a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("layer `{layer}`: unknown layer kind `{kind}`")]
    UnknownKind { layer: String, kind: String },
    #[error("duplicate layer name `{0}`")]
    DuplicateName(String),
    #[error("layer `{layer}`: input `{input}` does not name any layer")]
    DanglingInput { layer: String, input: String },
    #[error("cycle detected among layers: {}", .layers.join(", "))]
    Cycle { layers: Vec<String> },
    #[error("graph must contain exactly one `input` layer, found {0}")]
    InputCount(usize),
    #[error("layer `{layer}`: {reason}")]
    InvalidLayer { layer: String, reason: String },
    #[error("layer `{layer}`: computed {dim} is not positive")]
    DimensionUnderflow { layer: String, dim: &'static str },
    #[error("layer `{layer}`: {reason}")]
    ShapeMismatch { layer: String, reason: String },
    #[error("layer `{layer}`: groups {groups} must divide input channels {in_channels} and output channels {out_channels}")]
    GroupDivisibility {
        layer: String,
        groups: u64,
        in_channels: u64,
        out_channels: u64,
    },
    #[error("tensor dimensions must be at least 1, got {channels}x{height}x{width}")]
    EmptyTensor {
        channels: u64,
        height: u64,
        width: u64,
    },
}

impl ModelError {
    /// Name of the layer the error is attributed to, if any.
    pub fn layer(&self) -> Option<&str> {
        match self {
            ModelError::UnknownKind { layer, .. }
            | ModelError::DanglingInput { layer, .. }
            | ModelError::InvalidLayer { layer, .. }
            | ModelError::DimensionUnderflow { layer, .. }
            | ModelError::ShapeMismatch { layer, .. }
            | ModelError::GroupDivisibility { layer, .. } => Some(layer),
            ModelError::DuplicateName(name) => Some(name),
            ModelError::Cycle { layers } => layers.first().map(String::as_str),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("groups {groups} must divide input channels {in_channels} and output channels {out_channels}")]
    GroupDivisibility {
        groups: u64,
        in_channels: u64,
        out_channels: u64,
    },
    #[error("zero-sized dimension in {0}")]
    ZeroDimension(&'static str),
    #[error("{family} convolution does not admit {reason}")]
    FamilyMismatch {
        family: &'static str,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("graph has no layers to aggregate")]
    EmptyGraph,
    #[error("weights plus activations is zero")]
    NoData,
    #[error("no MAC-bearing layers")]
    NoMacLayers,
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("exponent k {0} outside [0, 1)")]
    ExponentOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("{0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: {field} must be positive, got {value}")]
    NonPositive {
        row: usize,
        field: &'static str,
        value: f64,
    },
    #[error("row {row}: duplicate measurement key ({model}, {device}, {batch})")]
    DuplicateKey {
        row: usize,
        model: String,
        device: String,
        batch: u32,
    },
    #[error("power sample series is empty")]
    EmptySeries,
    #[error("input frame has zero pixels")]
    ZeroPixels,
    #[error("record for `{0}` has no MAC count")]
    MissingMacs(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("|r| must be below 1 for the Fisher transform, got {0}")]
    PerfectCorrelation(f64),
    #[error("unsupported confidence level {0}; use 0.95 or 0.99")]
    UnsupportedLevel(f64),
    #[error("grid step {0} must lie in (0, 1]")]
    InvalidStep(f64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RooflineError {
    #[error("intensity must be positive and finite, got {0}")]
    NonPositiveIntensity(f64),
    #[error("hardware spec `{name}`: {field} must be positive")]
    InvalidHardware { name: String, field: &'static str },
    #[error("hardware spec: {0}")]
    Parse(String),
}

/// Umbrella error for callers that mix stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Roofline(#[from] RooflineError),
}
