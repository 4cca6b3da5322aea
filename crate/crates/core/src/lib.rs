//! Static data-reuse analysis for DNN compute graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] parses and shape-annotates layer-graph documents.
//! * [`cost`] counts MACs, weights and activations for a single layer.
//! * [`profile`] aggregates layer costs into whole-network metrics and
//!   runs the concurrent-activation liveness analysis.
//! * [`metrics`] derives the weighted intensity, the disparity against the
//!   conventional cumulative intensity, and the reuse-case taxonomy.
//! * [`measure`] ingests power/latency measurements and computes energy
//!   per pixel and MACs per joule.
//! * [`stats`] holds the correlation, alpha-sweep calibration and Fisher-Z
//!   confidence interval machinery.
//! * [`roofline`] classifies workloads against a hardware spec.
//!
//! Batch-style work (alpha grids, many-model analysis, per-layer costing)
//! goes through [`exec`], which uses rayon when the `parallel` feature is
//! enabled and plain iterators otherwise.

pub mod cost;
pub mod error;
pub mod exec;
pub mod measure;
pub mod metrics;
pub mod model;
pub mod profile;
pub mod roofline;
pub mod stats;

pub use cost::{ConvFamily, LayerCost};
pub use error::{Error, Result};
pub use exec::Exec;
pub use measure::{EnergyMetrics, MeasurementRecord};
pub use metrics::{DerivedMetrics, Reuse, ReuseCase};
pub use model::{LayerKind, LayerSpec, ModelGraph, ShapedGraph, TensorShape};
pub use profile::NetworkProfile;
pub use roofline::{Bound, HardwareSpec, IntensityMode};
pub use stats::{CalibrationCurve, ConfidenceInterval};
