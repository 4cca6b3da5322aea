//! Compute- vs memory-bound classification against a single-level roofline.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::RooflineError;

/// Peak throughput and bandwidth of a device. The compute-to-memory ratio
/// is always derived, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    pub name: String,
    /// Operations per second.
    pub peak_flops: f64,
    /// Bytes per second.
    #[serde(rename = "peak_bandwidth_bytes_per_s")]
    pub peak_bandwidth: f64,
}

impl HardwareSpec {
    pub fn new(name: impl Into<String>, peak_flops: f64, peak_bandwidth: f64) -> Result<Self, RooflineError> {
        let hw = Self {
            name: name.into(),
            peak_flops,
            peak_bandwidth,
        };
        hw.validate()?;
        Ok(hw)
    }

    fn validate(&self) -> Result<(), RooflineError> {
        for (field, v) in [("peak_flops", self.peak_flops), ("peak_bandwidth_bytes_per_s", self.peak_bandwidth)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RooflineError::InvalidHardware {
                    name: self.name.clone(),
                    field,
                });
            }
        }
        Ok(())
    }

    /// Operations per byte at the knee.
    pub fn cmr(&self) -> f64 {
        self.peak_flops / self.peak_bandwidth
    }

    pub fn from_json(text: &str) -> Result<Self, RooflineError> {
        let hw: Self = serde_json::from_str(text).map_err(|e| RooflineError::Parse(e.to_string()))?;
        hw.validate()?;
        Ok(hw)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("hardware spec serializes");
        s.push('\n');
        s
    }

    /// Quadro P4000.
    pub fn p4000() -> Self {
        Self::new("P4000", 5.2e12, 243e9).expect("valid constants")
    }

    /// Tesla P100 (PCIe).
    pub fn p100() -> Self {
        Self::new("P100", 9.3e12, 549e9).expect("valid constants")
    }
}

/// How an intensity in MACs per element is placed on the hardware axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum IntensityMode {
    /// Compare the number directly with the CMR.
    #[default]
    Raw,
    /// Convert to operations per byte first.
    Converted { bytes_per_element: f64, flops_per_mac: f64 },
}

impl IntensityMode {
    /// fp32 with one MAC counted as two operations.
    pub const CONVERTED_FP32: Self = IntensityMode::Converted {
        bytes_per_element: 4.0,
        flops_per_mac: 2.0,
    };

    pub fn to_hw_units(self, intensity: f64) -> f64 {
        match self {
            IntensityMode::Raw => intensity,
            IntensityMode::Converted {
                bytes_per_element,
                flops_per_mac,
            } => intensity * flops_per_mac / bytes_per_element,
        }
    }

    pub fn from_hw_units(self, ops_per_byte: f64) -> f64 {
        match self {
            IntensityMode::Raw => ops_per_byte,
            IntensityMode::Converted {
                bytes_per_element,
                flops_per_mac,
            } => ops_per_byte * bytes_per_element / flops_per_mac,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Bound {
    ComputeBound,
    MemoryBound,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::ComputeBound => "ComputeBound",
            Bound::MemoryBound => "MemoryBound",
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative slack that puts a point sitting on the knee under the roof.
const KNEE_TOLERANCE: f64 = 1e-12;

fn place(hw: &HardwareSpec, intensity: f64, mode: IntensityMode) -> Result<(Bound, f64), RooflineError> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(RooflineError::NonPositiveIntensity(intensity));
    }
    let slope = mode.to_hw_units(intensity) * hw.peak_bandwidth;
    if slope >= hw.peak_flops * (1.0 - KNEE_TOLERANCE) {
        Ok((Bound::ComputeBound, hw.peak_flops))
    } else {
        Ok((Bound::MemoryBound, slope))
    }
}

pub fn classify(hw: &HardwareSpec, intensity: f64, mode: IntensityMode) -> Result<Bound, RooflineError> {
    place(hw, intensity, mode).map(|(b, _)| b)
}

/// `min(peak, intensity · bandwidth)` in operations per second.
pub fn attainable(hw: &HardwareSpec, intensity: f64, mode: IntensityMode) -> Result<f64, RooflineError> {
    place(hw, intensity, mode).map(|(_, a)| a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RooflineRow {
    pub label: String,
    pub intensity: f64,
    pub attainable_ops: f64,
    pub bound: Bound,
    pub measured_ops: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub intensity: f64,
    pub attainable_ops: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RooflinePlot {
    pub hardware: String,
    pub rows: Vec<RooflineRow>,
    /// Bandwidth-limited segment, ending at the knee.
    pub slope: Vec<EnvelopePoint>,
    /// Compute-limited segment, starting at the knee.
    pub roof: Vec<EnvelopePoint>,
}

pub const ENVELOPE_SAMPLES: usize = 64;

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Labelled points plus a sampled envelope spanning a decade either side
/// of the data and the knee. `measured` pairs with `points` by position.
pub fn roofline_points(
    hw: &HardwareSpec,
    points: &[(String, f64)],
    measured: Option<&[Option<f64>]>,
    mode: IntensityMode,
) -> Result<RooflinePlot, RooflineError> {
    let rows = points
        .iter()
        .enumerate()
        .map(|(i, (label, intensity))| {
            let (bound, attainable_ops) = place(hw, *intensity, mode)?;
            Ok(RooflineRow {
                label: label.clone(),
                intensity: *intensity,
                attainable_ops,
                bound,
                measured_ops: measured.and_then(|m| m.get(i).copied().flatten()),
            })
        })
        .collect::<Result<Vec<_>, RooflineError>>()?;

    let knee = mode.from_hw_units(hw.cmr());
    let lo = points.iter().map(|p| p.1).fold(knee, f64::min) / 10.0;
    let hi = points.iter().map(|p| p.1).fold(knee, f64::max) * 10.0;
    let sample = |xs: Vec<f64>| -> Result<Vec<EnvelopePoint>, RooflineError> {
        xs.into_iter()
            .map(|x| {
                Ok(EnvelopePoint {
                    intensity: x,
                    attainable_ops: attainable(hw, x, mode)?,
                })
            })
            .collect()
    };
    Ok(RooflinePlot {
        hardware: hw.name.clone(),
        rows,
        slope: sample(log_space(lo, knee, ENVELOPE_SAMPLES))?,
        roof: sample(log_space(knee, hi, ENVELOPE_SAMPLES))?,
    })
}

pub const ROOFLINE_HEADER: &str = "label,intensity,attainable_ops,bound,measured_ops";

/// Data rows only; the envelope is written separately by callers that
/// want it.
pub fn write_roofline_csv<W: io::Write>(mut w: W, rows: &[RooflineRow]) -> io::Result<()> {
    writeln!(w, "{ROOFLINE_HEADER}")?;
    for r in rows {
        let measured = r.measured_ops.map(|m| format!("{m:.3e}")).unwrap_or_default();
        writeln!(
            w,
            "{},{:.4},{:.3e},{},{}",
            csv_field(&r.label),
            r.intensity,
            r.attainable_ops,
            r.bound,
            measured
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
