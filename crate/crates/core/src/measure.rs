//! Power and latency measurements, energy per pixel, and MACs per joule.
//!
//! Measurements arrive as CSV with the exact header
//! `model,device,batch,p_avg_w,i_t_ms,input_h,input_w,macs`; `macs` (per
//! sample, per forward pass) may be blank. Raw power traces use
//! `t_ms,watts`.

use std::collections::HashSet;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::MeasureError;

pub const MEASUREMENT_HEADER: [&str; 8] = [
    "model", "device", "batch", "p_avg_w", "i_t_ms", "input_h", "input_w", "macs",
];

/// One (model, device, batch) observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub model: String,
    pub device: String,
    pub batch: u32,
    /// Average power in watts.
    #[serde(rename = "p_avg_w")]
    pub p_avg: f64,
    /// Average forward-pass time in milliseconds.
    #[serde(rename = "i_t_ms")]
    pub i_t: f64,
    pub input_h: u32,
    pub input_w: u32,
    pub macs: Option<u64>,
}

impl MeasurementRecord {
    pub fn pixels(&self) -> u64 {
        self.input_h as u64 * self.input_w as u64
    }

    /// Energy of one forward pass of the whole batch, in joules.
    pub fn energy_j(&self) -> f64 {
        self.p_avg * self.i_t / 1000.0
    }

    fn validate(&self, row: usize) -> Result<(), MeasureError> {
        let checks: [(&'static str, f64); 5] = [
            ("p_avg_w", self.p_avg),
            ("i_t_ms", self.i_t),
            ("batch", self.batch as f64),
            ("input_h", self.input_h as f64),
            ("input_w", self.input_w as f64),
        ];
        for (field, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(MeasureError::NonPositive { row, field, value });
            }
        }
        if self.macs == Some(0) {
            return Err(MeasureError::NonPositive { row, field: "macs", value: 0.0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyMetrics {
    /// Joules per input pixel.
    pub epp: f64,
    /// MACs per joule.
    pub efficiency: f64,
}

fn csv_err(e: csv::Error) -> MeasureError {
    MeasureError::Csv(e.to_string())
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<(), MeasureError> {
    for column in expected {
        if !headers.iter().any(|h| h == *column) {
            return Err(MeasureError::MissingColumn(column.to_string()));
        }
    }
    Ok(())
}

/// Loads and validates measurement rows. Row numbers in errors are
/// 1-based data rows (the header is row 0).
pub fn load_measurements<R: io::Read>(reader: R) -> Result<Vec<MeasurementRecord>, MeasureError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(rdr.headers().map_err(csv_err)?, &MEASUREMENT_HEADER)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<MeasurementRecord>().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(csv_err)?;
        rec.validate(row)?;
        if !seen.insert((rec.model.clone(), rec.device.clone(), rec.batch)) {
            return Err(MeasureError::DuplicateKey {
                row,
                model: rec.model,
                device: rec.device,
                batch: rec.batch,
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_measurements<W: io::Write>(writer: W, records: &[MeasurementRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}

/// One power sample from a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub t_ms: f64,
    pub watts: f64,
}

pub fn load_power_samples<R: io::Read>(reader: R) -> Result<Vec<PowerSample>, MeasureError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(rdr.headers().map_err(csv_err)?, &["t_ms", "watts"])?;
    rdr.deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

/// Fraction of the settled level a sample must reach to end the ramp.
const SETTLE_FRACTION: f64 = 0.95;

/// Average power once the trace has settled.
///
/// The settled level is the mean of the final quartile (at least one
/// sample). Samples before the first one reaching 95% of that level are
/// the ramp and are discarded; the rest are averaged.
pub fn average_power(samples: &[f64], idle: f64, subtract_idle: bool) -> Result<f64, MeasureError> {
    if samples.is_empty() {
        return Err(MeasureError::EmptySeries);
    }
    let tail = samples.len().div_ceil(4);
    let settled = samples[samples.len() - tail..].iter().sum::<f64>() / tail as f64;
    let start = samples
        .iter()
        .position(|&w| w >= SETTLE_FRACTION * settled)
        .unwrap_or(0);
    let kept = &samples[start..];
    let avg = kept.iter().sum::<f64>() / kept.len() as f64;
    Ok(if subtract_idle { avg - idle } else { avg })
}

/// Energy per pixel in joules.
///
/// By default one frame's pixel count is the divisor even for batched
/// runs; `per_frame` additionally divides by the batch size.
pub fn epp(record: &MeasurementRecord, per_frame: bool) -> Result<f64, MeasureError> {
    let pixels = record.pixels();
    if pixels == 0 {
        return Err(MeasureError::ZeroPixels);
    }
    let mut e = record.energy_j() / pixels as f64;
    if per_frame {
        e /= record.batch as f64;
    }
    Ok(e)
}

/// `B · macs / (P · I_t)` in MACs per joule.
pub fn energy_efficiency(record: &MeasurementRecord) -> Result<f64, MeasureError> {
    let macs = record
        .macs
        .ok_or_else(|| MeasureError::MissingMacs(record.model.clone()))?;
    Ok(record.batch as f64 * macs as f64 / record.energy_j())
}

pub fn energy_metrics(record: &MeasurementRecord, per_frame: bool) -> Result<EnergyMetrics, MeasureError> {
    Ok(EnergyMetrics {
        epp: epp(record, per_frame)?,
        efficiency: energy_efficiency(record)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "model,device,batch,p_avg_w,i_t_ms,input_h,input_w,macs\n";

    fn alexnet_p100() -> MeasurementRecord {
        MeasurementRecord {
            model: "AlexNet".into(),
            device: "P100".into(),
            batch: 4,
            p_avg: 50.8,
            i_t: 2.92,
            input_h: 224,
            input_w: 224,
            macs: None,
        }
    }

    #[test]
    fn loads_row_with_blank_macs() {
        let text = format!("{HEADER}AlexNet,P100,4,50.8,2.92,224,224,\n");
        let recs = load_measurements(text.as_bytes()).unwrap();
        assert_eq!(recs, vec![alexnet_p100()]);
    }

    #[test]
    fn rejects_bad_rows() {
        let zero = format!("{HEADER}AlexNet,P100,4,0,2.92,224,224,\n");
        assert!(matches!(
            load_measurements(zero.as_bytes()),
            Err(MeasureError::NonPositive { field: "p_avg_w", .. })
        ));
        let dup = format!("{HEADER}A,P100,1,1,1,1,1,\nA,P100,1,2,2,1,1,\n");
        assert!(matches!(
            load_measurements(dup.as_bytes()),
            Err(MeasureError::DuplicateKey { row: 2, .. })
        ));
        let missing = "model,device,batch,p_avg_w,i_t_ms,input_h,macs\nA,P,1,1,1,1,\n";
        assert_eq!(
            load_measurements(missing.as_bytes()),
            Err(MeasureError::MissingColumn("input_w".into()))
        );
    }

    #[test]
    fn settled_average() {
        let trace = [31.0, 31.0, 51.0, 51.0, 51.0];
        assert_eq!(average_power(&trace, 31.0, false).unwrap(), 51.0);
        assert_eq!(average_power(&trace, 31.0, true).unwrap(), 20.0);
        let flat = [40.0; 10];
        assert_eq!(average_power(&flat, 0.0, false).unwrap(), 40.0);
        assert_eq!(average_power(&flat, 0.0, true).unwrap(), 40.0);
        assert_eq!(average_power(&[], 0.0, false), Err(MeasureError::EmptySeries));
    }

    #[test]
    fn energy_per_pixel() {
        let r = alexnet_p100();
        let literal = epp(&r, false).unwrap();
        assert!((literal - 2.956e-6).abs() < 5e-10);
        let per_frame = epp(&r, true).unwrap();
        assert!((per_frame - 7.391e-7).abs() < 5e-11);

        let unit = MeasurementRecord {
            p_avg: 1.0,
            i_t: 1000.0,
            input_h: 1,
            input_w: 1,
            batch: 1,
            ..r
        };
        assert_eq!(epp(&unit, false).unwrap(), 1.0);
    }

    #[test]
    fn efficiency() {
        let r = MeasurementRecord {
            batch: 2,
            macs: Some(1_000_000_000),
            p_avg: 10.0,
            i_t: 100.0,
            ..alexnet_p100()
        };
        assert!((energy_efficiency(&r).unwrap() - 2.0e9).abs() < 1e-3);
        assert_eq!(
            energy_efficiency(&alexnet_p100()),
            Err(MeasureError::MissingMacs("AlexNet".into()))
        );
    }

    #[test]
    fn round_trip() {
        let mut with_macs = alexnet_p100();
        with_macs.device = "P4000".into();
        with_macs.macs = Some(714_188_480);
        let recs = vec![alexnet_p100(), with_macs];
        let mut buf = Vec::new();
        write_measurements(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(HEADER));
        assert_eq!(load_measurements(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn power_trace_csv() {
        let text = "t_ms,watts\n0,31\n100,31\n200,51\n300,51\n400,51\n";
        let s = load_power_samples(text.as_bytes()).unwrap();
        let watts: Vec<f64> = s.iter().map(|p| p.watts).collect();
        assert_eq!(average_power(&watts, 31.0, false).unwrap(), 51.0);
    }
}
