//! Rendering of the bundled fixture tree. Everything under `fixtures/` is
//! produced here so the files can be regenerated and checked for drift.

use std::path::PathBuf;

use dnnreuse::measure::{write_measurements, MeasurementRecord};
use dnnreuse::model::{infer_shapes, to_document};
use dnnreuse::profile::{aggregate, write_profiles, NetworkProfile, ProfileRecord};
use dnnreuse::HardwareSpec;

use crate::table::{RUN_KEYS, TABLE};

/// Analyzer profile of every zoo entry, in table order.
pub fn zoo_profiles() -> Vec<(&'static str, NetworkProfile)> {
    crate::all()
        .iter()
        .map(|e| {
            let shaped = infer_shapes(&e.build()).expect("zoo shapes infer");
            (e.name, aggregate(&shaped).expect("zoo graphs aggregate"))
        })
        .collect()
}

fn csv_text(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 csv")
}

/// `(relative path, contents)` for every fixture file.
pub fn render() -> Vec<(PathBuf, String)> {
    let mut files = Vec::new();
    for e in crate::all() {
        files.push((
            PathBuf::from(format!("models/{}.json", e.slug)),
            to_document(&e.build()),
        ));
    }
    for hw in [HardwareSpec::p4000(), HardwareSpec::p100()] {
        files.push((
            PathBuf::from(format!("hardware/{}.json", hw.name.to_lowercase())),
            hw.to_json(),
        ));
    }

    let profiles = zoo_profiles();
    let macs_of = |model: &str| {
        profiles
            .iter()
            .find(|(n, _)| *n == model)
            .map(|(_, p)| p.macs)
            .expect("every table row has a zoo entry")
    };

    let mut records = Vec::new();
    for (k, (device, batch)) in RUN_KEYS.iter().enumerate() {
        for row in &TABLE {
            let run = row.runs[k];
            records.push(MeasurementRecord {
                model: row.model.to_string(),
                device: device.to_string(),
                batch: *batch,
                p_avg: run.p,
                i_t: run.i_t,
                input_h: row.image,
                input_w: row.image,
                macs: Some(macs_of(row.model)),
            });
        }
    }
    files.push((
        PathBuf::from("measurements.csv"),
        csv_text(|b| write_measurements(b, &records)),
    ));

    let mut reference = String::from("model,image_h,image_w,weight_reuse,activation_reuse,ai_c,di,d_f,a_over_w\n");
    for r in &TABLE {
        reference.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.model, r.image, r.image, r.weight_reuse, r.activation_reuse, r.ai_c, r.di, r.d_f, r.a_over_w
        ));
    }
    files.push((PathBuf::from("reference_reuse.csv"), reference));

    // Published ratios carried onto analyzer MAC counts.
    let table_profiles: Vec<ProfileRecord> = TABLE
        .iter()
        .map(|r| {
            let (_, p) = profiles.iter().find(|(n, _)| *n == r.model).expect("zoo entry");
            let macs = p.macs as f64;
            let weights = (macs / r.weight_reuse).round() as u64;
            let activations = (macs / r.activation_reuse).round() as u64;
            let scaled = NetworkProfile {
                weights,
                activations,
                ..*p
            };
            ProfileRecord::new(r.model, &scaled)
        })
        .collect();
    files.push((
        PathBuf::from("profiles_table.csv"),
        csv_text(|b| write_profiles(b, &table_profiles)),
    ));

    let analyzer: Vec<ProfileRecord> = profiles.iter().map(|(n, p)| ProfileRecord::new(*n, p)).collect();
    files.push((
        PathBuf::from("profiles_analyzer.csv"),
        csv_text(|b| write_profiles(b, &analyzer)),
    ));
    files
}
