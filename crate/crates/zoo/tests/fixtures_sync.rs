use std::path::Path;

use dnnreuse::model::{infer_shapes, parse_model, to_document};
use dnnreuse::profile::aggregate;
use dnnreuse_zoo::table::TABLE;

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

#[test]
fn checked_in_fixtures_match_generator() {
    let rendered = dnnreuse_zoo::fixtures::render();
    assert!(!rendered.is_empty());
    for (rel, text) in rendered {
        let on_disk = std::fs::read_to_string(fixtures().join(&rel))
            .unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
        assert!(on_disk == text, "{} is stale; rerun gen-fixtures", rel.display());
    }
}

#[test]
fn zoo_follows_table_order() {
    let zoo = dnnreuse_zoo::all();
    assert_eq!(zoo.len(), TABLE.len());
    for (entry, row) in zoo.iter().zip(TABLE.iter()) {
        assert_eq!(entry.name, row.model);
        assert_eq!(entry.image, u64::from(row.image));
        assert!(dnnreuse_zoo::find(entry.name).is_some());
    }
}

#[test]
fn every_architecture_round_trips_and_infers() {
    for entry in dnnreuse_zoo::all() {
        let graph = entry.build();
        let reparsed = parse_model(&to_document(&graph)).unwrap();
        assert_eq!(reparsed, graph, "{}", entry.name);
        let shaped = infer_shapes(&graph).unwrap_or_else(|e| panic!("{}: {e}", entry.name));
        let p = aggregate(&shaped).unwrap();
        assert!(p.macs > 0 && p.weights > 0, "{}", entry.name);
        let out = shaped.output_shape(*shaped.order().last().unwrap());
        assert_eq!(out.element_count(), 1000, "{} classifier width", entry.name);
    }
}

#[test]
fn weight_reuse_tracks_published_table() {
    // Weight counts are convention-free, so the zoo should land close to
    // the published M_c/W for the well-documented architectures.
    for (name, tolerance) in [("AlexNet", 0.01), ("VGG-16", 0.01), ("1.0-SqNxt-23", 0.01), ("MobileNet-V1", 0.05)] {
        let entry = dnnreuse_zoo::find(name).unwrap();
        let row = TABLE.iter().find(|r| r.model == name).unwrap();
        let p = aggregate(&infer_shapes(&entry.build()).unwrap()).unwrap();
        let rel = p.weight_reuse() / row.weight_reuse - 1.0;
        assert!(rel.abs() <= tolerance, "{name}: {} vs {}", p.weight_reuse(), row.weight_reuse);
    }
}
