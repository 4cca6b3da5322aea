//! Builders for the reference architectures and the published per-network
//! reuse and measurement table they are compared against.

pub mod arch;
pub mod fixtures;
pub mod net;
pub mod table;

use dnnreuse::model::ModelGraph;

pub struct ZooEntry {
    /// Display name, matching the `model` column of the tables.
    pub name: &'static str,
    /// File stem under `fixtures/models`.
    pub slug: &'static str,
    pub image: u64,
    build: fn(u64) -> ModelGraph,
}

impl ZooEntry {
    pub fn build(&self) -> ModelGraph {
        (self.build)(self.image)
    }
}

macro_rules! entry {
    ($name:literal, $slug:literal, $image:literal, $f:path) => {
        ZooEntry {
            name: $name,
            slug: $slug,
            image: $image,
            build: $f,
        }
    };
}

/// All architectures, in table order.
pub fn all() -> Vec<ZooEntry> {
    use arch::*;
    vec![
        entry!("AlexNet", "alexnet", 224, alexnet),
        entry!("VGG-16", "vgg16", 224, vgg16),
        entry!("NiN", "nin", 224, nin),
        entry!("GoogLeNet", "googlenet", 224, googlenet),
        entry!("Inception-V2", "inception_v2", 231, inception_v2),
        entry!("Inception-V3", "inception_v3", 299, inception_v3),
        entry!("Inception-V4", "inception_v4", 299, inception_v4),
        entry!("ResNet-50", "resnet50", 224, resnet50),
        entry!("ResNet-101", "resnet101", 224, resnet101),
        entry!("ResNet-152", "resnet152", 224, resnet152),
        entry!("ResNet101-V2", "resnet101_v2", 224, resnet101_v2),
        entry!("ResNet152-V2", "resnet152_v2", 224, resnet152_v2),
        entry!("Inception-ResNet-V2", "inception_resnet_v2", 299, inception_resnet_v2),
        entry!("ResNext50-32x4d", "resnext50_32x4d", 224, resnext50),
        entry!("ResNext101-32x4d", "resnext101_32x4d", 224, resnext101),
        entry!("DenseNet-121", "densenet121", 224, densenet121),
        entry!("DenseNet-169", "densenet169", 224, densenet169),
        entry!("SqueezeNet-V1.0", "squeezenet_v1_0", 224, squeezenet_v1_0),
        entry!("SqueezeNet-V1.1", "squeezenet_v1_1", 224, squeezenet_v1_1),
        entry!("1.0-SqNxt-23", "sqnxt23", 224, sqnxt23),
        entry!("1.0-SqNxt-23v5", "sqnxt23v5", 224, sqnxt23v5),
        entry!("1.0-G-SqNxt-23", "g_sqnxt23", 224, g_sqnxt23),
        entry!("MobileNet-V1", "mobilenet_v1", 224, mobilenet_v1),
        entry!("MobileNet-V2", "mobilenet_v2", 224, mobilenet_v2),
        entry!("XceptionNet", "xception", 299, xception),
    ]
}

pub fn find(name: &str) -> Option<ZooEntry> {
    all().into_iter().find(|e| e.name == name || e.slug == name)
}
