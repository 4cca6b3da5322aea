//! Published per-network reuse ratios and GPU measurements.
//!
//! `runs` holds average inference time (ms) and power (W) in the order of
//! [`RUN_KEYS`].

/// (device, batch) for each entry of [`TableRow::runs`].
pub const RUN_KEYS: [(&str, u32); 4] = [("P100", 1), ("P100", 4), ("P4000", 1), ("P4000", 4)];

#[derive(Debug, Clone, Copy)]
pub struct Run {
    pub i_t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub model: &'static str,
    pub image: u32,
    pub weight_reuse: f64,
    pub activation_reuse: f64,
    pub ai_c: f64,
    pub di: f64,
    pub d_f: f64,
    pub a_over_w: f64,
    pub runs: [Run; 4],
}

#[rustfmt::skip]
pub const TABLE: [TableRow; 25] = [
    TableRow { model: "AlexNet", image: 224, weight_reuse: 11.85, activation_reuse: 361.50, ai_c: 11.48, di: 72.89, d_f: -535.16, a_over_w: 0.03, runs: [Run { i_t: 2.21, p: 37.0 }, Run { i_t: 2.92, p: 50.8 }, Run { i_t: 2.40, p: 60.5 }, Run { i_t: 3.77, p: 68.6 }] },
    TableRow { model: "VGG-16", image: 224, weight_reuse: 111.81, activation_reuse: 537.15, ai_c: 92.55, di: 113.02, d_f: -22.12, a_over_w: 0.21, runs: [Run { i_t: 9.19, p: 58.3 }, Run { i_t: 21.83, p: 74.8 }, Run { i_t: 10.50, p: 76.0 }, Run { i_t: 34.00, p: 83.8 }] },
    TableRow { model: "NiN", image: 224, weight_reuse: 146.05, activation_reuse: 291.34, ai_c: 97.28, di: 65.57, d_f: 32.60, a_over_w: 0.50, runs: [Run { i_t: 2.88, p: 35.0 }, Run { i_t: 3.69, p: 59.0 }, Run { i_t: 2.30, p: 59.0 }, Run { i_t: 4.45, p: 73.0 }] },
    TableRow { model: "GoogLeNet", image: 224, weight_reuse: 227.14, activation_reuse: 158.05, ai_c: 93.20, di: 42.97, d_f: 53.90, a_over_w: 1.44, runs: [Run { i_t: 10.64, p: 20.5 }, Run { i_t: 12.50, p: 40.8 }, Run { i_t: 8.36, p: 44.2 }, Run { i_t: 11.50, p: 64.2 }] },
    TableRow { model: "Inception-V2", image: 231, weight_reuse: 196.43, activation_reuse: 122.22, ai_c: 75.34, di: 34.27, d_f: 54.52, a_over_w: 1.61, runs: [Run { i_t: 18.54, p: 17.3 }, Run { i_t: 21.40, p: 31.7 }, Run { i_t: 14.50, p: 41.6 }, Run { i_t: 19.70, p: 57.0 }] },
    TableRow { model: "Inception-V3", image: 299, weight_reuse: 240.34, activation_reuse: 138.40, ai_c: 87.82, di: 39.70, d_f: 54.80, a_over_w: 1.74, runs: [Run { i_t: 29.40, p: 21.5 }, Run { i_t: 39.80, p: 38.4 }, Run { i_t: 24.91, p: 48.1 }, Run { i_t: 38.12, p: 65.2 }] },
    TableRow { model: "Inception-V4", image: 299, weight_reuse: 287.49, activation_reuse: 169.10, ai_c: 106.47, di: 48.19, d_f: 54.74, a_over_w: 1.70, runs: [Run { i_t: 55.83, p: 24.0 }, Run { i_t: 71.00, p: 41.3 }, Run { i_t: 41.45, p: 51.2 }, Run { i_t: 72.50, p: 67.0 }] },
    TableRow { model: "ResNet-50", image: 224, weight_reuse: 151.41, activation_reuse: 82.83, ai_c: 53.54, di: 24.14, d_f: 54.92, a_over_w: 1.83, runs: [Run { i_t: 15.47, p: 27.3 }, Run { i_t: 23.60, p: 43.5 }, Run { i_t: 14.56, p: 53.1 }, Run { i_t: 29.20, p: 66.8 }] },
    TableRow { model: "ResNet-101", image: 224, weight_reuse: 170.37, activation_reuse: 107.51, ai_c: 65.91, di: 30.02, d_f: 54.46, a_over_w: 1.58, runs: [Run { i_t: 32.06, p: 26.0 }, Run { i_t: 42.83, p: 42.0 }, Run { i_t: 26.50, p: 52.6 }, Run { i_t: 48.70, p: 66.0 }] },
    TableRow { model: "ResNet-152", image: 224, weight_reuse: 187.74, activation_reuse: 112.88, ai_c: 70.49, di: 31.96, d_f: 54.66, a_over_w: 1.66, runs: [Run { i_t: 46.42, p: 25.5 }, Run { i_t: 62.10, p: 41.4 }, Run { i_t: 38.00, p: 52.2 }, Run { i_t: 69.60, p: 66.5 }] },
    TableRow { model: "ResNet101-V2", image: 224, weight_reuse: 175.57, activation_reuse: 112.20, ai_c: 68.45, di: 31.22, d_f: 54.40, a_over_w: 1.56, runs: [Run { i_t: 32.26, p: 26.5 }, Run { i_t: 43.00, p: 42.5 }, Run { i_t: 26.00, p: 53.0 }, Run { i_t: 49.44, p: 56.3 }] },
    TableRow { model: "ResNet152-V2", image: 224, weight_reuse: 191.56, activation_reuse: 116.23, ai_c: 72.34, di: 32.82, d_f: 54.62, a_over_w: 1.65, runs: [Run { i_t: 44.13, p: 26.9 }, Run { i_t: 63.13, p: 42.5 }, Run { i_t: 38.38, p: 53.5 }, Run { i_t: 71.30, p: 55.8 }] },
    TableRow { model: "Inception-ResNet-V2", image: 299, weight_reuse: 235.85, activation_reuse: 139.04, ai_c: 87.47, di: 39.60, d_f: 54.73, a_over_w: 1.70, runs: [Run { i_t: 71.10, p: 24.7 }, Run { i_t: 92.48, p: 44.0 }, Run { i_t: 56.30, p: 50.3 }, Run { i_t: 89.64, p: 70.4 }] },
    TableRow { model: "ResNext50-32x4d", image: 224, weight_reuse: 190.97, activation_reuse: 71.59, ai_c: 52.07, di: 23.87, d_f: 54.16, a_over_w: 2.67, runs: [Run { i_t: 23.50, p: 25.8 }, Run { i_t: 34.27, p: 41.2 }, Run { i_t: 22.24, p: 50.0 }, Run { i_t: 43.25, p: 64.5 }] },
    TableRow { model: "ResNext101-32x4d", image: 224, weight_reuse: 205.52, activation_reuse: 89.00, ai_c: 62.11, di: 28.08, d_f: 54.79, a_over_w: 2.31, runs: [Run { i_t: 53.56, p: 22.8 }, Run { i_t: 68.00, p: 37.1 }, Run { i_t: 43.84, p: 47.7 }, Run { i_t: 74.80, p: 63.0 }] },
    TableRow { model: "DenseNet-121", image: 224, weight_reuse: 385.96, activation_reuse: 44.01, ai_c: 39.50, di: 28.10, d_f: 28.87, a_over_w: 8.77, runs: [Run { i_t: 35.82, p: 16.6 }, Run { i_t: 47.32, p: 32.4 }, Run { i_t: 30.00, p: 42.0 }, Run { i_t: 52.02, p: 58.4 }] },
    TableRow { model: "DenseNet-169", image: 224, weight_reuse: 262.90, activation_reuse: 43.08, ai_c: 37.01, di: 21.76, d_f: 41.21, a_over_w: 6.10, runs: [Run { i_t: 49.70, p: 16.3 }, Run { i_t: 65.30, p: 31.0 }, Run { i_t: 42.00, p: 41.8 }, Run { i_t: 69.45, p: 56.5 }] },
    TableRow { model: "SqueezeNet-V1.0", image: 224, weight_reuse: 678.08, activation_reuse: 68.91, ai_c: 62.55, di: 47.69, d_f: 23.77, a_over_w: 9.84, runs: [Run { i_t: 3.69, p: 22.2 }, Run { i_t: 5.45, p: 43.1 }, Run { i_t: 3.40, p: 46.1 }, Run { i_t: 6.80, p: 65.5 }] },
    TableRow { model: "SqueezeNet-V1.1", image: 224, weight_reuse: 281.57, activation_reuse: 48.49, ai_c: 41.37, di: 23.78, d_f: 42.52, a_over_w: 5.81, runs: [Run { i_t: 3.42, p: 17.3 }, Run { i_t: 4.23, p: 31.4 }, Run { i_t: 2.96, p: 41.1 }, Run { i_t: 4.72, p: 56.6 }] },
    TableRow { model: "1.0-SqNxt-23", image: 224, weight_reuse: 380.50, activation_reuse: 15.32, ai_c: 14.73, di: 22.09, d_f: -50.00, a_over_w: 24.84, runs: [Run { i_t: 22.35, p: 9.4 }, Run { i_t: 24.22, p: 15.7 }, Run { i_t: 18.41, p: 33.1 }, Run { i_t: 22.34, p: 42.0 }] },
    TableRow { model: "1.0-SqNxt-23v5", image: 224, weight_reuse: 242.04, activation_reuse: 16.01, ai_c: 15.02, di: 15.30, d_f: -1.91, a_over_w: 15.12, runs: [Run { i_t: 24.56, p: 8.3 }, Run { i_t: 25.88, p: 14.0 }, Run { i_t: 18.00, p: 32.4 }, Run { i_t: 20.85, p: 40.0 }] },
    TableRow { model: "1.0-G-SqNxt-23", image: 224, weight_reuse: 406.35, activation_reuse: 12.39, ai_c: 12.02, di: 22.80, d_f: -89.61, a_over_w: 32.80, runs: [Run { i_t: 24.27, p: 9.3 }, Run { i_t: 25.81, p: 15.3 }, Run { i_t: 18.80, p: 33.4 }, Run { i_t: 22.22, p: 42.3 }] },
    TableRow { model: "MobileNet-V1", image: 224, weight_reuse: 135.65, activation_reuse: 28.24, ai_c: 23.37, di: 12.43, d_f: 46.82, a_over_w: 4.80, runs: [Run { i_t: 27.71, p: 9.5 }, Run { i_t: 93.97, p: 9.6 }, Run { i_t: 19.10, p: 35.0 }, Run { i_t: 64.40, p: 35.4 }] },
    TableRow { model: "MobileNet-V2", image: 224, weight_reuse: 124.80, activation_reuse: 12.36, ai_c: 11.24, di: 8.71, d_f: 22.52, a_over_w: 10.10, runs: [Run { i_t: 42.90, p: 9.5 }, Run { i_t: 140.11, p: 10.4 }, Run { i_t: 30.30, p: 34.7 }, Run { i_t: 98.23, p: 35.3 }] },
    TableRow { model: "XceptionNet", image: 299, weight_reuse: 366.58, activation_reuse: 84.81, ai_c: 68.87, di: 35.29, d_f: 48.76, a_over_w: 4.32, runs: [Run { i_t: 124.92, p: 11.4 }, Run { i_t: 468.16, p: 11.5 }, Run { i_t: 87.20, p: 38.3 }, Run { i_t: 324.36, p: 38.5 }] },
];
