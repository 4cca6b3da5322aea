//! The reference architectures. Each takes the square input size.
//!
//! Pooling uses floor arithmetic throughout; where an original network
//! relies on ceil-mode pooling, explicit padding reproduces its feature
//! map sizes.

use dnnreuse::model::ModelGraph;

use crate::net::{Net, Window};

const CLASSES: u64 = 1000;

pub fn alexnet(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cr("conv1", &x, 96, 11, 4, 2);
    let x = n.lrn(&x);
    let x = n.pool("pool1", &x, 3, 2, 0);
    let x = n.conv_win("conv2", &x, 256, Window::sq(5, 1, 2), 2);
    let x = n.relu(&x);
    let x = n.lrn(&x);
    let x = n.pool("pool2", &x, 3, 2, 0);
    let x = n.cr("conv3", &x, 384, 3, 1, 1);
    let x = n.conv_win("conv4", &x, 384, Window::sq(3, 1, 1), 2);
    let x = n.relu(&x);
    let x = n.conv_win("conv5", &x, 256, Window::sq(3, 1, 1), 2);
    let x = n.relu(&x);
    let x = n.pool("pool5", &x, 3, 2, 0);
    let x = n.fc("fc6", &x, 4096);
    let x = n.relu(&x);
    let x = n.fc("fc7", &x, 4096);
    let x = n.relu(&x);
    n.fc("fc8", &x, CLASSES);
    n.finish()
}

pub fn vgg16(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let mut x = n.input();
    for (stage, (reps, c)) in [(2, 64), (2, 128), (3, 256), (3, 512), (3, 512)].into_iter().enumerate() {
        for i in 0..reps {
            x = n.cr(&format!("conv{}_{}", stage + 1, i + 1), &x, c, 3, 1, 1);
        }
        x = n.pool(&format!("pool{}", stage + 1), &x, 2, 2, 0);
    }
    let x = n.fc("fc6", &x, 4096);
    let x = n.relu(&x);
    let x = n.fc("fc7", &x, 4096);
    let x = n.relu(&x);
    n.fc("fc8", &x, CLASSES);
    n.finish()
}

pub fn nin(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let mlp = |n: &mut Net, name: &str, x: &str, c: u64, k: u64, s: u64, p: u64, last: u64| {
        let x = n.cr(name, x, c, k, s, p);
        let x = n.cr(&format!("{name}/cccp1"), &x, c, 1, 1, 0);
        n.cr(&format!("{name}/cccp2"), &x, last, 1, 1, 0)
    };
    let x = mlp(&mut n, "conv1", &x, 96, 11, 4, 2, 96);
    let x = n.pool("pool1", &x, 3, 2, 0);
    let x = mlp(&mut n, "conv2", &x, 256, 5, 1, 2, 256);
    let x = n.pool("pool2", &x, 3, 2, 0);
    let x = mlp(&mut n, "conv3", &x, 384, 3, 1, 1, 384);
    let x = n.pool("pool3", &x, 3, 2, 0);
    let x = mlp(&mut n, "conv4", &x, 1024, 3, 1, 1, CLASSES);
    n.global_pool("pool4", &x);
    n.finish()
}

/// Four-branch module: 1×1 | 1×1→3×3 | 1×1→5×5 | pool→1×1.
fn inception_v1(n: &mut Net, name: &str, x: &str, c: [u64; 6]) -> String {
    let a = n.cr(&format!("{name}/1x1"), x, c[0], 1, 1, 0);
    let b = n.cr(&format!("{name}/3x3_reduce"), x, c[1], 1, 1, 0);
    let b = n.cr(&format!("{name}/3x3"), &b, c[2], 3, 1, 1);
    let d = n.cr(&format!("{name}/5x5_reduce"), x, c[3], 1, 1, 0);
    let d = n.cr(&format!("{name}/5x5"), &d, c[4], 5, 1, 2);
    let p = n.pool(&format!("{name}/pool"), x, 3, 1, 1);
    let p = n.cr(&format!("{name}/pool_proj"), &p, c[5], 1, 1, 0);
    n.concat(&format!("{name}/output"), &[&a, &b, &d, &p])
}

pub fn googlenet(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cr("conv1", &x, 64, 7, 2, 3);
    let x = n.pool("pool1", &x, 3, 2, 1);
    let x = n.lrn(&x);
    let x = n.cr("conv2/reduce", &x, 64, 1, 1, 0);
    let x = n.cr("conv2", &x, 192, 3, 1, 1);
    let x = n.lrn(&x);
    let mut x = n.pool("pool2", &x, 3, 2, 1);
    let modules: [(&str, [u64; 6]); 9] = [
        ("3a", [64, 96, 128, 16, 32, 32]),
        ("3b", [128, 128, 192, 32, 96, 64]),
        ("4a", [192, 96, 208, 16, 48, 64]),
        ("4b", [160, 112, 224, 24, 64, 64]),
        ("4c", [128, 128, 256, 24, 64, 64]),
        ("4d", [112, 144, 288, 32, 64, 64]),
        ("4e", [256, 160, 320, 32, 128, 128]),
        ("5a", [256, 160, 320, 32, 128, 128]),
        ("5b", [384, 192, 384, 48, 128, 128]),
    ];
    for (name, c) in modules {
        x = inception_v1(&mut n, &format!("inception_{name}"), &x, c);
        if name == "3b" || name == "4e" {
            x = n.pool(&format!("pool_{name}"), &x, 3, 2, 1);
        }
    }
    n.head(&x, CLASSES)
}

/// Batch-normalised module with a double 3×3 branch. `c[0] == 0` drops
/// the 1×1 branch; `c[5] == 0` passes the pooled input through.
fn inception_bn(n: &mut Net, name: &str, x: &str, c: [u64; 6], stride: u64) -> String {
    let mut outs = Vec::new();
    if c[0] > 0 {
        outs.push(n.cbr(&format!("{name}/1x1"), x, c[0], 1, 1, 0));
    }
    let b = n.cbr(&format!("{name}/3x3_reduce"), x, c[1], 1, 1, 0);
    outs.push(n.cbr(&format!("{name}/3x3"), &b, c[2], 3, stride, 1));
    let d = n.cbr(&format!("{name}/double_3x3_reduce"), x, c[3], 1, 1, 0);
    let d = n.cbr(&format!("{name}/double_3x3_1"), &d, c[4], 3, 1, 1);
    outs.push(n.cbr(&format!("{name}/double_3x3_2"), &d, c[4], 3, stride, 1));
    let p = n.pool(&format!("{name}/pool"), x, 3, stride, 1);
    outs.push(if c[5] > 0 {
        n.cbr(&format!("{name}/pool_proj"), &p, c[5], 1, 1, 0)
    } else {
        p
    });
    let refs: Vec<&str> = outs.iter().map(String::as_str).collect();
    n.concat(&format!("{name}/output"), &refs)
}

pub fn inception_v2(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("conv1", &x, 64, 7, 2, 3);
    let x = n.pool("pool1", &x, 3, 2, 1);
    let x = n.cbr("conv2/reduce", &x, 64, 1, 1, 0);
    let x = n.cbr("conv2", &x, 192, 3, 1, 1);
    let mut x = n.pool("pool2", &x, 3, 2, 1);
    let modules: [(&str, [u64; 6], u64); 10] = [
        ("3a", [64, 64, 64, 64, 96, 32], 1),
        ("3b", [64, 64, 96, 64, 96, 64], 1),
        ("3c", [0, 128, 160, 64, 96, 0], 2),
        ("4a", [224, 64, 96, 96, 128, 128], 1),
        ("4b", [192, 96, 128, 96, 128, 128], 1),
        ("4c", [160, 128, 160, 128, 160, 128], 1),
        ("4d", [96, 128, 192, 160, 192, 128], 1),
        ("4e", [0, 128, 192, 192, 256, 0], 2),
        ("5a", [352, 192, 320, 160, 224, 128], 1),
        ("5b", [352, 192, 320, 192, 224, 128], 1),
    ];
    for (name, c, s) in modules {
        x = inception_bn(&mut n, &format!("inception_{name}"), &x, c, s);
    }
    n.head(&x, CLASSES)
}

fn win(kh: u64, kw: u64) -> Window {
    Window::same(kh, kw)
}

pub fn inception_v3(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("stem/conv1", &x, 32, 3, 2, 0);
    let x = n.cbr("stem/conv2", &x, 32, 3, 1, 0);
    let x = n.cbr("stem/conv3", &x, 64, 3, 1, 1);
    let x = n.pool("stem/pool1", &x, 3, 2, 0);
    let x = n.cbr("stem/conv4", &x, 80, 1, 1, 0);
    let x = n.cbr("stem/conv5", &x, 192, 3, 1, 0);
    let mut x = n.pool("stem/pool2", &x, 3, 2, 0);

    for (i, pool_features) in [32, 64, 64].into_iter().enumerate() {
        let m = format!("mixed_5{}", ["b", "c", "d"][i]);
        let a = n.cbr(&format!("{m}/1x1"), &x, 64, 1, 1, 0);
        let b = n.cbr(&format!("{m}/5x5_1"), &x, 48, 1, 1, 0);
        let b = n.cbr(&format!("{m}/5x5_2"), &b, 64, 5, 1, 2);
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 64, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 96, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_3"), &d, 96, 3, 1, 1);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, pool_features, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &d, &p]);
    }

    {
        let m = "mixed_6a";
        let a = n.cbr(&format!("{m}/3x3"), &x, 384, 3, 2, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 64, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 96, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_3"), &d, 96, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &d, &p]);
    }

    for (i, c7) in [128, 160, 160, 192].into_iter().enumerate() {
        let m = format!("mixed_6{}", ["b", "c", "d", "e"][i]);
        let a = n.cbr(&format!("{m}/1x1"), &x, 192, 1, 1, 0);
        let b = n.cbr(&format!("{m}/7x7_1"), &x, c7, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/7x7_2"), &b, c7, win(1, 7));
        let b = n.cbr_win(&format!("{m}/7x7_3"), &b, 192, win(7, 1));
        let d = n.cbr(&format!("{m}/7x7dbl_1"), &x, c7, 1, 1, 0);
        let d = n.cbr_win(&format!("{m}/7x7dbl_2"), &d, c7, win(7, 1));
        let d = n.cbr_win(&format!("{m}/7x7dbl_3"), &d, c7, win(1, 7));
        let d = n.cbr_win(&format!("{m}/7x7dbl_4"), &d, c7, win(7, 1));
        let d = n.cbr_win(&format!("{m}/7x7dbl_5"), &d, 192, win(1, 7));
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 192, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &d, &p]);
    }

    {
        let m = "mixed_7a";
        let a = n.cbr(&format!("{m}/3x3_1"), &x, 192, 1, 1, 0);
        let a = n.cbr(&format!("{m}/3x3_2"), &a, 320, 3, 2, 0);
        let b = n.cbr(&format!("{m}/7x7x3_1"), &x, 192, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/7x7x3_2"), &b, 192, win(1, 7));
        let b = n.cbr_win(&format!("{m}/7x7x3_3"), &b, 192, win(7, 1));
        let b = n.cbr(&format!("{m}/7x7x3_4"), &b, 192, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &p]);
    }

    for m in ["mixed_7b", "mixed_7c"] {
        let a = n.cbr(&format!("{m}/1x1"), &x, 320, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_1"), &x, 384, 1, 1, 0);
        let b1 = n.cbr_win(&format!("{m}/3x3_2a"), &b, 384, win(1, 3));
        let b2 = n.cbr_win(&format!("{m}/3x3_2b"), &b, 384, win(3, 1));
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 448, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 384, 3, 1, 1);
        let d1 = n.cbr_win(&format!("{m}/3x3dbl_3a"), &d, 384, win(1, 3));
        let d2 = n.cbr_win(&format!("{m}/3x3dbl_3b"), &d, 384, win(3, 1));
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 192, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b1, &b2, &d1, &d2, &p]);
    }
    n.head(&x, CLASSES)
}

pub fn inception_v4(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("stem/conv1", &x, 32, 3, 2, 0);
    let x = n.cbr("stem/conv2", &x, 32, 3, 1, 0);
    let x = n.cbr("stem/conv3", &x, 64, 3, 1, 1);
    let p = n.pool("stem/pool1", &x, 3, 2, 0);
    let c = n.cbr("stem/conv4", &x, 96, 3, 2, 0);
    let x = n.concat("stem/mixed_1", &[&p, &c]);
    let a = n.cbr("stem/conv5a_1", &x, 64, 1, 1, 0);
    let a = n.cbr("stem/conv5a_2", &a, 96, 3, 1, 0);
    let b = n.cbr("stem/conv5b_1", &x, 64, 1, 1, 0);
    let b = n.cbr_win("stem/conv5b_2", &b, 64, win(7, 1));
    let b = n.cbr_win("stem/conv5b_3", &b, 64, win(1, 7));
    let b = n.cbr("stem/conv5b_4", &b, 96, 3, 1, 0);
    let x = n.concat("stem/mixed_2", &[&a, &b]);
    let c = n.cbr("stem/conv6", &x, 192, 3, 2, 0);
    let p = n.pool("stem/pool2", &x, 3, 2, 0);
    let mut x = n.concat("stem/mixed_3", &[&c, &p]);

    for i in 0..4 {
        let m = format!("inception_a{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 96, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_1"), &x, 64, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_2"), &b, 96, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 64, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 96, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_3"), &d, 96, 3, 1, 1);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 96, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &d, &p]);
    }
    {
        let m = "reduction_a";
        let a = n.cbr(&format!("{m}/3x3"), &x, 384, 3, 2, 0);
        let b = n.cbr(&format!("{m}/3x3dbl_1"), &x, 192, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3dbl_2"), &b, 224, 3, 1, 1);
        let b = n.cbr(&format!("{m}/3x3dbl_3"), &b, 256, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &p]);
    }
    for i in 0..7 {
        let m = format!("inception_b{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 384, 1, 1, 0);
        let b = n.cbr(&format!("{m}/7x7_1"), &x, 192, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/7x7_2"), &b, 224, win(1, 7));
        let b = n.cbr_win(&format!("{m}/7x7_3"), &b, 256, win(7, 1));
        let d = n.cbr(&format!("{m}/7x7dbl_1"), &x, 192, 1, 1, 0);
        let d = n.cbr_win(&format!("{m}/7x7dbl_2"), &d, 192, win(7, 1));
        let d = n.cbr_win(&format!("{m}/7x7dbl_3"), &d, 224, win(1, 7));
        let d = n.cbr_win(&format!("{m}/7x7dbl_4"), &d, 224, win(7, 1));
        let d = n.cbr_win(&format!("{m}/7x7dbl_5"), &d, 256, win(1, 7));
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 128, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &d, &p]);
    }
    {
        let m = "reduction_b";
        let a = n.cbr(&format!("{m}/3x3_1"), &x, 192, 1, 1, 0);
        let a = n.cbr(&format!("{m}/3x3_2"), &a, 192, 3, 2, 0);
        let b = n.cbr(&format!("{m}/7x7_1"), &x, 256, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/7x7_2"), &b, 256, win(1, 7));
        let b = n.cbr_win(&format!("{m}/7x7_3"), &b, 320, win(7, 1));
        let b = n.cbr(&format!("{m}/7x7_4"), &b, 320, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b, &p]);
    }
    for i in 0..3 {
        let m = format!("inception_c{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 256, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_1"), &x, 384, 1, 1, 0);
        let b1 = n.cbr_win(&format!("{m}/3x3_2a"), &b, 256, win(1, 3));
        let b2 = n.cbr_win(&format!("{m}/3x3_2b"), &b, 256, win(3, 1));
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 384, 1, 1, 0);
        let d = n.cbr_win(&format!("{m}/3x3dbl_2"), &d, 448, win(3, 1));
        let d = n.cbr_win(&format!("{m}/3x3dbl_3"), &d, 512, win(1, 3));
        let d1 = n.cbr_win(&format!("{m}/3x3dbl_4a"), &d, 256, win(1, 3));
        let d2 = n.cbr_win(&format!("{m}/3x3dbl_4b"), &d, 256, win(3, 1));
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 256, 1, 1, 0);
        x = n.concat(&format!("{m}/output"), &[&a, &b1, &b2, &d1, &d2, &p]);
    }
    n.head(&x, CLASSES)
}

/// conv 7×7/2 → bn → relu → max-pool 3×3/2.
fn resnet_stem(n: &mut Net) -> String {
    let x = n.input();
    let x = n.cbr("conv1", &x, 64, 7, 2, 3);
    n.pool("pool1", &x, 3, 2, 1)
}

/// Post-activation bottleneck: 1×1 → 3×3 (strided, grouped) → 1×1.
fn bottleneck(n: &mut Net, name: &str, x: &str, width: u64, out: u64, stride: u64, groups: u64) -> String {
    let y = n.cbr(&format!("{name}/conv1"), x, width, 1, 1, 0);
    let y = n.conv_win(&format!("{name}/conv2"), &y, width, Window::sq(3, stride, 1), groups);
    let y = n.bn_relu(&y);
    let y = n.cb(&format!("{name}/conv3"), &y, out, 1, 1, 0);
    let shortcut = if stride != 1 || n.channels(x) != out {
        n.cb(&format!("{name}/downsample"), x, out, 1, stride, 0)
    } else {
        x.to_string()
    };
    let s = n.add(&format!("{name}/add"), &[&y, &shortcut]);
    n.relu(&s)
}

fn resnet_v1(image: u64, blocks: [usize; 4], groups: u64, base_width: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let mut x = resnet_stem(&mut n);
    for (stage, &reps) in blocks.iter().enumerate() {
        let out = 256 << stage;
        let width = (base_width * groups) << stage;
        for i in 0..reps {
            let stride = if stage > 0 && i == 0 { 2 } else { 1 };
            x = bottleneck(&mut n, &format!("layer{}.{i}", stage + 1), &x, width, out, stride, groups);
        }
    }
    n.head(&x, CLASSES)
}

pub fn resnet50(image: u64) -> ModelGraph {
    resnet_v1(image, [3, 4, 6, 3], 1, 64)
}

pub fn resnet101(image: u64) -> ModelGraph {
    resnet_v1(image, [3, 4, 23, 3], 1, 64)
}

pub fn resnet152(image: u64) -> ModelGraph {
    resnet_v1(image, [3, 8, 36, 3], 1, 64)
}

pub fn resnext50(image: u64) -> ModelGraph {
    resnet_v1(image, [3, 4, 6, 3], 32, 4)
}

pub fn resnext101(image: u64) -> ModelGraph {
    resnet_v1(image, [3, 4, 23, 3], 32, 4)
}

/// Pre-activation bottleneck; the projection shortcut reads the
/// pre-activated input.
fn preact_bottleneck(n: &mut Net, name: &str, x: &str, width: u64, out: u64, stride: u64) -> String {
    let pre = n.bn_relu(x);
    let y = n.conv(&format!("{name}/conv1"), &pre, width, 1, 1, 0);
    let y = n.bn_relu(&y);
    let y = n.conv(&format!("{name}/conv2"), &y, width, 3, stride, 1);
    let y = n.bn_relu(&y);
    let y = n.conv(&format!("{name}/conv3"), &y, out, 1, 1, 0);
    let shortcut = if stride != 1 || n.channels(x) != out {
        n.conv(&format!("{name}/shortcut"), &pre, out, 1, stride, 0)
    } else {
        x.to_string()
    };
    n.add(&format!("{name}/add"), &[&y, &shortcut])
}

fn resnet_v2(image: u64, blocks: [usize; 4]) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.conv("conv1", &x, 64, 7, 2, 3);
    let mut x = n.pool("pool1", &x, 3, 2, 1);
    for (stage, &reps) in blocks.iter().enumerate() {
        let out = 256 << stage;
        let width = 64 << stage;
        for i in 0..reps {
            let stride = if stage > 0 && i == 0 { 2 } else { 1 };
            x = preact_bottleneck(&mut n, &format!("block{}.{i}", stage + 1), &x, width, out, stride);
        }
    }
    let x = n.bn_relu(&x);
    n.head(&x, CLASSES)
}

pub fn resnet101_v2(image: u64) -> ModelGraph {
    resnet_v2(image, [3, 4, 23, 3])
}

pub fn resnet152_v2(image: u64) -> ModelGraph {
    resnet_v2(image, [3, 8, 36, 3])
}

/// Residual scaling block: branches → concat → linear 1×1 → add → relu.
fn residual_join(n: &mut Net, name: &str, x: &str, branches: &[&str], relu: bool) -> String {
    let cat = n.concat(&format!("{name}/concat"), branches);
    let c = n.channels(x);
    let up = n.conv(&format!("{name}/up"), &cat, c, 1, 1, 0);
    let s = n.add(&format!("{name}/add"), &[x, &up]);
    if relu {
        n.relu(&s)
    } else {
        s
    }
}

pub fn inception_resnet_v2(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("stem/conv1", &x, 32, 3, 2, 0);
    let x = n.cbr("stem/conv2", &x, 32, 3, 1, 0);
    let x = n.cbr("stem/conv3", &x, 64, 3, 1, 1);
    let x = n.pool("stem/pool1", &x, 3, 2, 0);
    let x = n.cbr("stem/conv4", &x, 80, 1, 1, 0);
    let x = n.cbr("stem/conv5", &x, 192, 3, 1, 0);
    let x = n.pool("stem/pool2", &x, 3, 2, 0);
    let mut x = {
        let m = "mixed_5b";
        let a = n.cbr(&format!("{m}/1x1"), &x, 96, 1, 1, 0);
        let b = n.cbr(&format!("{m}/5x5_1"), &x, 48, 1, 1, 0);
        let b = n.cbr(&format!("{m}/5x5_2"), &b, 64, 5, 1, 2);
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 64, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 96, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_3"), &d, 96, 3, 1, 1);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 1, 1);
        let p = n.cbr(&format!("{m}/pool_proj"), &p, 64, 1, 1, 0);
        n.concat(&format!("{m}/output"), &[&a, &b, &d, &p])
    };
    for i in 0..10 {
        let m = format!("block35_{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 32, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_1"), &x, 32, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_2"), &b, 32, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_1"), &x, 32, 1, 1, 0);
        let d = n.cbr(&format!("{m}/3x3dbl_2"), &d, 48, 3, 1, 1);
        let d = n.cbr(&format!("{m}/3x3dbl_3"), &d, 64, 3, 1, 1);
        x = residual_join(&mut n, &m, &x, &[&a, &b, &d], true);
    }
    x = {
        let m = "mixed_6a";
        let a = n.cbr(&format!("{m}/3x3"), &x, 384, 3, 2, 0);
        let b = n.cbr(&format!("{m}/3x3dbl_1"), &x, 256, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3dbl_2"), &b, 256, 3, 1, 1);
        let b = n.cbr(&format!("{m}/3x3dbl_3"), &b, 384, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        n.concat(&format!("{m}/output"), &[&a, &b, &p])
    };
    for i in 0..20 {
        let m = format!("block17_{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 192, 1, 1, 0);
        let b = n.cbr(&format!("{m}/7x7_1"), &x, 128, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/7x7_2"), &b, 160, win(1, 7));
        let b = n.cbr_win(&format!("{m}/7x7_3"), &b, 192, win(7, 1));
        x = residual_join(&mut n, &m, &x, &[&a, &b], true);
    }
    x = {
        let m = "mixed_7a";
        let a = n.cbr(&format!("{m}/a_1"), &x, 256, 1, 1, 0);
        let a = n.cbr(&format!("{m}/a_2"), &a, 384, 3, 2, 0);
        let b = n.cbr(&format!("{m}/b_1"), &x, 256, 1, 1, 0);
        let b = n.cbr(&format!("{m}/b_2"), &b, 288, 3, 2, 0);
        let d = n.cbr(&format!("{m}/c_1"), &x, 256, 1, 1, 0);
        let d = n.cbr(&format!("{m}/c_2"), &d, 288, 3, 1, 1);
        let d = n.cbr(&format!("{m}/c_3"), &d, 320, 3, 2, 0);
        let p = n.pool(&format!("{m}/pool"), &x, 3, 2, 0);
        n.concat(&format!("{m}/output"), &[&a, &b, &d, &p])
    };
    for i in 0..10 {
        let m = format!("block8_{}", i + 1);
        let a = n.cbr(&format!("{m}/1x1"), &x, 192, 1, 1, 0);
        let b = n.cbr(&format!("{m}/3x3_1"), &x, 192, 1, 1, 0);
        let b = n.cbr_win(&format!("{m}/3x3_2"), &b, 224, win(1, 3));
        let b = n.cbr_win(&format!("{m}/3x3_3"), &b, 256, win(3, 1));
        x = residual_join(&mut n, &m, &x, &[&a, &b], i < 9);
    }
    let x = n.cbr("conv_final", &x, 1536, 1, 1, 0);
    n.head(&x, CLASSES)
}

fn densenet(image: u64, blocks: [usize; 4]) -> ModelGraph {
    const GROWTH: u64 = 32;
    let mut n = Net::new(3, image, image);
    let mut x = resnet_stem(&mut n);
    for (b, &layers) in blocks.iter().enumerate() {
        for l in 0..layers {
            let m = format!("dense{}.{}", b + 1, l + 1);
            let y = n.bn_relu(&x);
            let y = n.conv(&format!("{m}/conv1"), &y, 4 * GROWTH, 1, 1, 0);
            let y = n.bn_relu(&y);
            let y = n.conv(&format!("{m}/conv2"), &y, GROWTH, 3, 1, 1);
            x = n.concat(&format!("{m}/concat"), &[&x, &y]);
        }
        if b + 1 < blocks.len() {
            let m = format!("transition{}", b + 1);
            let y = n.bn_relu(&x);
            let c = n.channels(&x) / 2;
            let y = n.conv(&format!("{m}/conv"), &y, c, 1, 1, 0);
            x = n.pool(&format!("{m}/pool"), &y, 2, 2, 0);
        }
    }
    let x = n.bn_relu(&x);
    n.head(&x, CLASSES)
}

pub fn densenet121(image: u64) -> ModelGraph {
    densenet(image, [6, 12, 24, 16])
}

pub fn densenet169(image: u64) -> ModelGraph {
    densenet(image, [6, 12, 32, 32])
}

fn fire(n: &mut Net, name: &str, x: &str, squeeze: u64, expand: u64) -> String {
    let s = n.cr(&format!("{name}/squeeze1x1"), x, squeeze, 1, 1, 0);
    let a = n.cr(&format!("{name}/expand1x1"), &s, expand, 1, 1, 0);
    let b = n.cr(&format!("{name}/expand3x3"), &s, expand, 3, 1, 1);
    n.concat(&format!("{name}/concat"), &[&a, &b])
}

/// `pools_after` lists the fire indices followed by a 3×3/2 max-pool.
fn squeezenet(image: u64, conv1: (u64, u64), pools_after: &[usize]) -> ModelGraph {
    let fires: [(u64, u64); 8] = [
        (16, 64),
        (16, 64),
        (32, 128),
        (32, 128),
        (48, 192),
        (48, 192),
        (64, 256),
        (64, 256),
    ];
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cr("conv1", &x, conv1.0, conv1.1, 2, 0);
    let mut x = n.pool("pool1", &x, 3, 2, 0);
    for (i, (s, e)) in fires.into_iter().enumerate() {
        let idx = i + 2;
        x = fire(&mut n, &format!("fire{idx}"), &x, s, e);
        if pools_after.contains(&idx) {
            x = n.pool(&format!("pool{idx}"), &x, 3, 2, 0);
        }
    }
    let x = n.cr("conv10", &x, CLASSES, 1, 1, 0);
    n.global_pool("pool10", &x);
    n.finish()
}

pub fn squeezenet_v1_0(image: u64) -> ModelGraph {
    squeezenet(image, (96, 7), &[4, 8])
}

pub fn squeezenet_v1_1(image: u64) -> ModelGraph {
    squeezenet(image, (64, 3), &[3, 5])
}

/// Two-stage squeeze, separable 3×1/1×3 pair, 1×1 expansion, residual.
fn sqnxt_block(n: &mut Net, name: &str, x: &str, out: u64, stride: u64, groups: u64) -> String {
    let cin = n.channels(x);
    let r1 = if stride == 2 {
        cin
    } else if cin > out {
        cin / 4
    } else {
        cin / 2
    };
    let r2 = r1 / 2;
    let y = n.cbr(&format!("{name}/reduce1"), x, r1, 1, stride, 0);
    let y = n.cbr(&format!("{name}/reduce2"), &y, r2, 1, 1, 0);
    let y = n.conv_win(&format!("{name}/sep3x1"), &y, r1, win(3, 1), groups);
    let y = n.bn_relu(&y);
    let y = n.conv_win(&format!("{name}/sep1x3"), &y, r1, win(1, 3), groups);
    let y = n.bn_relu(&y);
    let y = n.cbr(&format!("{name}/expand"), &y, out, 1, 1, 0);
    let shortcut = if stride != 1 || cin != out {
        n.cbr(&format!("{name}/shortcut"), x, out, 1, stride, 0)
    } else {
        x.to_string()
    };
    let s = n.add(&format!("{name}/add"), &[&y, &shortcut]);
    n.relu(&s)
}

fn squeezenext(image: u64, blocks: [usize; 4], groups: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("conv1", &x, 64, 7, 2, 0);
    let mut x = n.pool("pool1", &x, 3, 2, 1);
    for (stage, &reps) in blocks.iter().enumerate() {
        let out = 32 << stage;
        for i in 0..reps {
            let stride = if stage > 0 && i == 0 { 2 } else { 1 };
            x = sqnxt_block(&mut n, &format!("stage{}.{i}", stage + 1), &x, out, stride, groups);
        }
    }
    let x = n.cbr("conv_final", &x, 128, 1, 1, 0);
    n.head(&x, CLASSES)
}

pub fn sqnxt23(image: u64) -> ModelGraph {
    squeezenext(image, [6, 6, 8, 1], 1)
}

pub fn sqnxt23v5(image: u64) -> ModelGraph {
    squeezenext(image, [2, 4, 14, 1], 1)
}

pub fn g_sqnxt23(image: u64) -> ModelGraph {
    squeezenext(image, [6, 6, 8, 1], 2)
}

pub fn mobilenet_v1(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let mut x = n.cbr("conv1", &x, 32, 3, 2, 1);
    let plan: [(u64, u64); 13] = [
        (64, 1),
        (128, 2),
        (128, 1),
        (256, 2),
        (256, 1),
        (512, 2),
        (512, 1),
        (512, 1),
        (512, 1),
        (512, 1),
        (512, 1),
        (1024, 2),
        (1024, 1),
    ];
    for (i, (out, s)) in plan.into_iter().enumerate() {
        let y = n.dw(&format!("conv{}/dw", i + 2), &x, 3, s);
        let y = n.bn_relu(&y);
        x = n.cbr(&format!("conv{}/sep", i + 2), &y, out, 1, 1, 0);
    }
    n.head(&x, CLASSES)
}

pub fn mobilenet_v2(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let mut x = n.cbr("conv1", &x, 32, 3, 2, 1);
    let plan: [(u64, u64, usize, u64); 7] = [
        (1, 16, 1, 1),
        (6, 24, 2, 2),
        (6, 32, 3, 2),
        (6, 64, 4, 2),
        (6, 96, 3, 1),
        (6, 160, 3, 2),
        (6, 320, 1, 1),
    ];
    let mut block = 0;
    for (t, c, reps, s) in plan {
        for i in 0..reps {
            block += 1;
            let m = format!("block{block}");
            let stride = if i == 0 { s } else { 1 };
            let cin = n.channels(&x);
            let y = if t == 1 {
                x.clone()
            } else {
                n.cbr(&format!("{m}/expand"), &x, cin * t, 1, 1, 0)
            };
            let y = n.dw(&format!("{m}/dw"), &y, 3, stride);
            let y = n.bn_relu(&y);
            let y = n.cb(&format!("{m}/project"), &y, c, 1, 1, 0);
            x = if stride == 1 && cin == c {
                n.add(&format!("{m}/add"), &[&x, &y])
            } else {
                y
            };
        }
    }
    let x = n.cbr("conv_last", &x, 1280, 1, 1, 0);
    n.head(&x, CLASSES)
}

/// Depthwise 3×3 followed by a pointwise projection and batch norm.
fn separable(n: &mut Net, name: &str, x: &str, out: u64) -> String {
    let y = n.dw(&format!("{name}/dw"), x, 3, 1);
    n.cb(&format!("{name}/pw"), &y, out, 1, 1, 0)
}

pub fn xception(image: u64) -> ModelGraph {
    let mut n = Net::new(3, image, image);
    let x = n.input();
    let x = n.cbr("conv1", &x, 32, 3, 2, 0);
    let mut x = n.cbr("conv2", &x, 64, 3, 1, 0);

    for (i, out) in [128, 256, 728].into_iter().enumerate() {
        let m = format!("entry{}", i + 1);
        let y = if i == 0 { x.clone() } else { n.relu(&x) };
        let y = separable(&mut n, &format!("{m}/sep1"), &y, out);
        let y = n.relu(&y);
        let y = separable(&mut n, &format!("{m}/sep2"), &y, out);
        let y = n.pool(&format!("{m}/pool"), &y, 3, 2, 1);
        let s = n.cb(&format!("{m}/shortcut"), &x, out, 1, 2, 0);
        x = n.add(&format!("{m}/add"), &[&y, &s]);
    }
    for i in 0..8 {
        let m = format!("middle{}", i + 1);
        let mut y = x.clone();
        for j in 0..3 {
            y = n.relu(&y);
            y = separable(&mut n, &format!("{m}/sep{}", j + 1), &y, 728);
        }
        x = n.add(&format!("{m}/add"), &[&y, &x]);
    }
    {
        let m = "exit";
        let y = n.relu(&x);
        let y = separable(&mut n, &format!("{m}/sep1"), &y, 728);
        let y = n.relu(&y);
        let y = separable(&mut n, &format!("{m}/sep2"), &y, 1024);
        let y = n.pool(&format!("{m}/pool"), &y, 3, 2, 1);
        let s = n.cb(&format!("{m}/shortcut"), &x, 1024, 1, 2, 0);
        x = n.add(&format!("{m}/add"), &[&y, &s]);
    }
    let y = separable(&mut n, "exit/sep3", &x, 1536);
    let y = n.relu(&y);
    let y = separable(&mut n, "exit/sep4", &y, 2048);
    let y = n.relu(&y);
    n.head(&y, CLASSES)
}
