//! A shape-tracking wrapper over [`GraphBuilder`] so architecture code can
//! ask for channel counts and spatial sizes while it is being written.

use std::collections::HashMap;

use dnnreuse::model::{ConvParams, GraphBuilder, ModelGraph, PoolParams};

#[derive(Debug, Clone, Copy)]
struct Shape {
    c: u64,
    h: u64,
    w: u64,
}

fn window(size: u64, k: u64, s: u64, p: u64) -> u64 {
    (size + 2 * p - k) / s + 1
}

/// Kernel, stride and padding along height and width.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub k: (u64, u64),
    pub s: (u64, u64),
    pub p: (u64, u64),
}

impl Window {
    pub fn sq(k: u64, s: u64, p: u64) -> Self {
        Self {
            k: (k, k),
            s: (s, s),
            p: (p, p),
        }
    }

    /// Stride-1 kernel of `kh × kw` with "same" padding.
    pub fn same(kh: u64, kw: u64) -> Self {
        Self {
            k: (kh, kw),
            s: (1, 1),
            p: (kh / 2, kw / 2),
        }
    }
}

/// Every activation layer materialises its own output tensor; the
/// reference counts treat rectifier and normalisation outputs as separate
/// activations.
const IN_PLACE: bool = false;

pub struct Net {
    b: GraphBuilder,
    shapes: HashMap<String, Shape>,
}

impl Net {
    pub fn new(c: u64, h: u64, w: u64) -> Self {
        let b = GraphBuilder::new(c, h, w);
        let mut shapes = HashMap::new();
        shapes.insert(b.input(), Shape { c, h, w });
        Self { b, shapes }
    }

    pub fn input(&self) -> String {
        self.b.input()
    }

    fn shape(&self, x: &str) -> Shape {
        self.shapes[x]
    }

    pub fn channels(&self, x: &str) -> u64 {
        self.shape(x).c
    }

    pub fn height(&self, x: &str) -> u64 {
        self.shape(x).h
    }

    fn record(&mut self, name: String, s: Shape) -> String {
        self.shapes.insert(name.clone(), s);
        name
    }

    pub fn conv_win(&mut self, name: &str, x: &str, out: u64, win: Window, groups: u64) -> String {
        let s = self.shape(x);
        let params = ConvParams {
            out_channels: out,
            kernel_h: win.k.0,
            kernel_w: win.k.1,
            stride_h: win.s.0,
            stride_w: win.s.1,
            pad_h: win.p.0,
            pad_w: win.p.1,
            groups,
        };
        let n = self.b.conv(name, x, params);
        let shape = Shape {
            c: out,
            h: window(s.h, win.k.0, win.s.0, win.p.0),
            w: window(s.w, win.k.1, win.s.1, win.p.1),
        };
        self.record(n, shape)
    }

    pub fn conv(&mut self, name: &str, x: &str, out: u64, k: u64, s: u64, p: u64) -> String {
        self.conv_win(name, x, out, Window::sq(k, s, p), 1)
    }

    /// Depthwise 3×3 (or `k`×`k`) convolution preserving channel count.
    pub fn dw(&mut self, name: &str, x: &str, k: u64, s: u64) -> String {
        let c = self.channels(x);
        self.conv_win(name, x, c, Window::sq(k, s, k / 2), c)
    }

    pub fn relu(&mut self, x: &str) -> String {
        let s = self.shape(x);
        let n = self.b.relu(&format!("{x}/relu"), x, IN_PLACE);
        self.record(n, s)
    }

    pub fn bn(&mut self, x: &str) -> String {
        let s = self.shape(x);
        let n = self.b.batchnorm(&format!("{x}/bn"), x, IN_PLACE);
        self.record(n, s)
    }

    /// Cross-channel normalisation; costed like a batch-norm layer.
    pub fn lrn(&mut self, x: &str) -> String {
        let s = self.shape(x);
        let n = self.b.batchnorm(&format!("{x}/norm"), x, IN_PLACE);
        self.record(n, s)
    }

    pub fn bn_relu(&mut self, x: &str) -> String {
        let y = self.bn(x);
        self.relu(&y)
    }

    /// conv → relu.
    pub fn cr(&mut self, name: &str, x: &str, out: u64, k: u64, s: u64, p: u64) -> String {
        let y = self.conv(name, x, out, k, s, p);
        self.relu(&y)
    }

    /// conv → bn → relu.
    pub fn cbr(&mut self, name: &str, x: &str, out: u64, k: u64, s: u64, p: u64) -> String {
        self.cbr_win(name, x, out, Window::sq(k, s, p))
    }

    pub fn cbr_win(&mut self, name: &str, x: &str, out: u64, win: Window) -> String {
        let y = self.conv_win(name, x, out, win, 1);
        self.bn_relu(&y)
    }

    /// conv → bn, no rectifier.
    pub fn cb(&mut self, name: &str, x: &str, out: u64, k: u64, s: u64, p: u64) -> String {
        let y = self.conv(name, x, out, k, s, p);
        self.bn(&y)
    }

    pub fn pool(&mut self, name: &str, x: &str, k: u64, s: u64, p: u64) -> String {
        let sh = self.shape(x);
        let n = self.b.pool(name, x, PoolParams::square(k, s, p));
        let shape = Shape {
            c: sh.c,
            h: window(sh.h, k, s, p),
            w: window(sh.w, k, s, p),
        };
        self.record(n, shape)
    }

    /// Average over the whole spatial extent.
    pub fn global_pool(&mut self, name: &str, x: &str) -> String {
        let sh = self.shape(x);
        let params = PoolParams {
            kernel_h: sh.h,
            kernel_w: sh.w,
            stride_h: 1,
            stride_w: 1,
            pad_h: 0,
            pad_w: 0,
        };
        let n = self.b.pool(name, x, params);
        self.record(n, Shape { c: sh.c, h: 1, w: 1 })
    }

    pub fn fc(&mut self, name: &str, x: &str, out: u64) -> String {
        let n = self.b.fc(name, x, out);
        self.record(n, Shape { c: out, h: 1, w: 1 })
    }

    pub fn add(&mut self, name: &str, xs: &[&str]) -> String {
        let s = self.shape(xs[0]);
        let n = self.b.add(name, xs);
        self.record(n, s)
    }

    pub fn concat(&mut self, name: &str, xs: &[&str]) -> String {
        let s = self.shape(xs[0]);
        let c = xs.iter().map(|x| self.channels(x)).sum();
        let n = self.b.concat(name, xs);
        self.record(n, Shape { c, ..s })
    }

    /// Global pool followed by the classifier.
    pub fn head(&mut self, x: &str, classes: u64) -> ModelGraph {
        let p = self.global_pool("pool/global", x);
        self.fc("fc", &p, classes);
        self.finish()
    }

    pub fn finish(&mut self) -> ModelGraph {
        let b = std::mem::replace(&mut self.b, GraphBuilder::new(1, 1, 1));
        b.build().expect("zoo architectures are well formed")
    }
}
