//! Per-layer work and data counts.
//!
//! Counts are per sample. Convolution follows the grouped formula
//! `M_c = (M/g)·N·K_h·K_w·O_h·O_w`, which covers standard (g = 1),
//! pointwise (1×1 kernel) and depthwise (g = M = N) convolution without
//! special cases. Biases are never counted as weights.

use serde::Serialize;

use crate::error::CostError;
use crate::model::{ConvParams, LayerKind, LayerSpec, TensorShape};

/// MACs, learnable weights and activation elements touched by one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LayerCost {
    pub macs: u64,
    pub weights: u64,
    pub activations: u64,
}

impl LayerCost {
    pub const ZERO: LayerCost = LayerCost {
        macs: 0,
        weights: 0,
        activations: 0,
    };

    /// `M_c / W`, undefined for weightless layers.
    pub fn weight_reuse(&self) -> Option<f64> {
        (self.weights > 0).then(|| self.macs as f64 / self.weights as f64)
    }

    /// `M_c / A`, undefined when no activations are counted.
    pub fn activation_reuse(&self) -> Option<f64> {
        (self.activations > 0).then(|| self.macs as f64 / self.activations as f64)
    }

    /// `M_c / (W + A)`.
    pub fn intensity(&self) -> Option<f64> {
        let data = self.weights + self.activations;
        (data > 0).then(|| self.macs as f64 / data as f64)
    }
}

impl std::ops::Add for LayerCost {
    type Output = LayerCost;

    fn add(self, rhs: LayerCost) -> LayerCost {
        LayerCost {
            macs: self.macs + rhs.macs,
            weights: self.weights + rhs.weights,
            activations: self.activations + rhs.activations,
        }
    }
}

impl std::iter::Sum for LayerCost {
    fn sum<I: Iterator<Item = LayerCost>>(iter: I) -> LayerCost {
        iter.fold(LayerCost::ZERO, |a, b| a + b)
    }
}

fn nonzero(shape: &TensorShape, what: &'static str) -> Result<(), CostError> {
    if shape.channels == 0 || shape.height == 0 || shape.width == 0 {
        Err(CostError::ZeroDimension(what))
    } else {
        Ok(())
    }
}

/// Cost of a (possibly grouped) convolution. Activations are ifmap plus
/// ofmap elements.
pub fn conv_cost(
    input: &TensorShape,
    params: &ConvParams,
    output: &TensorShape,
) -> Result<LayerCost, CostError> {
    nonzero(input, "input shape")?;
    nonzero(output, "output shape")?;
    if params.kernel_h == 0 || params.kernel_w == 0 {
        return Err(CostError::ZeroDimension("kernel"));
    }
    let m = input.channels;
    let n = params.out_channels;
    let g = params.groups;
    if g == 0 || !m.is_multiple_of(g) || !n.is_multiple_of(g) {
        return Err(CostError::GroupDivisibility {
            groups: g,
            in_channels: m,
            out_channels: n,
        });
    }
    let weights = (m / g) * n * params.kernel_h * params.kernel_w;
    Ok(LayerCost {
        macs: weights * output.spatial(),
        weights,
        activations: input.element_count() + output.element_count(),
    })
}

/// Fully connected layer over a flattened input.
pub fn fc_cost(in_elements: u64, out_features: u64) -> Result<LayerCost, CostError> {
    if in_elements == 0 {
        return Err(CostError::ZeroDimension("fc input"));
    }
    if out_features == 0 {
        return Err(CostError::ZeroDimension("fc output"));
    }
    let w = in_elements * out_features;
    Ok(LayerCost {
        macs: w,
        weights: w,
        activations: in_elements + out_features,
    })
}

/// Layers without MACs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonConvKind {
    Input,
    Pool,
    Relu,
    BatchNorm,
    Add,
    Concat,
}

impl NonConvKind {
    pub fn of(kind: &LayerKind) -> Option<Self> {
        Some(match kind {
            LayerKind::Input => NonConvKind::Input,
            LayerKind::Pool(_) => NonConvKind::Pool,
            LayerKind::Relu => NonConvKind::Relu,
            LayerKind::BatchNorm => NonConvKind::BatchNorm,
            LayerKind::Add => NonConvKind::Add,
            LayerKind::Concat => NonConvKind::Concat,
            LayerKind::Conv(_) | LayerKind::Fc { .. } => return None,
        })
    }
}

/// Zero-MAC layers. Batchnorm carries `2·C` affine parameters. In-place
/// layers count no activations since their buffer belongs to the producer;
/// the input layer counts only its own tensor.
pub fn nonconv_cost(
    kind: NonConvKind,
    inputs: &[TensorShape],
    output: &TensorShape,
    in_place: bool,
) -> LayerCost {
    let weights = match kind {
        NonConvKind::BatchNorm => 2 * output.channels,
        _ => 0,
    };
    let activations = match kind {
        NonConvKind::Input => output.element_count(),
        NonConvKind::Relu | NonConvKind::BatchNorm if in_place => 0,
        _ => inputs.iter().map(TensorShape::element_count).sum::<u64>() + output.element_count(),
    };
    LayerCost {
        macs: 0,
        weights,
        activations,
    }
}

/// Dispatches on the layer kind.
pub fn layer_cost(
    layer: &LayerSpec,
    inputs: &[TensorShape],
    output: &TensorShape,
) -> Result<LayerCost, CostError> {
    match &layer.kind {
        LayerKind::Conv(p) => conv_cost(&inputs[0], p, output),
        LayerKind::Fc { out_features } => fc_cost(inputs[0].element_count(), *out_features),
        other => Ok(nonconv_cost(
            NonConvKind::of(other).expect("non-MAC kind"),
            inputs,
            output,
            layer.in_place,
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvFamily {
    Standard,
    Pointwise,
    Group,
    Depthwise,
}

impl ConvFamily {
    pub const ALL: [ConvFamily; 4] = [
        ConvFamily::Standard,
        ConvFamily::Pointwise,
        ConvFamily::Group,
        ConvFamily::Depthwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConvFamily::Standard => "standard",
            ConvFamily::Pointwise => "pointwise",
            ConvFamily::Group => "group",
            ConvFamily::Depthwise => "depthwise",
        }
    }
}

/// Closed-form intensity and reuse ratios for a square convolution with
/// equal ifmap and ofmap size `s_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReuseCharacteristics {
    pub ai: f64,
    pub weight_reuse: f64,
    pub activation_reuse: f64,
}

/// Reuse characteristics of each convolution family from its closed form.
///
/// `g` is the number of groups. Standard and pointwise require `g = 1`,
/// pointwise additionally `s_k = 1`; depthwise requires `m = n = g`.
pub fn closed_form_ai(
    family: ConvFamily,
    m: u64,
    n: u64,
    s_k: u64,
    s_o: u64,
    g: u64,
) -> Result<ReuseCharacteristics, CostError> {
    if m == 0 || n == 0 || s_k == 0 || s_o == 0 || g == 0 {
        return Err(CostError::ZeroDimension("closed-form parameters"));
    }
    let mismatch = |reason: String| CostError::FamilyMismatch {
        family: family.name(),
        reason,
    };
    let (m, n, k2, o2, gf) = (m as f64, n as f64, (s_k * s_k) as f64, (s_o * s_o) as f64, g as f64);
    let mn_over = m * n / (m + n);
    let (ai, activation_reuse) = match family {
        ConvFamily::Standard => {
            if g != 1 {
                return Err(mismatch(format!("{g} groups")));
            }
            (m * n * k2 * o2 / (m * n * k2 + (m + n) * o2), mn_over * k2)
        }
        ConvFamily::Pointwise => {
            if g != 1 || s_k != 1 {
                return Err(mismatch(format!("kernel {s_k} with {g} groups")));
            }
            (m * n * o2 / (m * n + (m + n) * o2), mn_over)
        }
        ConvFamily::Group => {
            if !(m as u64).is_multiple_of(g) || !(n as u64).is_multiple_of(g) {
                return Err(mismatch(format!("{g} groups over {m}/{n} channels")));
            }
            (
                m * n * k2 * o2 / (m * n * k2 + gf * (m + n) * o2),
                mn_over * k2 / gf,
            )
        }
        ConvFamily::Depthwise => {
            if m != n || g != m as u64 {
                return Err(mismatch(format!("M={m}, N={n}, g={g}")));
            }
            (m * k2 * o2 / (m * k2 + (m + m) * o2), (m / (m + m)) * k2)
        }
    };
    Ok(ReuseCharacteristics {
        ai,
        weight_reuse: o2,
        activation_reuse,
    })
}

/// Conv parameters realising `family` with equal ifmap and ofmap size.
pub fn family_params(family: ConvFamily, m: u64, n: u64, s_k: u64, g: u64) -> ConvParams {
    let k = if family == ConvFamily::Pointwise { 1 } else { s_k };
    let groups = match family {
        ConvFamily::Standard | ConvFamily::Pointwise => 1,
        ConvFamily::Group => g,
        ConvFamily::Depthwise => m,
    };
    let out = if family == ConvFamily::Depthwise { m } else { n };
    ConvParams::square(out, k, 1, 0).with_groups(groups)
}
