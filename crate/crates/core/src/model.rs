//! Layer-graph documents: parsing, validation, topological ordering and
//! shape inference.
//!
//! A model document is JSON:
//!
//! ```json
//! {
//!   "input": { "channels": 3, "h": 224, "w": 224 },
//!   "layers": [
//!     { "name": "data", "kind": "input" },
//!     { "name": "conv1", "kind": "conv", "inputs": ["data"],
//!       "out_channels": 64, "kernel_h": 3, "kernel_w": 3, "pad_h": 1, "pad_w": 1 },
//!     { "name": "relu1", "kind": "relu", "inputs": ["conv1"] }
//!   ]
//! }
//! ```
//!
//! Strides default to 1, padding to 0, groups to 1 and `in_place` (relu and
//! batchnorm only) to true.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Channels × height × width of one sample's activation tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    pub channels: u64,
    pub height: u64,
    pub width: u64,
}

impl TensorShape {
    pub fn new(channels: u64, height: u64, width: u64) -> Result<Self, ModelError> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(ModelError::EmptyTensor {
                channels,
                height,
                width,
            });
        }
        Ok(Self {
            channels,
            height,
            width,
        })
    }

    pub fn element_count(&self) -> u64 {
        self.channels * self.height * self.width
    }

    pub fn spatial(&self) -> u64 {
        self.height * self.width
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.channels, self.height, self.width)
    }
}

/// Convolution hyper-parameters. `groups == in_channels == out_channels`
/// is a depthwise convolution; 1×1 kernels are pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvParams {
    pub out_channels: u64,
    pub kernel_h: u64,
    pub kernel_w: u64,
    pub stride_h: u64,
    pub stride_w: u64,
    pub pad_h: u64,
    pub pad_w: u64,
    pub groups: u64,
}

impl ConvParams {
    /// Square kernel, symmetric stride and padding, one group.
    pub fn square(out_channels: u64, kernel: u64, stride: u64, pad: u64) -> Self {
        Self {
            out_channels,
            kernel_h: kernel,
            kernel_w: kernel,
            stride_h: stride,
            stride_w: stride,
            pad_h: pad,
            pad_w: pad,
            groups: 1,
        }
    }

    pub fn with_groups(mut self, groups: u64) -> Self {
        self.groups = groups;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolParams {
    pub kernel_h: u64,
    pub kernel_w: u64,
    pub stride_h: u64,
    pub stride_w: u64,
    pub pad_h: u64,
    pub pad_w: u64,
}

impl PoolParams {
    pub fn square(kernel: u64, stride: u64, pad: u64) -> Self {
        Self {
            kernel_h: kernel,
            kernel_w: kernel,
            stride_h: stride,
            stride_w: stride,
            pad_h: pad,
            pad_w: pad,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Input,
    Conv(ConvParams),
    Fc { out_features: u64 },
    Pool(PoolParams),
    Relu,
    BatchNorm,
    Add,
    Concat,
}

impl LayerKind {
    pub fn tag(&self) -> &'static str {
        match self {
            LayerKind::Input => "input",
            LayerKind::Conv(_) => "conv",
            LayerKind::Fc { .. } => "fc",
            LayerKind::Pool(_) => "pool",
            LayerKind::Relu => "relu",
            LayerKind::BatchNorm => "batchnorm",
            LayerKind::Add => "add",
            LayerKind::Concat => "concat",
        }
    }

    /// Conv and FC layers carry MACs and learnable weights.
    pub fn is_mac_bearing(&self) -> bool {
        matches!(self, LayerKind::Conv(_) | LayerKind::Fc { .. })
    }

    fn supports_in_place(&self) -> bool {
        matches!(self, LayerKind::Relu | LayerKind::BatchNorm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub inputs: Vec<String>,
    /// Output aliases the input buffer. Only meaningful for relu/batchnorm;
    /// always false for other kinds.
    pub in_place: bool,
}

impl LayerSpec {
    pub fn new(name: impl Into<String>, kind: LayerKind, inputs: &[&str]) -> Self {
        Self {
            name: name.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            in_place: kind.supports_in_place(),
        }
    }

    pub fn in_place(mut self, in_place: bool) -> Self {
        self.in_place = in_place && self.kind.supports_in_place();
        self
    }
}

/// A validated, acyclic layer graph. Layer order is declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGraph {
    input_shape: TensorShape,
    layers: Vec<LayerSpec>,
    producers: Vec<Vec<usize>>,
}

impl ModelGraph {
    /// Validates `layers` and resolves input references.
    pub fn new(input_shape: TensorShape, layers: Vec<LayerSpec>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(layers.len());
        for (i, layer) in layers.iter().enumerate() {
            if index.insert(layer.name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateName(layer.name.clone()));
            }
        }

        let mut producers = Vec::with_capacity(layers.len());
        for layer in &layers {
            check_arity(layer)?;
            check_params(layer)?;
            let mut resolved = Vec::with_capacity(layer.inputs.len());
            for input in &layer.inputs {
                match index.get(input.as_str()) {
                    Some(&j) => resolved.push(j),
                    None => {
                        return Err(ModelError::DanglingInput {
                            layer: layer.name.clone(),
                            input: input.clone(),
                        })
                    }
                }
            }
            producers.push(resolved);
        }

        let inputs = layers
            .iter()
            .filter(|l| l.kind == LayerKind::Input)
            .count();
        if inputs != 1 {
            return Err(ModelError::InputCount(inputs));
        }

        let graph = Self {
            input_shape,
            layers,
            producers,
        };
        graph.topo_order()?;
        Ok(graph)
    }

    pub fn input_shape(&self) -> TensorShape {
        self.input_shape
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Indices of the layers feeding layer `i`, in declared order.
    pub fn producers(&self, i: usize) -> &[usize] {
        &self.producers[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.layers.iter().position(|l| l.name == name)
    }

    pub fn edge_count(&self) -> usize {
        self.producers.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm; among ready layers the earliest declared runs first.
    pub fn topo_order(&self) -> Result<Vec<usize>, ModelError> {
        let n = self.layers.len();
        let mut pending = vec![0usize; n];
        let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, producers) in self.producers.iter().enumerate() {
            pending[i] = producers.len();
            for &p in producers {
                consumers[p].push(i);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &consumers[i] {
                pending[c] -= 1;
                if pending[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != n {
            let layers = (0..n)
                .filter(|&i| pending[i] > 0)
                .map(|i| self.layers[i].name.clone())
                .collect();
            return Err(ModelError::Cycle { layers });
        }
        Ok(order)
    }

    /// Layer names in execution order.
    pub fn topo_names(&self) -> Result<Vec<&str>, ModelError> {
        Ok(self
            .topo_order()?
            .into_iter()
            .map(|i| self.layers[i].name.as_str())
            .collect())
    }
}

fn invalid(layer: &LayerSpec, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidLayer {
        layer: layer.name.clone(),
        reason: reason.into(),
    }
}

fn check_arity(layer: &LayerSpec) -> Result<(), ModelError> {
    let n = layer.inputs.len();
    let ok = match layer.kind {
        LayerKind::Input => n == 0,
        LayerKind::Add => n >= 2,
        LayerKind::Concat => n >= 1,
        _ => n == 1,
    };
    if ok {
        return Ok(());
    }
    let expected = match layer.kind {
        LayerKind::Input => "no inputs",
        LayerKind::Add => "at least two inputs",
        LayerKind::Concat => "at least one input",
        _ => "exactly one input",
    };
    Err(invalid(
        layer,
        format!("{} layer takes {expected}, got {n}", layer.kind.tag()),
    ))
}

fn check_params(layer: &LayerSpec) -> Result<(), ModelError> {
    match layer.kind {
        LayerKind::Conv(p) => {
            if p.out_channels == 0 {
                return Err(invalid(layer, "out_channels must be at least 1"));
            }
            if p.kernel_h == 0 || p.kernel_w == 0 {
                return Err(invalid(layer, "kernel must be at least 1x1"));
            }
            if p.stride_h == 0 || p.stride_w == 0 {
                return Err(invalid(layer, "stride must be at least 1"));
            }
            if p.groups == 0 {
                return Err(invalid(layer, "groups must be at least 1"));
            }
            if p.out_channels % p.groups != 0 {
                return Err(invalid(
                    layer,
                    format!(
                        "groups {} must divide out_channels {}",
                        p.groups, p.out_channels
                    ),
                ));
            }
        }
        LayerKind::Pool(p) => {
            if p.kernel_h == 0 || p.kernel_w == 0 {
                return Err(invalid(layer, "kernel must be at least 1x1"));
            }
            if p.stride_h == 0 || p.stride_w == 0 {
                return Err(invalid(layer, "stride must be at least 1"));
            }
        }
        LayerKind::Fc { out_features: 0 } => {
            return Err(invalid(layer, "out_features must be at least 1"));
        }
        _ => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Document format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    channels: u64,
    h: u64,
    w: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_channels: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_w: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stride_h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stride_w: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pad_h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pad_w: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_features: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    in_place: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    input: RawInput,
    layers: Vec<RawLayer>,
}

impl RawLayer {
    fn unexpected(&self, allowed: &[&str]) -> Option<&'static str> {
        let present = [
            ("out_channels", self.out_channels.is_some()),
            ("kernel_h", self.kernel_h.is_some()),
            ("kernel_w", self.kernel_w.is_some()),
            ("stride_h", self.stride_h.is_some()),
            ("stride_w", self.stride_w.is_some()),
            ("pad_h", self.pad_h.is_some()),
            ("pad_w", self.pad_w.is_some()),
            ("groups", self.groups.is_some()),
            ("out_features", self.out_features.is_some()),
            ("in_place", self.in_place.is_some()),
        ];
        present
            .into_iter()
            .find(|(field, set)| *set && !allowed.contains(field))
            .map(|(field, _)| field)
    }

    fn required(&self, field: &'static str, value: Option<u64>) -> Result<u64, ModelError> {
        value.ok_or_else(|| ModelError::InvalidLayer {
            layer: self.name.clone(),
            reason: format!("{} layer requires `{field}`", self.kind),
        })
    }

    fn into_spec(self) -> Result<LayerSpec, ModelError> {
        const CONV: &[&str] = &[
            "out_channels",
            "kernel_h",
            "kernel_w",
            "stride_h",
            "stride_w",
            "pad_h",
            "pad_w",
            "groups",
        ];
        const POOL: &[&str] = &["kernel_h", "kernel_w", "stride_h", "stride_w", "pad_h", "pad_w"];
        let allowed: &[&str] = match self.kind.as_str() {
            "conv" => CONV,
            "pool" => POOL,
            "fc" => &["out_features"],
            "relu" | "batchnorm" => &["in_place"],
            "input" | "add" | "concat" => &[],
            other => {
                return Err(ModelError::UnknownKind {
                    layer: self.name.clone(),
                    kind: other.to_string(),
                })
            }
        };
        if let Some(field) = self.unexpected(allowed) {
            return Err(ModelError::InvalidLayer {
                layer: self.name.clone(),
                reason: format!("field `{field}` does not apply to {} layers", self.kind),
            });
        }

        let kind = match self.kind.as_str() {
            "input" => LayerKind::Input,
            "conv" => LayerKind::Conv(ConvParams {
                out_channels: self.required("out_channels", self.out_channels)?,
                kernel_h: self.required("kernel_h", self.kernel_h)?,
                kernel_w: self.required("kernel_w", self.kernel_w)?,
                stride_h: self.stride_h.unwrap_or(1),
                stride_w: self.stride_w.unwrap_or(1),
                pad_h: self.pad_h.unwrap_or(0),
                pad_w: self.pad_w.unwrap_or(0),
                groups: self.groups.unwrap_or(1),
            }),
            "fc" => LayerKind::Fc {
                out_features: self.required("out_features", self.out_features)?,
            },
            "pool" => LayerKind::Pool(PoolParams {
                kernel_h: self.required("kernel_h", self.kernel_h)?,
                kernel_w: self.required("kernel_w", self.kernel_w)?,
                stride_h: self.stride_h.unwrap_or(1),
                stride_w: self.stride_w.unwrap_or(1),
                pad_h: self.pad_h.unwrap_or(0),
                pad_w: self.pad_w.unwrap_or(0),
            }),
            "relu" => LayerKind::Relu,
            "batchnorm" => LayerKind::BatchNorm,
            "add" => LayerKind::Add,
            "concat" => LayerKind::Concat,
            _ => unreachable!("kind checked above"),
        };
        Ok(LayerSpec {
            in_place: kind.supports_in_place() && self.in_place.unwrap_or(true),
            name: self.name,
            kind,
            inputs: self.inputs,
        })
    }

    fn from_spec(spec: &LayerSpec) -> Self {
        let mut raw = RawLayer {
            name: spec.name.clone(),
            kind: spec.kind.tag().to_string(),
            inputs: spec.inputs.clone(),
            ..Default::default()
        };
        match spec.kind {
            LayerKind::Conv(p) => {
                raw.out_channels = Some(p.out_channels);
                raw.kernel_h = Some(p.kernel_h);
                raw.kernel_w = Some(p.kernel_w);
                raw.stride_h = Some(p.stride_h);
                raw.stride_w = Some(p.stride_w);
                raw.pad_h = Some(p.pad_h);
                raw.pad_w = Some(p.pad_w);
                raw.groups = Some(p.groups);
            }
            LayerKind::Pool(p) => {
                raw.kernel_h = Some(p.kernel_h);
                raw.kernel_w = Some(p.kernel_w);
                raw.stride_h = Some(p.stride_h);
                raw.stride_w = Some(p.stride_w);
                raw.pad_h = Some(p.pad_h);
                raw.pad_w = Some(p.pad_w);
            }
            LayerKind::Fc { out_features } => raw.out_features = Some(out_features),
            LayerKind::Relu | LayerKind::BatchNorm => raw.in_place = Some(spec.in_place),
            LayerKind::Input | LayerKind::Add | LayerKind::Concat => {}
        }
        raw
    }
}

/// Parses a model document. Layer order is preserved as written.
pub fn parse_model(text: &str) -> Result<ModelGraph, ModelError> {
    let doc: RawDocument = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let input_shape = TensorShape::new(doc.input.channels, doc.input.h, doc.input.w)?;
    let layers = doc
        .layers
        .into_iter()
        .map(RawLayer::into_spec)
        .collect::<Result<Vec<_>, _>>()?;
    ModelGraph::new(input_shape, layers)
}

/// Serializes a graph back into the document format (pretty-printed JSON,
/// every parameter spelled out).
pub fn to_document(graph: &ModelGraph) -> String {
    let doc = RawDocument {
        input: RawInput {
            channels: graph.input_shape.channels,
            h: graph.input_shape.height,
            w: graph.input_shape.width,
        },
        layers: graph.layers.iter().map(RawLayer::from_spec).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Shape inference
// ---------------------------------------------------------------------------

/// A graph with a concrete output shape per layer and a fixed execution
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedGraph {
    graph: ModelGraph,
    order: Vec<usize>,
    shapes: Vec<TensorShape>,
}

/// One layer as seen during execution.
#[derive(Debug, Clone)]
pub struct LayerView<'a> {
    pub index: usize,
    pub spec: &'a LayerSpec,
    pub inputs: Vec<TensorShape>,
    pub output: TensorShape,
}

impl ShapedGraph {
    pub fn graph(&self) -> &ModelGraph {
        &self.graph
    }

    /// Execution order (indices into `graph().layers()`).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn output_shape(&self, i: usize) -> TensorShape {
        self.shapes[i]
    }

    pub fn shapes(&self) -> &[TensorShape] {
        &self.shapes
    }

    pub fn view(&self, i: usize) -> LayerView<'_> {
        LayerView {
            index: i,
            spec: &self.graph.layers[i],
            inputs: self
                .graph
                .producers(i)
                .iter()
                .map(|&p| self.shapes[p])
                .collect(),
            output: self.shapes[i],
        }
    }

    /// Layers in execution order.
    pub fn steps(&self) -> impl Iterator<Item = LayerView<'_>> {
        self.order.iter().map(move |&i| self.view(i))
    }
}

fn window_out(
    layer: &LayerSpec,
    dim: &'static str,
    input: u64,
    kernel: u64,
    stride: u64,
    pad: u64,
) -> Result<u64, ModelError> {
    let padded = input + 2 * pad;
    if padded < kernel {
        return Err(ModelError::DimensionUnderflow {
            layer: layer.name.clone(),
            dim,
        });
    }
    Ok((padded - kernel) / stride + 1)
}

fn infer_layer(
    graph: &ModelGraph,
    i: usize,
    inputs: &[TensorShape],
) -> Result<TensorShape, ModelError> {
    let layer = &graph.layers[i];
    let shape = match layer.kind {
        LayerKind::Input => graph.input_shape,
        LayerKind::Conv(p) => {
            let x = inputs[0];
            if !x.channels.is_multiple_of(p.groups) || p.out_channels % p.groups != 0 {
                return Err(ModelError::GroupDivisibility {
                    layer: layer.name.clone(),
                    groups: p.groups,
                    in_channels: x.channels,
                    out_channels: p.out_channels,
                });
            }
            TensorShape {
                channels: p.out_channels,
                height: window_out(layer, "height", x.height, p.kernel_h, p.stride_h, p.pad_h)?,
                width: window_out(layer, "width", x.width, p.kernel_w, p.stride_w, p.pad_w)?,
            }
        }
        LayerKind::Pool(p) => {
            let x = inputs[0];
            TensorShape {
                channels: x.channels,
                height: window_out(layer, "height", x.height, p.kernel_h, p.stride_h, p.pad_h)?,
                width: window_out(layer, "width", x.width, p.kernel_w, p.stride_w, p.pad_w)?,
            }
        }
        LayerKind::Fc { out_features } => TensorShape {
            channels: out_features,
            height: 1,
            width: 1,
        },
        LayerKind::Relu | LayerKind::BatchNorm => inputs[0],
        LayerKind::Add => {
            let first = inputs[0];
            if let Some(other) = inputs.iter().find(|s| **s != first) {
                return Err(ModelError::ShapeMismatch {
                    layer: layer.name.clone(),
                    reason: format!("add operands differ: {first} vs {other}"),
                });
            }
            first
        }
        LayerKind::Concat => {
            let first = inputs[0];
            if let Some(other) = inputs
                .iter()
                .find(|s| s.height != first.height || s.width != first.width)
            {
                return Err(ModelError::ShapeMismatch {
                    layer: layer.name.clone(),
                    reason: format!("concat operands disagree spatially: {first} vs {other}"),
                });
            }
            TensorShape {
                channels: inputs.iter().map(|s| s.channels).sum(),
                ..first
            }
        }
    };
    Ok(shape)
}

/// Annotates every layer with its output shape.
///
/// Conv/pool outputs use `floor((in + 2·pad − kernel) / stride) + 1`; FC
/// flattens its input and yields `out_features × 1 × 1`.
pub fn infer_shapes(graph: &ModelGraph) -> Result<ShapedGraph, ModelError> {
    let order = graph.topo_order()?;
    let mut shapes: Vec<Option<TensorShape>> = vec![None; graph.len()];
    for &i in &order {
        let inputs: Vec<TensorShape> = graph.producers[i]
            .iter()
            .map(|&p| shapes[p].expect("producer shaped before consumer"))
            .collect();
        shapes[i] = Some(infer_layer(graph, i, &inputs)?);
    }
    Ok(ShapedGraph {
        graph: graph.clone(),
        order,
        shapes: shapes.into_iter().map(|s| s.expect("all shaped")).collect(),
    })
}

/// Parse then shape-annotate in one call.
pub fn load_model(text: &str) -> Result<ShapedGraph, ModelError> {
    infer_shapes(&parse_model(text)?)
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

/// Incremental graph construction. Each method appends one layer and
/// returns its name so calls can be chained through `inputs`.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    input_shape: TensorShape,
    layers: Vec<LayerSpec>,
}

impl GraphBuilder {
    /// Starts a graph whose input layer is named `data`.
    pub fn new(channels: u64, height: u64, width: u64) -> Self {
        Self {
            input_shape: TensorShape {
                channels,
                height,
                width,
            },
            layers: vec![LayerSpec::new("data", LayerKind::Input, &[])],
        }
    }

    pub fn input(&self) -> String {
        "data".to_string()
    }

    pub fn push(&mut self, layer: LayerSpec) -> String {
        let name = layer.name.clone();
        self.layers.push(layer);
        name
    }

    pub fn conv(&mut self, name: &str, input: &str, params: ConvParams) -> String {
        self.push(LayerSpec::new(name, LayerKind::Conv(params), &[input]))
    }

    pub fn fc(&mut self, name: &str, input: &str, out_features: u64) -> String {
        self.push(LayerSpec::new(name, LayerKind::Fc { out_features }, &[input]))
    }

    pub fn pool(&mut self, name: &str, input: &str, params: PoolParams) -> String {
        self.push(LayerSpec::new(name, LayerKind::Pool(params), &[input]))
    }

    pub fn relu(&mut self, name: &str, input: &str, in_place: bool) -> String {
        self.push(LayerSpec::new(name, LayerKind::Relu, &[input]).in_place(in_place))
    }

    pub fn batchnorm(&mut self, name: &str, input: &str, in_place: bool) -> String {
        self.push(LayerSpec::new(name, LayerKind::BatchNorm, &[input]).in_place(in_place))
    }

    pub fn add(&mut self, name: &str, inputs: &[&str]) -> String {
        self.push(LayerSpec::new(name, LayerKind::Add, inputs))
    }

    pub fn concat(&mut self, name: &str, inputs: &[&str]) -> String {
        self.push(LayerSpec::new(name, LayerKind::Concat, inputs))
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn build(self) -> Result<ModelGraph, ModelError> {
        let shape = TensorShape::new(
            self.input_shape.channels,
            self.input_shape.height,
            self.input_shape.width,
        )?;
        ModelGraph::new(shape, self.layers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PIPELINE: &str = r#"{
        "input": {"channels": 3, "h": 224, "w": 224},
        "layers": [
            {"name": "data", "kind": "input"},
            {"name": "conv1", "kind": "conv", "inputs": ["data"], "out_channels": 64,
             "kernel_h": 3, "kernel_w": 3, "pad_h": 1, "pad_w": 1},
            {"name": "relu1", "kind": "relu", "inputs": ["conv1"]}
        ]
    }"#;

    fn doc(layers: &str) -> String {
        format!(r#"{{"input": {{"channels": 3, "h": 8, "w": 8}}, "layers": [{layers}]}}"#)
    }

    #[test]
    fn parses_smallest_pipeline() {
        let g = parse_model(PIPELINE).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.layers()[2].in_place);
        let names: Vec<_> = g.layers().iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, ["data", "conv1", "relu1"]);
    }

    #[test]
    fn same_padding_preserves_spatial_size() {
        let s = infer_shapes(&parse_model(PIPELINE).unwrap()).unwrap();
        assert_eq!(s.output_shape(1), TensorShape::new(64, 224, 224).unwrap());
        assert_eq!(s.output_shape(2), s.output_shape(1));
    }

    #[test]
    fn rejects_unknown_kind() {
        let text = doc(r#"{"name": "data", "kind": "input"},
            {"name": "up", "kind": "deconv", "inputs": ["data"]}"#);
        assert_eq!(
            parse_model(&text),
            Err(ModelError::UnknownKind {
                layer: "up".into(),
                kind: "deconv".into()
            })
        );
    }

    #[test]
    fn rejects_cycle() {
        let text = doc(r#"{"name": "data", "kind": "input"},
            {"name": "a", "kind": "add", "inputs": ["data", "b"]},
            {"name": "b", "kind": "relu", "inputs": ["a"]}"#);
        match parse_model(&text) {
            Err(ModelError::Cycle { layers }) => assert_eq!(layers, ["a", "b"]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_and_dangling_refs() {
        let dup = doc(r#"{"name": "data", "kind": "input"},
            {"name": "r", "kind": "relu", "inputs": ["data"]},
            {"name": "r", "kind": "relu", "inputs": ["data"]}"#);
        assert_eq!(parse_model(&dup), Err(ModelError::DuplicateName("r".into())));

        let dangling = doc(r#"{"name": "data", "kind": "input"},
            {"name": "r", "kind": "relu", "inputs": ["nope"]}"#);
        assert!(matches!(
            parse_model(&dangling),
            Err(ModelError::DanglingInput { ref input, .. }) if input == "nope"
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_model("{\n  \"input\": {\"channels\": 3,,}\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn requires_exactly_one_input_layer() {
        let none = doc(r#"{"name": "r", "kind": "relu", "inputs": []}"#);
        assert!(parse_model(&none).is_err());
        let two = doc(r#"{"name": "a", "kind": "input"}, {"name": "b", "kind": "input"}"#);
        assert_eq!(parse_model(&two), Err(ModelError::InputCount(2)));
    }

    #[test]
    fn rejects_misplaced_fields() {
        let text = doc(r#"{"name": "data", "kind": "input"},
            {"name": "p", "kind": "pool", "inputs": ["data"], "kernel_h": 2, "kernel_w": 2, "groups": 2}"#);
        assert!(matches!(parse_model(&text), Err(ModelError::InvalidLayer { .. })));
        let missing = doc(r#"{"name": "data", "kind": "input"},
            {"name": "c", "kind": "conv", "inputs": ["data"], "kernel_h": 3, "kernel_w": 3}"#);
        let err = parse_model(&missing).unwrap_err();
        assert_eq!(err.layer(), Some("c"));
    }

    #[test]
    fn alexnet_first_stage_geometry() {
        let mut b = GraphBuilder::new(3, 224, 224);
        let c = b.conv("conv1", "data", ConvParams::square(96, 11, 4, 0));
        b.pool("pool1", &c, PoolParams::square(3, 2, 0));
        let s = infer_shapes(&b.build().unwrap()).unwrap();
        assert_eq!(s.output_shape(1), TensorShape::new(96, 54, 54).unwrap());
        assert_eq!(s.output_shape(2), TensorShape::new(96, 26, 26).unwrap());
    }

    /// Number of valid window placements along one axis, counted directly.
    fn placements(input: u64, kernel: u64, stride: u64, pad: u64) -> u64 {
        let padded = input + 2 * pad;
        (0..padded).step_by(stride as usize).filter(|&s| s + kernel <= padded).count() as u64
    }

    #[test]
    fn window_formula_matches_placement_count() {
        let layer = LayerSpec::new("x", LayerKind::Relu, &["data"]);
        for input in 1..20 {
            for kernel in 1..6 {
                for stride in 1..4 {
                    for pad in 0..3 {
                        let direct = placements(input, kernel, stride, pad);
                        let formula = window_out(&layer, "height", input, kernel, stride, pad);
                        match formula {
                            Ok(v) => assert_eq!(v, direct),
                            Err(_) => assert_eq!(direct, 0),
                        }
                    }
                }
            }
        }
        assert_eq!(placements(224, 11, 4, 0), 54);
        assert_eq!(placements(54, 3, 2, 0), 26);
    }

    #[test]
    fn shape_errors() {
        let mut b = GraphBuilder::new(3, 4, 4);
        b.conv("big", "data", ConvParams::square(8, 7, 1, 0));
        let err = infer_shapes(&b.build().unwrap()).unwrap_err();
        assert!(matches!(err, ModelError::DimensionUnderflow { .. }));

        let mut b = GraphBuilder::new(3, 4, 4);
        let c = b.conv("c", "data", ConvParams::square(8, 1, 1, 0));
        b.add("sum", &["data", &c]);
        assert!(matches!(
            infer_shapes(&b.build().unwrap()),
            Err(ModelError::ShapeMismatch { .. })
        ));

        let mut b = GraphBuilder::new(3, 4, 4);
        b.conv("g", "data", ConvParams::square(6, 1, 1, 0).with_groups(2));
        assert!(matches!(
            infer_shapes(&b.build().unwrap()),
            Err(ModelError::GroupDivisibility { .. })
        ));
    }

    #[test]
    fn concat_sums_channels_and_fc_flattens() {
        let mut b = GraphBuilder::new(3, 8, 8);
        let a = b.conv("a", "data", ConvParams::square(4, 1, 1, 0));
        let c = b.conv("c", "data", ConvParams::square(5, 3, 1, 1));
        let cat = b.concat("cat", &[&a, &c]);
        b.fc("fc", &cat, 10);
        let s = infer_shapes(&b.build().unwrap()).unwrap();
        assert_eq!(s.output_shape(3), TensorShape::new(9, 8, 8).unwrap());
        assert_eq!(s.output_shape(4), TensorShape::new(10, 1, 1).unwrap());
    }

    #[test]
    fn topo_order_breaks_ties_by_declaration() {
        let mut b = GraphBuilder::new(1, 1, 1);
        b.relu("b", "data", false);
        b.relu("c", "data", false);
        b.add("d", &["b", "c"]);
        let g = b.build().unwrap();
        assert_eq!(g.topo_names().unwrap(), ["data", "b", "c", "d"]);

        // Declared out of execution order.
        let text = doc(r#"{"name": "z", "kind": "relu", "inputs": ["y"]},
            {"name": "y", "kind": "relu", "inputs": ["data"]},
            {"name": "data", "kind": "input"}"#);
        let g = parse_model(&text).unwrap();
        assert_eq!(g.topo_names().unwrap(), ["data", "y", "z"]);
    }

    #[test]
    fn document_round_trip() {
        let g = parse_model(PIPELINE).unwrap();
        let text = to_document(&g);
        assert_eq!(parse_model(&text).unwrap(), g);
        assert!(text.contains("\"in_place\": true"));
    }
}
