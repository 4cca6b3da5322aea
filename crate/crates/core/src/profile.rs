//! Whole-network aggregation, layer-wise intensity statistics, batch
//! scaling and concurrent-activation liveness.

use std::io;

use serde::{Deserialize, Serialize};

use crate::cost::{layer_cost, LayerCost};
use crate::error::{MeasureError, MetricError, ProfileError};
use crate::exec::Exec;
use crate::metrics::Reuse;
use crate::model::{LayerKind, ShapedGraph};

/// Cumulative counts for one forward pass of `batch` samples.
///
/// `activations` counts every produced tensor once: the network input plus
/// each layer output that does not alias its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkProfile {
    pub macs: u64,
    pub weights: u64,
    pub activations: u64,
    pub peak_concurrent: u64,
    pub batch: u64,
}

impl NetworkProfile {
    /// Profile from raw counts at batch 1.
    pub fn from_counts(macs: u64, weights: u64, activations: u64) -> Self {
        Self {
            macs,
            weights,
            activations,
            peak_concurrent: 0,
            batch: 1,
        }
    }

    /// `M_c / (W + A)`.
    pub fn ai_c(&self) -> f64 {
        self.macs as f64 / (self.weights + self.activations) as f64
    }

    pub fn weight_reuse(&self) -> f64 {
        self.macs as f64 / self.weights as f64
    }

    pub fn activation_reuse(&self) -> f64 {
        self.macs as f64 / self.activations as f64
    }

    pub fn a_over_w(&self) -> f64 {
        self.activations as f64 / self.weights as f64
    }

    /// Both reuse ratios, validated positive and finite.
    pub fn reuse(&self) -> Result<Reuse, MetricError> {
        Reuse::new(self.weight_reuse(), self.activation_reuse())
    }
}

/// Per-layer costs in execution order, paired with layer indices.
pub fn layer_costs(graph: &ShapedGraph, exec: Exec) -> Result<Vec<(usize, LayerCost)>, ProfileError> {
    let order = graph.order();
    let costs = exec.try_map(order, |&i| {
        let view = graph.view(i);
        layer_cost(view.spec, &view.inputs, &view.output).map(|c| (i, c))
    })?;
    Ok(costs)
}

/// Elements of every tensor the network produces, each counted once.
pub fn produced_activations(graph: &ShapedGraph) -> u64 {
    graph
        .graph()
        .layers()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.in_place)
        .map(|(i, _)| graph.output_shape(i).element_count())
        .sum()
}

pub fn aggregate(graph: &ShapedGraph) -> Result<NetworkProfile, ProfileError> {
    aggregate_with(graph, Exec::default())
}

/// Sums MACs and weights over all layers; activations follow the
/// single-count convention of [`produced_activations`].
pub fn aggregate_with(graph: &ShapedGraph, exec: Exec) -> Result<NetworkProfile, ProfileError> {
    if graph.graph().is_empty() {
        return Err(ProfileError::EmptyGraph);
    }
    let total: LayerCost = layer_costs(graph, exec)?.into_iter().map(|(_, c)| c).sum();
    let activations = produced_activations(graph);
    if total.weights + activations == 0 {
        return Err(ProfileError::NoData);
    }
    Ok(NetworkProfile {
        macs: total.macs,
        weights: total.weights,
        activations,
        peak_concurrent: peak_concurrent_activations(graph),
        batch: 1,
    })
}

/// Aggregates many graphs; output order matches input order.
pub fn aggregate_many(
    graphs: &[ShapedGraph],
    exec: Exec,
) -> Vec<Result<NetworkProfile, ProfileError>> {
    exec.map(graphs, |g| aggregate_with(g, Exec::Sequential))
}

/// Scales a batch-1 profile to `batch` samples: MACs, activations and the
/// live set grow with the batch, weights do not.
pub fn batch_scale(profile: &NetworkProfile, batch: u64) -> Result<NetworkProfile, ProfileError> {
    if batch == 0 {
        return Err(ProfileError::ZeroBatch);
    }
    Ok(NetworkProfile {
        macs: profile.macs * batch,
        weights: profile.weights,
        activations: profile.activations * batch,
        peak_concurrent: profile.peak_concurrent * batch,
        batch: profile.batch * batch,
    })
}

/// Maximum over execution steps of the elements held by live tensors plus
/// the tensor being produced.
///
/// A tensor is live from the step that produces it through the step of its
/// last consumer. In-place layers alias their input's buffer.
pub fn peak_concurrent_activations(graph: &ShapedGraph) -> u64 {
    let layers = graph.graph().layers();
    let n = layers.len();
    let mut step = vec![0usize; n];
    for (s, &i) in graph.order().iter().enumerate() {
        step[i] = s;
    }

    // Buffer owning each layer's output.
    let mut owner = vec![0usize; n];
    for &i in graph.order() {
        owner[i] = if layers[i].in_place {
            owner[graph.graph().producers(i)[0]]
        } else {
            i
        };
    }

    let mut release = vec![0usize; n];
    for &i in graph.order() {
        release[owner[i]] = release[owner[i]].max(step[i]);
        for &p in graph.graph().producers(i) {
            let t = owner[p];
            release[t] = release[t].max(step[i]);
        }
    }

    let mut freed_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        if owner[i] == i {
            freed_at[release[i]].push(i);
        }
    }

    let mut live = 0u64;
    let mut peak = 0u64;
    for (s, &i) in graph.order().iter().enumerate() {
        if owner[i] == i {
            live += graph.output_shape(i).element_count();
        }
        peak = peak.max(live);
        for &t in &freed_at[s] {
            live -= graph.output_shape(t).element_count();
        }
    }
    peak
}

/// Which tensors a single layer's activation count covers when computing
/// its intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerActivations {
    /// Only the tensor the layer produces. This is also what the
    /// cumulative single-count convention charges each layer.
    #[default]
    OutputOnly,
    /// Input plus output feature maps (the [`LayerCost`] count).
    InputOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerIntensity {
    pub name: String,
    pub kind: &'static str,
    pub cost: LayerCost,
    pub output_elements: u64,
    pub ai: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerwiseStats {
    pub layers: Vec<LayerIntensity>,
    pub median: f64,
    /// Population variance.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

/// Intensity of every Conv/FC layer plus median and population variance.
pub fn layerwise_ai_stats(
    graph: &ShapedGraph,
    convention: LayerActivations,
) -> Result<LayerwiseStats, ProfileError> {
    let mut layers = Vec::new();
    for (i, cost) in layer_costs(graph, Exec::Sequential)? {
        let spec = &graph.graph().layers()[i];
        if !spec.kind.is_mac_bearing() || cost.macs == 0 {
            continue;
        }
        let output_elements = graph.output_shape(i).element_count();
        let activations = match convention {
            LayerActivations::OutputOnly => output_elements,
            LayerActivations::InputOutput => cost.activations,
        };
        layers.push(LayerIntensity {
            name: spec.name.clone(),
            kind: spec.kind.tag(),
            cost,
            output_elements,
            ai: cost.macs as f64 / (cost.weights + activations) as f64,
        });
    }
    if layers.is_empty() {
        return Err(ProfileError::NoMacLayers);
    }
    let values: Vec<f64> = layers.iter().map(|l| l.ai).collect();
    Ok(LayerwiseStats {
        median: median(&values),
        variance: population_variance(&values),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        layers,
    })
}

/// Median; the mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

pub fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Count of Conv/FC layers, a quick size indicator for reports.
pub fn mac_layer_count(graph: &ShapedGraph) -> usize {
    graph
        .graph()
        .layers()
        .iter()
        .filter(|l| matches!(l.kind, LayerKind::Conv(_) | LayerKind::Fc { .. }))
        .count()
}

// ---------------------------------------------------------------------------
// Export records
// ---------------------------------------------------------------------------

/// Flat profile export row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub model: String,
    pub macs: f64,
    pub weights: f64,
    pub activations: f64,
    pub ai_c: f64,
    pub weight_reuse: f64,
    pub activation_reuse: f64,
    pub a_over_w: f64,
    pub peak_concurrent: f64,
}

impl ProfileRecord {
    pub fn new(model: impl Into<String>, p: &NetworkProfile) -> Self {
        Self {
            model: model.into(),
            macs: p.macs as f64,
            weights: p.weights as f64,
            activations: p.activations as f64,
            ai_c: p.ai_c(),
            weight_reuse: p.weight_reuse(),
            activation_reuse: p.activation_reuse(),
            a_over_w: p.a_over_w(),
            peak_concurrent: p.peak_concurrent as f64,
        }
    }

    /// Rebuilds the profile from the count columns; derived columns are
    /// recomputed rather than trusted.
    pub fn profile(&self) -> NetworkProfile {
        NetworkProfile {
            macs: self.macs.round() as u64,
            weights: self.weights.round() as u64,
            activations: self.activations.round() as u64,
            peak_concurrent: self.peak_concurrent.round() as u64,
            batch: 1,
        }
    }
}

pub const PROFILE_HEADER: [&str; 9] = [
    "model",
    "macs",
    "weights",
    "activations",
    "ai_c",
    "weight_reuse",
    "activation_reuse",
    "a_over_w",
    "peak_concurrent",
];

/// Reads profile rows (header [`PROFILE_HEADER`]).
pub fn read_profiles<R: io::Read>(reader: R) -> Result<Vec<ProfileRecord>, MeasureError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| MeasureError::Csv(e.to_string()))?
        .clone();
    for column in PROFILE_HEADER {
        if !headers.iter().any(|h| h == column) {
            return Err(MeasureError::MissingColumn(column.to_string()));
        }
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.deserialize::<ProfileRecord>().enumerate() {
        let rec = rec.map_err(|e| MeasureError::Csv(e.to_string()))?;
        for (field, value) in [("macs", rec.macs), ("weights", rec.weights), ("activations", rec.activations)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(MeasureError::NonPositive { row: row + 1, field, value });
            }
        }
        out.push(rec);
    }
    Ok(out)
}

/// Writes profile rows at full precision.
pub fn write_profiles<W: io::Write>(writer: W, records: &[ProfileRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{infer_shapes, ConvParams, GraphBuilder, LayerSpec, ModelGraph, TensorShape};

    fn shaped(b: GraphBuilder) -> ShapedGraph {
        infer_shapes(&b.build().unwrap()).unwrap()
    }

    #[test]
    fn two_layer_network() {
        // Kernel 2, stride 2, pad 1 keeps a 2x2 fmap at 2x2.
        let mut b = GraphBuilder::new(2, 2, 2);
        let c = b.conv("conv", "data", ConvParams::square(3, 2, 2, 1));
        b.relu("relu", &c, true);
        let g = shaped(b);
        assert_eq!(g.output_shape(1), TensorShape::new(3, 2, 2).unwrap());
        let p = aggregate(&g).unwrap();
        assert_eq!((p.macs, p.weights, p.activations), (96, 24, 20));
        assert!((p.ai_c() - 96.0 / 44.0).abs() < 1e-12);

        // Tensor-level enumeration: input 2*2*2 plus conv output 3*2*2.
        let tensors: u64 = [8u64, 12].iter().sum();
        assert_eq!(p.activations, tensors);
    }

    #[test]
    fn zero_work_network() {
        let mut b = GraphBuilder::new(4, 3, 3);
        b.relu("r", "data", true);
        let p = aggregate(&shaped(b)).unwrap();
        assert_eq!(p.macs, 0);
        assert!(p.weights + p.activations > 0);
        assert_eq!(p.ai_c(), 0.0);
    }

    #[test]
    fn layerwise_needs_mac_layers() {
        let mut b = GraphBuilder::new(4, 3, 3);
        b.relu("r", "data", true);
        assert_eq!(
            layerwise_ai_stats(&shaped(b), LayerActivations::OutputOnly),
            Err(ProfileError::NoMacLayers)
        );
    }

    #[test]
    fn single_layer_stats() {
        let mut b = GraphBuilder::new(3, 8, 8);
        b.conv("c", "data", ConvParams::square(8, 3, 1, 1));
        let s = layerwise_ai_stats(&shaped(b), LayerActivations::InputOutput).unwrap();
        assert_eq!(s.layers.len(), 1);
        assert_eq!(s.median, s.layers[0].ai);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn median_and_variance() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(population_variance(&[1.0, 3.0]), 1.0);
    }

    #[test]
    fn batch_scaling() {
        let p = NetworkProfile::from_counts(100, 10, 5);
        let q = batch_scale(&p, 2).unwrap();
        assert_eq!((p.weight_reuse(), q.weight_reuse()), (10.0, 20.0));
        assert_eq!((p.activation_reuse(), q.activation_reuse()), (20.0, 20.0));
        assert_eq!(batch_scale(&p, 1).unwrap(), p);
        assert_eq!(batch_scale(&p, 0), Err(ProfileError::ZeroBatch));

        let fc = crate::cost::fc_cost(4096, 1000).unwrap();
        let fc = NetworkProfile::from_counts(fc.macs, fc.weights, fc.activations);
        let big = batch_scale(&fc, 64).unwrap();
        assert!((big.weight_reuse() - 64.0).abs() < 1e-9);
    }

    /// Builds a graph with explicit per-layer output sizes using 1x1 convs
    /// over a 1x1 fmap, so element counts equal channel counts.
    fn sized(layers: &[(&str, &[&str], u64)], input: u64) -> ShapedGraph {
        let mut specs = vec![LayerSpec::new("data", LayerKind::Input, &[])];
        for (name, inputs, size) in layers {
            let kind = if inputs.len() > 1 {
                LayerKind::Add
            } else {
                LayerKind::Conv(ConvParams::square(*size, 1, 1, 0))
            };
            specs.push(LayerSpec::new(*name, kind, inputs));
        }
        let g = ModelGraph::new(TensorShape::new(input, 1, 1).unwrap(), specs).unwrap();
        infer_shapes(&g).unwrap()
    }

    #[test]
    fn chain_peak() {
        let g = sized(&[("c1", &["data"], 20), ("c2", &["c1"], 5)], 10);
        assert_eq!(peak_concurrent_activations(&g), 30);
    }

    #[test]
    fn residual_peak() {
        let g = sized(
            &[
                ("c1", &["data"], 10),
                ("c2", &["c1"], 10),
                ("sum", &["data", "c2"], 10),
            ],
            10,
        );
        assert_eq!(peak_concurrent_activations(&g), 30);
    }

    #[test]
    fn in_place_layers_alias_their_input() {
        let mut b = GraphBuilder::new(10, 1, 1);
        let r = b.relu("r", "data", true);
        b.conv("c", &r, ConvParams::square(5, 1, 1, 0));
        let g = shaped(b);
        assert_eq!(peak_concurrent_activations(&g), 15);

        let mut b = GraphBuilder::new(10, 1, 1);
        let r = b.relu("r", "data", false);
        b.conv("c", &r, ConvParams::square(5, 1, 1, 0));
        assert_eq!(peak_concurrent_activations(&shaped(b)), 20);
    }

    #[test]
    fn profile_csv_round_trip() {
        let p = NetworkProfile::from_counts(724_406_816, 60_965_224, 2_003_856);
        let rec = ProfileRecord::new("AlexNet", &p);
        let mut buf = Vec::new();
        write_profiles(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&PROFILE_HEADER.join(",")));
        let back = read_profiles(text.as_bytes()).unwrap();
        assert_eq!(back, vec![rec]);
        assert_eq!(back[0].profile(), p);
    }
}
