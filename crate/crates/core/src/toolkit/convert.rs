//! Moving instances between scalar types.

use crate::error::Result;
use crate::model::{Facility, RaflInstance, RandInstance, WeightedGraph};
use crate::scalar::Scalar;

fn graph<S: Scalar, T: Scalar>(g: &WeightedGraph<S>, f: &impl Fn(&S) -> T) -> Result<WeightedGraph<T>> {
    WeightedGraph::new(g.node_count(), g.edges().iter().map(|e| (e.u, e.v, f(&e.cost))))
}

pub fn convert_rand<S: Scalar, T: Scalar>(inst: &RandInstance<S>, f: impl Fn(&S) -> T) -> Result<RandInstance<T>> {
    RandInstance::new(graph(inst.graph(), &f)?, inst.source(), inst.universe().clone(), inst.terminals().to_vec())
}

pub fn convert_rafl<S: Scalar, T: Scalar>(inst: &RaflInstance<S>, f: impl Fn(&S) -> T) -> Result<RaflInstance<T>> {
    let facilities = inst.facilities().iter().map(|fa| Facility { id: fa.id, node: fa.node, lambda: f(&fa.lambda) }).collect();
    RaflInstance::new(graph(inst.graph(), &f)?, inst.universe().clone(), inst.terminals().to_vec(), facilities)
}

/// Nearest `f64` copy of an instance.
pub fn to_f64_rand<S: Scalar>(inst: &RandInstance<S>) -> RandInstance<f64> {
    convert_rand(inst, S::approx_f64).expect("conversion keeps a valid instance valid")
}

pub fn to_f64_rafl<S: Scalar>(inst: &RaflInstance<S>) -> RaflInstance<f64> {
    convert_rafl(inst, S::approx_f64).expect("conversion keeps a valid instance valid")
}
