//! Instance fixtures shared by the benchmarks.

use anchorsched::instances::generate;
use anchorsched::{Instance, InstanceClass};

/// `count` instances of class `label` with `n` jobs, seeds `0..count`.
pub fn instances(label: &str, n: usize, count: u64) -> Vec<Instance> {
    let class: InstanceClass = label.parse().expect("valid class label");
    (0..count)
        .map(|seed| generate(class, n, seed).expect("generator succeeds").0)
        .collect()
}

/// Turns every instance into a box instance with the same deviations.
pub fn as_box(insts: &[Instance]) -> Vec<Instance> {
    insts
        .iter()
        .map(|inst| {
            let dhat = inst.delta.max_deviation(inst.n());
            Instance::new(
                inst.graph.clone(),
                anchorsched::UncertaintySet::Box { dhat },
                inst.deadline,
                inst.weights.clone(),
            )
            .expect("same data")
        })
        .collect()
}
