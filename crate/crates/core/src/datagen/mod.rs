//! Dataset construction: pocket detection, sequence clustering,
//! cluster-balanced pair sampling, docking campaigns, shard files and
//! synthetic toy complexes.

mod cluster;
mod codec;
mod dataset;
mod pockets;
mod toy;

pub use cluster::{cluster_named_sequences, cluster_sequences, sample_index, sampling_weights, ClusterAssignment};
pub use dataset::{
    generate_dataset, read_dataset_dir, read_shard, write_dataset, DatasetRecord, DatasetShard, GeneratedDataset,
    PairFailure, ShardMeta, ShardReader, SHARD_CAPACITY, SHARD_MAGIC,
};
pub use pockets::{buriedness_at, detect_pockets, scan_directions};
pub use toy::{
    gen_toy_complex, gen_toy_complex_in_family, gen_toy_world, FamilyTemplate, ToyComplex, ToyWorld, TOY_MAX_ATOMS,
    TOY_MAX_ROTATABLE, TOY_MIN_ATOMS,
};
