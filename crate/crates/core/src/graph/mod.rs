//! Interaction ingestion, snapshot slicing, snapshot deltas and synthetic
//! dynamic graphs.

mod delta;
mod dynamic;
mod edges;
mod generate;
mod snapshot;

pub use delta::{diff_snapshots, DeltaGraph};
pub use dynamic::{slice_snapshots, Boundaries, DynamicGraph, SliceStats};
pub use edges::{load_temporal_edges, EdgeListFormat, IdMode, TemporalEdge, TemporalEdgeList};
pub use generate::{planted_partition_generate, PlantedPartition, PlantedPartitionParams};
pub use snapshot::GraphSnapshot;
