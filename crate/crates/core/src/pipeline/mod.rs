//! The filling pipeline: bound constants, the bubble tree, cycle
//! decomposition, pushing to the geodesic graph, and the two fill branches.

pub mod bounds;

pub use bounds::{bound_calculator, bound_holds, log2_rhs, BoundParams, Bounds};
pub mod tree;

pub use tree::{neck_thickness_and_diameter, BubbleTree, NeckGeometry, Region, RegionKind};
pub mod context;

pub use context::{FillContext, Instance, PipelineConfig};
pub mod decompose;

pub use decompose::{decompose_cycle, Piece};
pub mod push;

pub use push::{closed_walks, push_to_graph, PushResult};
pub mod neck;
pub mod fill;

pub use fill::{
    classify_fill_branch, fill_in_subtree, fill_via_neck, full_fill, Check, FillBranch, FillingReport,
    FillingReportJson, TraceEntry,
};
