//! Graph reassembling of 3-regular plane graphs.
//!
//! The pipeline is: build a [`PlaneGraph`] from a straight-line drawing,
//! peel it into edge layers with [`decompose`], then run the collapse/merge
//! engine [`run_ks`] to obtain a [`ReassemblyTree`] whose α-measure is at
//! most twice the edge-outerplanarity.

pub mod generators;
pub mod io;
pub mod ks_engine;
pub mod layering;
pub mod oracle;
pub mod plane_graph;
pub mod reassembly;

pub use generators::{
    expand_to_three_regular, gen_constant_density, gen_hfk, inside_out_reassemble, load_corpus, CorpusEntry,
    GenError, HFamilyParams,
};
pub use ks_engine::{run_ks, run_ks_lifted, KsError, KsEvent, KsResult, KsTrace};
pub use layering::{
    cacti_check, decompose, edge_outerplanarity, vertex_outerplanarity_bounds, Cycle, DecomposeError, EdgeKind,
    EdgeLayer, Ict, LayerDecomposition, VertexClass,
};
pub use oracle::{density_threshold, enumerate_strongly_regular, max_cluster_bound, optimal_alpha, OracleError};
pub use plane_graph::{
    build_plane_graph, classify_walk_edges, Dart, EdgeClass, EdgeId, FaceWalk, GraphError, PlaneEmbedding,
    PlaneGraph, PlaneMultigraph, Point, VertexId, VertexKind,
};
pub use reassembly::{
    alpha_measure, carving_to_trees, normalize_no_zero_merges, tree_to_carving, validate_tree, AlphaReport,
    ReassemblyError, ReassemblyTree, RoutingTree, TreeBuilder, Validation,
};
