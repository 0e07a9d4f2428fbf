//! Constructive machinery for the Ramsey property of ordered posets.
//!
//! Ordered posets are handled as complete RN graphs: two disjoint relations
//! `R` and `N` pointing forward in a linear order. The crate provides
//! embedding enumeration, an exact partition-arrow verifier, the partite product,
//! the partite construction that builds a tower of ℓ-RN Ramsey
//! witnesses, and the transitive-closure step that turns the tower into a
//! poset witness.

pub mod analysis;
pub mod arrow;
pub mod construction;
pub mod document;
pub mod embeddings;
pub mod partite;
pub mod random;
pub mod structures;

pub use analysis::{
    ell_rn_max, find_bad_quasicycle, is_ell_rn, is_good, longest_r_path_vertices, transitive_closure, QuasicyclePath,
};
pub use arrow::{
    check_arrow, find_monochromatic, oracle_ramsey, ArrowLimits, ArrowVerdict, BaseOracle, Certification, Coloring,
    OracleLimits, OracleMode,
};
pub use construction::{
    amalgamate, build_picture_zero, build_tower, extract_monochromatic_b, finish, induced_subsystem,
    run_partite_construction, ConstructionError, ConstructionLimits, Finished, Picture, StepReport, Tower,
    TowerOptions, TowerStage,
};
pub use embeddings::{enumerate_copies, is_embedding, Embedding};
pub use partite::{
    check_partite_arrow, partite_embeddings, product_construction, APartiteRnGraph, NEdgeRule, PartiteError,
    PartiteProduct,
};
pub use structures::{
    Homomorphism, LinearOrder, OrderedPoset, OrderedStructure, Relation, RnGraph, StructureError, StructureKind,
    VertexId,
};
