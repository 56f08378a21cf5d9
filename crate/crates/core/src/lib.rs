pub mod criteria;
pub mod error;
pub mod graph;
pub mod random;
pub mod scm;
pub mod separation;
pub mod twin;

pub use criteria::{
    AdjustmentQuery, CriterionName, CriterionVerdict, Failure, Mode, VerdictReport,
};
pub use error::{Error, Result};
pub use graph::{parse_graph, Admg, AdmgBuilder, EdgeKind, Mark, NodeId, NodeSet};
pub use scm::{Assignment, DiscreteScm, Dist};
pub use separation::{Path, Route, SepVerdict, Step};
pub use twin::{graphical_ignorability, twin_network, TwinGraph};
