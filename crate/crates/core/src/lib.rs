//! Laban Movement Analysis descriptors for 3D joint sequences, with a
//! random forest classifier, exact Tree SHAP attributions, a floor-plane
//! estimator and a synthetic motion generator.

pub mod error;
pub mod floor;
pub mod forest;
pub mod geom;
pub mod hull;
pub mod kinematics;
pub mod lma;
pub mod motion;
pub mod reference;
pub mod shap;
pub mod synth;

pub use error::{Error, Result};
pub use floor::{fit_floor, FloorPlane, PointCloud};
pub use forest::{Dataset, ForestModel, ForestParams};
pub use hull::{convex_hull, hull_volume, ConvexHull};
pub use kinematics::{derivative, windows, DerivativeTrack, WindowConfig};
pub use lma::{assemble_corpus, assemble_features, LmaConfig, WindowFeatures, FEATURE_COUNT};
pub use motion::{JointSequence, Role, SkeletonSpec, Vec3};
pub use shap::{brute_shap, tree_shap, ShapExplanation};
pub use synth::{generate, generate_corpus, StyleSpec};
