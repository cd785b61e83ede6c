//! Random forest classifier, grouped cross-validation and metrics.

mod cv;
mod dataset;
mod grid;
mod metrics;
mod model;
mod tree;

pub use cv::{cross_validate, dataset_folds, stratified_group_kfold, CvOutcome, Fold};
pub use dataset::Dataset;
pub use grid::{grid_search, GridPoint, GridSearchReport, ParamGrid};
pub use metrics::{classification_report, confusion_matrix, ClassMetrics, Report};
pub use model::{
    accuracy, argmax, derive_seed, leaf_distribution, mix64, train, ForestModel, ForestParams,
    MODEL_FORMAT_VERSION,
};
pub use tree::{normalize, Node, Tree};
