//! Role assignment from a feature matrix: low-rank factorizations, model
//! cost, rank search, and hard or soft memberships.

mod assign;
mod cost;
mod kmeans;
mod model;
mod nmf;
mod select;
mod svd;

pub use assign::{hard_assignment, soft_memberships, HardAssignment, SoftAssignment};
pub use cost::{model_cost, Criterion, LOG_FLOOR};
pub use kmeans::{kmeans_assign, within_cluster_sse};
pub use model::RoleModel;
pub use nmf::{
    frobenius_objective, nmf_factorize, nmf_from, sum_squared_error, Factorization, NmfConfig,
};
pub use select::{
    column_scales, fit_rank, fit_roles, rank_search, select_rank, RankSearch, SelectConfig,
};
pub use svd::{svd_factorize, TruncatedSvd};
