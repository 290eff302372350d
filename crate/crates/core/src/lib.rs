//! Sequential D-optimal experiment design for regression on manifold-supported
//! candidate pools.
//!
//! The library selects which candidate points to label so that a
//! Laplacian-regularized least-squares model (`laprls`) learns fastest. The
//! design criterion maximizes `log det` of a regularized information matrix;
//! the equivalence gap `max_z d(z) - (p - tr(M^-1 C))` certifies optimality of
//! a continuous design (`design`). Space-filling and classical selection rules
//! live in `baselines`, synthetic data in `datasets`, and the sequential
//! labeling protocol in `harness`.

pub mod baselines;
pub mod datasets;
pub mod design;
pub mod graph;
pub mod harness;
pub mod kernels;
pub mod laprls;
pub mod numerics;
pub mod pool;
