pub mod attend;
pub mod basis;
pub mod moments;
pub mod softmax;
pub mod sparsemax;

pub use attend::{attend, forward, jacobian, AttentionResult};
pub use basis::RbfBasis;
pub use moments::{moment_match_from_discrete, moments_from_theta, theta_from_moments, CanonicalScore, Moments};
pub use softmax::{forward_softmax, jacobian_softmax};
pub use sparsemax::{
    forward_sparsemax_1d, forward_sparsemax_2d, jacobian_sparsemax_1d, jacobian_sparsemax_2d,
    ANGULAR_REFINEMENT_TOLERANCE, DEFAULT_ANGULAR_NODES, MIN_ANGULAR_NODES,
};
