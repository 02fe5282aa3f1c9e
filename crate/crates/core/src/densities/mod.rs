pub mod entropy;
pub mod escort;
pub mod families;
pub mod location_scale;
pub mod oracle_lambda;
pub mod partition;
pub mod score;

pub use entropy::{tsallis_negentropy, tsallis_negentropy_discrete};
pub use escort::{escort, escort_discrete, Escort};
pub use families::{paraboloid_lambda, DensityParams, EllipseSupport, Family, SparseDensity, Support};
pub use location_scale::LocationScaleG;
pub use oracle_lambda::{lambda_numeric_oracle, lambda_numeric_oracle_2d, NumericDensity1D, NumericDensity2D};
pub use partition::{a_alpha, grad_a_alpha};
pub use score::{CanonicalScore1D, CanonicalScore2D, MIN_EIGENVALUE, MIN_VARIANCE};
