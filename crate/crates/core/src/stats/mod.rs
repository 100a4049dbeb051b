//! Homophily and monophily estimation on class-degree sequences.

mod model1;
mod null;
pub mod special;
mod williams;

pub use model1::{fit_model1, homophily_index, logistic, logit, Model1Fit};
pub use null::{observed_ratios, sample_null_preferences, sample_variance, Histogram, NullPreferenceSample};
pub use special::chi_square_sf;
pub use williams::{fit_williams, DispersionFit, FitRecord, WilliamsOptions};
