pub mod aupl;
pub mod crb;
pub mod error;
pub mod lp;
pub mod noise;
pub mod quadrature;
pub mod quantizer;
pub mod search;
pub mod sim;
pub mod special;

pub use crb::CrbProfile;
pub use error::{Error, Result};
pub use noise::{NoiseDensity, NoiseFamily};
pub use quantizer::{PiecewiseLinear, Quantizer};
