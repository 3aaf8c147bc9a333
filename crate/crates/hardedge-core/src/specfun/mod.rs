//! Wright's generalized Bessel function and the Fox-type functions `I⁽¹⁾, I⁽²⁾, I⁽³⁾`.

mod asymptotic;
mod contour;
mod fox;
mod series;
mod wright;

pub use asymptotic::{asymptotic_sector, asymptotic_threshold, fox_i_asymptotic};
pub use contour::fox_i_contour;
pub use fox::{fox_i, FoxI, FoxIParams, FoxKind};
pub use wright::{wright_bessel, WrightBessel, WrightParams};
