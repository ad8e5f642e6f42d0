//! Spherical harmonic analysis on `SL(2,ℝ)`: spherical functions,
//! spherical transforms, spherical convolutions, wave packets and
//! Schwartz seminorms, evaluated by quadrature on the group.

pub mod convolution;
pub mod error;
pub mod group;
pub mod profile;
pub mod quadrature;
pub mod reference;
pub mod schwartz;
pub mod spherical;
pub mod transform;
pub mod verify;
pub mod wavepacket;

pub use convolution::{SphericalConvolution, Strategy};
pub use error::{Checked, Error, Result, Warning};
pub use group::{GroupElement, IwasawaCoords, PolarCoords, TangentDirection};
pub use profile::RadialProfile;
pub use quadrature::{Integral, QuadratureSpec};
pub use schwartz::{InequalityVerdict, SeminormIndex};
pub use spherical::{CFunctionValue, PhiTable, SpectralParam};
pub use transform::{SpectralSamples, TubeDomain};
pub use wavepacket::{PlancherelCalibration, WavePacketSymbol};
