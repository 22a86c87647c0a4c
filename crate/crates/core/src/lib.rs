//! Periorbital measurements from eye segmentation masks.
//!
//! Masks go in, a 36-entry feature vector comes out, and the rest of the
//! crate evaluates or classifies those vectors:
//!
//! - [`mask`]: bit-packed binary masks and face records.
//! - [`maskgeom`]: Dice, components, iris fit, canthi, lid polynomials.
//! - [`anthro`]: the per-face feature extractor.
//! - [`prep`]: orientation normalisation and midline cropping.
//! - [`stats`]: MAE, Bland-Altman and friends.
//! - [`classify`]: tree ensembles on feature vectors.
//! - [`synth`]: synthetic faces with analytic ground truth.

pub mod anthro;
pub mod classify;
pub mod error;
pub mod features;
pub mod mask;
pub mod maskgeom;
pub mod prep;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use features::{
    feature_index, feature_registry, Feature, GlobalFeature, MeasurementSet, Scale, SideFeature,
    Units, N_FEATURES,
};
pub use mask::{EyeRecord, EyeSide, FaceRecord, Landmarks, MaskClass, Point, RasterMask};
