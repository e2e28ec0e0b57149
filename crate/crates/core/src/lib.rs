//! Exact computation of the monodromy of the Radon transform of a local
//! system on the complement of a plane curve, from its fundamental data: a
//! monodromy tuple of matrices with product one and a list of braid words.
//!
//! The pipeline lives in [`radon`]; [`cocycle`] holds the spaces `H_g`,
//! `E_g` and the braid-induced matrices, [`group`] the finite matrix group
//! analysis used on the outputs.

pub mod braid;
pub mod cocycle;
pub mod field;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod linalg;
pub mod radon;
