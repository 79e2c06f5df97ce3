//! T-product algebra for dense complex third-order tensors.
//!
//! A tensor of shape `m × n × p` is a stack of `p` frontal slices. The
//! T-product multiplies two such stacks as block-circulant matrices; a DFT
//! along the tubes turns it into `p` independent matrix products. Every
//! spectral algorithm here (Jordan form, matrix functions, Drazin inverse)
//! works one Fourier block at a time on that representation.
//!
//! The crate is `no_std` with `alloc`. Enabling the `parallel` feature pulls in
//! `std` and rayon and runs the per-block work concurrently; results are
//! identical either way since blocks never interact.
#![cfg_attr(not(feature = "parallel"), no_std)]
// `num_traits::Float` supplies f64 math without std. Whenever std is linked
// (tests, `parallel`, or feature unification in a larger build) the inherent
// methods shadow it and the import looks unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod algebra;
pub mod decomp;
pub mod dense;
mod error;
mod fft;
pub mod fixtures;
pub mod ginv;
pub mod oracle;
pub mod polyn;
pub mod spectral;
pub mod tensor;
pub mod tfunc;
mod tol;
pub mod transform;

pub use dense::DenseMatrix;
pub use error::{Result, TensorError};
pub use tensor::{
    bcirc, bcirc_inv, bcirc_inv_with_tol, conj_transpose, fold, fro_norm, identity_tensor, unfold, Tensor3,
};
pub use tol::Tolerances;

/// Complex double, the scalar type everywhere in this crate.
pub type C64 = num_complex::Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> alloc::vec::Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> alloc::vec::Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
