//! Optimal lossless variable-length quantum codes, with and without an
//! exponential penalty on long codewords.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex Hermitian matrices, density operators and a
//!   Jacobi eigensolver.
//! - [`entropy`]: von Neumann and Rényi entropies, relative entropy, Rényi
//!   divergence and the escort operator.
//! - [`codes`]: classical k-ary prefix codes (Huffman, exponential Huffman,
//!   Shannon) and an exhaustive optimal-length oracle.
//! - [`qcode`]: codewords in the Fock space of k-ary strings, the isometric
//!   encoder U = Σ_i |c(i)⟩⟨e_i| and its block extension, and the length
//!   measures built on the length observable.
//! - [`verify`]: numerical checks of the source-coding bounds and exact
//!   length decompositions on random density operators.
//! - [`cli`]: the `renyi-coding` command line front end.

pub mod cli;
pub mod codes;
pub mod entropy;
pub mod linalg;
pub mod penalty;
pub mod qcode;
pub mod verify;

pub use num_complex::Complex64;
pub use penalty::Penalty;
