//! Projective 2-designs and equiangular tight frames in three arithmetic
//! settings.
//!
//! - [`field`]: exact arithmetic in `F_p`, `F_{p^k}` and the quadratic
//!   extension `F_{q^2}` with its Frobenius conjugation.
//! - [`fflinalg`]: exact vectors, matrices, Hermitian forms, tensor products,
//!   the symmetric projector and partial traces over a finite field.
//! - [`ffdesign`]: tight frames, ETFs and `(a, c1, c2)`-projective 2-designs
//!   over `F_{q^2}`, including the Singer/Gabor construction.
//! - [`complex`]: weighted projective 2-designs over `C^d`, the depolarizing
//!   channel, Choi/Kraus conversions and entanglement-breaking-rank bounds.
//! - [`quaternion`]: quaternionic 2-designs and the equi-isoclinic tight fusion
//!   frames they induce.

pub mod complex;
pub mod ffdesign;
pub mod fflinalg;
pub mod field;
pub mod quaternion;
