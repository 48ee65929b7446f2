//! Verification workbench for nearest-neighbour correlation functions of the
//! periodic XYZ spin chain on its supersymmetric line.
//!
//! The exact side builds tau-function polynomials by a Toda-type recursion and
//! assembles the correlation function `f_n` from them; the numerical side
//! checks the result against exact diagonalization, a Painleve VI Backlund
//! chain, theta-function identities and a Q-eigenvalue solver.

pub mod corrfn;
pub mod edoracle;
pub mod exact;
pub mod pvi;
pub mod qsolver;
pub mod taurec;
pub mod thetanum;
