//! Exact linear algebra over Q and over the cyclotomic fields Q(w_k).

mod cyclotomic;
pub mod modular;
mod rational;

pub use cyclotomic::{
    cyclo_det, cyclo_inverse, cyclo_left_kernel_check, cyclo_nullity, cyclotomic_poly,
    int_coords_to_number, CycloField, CycloMatrix, CycloNumber,
};
pub use modular::{
    certified_rank, certified_rank_until, certified_rank_with, CertifiedRank, RankMethod, ZwMatrix,
};
pub use rational::{
    integer_rank, rank_mod_prime, rank_mod_prime_until, rational_rank, rational_rank_fraction_free,
    sparse_rank, sparse_rank_until, RationalMatrix,
};
