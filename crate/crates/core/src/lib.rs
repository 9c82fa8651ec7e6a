//! Bisynchronous games, their correlations, and the completely positive maps
//! they induce.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Jacobi eigensolvers, nullspaces;
//! * [`games`]: graphs, game predicates, flips and lifts;
//! * [`densities`]: correlation tensors, their classes, local membership;
//! * [`vect`]: vector strategies;
//! * [`quantum_perm`]: finite-dimensional quantum permutations;
//! * [`cpmaps`]: the map of a density, its Choi matrix and fixed points;
//! * [`io`]: JSON wire formats shared with the command-line tool.

pub mod cpmaps;
pub mod densities;
pub mod error;
pub mod games;
pub mod io;
pub mod linalg;
pub mod quantum_perm;
pub mod report;
pub mod vect;

pub use cpmaps::{
    compose_maps, density_from_map, fixed_point_set, is_schur_closed, kraus_from_choi, mixed_permutation_map,
    phi_from_density, ChoiMap, KrausSet,
};
pub use densities::{
    compose, local_bisync_membership, local_sync_membership, mixture, Density, Membership, PermutationMixture,
    SeparatingFunctional,
};
pub use error::{Error, Result};
pub use games::{hom_game, iso_game, Game, Graph};
pub use linalg::{CMatrix, Complex64, Subspace, DEFAULT_TOL};
pub use quantum_perm::{fix_equivalence_check, ProjectiveSystem, QuantumPermutation};
pub use report::{Check, CheckList};
pub use vect::{density_from_vectors, vect_from_projective, verify_bisync_vect, VectorStrategy};
