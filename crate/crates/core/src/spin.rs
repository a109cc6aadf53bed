//! Collective spins in the symmetric (Dicke) subspace.
//!
//! Each mode `k` holds `N_k` spin-½ particles described by a collective spin of
//! length `N_k/2` in a basis ordered `m = +j, …, −j`. Multimode states live on
//! the tensor product of those subspaces with mode 0 as the most significant
//! index, and mode-local operators are applied without building joint
//! matrices, which keeps `N = 100` split into two modes (dimension 2601)
//! cheap.

mod moments;
mod ops;
mod scenarios;
mod search;
mod states;
mod twin_fock;

pub use moments::{
    align_mean_spin, local_xi_min, shot_noise_matrix_spin, shot_noise_perp, shot_noise_for,
    spin_moments, spin_squeezing_matrix, xi_min_from_moments, SpinMoments,
};
pub use ops::{
    apply_mode_op, collective_spin_ops, embed_mode_op, joint_mode_ops, LocalDirection, SpinNetwork,
    SpinOps,
};
pub use scenarios::{
    fig2_point, fig2_scan, nonlocal_encoding_for_moments, nonlocal_encoding_scan,
    nonlocal_encoding_scenario, optimize_sum_directions, Fig2Row, NonlocalEncoding,
    NonlocalEncodingRow,
};
pub use search::golden_section_min;
pub use states::{css_up, oat_local, oat_nonlocal, OatPropagator};
pub use twin_fock::{twin_fock_moment, twin_fock_observables, twin_fock_state, TwinFockReport};

/// Mean spins below `Z_FLOOR_REL · N_k` are treated as vanishing.
pub const Z_FLOOR_REL: f64 = 1e-8;
