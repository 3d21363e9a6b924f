//! Mixed Green-logarithmic equilibrium problems on `E = [-1, 1]`.
//!
//! For a compact `K` disjoint from `E` and `θ ≥ 0`, the equilibrium measure
//! `λ = λ(θ)` minimizes `J_θ(μ) = ∫∫ (θ log(1/|x−t|) + g_K(x,t)) dμ dμ` over
//! unit measures on `E`, and satisfies `θ V^λ + G^λ_K = w` on `E`.

mod balayage;
mod clausen;
mod compact;
mod measure;
mod solver;
mod sproperty;

pub use balayage::{balayage, balayage_with_panels, DEFAULT_BALAYAGE_PANELS};
pub use clausen::{cl2, cl3};
pub use compact::{distance_to_e, inverse_joukowski, joukowski, CompactDescriptor, E_MARGIN};
pub use measure::{clenshaw_f64, panel_log_average, potentials, Atom, DiscreteMeasure, Panel, MASS_TOLERANCE};
pub use solver::{
    active_set_minimize, solve_equilibrium, solve_panels, solve_spectral, EquilibriumResult, PanelSystem, SolverMethod,
    MIN_PANELS,
};
pub use sproperty::{s_property_profile, s_property_residual, SSample, DEFAULT_S_STEP, S_EPSILON};

/// Green's function of the complement of `K` with pole at `t`
/// (zero on `K`; error at `z = t`).
pub fn green_function(
    k: &CompactDescriptor,
    z: num_complex::Complex64,
    t: num_complex::Complex64,
) -> crate::Result<f64> {
    k.green(z, t)
}
