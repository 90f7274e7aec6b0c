//! Generators of Feller semigroups and their symbols.

pub mod courrege;
pub mod hunt;
pub mod levy;
pub mod pseudo_poisson;
pub mod sde;
pub mod subordination;

pub use hunt::{hunt_apply, hunt_symbol, HuntCharacteristics, HuntGenerator};
pub use levy::{DiscreteLevy, JumpNode, LevyMeasure, LevyQuadrature};
pub use pseudo_poisson::{
    pseudo_poisson_apply, pseudo_poisson_symbol, HaarJump, PseudoPoissonSpec, RightTranslate, StateDependentShift,
    Stay, TransitionKernel,
};
pub use sde::{jump_diffusion_symbol, marcus_jump_flow, sde_generator_apply, sde_symbol, JumpDiffusion, SDESpec};
pub use subordination::{subordinated_symbol, BernsteinFunction, SubordinatorLevy};
pub use courrege::{
    courrege_hunt_apply, courrege_hunt_symbol, CourregeHuntCharacteristics, CourregeHuntGenerator, JumpIntensity,
};
