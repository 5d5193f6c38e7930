//! Upper bounds on the Lipschitz constants of the operation value functions.

mod cache;
mod extreme;
mod normal;

pub use cache::{cache_dir, case_key, load_or_compute};
pub use extreme::{
    extreme_bound_demand, extreme_bound_wind, extreme_bounds, ComponentBound, ExtremeBounds, ExtremeOptions,
    KktSystem, Target,
};
pub use normal::{normal_bounds, NormalBounds};

#[cfg(test)]
mod tests;
