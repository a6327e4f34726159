//! Farey map, Gauss map, continued fractions, Farey fractions and periodic orbits.

mod cfrac;
mod farey;
mod maps;

pub use cfrac::{cf_expand, cf_expand_exact, cf_value, cf_value_exact, periodic_cf_value, CfWord, Mobius, PeriodicOrbit};
pub use farey::{farey_level, preimages_of_zero, Rational, MAX_FAREY_LEVEL};
pub use maps::{
    farey_map, farey_map_exact, first_passage_time, gauss_map, gauss_map_exact, inverse_branch_farey,
    inverse_branch_farey_exact, inverse_branch_gauss, psi0_iterate,
};
