//! Partition functions, periodic-orbit traces, Fredholm determinants and the zeta functions.

mod determinant;
mod orbits;
mod series;
mod table;
mod tuples;

pub use determinant::{
    det_of_matrix, fredholm_det, log_zeta2_s_series, matrix_traces, pole_locate, zeta2, zeta2_s_series, DetRoute,
    DetValue, PoleLocation, MAX_LMAX, POLE_THRESHOLD,
};
pub use orbits::{
    gauss_fixed_point, grand_xi, partition_z_f, partition_z_g, trace_kzq, trace_power, xi1_closed, xi_z_series,
    zeta2_at_one_z_series, zeta_f_series, PartitionMethod, XiRoute, MAX_FAREY_WORD,
};
pub use series::{PowerSeries, Var};
pub use table::{TraceEntry, TraceTable};
pub use tuples::{MAX_TUPLE_LEN, PRUNE_TOL};
