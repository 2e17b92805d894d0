//! Finite groups as multiplication tables, their mod-`n` central series,
//! and the degree-two cohomology used to describe the second layer.

mod cocycle;
mod embedding;
mod group;
mod h2;
mod kernel;
mod series;

pub use cocycle::{
    check_coboundary, cup_and_carry_cocycles, elementary_coords, elementary_index, pair, solve_coboundary,
    term_cocycle, verify_cup_bock_identities, Coboundary, Cocycle2, CocycleTerm, CupBockReport,
};
pub use embedding::{embedding_solvable, CentralExtension};
pub use group::{TableGroup, TableGroupJson, GROUP_LIMIT};
pub use h2::{pairing, special_elements, H2Class, SElement};
pub use kernel::{
    kernel_of_inflation, verify_layer_isomorphism, verify_layer_isomorphism_on, GeneratorReport, LayerIsoReport,
};
pub use series::{central_series, layer_maps, CentralSeriesData, Layer, LayerMapResult};
