//! Work and heat statistics built on the Kirkwood-Dirac machinery.
//!
//! Sign conventions: work `W = E_f - E_i` is done on the system; heat
//! `Q = E_ic - E_fc` is the energy lost by the cold body, so `<Q> > 0` is a
//! cold-to-hot backflow.

mod driven;
mod heat;
mod work;

pub use driven::{driven_qubit_analytic, driven_qubit_preset, DrivenQubit};
pub use heat::{
    average_heat_functional, exchange_fluctuation, heat_table, partial_swap, two_qubit_heat_matrix,
    two_qubit_heat_preset, two_qubit_heat_tpm_closed_form, two_qubit_heat_closed_form,
    ExchangeFluctuation, HeatExchangeSpec, HeatTable,
};
pub use work::{
    average_work, classical_bound, extractable_work, free_energy_difference, jarzynski_kdq,
    jarzynski_tpm, unperturbed_work, work_distribution, work_table, work_variance, ExtractionBoundReport,
    JarzynskiKdq, JarzynskiTpm, WorkProtocol, WorkVariance,
};
