//! Peak fitting, triplet extraction and parameter sweeps.

mod lorentz;
mod sweep;
mod triplet;

pub use lorentz::{
    direct_measurement, fit_lorentzian, fit_lorentzian_samples, lorentzian, DirectMeasurement, FitQuality,
    LorentzianFit, MAXIMA_THRESHOLD,
};
pub use sweep::{sweep_n, sweep_w, SweepAxis, SweepResult, SweepRow, SWEEP_N_MAX};
pub use triplet::{
    default_gamma_freq, default_peak_center, extract_triplet, extract_triplet_at, highest_odd_branch, peak_window,
    CqedTriplet, TripletOptions, TripletRun, GAMMA_FLOOR,
};
