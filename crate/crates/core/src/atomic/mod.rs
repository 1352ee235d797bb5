//! Single-active-electron atomic structure.

pub mod angular;
pub mod channels;
pub mod coulomb;
pub mod fano;
pub mod radial;
pub mod xsec;

pub use angular::{
    cos_theta_element, reduced_ck, reduced_ck_half, spherical_harmonic, wigner_3j, wigner_3j_half, wigner_eckart_z,
    HalfInt,
};
pub use channels::{ChannelAmplitude, ChannelTable, PartialWave};
pub use coulomb::{coulomb_fg_asymptotic, coulomb_phase};
pub use fano::{fano_dress, FanoParams};
pub use radial::{
    radial_dipole, solve_bound, solve_bound_numeric, solve_continuum, BoundOrbital, CentralPotential,
    ContinuumWave, RadialGrid,
};
pub use xsec::{allowed_final_l, cross_section, cross_section_from_radial, plane_wave_me};
