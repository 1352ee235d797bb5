//! Hartree atomic units (ħ = e = mₑ = a₀ = 1) are used internally.
//! These constants convert at the I/O boundary (CODATA 2018).

/// One hartree in electron-volts.
pub const HARTREE_EV: f64 = 27.211386245988;

/// One atomic unit of time in attoseconds.
pub const AU_TIME_AS: f64 = 24.188843265857;

/// Fine-structure constant.
pub const ALPHA: f64 = 7.2973525693e-3;

/// a₀² expressed in megabarn.
pub const BOHR2_MB: f64 = 28.0028;

pub fn ev_to_au(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn au_to_ev(au: f64) -> f64 {
    au * HARTREE_EV
}

pub fn as_to_au(attoseconds: f64) -> f64 {
    attoseconds / AU_TIME_AS
}

pub fn au_to_as(au: f64) -> f64 {
    au * AU_TIME_AS
}

pub fn fs_to_au(femtoseconds: f64) -> f64 {
    as_to_au(femtoseconds * 1e3)
}

pub fn au_to_fs(au: f64) -> f64 {
    au_to_as(au) * 1e-3
}

/// Group-delay dispersion: as² → atomic units of time².
pub fn as2_to_au(as2: f64) -> f64 {
    as2 / (AU_TIME_AS * AU_TIME_AS)
}

pub fn au_to_as2(au: f64) -> f64 {
    au * AU_TIME_AS * AU_TIME_AS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((au_to_ev(ev_to_au(100.0)) - 100.0).abs() < 1e-12);
        assert!((au_to_fs(fs_to_au(2.5)) - 2.5).abs() < 1e-12);
        assert!((au_to_as2(as2_to_au(5000.0)) - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn hartree_over_au_time_is_hbar() {
        // ħ = 658.211956... meV·fs
        let hbar_ev_fs = HARTREE_EV * AU_TIME_AS * 1e-3;
        assert!((hbar_ev_fs - 0.658_211_956_95).abs() < 1e-10);
    }
}
