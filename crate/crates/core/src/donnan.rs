//! Donnan-equilibrium estimates of bulk depletion in ion channels and porous
//! electrodes, and dimensional conversions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact and recommended values (SI).
pub mod constants {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const AVOGADRO: f64 = 6.022_140_76e23;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
}

use constants::*;

/// Electrolyte state in SI units, with concentration in mol/L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConditions {
    pub concentration: f64,
    pub temperature: f64,
    pub relative_permittivity: f64,
    pub voltage: f64,
}

impl PhysicalConditions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("concentration", self.concentration),
            ("temperature", self.temperature),
            ("relative permittivity", self.relative_permittivity),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.voltage.is_finite() {
            return Err(Error::InvalidArgument("voltage must be finite".into()));
        }
        Ok(())
    }
}

/// Debye length `√(ε₀ ε_r k_B T / (2 c q²))` in meters.
pub fn debye_length(cond: &PhysicalConditions) -> Result<f64> {
    cond.validate()?;
    let number_density = cond.concentration * 1e3 * AVOGADRO;
    Ok(
        (VACUUM_PERMITTIVITY * cond.relative_permittivity * BOLTZMANN * cond.temperature
            / (2.0 * number_density * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE))
            .sqrt(),
    )
}

/// Voltage in thermal units `qV / (k_B T)`.
pub fn nondim_voltage(voltage: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    Ok(ELEMENTARY_CHARGE * voltage / (BOLTZMANN * temperature))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGeometry {
    /// `|Ω_channel| / |Ω_bath|`.
    pub volume_ratio_delta: f64,
    /// Counter-ion enrichment in the channel relative to the mean concentration.
    pub enrichment_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelAlpha {
    /// Solution of the self-consistency relation.
    pub exact: f64,
    /// First-order expansion `1 / (1 + (r − 1) δ / 2)`.
    pub linearized: f64,
}

/// Bulk concentration factor for a bath of two reservoirs joined by a channel
/// with `p_channel = r c̄`.
///
/// With the bath potential as reference and a uniform channel potential,
/// `|Ω|/α = 2|Ω_bath| + (r/α)|Ω_channel|` for `|Ω| = 2|Ω_bath| + |Ω_channel|`,
/// which gives `α = 1 − (r − 1) δ / 2` exactly.
pub fn channel_alpha(geom: &ChannelGeometry) -> Result<ChannelAlpha> {
    let (d, r) = (geom.volume_ratio_delta, geom.enrichment_r);
    if !(d >= 0.0 && d.is_finite()) || !(r > 0.0 && r.is_finite()) {
        return Err(Error::Geometry(format!(
            "invalid channel geometry: delta = {d}, r = {r}"
        )));
    }
    let exact = 1.0 - 0.5 * (r - 1.0) * d;
    if !(exact > 0.0) {
        return Err(Error::Geometry(format!(
            "channel too large: no bulk concentration in (0, 1] for delta = {d}, r = {r}"
        )));
    }
    Ok(ChannelAlpha {
        exact,
        linearized: 1.0 / (1.0 + 0.5 * (r - 1.0) * d),
    })
}

/// Required bath-to-channel volume ratio `1/δ = (r − 1) / (2 max_error)`.
pub fn channel_bath_ratio(r: f64, max_error: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Geometry(format!("enrichment must exceed 1, got {r}")));
    }
    if !(max_error > 0.0 && max_error < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "max_error must lie in (0, 1), got {max_error}"
        )));
    }
    Ok((r - 1.0) / (2.0 * max_error))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeGeometry {
    /// `|Ω_electrode| / |Ω|` for each of the two symmetric electrodes.
    pub volume_fraction_electrode: f64,
    /// Donnan potential in thermal units.
    pub donnan_potential: f64,
    pub porosity: f64,
}

/// `α = 1 / (|Ω_bulk|/|Ω| + 2 (|Ω_electrode|/|Ω|) cosh φ)` with
/// `|Ω_bulk| = |Ω| − 2|Ω_electrode|`.
pub fn electrode_alpha(geom: &ElectrodeGeometry) -> Result<f64> {
    let f = geom.volume_fraction_electrode;
    if !(0.0..0.5).contains(&f) {
        return Err(Error::Geometry(format!(
            "electrode fraction must lie in [0, 1/2), got {f}"
        )));
    }
    if !(geom.porosity > 0.0 && geom.porosity <= 1.0) || !geom.donnan_potential.is_finite() {
        return Err(Error::Geometry("invalid porosity or Donnan potential".into()));
    }
    Ok(1.0 / ((1.0 - 2.0 * f) + 2.0 * f * geom.donnan_potential.cosh()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeBulkRatio {
    /// `2 ((1 − δ) cosh φ − 1) / δ`, porosity-independent.
    pub cosh_form: f64,
    /// `porosity (2/δ) ((1 − δ) − e^{−φ})`.
    pub paper_numeric_form: f64,
}

/// Minimal `|Ω_bulk| / |Ω_electrode|` keeping the bulk depletion below `delta_err`.
pub fn electrode_bulk_ratio(phi_el: f64, delta_err: f64, porosity: f64) -> Result<ElectrodeBulkRatio> {
    if !(delta_err > 0.0 && delta_err < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta_err}"
        )));
    }
    if !(porosity > 0.0 && porosity <= 1.0) {
        return Err(Error::Geometry(format!("porosity must lie in (0, 1], got {porosity}")));
    }
    Ok(ElectrodeBulkRatio {
        cosh_form: 2.0 * ((1.0 - delta_err) * phi_el.cosh() - 1.0) / delta_err,
        paper_numeric_form: porosity * (2.0 / delta_err) * ((1.0 - delta_err) - (-phi_el.abs()).exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn water(c: f64, t: f64) -> PhysicalConditions {
        PhysicalConditions {
            concentration: c,
            temperature: t,
            relative_permittivity: 78.5,
            voltage: 0.25,
        }
    }

    #[test]
    fn debye_length_values() {
        let l = debye_length(&water(0.1, 298.0)).unwrap();
        // Independent evaluation with the same constants.
        assert!((l - 9.6174e-10).abs() < 1e-13, "{l}");
        let r = debye_length(&water(0.01, 298.0)).unwrap() / debye_length(&water(1.0, 298.0)).unwrap();
        assert!((r - 10.0).abs() < 1e-12);
        let r = debye_length(&water(0.1, 400.0)).unwrap() / debye_length(&water(0.1, 100.0)).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(debye_length(&water(0.0, 298.0)).is_err());
    }

    #[test]
    fn thermal_voltage() {
        assert_eq!(nondim_voltage(0.0, 298.0).unwrap(), 0.0);
        assert!((nondim_voltage(0.25, 298.0).unwrap() - 9.7353).abs() < 1e-3);
        assert!(nondim_voltage(1.0, 0.0).is_err());
    }

    #[test]
    fn channel_estimates() {
        let a = channel_alpha(&ChannelGeometry {
            volume_ratio_delta: 0.0,
            enrichment_r: 180.0,
        })
        .unwrap();
        assert_eq!((a.exact, a.linearized), (1.0, 1.0));
        let a = channel_alpha(&ChannelGeometry {
            volume_ratio_delta: 1.117e-4,
            enrichment_r: 180.0,
        })
        .unwrap();
        assert!((1.0 / a.linearized - 1.01).abs() < 1e-4);
        for k in 0..30 {
            let d = 1e-6 * 10f64.powf(3.0 * k as f64 / 29.0);
            let a = channel_alpha(&ChannelGeometry {
                volume_ratio_delta: d,
                enrichment_r: 180.0,
            })
            .unwrap();
            assert!((a.exact - a.linearized).abs() / (d * d) <= 89.5f64.powi(2) * 1.01);
        }
        assert!(channel_alpha(&ChannelGeometry {
            volume_ratio_delta: 0.1,
            enrichment_r: 180.0
        })
        .is_err());
        assert_eq!(channel_bath_ratio(180.0, 0.01).unwrap(), 8950.0);
        assert_eq!(channel_bath_ratio(2.0, 0.5).unwrap(), 1.0);
        assert_eq!(channel_bath_ratio(180.0, 0.02).unwrap(), 4475.0);
    }

    #[test]
    fn electrode_estimates() {
        let g = |f, p| ElectrodeGeometry {
            volume_fraction_electrode: f,
            donnan_potential: p,
            porosity: 0.3,
        };
        assert_eq!(electrode_alpha(&g(0.2, 0.0)).unwrap(), 1.0);
        assert_eq!(electrode_alpha(&g(0.0, 9.73)).unwrap(), 1.0);
        assert!(electrode_alpha(&g(0.2, 9.73)).unwrap() < 1e-3);
        let r = electrode_bulk_ratio(9.73, 0.01, 0.3).unwrap();
        assert!((r.paper_numeric_form - 59.4).abs() < 0.5);
        assert!(r.cosh_form > 1e5);
        assert!((electrode_bulk_ratio(0.0, 0.01, 0.3).unwrap().cosh_form + 2.0).abs() < 1e-12);
    }
}
