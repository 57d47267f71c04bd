use crate::error::EnergyError;
use crate::spec::UamSpec;

/// Hover/climb power split into its two additive components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoverPower {
    /// Blade-profile power P₀, W.
    pub blade_profile_w: f64,
    /// Induced power Pᵢ, W.
    pub induced_w: f64,
}

impl HoverPower {
    pub fn total_w(&self) -> f64 {
        self.blade_profile_w + self.induced_w
    }
}

/// Forward-flight power split into its three additive components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CruisePower {
    /// Induced power, W.
    pub induced_w: f64,
    /// Blade-profile power, W.
    pub blade_profile_w: f64,
    /// Parasite (fuselage drag) power, W.
    pub parasite_w: f64,
}

impl CruisePower {
    pub fn total_w(&self) -> f64 {
        self.induced_w + self.blade_profile_w + self.parasite_w
    }
}

/// Hover/climb/descent power at a given payload weight.
///
/// `P_h = (δ/8)·ρ·s·A·Ω³·R³ + (1+k)·W_total^{3/2}/√(2ρA)` with
/// `W_total = W + payload`.
pub fn hover_power(spec: &UamSpec, payload_n: f64) -> Result<HoverPower, EnergyError> {
    if !payload_n.is_finite() || payload_n < 0.0 {
        return Err(EnergyError::invalid(format!(
            "payload_n must be finite and non-negative, got {payload_n}"
        )));
    }
    hover_power_raw(
        spec.profile_drag_coefficient,
        spec.air_density_kg_m3,
        spec.rotor_solidity,
        spec.disc_area_m2,
        spec.blade_angular_velocity_rad_s,
        spec.rotor_radius_m,
        spec.induced_power_factor,
        spec.weight_n + payload_n,
    )
}

/// Hover power from primitive quantities (no spec validation applied).
#[allow(clippy::too_many_arguments)]
pub fn hover_power_raw(
    delta: f64,
    rho: f64,
    solidity: f64,
    area: f64,
    omega: f64,
    radius: f64,
    k: f64,
    total_weight_n: f64,
) -> Result<HoverPower, EnergyError> {
    for (name, v) in [
        ("delta", delta),
        ("rho", rho),
        ("solidity", solidity),
        ("area", area),
        ("omega", omega),
        ("radius", radius),
        ("k", k),
        ("total_weight_n", total_weight_n),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(EnergyError::invalid(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    let blade_profile =
        (delta / 8.0) * rho * solidity * area * omega.powi(3) * radius.powi(3);
    let induced = (1.0 + k) * total_weight_n.powf(1.5) / (2.0 * rho * area).sqrt();
    // 0/0 when both rho·area and the weight vanish; the power is 0 by limits.
    let induced = if total_weight_n == 0.0 { 0.0 } else { induced };
    let result = HoverPower {
        blade_profile_w: blade_profile,
        induced_w: induced,
    };
    if !result.total_w().is_finite() {
        return Err(EnergyError::ModelDomain {
            what: format!("hover power is non-finite for total weight {total_weight_n} N"),
        });
    }
    Ok(result)
}

/// Forward-flight power at speed `v` and a given payload weight.
///
/// `P_p = Pᵢ·(√(1+v⁴/4v₀⁴) − v²/2v₀²)^½ + P₀·(1+3v²/U_tip²) + ½·d₀·ρ·s·A·v³`.
/// At `v = 0` this reduces term-by-term to the hover power.
pub fn cruise_power(spec: &UamSpec, v: f64, payload_n: f64) -> Result<CruisePower, EnergyError> {
    if !v.is_finite() || v < 0.0 {
        return Err(EnergyError::invalid(format!(
            "v must be finite and non-negative, got {v}"
        )));
    }
    if !payload_n.is_finite() || payload_n < 0.0 {
        return Err(EnergyError::invalid(format!(
            "payload_n must be finite and non-negative, got {payload_n}"
        )));
    }
    let hover = hover_power(spec, payload_n)?;
    cruise_power_raw(
        &hover,
        v,
        spec.mean_induced_velocity_m_s,
        spec.tip_speed_m_s,
        spec.fuselage_drag_ratio,
        spec.air_density_kg_m3,
        spec.rotor_solidity,
        spec.disc_area_m2,
    )
}

/// Forward-flight power from primitives given precomputed hover components.
#[allow(clippy::too_many_arguments)]
pub fn cruise_power_raw(
    hover: &HoverPower,
    v: f64,
    v0: f64,
    tip_speed: f64,
    d0: f64,
    rho: f64,
    solidity: f64,
    area: f64,
) -> Result<CruisePower, EnergyError> {
    let v2 = v * v;
    let advance = 1.0 + v2 * v2 / (4.0 * v0.powi(4));
    let under_root = advance.sqrt() - v2 / (2.0 * v0 * v0);
    let under_root = if under_root < 0.0 {
        if under_root < -1e-12 {
            return Err(EnergyError::ModelDomain {
                what: format!(
                    "induced-power radicand {under_root} is negative at v = {v} m/s"
                ),
            });
        }
        0.0
    } else {
        under_root
    };
    let induced = hover.induced_w * under_root.sqrt();
    let blade_profile = hover.blade_profile_w * (1.0 + 3.0 * v2 / (tip_speed * tip_speed));
    let parasite = 0.5 * d0 * rho * solidity * area * v2 * v;
    let result = CruisePower {
        induced_w: induced,
        blade_profile_w: blade_profile,
        parasite_w: parasite,
    };
    if !result.total_w().is_finite() {
        return Err(EnergyError::ModelDomain {
            what: format!("cruise power is non-finite at v = {v} m/s"),
        });
    }
    Ok(result)
}
