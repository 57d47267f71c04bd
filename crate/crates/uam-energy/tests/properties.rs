//! Randomized properties of the power and battery model.

use proptest::prelude::*;
use uam_energy::{
    charge, cruise_power, discharge, hover_power, BatterySpec, BatteryState, UamSpec,
};

/// A physically consistent spec built from free primitives, with the derived
/// fields computed from their defining formulas.
fn arb_spec() -> impl Strategy<Value = UamSpec> {
    (
        0.5f64..3.0,     // rotor radius
        20.0f64..120.0,  // angular velocity
        2u32..8,         // blades
        5_000.0f64..40_000.0, // weight
        0.8f64..1.3,     // air density
        0.01f64..0.1,    // profile drag coefficient
        0.01f64..0.2,    // induced power factor
        5.0f64..60.0,    // mean induced velocity
        20.0f64..150.0,  // flight speed
    )
        .prop_map(
            |(radius, omega, blades, weight, rho, delta, k, v0, speed)| {
                let area = std::f64::consts::PI * radius * radius;
                let solidity = 0.2231 * blades as f64 / (std::f64::consts::PI * radius);
                UamSpec {
                    seat_count: 4,
                    flight_speed_m_s: speed,
                    mass_kg: weight / 9.80665,
                    weight_n: weight,
                    rotor_radius_m: radius,
                    disc_area_m2: area,
                    blade_count: blades,
                    rotor_solidity: solidity,
                    blade_angular_velocity_rad_s: omega,
                    tip_speed_m_s: omega * radius,
                    air_density_kg_m3: rho,
                    fuselage_drag_ratio: 0.0151 / (solidity * area),
                    mean_induced_velocity_m_s: v0,
                    profile_drag_coefficient: delta,
                    induced_power_factor: k,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_specs_validate(spec in arb_spec()) {
        prop_assert!(spec.validate().is_ok());
    }

    #[test]
    fn cruise_at_zero_speed_is_hover(spec in arb_spec(), payload in 0.0f64..5000.0) {
        let hover = hover_power(&spec, payload).unwrap().total_w();
        let cruise = cruise_power(&spec, 0.0, payload).unwrap().total_w();
        let rel = (hover - cruise).abs() / hover.max(f64::MIN_POSITIVE);
        prop_assert!(rel <= 1e-9, "relative gap {rel}");
    }

    #[test]
    fn powers_are_finite_and_non_negative(spec in arb_spec(), payload in 0.0f64..5000.0, v in 0.0f64..200.0) {
        let hover = hover_power(&spec, payload).unwrap();
        prop_assert!(hover.total_w().is_finite() && hover.total_w() >= 0.0);
        let cruise = cruise_power(&spec, v, payload).unwrap();
        prop_assert!(cruise.total_w().is_finite() && cruise.total_w() >= 0.0);
        prop_assert!(cruise.induced_w >= 0.0);
        prop_assert!(cruise.blade_profile_w >= 0.0);
        prop_assert!(cruise.parasite_w >= 0.0);
    }

    #[test]
    fn discharge_then_charge_round_trips(level in 0.0f64..150.0, energy in 0.0f64..30.0) {
        let spec = BatterySpec::joby_s4();
        let start = BatteryState { energy_kwh: level };
        let out = discharge(start, energy).unwrap();
        if !out.depleted {
            let duration_s = energy * 3.6e6 / spec.charger_power_w;
            let back = charge(out.state, &spec, duration_s).unwrap();
            prop_assert!((back.energy_kwh - level).abs() < 1e-9);
        }
    }
}

#[test]
fn power_increases_with_payload() {
    let spec = UamSpec::joby_s4();
    let payloads: Vec<f64> = (0..40).map(|i| i as f64 * 250.0).collect();
    let mut prev_hover = f64::NEG_INFINITY;
    let mut prev_cruise = f64::NEG_INFINITY;
    for p in payloads {
        let h = hover_power(&spec, p).unwrap().total_w();
        let c = cruise_power(&spec, spec.flight_speed_m_s, p).unwrap().total_w();
        assert!(h > prev_hover, "hover power not increasing at payload {p}");
        assert!(c > prev_cruise, "cruise power not increasing at payload {p}");
        prev_hover = h;
        prev_cruise = c;
    }
}
