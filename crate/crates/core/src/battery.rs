//! State-of-charge transitions and feasibility clipping.

use crate::types::{BatteryParams, ControlAction};

/// Unclamped one-step SOC update:
/// `soc + eta_ch*p_ch*dt - p_dis/eta_dis*dt`.
///
/// Candidate evaluation relies on the raw value so bound violations can be priced.
pub fn step_soc(p: &BatteryParams, soc: f64, a: ControlAction) -> f64 {
    soc + p.eta_ch() * a.p_ch() * p.dt() - a.p_dis() / p.eta_dis() * p.dt()
}

/// [`step_soc`] plus an additive disturbance `w` (kWh).
pub fn step_soc_perturbed(p: &BatteryParams, soc: f64, a: ControlAction, w: f64) -> f64 {
    step_soc(p, soc, a) + w
}

/// Surplus renewable power available for charging (kW).
pub fn renewable_surplus(load: f64, renewable: f64) -> f64 {
    (renewable - load).max(0.0)
}

/// Demand not covered by renewables (kW).
pub fn renewable_deficit(load: f64, renewable: f64) -> f64 {
    (load - renewable).max(0.0)
}

/// Interprets a set-point as the power the bus can actually exchange this hour.
///
/// Discharge never exceeds the renewable deficit: surplus discharge would only
/// displace renewables into curtailment. Charge is capped at the renewable surplus
/// unless backup charging is allowed. SOC bounds are not applied here.
pub fn effective_action(
    a: ControlAction,
    load: f64,
    renewable: f64,
    allow_backup_charging: bool,
) -> ControlAction {
    if a.p_dis() > 0.0 {
        ControlAction::discharge(a.p_dis().min(renewable_deficit(load, renewable)))
    } else if a.p_ch() > 0.0 && !allow_backup_charging {
        ControlAction::charge(a.p_ch().min(renewable_surplus(load, renewable)))
    } else {
        a
    }
}

/// Largest action `a' <= a` (componentwise) whose next SOC stays in
/// `[soc_min, soc_max]`, with `p_ch' <= renewable_surplus` and rate limits respected.
///
/// Pass `f64::INFINITY` as the surplus when backup charging is allowed.
pub fn clip_feasible(
    p: &BatteryParams,
    soc: f64,
    a: ControlAction,
    renewable_surplus: f64,
) -> ControlAction {
    let headroom = (p.soc_max() - soc).max(0.0);
    let available = (soc - p.soc_min()).max(0.0);

    let max_ch = (headroom / (p.eta_ch() * p.dt()))
        .min(p.p_ch_max())
        .min(renewable_surplus.max(0.0));
    let max_dis = (available * p.eta_dis() / p.dt()).min(p.p_dis_max());

    let p_ch = if a.p_ch() <= max_ch { a.p_ch() } else { max_ch };
    let p_dis = if a.p_dis() <= max_dis {
        a.p_dis()
    } else {
        max_dis
    };
    // at most one of the two is nonzero because `a` was exclusive
    if p_dis > 0.0 {
        ControlAction::discharge(p_dis)
    } else {
        ControlAction::charge(p_ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BatterySpec;
    use proptest::prelude::*;

    fn params() -> BatteryParams {
        BatteryParams::default()
    }

    #[test]
    fn charge_step() {
        assert!((step_soc(&params(), 500.0, ControlAction::charge(100.0)) - 590.0).abs() < 1e-12);
    }

    #[test]
    fn discharge_step() {
        assert!((step_soc(&params(), 500.0, ControlAction::discharge(90.0)) - 400.0).abs() < 1e-12);
    }

    #[test]
    fn idle_step_is_identity() {
        assert_eq!(step_soc(&params(), 500.0, ControlAction::idle()), 500.0);
    }

    #[test]
    fn perturbed_steps() {
        let p = params();
        let a = ControlAction::charge(100.0);
        assert_eq!(
            step_soc_perturbed(&p, 500.0, a, 0.0),
            step_soc(&p, 500.0, a)
        );
        assert_eq!(
            step_soc_perturbed(&p, 500.0, ControlAction::idle(), -10.0),
            490.0
        );
        assert!((step_soc_perturbed(&p, 500.0, a, 5.0) - 595.0).abs() < 1e-12);
    }

    #[test]
    fn clip_fills_exactly_to_soc_max() {
        let p = params();
        let a = clip_feasible(&p, 890.0, ControlAction::charge(100.0), 200.0);
        // 890 + 0.9 x = 900
        assert!((a.p_ch() - 10.0 / 0.9).abs() < 1e-9);
        assert!((step_soc(&p, 890.0, a) - 900.0).abs() < 1e-9);
    }

    #[test]
    fn clip_empty_battery_cannot_discharge() {
        let a = clip_feasible(&params(), 100.0, ControlAction::discharge(50.0), 0.0);
        assert_eq!(a.p_dis(), 0.0);
    }

    #[test]
    fn clip_keeps_feasible_actions() {
        let p = params();
        for a in [
            ControlAction::idle(),
            ControlAction::charge(50.0),
            ControlAction::discharge(100.0),
        ] {
            assert_eq!(clip_feasible(&p, 500.0, a, 60.0), a);
        }
    }

    #[test]
    fn clip_limits_charge_to_surplus() {
        let a = clip_feasible(&params(), 500.0, ControlAction::charge(300.0), 40.0);
        assert_eq!(a.p_ch(), 40.0);
    }

    #[test]
    fn effective_action_trims_to_bus_needs() {
        let a = effective_action(ControlAction::discharge(100.0), 300.0, 220.0, false);
        assert_eq!(a.p_dis(), 80.0);
        let a = effective_action(ControlAction::charge(100.0), 200.0, 224.0, false);
        assert_eq!(a.p_ch(), 24.0);
        let a = effective_action(ControlAction::charge(100.0), 200.0, 224.0, true);
        assert_eq!(a.p_ch(), 100.0);
    }

    #[test]
    fn round_trip_returns_product_of_efficiencies() {
        let spec = BatterySpec {
            eta_ch: 0.9,
            eta_dis: 0.8,
            ..BatterySpec::default()
        };
        let p = BatteryParams::new(spec).unwrap();
        let x = 50.0;
        let after_charge = step_soc(&p, 400.0, ControlAction::charge(x));
        // discharge exactly back to the starting SOC
        let recovered = (after_charge - 400.0) * p.eta_dis() / p.dt();
        let back = step_soc(&p, after_charge, ControlAction::discharge(recovered));
        assert!((back - 400.0).abs() < 1e-9);
        assert!((recovered - 0.9 * 0.8 * x).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn step_is_linear(soc in 0.0..1000.0f64, c1 in 0.0..500.0f64, c2 in 0.0..500.0f64,
                          d1 in 0.0..100.0f64, d2 in 0.0..100.0f64) {
            let p = params();
            // linearity over charge and discharge separately (exclusive actions)
            let lhs = step_soc(&p, soc, ControlAction::charge(c1 + c2))
                - step_soc(&p, soc, ControlAction::charge(c1))
                - step_soc(&p, soc, ControlAction::charge(c2)) + soc;
            prop_assert!(lhs.abs() < 1e-9);
            let lhs = step_soc(&p, soc, ControlAction::discharge(d1 + d2))
                - step_soc(&p, soc, ControlAction::discharge(d1))
                - step_soc(&p, soc, ControlAction::discharge(d2)) + soc;
            prop_assert!(lhs.abs() < 1e-9);
        }

        #[test]
        fn clipped_action_stays_in_bounds(soc in 100.0..=900.0f64, ch in 0.0..2000.0f64,
                                          dis in 0.0..300.0f64, surplus in 0.0..1500.0f64,
                                          pick in 0..2u8) {
            let p = params();
            let a = if pick == 0 { ControlAction::charge(ch) } else { ControlAction::discharge(dis) };
            let c = clip_feasible(&p, soc, a, surplus);
            let next = step_soc(&p, soc, c);
            prop_assert!(next >= p.soc_min() - 1e-9 && next <= p.soc_max() + 1e-9);
            prop_assert!(c.p_ch() <= a.p_ch() && c.p_dis() <= a.p_dis());
            prop_assert!(c.p_ch() <= surplus + 1e-12);
            prop_assert!(c.within_limits(&p));
        }
    }
}
