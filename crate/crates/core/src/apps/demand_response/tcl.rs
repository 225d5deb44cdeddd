//! Discrete-time equivalent-thermal-parameter model of a cooling load with
//! a backup thermostat.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TclParams {
    /// °C/kW
    pub thermal_resistance: f64,
    /// kWh/°C
    pub thermal_capacitance: f64,
    /// Electrical rated power, kW.
    pub rated_power: f64,
    pub cop: f64,
    /// °C
    pub setpoint: f64,
    /// °C
    pub deadband_halfwidth: f64,
    /// °C
    pub ambient: f64,
}

impl TclParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("thermal_resistance", self.thermal_resistance),
            ("thermal_capacitance", self.thermal_capacitance),
            ("rated_power", self.rated_power),
            ("cop", self.cop),
            ("setpoint", self.setpoint),
            ("deadband_halfwidth", self.deadband_halfwidth),
            ("ambient", self.ambient),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "TCL parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Largest one-step temperature change, reached at the deadband edge
    /// farthest from the active equilibrium.
    pub fn max_drift(&self, dt_hours: f64) -> f64 {
        let a = (-dt_hours / (self.thermal_resistance * self.thermal_capacitance)).exp();
        let hi = self.setpoint + self.deadband_halfwidth;
        let lo = self.setpoint - self.deadband_halfwidth;
        let cooled = self.ambient - self.thermal_resistance * self.rated_power * self.cop;
        let gaps = [
            hi - cooled,
            lo - cooled,
            hi - self.ambient,
            lo - self.ambient,
        ];
        (1.0 - a) * gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()))
    }
}

/// Who decides the load's state this round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Flexible,
    ForcedOn,
    ForcedOff,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TclState {
    pub temperature: f64,
    pub is_on: bool,
    pub is_flexible: bool,
    /// kW drawn under aggregator control.
    pub p_flexible: f64,
    /// kW drawn under backup control.
    pub p_inflexible: f64,
}

impl TclState {
    pub fn new(temperature: f64, is_on: bool) -> Self {
        Self {
            temperature,
            is_on,
            is_flexible: true,
            p_flexible: 0.0,
            p_inflexible: 0.0,
        }
    }

    /// `u = p + p̃`.
    pub fn power(&self) -> f64 {
        self.p_flexible + self.p_inflexible
    }
}

/// Backup rule for a cooling load: too warm forces it on, too cold off.
pub fn classify(params: &TclParams, temperature: f64) -> Control {
    if temperature > params.setpoint + params.deadband_halfwidth {
        Control::ForcedOn
    } else if temperature < params.setpoint - params.deadband_halfwidth {
        Control::ForcedOff
    } else {
        Control::Flexible
    }
}

/// Applies the backup override to `on_command` and advances the temperature
/// by `dt_hours`.
pub fn tcl_step(params: &TclParams, state: &TclState, on_command: bool, dt_hours: f64) -> TclState {
    let control = classify(params, state.temperature);
    let on = match control {
        Control::Flexible => on_command,
        Control::ForcedOn => true,
        Control::ForcedOff => false,
    };
    let a = (-dt_hours / (params.thermal_resistance * params.thermal_capacitance)).exp();
    let m = if on { 1.0 } else { 0.0 };
    let target = params.ambient - m * params.thermal_resistance * params.rated_power * params.cop;
    let flexible = control == Control::Flexible;
    let p = if on { params.rated_power } else { 0.0 };
    TclState {
        temperature: a * state.temperature + (1.0 - a) * target,
        is_on: on,
        is_flexible: flexible,
        p_flexible: if flexible { p } else { 0.0 },
        p_inflexible: if flexible { 0.0 } else { p },
    }
}
