use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::EsomError;

/// How much of a component may be built or used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Capacity {
    Fixed {
        capacity: f64,
    },
    Unlimited,
    /// Capacity is a decision; `capex` per unit, `fixed_opex` as a fraction of capex per year.
    Expandable {
        capex: f64,
        lifetime: f64,
        #[serde(default)]
        fixed_opex: f64,
        #[serde(default)]
        max: Option<f64>,
    },
}

impl Capacity {
    pub fn expandable(capex: f64, lifetime: f64, fixed_opex: f64) -> Self {
        Capacity::Expandable {
            capex,
            lifetime,
            fixed_opex,
            max: None,
        }
    }
}

/// A cost or price, either constant or read from a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Price {
    Constant(f64),
    Profile {
        profile: String,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl Default for Price {
    fn default() -> Self {
        Price::Constant(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    Source {
        name: String,
        region: String,
        commodity: String,
        capacity: Capacity,
        /// Profile bounding output per unit of capacity.
        #[serde(default)]
        capacity_factor: Option<String>,
        #[serde(default)]
        variable_cost: Price,
    },
    /// Inelastic demand `scale × profile`; negative values inject energy.
    Sink {
        name: String,
        region: String,
        commodity: String,
        profile: String,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Turns `input` into `efficiency × input` of `output`. Capacity and
    /// `variable_cost` refer to the output, `emission_factor` to the input.
    Conversion {
        name: String,
        region: String,
        input: String,
        output: String,
        efficiency: f64,
        capacity: Capacity,
        #[serde(default)]
        variable_cost: f64,
        #[serde(default)]
        emission_factor: f64,
    },
    Storage {
        name: String,
        region: String,
        commodity: String,
        /// Applied on charging and again on discharging.
        efficiency: f64,
        /// Fraction of the stored energy lost per time step.
        #[serde(default)]
        self_discharge: f64,
        energy: Capacity,
        #[serde(default = "unlimited")]
        power: Capacity,
        #[serde(default = "yes")]
        cyclic: bool,
    },
    /// Link usable in both directions up to `capacity` each; `loss` is the
    /// fraction lost on the way.
    Transmission {
        name: String,
        from: String,
        to: String,
        commodity: String,
        capacity: f64,
        #[serde(default)]
        loss: f64,
    },
}

fn unlimited() -> Capacity {
    Capacity::Unlimited
}

impl Component {
    pub fn name(&self) -> &str {
        match self {
            Component::Source { name, .. }
            | Component::Sink { name, .. }
            | Component::Conversion { name, .. }
            | Component::Storage { name, .. }
            | Component::Transmission { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Component::Source { .. } => "source",
            Component::Sink { .. } => "sink",
            Component::Conversion { .. } => "conversion",
            Component::Storage { .. } => "storage",
            Component::Transmission { .. } => "transmission",
        }
    }

    /// Profile attributes the component reads.
    pub fn profiles(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            Component::Source {
                capacity_factor,
                variable_cost,
                ..
            } => {
                if let Some(p) = capacity_factor {
                    out.push(p.as_str());
                }
                if let Price::Profile { profile, .. } = variable_cost {
                    out.push(profile.as_str());
                }
            }
            Component::Sink { profile, .. } => out.push(profile.as_str()),
            _ => {}
        }
        out
    }
}

/// A complete model description, independent of the time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySystemSpec {
    pub regions: Vec<String>,
    pub commodities: Vec<String>,
    pub components: Vec<Component>,
    #[serde(default = "one")]
    pub step_hours: f64,
    /// Price per tonne of CO2, applied through conversion emission factors.
    #[serde(default)]
    pub emission_price: Price,
    /// Interest rate for annualizing capex; zero means straight-line capex / lifetime.
    #[serde(default)]
    pub annuity_rate: f64,
}

pub(crate) fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl EnergySystemSpec {
    /// Annual cost of one unit of capacity: annualized capex plus fixed opex.
    pub fn annual_capacity_cost(&self, capex: f64, lifetime: f64, fixed_opex: f64) -> (f64, f64) {
        let annualized = if self.annuity_rate > 0.0 {
            let r = self.annuity_rate;
            capex * r / (1.0 - (1.0 + r).powf(-lifetime))
        } else {
            capex / lifetime
        };
        (annualized, fixed_opex * capex)
    }

    /// Every profile attribute the model refers to, in first-use order.
    pub fn profile_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |p: &str| {
            if !out.iter().any(|q| q == p) {
                out.push(p.to_string());
            }
        };
        for c in &self.components {
            for p in c.profiles() {
                push(p);
            }
        }
        if let Price::Profile { profile, .. } = &self.emission_price {
            push(profile);
        }
        out
    }

    pub fn validate(&self) -> Result<(), EsomError> {
        let bad = |msg: String| Err(EsomError::InvalidSpec(msg));
        if !(self.step_hours.is_finite() && self.step_hours > 0.0) {
            return bad(format!("step_hours must be positive, got {}", self.step_hours));
        }
        if !(self.annuity_rate >= 0.0 && self.annuity_rate.is_finite()) {
            return bad("annuity_rate must be non-negative".into());
        }
        for list in [&self.regions, &self.commodities] {
            let mut seen = HashSet::new();
            for n in list {
                if !valid_identifier(n) || !seen.insert(n) {
                    return bad(format!("invalid or duplicate name `{n}`"));
                }
            }
        }
        let mut names = HashSet::new();
        let region = |r: &String| self.regions.contains(r);
        let commodity = |c: &String| self.commodities.contains(c);
        for c in &self.components {
            let name = c.name();
            if !valid_identifier(name) {
                return bad(format!("component name `{name}` must start with a letter and contain only letters, digits and `_`"));
            }
            if !names.insert(name) {
                return bad(format!("duplicate component `{name}`"));
            }
            let check_capacity = |cap: &Capacity| -> Result<(), EsomError> {
                match cap {
                    Capacity::Fixed { capacity } if !(*capacity >= 0.0) => {
                        Err(EsomError::InvalidSpec(format!("`{name}`: capacity must be >= 0")))
                    }
                    Capacity::Expandable { capex, lifetime, fixed_opex, max } => {
                        if !(*capex >= 0.0 && *fixed_opex >= 0.0 && capex.is_finite()) {
                            return Err(EsomError::InvalidSpec(format!("`{name}`: costs must be >= 0")));
                        }
                        if !(*lifetime > 0.0 && lifetime.is_finite()) {
                            return Err(EsomError::InvalidSpec(format!("`{name}`: lifetime must be > 0")));
                        }
                        if matches!(max, Some(m) if !(*m >= 0.0)) {
                            return Err(EsomError::InvalidSpec(format!("`{name}`: max must be >= 0")));
                        }
                        Ok(())
                    }
                    _ => Ok(()),
                }
            };
            let check_price = |p: &Price| -> Result<(), EsomError> {
                match p {
                    Price::Constant(v) if !(*v >= 0.0 && v.is_finite()) => {
                        Err(EsomError::InvalidSpec(format!("`{name}`: costs must be >= 0")))
                    }
                    _ => Ok(()),
                }
            };
            match c {
                Component::Source { region: r, commodity: k, capacity, variable_cost, .. } => {
                    if !region(r) || !commodity(k) {
                        return bad(format!("`{name}` refers to unknown region or commodity"));
                    }
                    check_capacity(capacity)?;
                    check_price(variable_cost)?;
                }
                Component::Sink { region: r, commodity: k, scale, .. } => {
                    if !region(r) || !commodity(k) {
                        return bad(format!("`{name}` refers to unknown region or commodity"));
                    }
                    if !scale.is_finite() {
                        return bad(format!("`{name}`: scale must be finite"));
                    }
                }
                Component::Conversion { region: r, input, output, efficiency, capacity, variable_cost, emission_factor, .. } => {
                    if !region(r) || !commodity(input) || !commodity(output) {
                        return bad(format!("`{name}` refers to unknown region or commodity"));
                    }
                    if !(*efficiency > 0.0 && efficiency.is_finite()) {
                        return bad(format!("`{name}`: conversion ratio must be > 0"));
                    }
                    if !(*variable_cost >= 0.0 && *emission_factor >= 0.0) {
                        return bad(format!("`{name}`: costs must be >= 0"));
                    }
                    check_capacity(capacity)?;
                }
                Component::Storage { region: r, commodity: k, efficiency, self_discharge, energy, power, .. } => {
                    if !region(r) || !commodity(k) {
                        return bad(format!("`{name}` refers to unknown region or commodity"));
                    }
                    if !(*efficiency > 0.0 && *efficiency <= 1.0) {
                        return bad(format!("`{name}`: efficiency must lie in (0, 1]"));
                    }
                    if !(*self_discharge >= 0.0 && *self_discharge < 1.0) {
                        return bad(format!("`{name}`: self-discharge must lie in [0, 1)"));
                    }
                    check_capacity(energy)?;
                    check_capacity(power)?;
                }
                Component::Transmission { from, to, commodity: k, capacity, loss, .. } => {
                    if !region(from) || !region(to) || from == to || !commodity(k) {
                        return bad(format!("`{name}` must join two different known regions"));
                    }
                    if !(*capacity >= 0.0) || !(*loss >= 0.0 && *loss < 1.0) {
                        return bad(format!("`{name}`: capacity must be >= 0 and loss in [0, 1)"));
                    }
                }
            }
        }
        check_emission_price(&self.emission_price)
    }
}

fn check_emission_price(p: &Price) -> Result<(), EsomError> {
    match p {
        Price::Constant(v) if !(*v >= 0.0 && v.is_finite()) => {
            Err(EsomError::InvalidSpec("emission price must be >= 0".into()))
        }
        _ => Ok(()),
    }
}
