//! Synthetic hourly profiles for the bundled sample data.
//!
//! Each series is a seasonal cycle times a diurnal shape, modulated by
//! day-level weather drawn from a fixed-seed ChaCha generator, so the
//! output is identical on every platform.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tsagg_core::TimeSeriesSet;

pub const HOURS: usize = 8760;
const DAYS: usize = HOURS / 24;

/// 0 in midwinter, 1 in midsummer.
fn season(day: usize) -> f64 {
    0.5 - 0.5 * (TAU * (day as f64 + 10.0) / 365.0).cos()
}

/// Day-level AR(1) process in [0, 1]: 0 clear or calm, 1 overcast or windy.
fn daily_weather(rng: &mut ChaCha8Rng, persistence: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(DAYS);
    let mut c = 0.5;
    for _ in 0..DAYS {
        c = persistence * c + (1.0 - persistence) * rng.gen::<f64>();
        out.push(c);
    }
    out
}

/// Capacity factor of a PV module; `shift` moves the peak towards morning
/// (negative) or evening (positive) as a fraction of day length.
fn pv_profile(rng: &mut ChaCha8Rng, cloud: &[f64], shift: f64, peak_scale: f64) -> Vec<f64> {
    (0..HOURS)
        .map(|h| {
            let day = h / 24;
            let s = season(day);
            let day_len = 8.0 + 8.5 * s;
            let x = ((h % 24) as f64 + 0.5 - (12.0 - day_len / 2.0)) / day_len;
            let noise = 0.9 + 0.2 * rng.gen::<f64>();
            if x <= 0.0 || x >= 1.0 {
                return 0.0;
            }
            let clear = (1.1 - 1.1 * cloud[day]).clamp(0.05, 1.0);
            let shape = (PI * (x - shift).clamp(0.0, 1.0)).sin().powf(1.2);
            (shape * (0.35 + 0.45 * s) * peak_scale * clear * noise).clamp(0.0, 1.0)
        })
        .collect()
}

/// Five attributes for a single-family house in kW: three PV orientations
/// (capacity factors), electricity and heat demand.
pub fn building_profiles(seed: u64) -> TimeSeriesSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = daily_weather(&mut rng, 0.6);
    let south = pv_profile(&mut rng, &cloud, 0.0, 1.0);
    let east = pv_profile(&mut rng, &cloud, -0.15, 0.9);
    let west = pv_profile(&mut rng, &cloud, 0.15, 0.9);

    let normal = Normal::new(0.0, 1.0).unwrap();
    let daily_temp: Vec<f64> = (0..DAYS).map(|_| 2.0 * normal.sample(&mut rng)).collect();
    let mut electricity = Vec::with_capacity(HOURS);
    let mut heat = Vec::with_capacity(HOURS);
    for h in 0..HOURS {
        let day = h / 24;
        let hour = (h % 24) as f64;
        let temp = 9.5 - 9.5 * (TAU * (day as f64 - 15.0) / 365.0).cos()
            + 4.0 * (TAU * (hour - 9.0) / 24.0).sin()
            + daily_temp[day];
        let space = (18.0 - temp).max(0.0) * 0.12 * (1.0 + 0.1 * normal.sample(&mut rng));
        heat.push(space.max(0.0) + 0.15);
        let shape = 0.25
            + 0.25 * (-(hour - 7.5).powi(2) / 2.0).exp()
            + 0.45 * (-(hour - 19.5).powi(2) / 4.0).exp()
            + 0.1 * (1.0 - season(day));
        electricity.push((shape * (1.0 + 0.15 * normal.sample(&mut rng))).max(0.1));
    }
    TimeSeriesSet::new(
        ["pv_south", "pv_east", "pv_west", "electricity_demand", "heat_demand"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        vec![south, east, west, electricity, heat],
        1.0,
    )
    .expect("generated profiles are finite")
}

struct RegionShape {
    name: &'static str,
    /// Mean demand, MW.
    demand: f64,
    /// Peak turbine output of the pumped-storage fleet, MW.
    storage: f64,
    /// Mean wind speed factor; higher means windier.
    windiness: f64,
    pv_peak: f64,
}

const REGIONS: [RegionShape; 3] = [
    RegionShape { name: "north", demand: 6000.0, storage: 400.0, windiness: 1.15, pv_peak: 0.9 },
    RegionShape { name: "east", demand: 5000.0, storage: 700.0, windiness: 1.0, pv_peak: 0.95 },
    RegionShape { name: "south", demand: 9000.0, storage: 1200.0, windiness: 0.8, pv_peak: 1.05 },
];

/// Wind power curve on a relative speed: cubic ramp between cut-in and rated.
fn wind_power(speed: f64) -> f64 {
    let (cut_in, rated, cut_out) = (0.25, 1.2, 2.5);
    if speed < cut_in || speed > cut_out {
        0.0
    } else if speed >= rated {
        1.0
    } else {
        ((speed - cut_in) / (rated - cut_in)).powi(3)
    }
}

/// Thirteen attributes for the three-region dispatch model: per region
/// demand (MW), signed pumped-storage output (MW), wind and PV capacity
/// factors; plus an import price (€/MWh).
pub fn dispatch_profiles(seed: u64) -> TimeSeriesSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();

    // Large-scale wind regime shared by all regions, hourly AR(1).
    let mut synoptic = Vec::with_capacity(HOURS);
    let mut w = 0.0;
    for _ in 0..HOURS {
        w = 0.97 * w + 0.243 * normal.sample(&mut rng);
        synoptic.push(w);
    }
    let shared_cloud = daily_weather(&mut rng, 0.6);

    let mut names = Vec::new();
    let mut rows = Vec::new();
    for region in &REGIONS {
        let local_cloud: Vec<f64> = daily_weather(&mut rng, 0.5)
            .iter()
            .zip(&shared_cloud)
            .map(|(l, s)| 0.6 * s + 0.4 * l)
            .collect();
        let pv = pv_profile(&mut rng, &local_cloud, 0.0, region.pv_peak);

        let mut local = 0.0;
        let wind: Vec<f64> = (0..HOURS)
            .map(|h| {
                local = 0.9 * local + 0.3 * normal.sample(&mut rng);
                let winter = 1.0 - season(h / 24);
                let speed = region.windiness * (0.75 + 0.3 * winter) * (1.0 + 0.35 * synoptic[h] + 0.2 * local);
                wind_power(speed.max(0.0))
            })
            .collect();

        let demand: Vec<f64> = (0..HOURS)
            .map(|h| {
                let day = h / 24;
                let hour = (h % 24) as f64;
                let weekend = matches!(day % 7, 5 | 6);
                let diurnal = 0.82
                    + 0.18 * (-(hour - 11.5).powi(2) / 18.0).exp()
                    + 0.2 * (-(hour - 18.5).powi(2) / 6.0).exp()
                    - 0.12 * (-(hour - 3.5).powi(2) / 6.0).exp();
                let seasonal = 1.0 + 0.12 * (1.0 - season(day));
                let week = if weekend { 0.88 } else { 1.0 };
                region.demand * diurnal * seasonal * week * (1.0 + 0.025 * normal.sample(&mut rng))
            })
            .collect();

        // Turbine in the evening peak, pumping at night and at solar noon.
        let storage: Vec<f64> = (0..HOURS)
            .map(|h| {
                let hour = (h % 24) as f64;
                let s = season(h / 24);
                let turbine = (-(hour - 19.0).powi(2) / 3.0).exp() + 0.5 * (-(hour - 8.0).powi(2) / 2.0).exp();
                let pump = 0.6 * (-(hour - 3.0).powi(2) / 5.0).exp() + 0.5 * s * (-(hour - 13.0).powi(2) / 3.0).exp();
                region.storage * (turbine - pump + 0.05 * normal.sample(&mut rng))
            })
            .collect();

        names.extend([
            format!("{}_demand", region.name),
            format!("{}_storage", region.name),
            format!("{}_wind", region.name),
            format!("{}_pv", region.name),
        ]);
        rows.extend([demand, storage, wind, pv]);
    }

    let mut level = 0.0;
    let price: Vec<f64> = (0..HOURS)
        .map(|h| {
            let day = h / 24;
            let hour = (h % 24) as f64;
            if h % 24 == 0 {
                level = 0.8 * level + 2.0 * normal.sample(&mut rng);
            }
            let winter = 1.0 - season(day);
            let diurnal = 8.0 * (-(hour - 18.5).powi(2) / 5.0).exp() + 5.0 * (-(hour - 8.5).powi(2) / 3.0).exp()
                - 9.0 * (-(hour - 3.0).powi(2) / 6.0).exp();
            (38.0 + 10.0 * winter + diurnal + level + normal.sample(&mut rng)).max(5.0)
        })
        .collect();
    names.push("import_price".into());
    rows.push(price);

    TimeSeriesSet::new(names, rows, 1.0).expect("generated profiles are finite")
}

/// Seeds used for the bundled files.
pub const BUILDING_SEED: u64 = 7;
pub const DISPATCH_SEED: u64 = 11;
