//! Moist-air property correlations.
//!
//! Saturation pressure uses the Hyland-Wexler correlation as tabulated in
//! the ASHRAE Handbook of Fundamentals (ice below 0 °C, liquid water above).
//! Humidity is carried internally as humidity ratio (kg water / kg dry air);
//! relative humidity is only computed for reporting.

/// Standard atmospheric pressure, Pa.
pub const P_ATM: f64 = 101_325.0;
/// Specific heat of moist air used throughout, J/(kg·K).
pub const CP_AIR: f64 = 1006.0;
/// Latent heat of vaporization at 0 °C, J/kg.
pub const H_FG: f64 = 2_501_000.0;

const MW_RATIO: f64 = 0.621_945;

/// Saturation vapour pressure in Pa at dry-bulb `t_c` (°C).
pub fn saturation_pressure(t_c: f64) -> f64 {
    let t = t_c + 273.15;
    let ln_p = if t_c < 0.0 {
        -5.674_535_9e3 / t + 6.392_524_7 - 9.677_843e-3 * t + 6.221_570_1e-7 * t * t + 2.074_782_5e-9 * t.powi(3)
            - 9.484_024e-13 * t.powi(4)
            + 4.163_501_9 * t.ln()
    } else {
        -5.800_220_6e3 / t + 1.391_499_3 - 4.864_023_9e-2 * t + 4.176_476_8e-5 * t * t - 1.445_209_3e-8 * t.powi(3)
            + 6.545_967_3 * t.ln()
    };
    ln_p.exp()
}

/// Humidity ratio at saturation.
pub fn saturation_humidity_ratio(t_c: f64) -> f64 {
    let pws = saturation_pressure(t_c);
    MW_RATIO * pws / (P_ATM - pws)
}

/// Humidity ratio from dry-bulb (°C) and relative humidity (%).
pub fn humidity_ratio(t_c: f64, rh_pct: f64) -> f64 {
    let pw = rh_pct.clamp(0.0, 100.0) / 100.0 * saturation_pressure(t_c);
    MW_RATIO * pw / (P_ATM - pw)
}

/// Relative humidity (%) from dry-bulb (°C) and humidity ratio, capped at 100.
pub fn relative_humidity(t_c: f64, w: f64) -> f64 {
    let w = w.max(0.0);
    let pw = P_ATM * w / (MW_RATIO + w);
    (100.0 * pw / saturation_pressure(t_c)).clamp(0.0, 100.0)
}
