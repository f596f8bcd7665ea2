//! The daily weather summary: the share of broken packages as a category.

use std::fmt;

use debcheck_core::solver::CheckResult;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeatherCategory {
    Clear,
    FewClouds,
    Clouds,
    Showers,
    Storm,
}

impl WeatherCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            WeatherCategory::Clear => "clear",
            WeatherCategory::FewClouds => "few_clouds",
            WeatherCategory::Clouds => "clouds",
            WeatherCategory::Showers => "showers",
            WeatherCategory::Storm => "storm",
        }
    }
}

impl fmt::Display for WeatherCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
#[error("fraction {0} is outside [0, 1]")]
pub struct FractionOutOfRange(pub f64);

/// Intervals are closed on the left: 1% is already `few_clouds`.
pub fn weather_category(fraction: f64) -> Result<WeatherCategory, FractionOutOfRange> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(FractionOutOfRange(fraction));
    }
    Ok(match fraction {
        f if f < 0.01 => WeatherCategory::Clear,
        f if f < 0.02 => WeatherCategory::FewClouds,
        f if f < 0.03 => WeatherCategory::Clouds,
        f if f < 0.04 => WeatherCategory::Showers,
        _ => WeatherCategory::Storm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub broken: usize,
    pub fraction: f64,
    pub category: WeatherCategory,
}

impl Summary {
    pub fn from_counts(total: usize, broken: usize) -> Self {
        let fraction = if total == 0 {
            0.0
        } else {
            broken as f64 / total as f64
        };
        Summary {
            total,
            broken,
            fraction,
            category: weather_category(fraction).expect("broken never exceeds total"),
        }
    }
}

pub fn summarize<'a>(results: impl IntoIterator<Item = &'a CheckResult>) -> Summary {
    let (total, broken) = results
        .into_iter()
        .fold((0, 0), |(t, b), r| (t + 1, b + usize::from(!r.is_installable())));
    Summary::from_counts(total, broken)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let cases = [
            (0.0, WeatherCategory::Clear),
            (0.005, WeatherCategory::Clear),
            (0.01, WeatherCategory::FewClouds),
            (0.02, WeatherCategory::Clouds),
            (0.03, WeatherCategory::Showers),
            (0.04, WeatherCategory::Storm),
            (0.045, WeatherCategory::Storm),
            (1.0, WeatherCategory::Storm),
        ];
        for (f, expected) in cases {
            assert_eq!(weather_category(f), Ok(expected), "{f}");
        }
        assert!(weather_category(-0.1).is_err());
        assert!(weather_category(1.5).is_err());
        assert!(weather_category(f64::NAN).is_err());
    }

    #[test]
    fn counts() {
        let s = Summary::from_counts(21617, 228);
        assert!((s.fraction - 0.010547254).abs() < 1e-9);
        assert_eq!(s.category, WeatherCategory::FewClouds);
        assert_eq!(Summary::from_counts(0, 0).category, WeatherCategory::Clear);
        assert_eq!(Summary::from_counts(100, 10).category, WeatherCategory::Storm);
    }
}
