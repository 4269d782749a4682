//! Angle expressions and the `theta1` grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Parses a real number or a multiple of pi: `0.3`, `pi`, `-pi`, `0.1pi`,
/// `0.1*pi`, `pi/2`, `-3pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let text = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot read {s:?} as an angle (try 0.3, pi/2 or -0.1pi)");
    let Some(at) = text.find("pi") else {
        return text.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&text[..at], &text[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head).trim();
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail.trim() {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.trim().parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(factor * PI / divisor)
}

/// `count` equally spaced probe angles from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: -PI,
            max: PI,
            count: DEFAULT_GRID_POINTS,
        }
    }
}

impl GridSpec {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.count == 0 {
            out.push("grid count must be >= 1".to_string());
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            out.push(format!("grid bounds must be finite, got {}..{}", self.min, self.max));
        } else if self.min > self.max {
            out.push(format!("grid min {} exceeds max {}", self.min, self.max));
        }
        out
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        // Interpolating from both ends keeps the endpoints exact and puts the
        // midpoint of a symmetric grid exactly on zero.
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                self.min * (1.0 - t) + self.max * t
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// `min:max:count`, e.g. `-pi:pi:2001`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(format!("grid must look like min:max:count, got {s:?}"));
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("grid count {count:?} is not a non-negative integer"))?;
        Ok(Self {
            min: parse_angle(min)?,
            max: parse_angle(max)?,
            count,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}
