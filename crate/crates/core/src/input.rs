//! JSON problem files: a map, a periodic orbit and tolerances.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynmap::{
    validate_orbit, LipschitzCertificate, MapError, MapSpec, OrbitError, PeriodicOrbit,
};
use crate::geom::Point2;
use crate::linking::LOOP_CLEAR_REL;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid map: {0}")]
    Map(#[from] MapError),
    #[error("invalid orbit: {0}")]
    Orbit(#[from] OrbitError),
    #[error("rotation_orbit needs n >= 2 and gcd(k, n) = 1, got k={k} n={n}")]
    Generator { k: i64, n: u64 },
    #[error("option {name} must be positive and finite, got {value}")]
    Option { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OrbitSource {
    Points(Vec<Point2>),
    Generate(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `n` points on a circle, stepping by `2 pi k / n`.
    RotationOrbit {
        k: i64,
        n: u64,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        center: Point2,
        #[serde(default)]
        phase: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Generator {
    pub fn points(&self) -> Result<Vec<Point2>, InputError> {
        match *self {
            Generator::RotationOrbit {
                k,
                n,
                radius,
                center,
                phase,
            } => {
                if n < 2 || gcd(k.unsigned_abs(), n) != 1 {
                    return Err(InputError::Generator { k, n });
                }
                let step = 2.0 * PI * k as f64 / n as f64;
                Ok((0..n)
                    .map(|i| Point2::polar(center, radius, phase + step * i as f64))
                    .collect())
            }
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Fixed-point box size.
    pub tol: f64,
    /// Orbit residual tolerance, relative to the orbit diameter.
    pub orbit_tol_rel: f64,
    /// Loop clearance from the fixed point, relative to the orbit diameter.
    pub loop_clear_rel: f64,
    /// Residual accepted when checking that the located point is fixed.
    pub fixed_tol: Option<f64>,
    /// Multiplier on the certified contour step.
    pub step_scale: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            orbit_tol_rel: crate::dynmap::ORBIT_REL_TOL,
            loop_clear_rel: LOOP_CLEAR_REL,
            fixed_tol: None,
            step_scale: None,
        }
    }
}

impl Options {
    fn validate(&self) -> Result<(), InputError> {
        let mut named = vec![
            ("tol", self.tol),
            ("orbit_tol_rel", self.orbit_tol_rel),
            ("loop_clear_rel", self.loop_clear_rel),
        ];
        named.extend(self.fixed_tol.map(|v| ("fixed_tol", v)));
        named.extend(self.step_scale.map(|v| ("step_scale", v)));
        for (name, value) in named {
            if !(value > 0.0 && value.is_finite()) {
                return Err(InputError::Option { name, value });
            }
        }
        Ok(())
    }
}

/// The document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub map: MapSpec,
    pub orbit: OrbitSource,
    #[serde(default)]
    pub options: Options,
}

/// A validated problem: the orbit has been checked against the map.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub map: MapSpec,
    pub orbit: PeriodicOrbit,
    pub options: Options,
}

impl Problem {
    pub fn new(map: MapSpec, points: Vec<Point2>, options: Options) -> Result<Self, InputError> {
        options.validate()?;
        let map = fill_pins(map, &points);
        map.validate()?;
        let orbit = validate_orbit(&map, points, Some(options.orbit_tol_rel))?;
        Ok(Self {
            map,
            orbit,
            options,
        })
    }

    pub fn from_doc(doc: InputDoc) -> Result<Self, InputError> {
        let points = match doc.orbit {
            OrbitSource::Points(p) => p,
            OrbitSource::Generate(g) => g.points()?,
        };
        Self::new(doc.map, points, doc.options)
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Self::from_doc(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn certificate(&self) -> LipschitzCertificate {
        self.map.lip_bound()
    }

    /// Round-trippable document with the orbit written out.
    pub fn to_doc(&self) -> InputDoc {
        InputDoc {
            map: self.map.clone(),
            orbit: OrbitSource::Points(self.orbit.points().to_vec()),
            options: self.options,
        }
    }
}

/// Pinned maps without explicit pins are pinned at the orbit.
fn fill_pins(map: MapSpec, orbit: &[Point2]) -> MapSpec {
    match map {
        MapSpec::Pinned {
            base,
            bumps,
            pins,
            pin_radius,
        } => MapSpec::Pinned {
            base: Box::new(fill_pins(*base, orbit)),
            bumps,
            pins: if pins.is_empty() {
                orbit.to_vec()
            } else {
                pins
            },
            pin_radius,
        },
        MapSpec::Composition(parts) => {
            MapSpec::Composition(parts.into_iter().map(|m| fill_pins(m, orbit)).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_star() {
        let p = Problem::from_json(
            r#"{"map": {"rotation": {"center": [0, 0], "angle": 0.966643893412244}},
                "orbit": {"generate": {"rotation_orbit": {"k": 2, "n": 13, "radius": 1.0}}}}"#,
        )
        .unwrap();
        assert_eq!(p.orbit.period(), 13);
        assert!(p.orbit.residual() < 1e-12);
        assert_eq!(p.options.tol, DEFAULT_TOL);
    }

    #[test]
    fn pins_default_to_orbit() {
        let p = Problem::from_json(
            r#"{"map": {"pinned": {"base": {"rotation": {"center": [0, 0], "angle": 0.5235987755982988}},
                 "bumps": [{"center": [0.1, 0.0], "radius": 0.3, "displacement": [0.01, 0.0]}],
                 "pin_radius": 0.2}},
                "orbit": {"generate": {"rotation_orbit": {"k": 1, "n": 12}}}}"#,
        )
        .unwrap();
        match &p.map {
            MapSpec::Pinned { pins, .. } => assert_eq!(pins.len(), 12),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(Problem::from_json("{"), Err(InputError::Parse(_))));
        assert!(matches!(
            Problem::from_json(
                r#"{"map": {"translation": {"v": [0, 0]}}, "orbit": {"generate": {"rotation_orbit": {"k": 2, "n": 4}}}}"#
            ),
            Err(InputError::Generator { .. })
        ));
        assert!(matches!(
            Problem::from_json(
                r#"{"map": {"rotation": {"center": [0, 0], "angle": 1.0}}, "orbit": {"points": [[1, 0], [0, 1]]}}"#
            ),
            Err(InputError::Orbit(_))
        ));
        assert!(matches!(
            Problem::from_json(
                r#"{"map": {"rotation": {"center": [0, 0], "angle": 3.141592653589793}},
                    "orbit": {"points": [[1, 0], [-1, 0]]}, "options": {"tol": -1}}"#
            ),
            Err(InputError::Option { name: "tol", .. })
        ));
    }
}
