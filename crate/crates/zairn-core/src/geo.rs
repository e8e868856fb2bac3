//! Fixed-point proximity predicate and spherical reference geometry.
//!
//! Coordinates are integer microdegrees (1e-6 degree). The on-circuit
//! predicate works entirely in integers: squared distance in microdegree
//! units with the longitude axis compressed by a pre-scaled cosine of the
//! target latitude. The spherical haversine distance serves as the
//! independent ground truth when measuring how far the integer predicate's
//! accept/reject boundary lands from the nominal radius.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Meters per degree of latitude used to size the fixed-point radius
/// (mean-circumference convention, not the sphere-radius degree length).
pub const M_PER_DEG: f64 = 111_319.49;

/// Sphere radius for the haversine ground truth, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Scale factor applied to the cosine of the target latitude.
pub const COS_SCALE: u64 = 1_000_000;

/// Maximum offset distance accepted by [`offset_point`], in meters.
/// Beyond this the flat-earth inverse stops being a faithful model.
pub const MAX_OFFSET_M: f64 = 10_000.0;

/// Latitudes (microdegrees) covered by [`accuracy_sweep`].
pub const SWEEP_LATITUDES_UDEG: [i64; 8] = [
    0,
    15_000_000,
    30_000_000,
    35_660_000,
    45_000_000,
    60_000_000,
    75_000_000,
    85_000_000,
];

/// Radii (meters) covered by [`accuracy_sweep`].
pub const SWEEP_RADII_M: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 500.0];

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("latitude {0} udeg outside [-90e6, 90e6]")]
    LatitudeOutOfRange(i64),
    #[error("longitude {0} udeg outside [-180e6, 180e6]")]
    LongitudeOutOfRange(i64),
    #[error("east/west offset undefined within 1 degree of a pole (lat {0} udeg)")]
    PoleAdjacent(i64),
    #[error("offset distance {0} m outside (0, {MAX_OFFSET_M}) small-offset regime")]
    OffsetOutOfRange(f64),
    #[error("radius {0} m must be positive and below {MAX_OFFSET_M}")]
    RadiusOutOfRange(f64),
}

/// A position in integer microdegrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat_udeg: i64,
    pub lon_udeg: i64,
}

impl GeoPoint {
    pub fn new(lat_udeg: i64, lon_udeg: i64) -> Result<Self, GeoError> {
        if lat_udeg.abs() > 90_000_000 {
            return Err(GeoError::LatitudeOutOfRange(lat_udeg));
        }
        if lon_udeg.abs() > 180_000_000 {
            return Err(GeoError::LongitudeOutOfRange(lon_udeg));
        }
        Ok(Self { lat_udeg, lon_udeg })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_udeg as f64 / 1e6
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_udeg as f64 / 1e6
    }
}

/// A non-negative ground distance in meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Meters(pub f64);

/// Frozen public parameters of one geofence: target point, squared radius
/// in microdegree units, and the pre-scaled cosine of the target latitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoParams {
    pub target: GeoPoint,
    pub r2_udeg2: u64,
    pub cos_scaled: u32,
}

impl GeoParams {
    pub fn new(target: GeoPoint, radius_m: f64) -> Result<Self, GeoError> {
        if !(radius_m > 0.0 && radius_m < MAX_OFFSET_M) {
            return Err(GeoError::RadiusOutOfRange(radius_m));
        }
        let r_udeg = (radius_m * 1e6 / M_PER_DEG).round() as u64;
        Ok(Self {
            target,
            r2_udeg2: r_udeg * r_udeg,
            cos_scaled: cos_scaled(target.lat_udeg)?,
        })
    }
}

/// `round(cos(lat) * 1e6)` for a latitude given in microdegrees.
pub fn cos_scaled(lat_udeg: i64) -> Result<u32, GeoError> {
    if lat_udeg.abs() > 90_000_000 {
        return Err(GeoError::LatitudeOutOfRange(lat_udeg));
    }
    let c = (lat_udeg as f64 / 1e6).to_radians().cos();
    Ok((c * COS_SCALE as f64).round() as u32)
}

/// Integer squared distance from `point` to the target, in microdegree
/// units: `dlat^2 + floor(dlon * cos_scaled / 1e6)^2`. Exact integer
/// arithmetic; no overflow for any pair of valid points.
pub fn fixed_distance_sq(point: GeoPoint, params: &GeoParams) -> u128 {
    let dlat = point.lat_udeg.abs_diff(params.target.lat_udeg) as u128;
    let dlon = point.lon_udeg.abs_diff(params.target.lon_udeg) as u128;
    let adj = dlon * params.cos_scaled as u128 / COS_SCALE as u128;
    dlat * dlat + adj * adj
}

/// The on-circuit accept predicate: squared fixed-point distance within
/// the squared radius.
pub fn within_radius(point: GeoPoint, params: &GeoParams) -> bool {
    fixed_distance_sq(point, params) <= params.r2_udeg2 as u128
}

/// Great-circle distance on the reference sphere.
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> Meters {
    let la1 = a.lat_deg().to_radians();
    let la2 = b.lat_deg().to_radians();
    let dlat = (b.lat_deg() - a.lat_deg()).to_radians();
    let dlon = (b.lon_deg() - a.lon_deg()).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + la1.cos() * la2.cos() * (dlon / 2.0).sin().powi(2);
    Meters(2.0 * EARTH_RADIUS_M * h.sqrt().asin())
}

/// Cardinal bearing for [`offset_point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bearing {
    North,
    East,
    South,
    West,
}

impl Bearing {
    pub const ALL: [Bearing; 4] = [Bearing::North, Bearing::East, Bearing::South, Bearing::West];

    pub fn degrees(self) -> f64 {
        match self {
            Bearing::North => 0.0,
            Bearing::East => 90.0,
            Bearing::South => 180.0,
            Bearing::West => 270.0,
        }
    }
}

/// Move `distance_m` along a cardinal bearing using the equirectangular
/// inverse, rounding to the nearest microdegree. East/west offsets are
/// undefined within one degree of a pole.
pub fn offset_point(origin: GeoPoint, bearing: Bearing, distance_m: f64) -> Result<GeoPoint, GeoError> {
    offset_point_bearing_deg(origin, bearing.degrees(), distance_m)
}

fn offset_point_bearing_deg(origin: GeoPoint, bearing_deg: f64, distance_m: f64) -> Result<GeoPoint, GeoError> {
    if !(0.0..MAX_OFFSET_M).contains(&distance_m) {
        return Err(GeoError::OffsetOutOfRange(distance_m));
    }
    let theta = bearing_deg.to_radians();
    let east_component = distance_m * theta.sin();
    if east_component.abs() > 1e-9 && origin.lat_udeg.abs() > 89_000_000 {
        return Err(GeoError::PoleAdjacent(origin.lat_udeg));
    }
    let dlat_deg = distance_m * theta.cos() / M_PER_DEG;
    let dlon_deg = if east_component.abs() > 1e-9 {
        east_component / (M_PER_DEG * origin.lat_deg().to_radians().cos())
    } else {
        0.0
    };
    GeoPoint::new(
        origin.lat_udeg + (dlat_deg * 1e6).round() as i64,
        origin.lon_udeg + (dlon_deg * 1e6).round() as i64,
    )
}

/// One cell of the predicate-accuracy table: worst absolute deviation of
/// the accept/reject flip distance from the nominal radius over eight
/// compass directions.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyCell {
    pub lat_udeg: i64,
    pub radius_m: f64,
    pub max_error: Meters,
}

/// Bisect the predicate's accept/reject boundary along eight compass
/// directions for every sweep latitude and radius. The flip distance is
/// the haversine midpoint between the last accepted and first rejected
/// quantized point; each cell reports the worst `|flip - r|`.
pub fn accuracy_sweep() -> Vec<AccuracyCell> {
    let mut cells = Vec::new();
    for &lat in &SWEEP_LATITUDES_UDEG {
        let site = GeoPoint::new(lat, 10_000_000).expect("sweep latitude in range");
        for &radius in &SWEEP_RADII_M {
            let params = GeoParams::new(site, radius).expect("sweep radius in range");
            let mut worst = 0.0f64;
            for dir in 0..8 {
                let bearing = dir as f64 * 45.0;
                let mut lo = radius * 0.5;
                let mut hi = radius * 1.5;
                let probe = |d: f64| {
                    let p = offset_point_bearing_deg(site, bearing, d).expect("sweep offset in range");
                    within_radius(p, &params)
                };
                assert!(probe(lo), "inner bracket must accept");
                assert!(!probe(hi), "outer bracket must reject");
                while hi - lo > 1e-4 {
                    let mid = 0.5 * (lo + hi);
                    if probe(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let d_lo = haversine_m(site, offset_point_bearing_deg(site, bearing, lo).unwrap()).0;
                let d_hi = haversine_m(site, offset_point_bearing_deg(site, bearing, hi).unwrap()).0;
                let flip = 0.5 * (d_lo + d_hi);
                worst = worst.max((flip - radius).abs());
            }
            cells.push(AccuracyCell {
                lat_udeg: lat,
                radius_m: radius,
                max_error: Meters(worst),
            });
        }
    }
    cells
}
