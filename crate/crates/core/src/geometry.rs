//! Flat-ground geometry: node positions, sampling over disks and annuli,
//! and the few primitives the link budget needs.
//!
//! All lengths are meters. The origin is the disaster epicenter.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}

/// A position in meters. `z` is altitude above flat ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(GeometryError::InvalidGeometry(format!(
                "non-finite coordinate ({x}, {y}, {z})"
            )));
        }
        if z < 0.0 {
            return Err(GeometryError::InvalidGeometry(format!("negative altitude {z}")));
        }
        Ok(Point3 { x, y, z })
    }

    pub fn ground(x: f64, y: f64) -> Self {
        Point3 { x, y, z: 0.0 }
    }

    pub fn above_origin(altitude: f64) -> Self {
        Point3 { x: 0.0, y: 0.0, z: altitude }
    }

    /// Distance from the vertical axis through the origin.
    pub fn ground_range(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Circular region on the ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskRegion {
    center: Point3,
    radius: f64,
}

impl DiskRegion {
    pub fn new(center: Point3, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRegion(format!("disk radius must be > 0, got {radius}")));
        }
        if center.z != 0.0 {
            return Err(GeometryError::InvalidRegion("disk center must lie on the ground".into()));
        }
        Ok(DiskRegion { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self, GeometryError> {
        Self::new(Point3::ORIGIN, radius)
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.horizontal_distance(&self.center) <= self.radius
    }
}

/// `n` points i.i.d. uniform over the disk, all on the ground.
pub fn sample_uniform_disk<R: Rng + ?Sized>(rng: &mut R, region: &DiskRegion, n: usize) -> Vec<Point3> {
    let c = region.center();
    let r = region.radius();
    (0..n)
        .map(|_| {
            let rho = r * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point3::ground(c.x + rho * phi.cos(), c.y + rho * phi.sin())
        })
        .collect()
}

/// One point uniform on the ground annulus `inner < |p| <= outer` around the origin.
fn sample_annulus_point<R: Rng + ?Sized>(rng: &mut R, inner: f64, outer: f64) -> Point3 {
    let (a, b) = (inner * inner, outer * outer);
    loop {
        // 1 - u lies in (0, 1], which maps onto (inner, outer].
        let u = 1.0 - rng.random::<f64>();
        let rho = (a + u * (b - a)).sqrt().min(outer);
        if rho <= inner {
            continue;
        }
        let phi = 2.0 * PI * rng.random::<f64>();
        return Point3::ground(rho * phi.cos(), rho * phi.sin());
    }
}

/// How many functional TBSs a field holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FieldCount {
    /// Poisson with the annulus mean.
    #[default]
    Poisson,
    /// The annulus mean rounded to the nearest integer.
    Fixed,
}

/// Expected number of TBSs in the annulus `r_d < |p| <= r_s` for a density in nodes per km².
pub fn expected_tbs_count(r_d: f64, r_s: f64, density_per_km2: f64) -> f64 {
    let area_km2 = PI * (r_s * r_s - r_d * r_d) * 1e-6;
    density_per_km2 * area_km2
}

/// Functional TBSs surrounding a disaster disk of radius `r_d`, out to the simulation radius `r_s`.
///
/// Nodes inside the disk are nonfunctional, so only the annulus is populated.
pub fn sample_tbs_field<R: Rng + ?Sized>(
    rng: &mut R,
    r_d: f64,
    r_s: f64,
    density_per_km2: f64,
    count: FieldCount,
) -> Result<Vec<Point3>, GeometryError> {
    if !(r_d >= 0.0 && r_d.is_finite() && r_s.is_finite()) || r_s <= r_d {
        return Err(GeometryError::InvalidRegion(format!(
            "simulation radius {r_s} m must exceed disaster radius {r_d} m"
        )));
    }
    if !(density_per_km2 > 0.0 && density_per_km2.is_finite()) {
        return Err(GeometryError::InvalidRegion(format!(
            "TBS density must be > 0, got {density_per_km2}"
        )));
    }
    let mean = expected_tbs_count(r_d, r_s, density_per_km2);
    let n = match count {
        FieldCount::Poisson => {
            let dist = Poisson::new(mean).map_err(|e| GeometryError::InvalidRegion(e.to_string()))?;
            dist.sample(rng) as usize
        }
        FieldCount::Fixed => mean.round() as usize,
    };
    Ok((0..n).map(|_| sample_annulus_point(rng, r_d, r_s)).collect())
}

/// Elevation of `aerial` as seen from `ground`, in degrees.
pub fn elevation_angle(ground: &Point3, aerial: &Point3) -> Result<f64, GeometryError> {
    let dz = aerial.z - ground.z;
    if dz.is_nan() || dz <= 0.0 {
        return Err(GeometryError::InvalidGeometry(format!(
            "aerial endpoint (z = {}) must be above ground endpoint (z = {})",
            aerial.z, ground.z
        )));
    }
    let horizontal = ground.horizontal_distance(aerial);
    if horizontal == 0.0 {
        return Ok(90.0);
    }
    Ok(dz.atan2(horizontal).to_degrees())
}

pub fn distance3d(a: &Point3, b: &Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_disk_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = DiskRegion::centered(1000.0).unwrap();
        assert!(sample_uniform_disk(&mut rng, &d, 0).is_empty());
    }

    #[test]
    fn disk_radius_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = DiskRegion::centered(1000.0).unwrap();
        let pts = sample_uniform_disk(&mut rng, &d, 100_000);
        assert!(pts.iter().all(|p| d.contains(p) && p.z == 0.0));
        let mean = pts.iter().map(|p| p.ground_range()).sum::<f64>() / pts.len() as f64;
        assert_relative_eq!(mean, 2000.0 / 3.0, max_relative = 0.01);
        let inner = pts.iter().filter(|p| p.ground_range() <= 500.0).count() as f64 / pts.len() as f64;
        assert_relative_eq!(inner, 0.25, max_relative = 0.01);
    }

    #[test]
    fn disk_radial_cdf_ks() {
        // Two-sided KS against F(rho) = (rho / r)^2 at alpha = 0.01.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = 1000.0;
        let d = DiskRegion::centered(r).unwrap();
        let mut radii: Vec<f64> = sample_uniform_disk(&mut rng, &d, 100_000)
            .iter()
            .map(|p| p.ground_range())
            .collect();
        radii.sort_by(f64::total_cmp);
        let n = radii.len() as f64;
        let stat = radii
            .iter()
            .enumerate()
            .map(|(i, rho)| {
                let f = (rho / r).powi(2);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(stat < 1.628 / n.sqrt(), "KS statistic {stat}");
    }

    #[test]
    fn tbs_field_support_and_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut total = 0usize;
        let draws = 10_000;
        for _ in 0..draws {
            let pts = sample_tbs_field(&mut rng, 1000.0, 4000.0, 10.0, FieldCount::Poisson).unwrap();
            for p in &pts {
                let rho = p.ground_range();
                assert!(rho > 1000.0 && rho <= 4000.0, "rho = {rho}");
            }
            total += pts.len();
        }
        let expected = 10.0 * PI * 15.0;
        assert_relative_eq!(expected_tbs_count(1000.0, 4000.0, 10.0), 471.238_898, epsilon = 1e-5);
        assert_relative_eq!(total as f64 / draws as f64, expected, max_relative = 0.02);
    }

    #[test]
    fn tbs_field_large_disaster_mean() {
        assert_relative_eq!(expected_tbs_count(10_000.0, 13_000.0, 10.0), 10.0 * PI * 69.0, epsilon = 1e-9);
        assert_relative_eq!(expected_tbs_count(10_000.0, 13_000.0, 10.0), 2167.7, epsilon = 0.05);
    }

    #[test]
    fn tbs_field_fixed_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = sample_tbs_field(&mut rng, 1000.0, 4000.0, 10.0, FieldCount::Fixed).unwrap();
        assert_eq!(pts.len(), 471);
    }

    #[test]
    fn tbs_field_rejects_bad_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(matches!(
            sample_tbs_field(&mut rng, 4000.0, 4000.0, 10.0, FieldCount::Poisson),
            Err(GeometryError::InvalidRegion(_))
        ));
        assert!(sample_tbs_field(&mut rng, 1000.0, 4000.0, 0.0, FieldCount::Poisson).is_err());
    }

    #[test]
    fn elevation_examples() {
        let g = Point3::ORIGIN;
        assert_eq!(elevation_angle(&g, &Point3::above_origin(200.0)).unwrap(), 90.0);
        assert_relative_eq!(
            elevation_angle(&g, &Point3::new(200.0, 0.0, 200.0).unwrap()).unwrap(),
            45.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            elevation_angle(&g, &Point3::new(1000.0, 0.0, 200.0).unwrap()).unwrap(),
            11.309_932_474_020_213,
            epsilon = 1e-9
        );
        assert!(elevation_angle(&Point3::above_origin(5.0), &Point3::above_origin(5.0)).is_err());
    }

    #[test]
    fn elevation_decreases_with_range() {
        let aerial = Point3::above_origin(200.0);
        let mut last = 90.0;
        for i in 1..200 {
            let e = elevation_angle(&Point3::ground(i as f64 * 50.0, 0.0), &aerial).unwrap();
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance3d(&Point3::ORIGIN, &Point3::ORIGIN), 0.0);
        assert_eq!(distance3d(&Point3::ORIGIN, &Point3::ground(3.0, 4.0)), 5.0);
        assert_relative_eq!(
            distance3d(&Point3::ORIGIN, &Point3::new(300.0, 400.0, 1200.0).unwrap()),
            1300.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn point_invariants() {
        assert!(Point3::new(0.0, 0.0, -1.0).is_err());
        assert!(Point3::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(DiskRegion::centered(0.0).is_err());
    }
}
