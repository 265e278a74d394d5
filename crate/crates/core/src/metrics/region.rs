use serde::{Deserialize, Serialize};

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// A plane domain with an exact boundary-distance oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    WholePlane,
    /// `|z| > radius`
    ExteriorOfRadius(f64),
    /// `Re z > offset`
    RightHalfPlane(f64),
    UnitDisc,
    /// The plane with finitely many closed discs removed.
    ComplementOfDiscs(Vec<Disc>),
}

impl Region {
    /// `ℂ \ {0}`, the natural home of the cylindrical metric.
    pub fn punctured_plane() -> Self {
        Region::ComplementOfDiscs(vec![Disc::new(C64::new(0.0, 0.0), 0.0)])
    }

    /// Euclidean distance from `z` to the boundary; negative outside the closure.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        match self {
            Region::WholePlane => f64::INFINITY,
            Region::ExteriorOfRadius(r) => z.norm() - r,
            Region::RightHalfPlane(a) => z.re - a,
            Region::UnitDisc => 1.0 - z.norm(),
            Region::ComplementOfDiscs(discs) => discs
                .iter()
                .map(|d| (z - d.center).norm() - d.radius)
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        self.boundary_distance(z) > 0.0
    }

    /// `z` itself if interior; otherwise, if `z` is within `eps` of the region,
    /// `z` pushed a distance `eps` inside along the boundary normal.
    pub fn nudge_inside(&self, z: C64, eps: f64) -> Option<C64> {
        let d = self.boundary_distance(z);
        if d > 0.0 {
            return Some(z);
        }
        if d < -eps {
            return None;
        }
        let push = eps - d;
        let moved = match self {
            Region::WholePlane => z,
            Region::RightHalfPlane(_) => z + push,
            Region::ExteriorOfRadius(_) if z.norm() > 0.0 => z * (1.0 + push / z.norm()),
            Region::UnitDisc if z.norm() > 0.0 => z * (1.0 - push / z.norm()),
            Region::ComplementOfDiscs(discs) => {
                let nearest = discs.iter().min_by(|a, b| {
                    let da = (z - a.center).norm() - a.radius;
                    let db = (z - b.center).norm() - b.radius;
                    da.total_cmp(&db)
                })?;
                let off = z - nearest.center;
                if off.norm() == 0.0 {
                    return None;
                }
                z + off / off.norm() * push
            }
            _ => return None,
        };
        self.contains(moved).then_some(moved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_distances_match_formulas() {
        let z = C64::new(3.0, 4.0);
        assert_eq!(Region::ExteriorOfRadius(2.0).boundary_distance(z), 3.0);
        assert_eq!(Region::RightHalfPlane(1.0).boundary_distance(z), 2.0);
        assert_eq!(Region::UnitDisc.boundary_distance(C64::new(0.6, 0.0)), 0.4);
        let holes = Region::ComplementOfDiscs(vec![
            Disc::new(C64::new(0.0, 0.0), 1.0),
            Disc::new(C64::new(3.0, 0.0), 0.5),
        ]);
        assert!((holes.boundary_distance(z) - 3.5).abs() < 1e-15);
        assert!(!holes.contains(C64::new(3.2, 0.0)));
        assert!(Region::WholePlane.contains(z));
        assert!(!Region::punctured_plane().contains(C64::new(0.0, 0.0)));
        assert!(Region::punctured_plane().contains(C64::new(1e-300, 0.0)));
    }

    #[test]
    fn nudging_moves_boundary_points_inside() {
        let h = Region::RightHalfPlane(0.0);
        let z = C64::new(0.0, 6.0);
        let moved = h.nudge_inside(z, 1e-3).unwrap();
        assert!((moved - C64::new(1e-3, 6.0)).norm() < 1e-15);
        assert_eq!(h.nudge_inside(C64::new(-1.0, 0.0), 1e-3), None);
        let ext = Region::ExteriorOfRadius(2.0);
        let moved = ext.nudge_inside(C64::new(0.0, 2.0), 1e-3).unwrap();
        assert!(ext.contains(moved));
    }
}
