//! Region geometry: unions of lat/lon boxes and simple polygons.
//!
//! Containment is inclusive: a point on a box edge or polygon edge is inside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    pub fn contains(&self, p: GeoPoint) -> bool {
        self.min_lat <= p.lat && p.lat <= self.max_lat && self.min_lon <= p.lon && p.lon <= self.max_lon
    }

    pub fn intersects(&self, other: &BoundingBox) -> bool {
        self.min_lat <= other.max_lat
            && other.min_lat <= self.max_lat
            && self.min_lon <= other.max_lon
            && other.min_lon <= self.max_lon
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            min_lat: self.min_lat.min(other.min_lat),
            min_lon: self.min_lon.min(other.min_lon),
            max_lat: self.max_lat.max(other.max_lat),
            max_lon: self.max_lon.max(other.max_lon),
        }
    }

    pub(crate) fn validate(&self, field: &str) -> Result<()> {
        let finite = [self.min_lat, self.min_lon, self.max_lat, self.max_lon].iter().all(|v| v.is_finite());
        if !finite || self.min_lat > self.max_lat || self.min_lon > self.max_lon {
            return Err(Error::config(field, "box must have finite min <= max"));
        }
        if self.min_lat < -90.0 || self.max_lat > 90.0 || self.min_lon < -180.0 || self.max_lon > 180.0 {
            return Err(Error::config(field, "box outside WGS84 range"));
        }
        Ok(())
    }
}

/// Closed ring of `[lat, lon]` vertices. The closing edge is implicit; a
/// repeated first vertex at the end is tolerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub ring: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(ring: Vec<[f64; 2]>) -> Self {
        Self { ring }
    }

    fn vertices(&self) -> &[[f64; 2]] {
        match (self.ring.first(), self.ring.last()) {
            (Some(a), Some(b)) if self.ring.len() > 1 && a == b => &self.ring[..self.ring.len() - 1],
            _ => &self.ring,
        }
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let v = self.vertices();
        (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let v = self.vertices();
        let mut bb = BoundingBox {
            min_lat: f64::INFINITY,
            min_lon: f64::INFINITY,
            max_lat: f64::NEG_INFINITY,
            max_lon: f64::NEG_INFINITY,
        };
        for &[lat, lon] in v {
            bb.min_lat = bb.min_lat.min(lat);
            bb.max_lat = bb.max_lat.max(lat);
            bb.min_lon = bb.min_lon.min(lon);
            bb.max_lon = bb.max_lon.max(lon);
        }
        bb
    }

    /// Even-odd ray casting along +lon, with an explicit boundary check first.
    pub fn contains(&self, p: GeoPoint) -> bool {
        let (y, x) = (p.lat, p.lon);
        let mut inside = false;
        for (a, b) in self.edges() {
            if on_segment(a, b, [y, x]) {
                return true;
            }
            let (ay, ax) = (a[0], a[1]);
            let (by, bx) = (b[0], b[1]);
            if (ay > y) != (by > y) {
                let cross_x = ax + (y - ay) * (bx - ax) / (by - ay);
                if x < cross_x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub(crate) fn validate(&self, field: &str) -> Result<()> {
        let v = self.vertices();
        for (i, &[lat, lon]) in v.iter().enumerate() {
            if !lat.is_finite()
                || !lon.is_finite()
                || !(-90.0..=90.0).contains(&lat)
                || !(-180.0..=180.0).contains(&lon)
            {
                return Err(Error::config(format!("{field}[{i}]"), "vertex outside WGS84 range"));
            }
        }
        let mut distinct: Vec<[f64; 2]> = Vec::new();
        for p in v {
            if !distinct.contains(p) {
                distinct.push(*p);
            }
        }
        if distinct.len() < 3 {
            return Err(Error::config(field, "polygon ring needs at least 3 distinct vertices"));
        }
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return Err(Error::config(field, format!("polygon edges {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    let scale = (b[0] - a[0]).abs().max((b[1] - a[1]).abs()).max(1.0);
    orient(a, b, p).abs() <= 1e-12 * scale
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(c, d, a) || on_segment(c, d, b) || on_segment(a, b, c) || on_segment(a, b, d)
}

/// Named area of interest; a point is inside if any element contains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    #[serde(default)]
    pub boxes: Vec<BoundingBox>,
    #[serde(default)]
    pub polygons: Vec<Polygon>,
}

impl RegionSpec {
    pub fn contains(&self, p: GeoPoint) -> bool {
        self.boxes.iter().any(|b| b.contains(p)) || self.polygons.iter().any(|poly| poly.contains(p))
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        self.boxes.iter().copied().chain(self.polygons.iter().map(Polygon::bounding_box)).reduce(|a, b| a.union(&b))
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("region")
    }

    pub(crate) fn validate_at(&self, field: &str) -> Result<()> {
        if self.boxes.is_empty() && self.polygons.is_empty() {
            return Err(Error::config(field, "region needs at least one box or polygon"));
        }
        for (i, b) in self.boxes.iter().enumerate() {
            b.validate(&format!("{field}.boxes[{i}]"))?;
        }
        for (i, p) in self.polygons.iter().enumerate() {
            p.validate(&format!("{field}.polygons[{i}]"))?;
        }
        Ok(())
    }
}
