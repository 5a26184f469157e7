//! Road-network point sampling and image request planning.
//!
//! Points are placed along every edge at fixed arc-length intervals
//! starting from a seeded random offset, thinned to a maximum count by
//! a seeded Fisher-Yates selection, filtered by image availability, and
//! expanded into four requests per point (headings 0/90/180/270).

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::client::{ImageMetadata, MetadataClient};
use crate::error::{Error, Result};
use crate::geo::{self, LatLon};

pub use crate::geo::haversine;

/// The four compass headings requested per sample point.
pub const HEADINGS: [u16; 4] = [0, 90, 180, 270];

/// Default field of view in degrees; four headings tile 360°.
pub const DEFAULT_FOV: u16 = 90;

/// Default image edge in pixels.
pub const DEFAULT_IMAGE_SIZE: u32 = 640;

/// One road edge: an identifier plus its WGS84 polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub id: String,
    pub polyline: Vec<LatLon>,
}

impl RoadEdge {
    pub fn length_m(&self) -> f64 {
        geo::polyline_length(&self.polyline)
    }
}

/// A road network as a list of edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    pub edges: Vec<RoadEdge>,
}

impl RoadNetwork {
    pub fn new(edges: Vec<RoadEdge>) -> Result<Self> {
        for edge in &edges {
            if edge.polyline.len() < 2 {
                return Err(Error::BadNetwork(format!(
                    "edge `{}` has fewer than 2 vertices",
                    edge.id
                )));
            }
            if !(edge.length_m() > 0.0) {
                return Err(Error::BadNetwork(format!("edge `{}` has zero length", edge.id)));
            }
        }
        Ok(RoadNetwork { edges })
    }

    /// Parse GeoJSON-style line features carrying an `edge_id` property.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let mut edges = Vec::new();
        collect_line_features(&value, &mut edges, &path_str)?;
        if edges.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        RoadNetwork::new(edges)
    }

    pub fn total_length_m(&self) -> f64 {
        self.edges.iter().map(RoadEdge::length_m).sum()
    }
}

fn collect_line_features(
    value: &serde_json::Value,
    edges: &mut Vec<RoadEdge>,
    path: &str,
) -> Result<()> {
    match value.get("type").and_then(|t| t.as_str()) {
        Some("FeatureCollection") => {
            for feature in value
                .get("features")
                .and_then(|f| f.as_array())
                .into_iter()
                .flatten()
            {
                collect_line_features(feature, edges, path)?;
            }
            Ok(())
        }
        Some("Feature") => {
            let geometry = value.get("geometry").unwrap_or(&serde_json::Value::Null);
            if geometry.get("type").and_then(|t| t.as_str()) != Some("LineString") {
                return Ok(()); // skip non-line features
            }
            let id = value
                .get("properties")
                .and_then(|p| p.get("edge_id"))
                .map(|v| match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .ok_or_else(|| {
                    Error::BadNetwork(format!("{path}: line feature missing edge_id property"))
                })?;
            let polyline = geometry
                .get("coordinates")
                .and_then(|c| c.as_array())
                .map(|vs| {
                    vs.iter()
                        .filter_map(|v| {
                            let pair = v.as_array()?;
                            Some(LatLon::new(pair.get(1)?.as_f64()?, pair.first()?.as_f64()?))
                        })
                        .collect::<Vec<_>>()
                })
                .unwrap_or_default();
            edges.push(RoadEdge { id, polyline });
            Ok(())
        }
        _ => Ok(()),
    }
}

/// A sampled location on the road network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub point_id: String,
    pub lat: f64,
    pub lon: f64,
    pub edge_id: String,
    pub offset_m: f64,
}

impl SamplePoint {
    pub fn location(&self) -> LatLon {
        LatLon::new(self.lat, self.lon)
    }
}

/// A planned street-view image request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRequest {
    pub point_id: String,
    pub lat: f64,
    pub lon: f64,
    pub heading: u16,
    pub fov: u16,
    pub pitch: i16,
    pub width: u32,
    pub height: u32,
}

/// Sample points along every edge at `spacing_m` intervals.
///
/// Each edge gets points at `u, u + s, u + 2s, …` for a seeded random
/// offset `u ∈ [0, s)`, strictly before the edge end; edges shorter
/// than the spacing get a single midpoint. When more than `max_points`
/// candidates exist, a seeded Fisher-Yates selection keeps exactly
/// `max_points` of them in network order. Deterministic for a fixed
/// `(network, spacing_m, seed)`.
pub fn sample_points(
    network: &RoadNetwork,
    spacing_m: f64,
    max_points: usize,
    seed: u64,
) -> Result<Vec<SamplePoint>> {
    if !(20.0..=100.0).contains(&spacing_m) {
        return Err(Error::BadSpacing(spacing_m));
    }
    if network.edges.is_empty() {
        return Err(Error::EmptyNetwork);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = Vec::new();
    for edge in &network.edges {
        let length = edge.length_m();
        let offsets: Vec<f64> = if length < spacing_m {
            vec![length / 2.0]
        } else {
            let start: f64 = rng.gen_range(0.0..spacing_m);
            let mut offs = Vec::new();
            let mut k = 0u32;
            loop {
                let off = start + f64::from(k) * spacing_m;
                if off >= length {
                    break;
                }
                offs.push(off);
                k += 1;
            }
            offs
        };
        for (ordinal, offset_m) in offsets.into_iter().enumerate() {
            let at = geo::point_along_polyline(&edge.polyline, offset_m);
            candidates.push(SamplePoint {
                point_id: format!("{}-{}", edge.id, ordinal),
                lat: at.lat,
                lon: at.lon,
                edge_id: edge.id.clone(),
                offset_m,
            });
        }
    }

    if candidates.len() <= max_points {
        return Ok(candidates);
    }

    // partial Fisher-Yates over indices, then restore network order
    let mut indices: Vec<usize> = (0..candidates.len()).collect();
    for i in 0..max_points {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut keep = indices[..max_points].to_vec();
    keep.sort_unstable();
    let keep_set: std::collections::HashSet<usize> = keep.into_iter().collect();
    Ok(candidates
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| keep_set.contains(&i).then_some(p))
        .collect())
}

/// Keep the points whose street-view metadata reports an image,
/// preserving input order. Lookups run concurrently; results merge
/// back in input order.
pub fn filter_by_availability<C: MetadataClient>(
    points: &[SamplePoint],
    client: &C,
) -> Result<(Vec<SamplePoint>, Vec<ImageMetadata>)> {
    let metadata: Vec<ImageMetadata> = points
        .par_iter()
        .map(|p| client.lookup(&p.point_id, p.location()))
        .collect::<Result<_>>()?;
    let kept = points
        .iter()
        .zip(&metadata)
        .filter(|(_, m)| m.available)
        .map(|(p, _)| p.clone())
        .collect();
    Ok((kept, metadata))
}

/// Expand points into four image requests each, one per heading.
pub fn plan_requests(points: &[SamplePoint]) -> Vec<ImageRequest> {
    points
        .iter()
        .flat_map(|p| {
            HEADINGS.iter().map(|&heading| ImageRequest {
                point_id: p.point_id.clone(),
                lat: p.lat,
                lon: p.lon,
                heading,
                fov: DEFAULT_FOV,
                pitch: 0,
                width: DEFAULT_IMAGE_SIZE,
                height: DEFAULT_IMAGE_SIZE,
            })
        })
        .collect()
}

/// Request plan as CSV `point_id,lat,lon,heading,fov,pitch,width,height`.
pub fn request_plan_csv(requests: &[ImageRequest]) -> String {
    let mut out = String::from("point_id,lat,lon,heading,fov,pitch,width,height\n");
    for r in requests {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.point_id, r.lat, r.lon, r.heading, r.fov, r.pitch, r.width, r.height
        ));
    }
    out
}

/// Sample points as CSV `point_id,lat,lon,edge_id,offset_m`.
pub fn points_csv(points: &[SamplePoint]) -> String {
    let mut out = String::from("point_id,lat,lon,edge_id,offset_m\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.point_id, p.lat, p.lon, p.edge_id, p.offset_m
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::FixtureClient;
    use approx::assert_relative_eq;

    /// Straight east-west edge of roughly `length_m` metres on the equator.
    fn straight_edge(id: &str, lat: f64, length_m: f64) -> RoadEdge {
        let dlon = length_m / (geo::EARTH_RADIUS_M * 1.0_f64.to_radians());
        RoadEdge {
            id: id.to_string(),
            polyline: vec![LatLon::new(lat, 0.0), LatLon::new(lat, dlon)],
        }
    }

    #[test]
    fn placement_at_fixed_intervals() {
        // a 100 m edge with spacing 20 gets 5 points; offsets differ by 20
        let network = RoadNetwork::new(vec![straight_edge("e1", 0.0, 100.0)]).unwrap();
        let points = sample_points(&network, 20.0, 2000, 1).unwrap();
        assert_eq!(points.len(), 5);
        for pair in points.windows(2) {
            assert_relative_eq!(pair[1].offset_m - pair[0].offset_m, 20.0, epsilon = 1e-9);
        }
        // arc separation matches the offset separation on a straight edge
        for pair in points.windows(2) {
            let d = haversine(pair[0].location(), pair[1].location());
            assert_relative_eq!(d, 20.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn short_edge_gets_midpoint() {
        let network = RoadNetwork::new(vec![straight_edge("stub", 0.0, 12.0)]).unwrap();
        let points = sample_points(&network, 20.0, 2000, 1).unwrap();
        assert_eq!(points.len(), 1);
        assert_relative_eq!(points[0].offset_m, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn subsample_draws_from_candidates() {
        // 10 km of edges at 20 m spacing -> ~500 candidates
        let edges: Vec<RoadEdge> = (0..10)
            .map(|i| straight_edge(&format!("e{i}"), 0.01 * i as f64, 1000.0))
            .collect();
        let network = RoadNetwork::new(edges).unwrap();
        let all = sample_points(&network, 20.0, usize::MAX, 9).unwrap();
        assert_eq!(all.len(), 500);
        let sub = sample_points(&network, 20.0, 100, 9).unwrap();
        assert_eq!(sub.len(), 100);
        // every selected point is one of the candidates
        for p in &sub {
            assert!(all.contains(p), "{} not in candidate set", p.point_id);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let edges: Vec<RoadEdge> = (0..5)
            .map(|i| straight_edge(&format!("e{i}"), 0.01 * i as f64, 700.0))
            .collect();
        let network = RoadNetwork::new(edges).unwrap();
        let a = sample_points(&network, 35.0, 50, 42).unwrap();
        let b = sample_points(&network, 35.0, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_points(&network, 35.0, 50, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn spacing_outside_range_rejected() {
        let network = RoadNetwork::new(vec![straight_edge("e", 0.0, 500.0)]).unwrap();
        assert!(matches!(
            sample_points(&network, 10.0, 100, 1),
            Err(Error::BadSpacing(_))
        ));
        assert!(matches!(
            sample_points(&network, 150.0, 100, 1),
            Err(Error::BadSpacing(_))
        ));
    }

    #[test]
    fn empty_network_rejected() {
        let network = RoadNetwork { edges: vec![] };
        assert!(matches!(
            sample_points(&network, 50.0, 100, 1),
            Err(Error::EmptyNetwork)
        ));
    }

    #[test]
    fn plan_requests_is_four_per_point() {
        let network = RoadNetwork::new(vec![straight_edge("e", 0.0, 300.0)]).unwrap();
        let points = sample_points(&network, 50.0, 2000, 3).unwrap();
        let requests = plan_requests(&points);
        assert_eq!(requests.len(), 4 * points.len());
        for chunk in requests.chunks(4) {
            let headings: Vec<u16> = chunk.iter().map(|r| r.heading).collect();
            assert_eq!(headings, vec![0, 90, 180, 270]);
            assert!(chunk.iter().all(|r| r.fov == 90
                && r.pitch == 0
                && r.width == 640
                && r.height == 640));
        }
        assert!(plan_requests(&[]).is_empty());
    }

    #[test]
    fn availability_filter_keeps_order() {
        let points: Vec<SamplePoint> = (0..5)
            .map(|i| SamplePoint {
                point_id: format!("p{i}"),
                lat: 0.0,
                lon: 0.001 * i as f64,
                edge_id: "e".into(),
                offset_m: i as f64,
            })
            .collect();
        let client = FixtureClient::new((0..5).map(|i| ImageMetadata {
            point_id: format!("p{i}"),
            available: i != 1 && i != 3,
            capture_year: (i != 1 && i != 3).then_some(2020),
            capture_month: None,
        }));
        let (kept, metadata) = filter_by_availability(&points, &client).unwrap();
        assert_eq!(metadata.len(), 5);
        let ids: Vec<&str> = kept.iter().map(|p| p.point_id.as_str()).collect();
        assert_eq!(ids, vec!["p0", "p2", "p4"]);

        // none available -> empty, metadata retained
        let none = FixtureClient::new(
            (0..5).map(|i| ImageMetadata::unavailable(format!("p{i}"))),
        );
        let (kept, metadata) = filter_by_availability(&points, &none).unwrap();
        assert!(kept.is_empty());
        assert_eq!(metadata.len(), 5);
    }

    #[test]
    fn missing_fixture_point_is_an_error() {
        let points = vec![SamplePoint {
            point_id: "mystery".into(),
            lat: 0.0,
            lon: 0.0,
            edge_id: "e".into(),
            offset_m: 0.0,
        }];
        let client = FixtureClient::new([]);
        assert!(filter_by_availability(&points, &client).is_err());
    }

    #[test]
    fn network_load_reads_line_features() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            r#"{{"type":"FeatureCollection","features":[
                {{"type":"Feature","properties":{{"edge_id":"a"}},
                  "geometry":{{"type":"LineString","coordinates":[[0.0,0.0],[0.001,0.0]]}}}},
                {{"type":"Feature","properties":{{"edge_id":7}},
                  "geometry":{{"type":"LineString","coordinates":[[0.0,0.001],[0.001,0.001]]}}}}
            ]}}"#
        )
        .unwrap();
        let network = RoadNetwork::load(f.path()).unwrap();
        assert_eq!(network.edges.len(), 2);
        assert_eq!(network.edges[0].id, "a");
        assert_eq!(network.edges[1].id, "7");
        assert!(network.total_length_m() > 200.0);
    }
}
