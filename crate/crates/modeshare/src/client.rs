//! Pluggable street-view metadata clients.
//!
//! The sampler only needs to know whether an image exists at a point
//! and when it was captured. The offline [`FixtureClient`] reads that
//! from a CSV fixture; the live client (behind the `live-client`
//! feature) asks the street-view metadata HTTP endpoint, authenticated
//! with the `SV_API_KEY` environment variable.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;

/// Availability and capture date for one sample point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageMetadata {
    pub point_id: String,
    pub available: bool,
    pub capture_year: Option<i32>,
    pub capture_month: Option<u8>,
}

impl ImageMetadata {
    pub fn unavailable(point_id: impl Into<String>) -> Self {
        ImageMetadata {
            point_id: point_id.into(),
            available: false,
            capture_year: None,
            capture_month: None,
        }
    }
}

/// Answers metadata lookups for sample points. Implementations must
/// tolerate concurrent calls.
pub trait MetadataClient: Sync {
    fn lookup(&self, point_id: &str, location: LatLon) -> Result<ImageMetadata>;
}

/// Offline client backed by a fixture CSV
/// `point_id,available,capture_year,capture_month`.
#[derive(Debug, Clone, Default)]
pub struct FixtureClient {
    entries: HashMap<String, ImageMetadata>,
}

impl FixtureClient {
    pub fn new(entries: impl IntoIterator<Item = ImageMetadata>) -> Self {
        FixtureClient {
            entries: entries
                .into_iter()
                .map(|m| (m.point_id.clone(), m))
                .collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path.as_ref())
            .map_err(|e| Error::io(&path_str, std::io::Error::other(e)))?;
        let mut entries = Vec::new();
        for row in reader.deserialize::<FixtureRow>() {
            let row = row?;
            let meta = ImageMetadata {
                point_id: row.point_id,
                available: row.available,
                capture_year: row.capture_year,
                capture_month: row.capture_month,
            };
            if !meta.available && (meta.capture_year.is_some() || meta.capture_month.is_some()) {
                return Err(Error::Other(format!(
                    "{path_str}: point `{}` is unavailable but carries capture dates",
                    meta.point_id
                )));
            }
            entries.push(meta);
        }
        Ok(FixtureClient::new(entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Deserialize)]
struct FixtureRow {
    point_id: String,
    available: bool,
    capture_year: Option<i32>,
    capture_month: Option<u8>,
}

impl MetadataClient for FixtureClient {
    fn lookup(&self, point_id: &str, _location: LatLon) -> Result<ImageMetadata> {
        self.entries
            .get(point_id)
            .cloned()
            .ok_or_else(|| Error::UnknownPoint {
                point_id: point_id.to_string(),
            })
    }
}

/// Query URL for the street-view metadata endpoint.
pub fn metadata_url(base: &str, location: LatLon, key: &str) -> String {
    format!(
        "{base}?location={:.7},{:.7}&key={key}",
        location.lat, location.lon
    )
}

#[cfg(feature = "live-client")]
pub use live::LiveClient;

#[cfg(feature = "live-client")]
mod live {
    use super::*;

    const METADATA_ENDPOINT: &str = "https://maps.googleapis.com/maps/api/streetview/metadata";

    /// Client for the live street-view metadata endpoint. Reads the API
    /// key from the `SV_API_KEY` environment variable.
    pub struct LiveClient {
        key: String,
        http: reqwest::blocking::Client,
    }

    impl LiveClient {
        pub fn from_env() -> Result<Self> {
            let key = std::env::var("SV_API_KEY").map_err(|_| {
                Error::Other("SV_API_KEY environment variable is not set".into())
            })?;
            Ok(LiveClient {
                key,
                http: reqwest::blocking::Client::new(),
            })
        }
    }

    #[derive(Deserialize)]
    struct MetadataResponse {
        status: String,
        date: Option<String>,
    }

    impl MetadataClient for LiveClient {
        fn lookup(&self, point_id: &str, location: LatLon) -> Result<ImageMetadata> {
            let url = metadata_url(METADATA_ENDPOINT, location, &self.key);
            let failure = |message: String| Error::ClientFailure {
                point_id: point_id.to_string(),
                message,
            };
            let response = self
                .http
                .get(&url)
                .send()
                .map_err(|e| failure(e.to_string()))?;
            let body: MetadataResponse = response.json().map_err(|e| failure(e.to_string()))?;
            if body.status != "OK" {
                return Ok(ImageMetadata::unavailable(point_id));
            }
            // capture date arrives as "YYYY-MM" or "YYYY"
            let (year, month) = match body.date.as_deref() {
                Some(date) => match date.split_once('-') {
                    Some((y, m)) => (y.parse().ok(), m.parse().ok()),
                    None => (date.parse().ok(), None),
                },
                None => (None, None),
            };
            Ok(ImageMetadata {
                point_id: point_id.to_string(),
                available: true,
                capture_year: year,
                capture_month: month,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn fixture_lookup_round_trip() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            "point_id,available,capture_year,capture_month\n\
             p1,true,2019,6\n\
             p2,false,,\n\
             p3,true,2021,\n"
        )
        .unwrap();
        let client = FixtureClient::load(f.path()).unwrap();
        assert_eq!(client.len(), 3);
        let p1 = client.lookup("p1", LatLon::new(0.0, 0.0)).unwrap();
        assert!(p1.available);
        assert_eq!(p1.capture_year, Some(2019));
        assert_eq!(p1.capture_month, Some(6));
        let p2 = client.lookup("p2", LatLon::new(0.0, 0.0)).unwrap();
        assert!(!p2.available);
        assert!(client.lookup("missing", LatLon::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn unavailable_point_with_dates_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            "point_id,available,capture_year,capture_month\np1,false,2019,6\n"
        )
        .unwrap();
        assert!(FixtureClient::load(f.path()).is_err());
    }

    #[test]
    fn metadata_url_contains_location_and_key() {
        let url = metadata_url("https://x/meta", LatLon::new(51.5, -0.1), "SECRET");
        assert_eq!(url, "https://x/meta?location=51.5000000,-0.1000000&key=SECRET");
    }
}
