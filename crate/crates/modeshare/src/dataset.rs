//! City mode-share tables, boundaries, and population grids.
//!
//! Shares are canonicalized to proportions strictly inside (0,1); all
//! file I/O is in percent. Population density is derived from a 250 m
//! population grid clipped to the city boundary.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{self, LatLon};

/// Whether a survey covers all trips or commuting trips only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyScope {
    AllTrips,
    Commuting,
}

impl fmt::Display for SurveyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurveyScope::AllTrips => write!(f, "all_trips"),
            SurveyScope::Commuting => write!(f, "commuting"),
        }
    }
}

/// Training cities carry observed shares; demo cities receive predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CityRole {
    Training,
    Demo,
}

impl fmt::Display for CityRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CityRole::Training => write!(f, "training"),
            CityRole::Demo => write!(f, "demo"),
        }
    }
}

/// One city's mode shares, survey metadata, and population density.
///
/// Shares are stored as proportions in (0,1); `None` means the survey
/// did not report that mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityRecord {
    pub city_id: String,
    pub name: String,
    pub country: String,
    pub role: CityRole,
    pub cycle_share: Option<f64>,
    pub motorcycle_share: Option<f64>,
    pub survey_year: i32,
    pub survey_scope: SurveyScope,
    pub population: f64,
    pub area_km2: f64,
    pub pop_density: f64,
}

const CITY_COLUMNS: [&str; 10] = [
    "city_id",
    "name",
    "country",
    "role",
    "cycle_share_pct",
    "motorcycle_share_pct",
    "survey_year",
    "survey_scope",
    "population",
    "area_km2",
];

fn bad_row(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::BadRow {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Percent string in (0,100) to a proportion strictly inside (0,1).
fn parse_share_pct(cell: &str, path: &str, line: u64) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    let pct: f64 = cell
        .parse()
        .map_err(|_| bad_row(path, line, format!("unparseable share `{cell}`")))?;
    if !pct.is_finite() || pct <= 0.0 || pct >= 100.0 {
        return Err(bad_row(
            path,
            line,
            format!("share {pct}% must lie strictly between 0 and 100"),
        ));
    }
    Ok(Some(pct / 100.0))
}

/// Survey year, either `YYYY` or a `YYYY-YYYY` range stored as the
/// mean year rounded to the nearest integer.
fn parse_survey_year(cell: &str, path: &str, line: u64) -> Result<i32> {
    let parse_one = |s: &str| -> Result<i32> {
        s.trim()
            .parse()
            .map_err(|_| bad_row(path, line, format!("unparseable survey year `{cell}`")))
    };
    match cell.split_once('-') {
        Some((a, b)) => {
            let (a, b) = (parse_one(a)?, parse_one(b)?);
            Ok(((a as f64 + b as f64) / 2.0).round() as i32)
        }
        None => parse_one(cell),
    }
}

/// Load a city table CSV with header
/// `city_id,name,country,role,cycle_share_pct,motorcycle_share_pct,survey_year,survey_scope,population,area_km2`.
///
/// Percent columns become proportions; an empty cell means the share is
/// absent. Rows violating the role/share contract are rejected with
/// their line number.
pub fn load_city_table(path: impl AsRef<Path>) -> Result<Vec<CityRecord>> {
    let path_str = path.as_ref().display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(|e| Error::io(&path_str, std::io::Error::other(e)))?;

    let headers = reader.headers()?.clone();
    let mut idx = BTreeMap::new();
    for col in CITY_COLUMNS {
        match headers.iter().position(|h| h == col) {
            Some(i) => {
                idx.insert(col, i);
            }
            None => {
                return Err(Error::MissingColumn {
                    column: col.to_string(),
                    path: path_str,
                })
            }
        }
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |col: &str| row.get(idx[col]).unwrap_or("");

        let role = match field("role") {
            "training" => CityRole::Training,
            "demo" => CityRole::Demo,
            other => return Err(bad_row(&path_str, line, format!("unknown role `{other}`"))),
        };
        let survey_scope = match field("survey_scope") {
            "all_trips" => SurveyScope::AllTrips,
            "commuting" => SurveyScope::Commuting,
            other => {
                return Err(bad_row(
                    &path_str,
                    line,
                    format!("unknown survey scope `{other}`"),
                ))
            }
        };
        let cycle_share = parse_share_pct(field("cycle_share_pct"), &path_str, line)?;
        let motorcycle_share = parse_share_pct(field("motorcycle_share_pct"), &path_str, line)?;
        match role {
            CityRole::Training if cycle_share.is_none() || motorcycle_share.is_none() => {
                return Err(bad_row(
                    &path_str,
                    line,
                    "training city must report both mode shares",
                ))
            }
            CityRole::Demo if cycle_share.is_some() && motorcycle_share.is_some() => {
                return Err(bad_row(
                    &path_str,
                    line,
                    "demo city must be missing at least one mode share",
                ))
            }
            _ => {}
        }

        let num = |col: &str| -> Result<f64> {
            field(col)
                .parse()
                .map_err(|_| bad_row(&path_str, line, format!("unparseable {col} `{}`", field(col))))
        };
        let population = num("population")?;
        let area_km2 = num("area_km2")?;
        if !(area_km2 > 0.0) {
            return Err(bad_row(&path_str, line, "area_km2 must be positive"));
        }
        if !(population >= 0.0) {
            return Err(bad_row(&path_str, line, "population must be non-negative"));
        }

        records.push(CityRecord {
            city_id: field("city_id").to_string(),
            name: field("name").to_string(),
            country: field("country").to_string(),
            role,
            cycle_share,
            motorcycle_share,
            survey_year: parse_survey_year(field("survey_year"), &path_str, line)?,
            survey_scope,
            population,
            area_km2,
            pop_density: population / area_km2,
        });
    }
    Ok(records)
}

/// Percent string that reloads to exactly `share`; nudges by one ulp
/// when x100 / /100 does not round-trip.
fn percent_string(share: f64) -> String {
    let mut pct = share * 100.0;
    if pct / 100.0 != share {
        for candidate in [f64::from_bits(pct.to_bits() + 1), f64::from_bits(pct.to_bits() - 1)] {
            if candidate / 100.0 == share {
                pct = candidate;
                break;
            }
        }
    }
    format!("{pct}")
}

/// Serialize records back to the city-table CSV format; inverse of
/// [`load_city_table`] (canonicalization is idempotent).
pub fn write_city_table(records: &[CityRecord]) -> String {
    let mut out = String::from(
        "city_id,name,country,role,cycle_share_pct,motorcycle_share_pct,survey_year,survey_scope,population,area_km2\n",
    );
    for r in records {
        let share = |s: Option<f64>| s.map(percent_string).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.city_id,
            r.name,
            r.country,
            r.role,
            share(r.cycle_share),
            share(r.motorcycle_share),
            r.survey_year,
            r.survey_scope,
            r.population,
            r.area_km2,
        ));
    }
    out
}

/// Scale a commuting-only share to an all-trips share.
///
/// The default factor is 0.72; other factors come from per-country
/// config. Errors instead of clamping when the result leaves (0,1).
pub fn adjust_commute_share(share: f64, factor: f64) -> Result<f64> {
    debug_assert!(share > 0.0 && share < 1.0 && factor > 0.0);
    let adjusted = share * factor;
    if !(adjusted > 0.0 && adjusted < 1.0) {
        return Err(Error::AdjustedShareOutOfRange { value: adjusted });
    }
    Ok(adjusted)
}

/// Default commuting-to-all-trips scale factor.
pub const DEFAULT_COMMUTE_FACTOR: f64 = 0.72;

/// One population grid cell: centroid plus person count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub centroid: LatLon,
    pub population: f64,
}

/// A gridded population raster (250 m cells in the source data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationGrid {
    pub cell_size_m: f64,
    pub cells: Vec<GridCell>,
}

impl PopulationGrid {
    pub fn new(cell_size_m: f64, cells: Vec<GridCell>) -> Result<Self> {
        if !(cell_size_m > 0.0) {
            return Err(Error::Other(format!(
                "cell size {cell_size_m} m must be positive"
            )));
        }
        if let Some(bad) = cells.iter().find(|c| !(c.population >= 0.0)) {
            return Err(Error::Other(format!(
                "negative population {} at ({}, {})",
                bad.population, bad.centroid.lat, bad.centroid.lon
            )));
        }
        Ok(PopulationGrid { cell_size_m, cells })
    }

    /// Parse a grid CSV: a `# cell_size_m=<n>` metadata line, then a
    /// `lat,lon,population` header and rows.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
        let mut lines = text.lines().enumerate();

        let cell_size_m = loop {
            let Some((_, line)) = lines.next() else {
                return Err(Error::Other(format!(
                    "{path_str}: missing `# cell_size_m=` metadata line"
                )));
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some(meta) = line.strip_prefix('#') else {
                return Err(Error::Other(format!(
                    "{path_str}: first line must declare `# cell_size_m=<metres>`"
                )));
            };
            let Some((key, value)) = meta.split_once('=') else {
                return Err(Error::Other(format!("{path_str}: malformed metadata `{line}`")));
            };
            if key.trim() != "cell_size_m" {
                return Err(Error::Other(format!(
                    "{path_str}: unknown metadata key `{}`",
                    key.trim()
                )));
            }
            break value.trim().parse::<f64>().map_err(|_| {
                Error::Other(format!("{path_str}: unparseable cell size `{}`", value.trim()))
            })?;
        };

        let mut cells = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line == "lat,lon,population" {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(bad_row(&path_str, i as u64 + 1, "expected lat,lon,population"));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse()
                    .map_err(|_| bad_row(&path_str, i as u64 + 1, format!("unparseable `{s}`")))
            };
            cells.push(GridCell {
                centroid: LatLon::new(parse(parts[0])?, parse(parts[1])?),
                population: parse(parts[2])?,
            });
        }
        PopulationGrid::new(cell_size_m, cells)
    }
}

/// A city boundary: closed ring(s) of WGS84 vertices plus derived area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub rings: Vec<Vec<LatLon>>,
    pub area_km2: f64,
}

impl Boundary {
    /// Build from rings, closing validation and spherical area included.
    pub fn new(rings: Vec<Vec<LatLon>>) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::BadBoundary("no rings".into()));
        }
        for ring in &rings {
            if ring.len() < 4 {
                return Err(Error::BadBoundary(format!(
                    "ring with {} vertices cannot be a closed polygon",
                    ring.len()
                )));
            }
            if ring.first() != ring.last() {
                return Err(Error::BadBoundary(
                    "ring is not closed (first vertex != last vertex)".into(),
                ));
            }
        }
        let area_km2 = geo::rings_area_km2(&rings);
        if !(area_km2 > 0.0) {
            return Err(Error::BadBoundary("zero or degenerate area".into()));
        }
        Ok(Boundary { rings, area_km2 })
    }

    /// Parse a GeoJSON-style polygon file: a bare `Polygon` geometry, or
    /// a `Feature` / `FeatureCollection` whose first polygon is taken.
    /// Coordinates are `[lon, lat]` pairs.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let geometry = find_polygon(&value)
            .ok_or_else(|| Error::BadBoundary(format!("{path_str}: no Polygon geometry found")))?;
        let rings = geometry
            .get("coordinates")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::BadBoundary(format!("{path_str}: missing coordinates")))?
            .iter()
            .map(|ring| {
                ring.as_array()
                    .map(|vs| {
                        vs.iter()
                            .filter_map(|v| {
                                let pair = v.as_array()?;
                                Some(LatLon::new(pair.get(1)?.as_f64()?, pair.first()?.as_f64()?))
                            })
                            .collect::<Vec<_>>()
                    })
                    .ok_or_else(|| Error::BadBoundary(format!("{path_str}: malformed ring")))
            })
            .collect::<Result<Vec<_>>>()?;
        Boundary::new(rings)
    }

    pub fn contains(&self, point: LatLon) -> bool {
        geo::point_in_rings(point, &self.rings)
    }
}

fn find_polygon(value: &serde_json::Value) -> Option<&serde_json::Value> {
    match value.get("type").and_then(|t| t.as_str()) {
        Some("Polygon") => Some(value),
        Some("Feature") => find_polygon(value.get("geometry")?),
        Some("FeatureCollection") => value
            .get("features")?
            .as_array()?
            .iter()
            .find_map(find_polygon),
        _ => None,
    }
}

/// Persons per km²: population of cells whose centroid falls inside the
/// boundary, divided by the boundary area.
pub fn compute_population_density(grid: &PopulationGrid, boundary: &Boundary) -> Result<f64> {
    let mut total = 0.0;
    let mut covered = false;
    for cell in &grid.cells {
        if boundary.contains(cell.centroid) {
            total += cell.population;
            covered = true;
        }
    }
    if !covered {
        return Err(Error::EmptyCoverage);
    }
    Ok(total / boundary.area_km2)
}
