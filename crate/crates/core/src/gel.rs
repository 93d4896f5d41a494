//! Gel electrophoresis of the purified tubes and decoding of the bands.
//!
//! Migration follows a log-length coordinate `x` that is 0 at the longest
//! fragment and 1 at the tracking dye. The distance saturates towards the
//! gel end, `d = L·s·x / (1 − s + s·x)`, which is the identity in `x` at
//! both anchors, keeps the dye at exactly `s·L`, and stays strictly
//! decreasing in length all the way down to the shortest ladder fragment
//! instead of running off the gel.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_traits::ToPrimitive;

use crate::compiler::EncodingPlan;
use crate::decision::{argmax_all, best_options, DecisionMatrix};
use crate::scalar::Scalar;
use crate::wetlab::TubeState;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GelError {
    #[error("fragment length must be positive")]
    NonpositiveLength,
    #[error("lane {lane}: band at {length} bp matches no predicted construct")]
    UndecodableBand { lane: String, length: usize },
    #[error("unsupported render format {0:?} (expected ascii or svg)")]
    UnsupportedFormat(String),
    #[error("invalid gel configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GelConfig {
    /// Abstract distance units from the wells to the gel end.
    pub gel_length: f64,
    /// Metadata only.
    pub agarose_percent: f64,
    /// Ladder fragment lengths, ascending.
    pub ladder: Vec<usize>,
    pub dye_length: usize,
    /// Fraction of the gel the dye has run when the run stops.
    pub stop_fraction: Rational,
    /// Bands closer than this many bp merge.
    pub resolution: usize,
}

impl Default for GelConfig {
    fn default() -> Self {
        Self {
            gel_length: 100.0,
            agarose_percent: 2.75,
            ladder: (1..=20).map(|k| 10 * k).collect(),
            dye_length: 100,
            stop_fraction: crate::scalar::big(2, 3),
            resolution: 9,
        }
    }
}

impl GelConfig {
    pub fn validate(&self) -> Result<(), GelError> {
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GelError::InvalidConfig("ladder must be non-empty and strictly ascending".into()));
        }
        if self.ladder[0] == 0 {
            return Err(GelError::InvalidConfig("ladder fragments must be positive".into()));
        }
        let s = &self.stop_fraction;
        if *s <= Rational::from_integer(0.into()) || *s > Rational::from_integer(1.into()) {
            return Err(GelError::InvalidConfig("stop fraction must lie in (0, 1]".into()));
        }
        if self.dye_length == 0 || self.dye_length >= self.ladder_max() {
            return Err(GelError::InvalidConfig("dye length must lie below the longest ladder fragment".into()));
        }
        if self.gel_length.is_nan() || self.gel_length <= 0.0 {
            return Err(GelError::InvalidConfig("gel length must be positive".into()));
        }
        Ok(())
    }

    pub fn ladder_max(&self) -> usize {
        self.ladder.last().copied().unwrap_or(0)
    }

    fn stop(&self) -> f64 {
        Scalar::to_f64(&self.stop_fraction)
    }

    /// Distance run by the dye: exactly `stop_fraction · gel_length`.
    pub fn dye_distance(&self) -> f64 {
        let s = &self.stop_fraction;
        (s.numer().to_f64().unwrap_or(f64::NAN) * self.gel_length) / s.denom().to_f64().unwrap_or(f64::NAN)
    }
}

/// Migration distance with the top anchor at `l_max`.
pub fn migrate_with(length: usize, config: &GelConfig, l_max: usize) -> Result<f64, GelError> {
    if length == 0 {
        return Err(GelError::NonpositiveLength);
    }
    if length == config.dye_length {
        return Ok(config.dye_distance());
    }
    let top = (l_max as f64).ln();
    let x = (top - (length as f64).ln()) / (top - (config.dye_length as f64).ln());
    if x <= 0.0 {
        return Ok(0.0);
    }
    let s = config.stop();
    let d = config.gel_length * s * x / (1.0 - s + s * x);
    Ok(d.clamp(0.0, config.gel_length))
}

/// Migration distance anchored at the longest ladder fragment.
pub fn migrate(length: usize, config: &GelConfig) -> Result<f64, GelError> {
    migrate_with(length, config, config.ladder_max())
}

/// Fragment length that migrates `distance`, inverse of [`migrate_with`].
pub fn length_at(distance: f64, config: &GelConfig, l_max: usize) -> f64 {
    let s = config.stop();
    let l = config.gel_length;
    let x = distance * (1.0 - s) / (s * (l - distance));
    let top = (l_max as f64).ln();
    (top - x * (top - (config.dye_length as f64).ln())).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band<T> {
    pub length: usize,
    pub intensity: T,
    pub migration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lane<T> {
    pub label: String,
    /// Ascending in length, so strictly descending in migration.
    pub bands: Vec<Band<T>>,
    pub pcr_cycles: u32,
}

impl<T: Scalar> Lane<T> {
    pub fn total(&self) -> T {
        self.bands.iter().fold(T::zero(), |a, b| a + b.intensity.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gel<T> {
    pub lanes: Vec<Lane<T>>,
    pub ladder: Lane<T>,
    /// Length anchored at distance zero for this run.
    pub l_max: usize,
    pub config: GelConfig,
}

/// Merges `(length, intensity)` pairs: after sorting by length, neighbours
/// closer than `resolution` bp join into one band with the summed
/// intensity, placed at the length of its most intense member (the shorter
/// one on ties).
pub fn merge_bands<T: Scalar>(mut raw: Vec<(usize, T)>, resolution: usize) -> Vec<(usize, T)> {
    raw.sort_by_key(|(len, _)| *len);
    let mut groups: Vec<Vec<(usize, T)>> = Vec::new();
    for (len, intensity) in raw {
        match groups.last_mut() {
            Some(g) if len - g.last().expect("groups are non-empty").0 < resolution => g.push((len, intensity)),
            _ => groups.push(vec![(len, intensity)]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mut best = 0;
            for (k, item) in g.iter().enumerate() {
                if item.1 > g[best].1 {
                    best = k;
                }
            }
            let length = g[best].0;
            let total = g.into_iter().fold(T::zero(), |a, (_, i)| a + i);
            (length, total)
        })
        .collect()
}

fn lane<T: Scalar>(label: String, raw: Vec<(usize, T)>, config: &GelConfig, l_max: usize, cycles: u32) -> Result<Lane<T>, GelError> {
    let bands = merge_bands(raw, config.resolution)
        .into_iter()
        .filter(|(_, i)| *i > T::zero())
        .map(|(length, intensity)| {
            Ok(Band {
                length,
                intensity,
                migration: migrate_with(length, config, l_max)?,
            })
        })
        .collect::<Result<Vec<_>, GelError>>()?;
    Ok(Lane {
        label,
        bands,
        pcr_cycles: cycles,
    })
}

/// One lane per tube, in order, plus the ladder lane.
pub fn run_gel<T: Scalar>(tubes: &[TubeState<T>], config: &GelConfig) -> Result<Gel<T>, GelError> {
    config.validate()?;
    let longest = tubes
        .iter()
        .flat_map(|t| t.species.iter().filter_map(|s| s.length()))
        .max()
        .unwrap_or(0);
    let l_max = config.ladder_max().max(longest);
    let lanes = tubes
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let raw = t
                .species
                .iter()
                .filter_map(|s| s.length().map(|l| (l, s.concentration.clone())))
                .collect();
            lane((i + 1).to_string(), raw, config, l_max, t.pcr_cycles)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ladder_raw = config.ladder.iter().map(|&l| (l, T::one())).collect::<Vec<_>>();
    let ladder = Lane {
        label: "ladder".into(),
        bands: ladder_raw
            .into_iter()
            .map(|(length, intensity)| {
                Ok(Band {
                    length,
                    intensity,
                    migration: migrate_with(length, config, l_max)?,
                })
            })
            .collect::<Result<Vec<_>, GelError>>()?,
        pcr_cycles: 0,
    };
    Ok(Gel {
        lanes,
        ladder,
        l_max,
        config: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionReport<T> {
    pub option_labels: Vec<String>,
    /// Per lane, `(outcome, intensity)` of each decoded band.
    pub decoded: Vec<Vec<(usize, T)>>,
    pub totals: Vec<T>,
    /// Expected utility under `u = (1, 0)` recovered from the totals.
    pub eu_estimates: Vec<T>,
    pub chosen: Vec<usize>,
    pub oracle: Vec<usize>,
    pub agree: bool,
}

impl<T: Scalar> DecisionReport<T> {
    fn names(&self, idx: &[usize]) -> String {
        if idx.is_empty() {
            return "none".into();
        }
        idx.iter()
            .map(|&i| self.option_labels[i].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// `chosen: option 1; oracle: option 1; agree`
    pub fn summary(&self) -> String {
        format!(
            "chosen: {}; oracle: {}; {}",
            self.names(&self.chosen),
            self.names(&self.oracle),
            if self.agree { "agree" } else { "disagree" }
        )
    }
}

impl<T: Scalar> fmt::Display for DecisionReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.option_labels.iter().enumerate() {
            writeln!(
                f,
                "{label}: total {} EU estimate {}",
                self.totals[i].to_fraction_string(),
                self.eu_estimates[i].to_fraction_string()
            )?;
        }
        if self.chosen.len() > 1 {
            writeln!(f, "tie between {}", self.names(&self.chosen))?;
        }
        writeln!(f, "{}", self.summary())
    }
}

/// Decodes each band to an outcome by length and picks the lane(s) with the
/// largest total. The oracle is the direct expected-utility argmax.
pub fn readout<T: Scalar>(
    gel: &Gel<T>,
    plan: &EncodingPlan<T>,
    matrix: &DecisionMatrix<T>,
) -> Result<DecisionReport<T>, GelError> {
    let tolerance = gel.config.resolution / 2;
    let mut decoded = Vec::with_capacity(gel.lanes.len());
    let mut totals = Vec::with_capacity(gel.lanes.len());
    let mut eu = Vec::with_capacity(gel.lanes.len());
    let mass = plan.probabilities.iter().fold(T::zero(), |a, p| a + p.clone());
    for lane in &gel.lanes {
        let bands = lane
            .bands
            .iter()
            .map(|b| {
                plan.outcome_for_length(b.length, tolerance)
                    .map(|j| (j, b.intensity.clone()))
                    .ok_or_else(|| GelError::UndecodableBand {
                        lane: lane.label.clone(),
                        length: b.length,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let total = lane.total();
        let norm = T::two_pow(lane.pcr_cycles) * mass.clone();
        eu.push(if norm == T::zero() { T::zero() } else { total.clone() / norm });
        totals.push(total);
        decoded.push(bands);
    }
    let chosen = argmax_all(&totals);
    let oracle = best_options(matrix);
    Ok(DecisionReport {
        option_labels: plan.option_labels.clone(),
        agree: chosen == oracle,
        decoded,
        totals,
        eu_estimates: eu,
        chosen,
        oracle,
    })
}

/// Band intensity on the predicted scale: concentration · D / 2^n, which is
/// `P_j · D` for an undisturbed construct.
pub fn relative_intensity<T: Scalar>(band: &Band<T>, lane: &Lane<T>, plan: &EncodingPlan<T>) -> T {
    band.intensity.clone() * plan.scale.clone() / T::two_pow(lane.pcr_cycles)
}

/// `lane, length_bp, relative_intensity, migration_fraction`, one row per
/// sample band.
pub fn band_table<T: Scalar>(gel: &Gel<T>, plan: &EncodingPlan<T>) -> String {
    let mut out = String::from("lane\tlength_bp\trelative_intensity\tmigration_fraction\n");
    for lane in &gel.lanes {
        for band in &lane.bands {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.6}",
                lane.label,
                band.length,
                relative_intensity(band, lane, plan).to_fraction_string(),
                band.migration / gel.config.gel_length
            );
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = GelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ascii" | "text" => Ok(RenderFormat::Ascii),
            "svg" => Ok(RenderFormat::Svg),
            other => Err(GelError::UnsupportedFormat(other.to_string())),
        }
    }
}

/// 0 (blank) to 255 (darkest), proportional to intensity over the gel's
/// strongest sample band; any positive band gets at least level 1.
pub fn gray_levels<T: Scalar>(gel: &Gel<T>) -> Vec<Vec<u8>> {
    let max = gel
        .lanes
        .iter()
        .flat_map(|l| l.bands.iter().map(|b| b.intensity.to_f64()))
        .fold(0.0f64, f64::max);
    gel.lanes
        .iter()
        .map(|l| {
            l.bands
                .iter()
                .map(|b| {
                    if max <= 0.0 {
                        0
                    } else {
                        ((b.intensity.to_f64() / max) * 255.0).ceil().clamp(1.0, 255.0) as u8
                    }
                })
                .collect()
        })
        .collect()
}

const ASCII_ROWS: usize = 40;
const SHADES: &[u8] = b".:-=+*#%@";

fn render_ascii<T: Scalar>(gel: &Gel<T>) -> String {
    let levels = gray_levels(gel);
    let n = gel.lanes.len() + 1;
    let row_of = |d: f64| ((d / gel.config.gel_length) * (ASCII_ROWS - 1) as f64).round() as usize;
    let mut grid = vec![vec![' '; n * 6]; ASCII_ROWS];
    let mut notes: Vec<Vec<String>> = vec![Vec::new(); ASCII_ROWS];
    for (k, lane) in gel.lanes.iter().enumerate() {
        for (b, band) in lane.bands.iter().enumerate() {
            let level = levels[k][b] as usize;
            let shade = SHADES[(level * (SHADES.len() - 1)).div_ceil(255).min(SHADES.len() - 1)] as char;
            let r = row_of(band.migration);
            for c in 0..4 {
                grid[r][k * 6 + 1 + c] = shade;
            }
        }
    }
    let lk = gel.lanes.len();
    for band in &gel.ladder.bands {
        let r = row_of(band.migration);
        for c in 0..4 {
            grid[r][lk * 6 + 1 + c] = '-';
        }
        notes[r].push(format!("{}", band.length));
    }
    let dye = row_of(gel.config.dye_distance());
    notes[dye].push("dye".into());
    let mut out = String::new();
    let header: String = gel
        .lanes
        .iter()
        .map(|l| format!("{:^6}", l.label))
        .chain(std::iter::once(format!("{:^6}", "L")))
        .collect();
    let _ = writeln!(out, "{}", header.trim_end());
    for (r, row) in grid.iter().enumerate() {
        let line: String = row.iter().collect();
        let full = format!("{line} {}", notes[r].join(","));
        let _ = writeln!(out, "{}", full.trim_end());
    }
    out
}

fn render_svg<T: Scalar>(gel: &Gel<T>) -> String {
    let levels = gray_levels(gel);
    let lane_w = 60.0;
    let gap = 20.0;
    let top = 30.0;
    let scale = 4.0;
    let n = gel.lanes.len() + 1;
    let width = gap + n as f64 * (lane_w + gap) + 50.0;
    let height = top + gel.config.gel_length * scale + 20.0;
    let x_of = |k: usize| gap + k as f64 * (lane_w + gap);
    let y_of = |d: f64| top + d * scale;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r##"<rect class="frame" x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff" stroke="#000000"/>"##);
    for (k, lane) in gel.lanes.iter().enumerate() {
        let x = x_of(k);
        let _ = writeln!(out, r##"<rect class="well" x="{x:.2}" y="{:.2}" width="{lane_w:.2}" height="6.00" fill="none" stroke="#000000"/>"##, top - 8.0);
        let _ = writeln!(out, r#"<text class="label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, x + lane_w / 2.0, top - 12.0, lane.label);
        for (b, band) in lane.bands.iter().enumerate() {
            let g = 255 - levels[k][b];
            let _ = writeln!(
                out,
                r#"<rect class="band" data-length="{}" x="{x:.2}" y="{:.2}" width="{lane_w:.2}" height="3.00" fill="rgb({g},{g},{g})"/>"#,
                band.length,
                y_of(band.migration) - 1.5
            );
        }
    }
    let x = x_of(gel.lanes.len());
    let _ = writeln!(out, r##"<rect class="well" x="{x:.2}" y="{:.2}" width="{lane_w:.2}" height="6.00" fill="none" stroke="#000000"/>"##, top - 8.0);
    let _ = writeln!(out, r#"<text class="label" x="{:.2}" y="{:.2}" text-anchor="middle">ladder</text>"#, x + lane_w / 2.0, top - 12.0);
    for band in &gel.ladder.bands {
        let y = y_of(band.migration);
        let _ = writeln!(
            out,
            r#"<rect class="ladder-mark" data-length="{}" x="{x:.2}" y="{:.2}" width="{lane_w:.2}" height="1.00" fill="rgb(96,96,96)"/>"#,
            band.length,
            y - 0.5
        );
        let _ = writeln!(out, r#"<text class="ladder-label" x="{:.2}" y="{:.2}" font-size="6">{}</text>"#, x + lane_w + 4.0, y + 2.0, band.length);
    }
    let y = y_of(gel.config.dye_distance());
    let _ = writeln!(out, r##"<line class="dye" x1="0" y1="{y:.2}" x2="{width:.0}" y2="{y:.2}" stroke="#3050c0" stroke-dasharray="4 3"/>"##);
    out.push_str("</svg>\n");
    out
}

pub fn render<T: Scalar>(gel: &Gel<T>, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => render_ascii(gel),
        RenderFormat::Svg => render_svg(gel),
    }
}
