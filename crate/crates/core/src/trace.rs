//! Per-tick trace records and their CSV form.
//!
//! One row per body per tick, friendly robots first (in scenario order), then
//! intruders. Floating-point columns carry six significant digits.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::Pose;
use crate::world::Color;

pub const HEADER: [&str; 18] = [
    "tick",
    "time",
    "robot_id",
    "x",
    "y",
    "heading",
    "mode",
    "d_left",
    "d_right",
    "midpoint",
    "chosen_color",
    "left_pixels",
    "right_pixels",
    "blue_min_range",
    "green_min_range",
    "cmd_left",
    "cmd_right",
    "clearance",
];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace header does not match the expected columns")]
    Header,
    #[error("trace row {row}: bad `{column}` value `{value}`")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("trace row {row}: expected {expected} columns, found {found}")]
    Width {
        row: usize,
        expected: usize,
        found: usize,
    },
}

/// Controller state of a body for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Nav,
    Follow,
    SearchSpin,
    Stopped,
    /// Scripted intruder rows.
    Scripted,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Nav => "nav",
            Mode::Follow => "follow",
            Mode::SearchSpin => "search_spin",
            Mode::Stopped => "stopped",
            Mode::Scripted => "scripted",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "nav" => Mode::Nav,
            "follow" => Mode::Follow,
            "search_spin" => Mode::SearchSpin,
            "stopped" => Mode::Stopped,
            "scripted" => Mode::Scripted,
            _ => return Err(()),
        })
    }
}

/// Row identity: a friendly robot id, or an intruder by color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceId {
    Robot(u32),
    Intruder(Color),
}

impl fmt::Display for TraceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceId::Robot(id) => write!(f, "{id}"),
            TraceId::Intruder(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for TraceId {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        if let Ok(id) = s.parse() {
            return Ok(TraceId::Robot(id));
        }
        Color::parse(s).map(TraceId::Intruder).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub tick: u64,
    pub time: f64,
    pub id: TraceId,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub mode: Mode,
    pub d_left: f64,
    pub d_right: f64,
    pub midpoint: f64,
    pub chosen_color: Option<Color>,
    pub left_pixels: u32,
    pub right_pixels: u32,
    pub blue_min_range: f64,
    pub green_min_range: f64,
    pub cmd_left: f64,
    pub cmd_right: f64,
    pub clearance: f64,
}

impl TraceRecord {
    /// Row for a scripted intruder; sensor columns hold their idle values.
    pub fn intruder(
        tick: u64,
        time: f64,
        color: Color,
        pose: &Pose,
        range_max: f64,
        clearance: f64,
    ) -> Self {
        let idle = crate::sonar::RAW_RANGE;
        Self {
            tick,
            time,
            id: TraceId::Intruder(color),
            x: pose.position.x,
            y: pose.position.y,
            heading: pose.heading,
            mode: Mode::Scripted,
            d_left: idle,
            d_right: idle,
            midpoint: idle,
            chosen_color: None,
            left_pixels: 0,
            right_pixels: 0,
            blue_min_range: range_max,
            green_min_range: range_max,
            cmd_left: 0.0,
            cmd_right: 0.0,
            clearance,
        }
    }

    fn fields(&self) -> [String; 18] {
        [
            self.tick.to_string(),
            sig6(self.time),
            self.id.to_string(),
            sig6(self.x),
            sig6(self.y),
            sig6(self.heading),
            self.mode.to_string(),
            sig6(self.d_left),
            sig6(self.d_right),
            sig6(self.midpoint),
            self.chosen_color
                .map_or("none".to_owned(), |c| c.to_string()),
            self.left_pixels.to_string(),
            self.right_pixels.to_string(),
            sig6(self.blue_min_range),
            sig6(self.green_min_range),
            sig6(self.cmd_left),
            sig6(self.cmd_right),
            sig6(self.clearance),
        ]
    }
}

/// Formats like C's `%g`: six significant digits, trailing zeros dropped.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-5..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[TraceRecord], out: W) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn parse<T: FromStr>(row: usize, column: &'static str, value: &str) -> Result<T, TraceError> {
    value.parse().map_err(|_| TraceError::Field {
        row,
        column,
        value: value.to_owned(),
    })
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    if rdr.headers()?.iter().ne(HEADER.iter().copied()) {
        return Err(TraceError::Header);
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let n = i + 1;
        if row.len() != HEADER.len() {
            return Err(TraceError::Width {
                row: n,
                expected: HEADER.len(),
                found: row.len(),
            });
        }
        let get = |k: usize| &row[k];
        let f = |k: usize| parse::<f64>(n, HEADER[k], get(k));
        let color = match get(10) {
            "none" => None,
            s => Some(Color::parse(s).ok_or_else(|| TraceError::Field {
                row: n,
                column: HEADER[10],
                value: s.to_owned(),
            })?),
        };
        out.push(TraceRecord {
            tick: parse(n, HEADER[0], get(0))?,
            time: f(1)?,
            id: parse(n, HEADER[2], get(2))?,
            x: f(3)?,
            y: f(4)?,
            heading: f(5)?,
            mode: parse(n, HEADER[6], get(6))?,
            d_left: f(7)?,
            d_right: f(8)?,
            midpoint: f(9)?,
            chosen_color: color,
            left_pixels: parse(n, HEADER[11], get(11))?,
            right_pixels: parse(n, HEADER[12], get(12))?,
            blue_min_range: f(13)?,
            green_min_range: f(14)?,
            cmd_left: f(15)?,
            cmd_right: f(16)?,
            clearance: f(17)?,
        });
    }
    Ok(out)
}
