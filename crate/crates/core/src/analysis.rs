//! Post-run metrics computed from traces: lateral path quality between
//! obstacles, and follower standoff from a moving intruder.

use std::io::{Read, Write};

use thiserror::Error;

use crate::sonar::RAW_RANGE;
use crate::trace::{sig6, TraceId, TraceRecord};
use crate::world::Color;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("robot {0} does not appear in the trace")]
    UnknownRobot(u32),
    #[error("no {0} intruder in the trace")]
    UnknownColor(Color),
    #[error("sample time {time} s is outside the trace span [{start}, {end}] s")]
    OutOfSpan { time: f64, start: f64, end: f64 },
    #[error("metrics csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("metrics row {row}: bad value `{value}` in column `{column}`")]
    Field {
        row: usize,
        column: String,
        value: String,
    },
}

/// Side distances with the derived total, midpoint, and occupied position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMetricsRow {
    pub time: f64,
    pub d_left: f64,
    pub d_right: f64,
    /// Width of the passage: `d_left + d_right`.
    pub total: f64,
    /// Midpoint set point: `total / 2`.
    pub suggested: f64,
    /// `max(d_left, d_right)`, only when both sides see an obstacle.
    pub actual: Option<f64>,
}

impl PathMetricsRow {
    pub fn from_sides(time: f64, d_left: f64, d_right: f64) -> Self {
        let total = d_left + d_right;
        let both_detected = d_left < RAW_RANGE && d_right < RAW_RANGE;
        Self {
            time,
            d_left,
            d_right,
            total,
            suggested: total / 2.0,
            actual: both_detected.then(|| d_left.max(d_right)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FollowMetricsRow {
    pub time: f64,
    /// Straight-line distance of the intruder from its first traced position.
    pub displacement: f64,
    /// Center-to-center distance per follower, in the requested order.
    pub distances: Vec<(u32, f64)>,
}

/// Record nearest to `time` within `rows` (sorted by time); ties go earlier.
fn nearest<'a>(rows: &[&'a TraceRecord], time: f64) -> Result<&'a TraceRecord, AnalysisError> {
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let half_tick = crate::engine::DT / 2.0;
    if time < first.time - half_tick || time > last.time + half_tick {
        return Err(AnalysisError::OutOfSpan {
            time,
            start: first.time,
            end: last.time,
        });
    }
    let idx = rows.partition_point(|r| r.time < time);
    let best = match (idx.checked_sub(1), rows.get(idx)) {
        (Some(i), Some(after)) => {
            let before = rows[i];
            if time - before.time <= after.time - time {
                before
            } else {
                after
            }
        }
        (Some(i), None) => rows[i],
        (None, Some(after)) => after,
        (None, None) => unreachable!("rows is non-empty"),
    };
    Ok(best)
}

fn rows_for(trace: &[TraceRecord], id: TraceId) -> Vec<&TraceRecord> {
    trace.iter().filter(|r| r.id == id).collect()
}

/// Samples a robot's side distances at the ticks nearest `sample_times`.
pub fn path_metrics(
    trace: &[TraceRecord],
    robot_id: u32,
    sample_times: &[f64],
) -> Result<Vec<PathMetricsRow>, AnalysisError> {
    if trace.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    let rows = rows_for(trace, TraceId::Robot(robot_id));
    if rows.is_empty() {
        return Err(AnalysisError::UnknownRobot(robot_id));
    }
    sample_times
        .iter()
        .map(|&t| {
            let r = nearest(&rows, t)?;
            Ok(PathMetricsRow::from_sides(r.time, r.d_left, r.d_right))
        })
        .collect()
}

/// Distances from each follower to the `color` intruder at the sampled ticks.
pub fn follow_metrics(
    trace: &[TraceRecord],
    follower_ids: &[u32],
    color: Color,
    sample_times: &[f64],
) -> Result<Vec<FollowMetricsRow>, AnalysisError> {
    if trace.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    let target = rows_for(trace, TraceId::Intruder(color));
    if target.is_empty() {
        return Err(AnalysisError::UnknownColor(color));
    }
    let followers = follower_ids
        .iter()
        .map(|&id| {
            let rows = rows_for(trace, TraceId::Robot(id));
            if rows.is_empty() {
                Err(AnalysisError::UnknownRobot(id))
            } else {
                Ok((id, rows))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let origin = (target[0].x, target[0].y);

    sample_times
        .iter()
        .map(|&t| {
            let it = nearest(&target, t)?;
            let distances = followers
                .iter()
                .map(|(id, rows)| {
                    let r = nearest(rows, t)?;
                    Ok((*id, (r.x - it.x).hypot(r.y - it.y)))
                })
                .collect::<Result<Vec<_>, AnalysisError>>()?;
            Ok(FollowMetricsRow {
                time: it.time,
                displacement: (it.x - origin.0).hypot(it.y - origin.1),
                distances,
            })
        })
        .collect()
}

/// A named-column numeric table; missing values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl MetricsTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn from_path_rows(rows: &[PathMetricsRow]) -> Self {
        Self {
            columns: ["time", "d_left", "d_right", "total", "suggested", "actual"]
                .map(String::from)
                .to_vec(),
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        Some(r.time),
                        Some(r.d_left),
                        Some(r.d_right),
                        Some(r.total),
                        Some(r.suggested),
                        r.actual,
                    ]
                })
                .collect(),
        }
    }

    pub fn from_follow_rows(rows: &[FollowMetricsRow]) -> Self {
        let mut columns = vec!["time".to_owned(), "intruder_displacement".to_owned()];
        if let Some(first) = rows.first() {
            columns.extend(first.distances.iter().map(|(id, _)| format!("robot_{id}")));
        }
        Self {
            columns,
            rows: rows
                .iter()
                .map(|r| {
                    [Some(r.time), Some(r.displacement)]
                        .into_iter()
                        .chain(r.distances.iter().map(|&(_, d)| Some(d)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map_or(String::new(), sig6)))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, AnalysisError> {
        let mut rdr = csv::Reader::from_reader(input);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(v, c)| {
                    let v = v.trim();
                    if v.is_empty() {
                        Ok(None)
                    } else {
                        v.parse().map(Some).map_err(|_| AnalysisError::Field {
                            row: i + 1,
                            column: c.clone(),
                            value: v.to_owned(),
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}
