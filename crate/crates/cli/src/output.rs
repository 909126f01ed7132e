//! Output serialization: JSON Lines events, CSV trace, metrics, and the
//! occupancy graymap.

use std::io::Write;

use screenbot_core::event::{EventRecord, Metrics, TraceRow};
use screenbot_core::nav::grid::OccupancyGrid;

use crate::CliError;

fn out_err(context: &str) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::OutputIo {
        context: context.to_string(),
        source,
    }
}

/// One JSON object per line, in emission order.
pub fn write_events<W: Write>(mut w: W, events: &[EventRecord]) -> Result<(), CliError> {
    for e in events {
        let line = serde_json::to_string(e).expect("events serialize");
        writeln!(w, "{line}").map_err(out_err("event stream"))?;
    }
    Ok(())
}

/// Comma-separated trace: tick, t, x, y, theta, v, w, pan, tilt,
/// person_present, preceded by a schema comment line.
pub fn write_trace<W: Write>(mut w: W, trace: &[TraceRow]) -> Result<(), CliError> {
    writeln!(w, "# schema: trace/1").map_err(out_err("trace"))?;
    writeln!(w, "tick,t,x,y,theta,v,w,pan,tilt,person_present").map_err(out_err("trace"))?;
    for r in trace {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.tick, r.t, r.x, r.y, r.theta, r.v, r.w, r.pan, r.tilt, r.person_present
        )
        .map_err(out_err("trace"))?;
    }
    Ok(())
}

pub fn write_metrics<W: Write>(mut w: W, metrics: &Metrics) -> Result<(), CliError> {
    let line = serde_json::to_string(metrics).expect("metrics serialize");
    writeln!(w, "{line}").map_err(out_err("metrics"))
}

/// Binary PGM (P5): occupancy probability mapped to gray, white free and
/// black occupied, unknown mid-gray. Rows top-down, so north is up; the
/// header carries the schema as a PNM comment.
pub fn grid_to_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let w = grid.width();
    let h = grid.height();
    let mut out = format!("P5\n# schema: map/1\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for iy in (0..h).rev() {
        for ix in 0..w {
            let p = grid.probability(ix, iy);
            let gray = ((1.0 - p) * 255.0).round();
            out.push(gray as u8);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use screenbot_core::event::EventKind;

    #[test]
    fn events_are_one_json_object_per_line() {
        let events = vec![
            EventRecord::new(0, 0.0, EventKind::Announcement { message: "m".into() }),
            EventRecord::new(
                3,
                0.3,
                EventKind::Reading {
                    person_id: 1,
                    celsius: 36.5,
                },
            ),
        ];
        let mut buf = Vec::new();
        write_events(&mut buf, &events).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        for line in lines {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["schema"], "event/1");
            assert!(v["kind"].is_string());
            assert!(v["tick"].is_u64());
            assert!(v["sim_time"].is_number());
        }
    }

    #[test]
    fn trace_has_header_and_ten_columns() {
        let rows = vec![TraceRow {
            tick: 0,
            t: 0.0,
            x: 1.0,
            y: 2.0,
            theta: 0.5,
            v: 0.1,
            w: -0.2,
            pan: 0.0,
            tilt: 0.0,
            person_present: 2,
        }];
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# schema: trace/1");
        assert_eq!(
            lines.next().unwrap(),
            "tick,t,x,y,theta,v,w,pan,tilt,person_present"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 10);
    }

    #[test]
    fn pgm_header_and_size() {
        let grid = OccupancyGrid::with_cells(40, 30, 0.05, (0.0, 0.0));
        let pgm = grid_to_pgm(&grid);
        assert!(pgm.starts_with(b"P5\n# schema: map/1\n40 30\n255\n"));
        let header_len = b"P5\n# schema: map/1\n40 30\n255\n".len();
        assert_eq!(pgm.len(), header_len + 40 * 30);
        // Unknown cells render mid-gray.
        assert_eq!(pgm[header_len], 128);
    }
}
