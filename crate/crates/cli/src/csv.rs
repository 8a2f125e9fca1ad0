//! Trajectory export, one row per grid point.
//!
//! Values use the shortest decimal that parses back to the same `f64`, so the
//! bytes depend only on the log.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use astsm_core::sim::LOG_COLUMNS;
use astsm_core::TrajectoryLogD;

pub fn header() -> String {
    LOG_COLUMNS.join(",")
}

pub fn to_csv_string(log: &TrajectoryLogD) -> String {
    let mut out = String::with_capacity(log.len() * LOG_COLUMNS.len() * 12);
    out.push_str(&header());
    out.push('\n');
    for row in &log.rows {
        for (i, v) in row.values().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(log: &TrajectoryLogD, path: &Path) -> std::io::Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(to_csv_string(log).as_bytes())?;
    file.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use astsm_core::{run_scenario, ScenarioConfigD};

    fn short_run() -> TrajectoryLogD {
        let mut c = ScenarioConfigD::solo_nominal();
        c.scenario.duration = 0.6;
        c.scenario.reference.steps.retain(|s| s.time <= 0.6);
        run_scenario(&c).unwrap()
    }

    #[test]
    fn rectangular_with_header() {
        let log = short_run();
        let text = to_csv_string(&log);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), log.len() + 1);
        assert_eq!(lines[0], "t,phi,theta,psi,p,q,r,phi_d,theta_d,psi_d,sig1,sig2,sig3,ueq1,ueq2,ueq3,ud1,ud2,ud3,u1,u2,u3,a1,a2,a3,b1,b2,b3,nu1,nu2,nu3,d1,d2,d3");
        for line in &lines {
            assert_eq!(line.split(',').count(), 34);
        }
    }

    #[test]
    fn values_round_trip_exactly() {
        let log = short_run();
        let text = to_csv_string(&log);
        for (line, row) in text.lines().skip(1).zip(&log.rows) {
            let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(parsed, row.values().to_vec());
        }
    }
}
