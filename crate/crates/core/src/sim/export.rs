use std::fmt::Write;

use super::Trajectory;
use crate::scalar::Scalar;

/// CSV with header `t,<species>...` and one row per sample.
pub fn trajectory_to_csv<T: Scalar>(traj: &Trajectory<T>) -> String {
    let mut out = String::from("t");
    for s in traj.species() {
        out.push(',');
        out.push_str(s);
    }
    out.push('\n');
    for (t, state) in traj.times().iter().zip(traj.states()) {
        write!(out, "{t}").unwrap();
        for v in state {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn trajectory_to_json<T: Scalar>(traj: &Trajectory<T>) -> serde_json::Result<String> {
    serde_json::to_string_pretty(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Crn;
    use crate::sim::integrate_from_zero;

    #[test]
    fn csv_layout() {
        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], crate::exact::int(1))
            .unwrap()
            .species("Y")
            .unwrap()
            .build()
            .unwrap();
        let traj = integrate_from_zero(&crn, 0.3f64).unwrap();
        let csv = trajectory_to_csv(&traj);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,X,Y");
        assert_eq!(lines.len(), traj.len() + 1);
        assert_eq!(lines[1], "0,0,0");
        let back: Trajectory<f64> = serde_json::from_str(&trajectory_to_json(&traj).unwrap()).unwrap();
        assert_eq!(back, traj);
    }
}
