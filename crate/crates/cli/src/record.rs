use qdiscord::{Branch, DiscordResult};
use serde::{Deserialize, Serialize};

/// One computed state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub d1: f64,
    pub d2: f64,
    pub lower_bound: f64,
    pub branch: Branch,
    /// Minimising axis in the lab frame.
    pub axis: [f64; 3],
    /// L₋ spectrum, descending.
    pub spectrum: [f64; 3],
    #[serde(default)]
    pub oracle: Option<f64>,
    #[serde(default)]
    pub deviation: Option<f64>,
    /// Seconds; only filled with `--timing` so that output stays reproducible.
    #[serde(default)]
    pub wall_time: Option<f64>,
}

impl ResultRecord {
    pub fn new(id: String, r: &DiscordResult) -> Self {
        ResultRecord {
            id,
            d1: r.d1_value,
            d2: r.d2_value,
            lower_bound: r.lower_bound,
            branch: r.branch,
            axis: r.axis.vector().into(),
            spectrum: r.spectrum,
            oracle: None,
            deviation: None,
            wall_time: None,
        }
    }
}

/// Flat CSV row for [`ResultRecord`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub id: String,
    pub d1: f64,
    pub d2: f64,
    pub lower_bound: f64,
    pub branch: Branch,
    pub axis_x: f64,
    pub axis_y: f64,
    pub axis_z: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub oracle: Option<f64>,
    pub deviation: Option<f64>,
    pub wall_time: Option<f64>,
}

impl From<&ResultRecord> for CsvRecord {
    fn from(r: &ResultRecord) -> Self {
        CsvRecord {
            id: r.id.clone(),
            d1: r.d1,
            d2: r.d2,
            lower_bound: r.lower_bound,
            branch: r.branch,
            axis_x: r.axis[0],
            axis_y: r.axis[1],
            axis_z: r.axis[2],
            lambda1: r.spectrum[0],
            lambda2: r.spectrum[1],
            lambda3: r.spectrum[2],
            oracle: r.oracle,
            deviation: r.deviation,
            wall_time: r.wall_time,
        }
    }
}

impl From<CsvRecord> for ResultRecord {
    fn from(c: CsvRecord) -> Self {
        ResultRecord {
            id: c.id,
            d1: c.d1,
            d2: c.d2,
            lower_bound: c.lower_bound,
            branch: c.branch,
            axis: [c.axis_x, c.axis_y, c.axis_z],
            spectrum: [c.lambda1, c.lambda2, c.lambda3],
            oracle: c.oracle,
            deviation: c.deviation,
            wall_time: c.wall_time,
        }
    }
}

pub fn to_csv(records: &[ResultRecord]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRecord::from(r))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv(text: &str) -> csv::Result<Vec<ResultRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize::<CsvRecord>()
        .map(|r| r.map(ResultRecord::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdiscord::{discord_d1, families};

    fn sample() -> Vec<ResultRecord> {
        let mut a = ResultRecord::new("a".into(), &discord_d1(&families::rho_theta(0.4).bloch()));
        a.oracle = Some(0.123456789012345);
        a.deviation = Some(1.5e-13);
        let b = ResultRecord::new("b, quoted".into(), &discord_d1(&families::werner(-0.3).unwrap().bloch()));
        vec![a, b]
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let recs = sample();
        let text = serde_json::to_string(&recs).unwrap();
        let back: Vec<ResultRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let recs = sample();
        let back = from_csv(&to_csv(&recs).unwrap()).unwrap();
        assert_eq!(back, recs);
    }
}
