use fhtdiag::types::C64;
use fhtdiag::verify::Check;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub check_id: String,
    pub anchor: String,
    pub inputs: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Evaluated values as (re, im) pairs; empty for pure checks.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub value: Vec<[f64; 2]>,
}

impl Record {
    pub fn from_check(c: Check) -> Self {
        Record {
            check_id: c.check_id,
            anchor: c.anchor,
            inputs: c.inputs,
            residual: c.residual,
            tolerance: c.tolerance,
            pass: c.pass,
            value: Vec::new(),
        }
    }

    pub fn with_value(check: Check, value: &[C64]) -> Self {
        let mut r = Record::from_check(check);
        r.value = value.iter().map(|z| [z.re, z.im]).collect();
        r
    }

    /// Re-judges the record against a tolerance given on the command line.
    pub fn retolerate(&mut self, tol: f64) {
        self.tolerance = tol;
        self.pass = self.residual.is_finite() && self.residual <= tol;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

fn value_field(v: &[[f64; 2]]) -> String {
    v.iter().map(|[re, im]| format!("{re:?},{im:?}")).collect::<Vec<_>>().join(";")
}

pub fn write(records: &[Record], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["check_id", "anchor", "inputs", "residual", "tolerance", "pass", "value"])?;
            for r in records {
                w.write_record([
                    r.check_id.clone(),
                    r.anchor.clone(),
                    r.inputs.clone(),
                    format!("{:?}", r.residual),
                    format!("{:?}", r.tolerance),
                    r.pass.to_string(),
                    value_field(&r.value),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        let c = Check::new("det", "det = 1", "z=0.3+0.4i".into(), 1.5e-16, 1e-12);
        vec![Record::with_value(c, &[C64::new(1.0, -0.25)])]
    }

    #[test]
    fn csv_has_header_and_quoted_pairs() {
        let mut buf = Vec::new();
        write(&sample(), Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "check_id,anchor,inputs,residual,tolerance,pass,value");
        assert_eq!(lines.next().unwrap(), "det,det = 1,z=0.3+0.4i,1.5e-16,1e-12,true,\"1.0,-0.25\"");
    }

    #[test]
    fn jsonl_round_trips_floats() {
        let mut buf = Vec::new();
        write(&sample(), Format::Jsonl, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["residual"].as_f64().unwrap(), 1.5e-16);
        assert_eq!(v["value"][0][1].as_f64().unwrap(), -0.25);
        assert_eq!(v["pass"], true);
    }

    #[test]
    fn retolerate_rejudges() {
        let mut r = sample().remove(0);
        r.retolerate(1e-17);
        assert!(!r.pass);
    }
}
