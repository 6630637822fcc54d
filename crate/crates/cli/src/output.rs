//! CSV and JSON emitters. CSV floats carry 17 significant digits; JSON floats
//! use the shortest representation that reads back to the same value.

use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus LF-terminated rows.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn floats(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| float(x)).collect();
        self.row(&cells);
    }

    pub fn into_artifact(self, name: &str) -> Artifact {
        Artifact::new(name, self.text.into_bytes())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON object `{format_version, command, ...body}` with a trailing LF.
pub fn json<T: Serialize>(name: &str, command: &str, body: &T) -> Artifact {
    let envelope = Envelope {
        format_version: FORMAT_VERSION,
        command,
        body,
    };
    let mut bytes = serde_json::to_vec_pretty(&envelope).expect("report serializes");
    bytes.push(b'\n');
    Artifact::new(name, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(float(-2.5), "-2.5000000000000000e0");
        let mut csv = Csv::new(&["a", "b"]);
        csv.floats(&[1.0, 0.1]);
        assert_eq!(
            csv.into_artifact("x.csv").bytes,
            b"a,b\n1.0000000000000000e0,1.0000000000000001e-1\n"
        );
    }

    #[test]
    fn json_envelope() {
        #[derive(Serialize)]
        struct Body {
            x: f64,
        }
        let a = json("r.json", "demo", &Body { x: 0.5 });
        let v: serde_json::Value = serde_json::from_slice(&a.bytes).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["command"], "demo");
        assert_eq!(v["x"], 0.5);
    }
}
