//! Versioned JSON report documents.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernels::ToleranceConfig;

pub const SCHEMA_VERSION: &str = "1.0";
pub const TOOL_NAME: &str = "wexsys";

/// JSON schema for [`ReportDocument`] at [`SCHEMA_VERSION`].
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report-1.0.schema.json");

pub(crate) fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl Provenance {
    pub fn now() -> Self {
        Provenance {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    /// Echo of the validated run configuration.
    pub input: Value,
    /// Tolerances in force for every numeric result below.
    pub tolerance: ToleranceConfig,
    pub results: Value,
    pub pass: bool,
    pub failures: Vec<String>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn new(
        command: &str,
        input: &impl Serialize,
        tolerance: &ToleranceConfig,
        results: &impl Serialize,
        failures: Vec<String>,
    ) -> Result<Self> {
        Ok(ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            input: to_value(input)?,
            tolerance: *tolerance,
            results: to_value(results)?,
            pass: failures.is_empty(),
            failures,
            provenance: Provenance::now(),
        })
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("report serialization failed: {e}")))
    }

    /// The document with its timestamp blanked, for reproducibility checks.
    pub fn without_timestamp(&self) -> Self {
        let mut doc = self.clone();
        doc.provenance.timestamp = String::new();
        doc
    }
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::invalid(format!("report serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_serializes_as_parts() {
        #[derive(Serialize)]
        struct W {
            #[serde(serialize_with = "serialize_complex")]
            z: Complex64,
        }
        let s = serde_json::to_string(&W {
            z: Complex64::new(1.5, -2.0),
        })
        .unwrap();
        assert_eq!(s, r#"{"z":{"re":1.5,"im":-2.0}}"#);
    }

    #[test]
    fn document_round_trips() {
        let doc = ReportDocument::new(
            "classify",
            &serde_json::json!({"alpha": 0.5}),
            &ToleranceConfig::default(),
            &1,
            vec![],
        )
        .unwrap();
        assert!(doc.pass);
        let back: ReportDocument = serde_json::from_str(&doc.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.provenance.tool, "wexsys");
        assert!(doc.without_timestamp().provenance.timestamp.is_empty());
    }

    #[test]
    fn schema_is_valid_json() {
        let v: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert_eq!(v["properties"]["schema_version"]["const"], SCHEMA_VERSION);
    }
}
