//! Built-in metric gallery: the flat torus, a conformally flat torus family,
//! and the standard Hopf metric.  Gallery entries are materialized as metric
//! files and loaded through the ordinary metric-file path, so they exercise
//! the same parsing and validation as user input.

use crate::expr::{MetricError, MetricField};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("unknown gallery id {0:?} (try `gallery` for the list)")]
    UnknownId(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Gallery ids, in display order.
pub const IDS: [&str; 3] = ["torus_flat", "torus_conformal", "hopf_standard"];

/// Materialize the metric file for a gallery id.  `eps` only affects
/// `torus_conformal` (default 0.1).
pub fn toml_source(id: &str, eps: Option<f64>) -> Result<String, GalleryError> {
    match id {
        "torus_flat" => Ok(r#"[metric]
name = "torus_flat"
domain = "torus"
h11 = "1"
h12 = "0"
h21 = "0"
h22 = "1"

[torus]
periods = [1.0, 1.0, 1.0, 1.0]
"#
        .to_string()),
        "torus_conformal" => {
            let eps = eps.unwrap_or(0.1);
            let u = format!("exp({eps}*cos(pi*(z1 + zb1)))");
            Ok(format!(
                r#"[metric]
name = "torus_conformal"
domain = "torus"
h11 = "{u}"
h12 = "0"
h21 = "0"
h22 = "{u}"

[torus]
periods = [1.0, 1.0, 1.0, 1.0]
"#
            ))
        }
        "hopf_standard" => Ok(r#"[metric]
name = "hopf_standard"
domain = "hopf"
h11 = "1/(z1*zb1 + z2*zb2)"
h12 = "0"
h21 = "0"
h22 = "1/(z1*zb1 + z2*zb2)"
"#
        .to_string()),
        other => Err(GalleryError::UnknownId(other.to_string())),
    }
}

/// Load a gallery metric through the ordinary metric-file loader.
pub fn load(id: &str, eps: Option<f64>) -> Result<MetricField, GalleryError> {
    let text = toml_source(id, eps)?;
    Ok(MetricField::from_toml_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_has_three_families_and_reloads() {
        assert_eq!(IDS.len(), 3);
        for id in IDS {
            let m = load(id, Some(0.1)).unwrap();
            assert_eq!(m.name, id);
        }
        assert!(matches!(load("nope", None), Err(GalleryError::UnknownId(_))));
    }

    #[test]
    fn conformal_eps_is_substituted() {
        let text = toml_source("torus_conformal", Some(0.25)).unwrap();
        assert!(text.contains("exp(0.25*cos(pi*(z1 + zb1)))"));
        MetricField::from_toml_str(&text).unwrap();
    }
}
