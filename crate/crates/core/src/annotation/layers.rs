// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::model::{
    AnnotationRecord, Rule, Violation, LICENSE_CATEGORY, LINK_QUALITY, MENTION_QUALITY,
    MENTION_TYPE, RETRIEVAL_QUALITY,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "tagset", rename_all = "lowercase")]
pub enum LayerKind {
    /// A code from the named tagset.
    Code(&'static str),
    /// Free text.
    Text,
    /// Yes/no, written `Y` or `N`.
    Flag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: LayerKind,
}

/// Annotation layers in sheet column order.
pub const LAYERS: [Layer; 9] = [
    Layer { name: RETRIEVAL_QUALITY, kind: LayerKind::Code(RETRIEVAL_QUALITY) },
    Layer { name: MENTION_TYPE, kind: LayerKind::Code(MENTION_TYPE) },
    Layer { name: MENTION_QUALITY, kind: LayerKind::Code(MENTION_QUALITY) },
    Layer { name: "found_url", kind: LayerKind::Text },
    Layer { name: LINK_QUALITY, kind: LayerKind::Code(LINK_QUALITY) },
    Layer { name: "license_spdx_or_name", kind: LayerKind::Text },
    Layer { name: LICENSE_CATEGORY, kind: LayerKind::Code(LICENSE_CATEGORY) },
    Layer { name: "is_preprint", kind: LayerKind::Flag },
    Layer { name: "is_software_paper", kind: LayerKind::Flag },
];

/// Layers that agreement is computed on by default.
pub const AGREEMENT_LAYERS: [&str; 5] = [
    MENTION_TYPE,
    MENTION_QUALITY,
    RETRIEVAL_QUALITY,
    "is_preprint",
    "is_software_paper",
];

pub fn layer(name: &str) -> Option<&'static Layer> {
    LAYERS.iter().find(|l| l.name == name)
}

fn flag(v: Option<bool>) -> Option<String> {
    v.map(|b| if b { "Y" } else { "N" }.to_string())
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "y" | "yes" | "true" | "1" => Some(true),
        "n" | "no" | "false" | "0" => Some(false),
        _ => None,
    }
}

/// The layer's value as written in a sheet, `None` if unset.
pub fn layer_value(rec: &AnnotationRecord, name: &str) -> Option<String> {
    match name {
        RETRIEVAL_QUALITY => Some(rec.retrieval_quality.clone()).filter(|s| !s.is_empty()),
        MENTION_TYPE => rec.mention_type.clone(),
        MENTION_QUALITY => rec.mention_quality.clone(),
        "found_url" => rec.found_url.clone(),
        LINK_QUALITY => rec.link_quality.clone(),
        "license_spdx_or_name" => rec.license_spdx_or_name.clone(),
        LICENSE_CATEGORY => rec.license_category.clone(),
        "is_preprint" => flag(rec.is_preprint),
        "is_software_paper" => flag(rec.is_software_paper),
        _ => None,
    }
}

/// Sets a layer from its sheet text; empty text clears it.
pub fn set_layer(rec: &mut AnnotationRecord, name: &str, value: &str) -> Result<(), Violation> {
    let v = value.trim();
    let opt = (!v.is_empty()).then(|| v.to_string());
    let flag_value = |v: &str| -> Result<Option<bool>, Violation> {
        if v.is_empty() {
            return Ok(None);
        }
        parse_flag(v).map(Some).ok_or_else(|| {
            Violation::new(name, Rule::Malformed, format!("expected Y or N, found {v:?}"))
        })
    };
    match name {
        RETRIEVAL_QUALITY => rec.retrieval_quality = v.to_string(),
        MENTION_TYPE => rec.mention_type = opt,
        MENTION_QUALITY => rec.mention_quality = opt,
        "found_url" => rec.found_url = opt,
        LINK_QUALITY => rec.link_quality = opt,
        "license_spdx_or_name" => rec.license_spdx_or_name = opt,
        LICENSE_CATEGORY => rec.license_category = opt,
        "is_preprint" => rec.is_preprint = flag_value(v)?,
        "is_software_paper" => rec.is_software_paper = flag_value(v)?,
        other => {
            return Err(Violation::new(other, Rule::Malformed, "unknown layer"));
        }
    }
    Ok(())
}

/// True when no layer, confidence or note is set.
pub fn is_blank(rec: &AnnotationRecord) -> bool {
    LAYERS.iter().all(|l| layer_value(rec, l.name).is_none()) && rec.confidence == 0 && rec.notes.is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_layer_round_trips() {
        let mut rec = AnnotationRecord::default();
        for l in LAYERS {
            let v = match l.kind {
                LayerKind::Flag => "Y",
                _ => "X1",
            };
            set_layer(&mut rec, l.name, v).unwrap();
            assert_eq!(layer_value(&rec, l.name).as_deref(), Some(v), "{}", l.name);
            set_layer(&mut rec, l.name, "").unwrap();
            assert_eq!(layer_value(&rec, l.name), None);
        }
        assert!(is_blank(&rec));
    }

    #[test]
    fn flags() {
        let mut rec = AnnotationRecord::default();
        set_layer(&mut rec, "is_preprint", "no").unwrap();
        assert_eq!(rec.is_preprint, Some(false));
        assert!(set_layer(&mut rec, "is_preprint", "maybe").is_err());
        assert!(set_layer(&mut rec, "colour", "x").is_err());
    }
}
