//! JSON channel descriptions.
//!
//! Either `{"name": "<constructor>", "params": {"p": 0.5}}` or
//! `{"kraus": [M1, M2, ...]}` with each `M` a 2×2 array of `[re, im]` pairs.
//! A JSON channel report is also accepted; its `kraus` field is used.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};

pub type JsonMatrix = [[[f64; 2]; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ChannelSpec {
    Named {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Kraus {
        kraus: Vec<JsonMatrix>,
    },
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("F_lambda").is_some() {
            if let Some(kraus) = value.get("kraus") {
                return Ok(ChannelSpec::Kraus { kraus: serde_json::from_value(kraus.clone())? });
            }
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Build the channel. Does not check trace preservation; see `validate`.
    pub fn build(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Named { name, params } => KrausChannel::from_name(name, params),
            ChannelSpec::Kraus { kraus } => {
                if kraus.is_empty() {
                    return Err(Error::InvalidChannel("empty Kraus list".into()));
                }
                KrausChannel::new(kraus.iter().map(matrix_from_json).collect())
            }
        }
    }

    /// Explicit Kraus form of a channel, labels dropped.
    pub fn from_channel(c: &KrausChannel) -> Self {
        ChannelSpec::Kraus { kraus: c.kraus().iter().map(matrix_to_json).collect() }
    }
}

pub fn matrix_from_json(m: &JsonMatrix) -> Mat2 {
    Mat2::from_rows([
        [C64::new(m[0][0][0], m[0][0][1]), C64::new(m[0][1][0], m[0][1][1])],
        [C64::new(m[1][0][0], m[1][0][1]), C64::new(m[1][1][0], m[1][1][1])],
    ])
}

pub fn matrix_to_json(m: &Mat2) -> JsonMatrix {
    let c = |z: C64| [z.re, z.im];
    [[c(m.0[0][0]), c(m.0[0][1])], [c(m.0[1][0]), c(m.0[1][1])]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_reads_back() {
        let c = KrausChannel::amplitude_damping(0.3).unwrap();
        let r = crate::oneshot::report(&c, &crate::oneshot::NegativitySearch { restarts: 1, ..Default::default() });
        let back = ChannelSpec::parse(&serde_json::to_string(&r).unwrap()).unwrap().build().unwrap();
        assert_eq!(back.kraus(), c.kraus());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ChannelSpec::parse(r#"{"name": "identity", "parms": {}}"#).is_err());
        assert!(ChannelSpec::parse(r#"{"kraus": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn named_spec() {
        let s = ChannelSpec::parse(r#"{"name": "amplitude_damping", "params": {"p": 0.5}}"#).unwrap();
        assert_eq!(s.build().unwrap(), KrausChannel::amplitude_damping(0.5).unwrap());
        let s = ChannelSpec::parse(r#"{"name": "identity"}"#).unwrap();
        assert_eq!(s.build().unwrap(), KrausChannel::identity());
    }

    #[test]
    fn kraus_spec_round_trip() {
        let c = KrausChannel::random(3, 3).unwrap();
        let text = serde_json::to_string(&ChannelSpec::from_channel(&c)).unwrap();
        let back = ChannelSpec::parse(&text).unwrap().build().unwrap();
        assert_eq!(back.kraus(), c.kraus());
    }

    #[test]
    fn malformed_specs() {
        assert!(ChannelSpec::parse("{").is_err());
        assert!(ChannelSpec::parse(r#"{"kraus": [[[1, 0], [0, 0]]]}"#).is_err());
        assert!(ChannelSpec::parse(r#"{"kraus": []}"#).unwrap().build().is_err());
        assert!(ChannelSpec::parse(r#"{"name": "bogus"}"#).unwrap().build().is_err());
    }
}
