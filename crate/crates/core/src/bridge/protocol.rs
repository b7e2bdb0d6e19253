//! Newline-delimited JSON messages exchanged with an agent.
//!
//! Every line is one JSON object tagged by `kind`. Clients send `hello`,
//! `reset`, `step` and `close`; the server answers each with exactly one of
//! `obs_spec`, `obs`, `result`, `closed` or `error` carrying the same `id`.

use serde::{Deserialize, Serialize};

use crate::env::{Layout, StepInfo};
use crate::Error;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    BadRequest,
    BadAction,
    NoActiveEpisode,
    EpisodeDone,
    InvalidConfig,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BadRequest => "bad-request",
            Self::BadAction => "bad-action",
            Self::NoActiveEpisode => "no-active-episode",
            Self::EpisodeDone => "episode-done",
            Self::InvalidConfig => "invalid-config",
            Self::Internal => "internal",
        }
    }
}

impl From<&Error> for ErrorCode {
    fn from(e: &Error) -> Self {
        match e {
            Error::NoActiveEpisode => Self::NoActiveEpisode,
            Error::EpisodeDone => Self::EpisodeDone,
            Error::ActionLength { .. } | Error::NonFiniteAction(_) => Self::BadAction,
            Error::Invariant { .. } | Error::UnknownKey(_) => Self::InvalidConfig,
            Error::Parse(_) => Self::BadRequest,
            _ => Self::Internal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Message {
    Hello {
        id: u64,
    },
    Reset {
        id: u64,
        seed: u64,
    },
    Step {
        id: u64,
        action: Vec<f64>,
    },
    Close {
        id: u64,
    },
    /// Reply to `hello`: protocol version and the dimension block.
    ObsSpec {
        id: u64,
        version: u32,
        #[serde(rename = "M")]
        m: usize,
        #[serde(rename = "K")]
        k: usize,
        #[serde(rename = "F")]
        f: usize,
        #[serde(rename = "N")]
        n: usize,
        obs_len: usize,
        action_len: usize,
    },
    Obs {
        id: u64,
        obs: Vec<f64>,
    },
    Result {
        id: u64,
        obs: Vec<f64>,
        reward: f64,
        done: bool,
        info: StepInfo,
    },
    Closed {
        id: u64,
    },
    Error {
        id: Option<u64>,
        code: ErrorCode,
        message: String,
    },
}

impl Message {
    pub fn id(&self) -> Option<u64> {
        match self {
            Self::Hello { id }
            | Self::Reset { id, .. }
            | Self::Step { id, .. }
            | Self::Close { id }
            | Self::ObsSpec { id, .. }
            | Self::Obs { id, .. }
            | Self::Result { id, .. }
            | Self::Closed { id } => Some(*id),
            Self::Error { id, .. } => *id,
        }
    }

    pub fn obs_spec(id: u64, layout: Layout) -> Self {
        Self::ObsSpec {
            id,
            version: PROTOCOL_VERSION,
            m: layout.m,
            k: layout.k,
            f: layout.f,
            n: layout.n,
            obs_len: layout.obs_len(),
            action_len: layout.action_len(),
        }
    }

    /// The layout announced by an `obs_spec` message.
    pub fn layout(&self) -> Option<Layout> {
        match *self {
            Self::ObsSpec { m, k, f, n, .. } => Some(Layout { m, k, f, n }),
            _ => None,
        }
    }

    pub fn is_request(&self) -> bool {
        matches!(
            self,
            Self::Hello { .. } | Self::Reset { .. } | Self::Step { .. } | Self::Close { .. }
        )
    }

    pub fn error(id: Option<u64>, code: ErrorCode, message: impl Into<String>) -> Self {
        Self::Error {
            id,
            code,
            message: message.into(),
        }
    }

    /// One protocol line, without the trailing newline.
    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("messages serialize")
    }

    pub fn decode(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn info(rates: Vec<f64>) -> StepInfo {
        StepInfo {
            min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
            min_slot_rate: 0.5,
            dl_rates: rates.clone(),
            ul_rates: rates.clone(),
            avg_rates: rates.clone(),
            rates,
            boundary: true,
            power_used: 9.5,
            clamp_count: 2,
            position: [1.0, 2.0, 100.0],
        }
    }

    #[test]
    fn wire_format() {
        let hello = Message::decode(r#"{"kind":"hello","id":1}"#).unwrap();
        assert_eq!(hello, Message::Hello { id: 1 });
        let spec = Message::obs_spec(
            1,
            Layout {
                m: 1,
                k: 1,
                f: 1,
                n: 1,
            },
        );
        assert_eq!(
            spec.encode(),
            r#"{"kind":"obs_spec","id":1,"version":1,"M":1,"K":1,"F":1,"N":1,"obs_len":15,"action_len":7}"#
        );
        let err = Message::error(Some(3), ErrorCode::NoActiveEpisode, "reset first");
        assert_eq!(
            err.encode(),
            r#"{"kind":"error","id":3,"code":"no-active-episode","message":"reset first"}"#
        );
        assert!(Message::decode(r#"{"kind":"hello","id":1,"extra":0}"#).is_err());
        assert!(Message::decode(r#"{"kind":"dance","id":1}"#).is_err());
    }

    #[test]
    fn codes_match_strings() {
        for code in [
            ErrorCode::BadRequest,
            ErrorCode::BadAction,
            ErrorCode::NoActiveEpisode,
            ErrorCode::EpisodeDone,
            ErrorCode::InvalidConfig,
            ErrorCode::Internal,
        ] {
            assert_eq!(serde_json::to_value(code).unwrap(), code.as_str());
        }
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |x| x.is_finite()),
            -1e3..1e3
        ]
    }

    fn message() -> impl Strategy<Value = Message> {
        prop_oneof![
            any::<u64>().prop_map(|id| Message::Hello { id }),
            (any::<u64>(), any::<u64>()).prop_map(|(id, seed)| Message::Reset { id, seed }),
            (any::<u64>(), prop::collection::vec(finite(), 0..20))
                .prop_map(|(id, action)| Message::Step { id, action }),
            any::<u64>().prop_map(|id| Message::Close { id }),
            (any::<u64>(), 1..5usize, 1..5usize, 1..9usize, 1..9usize)
                .prop_map(|(id, m, k, f, n)| Message::obs_spec(id, Layout { m, k, f, n })),
            (any::<u64>(), prop::collection::vec(finite(), 0..20))
                .prop_map(|(id, obs)| Message::Obs { id, obs }),
            (
                any::<u64>(),
                prop::collection::vec(finite(), 0..10),
                finite(),
                any::<bool>(),
                prop::collection::vec(0.0..30.0f64, 1..5)
            )
                .prop_map(|(id, obs, reward, done, rates)| Message::Result {
                    id,
                    obs,
                    reward,
                    done,
                    info: info(rates),
                }),
            any::<u64>().prop_map(|id| Message::Closed { id }),
            (proptest::option::of(any::<u64>()), ".*").prop_map(|(id, message)| Message::Error {
                id,
                code: ErrorCode::EpisodeDone,
                message,
            }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(m in message()) {
            let line = m.encode();
            prop_assert!(!line.contains('\n'));
            prop_assert_eq!(Message::decode(&line).unwrap(), m);
        }
    }
}
