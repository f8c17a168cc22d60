//! Wire messages. Every message is one compact JSON object per line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::affect::{Emotion, EmotionScores};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Sentiment,
    Emotion,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Sentiment => "sentiment",
            Task::Emotion => "emotion",
        })
    }
}

/// First client line: `{"v":1,"hello":true}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientHello {
    pub v: u32,
    pub hello: bool,
}

impl Default for ClientHello {
    fn default() -> Self {
        Self {
            v: PROTOCOL_VERSION,
            hello: true,
        }
    }
}

/// First server line: `{"v":1,"capabilities":[...],"model":"..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handshake {
    #[serde(rename = "v")]
    pub protocol_version: u32,
    pub capabilities: Vec<Task>,
    #[serde(rename = "model")]
    pub model_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub id: u64,
    pub task: Task,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResponseBody {
    Valence(f64),
    Scores(EmotionScores),
    Error(String),
}

/// A server reply. `id` is `-1` when the server could not parse a request.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreResponse {
    pub id: i64,
    pub body: ResponseBody,
}

#[derive(Serialize, Deserialize)]
struct WireResponse {
    id: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    /// The line could not be attributed to any request.
    #[error("unparseable line: {0}")]
    Garbled(String),
    /// The line names a request but its payload is invalid.
    #[error("response {id}: {message}")]
    Invalid { id: i64, message: String },
}

impl ScoreResponse {
    pub fn to_line(&self) -> String {
        let (valence, error) = match &self.body {
            // Labels go out in vocabulary order rather than map order.
            ResponseBody::Scores(s) => {
                return format!(
                    "{{\"id\":{},\"scores\":{}}}",
                    self.id,
                    serde_json::to_string(s).expect("scores serialize")
                )
            }
            ResponseBody::Valence(v) => (Some(*v), None),
            ResponseBody::Error(e) => (None, Some(e.clone())),
        };
        let wire = WireResponse {
            id: self.id,
            valence,
            scores: None,
            error,
        };
        serde_json::to_string(&wire).expect("response serializes")
    }

    pub fn parse(line: &str) -> Result<Self, WireError> {
        let wire: WireResponse =
            serde_json::from_str(line).map_err(|e| WireError::Garbled(e.to_string()))?;
        let id = wire.id;
        let invalid = |message: String| WireError::Invalid { id, message };
        let body = match (wire.valence, wire.scores, wire.error) {
            (Some(v), None, None) => ResponseBody::Valence(v),
            (None, Some(map), None) => {
                let mut out = [0.0; 6];
                for e in Emotion::ALL {
                    out[e.index()] = *map
                        .get(e.label())
                        .ok_or_else(|| invalid(format!("missing emotion label `{e}`")))?;
                }
                ResponseBody::Scores(EmotionScores(out))
            }
            (None, None, Some(e)) => ResponseBody::Error(e),
            _ => {
                return Err(invalid(
                    "exactly one of valence, scores or error must be present".into(),
                ))
            }
        };
        Ok(ScoreResponse { id, body })
    }
}

impl ScoreRequest {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }

    pub fn parse(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

pub fn hello_line() -> String {
    serde_json::to_string(&ClientHello::default()).expect("hello serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_framing() {
        assert_eq!(hello_line(), r#"{"v":1,"hello":true}"#);
        let req = ScoreRequest {
            id: 3,
            task: Task::Sentiment,
            text: "Je « marche »\n".into(),
        };
        assert_eq!(req.to_line(), r#"{"id":3,"task":"sentiment","text":"Je « marche »\n"}"#);
        let hs = Handshake {
            protocol_version: 1,
            capabilities: vec![Task::Sentiment, Task::Emotion],
            model_name: "stub".into(),
        };
        assert_eq!(
            serde_json::to_string(&hs).unwrap(),
            r#"{"v":1,"capabilities":["sentiment","emotion"],"model":"stub"}"#
        );
    }

    #[test]
    fn response_lines() {
        let v = ScoreResponse {
            id: 4,
            body: ResponseBody::Valence(0.9),
        };
        assert_eq!(v.to_line(), r#"{"id":4,"valence":0.9}"#);
        let e = ScoreResponse {
            id: -1,
            body: ResponseBody::Error("bad".into()),
        };
        assert_eq!(e.to_line(), r#"{"id":-1,"error":"bad"}"#);
        let s = ScoreResponse {
            id: 0,
            body: ResponseBody::Scores(EmotionScores([0.5, 0.0, 0.0, 0.5, 0.0, 0.0])),
        };
        assert_eq!(
            s.to_line(),
            r#"{"id":0,"scores":{"sadness":0.5,"joy":0.0,"love":0.0,"anger":0.5,"fear":0.0,"surprise":0.0}}"#
        );
        assert_eq!(ScoreResponse::parse(&s.to_line()).unwrap(), s);
    }

    #[test]
    fn missing_label_is_named() {
        let err = ScoreResponse::parse(
            r#"{"id":2,"scores":{"sadness":0.5,"joy":0,"love":0,"anger":0.5,"surprise":0}}"#,
        )
        .unwrap_err();
        assert_eq!(
            err,
            WireError::Invalid {
                id: 2,
                message: "missing emotion label `fear`".into()
            }
        );
    }

    #[test]
    fn payload_must_be_exclusive() {
        assert!(matches!(
            ScoreResponse::parse(r#"{"id":1,"valence":0.2,"error":"x"}"#),
            Err(WireError::Invalid { id: 1, .. })
        ));
        assert!(matches!(
            ScoreResponse::parse(r#"{"id":1}"#),
            Err(WireError::Invalid { id: 1, .. })
        ));
        assert!(matches!(ScoreResponse::parse("nope"), Err(WireError::Garbled(_))));
    }
}
