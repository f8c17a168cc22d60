//! Client for external scorers speaking the line protocol.
//!
//! Messages are compact JSON objects, one per `\n`-terminated line. The
//! client opens with `{"v":1,"hello":true}` and the server answers with its
//! capabilities; afterwards each request line gets exactly one response line,
//! in any order. Transports: a spawned subprocess (stdin/stdout), a raw TCP
//! stream (`tcp://host:port`), or HTTP (`http://host:port` or bare
//! `host:port`), where request lines are POSTed to `/score` and the reply body
//! carries the response lines.

mod external;
mod protocol;
mod transport;

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::net::{Shutdown, TcpStream};
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use thiserror::Error;

pub use external::ExternalScorer;
pub use protocol::{
    hello_line, ClientHello, Handshake, ResponseBody, ScoreRequest, ScoreResponse, Task, WireError,
    PROTOCOL_VERSION,
};

use crate::affect::EmotionScores;
use transport::{HttpExchange, LineChannel, RecvError, Transport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeConfig {
    pub handshake_timeout: Duration,
    /// Longest wait for the next response while requests are outstanding.
    pub request_timeout: Duration,
    pub batch_size: usize,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self {
            handshake_timeout: Duration::from_secs(10),
            request_timeout: Duration::from_secs(30),
            batch_size: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Command(Vec<String>),
    Tcp(String),
    Http(String),
}

impl Endpoint {
    pub fn parse(spec: &str) -> Result<Self, BridgeError> {
        let spec = spec.trim();
        if let Some(addr) = spec.strip_prefix("tcp://") {
            return Ok(Endpoint::Tcp(addr.to_owned()));
        }
        if spec.starts_with("http://") || spec.starts_with("https://") {
            return Ok(Endpoint::Http(spec.to_owned()));
        }
        if is_host_port(spec) {
            return Ok(Endpoint::Http(format!("http://{spec}")));
        }
        let argv = shell_words::split(spec).map_err(|e| BridgeError::Launch {
            command: spec.to_owned(),
            message: e.to_string(),
        })?;
        if argv.is_empty() {
            return Err(BridgeError::Launch {
                command: spec.to_owned(),
                message: "empty command".into(),
            });
        }
        Ok(Endpoint::Command(argv))
    }
}

fn is_host_port(s: &str) -> bool {
    match s.rsplit_once(':') {
        Some((host, port)) => {
            !host.is_empty()
                && host
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '-')
                && !port.is_empty()
                && port.parse::<u16>().is_ok()
        }
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ItemError {
    #[error("unsupported task `{0}`")]
    UnsupportedTask(Task),
    #[error("model error: {0}")]
    Model(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScorePayload {
    Valence(f64),
    Scores(EmotionScores),
}

/// Outcome for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreItem {
    pub id: u64,
    pub result: Result<ScorePayload, ItemError>,
}

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("failed to launch scorer `{command}`: {message}")]
    Launch { command: String, message: String },
    #[error("scorer at {endpoint} unreachable: {message}")]
    Unreachable { endpoint: String, message: String },
    #[error("no handshake within {0:?}")]
    HandshakeTimeout(Duration),
    #[error("scorer speaks protocol version {server}, expected {PROTOCOL_VERSION}")]
    VersionMismatch { server: u64 },
    #[error("bad handshake: {0}")]
    Handshake(String),
    #[error("scorer advertises no capabilities")]
    NoCapabilities,
    #[error("invalid request batch: {0}")]
    InvalidRequest(String),
    #[error("connection dropped ({}); {} request(s) unanswered", ack_note(*last_acknowledged), unanswered.len())]
    ConnectionDropped {
        last_acknowledged: Option<u64>,
        answered: Vec<ScoreItem>,
        unanswered: Vec<u64>,
    },
    #[error("no response within {after:?} ({}); {} request(s) unanswered", ack_note(*last_acknowledged), unanswered.len())]
    Timeout {
        after: Duration,
        last_acknowledged: Option<u64>,
        answered: Vec<ScoreItem>,
        unanswered: Vec<u64>,
    },
}

fn ack_note(id: Option<u64>) -> String {
    match id {
        Some(id) => format!("last acknowledged id {id}"),
        None => "nothing acknowledged".into(),
    }
}

/// A connected scorer. One caller at a time.
pub struct ScorerHandle {
    transport: Transport,
    handshake: Handshake,
    config: BridgeConfig,
    endpoint: String,
    next_id: u64,
    child: Option<Child>,
}

impl std::fmt::Debug for ScorerHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScorerHandle")
            .field("endpoint", &self.endpoint)
            .field("handshake", &self.handshake)
            .finish_non_exhaustive()
    }
}

/// Connects to (or launches) a scorer and exchanges the handshake.
pub fn open_scorer(endpoint: &str, config: BridgeConfig) -> Result<ScorerHandle, BridgeError> {
    match Endpoint::parse(endpoint)? {
        Endpoint::Command(argv) => {
            let mut child = Command::new(&argv[0])
                .args(&argv[1..])
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::inherit())
                .spawn()
                .map_err(|e| BridgeError::Launch {
                    command: endpoint.to_owned(),
                    message: e.to_string(),
                })?;
            let stdin = child.stdin.take().expect("stdin piped");
            let stdout = child.stdout.take().expect("stdout piped");
            let transport = Transport::Lines(LineChannel::new(stdout, stdin));
            let mut handle = ScorerHandle::handshake(transport, endpoint, config);
            if let Ok(h) = handle.as_mut() {
                h.child = Some(child);
            } else {
                let _ = child.kill();
                let _ = child.wait();
            }
            handle
        }
        Endpoint::Tcp(addr) => {
            let stream = TcpStream::connect(&addr).map_err(|e| BridgeError::Unreachable {
                endpoint: endpoint.to_owned(),
                message: e.to_string(),
            })?;
            let reader = stream.try_clone().map_err(|e| BridgeError::Unreachable {
                endpoint: endpoint.to_owned(),
                message: e.to_string(),
            })?;
            let closer = stream.try_clone().map_err(|e| BridgeError::Unreachable {
                endpoint: endpoint.to_owned(),
                message: e.to_string(),
            })?;
            let channel = LineChannel::new(reader, stream).on_close(move || {
                let _ = closer.shutdown(Shutdown::Both);
            });
            ScorerHandle::handshake(Transport::Lines(channel), endpoint, config)
        }
        Endpoint::Http(url) => {
            let exchange = HttpExchange::new(&url, config.handshake_timeout);
            let mut handle = ScorerHandle::handshake(Transport::Http(exchange), endpoint, config)?;
            let timeout = handle.config.request_timeout;
            if let Transport::Http(h) = &mut handle.transport {
                h.set_timeout(timeout);
            }
            Ok(handle)
        }
    }
}

impl ScorerHandle {
    /// Runs the protocol over an existing byte stream pair.
    pub fn from_io<R, W>(reader: R, writer: W, config: BridgeConfig) -> Result<Self, BridgeError>
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        Self::handshake(Transport::Lines(LineChannel::new(reader, writer)), "<io>", config)
    }

    fn handshake(mut transport: Transport, endpoint: &str, config: BridgeConfig) -> Result<Self, BridgeError> {
        transport.send(&[hello_line()]).map_err(|e| BridgeError::Unreachable {
            endpoint: endpoint.to_owned(),
            message: e.to_string(),
        })?;
        let line = match transport.recv(config.handshake_timeout) {
            Ok(line) => line,
            Err(RecvError::Timeout) => return Err(BridgeError::HandshakeTimeout(config.handshake_timeout)),
            Err(RecvError::Closed) => {
                return Err(BridgeError::Handshake("connection closed before handshake".into()))
            }
            Err(RecvError::Io(e)) => return Err(BridgeError::Handshake(e.to_string())),
        };
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| BridgeError::Handshake(e.to_string()))?;
        match value.get("v").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(PROTOCOL_VERSION) => {}
            Some(v) => return Err(BridgeError::VersionMismatch { server: v }),
            None => return Err(BridgeError::Handshake(format!("missing version in `{line}`"))),
        }
        let handshake: Handshake =
            serde_json::from_value(value).map_err(|e| BridgeError::Handshake(e.to_string()))?;
        if handshake.capabilities.is_empty() {
            return Err(BridgeError::NoCapabilities);
        }
        Ok(Self {
            transport,
            handshake,
            config,
            endpoint: endpoint.to_owned(),
            next_id: 0,
            child: None,
        })
    }

    pub fn handshake_info(&self) -> &Handshake {
        &self.handshake
    }

    pub fn supports(&self, task: Task) -> bool {
        self.handshake.capabilities.contains(&task)
    }

    pub fn model_name(&self) -> &str {
        &self.handshake.model_name
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Builds a request with the next connection-unique id.
    pub fn request(&mut self, task: Task, text: impl Into<String>) -> ScoreRequest {
        let id = self.next_id;
        self.next_id += 1;
        ScoreRequest {
            id,
            task,
            text: text.into(),
        }
    }

    /// Sends `requests` in batches and collects one outcome per request,
    /// sorted by id. Per-item failures are reported in place; only transport
    /// failures fail the whole call.
    pub fn score_batch(&mut self, requests: &[ScoreRequest]) -> Result<Vec<ScoreItem>, BridgeError> {
        let mut seen = HashSet::new();
        for r in requests {
            if !seen.insert(r.id) {
                return Err(BridgeError::InvalidRequest(format!("duplicate id {}", r.id)));
            }
            if r.text.is_empty() {
                return Err(BridgeError::InvalidRequest(format!("request {} has empty text", r.id)));
            }
        }
        self.next_id = self.next_id.max(requests.iter().map(|r| r.id + 1).max().unwrap_or(0));

        let mut done: BTreeMap<u64, Result<ScorePayload, ItemError>> = BTreeMap::new();
        let mut to_send = Vec::new();
        for r in requests {
            if self.supports(r.task) {
                to_send.push(r);
            } else {
                done.insert(r.id, Err(ItemError::UnsupportedTask(r.task)));
            }
        }

        let mut last_ack = None;
        for chunk in to_send.chunks(self.config.batch_size.max(1)) {
            let lines: Vec<String> = chunk.iter().map(|r| r.to_line()).collect();
            let mut pending: BTreeMap<u64, Task> = chunk.iter().map(|r| (r.id, r.task)).collect();
            if self.transport.send(&lines).is_err() {
                return Err(dropped(done, &to_send, last_ack));
            }
            while !pending.is_empty() {
                let line = match self.transport.recv(self.config.request_timeout) {
                    Ok(line) => line,
                    Err(RecvError::Timeout) => {
                        let (answered, unanswered) = split_outcomes(done, &to_send);
                        return Err(BridgeError::Timeout {
                            after: self.config.request_timeout,
                            last_acknowledged: last_ack,
                            answered,
                            unanswered,
                        });
                    }
                    Err(RecvError::Closed | RecvError::Io(_)) => {
                        return Err(dropped(done, &to_send, last_ack));
                    }
                };
                let (id, outcome) = match ScoreResponse::parse(&line) {
                    Ok(resp) => (resp.id, interpret(resp.body)),
                    Err(WireError::Invalid { id, message }) => (id, Err(ItemError::Protocol(message))),
                    // Unattributable lines cannot resolve any request.
                    Err(WireError::Garbled(_)) => continue,
                };
                let Ok(id) = u64::try_from(id) else { continue };
                let Some(task) = pending.remove(&id) else { continue };
                last_ack = Some(id);
                done.insert(id, outcome.and_then(|p| check_task(task, p)));
            }
        }
        Ok(done
            .into_iter()
            .map(|(id, result)| ScoreItem { id, result })
            .collect())
    }
}

fn interpret(body: ResponseBody) -> Result<ScorePayload, ItemError> {
    match body {
        ResponseBody::Valence(v) => Ok(ScorePayload::Valence(v)),
        ResponseBody::Scores(s) => Ok(ScorePayload::Scores(s)),
        ResponseBody::Error(e) => Err(ItemError::Model(e)),
    }
}

fn check_task(task: Task, payload: ScorePayload) -> Result<ScorePayload, ItemError> {
    match (task, &payload) {
        (Task::Sentiment, ScorePayload::Valence(v)) if (0.0..=1.0).contains(v) => Ok(payload),
        (Task::Sentiment, ScorePayload::Valence(v)) => {
            Err(ItemError::Protocol(format!("valence {v} outside [0, 1]")))
        }
        (Task::Emotion, ScorePayload::Scores(_)) => Ok(payload),
        (task, _) => Err(ItemError::Protocol(format!("payload does not match task `{task}`"))),
    }
}

fn split_outcomes(
    done: BTreeMap<u64, Result<ScorePayload, ItemError>>,
    requests: &[&ScoreRequest],
) -> (Vec<ScoreItem>, Vec<u64>) {
    let mut unanswered: Vec<u64> = requests
        .iter()
        .map(|r| r.id)
        .filter(|id| !done.contains_key(id))
        .collect();
    unanswered.sort_unstable();
    let answered = done
        .into_iter()
        .map(|(id, result)| ScoreItem { id, result })
        .collect();
    (answered, unanswered)
}

fn dropped(
    done: BTreeMap<u64, Result<ScorePayload, ItemError>>,
    requests: &[&ScoreRequest],
    last_acknowledged: Option<u64>,
) -> BridgeError {
    let (answered, unanswered) = split_outcomes(done, requests);
    BridgeError::ConnectionDropped {
        last_acknowledged,
        answered,
        unanswered,
    }
}

impl Drop for ScorerHandle {
    fn drop(&mut self) {
        if let Some(child) = self.child.as_mut() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
