use std::collections::VecDeque;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

#[derive(Debug)]
pub(crate) enum RecvError {
    Timeout,
    Closed,
    Io(io::Error),
}

/// Bidirectional newline-delimited stream. A reader thread feeds incoming
/// lines into a channel so receives can time out.
pub(crate) struct LineChannel {
    writer: Box<dyn Write + Send>,
    lines: Receiver<io::Result<String>>,
    on_close: Option<Box<dyn FnOnce() + Send>>,
}

impl LineChannel {
    pub(crate) fn new<R, W>(reader: R, writer: W) -> Self
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Self {
            writer: Box::new(writer),
            lines: rx,
            on_close: None,
        }
    }

    /// Runs `f` on drop, e.g. to unblock the reader thread by shutting a
    /// socket down.
    pub(crate) fn on_close(mut self, f: impl FnOnce() + Send + 'static) -> Self {
        self.on_close = Some(Box::new(f));
        self
    }

    fn send(&mut self, lines: &[String]) -> io::Result<()> {
        for line in lines {
            self.writer.write_all(line.as_bytes())?;
            self.writer.write_all(b"\n")?;
        }
        self.writer.flush()
    }

    fn recv(&mut self, timeout: Duration) -> Result<String, RecvError> {
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(RecvError::Io(e)),
            Err(RecvTimeoutError::Timeout) => Err(RecvError::Timeout),
            Err(RecvTimeoutError::Disconnected) => Err(RecvError::Closed),
        }
    }
}

impl Drop for LineChannel {
    fn drop(&mut self) {
        if let Some(f) = self.on_close.take() {
            f();
        }
    }
}

/// `POST /score` carrying request lines in the body; the reply body holds the
/// response lines.
pub(crate) struct HttpExchange {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
    pending: VecDeque<String>,
}

impl HttpExchange {
    pub(crate) fn new(base: &str, timeout: Duration) -> Self {
        let base = base.trim_end_matches('/');
        Self {
            url: format!("{base}/score"),
            timeout,
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            pending: VecDeque::new(),
        }
    }

    pub(crate) fn set_timeout(&mut self, timeout: Duration) {
        if timeout != self.timeout {
            self.timeout = timeout;
            self.agent = ureq::AgentBuilder::new().timeout(timeout).build();
        }
    }

    fn send(&mut self, lines: &[String]) -> io::Result<()> {
        let mut body = String::new();
        for line in lines {
            body.push_str(line);
            body.push('\n');
        }
        let reply = self
            .agent
            .post(&self.url)
            .set("Content-Type", "application/x-ndjson")
            .send_string(&body)
            .map_err(|e| io::Error::other(e.to_string()))?
            .into_string()?;
        self.pending
            .extend(reply.lines().filter(|l| !l.trim().is_empty()).map(str::to_owned));
        Ok(())
    }
}

pub(crate) enum Transport {
    Lines(LineChannel),
    Http(HttpExchange),
}

impl Transport {
    pub(crate) fn send(&mut self, lines: &[String]) -> io::Result<()> {
        match self {
            Transport::Lines(c) => c.send(lines),
            Transport::Http(h) => h.send(lines),
        }
    }

    pub(crate) fn recv(&mut self, timeout: Duration) -> Result<String, RecvError> {
        match self {
            Transport::Lines(c) => c.recv(timeout),
            // Everything the server will say arrived with the reply body.
            Transport::Http(h) => h.pending.pop_front().ok_or(RecvError::Closed),
        }
    }
}
