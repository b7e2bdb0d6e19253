//! Session loop serving one environment per client over stdio or TCP.

use std::fmt;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::str::FromStr;
use std::thread;

use super::protocol::{ErrorCode, Message};
use crate::env::Env;
use crate::scenario::ScenarioConfig;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transport {
    Stdio,
    Tcp(u16),
}

impl FromStr for Transport {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "stdio" {
            return Ok(Self::Stdio);
        }
        s.strip_prefix("tcp:")
            .and_then(|port| port.parse().ok())
            .map(Self::Tcp)
            .ok_or_else(|| format!("expected `stdio` or `tcp:PORT`, got `{s}`"))
    }
}

impl fmt::Display for Transport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stdio => f.write_str("stdio"),
            Self::Tcp(port) => write!(f, "tcp:{port}"),
        }
    }
}

/// Protocol state for one client.
pub struct Session {
    env: Env,
    last_id: Option<u64>,
    closed: bool,
}

impl Session {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        Ok(Self {
            env: Env::new(cfg)?,
            last_id: None,
            closed: false,
        })
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Answer one input line. Malformed input produces an error reply and
    /// leaves the session usable.
    pub fn handle_line(&mut self, line: &str) -> Message {
        let request = match Message::decode(line) {
            Ok(m) => m,
            Err(e) => return Message::error(None, ErrorCode::BadRequest, e.to_string()),
        };
        self.handle(request)
    }

    pub fn handle(&mut self, request: Message) -> Message {
        let id = request.id();
        if !request.is_request() {
            return Message::error(id, ErrorCode::BadRequest, "not a request kind");
        }
        let id = id.expect("requests carry an id");
        if let Some(last) = self.last_id {
            if id <= last {
                return Message::error(
                    Some(id),
                    ErrorCode::BadRequest,
                    format!("id {id} does not increase on previous id {last}"),
                );
            }
        }
        self.last_id = Some(id);

        let outcome = match request {
            Message::Hello { .. } => Ok(Message::obs_spec(id, self.env.layout())),
            Message::Reset { seed, .. } => self.env.reset(seed).map(|obs| Message::Obs {
                id,
                obs: obs.to_vec(),
            }),
            Message::Step { action, .. } => self.env.step(&action).map(|r| Message::Result {
                id,
                obs: r.obs.to_vec(),
                reward: r.reward,
                done: r.done,
                info: r.info,
            }),
            Message::Close { .. } => {
                self.closed = true;
                Ok(Message::Closed { id })
            }
            _ => unreachable!("filtered by is_request"),
        };
        outcome.unwrap_or_else(|e| Message::error(Some(id), ErrorCode::from(&e), e.to_string()))
    }
}

/// Serve one session until `close` or end of input. Blank lines are ignored.
pub fn run_session<R: BufRead, W: Write>(
    cfg: &ScenarioConfig,
    reader: R,
    mut writer: W,
) -> io::Result<()> {
    let mut session =
        Session::new(cfg.clone()).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = session.handle_line(&line);
        writer.write_all(reply.encode().as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio(cfg: &ScenarioConfig) -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    run_session(cfg, stdin.lock(), BufWriter::new(stdout.lock()))
}

/// Accept connections on `127.0.0.1:port`, one thread and one isolated
/// environment per connection. Runs until the listener fails.
pub fn serve_tcp(cfg: &ScenarioConfig, port: u16) -> io::Result<()> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    serve_listener(cfg, listener)
}

pub fn serve_listener(cfg: &ScenarioConfig, listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let cfg = cfg.clone();
        thread::spawn(move || {
            // A dropped connection only ends its own session.
            let _ = serve_connection(&cfg, stream);
        });
    }
    Ok(())
}

fn serve_connection(cfg: &ScenarioConfig, stream: TcpStream) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    run_session(cfg, reader, BufWriter::new(stream))
}

pub fn serve(cfg: &ScenarioConfig, transport: Transport) -> io::Result<()> {
    match transport {
        Transport::Stdio => serve_stdio(cfg),
        Transport::Tcp(port) => serve_tcp(cfg, port),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScenarioConfig {
        ScenarioConfig {
            flying_rows: 1,
            flying_cols: 2,
            ground_rows: 2,
            ground_cols: 1,
            bs_antennas: 1,
            slots: 2,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn transport_parsing() {
        assert_eq!("stdio".parse::<Transport>().unwrap(), Transport::Stdio);
        assert_eq!(
            "tcp:7000".parse::<Transport>().unwrap(),
            Transport::Tcp(7000)
        );
        assert!("tcp:".parse::<Transport>().is_err());
        assert!("udp:1".parse::<Transport>().is_err());
        assert_eq!(Transport::Tcp(9).to_string(), "tcp:9");
    }

    #[test]
    fn lifecycle_and_errors() {
        let mut s = Session::new(tiny()).unwrap();
        let layout = s.env.layout();
        match s.handle(Message::Hello { id: 1 }) {
            m @ Message::ObsSpec {
                obs_len,
                action_len,
                ..
            } => {
                assert_eq!(obs_len, layout.obs_len());
                assert_eq!(action_len, layout.action_len());
                assert_eq!(m.layout(), Some(layout));
            }
            other => panic!("{other:?}"),
        }
        let step = |id| Message::Step {
            id,
            action: vec![0.0; layout.action_len()],
        };
        assert!(matches!(
            s.handle(step(2)),
            Message::Error {
                id: Some(2),
                code: ErrorCode::NoActiveEpisode,
                ..
            }
        ));
        assert!(matches!(
            s.handle_line("{not json"),
            Message::Error {
                id: None,
                code: ErrorCode::BadRequest,
                ..
            }
        ));
        assert!(matches!(
            s.handle(Message::Reset { id: 3, seed: 0 }),
            Message::Obs { id: 3, .. }
        ));
        assert!(matches!(
            s.handle(Message::Step {
                id: 4,
                action: vec![0.0]
            }),
            Message::Error {
                code: ErrorCode::BadAction,
                ..
            }
        ));
        assert!(matches!(
            s.handle(step(5)),
            Message::Result { done: false, .. }
        ));
        assert!(matches!(
            s.handle(step(5)),
            Message::Error {
                code: ErrorCode::BadRequest,
                ..
            }
        ));
        assert!(matches!(
            s.handle(step(6)),
            Message::Result { done: true, .. }
        ));
        assert!(matches!(
            s.handle(step(7)),
            Message::Error {
                code: ErrorCode::EpisodeDone,
                ..
            }
        ));
        assert!(matches!(
            s.handle(Message::Closed { id: 8 }),
            Message::Error {
                code: ErrorCode::BadRequest,
                ..
            }
        ));
        assert!(matches!(
            s.handle(Message::Close { id: 9 }),
            Message::Closed { id: 9 }
        ));
        assert!(s.is_closed());
    }

    #[test]
    fn session_stops_at_close() {
        let input = "{\"kind\":\"hello\",\"id\":1}\n\n{\"kind\":\"close\",\"id\":2}\n{\"kind\":\"hello\",\"id\":3}\n";
        let mut out = Vec::new();
        run_session(&tiny(), input.as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], r#"{"kind":"closed","id":2}"#);
    }
}
