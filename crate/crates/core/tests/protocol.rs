use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Command, Stdio};
use std::thread;

use dualris::bridge::protocol::{ErrorCode, Message};
use dualris::bridge::server::serve_listener;
use dualris::env::{Env, Layout};
use dualris::scenario::ScenarioConfig;

fn tiny() -> ScenarioConfig {
    ScenarioConfig {
        flying_rows: 2,
        flying_cols: 1,
        ground_rows: 1,
        ground_cols: 2,
        bs_antennas: 2,
        slots: 3,
        ..ScenarioConfig::default()
    }
}

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn send(&mut self, m: &Message) -> Message {
        self.send_raw(&m.encode())
    }

    fn send_raw(&mut self, line: &str) -> Message {
        writeln!(self.writer, "{line}").unwrap();
        let mut reply = String::new();
        self.reader.read_line(&mut reply).unwrap();
        Message::decode(reply.trim_end()).unwrap()
    }
}

fn connect(port: u16) -> Client {
    let stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
    Client {
        reader: BufReader::new(stream.try_clone().unwrap()),
        writer: stream,
    }
}

#[test]
fn tcp_sessions_are_isolated_and_match_direct_env() {
    let cfg = tiny();
    let listener = TcpListener::bind(("127.0.0.1", 0)).unwrap();
    let port = listener.local_addr().unwrap().port();
    let server_cfg = cfg.clone();
    thread::spawn(move || serve_listener(&server_cfg, listener));

    let mut a = connect(port);
    let mut b = connect(port);
    let spec = a.send(&Message::Hello { id: 1 });
    let layout = spec.layout().unwrap();
    assert_eq!(layout, Layout::new(&cfg));

    // b has no episode even though a resets.
    assert!(matches!(
        a.send(&Message::Reset { id: 2, seed: 5 }),
        Message::Obs { id: 2, .. }
    ));
    let action = vec![0.1; layout.action_len()];
    match b.send(&Message::Step {
        id: 1,
        action: action.clone(),
    }) {
        Message::Error { code, .. } => assert_eq!(code, ErrorCode::NoActiveEpisode),
        other => panic!("{other:?}"),
    }

    let mut env = Env::new(cfg.clone()).unwrap();
    env.reset(5).unwrap();
    for id in 3..6 {
        let direct = env.step(&action).unwrap();
        match a.send(&Message::Step {
            id,
            action: action.clone(),
        }) {
            Message::Result {
                id: got,
                obs,
                reward,
                done,
                info,
            } => {
                assert_eq!(got, id);
                assert_eq!(obs, direct.obs.to_vec());
                assert_eq!(reward.to_bits(), direct.reward.to_bits());
                assert_eq!(done, direct.done);
                assert_eq!(info, direct.info);
            }
            other => panic!("{other:?}"),
        }
    }
    assert!(matches!(
        a.send_raw(r#"{"kind":"step","id":6,"action":[1,2]}"#),
        Message::Error {
            code: ErrorCode::EpisodeDone,
            ..
        }
    ));
    assert!(matches!(
        a.send(&Message::Close { id: 7 }),
        Message::Closed { id: 7 }
    ));
}

#[test]
fn stdio_server_via_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, tiny().to_json()).unwrap();
    let run = || {
        let mut child = Command::new(env!("CARGO_BIN_EXE_dualris"))
            .args(["serve", "--transport", "stdio", "--config"])
            .arg(&path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let script = concat!(
            "{\"kind\":\"hello\",\"id\":1}\n",
            "{\"kind\":\"reset\",\"id\":2,\"seed\":4}\n",
            "{oops\n",
            "{\"kind\":\"reset\",\"id\":2,\"seed\":4}\n",
            "{\"kind\":\"close\",\"id\":3}\n",
        );
        child
            .stdin
            .take()
            .unwrap()
            .write_all(script.as_bytes())
            .unwrap();
        let out = child.wait_with_output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run();
    assert_eq!(first, run());
    let text = String::from_utf8(first).unwrap();
    let kinds: Vec<String> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(kinds, ["obs_spec", "obs", "error", "error", "closed"]);
}
