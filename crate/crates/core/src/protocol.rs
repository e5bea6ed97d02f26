//! Newline-delimited JSON session protocol exposing reset/step.
//!
//! Each request line gets exactly one response line, in order:
//!
//! ```text
//! -> {"op":"reset","problem":"p1","request_id":1}
//! <- {"request_id":1,"ok":true,"observation":{...},"reward":0.0,"terminated":false,"truncated":false}
//! -> {"op":"step","action":0,"request_id":2}
//! <- {"request_id":2,"ok":true,"observation":{...},"reward":0.0,"terminated":false,"truncated":false,"info":{}}
//! -> {"op":"close","request_id":3}
//! <- {"request_id":3,"ok":true}
//! ```
//!
//! Failures carry `"ok":false` and `"error":{"code":...,"message":...}`.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::env::{Backend, EnvError, NativeEnv, Observation, StepInfo};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Reset,
    Step,
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireRequest {
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<u64>,
    pub request_id: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireError {
    pub code: String,
    pub message: String,
}

/// Field order here is the emitted key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub request_id: Option<i64>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info: Option<StepInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
}

impl WireResponse {
    fn ok(request_id: i64) -> Self {
        WireResponse {
            request_id: Some(request_id),
            ok: true,
            observation: None,
            reward: None,
            terminated: None,
            truncated: None,
            info: None,
            error: None,
        }
    }

    fn failure(request_id: Option<i64>, code: &str, message: impl Into<String>) -> Self {
        WireResponse {
            request_id,
            ok: false,
            error: Some(WireError { code: code.to_owned(), message: message.into() }),
            ..WireResponse::ok(0)
        }
    }

    /// Compact JSON, keys in declaration order.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serialises")
    }
}

fn error_code(err: &EnvError) -> &'static str {
    match err {
        EnvError::NotReset | EnvError::EpisodeOver => "bad_state",
        EnvError::ActionOutOfRange { .. } | EnvError::AlreadyProcessed(_) => "invalid_action",
        EnvError::UnknownProblem(_) | EnvError::NoProblems => "unknown_problem",
        _ => "env_error",
    }
}

/// One client's view of one environment.
pub struct Session<B> {
    env: B,
    closed: bool,
}

impl<B: Backend> Session<B> {
    pub fn new(env: B) -> Self {
        Session { env, closed: false }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn handle_line(&mut self, line: &str) -> WireResponse {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return WireResponse::failure(None, "bad_request", format!("malformed JSON: {e}")),
        };
        let request_id = value.get("request_id").and_then(Value::as_i64);
        let request: WireRequest = match serde_json::from_value(value) {
            Ok(r) => r,
            Err(e) => return WireResponse::failure(request_id, "bad_request", e.to_string()),
        };
        self.handle(request)
    }

    pub fn handle(&mut self, request: WireRequest) -> WireResponse {
        let id = request.request_id;
        match request.op {
            Op::Reset => {
                if request.action.is_some() {
                    return WireResponse::failure(Some(id), "bad_request", "reset takes no action");
                }
                match self.env.reset(request.problem.as_deref()) {
                    Ok(obs) => WireResponse {
                        observation: Some(obs),
                        reward: Some(0.0),
                        terminated: Some(false),
                        truncated: Some(false),
                        ..WireResponse::ok(id)
                    },
                    Err(e) => WireResponse::failure(Some(id), error_code(&e), e.to_string()),
                }
            }
            Op::Step => {
                if request.problem.is_some() {
                    return WireResponse::failure(Some(id), "bad_request", "step takes no problem");
                }
                let Some(action) = request.action else {
                    return WireResponse::failure(Some(id), "bad_request", "step requires an action");
                };
                let action = usize::try_from(action).unwrap_or(usize::MAX);
                match self.env.step(action) {
                    Ok(r) => WireResponse {
                        observation: Some(r.observation),
                        reward: Some(r.reward),
                        terminated: Some(r.terminated),
                        truncated: Some(r.truncated),
                        info: Some(r.info),
                        ..WireResponse::ok(id)
                    },
                    Err(e) => WireResponse::failure(Some(id), error_code(&e), e.to_string()),
                }
            }
            Op::Close => {
                if request.problem.is_some() || request.action.is_some() {
                    return WireResponse::failure(Some(id), "bad_request", "close takes no arguments");
                }
                self.closed = true;
                WireResponse::ok(id)
            }
        }
    }
}

/// Runs one session until `close` or end of input. Blank lines are ignored.
pub fn serve_session<B, R, W>(env: B, input: R, mut output: W) -> io::Result<()>
where
    B: Backend,
    R: BufRead,
    W: Write,
{
    let mut session = Session::new(env);
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = session.handle_line(&line);
        writeln!(output, "{}", response.to_line())?;
        output.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

/// Accepts connections forever, one thread and one fresh environment per
/// connection.
pub fn serve_tcp<F>(listener: TcpListener, make_env: F) -> io::Result<()>
where
    F: Fn() -> Result<NativeEnv, EnvError> + Send + Sync + 'static,
{
    let make_env = Arc::new(make_env);
    for stream in listener.incoming() {
        let stream = stream?;
        let make_env = Arc::clone(&make_env);
        thread::spawn(move || {
            let _ = handle_connection(stream, make_env.as_ref());
        });
    }
    Ok(())
}

fn handle_connection<F>(stream: TcpStream, make_env: &F) -> io::Result<()>
where
    F: Fn() -> Result<NativeEnv, EnvError>,
{
    let env = make_env().map_err(|e| io::Error::other(e.to_string()))?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_session(env, reader, stream)
}
