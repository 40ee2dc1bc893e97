//! JSON over HTTP for a browser front end. Every response carries
//! `schema_version`; errors are `{"error": {"code", "message"}}` with status
//! 400 (bad request), 404 (unknown game or route), 409 (illegal move or
//! finished game) or 429 (the game is busy with another request).

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, TryLockError};
use std::thread::JoinHandle;

use log::{debug, info};
use serde_json::{json, Value};
use tiny_http::{Header, Method, Request, Response, Server};

use crate::analysis::{analyze_board, Verdict};
use crate::board::{Board, Color};
use crate::error::{Error, Result};
use crate::eval_movegen::generate_moves;

use super::{Engine, EngineConfig, Solver};

pub const SCHEMA_VERSION: u32 = 1;

struct Game {
    board: Board,
    engine: Engine,
}

struct Bridge {
    config: EngineConfig,
    games: Mutex<HashMap<u64, Arc<Mutex<Game>>>>,
    next_id: AtomicU64,
}

/// A failed request: status, code and message.
struct Failure(u16, &'static str, String);

type Reply = std::result::Result<(u16, Value), Failure>;

fn bad_request(msg: impl Into<String>) -> Failure {
    Failure(400, "bad_request", msg.into())
}

fn not_found(msg: impl Into<String>) -> Failure {
    Failure(404, "not_found", msg.into())
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::IllegalMove(_) | Error::Turn { .. } => Failure(409, "illegal_move", e.to_string()),
            Error::GameOver => Failure(409, "game_over", e.to_string()),
            Error::Config(_) | Error::Parse(_) => bad_request(e.to_string()),
            _ => Failure(500, "internal", e.to_string()),
        }
    }
}

fn color_name(c: Color) -> &'static str {
    c.name()
}

fn square_json(b: &Board, s: crate::board::Square) -> Value {
    let (r, c) = b.row_col(s);
    json!({"row": r, "col": c})
}

/// Board state: rows of `.`, `X` (black) and `O` (white), move list and
/// result.
pub fn state_json(b: &Board) -> Value {
    let grid: Vec<String> = (0..b.rows())
        .map(|r| (0..b.cols()).map(|c| b.stone(b.square(r, c)).to_char()).collect())
        .collect();
    let moves: Vec<Value> = b
        .history()
        .map(|m| {
            let (r, c) = b.row_col(m.square);
            json!({"row": r, "col": c, "color": color_name(m.color)})
        })
        .collect();
    json!({
        "rows": b.rows(),
        "cols": b.cols(),
        "to_move": color_name(b.to_move()),
        "grid": grid,
        "moves": moves,
        "empty": b.size() - b.stone_count(),
        "winner": b.winner().map(color_name),
        "over": b.is_over(),
    })
}

/// Analysis report plus scored candidate moves: the best `branch` for an
/// open position, else the moves the verdict allows.
pub fn analysis_json(b: &Board, engine: &Engine) -> Result<Value> {
    let report = analyze_board(b)?;
    let scores = engine.scores();
    let moves: Vec<Value> = match report.verdict {
        Verdict::Open => generate_moves(b, scores, engine.config().branch)?
            .into_iter()
            .map(|(s, v)| {
                let (r, c) = b.row_col(s);
                json!({"row": r, "col": c, "score": v})
            })
            .collect(),
        ref v => v
            .moves()
            .iter()
            .map(|&s| {
                let (r, c) = b.row_col(s);
                json!({"row": r, "col": c, "score": scores.order_square(b, s)})
            })
            .collect(),
    };
    let mut out = report.to_json(b);
    out["moves"] = Value::Array(moves);
    Ok(out)
}

fn field<T: serde::de::DeserializeOwned>(body: &Value, key: &str) -> std::result::Result<Option<T>, Failure> {
    match body.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| bad_request(format!("{key}: {e}"))),
    }
}

impl Bridge {
    fn game(&self, id: &str) -> std::result::Result<(u64, Arc<Mutex<Game>>), Failure> {
        let id: u64 = id.parse().map_err(|_| not_found(format!("no game {id}")))?;
        let games = self.games.lock().expect("game table lock");
        games.get(&id).cloned().map(|g| (id, g)).ok_or_else(|| not_found(format!("no game {id}")))
    }

    fn with_game(&self, id: &str, f: impl FnOnce(u64, &mut Game) -> Reply) -> Reply {
        let (id, game) = self.game(id)?;
        let mut g = match game.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(Failure(429, "busy", format!("game {id} is busy"))),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        f(id, &mut g)
    }

    fn create(&self, body: &Value) -> Reply {
        let mut config = self.config.clone();
        if let Some(r) = field::<usize>(body, "rows")? {
            config.rows = r;
        }
        if let Some(c) = field::<usize>(body, "cols")? {
            config.cols = c;
        }
        let mut board = match field::<String>(body, "position")? {
            Some(dump) => Board::from_dump(&dump)?,
            None => Board::new(config.rows, config.cols)?,
        };
        if board.is_over() {
            return Err(Error::GameOver.into());
        }
        (config.rows, config.cols) = (board.rows(), board.cols());
        let engine = Engine::new(config)?;
        let mut engine_move = Value::Null;
        if field::<bool>(body, "engine_first")?.unwrap_or(false) {
            let d = engine.choose(&board)?;
            board.play(d.square)?;
            engine_move = square_json(&board, d.square);
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let state = state_json(&board);
        self.games.lock().expect("game table lock").insert(id, Arc::new(Mutex::new(Game { board, engine })));
        info!("game {id} created");
        Ok((201, json!({"id": id, "state": state, "engine_move": engine_move})))
    }

    fn play(&self, id: &str, body: &Value) -> Reply {
        let row = field::<usize>(body, "row")?.ok_or_else(|| bad_request("row is required"))?;
        let col = field::<usize>(body, "col")?.ok_or_else(|| bad_request("col is required"))?;
        self.with_game(id, |id, g| {
            g.board.play_rc(row, col)?;
            let mut engine_move = Value::Null;
            let mut search = Value::Null;
            if !g.board.is_over() {
                let d = g.engine.choose(&g.board)?;
                if let Some(r) = &d.search {
                    search = r.to_json(&g.board);
                }
                g.board.play(d.square)?;
                engine_move = square_json(&g.board, d.square);
            }
            let analysis = if g.board.is_over() { Value::Null } else { analysis_json(&g.board, &g.engine)? };
            Ok((
                200,
                json!({
                    "id": id,
                    "human_move": {"row": row, "col": col},
                    "engine_move": engine_move,
                    "state": state_json(&g.board),
                    "analysis": analysis,
                    "search": search,
                }),
            ))
        })
    }

    fn analyze(&self, id: &str) -> Reply {
        self.with_game(id, |id, g| Ok((200, json!({"id": id, "analysis": analysis_json(&g.board, &g.engine)?}))))
    }

    fn solve(&self, id: &str, body: &Value) -> Reply {
        let solver = match field::<String>(body, "solver")? {
            None => Solver::Bmm,
            Some(s) => Solver::from_name(&s).filter(|&s| s != Solver::Off).ok_or_else(|| bad_request(format!("unknown solver {s}")))?,
        };
        let threes = field::<bool>(body, "threes")?.unwrap_or(false);
        let ts = if threes { crate::endgame::ThreatSet::FOURS_AND_THREES } else { crate::endgame::ThreatSet::FOURS };
        self.with_game(id, |id, g| {
            let r = g.engine.solve(&g.board, solver, ts)?;
            Ok((200, json!({"id": id, "solver": solver.name(), "solve": r.to_json(&g.board)})))
        })
    }

    fn route(&self, method: &Method, path: &str, body: &Value) -> Reply {
        let parts: Vec<&str> = path.trim_matches('/').split('/').collect();
        match (method, parts.as_slice()) {
            (Method::Post, ["game"]) => self.create(body),
            (Method::Get, ["game", id]) => {
                self.with_game(id, |id, g| Ok((200, json!({"id": id, "state": state_json(&g.board)}))))
            }
            (Method::Delete, ["game", id]) => {
                let (id, _) = self.game(id)?;
                self.games.lock().expect("game table lock").remove(&id);
                Ok((200, json!({"deleted": id})))
            }
            (Method::Post, ["game", id, "move"]) => self.play(id, body),
            (Method::Post, ["game", id, "analyze"]) => self.analyze(id),
            (Method::Post, ["game", id, "solve"]) => self.solve(id, body),
            _ => Err(not_found(format!("no route {method} {path}"))),
        }
    }

    fn serve(&self, mut req: Request) {
        let mut text = String::new();
        let body = match req.as_reader().read_to_string(&mut text) {
            Err(e) => Err(bad_request(format!("unreadable body: {e}"))),
            Ok(_) if text.trim().is_empty() => Ok(json!({})),
            Ok(_) => serde_json::from_str::<Value>(&text).map_err(|e| bad_request(format!("bad JSON: {e}"))),
        };
        let path = req.url().split('?').next().unwrap_or("").to_string();
        let (status, mut value) = match body.and_then(|b| self.route(req.method(), &path, &b)) {
            Ok(ok) => ok,
            Err(Failure(status, code, message)) => (status, json!({"error": {"code": code, "message": message}})),
        };
        value["schema_version"] = json!(SCHEMA_VERSION);
        debug!("{} {} -> {}", req.method(), path, status);
        let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
        let resp = Response::from_string(value.to_string()).with_status_code(status).with_header(header);
        if let Err(e) = req.respond(resp) {
            debug!("response not delivered: {e}");
        }
    }
}

/// A running bridge. Dropping it leaves the server running; call
/// [`HttpBridge::shutdown`] to stop it.
pub struct HttpBridge {
    addr: SocketAddr,
    server: Arc<Server>,
    thread: Option<JoinHandle<()>>,
}

impl HttpBridge {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Blocks until the server stops.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Serves the bridge on 127.0.0.1:`port` (0 picks a free port). Each request
/// runs on its own thread; requests for one game are serialized.
pub fn run_http_bridge(port: u16, config: EngineConfig) -> Result<HttpBridge> {
    config.validate()?;
    let server = Server::http(("127.0.0.1", port)).map_err(|e| Error::Io(e.to_string()))?;
    let addr = server
        .server_addr()
        .to_ip()
        .ok_or_else(|| Error::Io("bridge is not on an IP socket".into()))?;
    let server = Arc::new(server);
    let bridge = Arc::new(Bridge { config, games: Mutex::new(HashMap::new()), next_id: AtomicU64::new(0) });
    let srv = Arc::clone(&server);
    let thread = std::thread::spawn(move || {
        for req in srv.incoming_requests() {
            let b = Arc::clone(&bridge);
            std::thread::spawn(move || b.serve(req));
        }
    });
    info!("HTTP bridge listening on {addr}");
    Ok(HttpBridge { addr, server, thread: Some(thread) })
}
