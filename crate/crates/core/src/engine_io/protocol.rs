//! Gomocup text protocol over line streams. Coordinates on the wire are
//! 0-based `x,y` with x the column and y the row.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use log::{debug, info, warn};

use crate::board::{Board, Color, Square};
use crate::error::{Error, Result};

use super::{Engine, EngineConfig, ENGINE_NAME, ENGINE_VERSION};

/// One protocol connection: at most one game at a time.
pub struct Session {
    engine: Engine,
    board: Option<Board>,
    /// Stones of a pending `BOARD` upload as (row, col, own).
    upload: Option<Vec<(usize, usize, bool)>>,
    upload_error: Option<String>,
    ignored_info: HashSet<String>,
}

/// Parses `x,y` into (row, col).
fn parse_xy(s: &str) -> Result<(usize, usize)> {
    let mut it = s.trim().split(',').map(|t| t.trim().parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(x)), Some(Ok(y)), None) => Ok((y, x)),
        _ => Err(Error::Parse(format!("bad coordinates {:?}", s.trim()))),
    }
}

fn format_xy(b: &Board, s: Square) -> String {
    let (r, c) = b.row_col(s);
    format!("{c},{r}")
}

impl Session {
    pub fn new(config: EngineConfig) -> Result<Session> {
        Ok(Session {
            engine: Engine::new(config)?,
            board: None,
            upload: None,
            upload_error: None,
            ignored_info: HashSet::new(),
        })
    }

    pub fn board(&self) -> Option<&Board> {
        self.board.as_ref()
    }

    /// Handles one input line. Returns the reply lines and whether the
    /// session has ended.
    pub fn handle(&mut self, line: &str) -> (Vec<String>, bool) {
        let line = line.trim();
        if self.upload.is_some() {
            return (self.upload_line(line).into_iter().collect(), false);
        }
        if line.is_empty() {
            return (Vec::new(), false);
        }
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let cmd = cmd.to_ascii_uppercase();
        let reply = match cmd.as_str() {
            "END" => return (Vec::new(), true),
            "START" => self.start(rest),
            "RECTSTART" => self.rect_start(rest),
            "RESTART" => self.restart(),
            "BEGIN" => self.begin(),
            "TURN" => self.turn(rest),
            "TAKEBACK" => self.takeback(rest),
            "BOARD" => {
                if self.board.is_none() {
                    Err(Error::Precondition("no game started".into()))
                } else {
                    self.upload = Some(Vec::new());
                    self.upload_error = None;
                    return (Vec::new(), false);
                }
            }
            "INFO" => {
                self.info(rest);
                return (Vec::new(), false);
            }
            "ABOUT" => Ok(format!("name=\"{ENGINE_NAME}\", version=\"{ENGINE_VERSION}\"")),
            _ => Err(Error::Parse(format!("unknown command {cmd}"))),
        };
        let out = match reply {
            Ok(s) => s,
            Err(e) => format!("ERROR {e}"),
        };
        (vec![out], false)
    }

    fn new_board(&mut self, rows: usize, cols: usize) -> Result<String> {
        let b = Board::new(rows, cols).map_err(|_| Error::Config(format!("unsupported size {cols}x{rows}")))?;
        self.engine.new_game();
        self.board = Some(b);
        Ok("OK".into())
    }

    fn start(&mut self, rest: &str) -> Result<String> {
        let n: usize = rest.trim().parse().map_err(|_| Error::Parse(format!("bad size {:?}", rest.trim())))?;
        self.new_board(n, n)
    }

    fn rect_start(&mut self, rest: &str) -> Result<String> {
        let (rows, cols) = parse_xy(rest)?;
        self.new_board(rows, cols)
    }

    fn restart(&mut self) -> Result<String> {
        let b = self.board.as_ref().ok_or_else(|| Error::Precondition("no game started".into()))?;
        let (rows, cols) = (b.rows(), b.cols());
        self.new_board(rows, cols)
    }

    fn game(&mut self) -> Result<&mut Board> {
        self.board.as_mut().ok_or_else(|| Error::Precondition("no game started".into()))
    }

    /// Engine moves on the current board and reports the move.
    fn reply(&mut self) -> Result<String> {
        let b = self.board.as_ref().ok_or_else(|| Error::Precondition("no game started".into()))?;
        let d = self.engine.choose(b)?;
        if let Some(r) = &d.search {
            debug!("search {}", r.to_json(b));
        }
        let text = format_xy(b, d.square);
        self.game()?.play(d.square)?;
        Ok(text)
    }

    fn begin(&mut self) -> Result<String> {
        if self.game()?.stone_count() != 0 {
            return Err(Error::Precondition("BEGIN needs an empty board".into()));
        }
        self.reply()
    }

    fn turn(&mut self, rest: &str) -> Result<String> {
        let (r, c) = parse_xy(rest)?;
        let b = self.game()?;
        let s = b
            .try_square(r as i32, c as i32)
            .ok_or_else(|| Error::IllegalMove(format!("{c},{r} is off the board")))?;
        if !b.is_empty(s) {
            return Err(Error::IllegalMove(format!("{c},{r} is occupied")));
        }
        b.play(s)?;
        if b.is_over() {
            return Err(Error::GameOver);
        }
        self.reply()
    }

    fn takeback(&mut self, rest: &str) -> Result<String> {
        let (r, c) = parse_xy(rest)?;
        let b = self.game()?;
        match b.last_move() {
            Some(m) if b.row_col(m.square) == (r, c) => {
                b.unmake_move()?;
                Ok("OK".into())
            }
            _ => Err(Error::IllegalMove(format!("{},{} is not the last move", c, r))),
        }
    }

    fn info(&mut self, rest: &str) {
        let (key, value) = rest.trim().split_once(char::is_whitespace).unwrap_or((rest.trim(), ""));
        match key.to_ascii_lowercase().as_str() {
            "timeout_turn" => match value.trim().parse::<u64>() {
                // keep a tenth of the turn time in reserve
                Ok(ms) => self.engine.set_time_ms(Some((ms - ms / 10).max(1))),
                Err(_) => warn!("INFO timeout_turn: bad value {value:?}"),
            },
            k => {
                if self.ignored_info.insert(k.to_string()) {
                    info!("INFO {k} ignored");
                }
            }
        }
    }

    fn upload_line(&mut self, line: &str) -> Option<String> {
        if line.eq_ignore_ascii_case("DONE") {
            let stones = self.upload.take().unwrap_or_default();
            let result = match self.upload_error.take() {
                Some(e) => Err(Error::Parse(e)),
                None => self.load_position(&stones).and_then(|_| self.reply()),
            };
            return Some(result.unwrap_or_else(|e| format!("ERROR {e}")));
        }
        let parsed = line.rsplit_once(',').and_then(|(xy, f)| Some((parse_xy(xy).ok()?, f.trim().parse::<u8>().ok()?)));
        match parsed {
            Some(((r, c), f @ (1 | 2))) => self.upload.get_or_insert_with(Vec::new).push((r, c, f == 1)),
            _ => {
                self.upload_error.get_or_insert(format!("bad board line {line:?}"));
            }
        }
        None
    }

    /// Rebuilds the board from uploaded stones; the engine is the side to
    /// move, so stone counts decide its color.
    fn load_position(&mut self, stones: &[(usize, usize, bool)]) -> Result<()> {
        let b = self.game()?;
        let (rows, cols) = (b.rows(), b.cols());
        let own = stones.iter().filter(|s| s.2).count();
        let opp = stones.len() - own;
        let me = if own == opp {
            Color::Black
        } else if opp == own + 1 {
            Color::White
        } else {
            return Err(Error::IllegalMove(format!("{own} own and {opp} opponent stones")));
        };
        let mut black = Vec::new();
        let mut white = Vec::new();
        for &(r, c, mine) in stones {
            let s = b
                .try_square(r as i32, c as i32)
                .ok_or_else(|| Error::IllegalMove(format!("{c},{r} is off the board")))?;
            if (me == Color::Black) == mine { black.push(s) } else { white.push(s) }
        }
        let nb = Board::from_stones(rows, cols, &black, &white)?;
        if nb.is_over() {
            return Err(Error::GameOver);
        }
        self.engine.new_game();
        self.board = Some(nb);
        Ok(())
    }
}

/// Runs the protocol until `END` or end of input. Returns the exit status.
pub fn run_protocol(input: impl BufRead, mut output: impl Write, config: EngineConfig) -> Result<i32> {
    let mut session = Session::new(config)?;
    for line in input.lines() {
        let (replies, done) = session.handle(&line?);
        for r in replies {
            writeln!(output, "{r}")?;
        }
        output.flush()?;
        if done {
            break;
        }
    }
    Ok(0)
}
