//! C interface to the engine. A game is an opaque handle owning a board and
//! an engine. Every call returns a [`GomokuStatus`]; on failure
//! [`gomoku_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gomoku_engine::board::{Board, Color};
use gomoku_engine::engine_io::http::analysis_json;
use gomoku_engine::engine_io::{Engine, EngineConfig};
use gomoku_engine::Error;

/// Contents of a square and colors of players.
pub const GOMOKU_EMPTY: i32 = 0;
pub const GOMOKU_BLACK: i32 = 1;
pub const GOMOKU_WHITE: i32 = 2;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GomokuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllegalMove = 3,
    GameOver = 4,
    NothingToUndo = 5,
    Config = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque game handle.
pub struct GomokuGame {
    board: Board,
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GomokuStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match e {
            Error::IllegalMove(_) | Error::Turn { .. } => GomokuStatus::IllegalMove,
            Error::GameOver => GomokuStatus::GameOver,
            Error::Underflow => GomokuStatus::NothingToUndo,
            Error::Config(_) | Error::Parse(_) => GomokuStatus::Config,
            _ => GomokuStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, records its error and turns panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GomokuStatus {
    set_error(None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GomokuStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("panic inside the engine".into()));
            GomokuStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GomokuStatus::NullPointer, format!("{what} is null"))
}

unsafe fn game_ref<'a>(game: *const GomokuGame) -> Result<&'a GomokuGame, Failure> {
    game.as_ref().ok_or_else(|| null("game"))
}

unsafe fn game_mut<'a>(game: *mut GomokuGame) -> Result<&'a mut GomokuGame, Failure> {
    game.as_mut().ok_or_else(|| null("game"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn color_code(c: Option<Color>) -> i32 {
    match c {
        None => GOMOKU_EMPTY,
        Some(Color::Black) => GOMOKU_BLACK,
        Some(Color::White) => GOMOKU_WHITE,
    }
}

fn square(b: &Board, row: u32, col: u32) -> Result<gomoku_engine::board::Square, Failure> {
    let (r, c) = (row as usize, col as usize);
    if r >= b.rows() || c >= b.cols() {
        return Err(Failure(GomokuStatus::InvalidArgument, format!("({row},{col}) is off the board")));
    }
    Ok(b.square(r, c))
}

/// Creates a game. `config` is engine configuration text (`key = value`
/// lines) or null for the defaults. Nonzero `rows` and `cols` override the
/// configured board size. The handle is written to `*out` and must be
/// released with `gomoku_game_free`.
///
/// # Safety
/// `config` is null or a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_new(
    rows: u32,
    cols: u32,
    config: *const c_char,
    out: *mut *mut GomokuGame,
) -> GomokuStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = if config.is_null() {
            ""
        } else {
            CStr::from_ptr(config)
                .to_str()
                .map_err(|_| Failure(GomokuStatus::InvalidArgument, "config is not UTF-8".into()))?
        };
        let mut config = EngineConfig::parse(text, None)?;
        if rows != 0 || cols != 0 {
            (config.rows, config.cols) = (rows as usize, cols as usize);
        }
        let board = Board::new(config.rows, config.cols)?;
        let engine = Engine::new(config)?;
        out.write(Box::into_raw(Box::new(GomokuGame { board, engine })));
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` is null or a handle from `gomoku_game_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_free(game: *mut GomokuGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Plays the side to move at (`row`, `col`).
///
/// # Safety
/// `game` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_play(game: *mut GomokuGame, row: u32, col: u32) -> GomokuStatus {
    guard(|| {
        let g = game_mut(game)?;
        let s = square(&g.board, row, col)?;
        g.board.play(s)?;
        Ok(())
    })
}

/// Takes back the last move.
///
/// # Safety
/// `game` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_undo(game: *mut GomokuGame) -> GomokuStatus {
    guard(|| {
        game_mut(game)?.board.unmake_move()?;
        Ok(())
    })
}

/// Lets the engine choose and play a move for the side to move, and writes
/// the square it played.
///
/// # Safety
/// `game` is null or a live handle; `row` and `col` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_engine_move(game: *mut GomokuGame, row: *mut u32, col: *mut u32) -> GomokuStatus {
    guard(|| {
        let g = game_mut(game)?;
        if row.is_null() || col.is_null() {
            return Err(null("row or col"));
        }
        let d = g.engine.choose(&g.board)?;
        g.board.play(d.square)?;
        let (r, c) = g.board.row_col(d.square);
        write(row, r as u32, "row")?;
        write(col, c as u32, "col")
    })
}

/// Writes the board size.
///
/// # Safety
/// `game` is null or a live handle; `rows` and `cols` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_size(game: *const GomokuGame, rows: *mut u32, cols: *mut u32) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        write(rows, g.board.rows() as u32, "rows")?;
        write(cols, g.board.cols() as u32, "cols")
    })
}

/// Writes the contents of a square: `GOMOKU_EMPTY`, `GOMOKU_BLACK` or
/// `GOMOKU_WHITE`.
///
/// # Safety
/// `game` is null or a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_stone(game: *const GomokuGame, row: u32, col: u32, out: *mut i32) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        let s = square(&g.board, row, col)?;
        write(out, color_code(g.board.stone(s).color()), "out")
    })
}

/// Writes the color to move.
///
/// # Safety
/// `game` is null or a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_to_move(game: *const GomokuGame, out: *mut i32) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        write(out, color_code(Some(g.board.to_move())), "out")
    })
}

/// Writes the winner, or `GOMOKU_EMPTY` while nobody has five.
///
/// # Safety
/// `game` is null or a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_winner(game: *const GomokuGame, out: *mut i32) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        write(out, color_code(g.board.winner()), "out")
    })
}

/// Writes whether the game has ended by a five or a full board.
///
/// # Safety
/// `game` is null or a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_is_over(game: *const GomokuGame, out: *mut bool) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        write(out, g.board.is_over(), "out")
    })
}

/// Writes the position analysis as a JSON string, the same object the HTTP
/// bridge returns. Release it with `gomoku_string_free`.
///
/// # Safety
/// `game` is null or a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gomoku_game_analysis_json(game: *const GomokuGame, out: *mut *mut c_char) -> GomokuStatus {
    guard(|| {
        let g = game_ref(game)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if g.board.is_over() {
            return Err(Error::GameOver.into());
        }
        let text = analysis_json(&g.board, &g.engine)?.to_string();
        let s = CString::new(text).map_err(|e| Failure(GomokuStatus::Internal, e.to_string()))?;
        out.write(s.into_raw());
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gomoku_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gomoku_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gomoku_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
