use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use gomoku_ffi::*;

fn new_game(config: &str) -> *mut GomokuGame {
    let text = CString::new(config).unwrap();
    let mut game = ptr::null_mut();
    let status = unsafe { gomoku_game_new(9, 9, text.as_ptr(), &mut game) };
    assert_eq!(status, GomokuStatus::Ok);
    assert!(!game.is_null());
    game
}

fn last_error() -> Option<String> {
    let p = gomoku_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn a_game_can_be_played_through_the_handle() {
    let game = new_game("depth = 2\ntime_ms = none");
    unsafe {
        let (mut rows, mut cols) = (0, 0);
        assert_eq!(gomoku_game_size(game, &mut rows, &mut cols), GomokuStatus::Ok);
        assert_eq!((rows, cols), (9, 9));
        for col in 0..4 {
            assert_eq!(gomoku_game_play(game, 0, col), GomokuStatus::Ok);
            assert_eq!(gomoku_game_play(game, 8, col), GomokuStatus::Ok);
        }
        let mut side = -1;
        assert_eq!(gomoku_game_to_move(game, &mut side), GomokuStatus::Ok);
        assert_eq!(side, GOMOKU_BLACK);
        // black completes the five at (0, 4)
        let (mut row, mut col) = (0, 0);
        assert_eq!(gomoku_game_engine_move(game, &mut row, &mut col), GomokuStatus::Ok);
        assert_eq!((row, col), (0, 4));
        let (mut winner, mut over) = (-1, false);
        assert_eq!(gomoku_game_winner(game, &mut winner), GomokuStatus::Ok);
        assert_eq!(gomoku_game_is_over(game, &mut over), GomokuStatus::Ok);
        assert_eq!((winner, over), (GOMOKU_BLACK, true));
        assert_eq!(gomoku_game_play(game, 4, 4), GomokuStatus::GameOver);
        assert!(last_error().unwrap().contains("over"));
        let mut json = ptr::null_mut();
        assert_eq!(gomoku_game_analysis_json(game, &mut json), GomokuStatus::GameOver);
        assert!(json.is_null());
        assert_eq!(gomoku_game_undo(game), GomokuStatus::Ok);
        assert_eq!(gomoku_game_winner(game, &mut winner), GomokuStatus::Ok);
        assert_eq!(winner, GOMOKU_EMPTY);
        assert!(last_error().is_none());
        gomoku_game_free(game);
    }
}

#[test]
fn analysis_is_returned_as_json() {
    let game = new_game("depth = 1\ntime_ms = none");
    unsafe {
        for (r, c) in [(4, 1), (0, 0), (4, 2), (0, 8), (4, 3), (8, 0)] {
            assert_eq!(gomoku_game_play(game, r, c), GomokuStatus::Ok);
        }
        let mut json = ptr::null_mut();
        assert_eq!(gomoku_game_analysis_json(game, &mut json), GomokuStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        gomoku_string_free(json);
        assert!(text.contains("\"verdict\":\"WinInSight\""), "{text}");
        assert!(text.contains("{\"col\":4,\"row\":4,"), "{text}");
        gomoku_game_free(game);
    }
}

#[test]
fn failures_report_a_status_and_a_message() {
    unsafe {
        let mut game = ptr::null_mut();
        let bad = CString::new("depth = deep").unwrap();
        assert_eq!(gomoku_game_new(0, 0, bad.as_ptr(), &mut game), GomokuStatus::Config);
        assert!(game.is_null());
        assert!(last_error().unwrap().contains("depth"));
        assert_eq!(gomoku_game_new(3, 3, ptr::null(), &mut game), GomokuStatus::Config);
        assert_eq!(gomoku_game_new(0, 0, ptr::null(), ptr::null_mut()), GomokuStatus::NullPointer);

        let game = new_game("");
        assert_eq!(gomoku_game_play(game, 9, 0), GomokuStatus::InvalidArgument);
        assert_eq!(gomoku_game_undo(game), GomokuStatus::NothingToUndo);
        assert_eq!(gomoku_game_play(game, 1, 1), GomokuStatus::Ok);
        assert_eq!(gomoku_game_play(game, 1, 1), GomokuStatus::IllegalMove);
        assert_eq!(gomoku_game_stone(game, 1, 1, ptr::null_mut()), GomokuStatus::NullPointer);
        let mut stone = -1;
        assert_eq!(gomoku_game_stone(game, 1, 1, &mut stone), GomokuStatus::Ok);
        assert_eq!(stone, GOMOKU_BLACK);
        assert_eq!(gomoku_game_play(ptr::null_mut(), 0, 0), GomokuStatus::NullPointer);
        assert_eq!(gomoku_game_to_move(ptr::null(), &mut stone), GomokuStatus::NullPointer);
        gomoku_game_free(game);
        gomoku_game_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_the_package() {
    let v = unsafe { CStr::from_ptr(gomoku_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn static_lib() -> PathBuf {
    // test binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("libgomoku_ffi.a")
}

#[test]
fn header_compiles_and_links_from_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/gomoku.h")).unwrap();
    for name in ["gomoku_game_new", "gomoku_game_engine_move", "gomoku_last_error", "GOMOKU_STATUS_ILLEGAL_MOVE"] {
        assert!(header.contains(name), "{name} missing from the header");
    }
    let lib = static_lib();
    assert!(lib.exists(), "{} not built", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(stdout.trim(), format!("ok {}", env!("CARGO_PKG_VERSION")));
}
