use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use gomoku_engine::analysis::analyze_board;
use gomoku_engine::board::Board;
use gomoku_engine::endgame::ThreatSet;
use gomoku_engine::engine_io::http::run_http_bridge;
use gomoku_engine::engine_io::protocol::run_protocol;
use gomoku_engine::engine_io::{Engine, EngineConfig, Solver};
use gomoku_engine::Result;

/// Free-style Gomoku engine. Speaks the Gomocup protocol on standard
/// input and output unless a port or a subcommand is given. Logs go to
/// standard error.
#[derive(Parser, Debug)]
#[command(name = "gomoku", version)]
struct Cli {
    /// Engine configuration file (key = value lines).
    #[arg(long, env = "GOMOKU_CONFIG")]
    config: Option<PathBuf>,
    /// Serve the JSON/HTTP bridge on this port.
    #[arg(long, env = "GOMOKU_PORT")]
    port: Option<u16>,
    /// Speak the Gomocup protocol (the default).
    #[arg(long)]
    protocol: bool,
    /// Solve the position in a board dump file and print the verdict.
    #[arg(long, value_name = "BOARDFILE")]
    solve: Option<PathBuf>,
    /// Search depth per move.
    #[arg(long)]
    depth: Option<u32>,
    /// Candidate moves kept per node.
    #[arg(long)]
    branch: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an endgame solver on a board dump and print JSON.
    Solve {
        board: PathBuf,
        /// bmm or tss.
        #[arg(long, default_value = "bmm")]
        solver: String,
        /// Also play three-making threats.
        #[arg(long)]
        threes: bool,
    },
    /// Print the static analysis of a board dump as JSON.
    Analyze { board: PathBuf },
    /// Search a board dump and print the result as JSON.
    Search { board: PathBuf },
}

fn load_config(cli: &Cli) -> Result<EngineConfig> {
    let mut config = match &cli.config {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };
    if let Some(d) = cli.depth {
        config.depth = Some(d);
        config.time_ms = None;
    }
    if let Some(b) = cli.branch {
        config.branch = b;
    }
    config.validate()?;
    Ok(config)
}

fn read_board(path: &Path) -> Result<Board> {
    Board::from_dump(&std::fs::read_to_string(path)?)
}

fn solve(config: EngineConfig, path: &Path, solver: &str, threes: bool) -> Result<()> {
    let solver = Solver::from_name(solver)
        .filter(|&s| s != Solver::Off)
        .ok_or_else(|| gomoku_engine::Error::Config(format!("unknown solver {solver}")))?;
    let b = read_board(path)?;
    let ts = if threes { ThreatSet::FOURS_AND_THREES } else { ThreatSet::FOURS };
    let r = Engine::new(config)?.solve(&b, solver, ts)?;
    println!("{}", r.to_json(&b));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    match &cli.command {
        Some(Command::Solve { board, solver, threes }) => return solve(config, board, solver, *threes),
        Some(Command::Analyze { board }) => {
            let b = read_board(board)?;
            println!("{}", analyze_board(&b)?.to_json(&b));
            return Ok(());
        }
        Some(Command::Search { board }) => {
            let b = read_board(board)?;
            let d = Engine::new(config)?.choose(&b)?;
            match d.search {
                Some(r) => println!("{}", r.to_json(&b)),
                None => {
                    let (row, col) = b.row_col(d.square);
                    println!("{}", serde_json::json!({"best_move": {"row": row, "col": col}}));
                }
            }
            return Ok(());
        }
        None => {}
    }
    if let Some(path) = &cli.solve {
        return solve(config, path, "bmm", false);
    }
    if let (Some(port), false) = (cli.port, cli.protocol) {
        let bridge = run_http_bridge(port, config)?;
        eprintln!("listening on http://{}", bridge.addr());
        bridge.join();
        return Ok(());
    }
    let stdin = io::stdin();
    run_protocol(BufReader::new(stdin.lock()), io::stdout().lock(), config)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("gomoku: {e}");
            ExitCode::FAILURE
        }
    }
}
