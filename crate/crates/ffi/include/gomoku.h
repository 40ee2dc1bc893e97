#ifndef GOMOKU_H
#define GOMOKU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Contents of a square and colors of players.
#define GOMOKU_EMPTY 0

#define GOMOKU_BLACK 1

#define GOMOKU_WHITE 2

typedef enum GomokuStatus {
  GOMOKU_STATUS_OK = 0,
  GOMOKU_STATUS_NULL_POINTER = 1,
  GOMOKU_STATUS_INVALID_ARGUMENT = 2,
  GOMOKU_STATUS_ILLEGAL_MOVE = 3,
  GOMOKU_STATUS_GAME_OVER = 4,
  GOMOKU_STATUS_NOTHING_TO_UNDO = 5,
  GOMOKU_STATUS_CONFIG = 6,
  GOMOKU_STATUS_INTERNAL = 7,
  GOMOKU_STATUS_PANIC = 8,
} GomokuStatus;

// Opaque game handle.
typedef struct GomokuGame GomokuGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a game. `config` is engine configuration text (`key = value`
// lines) or null for the defaults. Nonzero `rows` and `cols` override the
// configured board size. The handle is written to `*out` and must be
// released with `gomoku_game_free`.
//
// # Safety
// `config` is null or a NUL-terminated string; `out` is valid for writes.
enum GomokuStatus gomoku_game_new(uint32_t rows,
                                  uint32_t cols,
                                  const char *config,
                                  struct GomokuGame **out);

// Releases a game. Null is ignored.
//
// # Safety
// `game` is null or a handle from `gomoku_game_new` not yet freed.
void gomoku_game_free(struct GomokuGame *game);

// Plays the side to move at (`row`, `col`).
//
// # Safety
// `game` is null or a live handle.
enum GomokuStatus gomoku_game_play(struct GomokuGame *game, uint32_t row, uint32_t col);

// Takes back the last move.
//
// # Safety
// `game` is null or a live handle.
enum GomokuStatus gomoku_game_undo(struct GomokuGame *game);

// Lets the engine choose and play a move for the side to move, and writes
// the square it played.
//
// # Safety
// `game` is null or a live handle; `row` and `col` are valid for writes.
enum GomokuStatus gomoku_game_engine_move(struct GomokuGame *game, uint32_t *row, uint32_t *col);

// Writes the board size.
//
// # Safety
// `game` is null or a live handle; `rows` and `cols` are valid for writes.
enum GomokuStatus gomoku_game_size(const struct GomokuGame *game, uint32_t *rows, uint32_t *cols);

// Writes the contents of a square: `GOMOKU_EMPTY`, `GOMOKU_BLACK` or
// `GOMOKU_WHITE`.
//
// # Safety
// `game` is null or a live handle; `out` is valid for writes.
enum GomokuStatus gomoku_game_stone(const struct GomokuGame *game,
                                    uint32_t row,
                                    uint32_t col,
                                    int32_t *out);

// Writes the color to move.
//
// # Safety
// `game` is null or a live handle; `out` is valid for writes.
enum GomokuStatus gomoku_game_to_move(const struct GomokuGame *game, int32_t *out);

// Writes the winner, or `GOMOKU_EMPTY` while nobody has five.
//
// # Safety
// `game` is null or a live handle; `out` is valid for writes.
enum GomokuStatus gomoku_game_winner(const struct GomokuGame *game, int32_t *out);

// Writes whether the game has ended by a five or a full board.
//
// # Safety
// `game` is null or a live handle; `out` is valid for writes.
enum GomokuStatus gomoku_game_is_over(const struct GomokuGame *game, bool *out);

// Writes the position analysis as a JSON string, the same object the HTTP
// bridge returns. Release it with `gomoku_string_free`.
//
// # Safety
// `game` is null or a live handle; `out` is valid for writes.
enum GomokuStatus gomoku_game_analysis_json(const struct GomokuGame *game, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void gomoku_string_free(char *s);

// Message for the last failed call on this thread, or null after a
// successful one. Valid until the next call on the same thread.
const char *gomoku_last_error(void);

// Library version as a static string.
const char *gomoku_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GOMOKU_H */
