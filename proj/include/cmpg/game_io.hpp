#pragma once

#include <string>
#include <string_view>

#include "cmpg/game.hpp"

namespace cmpg {

// Game documents are JSON:
//   {
//     "states": ["u", "w"],
//     "gamma1": {"u": ["a1", "a2"], "w": ["a"]},
//     "gamma2": {"u": ["b1", "b2"], "w": ["b"]},
//     "transitions": [
//       {"from": "u", "a1": "a1", "a2": "b1", "reward": "2",
//        "successors": {"u": "1/2", "w": "1/2"}}, ...],
//     "reward_scale": "2"
//   }
// Rationals are strings "p/q" or integer strings. Syntax errors carry the
// line number; semantic errors name the offending field or (state, a1, a2).
Game parse_game(std::string_view text);
std::string serialize_game(const Game& g);

// Strategy documents: {"player": 1, "strategy": {"u": {"a1": "1/2", ...}, ...}}.
// Probabilities may be rational strings (exact tag) or JSON numbers (float
// tag); a document mixing both is read as float-tagged.
StationaryStrategy parse_strategy(const Game& g, std::string_view text);
std::string serialize_strategy(const Game& g, const StationaryStrategy& sigma);

// Reads a whole file, or standard input for "-". Throws Error on I/O failure.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace cmpg
