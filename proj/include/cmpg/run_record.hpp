#pragma once

#include <chrono>
#include <string>

#include "cmpg/game.hpp"
#include "json.hpp"

namespace cmpg {

using RecordJson = nlohmann::ordered_json;

// 64-bit FNV-1a of the canonical serialisation, as "fnv1a64:<16 hex digits>".
std::string game_fingerprint(const Game& g);

// {"value": x, "units": "unnormalized" | "normalized"}
RecordJson quantity(double value, bool normalized);

// Machine-readable summary of one CLI invocation. Everything except the
// "timings" object is a deterministic function of the inputs and flags.
class RunRecord {
 public:
  explicit RunRecord(std::string command);

  RecordJson& parameters() { return doc_["parameters"]; }
  RecordJson& results() { return doc_["results"]; }
  void set_game(const Game& g);
  void add_timing(const std::string& name, double seconds);

  std::string dump() const;

 private:
  RecordJson doc_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace cmpg
