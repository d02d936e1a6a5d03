#include "cmpg/run_record.hpp"

#include <cstdint>
#include <cstdio>

#include "cmpg/game_io.hpp"

namespace cmpg {

std::string game_fingerprint(const Game& g) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : serialize_game(g)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

RecordJson quantity(double value, bool normalized) {
  RecordJson q;
  q["value"] = value;
  q["units"] = normalized ? "normalized" : "unnormalized";
  return q;
}

RunRecord::RunRecord(std::string command) {
  doc_["schema"] = "cmpg-run-record/1";
  doc_["command"] = std::move(command);
  doc_["parameters"] = RecordJson::object();
  doc_["game"] = nullptr;
  doc_["results"] = RecordJson::object();
  doc_["timings"] = RecordJson::object();
}

void RunRecord::set_game(const Game& g) {
  RecordJson game;
  game["fingerprint"] = game_fingerprint(g);
  game["states"] = g.num_states();
  game["reward_scale"] = g.reward_scale().str();
  doc_["game"] = std::move(game);
}

void RunRecord::add_timing(const std::string& name, double seconds) { doc_["timings"][name] = seconds; }

std::string RunRecord::dump() const { return doc_.dump(2) + "\n"; }

}  // namespace cmpg
