#include <map>
#include <optional>

#include "cmpg/error.hpp"
#include "cmpg/generators.hpp"

namespace cmpg {

namespace {

struct Fraction {
  std::int64_t p;
  std::int64_t q;
};

class CountingOracle {
 public:
  CountingOracle(const std::function<bool(std::int64_t, std::int64_t)>& oracle) : oracle_(oracle) {}

  bool operator()(const Fraction& f) {
    const Rational x(BigInt(static_cast<long>(f.p)), BigInt(static_cast<long>(f.q)));
    if (const auto it = cache_.find(x); it != cache_.end()) return it->second;
    const bool answer = oracle_(f.p, f.q);
    ++calls_;
    cache_.emplace(x, answer);
    // "a >= x" must hold for everything below a true answer and fail for
    // everything above a false one.
    if (answer) {
      if (!highest_true_ || *highest_true_ < x) highest_true_ = x;
    } else {
      if (!lowest_false_ || x < *lowest_false_) lowest_false_ = x;
    }
    if (highest_true_ && lowest_false_ && *lowest_false_ <= *highest_true_) {
      throw SolverError("inconsistent oracle: a >= " + highest_true_->str() + " but not a >= " + lowest_false_->str());
    }
    return answer;
  }

  std::size_t calls() const { return calls_; }

 private:
  const std::function<bool(std::int64_t, std::int64_t)>& oracle_;
  std::map<Rational, bool> cache_;
  std::optional<Rational> highest_true_;
  std::optional<Rational> lowest_false_;
  std::size_t calls_ = 0;
};

// Largest t in [1, limit] with test(t) true, given test(1) is true and test is
// monotone (true then false). Galloping then bisection.
template <class Test>
std::int64_t longest_run(std::int64_t limit, Test&& test) {
  std::int64_t good = 1, step = 1;
  std::int64_t bad = limit + 1;
  while (good < limit) {
    const std::int64_t probe = good + step > limit ? limit : good + step;
    if (test(probe)) {
      good = probe;
      step *= 2;
    } else {
      bad = probe;
      break;
    }
  }
  while (bad - good > 1) {
    const std::int64_t mid = good + (bad - good) / 2;
    (test(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace

KwekMehlhornResult kwek_mehlhorn(const std::function<bool(std::int64_t, std::int64_t)>& oracle, std::int64_t b) {
  if (b < 1) throw PreconditionError("kwek_mehlhorn needs b >= 1");
  if (b > (std::int64_t{1} << 40)) throw PreconditionError("kwek_mehlhorn: b is too large");
  CountingOracle ask(oracle);
  const auto result = [&](const Fraction& f) {
    return KwekMehlhornResult{Rational(BigInt(static_cast<long>(f.p)), BigInt(static_cast<long>(f.q))), ask.calls()};
  };
  if (!ask({0, 1})) throw SolverError("inconsistent oracle: denies a >= 0");
  if (ask({1, 1})) return result({1, 1});

  // Invariant: lo <= a < hi, lo and hi adjacent in the Stern-Brocot tree.
  Fraction lo{0, 1}, hi{1, 1};
  for (;;) {
    const Fraction mid{lo.p + hi.p, lo.q + hi.q};
    if (mid.q > b) break;
    if (ask(mid)) {
      // Move lo towards hi: lo + t*hi for the largest admissible t.
      const std::int64_t limit = (b - lo.q) / hi.q;
      const std::int64_t t = longest_run(limit, [&](std::int64_t s) { return ask({lo.p + s * hi.p, lo.q + s * hi.q}); });
      lo = {lo.p + t * hi.p, lo.q + t * hi.q};
    } else {
      const std::int64_t limit = (b - hi.q) / lo.q;
      const std::int64_t t = longest_run(limit, [&](std::int64_t s) { return !ask({hi.p + s * lo.p, hi.q + s * lo.q}); });
      hi = {hi.p + t * lo.p, hi.q + t * lo.q};
    }
  }
  return result(lo);
}

}  // namespace cmpg
