#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cproc {

using Rng = std::mt19937_64;

// Unbiased draw from [0, n) by rejection. Unlike std::uniform_int_distribution
// the result sequence is identical across standard library implementations.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Fisher-Yates shuffle driven only by uniform_index.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// visited exactly once; callers write to disjoint slots.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

std::size_t default_workers();

// Shortest decimal text that parses back to the same double; "inf" for +inf.
std::string format_double(double x);

// Accepts plain decimals plus "inf"/"+inf"/"infinity".
double parse_double(std::string_view text);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update(double x);
  void update(std::uint64_t x);
  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace cproc
