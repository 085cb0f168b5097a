#include "stochgrad/rng.hpp"

#include <array>
#include <vector>

namespace stochgrad {

namespace {

void append_words(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * parts.size());
  for (auto p : parts) append_words(words, p);
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

RunRng::RunRng(std::uint64_t seed, std::uint64_t stream_id, Lane lane)
    : seed_(seed), stream_id_(stream_id), lane_(lane) {
  // A seed_seq over the full state costs tens of microseconds per event; a
  // hashed 64-bit key is enough to separate streams.
  engine_.seed(mix(mix(mix(seed) ^ stream_id) ^ static_cast<std::uint64_t>(lane)));
}

double RunRng::uniform() {
  ++counter_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace stochgrad
