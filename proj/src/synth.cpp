#include "bfpack/synth.hpp"

#include <cmath>
#include <random>

#include "bfpack/error.hpp"

namespace bfpack {

std::vector<Length> synth_lengths(const SynthSpec& spec, std::size_t count) {
  if (spec.max_seq_len == 0 || spec.median_fraction <= 0.0 ||
      spec.sigma <= 0.0 || spec.max_multiple == 0) {
    throw Error(ErrorKind::config, "invalid synthetic corpus parameters");
  }
  const double mu =
      std::log(spec.median_fraction * static_cast<double>(spec.max_seq_len));
  const double upper =
      static_cast<double>(spec.max_multiple) * spec.max_seq_len;

  std::mt19937_64 rng(spec.seed);
  std::lognormal_distribution<double> draw(mu, spec.sigma);
  std::vector<Length> out(count);
  for (auto& length : out) {
    double x;
    do {
      x = std::round(draw(rng));
    } while (x < 1.0 || x > upper);
    length = static_cast<Length>(x);
  }
  return out;
}

Corpus synth_corpus(const SynthSpec& spec, std::size_t count) {
  const auto lengths = synth_lengths(spec, count);
  return Corpus::from_lengths(lengths, spec.max_seq_len);
}

}  // namespace bfpack
