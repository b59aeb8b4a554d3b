#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

// Binary star-shaped process: X0 is a fair coin and every later token copies
// X0 with probability p (flips it with q = 1 - p). Model A sees X0; model B
// was trained on windows with X0 cut off and must infer it from the rest.
// All losses are in nats.

namespace bfpack::toy {

/// Largest m accepted by the exact O(m) summations.
inline constexpr std::uint32_t kDefaultMaxPosition = 10'000;

struct ToyParams {
  double p = 0.75;
  std::uint32_t m = 1;
};

/// Entropy -p ln p - q ln q of the next token given X0. Requires p in (0, 1).
double model_a_loss(double p);

/// Model B's log-probabilities for the next token being 0 and 1, after
/// observing m tokens of which k are zeros.
struct LogPrediction {
  double zero = 0.0;
  double one = 0.0;
};
LogPrediction model_b_log_prediction(double p, std::uint32_t m,
                                     std::uint32_t k);

/// Model B's probability that the next token is 0. Requires p in [0.5, 1),
/// m >= 1 and k <= m.
double model_b_prediction(double p, std::uint32_t m, std::uint32_t k);

/// Cross-entropy of model B against the true next-token law for a window
/// whose first token is x0 and which holds k zeros in total.
double model_b_loss_given(double p, std::uint32_t m, int x0, std::uint32_t k);

/// KL divergence between the true next-token law and model B's prediction
/// for one window, i.e. model_b_loss_given minus model_a_loss, evaluated
/// without cancellation. Returned as a natural log; -inf when exactly 0.
double log_excess_given(double p, std::uint32_t m, int x0, std::uint32_t k);

/// Expected model B loss over all windows of length m.
double model_b_expected_loss(double p, std::uint32_t m,
                             std::uint32_t max_position = kDefaultMaxPosition);

/// ln E[model B loss - model A loss], summed in log space.
double log_expected_excess(double p, std::uint32_t m,
                           std::uint32_t max_position = kDefaultMaxPosition);

/// (loss_B - loss_A) / loss_A, computed from the excess directly.
double relative_increase(double p, std::uint32_t m,
                         std::uint32_t max_position = kDefaultMaxPosition);

struct ToyRow {
  double p = 0.0;
  std::uint32_t m = 0;
  double loss_a = 0.0;
  double loss_b = 0.0;
  double relative_increase = 0.0;

  friend bool operator==(const ToyRow&, const ToyRow&) = default;
};

/// Rows for every p in `ps` and m in [1, m_max], p-major.
std::vector<ToyRow> toy_grid(std::span<const double> ps, std::uint32_t m_max,
                             std::uint32_t max_position = kDefaultMaxPosition);

/// `p,m,loss_a,loss_b,relative_increase` with a header row.
void write_toy_csv(std::ostream& out, std::span<const ToyRow> rows);

}  // namespace bfpack::toy
