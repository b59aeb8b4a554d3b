#include "bfpack/toyproc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bfpack/error.hpp"

namespace bfpack::toy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(1 / (1 + e^{-x}))
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_choose(std::uint32_t n, std::uint32_t k) {
  int sign = 0;
  return ::lgamma_r(n + 1.0, &sign) - ::lgamma_r(k + 1.0, &sign) -
         ::lgamma_r(n - k + 1.0, &sign);
}

// Neumaier compensated summation.
class Sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_p(double p) {
  if (!(p >= 0.5 && p < 1.0)) {
    throw Error(ErrorKind::config,
                "p must lie in [0.5, 1), got " + std::to_string(p));
  }
}

void check_window(std::uint32_t m, std::uint32_t k) {
  if (m == 0) throw Error(ErrorKind::config, "token position m must be >= 1");
  if (k > m) {
    throw Error(ErrorKind::config, "zero count k=" + std::to_string(k) +
                                       " exceeds m=" + std::to_string(m));
  }
}

void check_observation(std::uint32_t m, int x0, std::uint32_t k) {
  check_window(m, k);
  if (x0 != 0 && x0 != 1) throw Error(ErrorKind::config, "x0 must be 0 or 1");
  if ((x0 == 0 && k == 0) || (x0 == 1 && k == m)) {
    throw Error(ErrorKind::config, "zero count inconsistent with x0");
  }
}

void check_position(std::uint32_t m, std::uint32_t max_position) {
  if (m == 0) throw Error(ErrorKind::config, "token position m must be >= 1");
  if (m > max_position) {
    throw Error(ErrorKind::capacity,
                "m=" + std::to_string(m) + " exceeds the exact-summation cap " +
                    std::to_string(max_position));
  }
}

// ln P(hidden X0 = 0 | window with k zeros out of m) and its complement.
struct LogPosterior {
  double zero;
  double one;
};

LogPosterior log_posterior(double p, std::uint32_t m, std::uint32_t k) {
  const double q = 1.0 - p;
  const double evidence =
      (2.0 * static_cast<double>(k) - static_cast<double>(m)) *
      (std::log(p) - std::log(q));
  return {log_sigmoid(evidence), log_sigmoid(-evidence)};
}

// Log-weight of observing h zeros among x1..x_{m-1} given x0.
double log_window_weight(double p, std::uint32_t m, int x0, std::uint32_t h) {
  const double q = 1.0 - p;
  const double agree = std::log(x0 == 0 ? p : q);
  const double disagree = std::log(x0 == 0 ? q : p);
  return log_choose(m - 1, h) + h * agree + (m - 1 - h) * disagree;
}

}  // namespace

double model_a_loss(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::config, "p must lie in (0, 1)");
  }
  const double q = 1.0 - p;
  return -p * std::log(p) - q * std::log(q);
}

LogPrediction model_b_log_prediction(double p, std::uint32_t m,
                                     std::uint32_t k) {
  check_p(p);
  check_window(m, k);
  const double lp = std::log(p);
  const double lq = std::log(1.0 - p);
  const auto post = log_posterior(p, m, k);
  return {log_add(post.zero + lp, post.one + lq),
          log_add(post.zero + lq, post.one + lp)};
}

double model_b_prediction(double p, std::uint32_t m, std::uint32_t k) {
  return std::exp(model_b_log_prediction(p, m, k).zero);
}

double model_b_loss_given(double p, std::uint32_t m, int x0, std::uint32_t k) {
  check_p(p);
  check_observation(m, x0, k);
  const double q = 1.0 - p;
  const auto pred = model_b_log_prediction(p, m, k);
  const double p_zero = x0 == 0 ? p : q;
  return -p_zero * pred.zero - (1.0 - p_zero) * pred.one;
}

double log_excess_given(double p, std::uint32_t m, int x0, std::uint32_t k) {
  check_p(p);
  check_observation(m, x0, k);
  const double q = 1.0 - p;
  if (p == q) return kNegInf;

  // Model B predicts p - v for the true majority symbol x0 and q + v for the
  // other, where v = (p - q) * P(hidden != x0 | window).
  const auto post = log_posterior(p, m, k);
  const double log_wrong = x0 == 0 ? post.one : post.zero;
  const double log_v = log_wrong + std::log(p - q);
  const double ratio = std::exp(log_v - std::log(q));

  if (ratio < 0.1) {
    // KL = sum_{n>=2} v^n / n * (p^{1-n} + (-1)^n q^{1-n})
    const double a = std::exp(log_v - std::log(p));
    double a_pow = 1.0;
    double b_pow = 1.0;
    double series = 0.0;
    for (int n = 2; n < 64; ++n) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      const double term = (a_pow / p + sign * b_pow / q) / n;
      series += term;
      if (std::abs(term) <= 1e-18 * std::abs(series)) break;
      a_pow *= a;
      b_pow *= ratio;
    }
    return 2.0 * log_v + std::log(series);
  }
  const double v = std::exp(log_v);
  const double kl = -p * std::log1p(-v / p) - q * std::log1p(v / q);
  return std::log(kl);
}

double model_b_expected_loss(double p, std::uint32_t m,
                             std::uint32_t max_position) {
  check_p(p);
  check_position(m, max_position);
  Sum weighted;
  Sum total;
  for (int x0 = 0; x0 <= 1; ++x0) {
    for (std::uint32_t h = 0; h < m; ++h) {
      const double w = std::exp(log_window_weight(p, m, x0, h));
      const auto k = h + 1 - static_cast<std::uint32_t>(x0);
      weighted.add(w * model_b_loss_given(p, m, x0, k));
      total.add(w);
    }
  }
  return weighted.value() / total.value();
}

double log_expected_excess(double p, std::uint32_t m,
                           std::uint32_t max_position) {
  check_p(p);
  check_position(m, max_position);
  if (p == 0.5) return kNegInf;

  std::vector<double> terms;
  terms.reserve(2 * static_cast<std::size_t>(m));
  Sum total;
  double peak = kNegInf;
  for (int x0 = 0; x0 <= 1; ++x0) {
    for (std::uint32_t h = 0; h < m; ++h) {
      const double lw = log_window_weight(p, m, x0, h);
      total.add(std::exp(lw));
      const auto k = h + 1 - static_cast<std::uint32_t>(x0);
      const double t = lw + log_excess_given(p, m, x0, k);
      terms.push_back(t);
      peak = std::max(peak, t);
    }
  }
  if (peak == kNegInf) return kNegInf;
  Sum scaled;
  for (const double t : terms) scaled.add(std::exp(t - peak));
  return peak + std::log(scaled.value()) - std::log(total.value());
}

double relative_increase(double p, std::uint32_t m,
                         std::uint32_t max_position) {
  check_p(p);
  const double excess = log_expected_excess(p, m, max_position);
  return std::exp(excess - std::log(model_a_loss(p)));
}

std::vector<ToyRow> toy_grid(std::span<const double> ps, std::uint32_t m_max,
                             std::uint32_t max_position) {
  for (const double p : ps) check_p(p);
  check_position(m_max, max_position);
  std::vector<ToyRow> rows(ps.size() * m_max);
  const auto n = static_cast<std::int64_t>(rows.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    row.p = ps[static_cast<std::size_t>(i) / m_max];
    row.m = static_cast<std::uint32_t>(i % m_max) + 1;
    row.loss_a = model_a_loss(row.p);
    row.loss_b = model_b_expected_loss(row.p, row.m, max_position);
    row.relative_increase = relative_increase(row.p, row.m, max_position);
  }
  return rows;
}

void write_toy_csv(std::ostream& out, std::span<const ToyRow> rows) {
  auto shortest = [](double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  out << "p,m,loss_a,loss_b,relative_increase\n";
  for (const auto& row : rows) {
    out << shortest(row.p) << ',' << row.m << ',' << shortest(row.loss_a) << ','
        << shortest(row.loss_b) << ',' << shortest(row.relative_increase)
        << '\n';
  }
}

}  // namespace bfpack::toy
