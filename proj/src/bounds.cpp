// Certificate evaluation for the auxiliary inequalities.  Left sides are
// truncated lattice sums closed with a geometric tail majorant, evaluated
// both directly and in the log domain (streaming log-sum-exp); the pass/fail
// decision always uses the log-domain values.
#include "beamnf/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace beamnf {

namespace {

constexpr double kE = std::numbers::e;

// Streaming log-sum-exp accumulator: exact up to double rounding, immune to
// overflow of individual terms.
class LogSum {
 public:
  void add(double log_term) {
    if (std::isinf(log_term) && log_term < 0.0) return;
    if (empty_) {
      max_ = log_term;
      sum_ = 1.0;
      empty_ = false;
    } else if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  double value() const {
    if (empty_) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  bool empty_ = true;
  double max_ = 0.0;
  double sum_ = 0.0;
};

// Number of lattice points k in Z^dim with |k| = s, for s = 0..k_max.
std::vector<double> shell_counts(int dim, int k_max, KNorm norm) {
  std::vector<double> c(static_cast<size_t>(k_max) + 1, 0.0);
  if (norm == KNorm::linf) {
    c[0] = 1.0;
    for (int s = 1; s <= k_max; ++s)
      c[s] = std::pow(2.0 * s + 1.0, dim) - std::pow(2.0 * s - 1.0, dim);
    return c;
  }
  // l1: build up dimension by dimension via prefix sums,
  // c_d(s) = c_{d-1}(s) + 2 sum_{t<s} c_{d-1}(t).
  c[0] = 1.0;
  for (int s = 1; s <= k_max; ++s) c[s] = 2.0;
  for (int d = 2; d <= dim; ++d) {
    std::vector<double> next(c.size(), 0.0);
    double prefix = 0.0;
    for (int s = 0; s <= k_max; ++s) {
      next[s] = c[s] + 2.0 * prefix;
      prefix += c[s];
    }
    c.swap(next);
  }
  return c;
}

// log of the count majorant used by the tail: 2^d (s+d)^{d-1} for l1,
// 2d (2s+1)^{d-1} for sup norm.  Dominates shell_counts at every s >= 1.
double log_count_majorant(int dim, double s, KNorm norm) {
  if (norm == KNorm::linf)
    return std::log(2.0 * dim) + (dim - 1) * std::log(2.0 * s + 1.0);
  return dim * std::log(2.0) + (dim - 1) * std::log(s + dim);
}

// One-step ratio bound of the tail majorant at s >= k; decreasing in s, so a
// geometric series with this ratio dominates the whole tail.
double tail_ratio(int dim, double k, double weight_pow, double sigma,
                  KNorm norm) {
  double r = std::exp(-2.0 * sigma) *
             std::pow((k + 1.0) / k, weight_pow);
  if (norm == KNorm::linf)
    r *= std::pow((2.0 * k + 3.0) / (2.0 * k + 1.0), dim - 1);
  else
    r *= std::pow((k + 1.0 + dim) / (k + dim), dim - 1);
  return r;
}

struct SumResult {
  double direct = 0.0;     // may overflow to inf
  double log_value = 0.0;  // always finite for nonempty sums
};

// sum_{s=1..K} counts(s) * exp(extra_log(s)) * e^{-2 sigma s}, plus the
// geometric tail majorant.  extra_log(s) must grow at most like
// weight_pow * log(s+const); weight_pow feeds the tail ratio.
template <typename F>
SumResult tail_closed_sum(int dim, double sigma, int k_trunc, KNorm norm,
                          double weight_pow, bool include_zero, F extra_log) {
  if (dim < 1 || sigma <= 0.0 || k_trunc < 1)
    throw std::invalid_argument("invalid-input: bound sums need dim >= 1, sigma > 0, k_trunc >= 1");
  const double r = tail_ratio(dim, k_trunc, weight_pow, sigma, norm);
  if (r >= 1.0)
    throw std::invalid_argument("invalid-input: k_trunc too small for a geometric tail majorant");

  const auto counts = shell_counts(dim, k_trunc, norm);
  double direct = 0.0;
  LogSum ls;
  if (include_zero) {
    direct += 1.0;
    ls.add(0.0);
  }
  for (int s = 1; s <= k_trunc; ++s) {
    const double lt = std::log(counts[s]) + extra_log(s) - 2.0 * sigma * s;
    direct += std::exp(lt);
    ls.add(lt);
  }
  const double s1 = k_trunc + 1.0;
  const double log_tail = log_count_majorant(dim, s1, norm) + extra_log(s1) -
                          2.0 * sigma * s1 - std::log1p(-r);
  direct += std::exp(log_tail);
  ls.add(log_tail);
  return {direct, ls.value()};
}

void finalize(BoundCheck& c, double direct_left, double log_left,
              double log_right) {
  c.left = std::isfinite(direct_left) ? direct_left : std::exp(log_left);
  c.right = std::exp(log_right);
  c.margin = c.right - c.left;
  c.pass = log_left <= log_right;
  if (std::isfinite(direct_left) && direct_left > 0.0) {
    c.cross_check_rel =
        std::fabs(direct_left - std::exp(log_left)) / direct_left;
  }
}

std::string fmt_params(const char* fmt, double a, double b, double c,
                       double d) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// Spectral norm via power iteration on the Gram matrix, best of `trials`
// deterministic random restarts, each run to a 1e-8 relative fixed point.
double spectral_norm(const Eigen::MatrixXd& M, int trials) {
  const Eigen::MatrixXd G = M.transpose() * M;
  const int n = static_cast<int>(G.rows());
  if (n == 0) return 0.0;
  double best = 0.0;
  std::mt19937_64 gen(0xB0B5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < std::max(trials, 1); ++t) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = U(gen);
    x.normalize();
    double lam = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Eigen::VectorXd y = G * x;
      const double ny = y.norm();
      if (ny < 1e-300) {
        lam = 0.0;
        break;
      }
      x = y / ny;
      const double lam_new = x.dot(G * x);
      if (std::fabs(lam_new - lam) <= 1e-8 * std::max(lam_new, 1.0)) {
        lam = lam_new;
        break;
      }
      lam = lam_new;
    }
    best = std::max(best, lam);
  }
  return std::sqrt(std::max(best, 0.0));
}

}  // namespace

BoundCheck expsum_bound(int n, double sigma, double v_pow, int k_trunc,
                        KNorm norm) {
  if (v_pow < 0.0)
    throw std::invalid_argument("invalid-input: v_pow must be >= 0");
  BoundCheck c;
  c.lemma = "exp-sum";
  c.params = fmt_params("n=%.0f sigma=%.6g v=%.6g K=%.0f", n, sigma, v_pow,
                        k_trunc) +
             (norm == KNorm::l1 ? " norm=l1" : " norm=linf");

  const auto sum = tail_closed_sum(
      n, sigma, k_trunc, norm, v_pow, v_pow == 0.0,
      [v_pow](double s) { return v_pow * std::log(s); });

  double log_right;
  if (v_pow == 0.0)
    log_right = -n * std::log(sigma) + n * std::log1p(kE);
  else
    log_right = v_pow * (std::log(v_pow) - 1.0) -
                (v_pow + n) * std::log(sigma) + n * std::log1p(kE);
  finalize(c, sum.direct, sum.log_value, log_right);
  return c;
}

BoundCheck hilbert_like_bound(const Eigen::MatrixXd& A, int trials) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("invalid-input: matrix must be square");
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) B(i, j) = std::fabs(A(i, j)) / std::fabs(double(i - j));

  BoundCheck c;
  c.lemma = "off-diag-op";
  c.params = fmt_params("size=%.0f trials=%.0f", n, trials, 0, 0);
  c.left = spectral_norm(B, trials);
  c.right = std::numbers::pi / std::sqrt(3.0) * spectral_norm(A, trials);
  c.margin = c.right - c.left;
  c.pass = c.left <= c.right;
  return c;
}

std::array<BoundCheck, 2> compound_bound(int b, double sigma, int v,
                                         int k_trunc, KNorm norm) {
  if (b < 1 || v < 0)
    throw std::invalid_argument("invalid-input: compound bound needs b >= 1, v >= 0");
  const double log_weight_const =
      b * std::log(2.0) + 4.0 * std::log1p(double(v) * v);
  const double log_right = (4.0 * b + 6.0) * std::log(16.0 * (2.0 * b + 3.0) / kE) -
                           (5.0 * b + 6.0) * std::log(sigma);

  std::array<BoundCheck, 2> out;
  const double powers[2] = {2.0, 4.0};
  for (int i = 0; i < 2; ++i) {
    const double p = powers[i];
    const double wexp = 8.0 * b + 8.0;
    const auto sum = tail_closed_sum(
        b, sigma, k_trunc, norm, p + wexp, false,
        [p, wexp](double s) {
          return p * std::log(s) + wexp * std::log1p(s);
        });
    BoundCheck& c = out[i];
    c.lemma = "compound-weight";
    c.params = fmt_params("b=%.0f sigma=%.6g v=%.0f K=%.0f", b, sigma, v,
                          k_trunc) +
               (i == 0 ? " power=2" : " power=4") +
               (norm == KNorm::l1 ? " norm=l1" : " norm=linf");
    const double log_left = 0.5 * (log_weight_const + sum.log_value);
    const double direct_left =
        std::sqrt(std::exp(log_weight_const) * sum.direct);
    finalize(c, direct_left, log_left, log_right);
  }
  return out;
}

}  // namespace beamnf
