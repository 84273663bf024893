#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "zipfkit/corpus.hpp"
#include "zipfkit/corpus_io.hpp"
#include "zipfkit/error.hpp"

namespace zipfkit {

// Which part of the rank-frequency curve a fit looks at.
struct FitParams {
  std::uint64_t rank_lo = 1;
  std::optional<std::uint64_t> rank_hi;  // empty: through the last rank
  Count min_count = 1;
};

inline nlohmann::json to_json(const FitParams& p) {
  return {{"rank_lo", p.rank_lo},
          {"rank_hi", p.rank_hi ? nlohmann::json(*p.rank_hi) : nlohmann::json(nullptr)},
          {"min_count", p.min_count}};
}

// Least-squares fit of ln f = K - xi ln r.
struct ZipfFit {
  double xi = 0.0;
  double K = 0.0;
  double se_xi = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::uint64_t rank_lo = 1;
  std::uint64_t rank_hi = 1;
  Count min_count = 1;
};

inline nlohmann::json to_json(const ZipfFit& f) {
  return {{"xi", f.xi},           {"K", f.K},
          {"se_xi", f.se_xi},     {"r_squared", f.r_squared},
          {"n_points", f.n_points}, {"rank_lo", f.rank_lo},
          {"rank_hi", f.rank_hi}, {"min_count", f.min_count}};
}

namespace detail {

inline std::uint64_t resolve_rank_hi(const FitParams& p, std::size_t vocab) {
  if (p.rank_lo == 0) throw Error(Errc::InvalidSpec, "rank_lo is 1-based");
  const std::uint64_t hi = p.rank_hi ? std::min<std::uint64_t>(*p.rank_hi, vocab) : vocab;
  if (p.rank_hi && *p.rank_hi < p.rank_lo) throw Error(Errc::InvalidSpec, "rank_hi < rank_lo");
  return hi;
}

// OLS of y on x with centered sums.
inline ZipfFit ols_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(Errc::InsufficientData, "need at least 2 points to fit, have " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error(Errc::InsufficientData, "all fit points share one rank");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    sse += r * r;
  }
  ZipfFit fit;
  fit.xi = -slope;
  fit.K = my - slope * mx;
  fit.n_points = n;
  fit.se_xi = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  // A flat curve is fit exactly by a horizontal line.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace detail

// Fit over real-valued frequencies indexed by rank (freq_by_rank[0] is rank
// 1). Non-positive frequencies are skipped.
inline ZipfFit fit_zipf_frequencies(std::span<const double> freq_by_rank, const FitParams& params = {}) {
  const auto hi = detail::resolve_rank_hi(params, freq_by_rank.size());
  std::vector<double> x, y;
  for (std::uint64_t r = params.rank_lo; r <= hi; ++r) {
    const double f = freq_by_rank[r - 1];
    if (!(f > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(r)));
    y.push_back(std::log(f));
  }
  auto fit = detail::ols_loglog(x, y);
  fit.rank_lo = params.rank_lo;
  fit.rank_hi = hi;
  fit.min_count = params.min_count;
  return fit;
}

inline ZipfFit fit_zipf(const RankTable& table, const FitParams& params = {}) {
  if (table.empty()) throw Error(Errc::EmptyTable, "rank table is empty");
  const auto hi = detail::resolve_rank_hi(params, table.vocab());
  const double total = static_cast<double>(table.total);
  std::vector<double> x, y;
  for (const auto& e : table.entries) {
    if (e.rank < params.rank_lo || e.rank > hi || e.count < params.min_count) continue;
    x.push_back(std::log(static_cast<double>(e.rank)));
    y.push_back(std::log(static_cast<double>(e.count) / total));
  }
  auto fit = detail::ols_loglog(x, y);
  fit.rank_lo = params.rank_lo;
  fit.rank_hi = hi;
  fit.min_count = params.min_count;
  return fit;
}

struct EntropyReport {
  double entropy_bits = 0.0;
  std::size_t vocab = 0;
  double max_entropy_bits = 0.0;
  double redundancy = 1.0;
};

inline nlohmann::json to_json(const EntropyReport& e) {
  return {{"entropy_bits", e.entropy_bits},
          {"vocab", e.vocab},
          {"max_entropy_bits", e.max_entropy_bits},
          {"redundancy", e.redundancy}};
}

// Shannon entropy in bits of the distribution proportional to `weights`.
inline double entropy_bits(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw Error(Errc::EmptyTable, "weights sum to zero");
  double h = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    const double p = w / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

inline EntropyReport shannon_entropy(const RankTable& table) {
  if (table.empty()) throw Error(Errc::EmptyTable, "rank table is empty");
  std::vector<double> w;
  w.reserve(table.vocab());
  for (const auto& e : table.entries) w.push_back(static_cast<double>(e.count));
  EntropyReport report;
  report.vocab = table.vocab();
  report.entropy_bits = entropy_bits(w);
  report.max_entropy_bits = std::log2(static_cast<double>(report.vocab));
  // V = 1 is fully redundant by convention (0/0 otherwise).
  report.redundancy = report.vocab > 1 ? 1.0 - report.entropy_bits / report.max_entropy_bits : 1.0;
  return report;
}

// Entropy in bits of p_r = r^-xi / Z over r = 1..M, computed from xi alone:
//   H = log2 Z + xi / (Z ln 2) * sum_r r^-xi ln r
inline double zipf_entropy(double xi, std::size_t M) {
  if (M == 0) throw Error(Errc::InvalidSpec, "M must be >= 1");
  if (!std::isfinite(xi) || xi < 0.0) throw Error(Errc::InvalidSpec, "xi must be finite and >= 0");
  double z = 0.0, weighted_log = 0.0;
  for (std::size_t r = M; r >= 1; --r) {
    const double lr = std::log(static_cast<double>(r));
    const double w = std::exp(-xi * lr);
    z += w;
    weighted_log += w * lr;
  }
  return std::max(std::log2(z) + xi * weighted_log / (z * std::log(2.0)), 0.0);
}

// Plot-ready `ln_rank,ln_freq` rows for every ranked word.
inline void write_loglog_csv(std::ostream& out, const RankTable& table) {
  out << "ln_rank,ln_freq\n";
  const double total = static_cast<double>(table.total);
  for (const auto& e : table.entries)
    out << format_double(std::log(static_cast<double>(e.rank))) << ','
        << format_double(std::log(static_cast<double>(e.count) / total)) << '\n';
}

}  // namespace zipfkit
