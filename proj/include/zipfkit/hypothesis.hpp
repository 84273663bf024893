#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "zipfkit/corpus.hpp"
#include "zipfkit/error.hpp"
#include "zipfkit/rankstats.hpp"
#include "zipfkit/rng.hpp"
#include "zipfkit/special.hpp"

namespace zipfkit {

enum class TestMethod { Welch, Permutation, BootstrapZ };

NLOHMANN_JSON_SERIALIZE_ENUM(TestMethod, {{TestMethod::Welch, "welch"},
                                          {TestMethod::Permutation, "permutation"},
                                          {TestMethod::BootstrapZ, "bootstrap-z"}})

struct GroupStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1 denominator)
};

inline GroupStats group_stats(std::span<const double> xs) {
  GroupStats g;
  g.n = xs.size();
  if (g.n == 0) return g;
  for (double x : xs) g.mean += x;
  g.mean /= static_cast<double>(g.n);
  if (g.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - g.mean) * (x - g.mean);
    g.sd = std::sqrt(ss / static_cast<double>(g.n - 1));
  }
  return g;
}

struct TestReport {
  TestMethod method = TestMethod::Welch;
  double statistic = 0.0;
  std::optional<double> df;
  double p_value = 1.0;
  GroupStats group_a;
  GroupStats group_b;
  std::optional<std::uint64_t> resamples;
  std::optional<std::uint64_t> seed;
  bool degenerate = false;
};

inline nlohmann::json to_json(const GroupStats& g) { return {{"n", g.n}, {"mean", g.mean}, {"sd", g.sd}}; }

inline nlohmann::json to_json(const TestReport& r) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"method", r.method},
          {"statistic", std::isfinite(r.statistic) ? nlohmann::json(r.statistic) : nlohmann::json(nullptr)},
          {"df", opt(r.df)},
          {"p_value", r.p_value},
          {"group_a", to_json(r.group_a)},
          {"group_b", to_json(r.group_b)},
          {"resamples", opt(r.resamples)},
          {"seed", opt(r.seed)},
          {"degenerate", r.degenerate}};
}

// Two-sided Welch t-test of equal means.
inline TestReport welch_test(std::span<const double> xs_a, std::span<const double> xs_b) {
  if (xs_a.size() < 2 || xs_b.size() < 2)
    throw Error(Errc::InsufficientData, "Welch test needs at least 2 values per group");
  TestReport report;
  report.method = TestMethod::Welch;
  report.group_a = group_stats(xs_a);
  report.group_b = group_stats(xs_b);
  const auto& a = report.group_a;
  const auto& b = report.group_b;
  const double va = a.sd * a.sd / static_cast<double>(a.n);
  const double vb = b.sd * b.sd / static_cast<double>(b.n);
  const double se2 = va + vb;
  const double diff = a.mean - b.mean;

  if (se2 == 0.0) {
    report.df = static_cast<double>(a.n + b.n - 2);
    if (diff == 0.0) {
      report.statistic = 0.0;
      report.p_value = 1.0;
    } else {
      // Zero spread with different means: no finite t exists.
      report.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
      report.p_value = 0.0;
      report.degenerate = true;
    }
    return report;
  }

  report.statistic = diff / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  report.df = df;
  report.p_value = std::clamp(special::student_t_two_sided(report.statistic, df), 0.0, 1.0);
  return report;
}

// Label-permutation test on |mean_a - mean_b|.
inline TestReport permutation_test(std::span<const double> xs_a, std::span<const double> xs_b,
                                   std::uint64_t resamples, std::uint64_t seed) {
  if (xs_a.empty() || xs_b.empty() || xs_a.size() + xs_b.size() < 4)
    throw Error(Errc::InsufficientData, "permutation test needs >= 4 values and both groups non-empty");
  if (resamples < 999) throw Error(Errc::InvalidSpec, "permutation test needs >= 999 resamples");

  TestReport report;
  report.method = TestMethod::Permutation;
  report.group_a = group_stats(xs_a);
  report.group_b = group_stats(xs_b);
  report.resamples = resamples;
  report.seed = seed;
  const double observed = std::abs(report.group_a.mean - report.group_b.mean);
  report.statistic = observed;

  std::vector<double> pooled(xs_a.begin(), xs_a.end());
  pooled.insert(pooled.end(), xs_b.begin(), xs_b.end());
  const std::size_t na = xs_a.size();
  const std::size_t nb = xs_b.size();
  // Relabelled means re-add the same values in another order.
  const double slack = 1e-12 * std::max(1.0, observed);

  Rng rng(seed);
  std::uint64_t extreme = 0;
  for (std::uint64_t i = 0; i < resamples; ++i) {
    shuffle(pooled, rng);
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < na; ++k) sa += pooled[k];
    for (std::size_t k = na; k < pooled.size(); ++k) sb += pooled[k];
    const double stat = std::abs(sa / static_cast<double>(na) - sb / static_cast<double>(nb));
    if (stat >= observed - slack) ++extreme;
  }
  report.p_value = static_cast<double>(1 + extreme) / static_cast<double>(1 + resamples);
  return report;
}

struct ResampleUnit {
  enum class Kind { Sentence, Block };
  Kind kind = Kind::Sentence;
  std::size_t block_tokens = 1000;

  static ResampleUnit sentence() { return {Kind::Sentence, 0}; }
  static ResampleUnit block(std::size_t tokens) { return {Kind::Block, tokens}; }
};

inline constexpr std::size_t kDefaultBlockTokens = 1000;

// Sentences when the corpus has them, fixed-size token blocks for one
// unsegmented stream.
inline ResampleUnit default_unit(const Corpus& corpus) {
  return corpus.sentences.size() >= 2 ? ResampleUnit::sentence() : ResampleUnit::block(kDefaultBlockTokens);
}

inline nlohmann::json to_json(const ResampleUnit& u) {
  if (u.kind == ResampleUnit::Kind::Sentence) return {{"kind", "sentence"}};
  return {{"kind", "block"}, {"tokens", u.block_tokens}};
}

struct BootstrapReport {
  double xi_hat = 0.0;
  double se_boot = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t B = 0;
  ResampleUnit unit;
  std::uint64_t seed = 0;
  std::uint64_t discarded = 0;
  std::size_t units = 0;
  std::vector<double> replicates;
};

inline nlohmann::json to_json(const BootstrapReport& r) {
  return {{"xi_hat", r.xi_hat}, {"se_boot", r.se_boot}, {"ci_lo", r.ci_lo},     {"ci_hi", r.ci_hi},
          {"B", r.B},           {"unit", to_json(r.unit)}, {"seed", r.seed},   {"discarded", r.discarded},
          {"units", r.units}};
}

// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(Errc::InsufficientData, "quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline constexpr std::uint64_t kMinBootstrapReplicates = 100;
inline constexpr double kMaxDiscardedFraction = 0.10;

// Resamples units with replacement and refits xi on each replicate.
// Replicate b draws from Rng::stream(seed, b), so the result does not depend
// on evaluation order.
inline BootstrapReport bootstrap_xi(const Corpus& corpus, const FitParams& params, std::uint64_t B,
                                    ResampleUnit unit, std::uint64_t seed) {
  if (B < kMinBootstrapReplicates) throw Error(Errc::InvalidSpec, "bootstrap needs B >= 100");
  if (unit.kind == ResampleUnit::Kind::Block && unit.block_tokens == 0)
    throw Error(Errc::InvalidSpec, "block size must be >= 1 token");

  std::vector<TokenId> flat;
  std::vector<std::span<const TokenId>> units;
  if (unit.kind == ResampleUnit::Kind::Sentence) {
    for (const auto& s : corpus.sentences) units.emplace_back(s);
  } else {
    flat.reserve(corpus.token_count());
    for (const auto& s : corpus.sentences) flat.insert(flat.end(), s.begin(), s.end());
    for (std::size_t i = 0; i < flat.size(); i += unit.block_tokens)
      units.emplace_back(std::span<const TokenId>(flat).subspan(i, std::min(unit.block_tokens, flat.size() - i)));
  }
  if (units.size() < 2) throw Error(Errc::InsufficientData, "need at least 2 resampling units");

  BootstrapReport report;
  report.xi_hat = fit_zipf(build_rank_table(corpus), params).xi;
  report.B = B;
  report.unit = unit;
  report.seed = seed;
  report.units = units.size();

  std::vector<Count> counts(corpus.intern.size());
  for (std::uint64_t b = 0; b < B; ++b) {
    Rng rng = Rng::stream(seed, b);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t u = 0; u < units.size(); ++u)
      for (TokenId id : units[rng.below(units.size())]) ++counts[id];
    try {
      report.replicates.push_back(fit_zipf(rank_table_from_counts(counts, corpus.intern), params).xi);
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientData && e.code() != Errc::EmptyCorpus) throw;
      ++report.discarded;
    }
  }
  if (static_cast<double>(report.discarded) > kMaxDiscardedFraction * static_cast<double>(B))
    throw Error(Errc::UnstableResample, std::to_string(report.discarded) + " of " + std::to_string(B) +
                                            " replicates had too few points to fit");

  report.se_boot = group_stats(report.replicates).sd;
  auto sorted = report.replicates;
  std::sort(sorted.begin(), sorted.end());
  report.ci_lo = quantile_sorted(sorted, 0.025);
  report.ci_hi = quantile_sorted(sorted, 0.975);
  return report;
}

// Normal-approximation test of xi_a == xi_b from two independent bootstrap
// reports (pooled-corpus comparisons, where only one xi exists per group).
inline TestReport bootstrap_z_test(const BootstrapReport& a, const BootstrapReport& b) {
  TestReport report;
  report.method = TestMethod::BootstrapZ;
  report.group_a = group_stats(a.replicates);
  report.group_b = group_stats(b.replicates);
  report.group_a.mean = a.xi_hat;
  report.group_b.mean = b.xi_hat;
  report.resamples = a.B;
  report.seed = a.seed;
  const double se = std::sqrt(a.se_boot * a.se_boot + b.se_boot * b.se_boot);
  const double diff = a.xi_hat - b.xi_hat;
  if (se == 0.0) {
    report.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    report.p_value = diff == 0.0 ? 1.0 : 0.0;
    report.degenerate = diff != 0.0;
    return report;
  }
  report.statistic = diff / se;
  report.p_value = special::normal_two_sided(report.statistic);
  return report;
}

}  // namespace zipfkit
