// zipfkit: generate Zipf-law corpora, analyze rank-frequency statistics and
// compare fitted exponents between groups of inputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "zipfkit/zipfkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zipfkit;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kValidation = 4,
  kStatistics = 5,
};

int exit_code_for(const Error& e) {
  switch (e.family()) {
    case ErrorFamily::Io: return kIo;
    case ErrorFamily::Validation: return kValidation;
    case ErrorFamily::Statistics: return kStatistics;
  }
  return kInternal;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::IoError, "sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

json tool_json() { return {{"name", "zipfkit"}, {"version", kVersion}}; }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

fs::path default_out_dir() {
  if (const char* dir = std::getenv("ZIPFKIT_OUT_DIR"); dir && *dir) return dir;
  return ".";
}

std::string corpus_text(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus_text(out, corpus);
  return std::move(out).str();
}

// Options shared by analyze and compare.
struct TokenizerOptions {
  std::string mode = "words";
  std::size_t n = 6;
  std::string window = "sliding";
  char delimiter = 'e';
  bool lowercase = false;
  bool strip_punctuation = false;
  std::string invalid_base = "break";
  std::string input_format = "auto";

  TokenizerConfig resolve() const {
    return tokenizer_from_json({{"mode", mode},
                                {"n", n},
                                {"window", window},
                                {"delimiter", std::string(1, delimiter)},
                                {"lowercase", lowercase},
                                {"strip_punctuation", strip_punctuation},
                                {"invalid_base", invalid_base}});
  }
};

void add_tokenizer_options(CLI::App* cmd, TokenizerOptions& opt) {
  cmd->add_option("--tokenizer", opt.mode, "words | nmer | delimiter")
      ->check(CLI::IsMember({"words", "nmer", "delimiter"}))
      ->capture_default_str();
  cmd->add_option("--n", opt.n, "n-mer length")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--window", opt.window, "sliding | disjoint")
      ->check(CLI::IsMember({"sliding", "disjoint"}))
      ->capture_default_str();
  cmd->add_option("--delimiter", opt.delimiter, "pseudo-word delimiter character")->capture_default_str();
  cmd->add_flag("--lowercase", opt.lowercase, "lowercase text before splitting words");
  cmd->add_flag("--strip-punct", opt.strip_punctuation, "drop ASCII punctuation before splitting words");
  cmd->add_option("--invalid-base", opt.invalid_base, "n-mer handling of non-ACGT: error | skip | break")
      ->check(CLI::IsMember({"error", "skip", "break"}))
      ->capture_default_str();
  cmd->add_option("--input-format", opt.input_format, "auto | text | fasta")
      ->check(CLI::IsMember({"auto", "text", "fasta"}))
      ->capture_default_str();
}

struct FitOptions {
  std::uint64_t rank_lo = 1;
  std::uint64_t rank_hi = 0;  // 0: through the last rank
  Count min_count = 1;

  FitParams resolve() const {
    FitParams p{rank_lo, std::nullopt, min_count};
    if (rank_hi > 0) p.rank_hi = rank_hi;
    return p;
  }
};

void add_fit_options(CLI::App* cmd, FitOptions& opt) {
  cmd->add_option("--rank-lo", opt.rank_lo, "first rank in the fit window")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--rank-hi", opt.rank_hi, "last rank in the fit window (0 = all)")->capture_default_str();
  cmd->add_option("--min-count", opt.min_count, "drop words seen fewer times")->capture_default_str();
}

struct LoadedInput {
  Corpus corpus;
  json provenance;
};

LoadedInput load_input(const std::string& path, const TokenizerOptions& opt) {
  const std::string bytes = read_file_bytes(path);
  const TokenizerConfig config = opt.resolve();
  LoadedInput loaded;
  loaded.provenance = {{"path", path}, {"sha256", sha256_hex(bytes)}};

  bool fasta = opt.input_format == "fasta";
  if (opt.input_format == "auto") {
    const auto first = bytes.find_first_not_of(" \t\r\n");
    fasta = first != std::string::npos && bytes[first] == '>';
  }
  loaded.provenance["format"] = fasta ? "fasta" : "text";

  if (!fasta) {
    loaded.corpus = tokenize(normalize_text(bytes, path), config);
  } else {
    std::istringstream in(bytes);
    const auto file = read_fasta(in, path);
    std::size_t skipped = 0;
    std::optional<Error> last_error;
    for (const auto& rec : file.records) {
      try {
        loaded.corpus.append(tokenize(rec.sequence, config));
      } catch (const Error& e) {
        if (e.code() != Errc::SequenceTooShort && e.code() != Errc::NoTokens && e.code() != Errc::EmptyCorpus)
          throw;
        ++skipped;
        last_error = e;
      }
    }
    if (loaded.corpus.sentences.empty()) throw *last_error;
    loaded.provenance["records"] = file.records.size();
    loaded.provenance["records_skipped"] = skipped;
    loaded.provenance["u_converted"] = file.u_converted;
  }
  loaded.corpus.meta.source = path;
  loaded.corpus.meta.spec = to_json(config);
  return loaded;
}

fs::path sidecar_for(const fs::path& input) {
  fs::path p = input;
  return p.replace_extension(".meta.json");
}

// A corpus written by `generate` records how it must be tokenized; reading
// it any other way makes the two groups incomparable.
void check_sidecar(const std::string& path, const TokenizerConfig& config) {
  const auto sidecar = sidecar_for(path);
  if (!fs::exists(sidecar)) return;
  const json meta = json::parse(read_file_bytes(sidecar), nullptr, false);
  if (meta.is_discarded() || !meta.contains("tokenizer")) return;
  if (to_json(tokenizer_from_json(meta["tokenizer"])) != to_json(config))
    throw Error(Errc::ConfigMismatch, path + " was written for tokenizer " + meta["tokenizer"].dump() +
                                          " but this run uses " + to_json(config).dump());
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::size_t m = 4;
  double xi = 1.0;
  std::uint64_t tokens = 1000;
  std::uint64_t sentences = 1000;
  double end_prob = 0.2;
  bool enumerate = false;
  std::string spec_path;
  std::string out;
};

json generated_meta(const Corpus& corpus, const json& config, const json& generator, const std::string& text) {
  return {{"tool", tool_json()},
          {"config", config},
          {"seed", corpus.meta.seed ? json(*corpus.meta.seed) : json(nullptr)},
          {"generator", generator},
          {"tokenizer", to_json(TokenizerConfig{})},
          {"corpus",
           {{"sentences", corpus.sentences.size()},
            {"tokens", corpus.token_count()},
            {"vocab", corpus.intern.size()},
            {"sha256", sha256_hex(text)}}}};
}

json write_corpus_files(const fs::path& prefix, const Corpus& corpus, const json& config, const json& generator) {
  const std::string text = corpus_text(corpus);
  const fs::path text_path = prefix.string() + ".txt";
  const fs::path meta_path = prefix.string() + ".meta.json";
  write_file(text_path, text);
  write_file(meta_path, dump(generated_meta(corpus, config, generator, text)));
  return {text_path.string(), meta_path.string()};
}

int run_generate(const std::string& kind, const GenerateOptions& opt, std::uint64_t seed) {
  const fs::path prefix = opt.out.empty() ? default_out_dir() / kind : fs::path(opt.out);
  json config{{"kind", kind}, {"seed", seed}, {"out", prefix.string()}};
  json written = json::array();

  if (kind == "die") {
    DieSpec die;
    if (!opt.spec_path.empty()) {
      const json spec = json::parse(read_file_bytes(opt.spec_path));
      die = make_die(spec.at("M").get<std::size_t>(), spec.at("xi").get<double>());
      config["spec"] = opt.spec_path;
    } else {
      die = make_die(opt.m, opt.xi);
    }
    config.update({{"m", die.M}, {"xi", die.xi}, {"tokens", opt.tokens}});
    const Corpus corpus = die_stream(die, opt.tokens, seed);
    for (auto& f : write_corpus_files(prefix, corpus, config, to_json(die))) written.push_back(f);
  } else if (kind == "grammar") {
    const GrammarSpec grammar =
        opt.spec_path.empty() ? build_grammar(opt.m) : grammar_from_json(json::parse(read_file_bytes(opt.spec_path)));
    config.update({{"m", grammar.M}, {"sentences", opt.sentences}, {"enumerate", opt.enumerate}});
    const json grammar_json = to_json(grammar);
    const fs::path grammar_path = prefix.string() + ".grammar.json";
    write_file(grammar_path, dump(grammar_json));
    written.push_back(grammar_path.string());
    if (opt.enumerate) {
      std::ostringstream csv;
      write_enumeration_csv(csv, enumerate_all(grammar));
      const fs::path enum_path = prefix.string() + ".enum.csv";
      write_file(enum_path, csv.str());
      written.push_back(enum_path.string());
    }
    if (opt.sentences > 0) {
      const Corpus corpus = grammar_stream(grammar, opt.sentences, seed);
      json generator = grammar_json;
      generator["kind"] = "grammar";
      for (auto& f : write_corpus_files(prefix, corpus, config, generator)) written.push_back(f);
    } else if (!opt.enumerate) {
      throw Error(Errc::EmptyRequest, "grammar needs --sentences > 0 or --enumerate");
    }
  } else {
    MarkovSpec spec;
    if (!opt.spec_path.empty()) {
      spec = markov_from_json(json::parse(read_file_bytes(opt.spec_path)));
      config["spec"] = opt.spec_path;
    } else {
      // Uniform random walk over M words.
      spec.M = opt.m;
      spec.transition.assign(opt.m, std::vector<double>(opt.m, 1.0 / static_cast<double>(opt.m)));
      spec.initial.assign(opt.m, 1.0 / static_cast<double>(opt.m));
      spec.sentence_end_prob = opt.end_prob;
    }
    config.update({{"m", spec.M}, {"sentences", opt.sentences}});
    const Corpus corpus = markov_stream(spec, opt.sentences, seed);
    for (auto& f : write_corpus_files(prefix, corpus, config, to_json(spec))) written.push_back(f);
  }
  std::cout << dump({{"written", written}});
  return kOk;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string input;
  TokenizerOptions tokenizer;
  FitOptions fit;
  std::string plot;
  std::string ranks;
  std::uint64_t bootstrap = 0;
  std::size_t block = 0;
};

json flat_fit_fields(const std::optional<ZipfFit>& fit, const FitParams& params) {
  if (fit) return to_json(*fit);
  return {{"xi", nullptr},
          {"K", nullptr},
          {"se_xi", nullptr},
          {"r_squared", nullptr},
          {"n_points", nullptr},
          {"rank_lo", params.rank_lo},
          {"rank_hi", params.rank_hi ? json(*params.rank_hi) : json(nullptr)},
          {"min_count", params.min_count}};
}

int run_analyze(const AnalyzeOptions& opt, std::uint64_t seed, const std::string& out, const std::string& format) {
  const LoadedInput input = load_input(opt.input, opt.tokenizer);
  const FitParams params = opt.fit.resolve();
  const RankTable table = build_rank_table(input.corpus);
  const EntropyReport entropy = shannon_entropy(table);

  json config{{"input", opt.input},
              {"tokenizer", to_json(opt.tokenizer.resolve())},
              {"input_format", opt.tokenizer.input_format},
              {"fit", to_json(params)},
              {"format", format}};

  std::optional<ZipfFit> fit;
  std::optional<Error> fit_error;
  try {
    fit = fit_zipf(table, params);
  } catch (const Error& e) {
    if (e.family() != ErrorFamily::Statistics) throw;
    fit_error = e;
  }

  if (!opt.plot.empty()) {
    std::ostringstream csv;
    write_loglog_csv(csv, table);
    write_file(opt.plot, csv.str());
  }
  std::ostringstream rank_csv;
  write_rank_csv(rank_csv, table);
  if (!opt.ranks.empty()) write_file(opt.ranks, rank_csv.str());

  json report = flat_fit_fields(fit, params);
  report["entropy_bits"] = entropy.entropy_bits;
  report["max_entropy_bits"] = entropy.max_entropy_bits;
  report["redundancy"] = entropy.redundancy;
  report["vocab"] = entropy.vocab;
  report["total_tokens"] = table.total;
  report["sentences"] = input.corpus.sentences.size();
  report["units"] = {{"fit", "natural log"}, {"entropy", "bits"}};
  report["fit_error"] = fit_error ? json(std::string(to_string(fit_error->code()))) : json(nullptr);
  report["tool"] = tool_json();
  report["config"] = config;
  report["inputs"] = json::array({input.provenance});

  if (opt.bootstrap > 0) {
    const ResampleUnit unit = opt.block > 0 ? ResampleUnit::block(opt.block) : default_unit(input.corpus);
    report["config"]["bootstrap"] = {{"B", opt.bootstrap}, {"unit", to_json(unit)}, {"seed", seed}};
    report["bootstrap"] = to_json(bootstrap_xi(input.corpus, params, opt.bootstrap, unit, seed));
  }

  emit(out, format == "csv" ? rank_csv.str() : dump(report));
  if (fit_error) {
    std::cerr << "zipfkit: " << fit_error->what() << '\n';
    return exit_code_for(*fit_error);
  }
  return kOk;
}

// ----------------------------------------------------------------- compare

struct CompareOptions {
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  TokenizerOptions tokenizer;
  FitOptions fit;
  std::string test = "welch";
  std::string mode = "per-file";
  std::uint64_t B = 1000;
  std::uint64_t resamples = 9999;
  std::size_t block = 0;
};

int run_compare(const CompareOptions& opt, std::uint64_t seed, const std::string& out) {
  const TokenizerConfig tok = opt.tokenizer.resolve();
  const FitParams params = opt.fit.resolve();
  json config{{"group_a", opt.group_a}, {"group_b", opt.group_b}, {"tokenizer", to_json(tok)},
              {"input_format", opt.tokenizer.input_format}, {"fit", to_json(params)},
              {"test", opt.test}, {"mode", opt.mode}, {"seed", seed}};

  struct Group {
    std::vector<double> xis;
    json files = json::array();
    Corpus pooled;
  };
  auto load_group = [&](const std::vector<std::string>& paths) {
    Group g;
    for (const auto& path : paths) {
      check_sidecar(path, tok);
      LoadedInput in = load_input(path, opt.tokenizer);
      if (opt.mode == "pooled") {
        g.pooled.append(in.corpus);
      } else {
        const ZipfFit fit = fit_zipf(build_rank_table(in.corpus), params);
        g.xis.push_back(fit.xi);
        in.provenance["fit"] = to_json(fit);
      }
      g.files.push_back(in.provenance);
    }
    return g;
  };
  Group a = load_group(opt.group_a);
  Group b = load_group(opt.group_b);

  json result{{"tool", tool_json()}, {"inputs", {{"a", a.files}, {"b", b.files}}}};
  TestReport report;
  if (opt.mode == "pooled") {
    config["B"] = opt.B;
    auto unit_for = [&](const Corpus& c) { return opt.block > 0 ? ResampleUnit::block(opt.block) : default_unit(c); };
    // Disjoint replicate streams: a uses seed .. seed+B-1, b the next B.
    const auto boot_a = bootstrap_xi(a.pooled, params, opt.B, unit_for(a.pooled), seed);
    const auto boot_b = bootstrap_xi(b.pooled, params, opt.B, unit_for(b.pooled), seed + opt.B);
    result["bootstrap"] = {{"a", to_json(boot_a)}, {"b", to_json(boot_b)}};
    report = bootstrap_z_test(boot_a, boot_b);
  } else if (opt.test == "welch") {
    report = welch_test(a.xis, b.xis);
  } else {
    config["resamples"] = opt.resamples;
    report = permutation_test(a.xis, b.xis, opt.resamples, seed);
  }
  result["config"] = config;
  result["report"] = to_json(report);
  emit(out, dump(result));
  return kOk;
}

// ------------------------------------------------------------ zipf-entropy

int run_zipf_entropy(double xi, std::size_t m, const std::string& out, const std::string& format) {
  const double h = zipf_entropy(xi, m);
  const double h_max = std::log2(static_cast<double>(m));
  const double redundancy = m > 1 ? 1.0 - h / h_max : 1.0;
  if (format == "csv") {
    emit(out, "xi,m,entropy_bits,redundancy\n" + format_double(xi) + "," + std::to_string(m) + "," +
                  format_double(h) + "," + format_double(redundancy) + "\n");
  } else {
    emit(out, dump({{"tool", tool_json()},
                    {"config", {{"xi", xi}, {"m", m}, {"format", format}}},
                    {"xi", xi},
                    {"m", m},
                    {"entropy_bits", h},
                    {"max_entropy_bits", h_max},
                    {"redundancy", redundancy}}));
  }
  return kOk;
}

// ------------------------------------------------------------------- repro

struct ReproOptions {
  std::string out;
  std::size_t corpora = 10;
  std::uint64_t tokens = 100000;
  std::size_t m = 4096;
};

std::string rational_string(const Rational& r) {
  std::ostringstream s;
  s << numerator(r) << '/' << denominator(r);
  return s.str();
}

// The full argument on synthetic data: two unrelated processes both follow
// Zipf's law, exponents differing by 0.1 are separable with a plain test, and
// the exponent ordering fixes the entropy ordering.
int run_repro(const ReproOptions& opt, std::uint64_t seed) {
  const fs::path dir = opt.out.empty() ? default_out_dir() / "repro" : fs::path(opt.out);
  fs::create_directories(dir);
  json config{{"out", dir.string()}, {"seed", seed}, {"corpora", opt.corpora}, {"tokens", opt.tokens}, {"m", opt.m}};
  json report{{"tool", tool_json()}, {"config", config}};

  // Biased die.
  {
    const DieSpec die = make_die(1000, 1.0);
    const Corpus corpus = die_stream(die, 1000000, seed);
    const RankTable table = build_rank_table(corpus);
    const ZipfFit fit = fit_zipf(table, {1, 100, 1});
    std::ostringstream csv;
    write_rank_csv(csv, table);
    write_file(dir / "die_m1000.ranks.csv", csv.str());
    report["die"] = {{"M", 1000}, {"xi_true", 1.0}, {"tokens", 1000000}, {"seed", seed}, {"fit", to_json(fit)}};
  }

  // Factorial-tree grammar.
  {
    const GrammarSpec g4 = build_grammar(4);
    const auto dist = enumerate_all(g4);
    std::ostringstream csv;
    write_enumeration_csv(csv, dist);
    write_file(dir / "grammar_m4.enum.csv", csv.str());
    write_file(dir / "grammar_m4.grammar.json", dump(to_json(g4)));
    json marginals = json::array();
    for (const auto& p : word_marginals(dist, 4)) marginals.push_back(rational_string(p));

    const GrammarSpec g12 = build_grammar(12);
    const Corpus corpus = grammar_stream(g12, 10000, seed + 1);
    write_file(dir / "grammar_m12.txt", corpus_text(corpus));
    const ZipfFit fit = fit_zipf(build_rank_table(corpus));
    report["grammar"] = {{"m4_word_marginals", marginals},
                         {"m4_sentences", dist.size()},
                         {"m12_sentences", 10000},
                         {"m12_seed", seed + 1},
                         {"m12_fit", to_json(fit)}};
  }

  // Die corpora at the three reported exponents.
  struct Category {
    const char* name;
    double xi;
  };
  const std::vector<Category> categories{{"coding", 0.286}, {"noncoding", 0.386}, {"language", 0.57}};
  std::vector<std::vector<double>> fitted(categories.size());
  json groups = json::object();
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const DieSpec die = make_die(opt.m, categories[c].xi);
    std::vector<double> entropies;
    json seeds = json::array();
    for (std::size_t k = 0; k < opt.corpora; ++k) {
      const std::uint64_t s = seed + 1000 * (c + 1) + k;
      const Corpus corpus = die_stream(die, opt.tokens, s);
      if (k == 0) write_file(dir / ("die_" + std::string(categories[c].name) + ".txt"), corpus_text(corpus));
      const RankTable table = build_rank_table(corpus);
      fitted[c].push_back(fit_zipf(table).xi);
      entropies.push_back(shannon_entropy(table).entropy_bits);
      seeds.push_back(s);
    }
    const double h_model = zipf_entropy(categories[c].xi, opt.m);
    groups[categories[c].name] = {{"xi_true", categories[c].xi},
                                  {"seeds", seeds},
                                  {"xi_fitted", fitted[c]},
                                  {"xi_summary", to_json(group_stats(fitted[c]))},
                                  {"entropy_empirical_mean", group_stats(entropies).mean},
                                  {"entropy_model_bits", h_model},
                                  {"redundancy_model", 1.0 - h_model / std::log2(static_cast<double>(opt.m))}};
  }
  report["categories"] = groups;

  json tests = json::object();
  for (std::size_t x = 0; x < categories.size(); ++x)
    for (std::size_t y = x + 1; y < categories.size(); ++y)
      tests[std::string(categories[x].name) + "_vs_" + categories[y].name] =
          to_json(welch_test(fitted[x], fitted[y]));
  report["welch"] = tests;

  bool entropy_follows_xi = true;
  for (std::size_t c = 0; c + 1 < categories.size(); ++c)
    entropy_follows_xi = entropy_follows_xi &&
                         zipf_entropy(categories[c].xi, opt.m) > zipf_entropy(categories[c + 1].xi, opt.m);
  report["conclusions"] = {
      {"die_fits_zipf", report["die"]["fit"]["r_squared"].get<double>() > 0.99},
      {"entropy_order_follows_xi_order", entropy_follows_xi},
      {"uniform_entropy_bits", std::log2(static_cast<double>(opt.m))}};

  write_file(dir / "report.json", dump(report));
  std::cout << dump({{"written", (dir / "report.json").string()}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zipfkit: Zipf-law corpus generation, rank-frequency analysis and exponent tests"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--out", out, "output path (file, prefix or directory depending on the command)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* generate = app.add_subcommand("generate", "write a synthetic corpus");
  generate->require_subcommand(1);
  GenerateOptions gen;
  std::string gen_kind;
  for (const char* kind : {"die", "grammar", "markov"}) {
    auto* sub = generate->add_subcommand(kind);
    sub->fallthrough();
    sub->add_option("--m", gen.m, "vocabulary size")->capture_default_str();
    sub->add_option("--spec", gen.spec_path, "JSON generator spec (overrides --m/--xi)");
    sub->callback([&gen_kind, kind] { gen_kind = kind; });
    if (std::string(kind) == "die") {
      sub->add_option("--xi", gen.xi, "power-law exponent")->capture_default_str();
      sub->add_option("--tokens", gen.tokens, "tokens to draw")->capture_default_str();
    } else {
      sub->add_option("--sentences", gen.sentences, "sentences to draw")->capture_default_str();
    }
    if (std::string(kind) == "grammar") sub->add_flag("--enumerate", gen.enumerate, "write the exact sentence distribution");
    if (std::string(kind) == "markov")
      sub->add_option("--end-prob", gen.end_prob, "per-step sentence end probability")->capture_default_str();
  }

  auto* analyze = app.add_subcommand("analyze", "rank-frequency fit and entropy of one input");
  AnalyzeOptions an;
  analyze->add_option("input", an.input, "text, corpus or FASTA file")->required();
  add_tokenizer_options(analyze, an.tokenizer);
  add_fit_options(analyze, an.fit);
  analyze->add_option("--plot", an.plot, "write ln_rank,ln_freq CSV here");
  analyze->add_option("--ranks", an.ranks, "write the rank table CSV here");
  analyze->add_option("--bootstrap", an.bootstrap, "bootstrap replicates for xi (0 = off)");
  analyze->add_option("--block", an.block, "bootstrap block size in tokens (0 = default unit)");

  auto* compare = app.add_subcommand("compare", "two-sample test of equal xi");
  CompareOptions cmp;
  compare->add_option("--a", cmp.group_a, "files in group A")->required();
  compare->add_option("--b", cmp.group_b, "files in group B")->required();
  add_tokenizer_options(compare, cmp.tokenizer);
  add_fit_options(compare, cmp.fit);
  compare->add_option("--test", cmp.test, "welch | permutation")
      ->check(CLI::IsMember({"welch", "permutation"}))
      ->capture_default_str();
  compare->add_option("--mode", cmp.mode, "per-file | pooled")
      ->check(CLI::IsMember({"per-file", "pooled"}))
      ->capture_default_str();
  compare->add_option("--B", cmp.B, "bootstrap replicates (pooled mode)")->capture_default_str();
  compare->add_option("--resamples", cmp.resamples, "permutations (permutation test)")->capture_default_str();
  compare->add_option("--block", cmp.block, "bootstrap block size in tokens (0 = default unit)");

  auto* entropy = app.add_subcommand("zipf-entropy", "entropy of a truncated power law");
  double ent_xi = 1.0;
  std::size_t ent_m = 1;
  entropy->add_option("--xi", ent_xi, "exponent")->required();
  entropy->add_option("--m", ent_m, "vocabulary size")->required();

  auto* repro = app.add_subcommand("repro", "run the end-to-end synthetic demonstration");
  ReproOptions rep;
  repro->add_option("--corpora", rep.corpora, "corpora per exponent")->capture_default_str();
  repro->add_option("--tokens", rep.tokens, "tokens per corpus")->capture_default_str();
  repro->add_option("--m", rep.m, "die sides")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (generate->parsed()) {
      gen.out = out;
      return run_generate(gen_kind, gen, seed);
    }
    if (analyze->parsed()) return run_analyze(an, seed, out, format);
    if (compare->parsed()) return run_compare(cmp, seed, out);
    if (entropy->parsed()) return run_zipf_entropy(ent_xi, ent_m, out, format);
    if (repro->parsed()) {
      rep.out = out;
      return run_repro(rep, seed);
    }
  } catch (const Error& e) {
    std::cerr << "zipfkit: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "zipfkit: bad JSON: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "zipfkit: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
