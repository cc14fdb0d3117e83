// ultrapencil: classify points, build regions, destabilize, analyze essential
// spectra and run the theorem suites for pencils over Q_p.
//
// Exit codes: 0 ok, 2 input error, 3 precondition violation, 4 suite failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ultrapencil/diag_regions.hpp"
#include "ultrapencil/io.hpp"
#include "ultrapencil/pencil.hpp"
#include "ultrapencil/seq_essential.hpp"
#include "ultrapencil/suite.hpp"

namespace fs = std::filesystem;
using namespace ultrapencil;

namespace {

constexpr int exit_input = 2;
constexpr int exit_precondition = 3;
constexpr int exit_suite = 4;

struct RunConfig {
  std::string input;
  std::optional<std::int64_t> p;
  std::vector<std::string> eps;
  std::vector<std::string> lambda;
  std::string grid;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 200;
  std::string out;
  bool exact_region = false;
  bool pgm = false;
  std::string mutate = "none";
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("ULTRAPENCIL_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::parse_error, std::string("ULTRAPENCIL_SEED is not an unsigned integer: ") + env);
  }
  return 1;
}

json read_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(Errc::parse_error, "--input is required");
  std::ifstream in(cfg.input);
  if (!in) throw Error(Errc::parse_error, "cannot open " + cfg.input);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

std::vector<Rational> rationals(const std::vector<std::string>& xs) {
  std::vector<Rational> out;
  for (const auto& x : xs) out.push_back(parse_rational(x));
  return out;
}

std::vector<Rational> eps_list(const RunConfig& cfg, const PrimeContext& ctx) {
  if (cfg.eps.empty()) return {ctx.power(-2), ctx.power(-1), Rational(1), ctx.power(1)};
  auto out = rationals(cfg.eps);
  for (const auto& e : out) (void)Epsilon(e);
  return out;
}

std::vector<Rational> lambda_list(const RunConfig& cfg) {
  if (cfg.lambda.empty()) throw Error(Errc::parse_error, "--lambda is required");
  return rationals(cfg.lambda);
}

// "VMIN:VMAX:DIGITS:COUNT"
SampleGrid parse_grid(const std::string& spec, std::uint64_t seed) {
  std::vector<std::int64_t> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "bad --grid field \"" + item + "\"");
    }
  }
  if (parts.size() != 4 || parts[0] > parts[1] || parts[2] < 1 || parts[3] < 1) {
    throw Error(Errc::parse_error, "--grid expects VMIN:VMAX:DIGITS:COUNT, got \"" + spec + "\"");
  }
  SampleGrid g;
  g.v_min = parts[0];
  g.v_max = parts[1];
  g.digits = static_cast<int>(parts[2]);
  g.per_shell = static_cast<std::size_t>(parts[3]);
  g.seed = seed;
  return g;
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& text) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  out << text;
  if (!out) throw Error(Errc::parse_error, "cannot write " + (dir / name).string());
}

int cmd_classify(const RunConfig& cfg) {
  const Pencil p = pencil_from_json(read_input(cfg), cfg.p);
  const auto lambdas = lambda_list(cfg);
  const auto epss = eps_list(cfg, p.ctx());
  std::string lines;
  for (const auto& l : lambdas) {
    for (const auto& e : epss) {
      const Epsilon eps(e);
      const json j = {{"lambda", to_json(l)},
                      {"epsilon", to_json(e)},
                      {"in_spectrum", in_spectrum(p, l)},
                      {"in_pseudo", in_pseudospectrum(p, l, eps)},
                      {"in_cond_pseudo", in_cond_pseudospectrum(p, l, eps)},
                      {"kappa", to_json(kappa(p, l))}};
      lines += j.dump() + "\n";
    }
  }
  std::cout << lines;
  if (!cfg.out.empty()) write_file(cfg, "classify.jsonl", lines);
  return 0;
}

std::string kappa_cell(const Kappa& k) { return k.is_infinite() ? "inf" : std::to_string(k.value.exponent()); }

// Plain (P2) PGM: rows are valuations, columns the residues u mod p^digits of
// λ = c + p^v·u around the first center; brighter means larger κ.
std::string heatmap_pgm(const Pencil& p, const Rational& center, const SampleGrid& g) {
  const PrimeContext& ctx = p.ctx();
  const Rational width_r = ctx.power(g.digits);
  if (width_r > 4096) throw Error(Errc::parse_error, "PGM grid wider than 4096 columns; lower DIGITS");
  const auto width = numerator(width_r).convert_to<std::int64_t>();
  std::ostringstream out;
  out << "P2\n" << width << " " << (g.v_max - g.v_min + 1) << "\n255\n";
  for (std::int64_t v = g.v_min; v <= g.v_max; ++v) {
    for (std::int64_t u = 0; u < width; ++u) {
      const Kappa k = kappa(p, center + ctx.power(v) * Rational(u));
      const std::int64_t level = k.is_infinite() ? 255 : std::min<std::int64_t>(255, -k.value.exponent() * 32);
      out << level << (u + 1 < width ? " " : "\n");
    }
  }
  return out.str();
}

int cmd_region(const RunConfig& cfg) {
  const Pencil p = pencil_from_json(read_input(cfg), cfg.p);
  const PrimeContext& ctx = p.ctx();
  const bool diagonal_input = is_diagonal(p.A()) && is_diagonal(p.B());
  if (cfg.exact_region && !diagonal_input) {
    throw Error(Errc::non_diagonal_input, "--exact-region needs diagonal A and B");
  }

  std::vector<Rational> centers;
  std::string lines;
  if (diagonal_input) {
    const DiagonalPencil d = DiagonalPencil::from_pencil(p);
    d.require_nonzero_b();
    centers = diag_spectrum(d);
    for (const auto& e : eps_list(cfg, ctx)) {
      const Epsilon eps(e);
      const json j = {{"epsilon", to_json(e)},
                      {"condition", to_json(cond_region(d, eps))},
                      {"pseudo", to_json(pseudo_region(d, eps))}};
      lines += j.dump() + "\n";
    }
  }
  if (!cfg.lambda.empty()) {
    for (const auto& l : rationals(cfg.lambda)) centers.push_back(l);
  }
  if (centers.empty()) centers.push_back(0);
  std::cout << lines;

  if (!cfg.grid.empty()) {
    SampleGrid g = parse_grid(cfg.grid, resolve_seed(cfg));
    g.centers = centers;
    std::string csv = "lambda,v_of_kappa\n";
    for (const auto& l : sample(g, ctx)) csv += to_string(l) + "," + kappa_cell(kappa(p, l)) + "\n";
    if (cfg.out.empty()) {
      std::cout << csv;
    } else {
      write_file(cfg, "heatmap.csv", csv);
      if (cfg.pgm) write_file(cfg, "heatmap.pgm", heatmap_pgm(p, centers.front(), g));
    }
  }
  if (!cfg.out.empty() && diagonal_input) write_file(cfg, "region.jsonl", lines);
  return 0;
}

int cmd_perturb(const RunConfig& cfg) {
  const Pencil p = pencil_from_json(read_input(cfg), cfg.p);
  const PrimeContext& ctx = p.ctx();
  std::string lines;
  for (const auto& l : lambda_list(cfg)) {
    for (const auto& e : eps_list(cfg, ctx)) {
      const RankOnePerturbation c = rank_one_destabilizer(p, l, Epsilon(e));
      const UMatrix cm = c.matrix();
      const Rational d = det(eval_pencil(p, l) + cm, ctx);
      const json j = {{"lambda", to_json(l)},
                      {"epsilon", to_json(e)},
                      {"kappa", to_json(kappa(p, l))},
                      {"C", matrix_to_json(cm, ctx)},
                      {"norm", to_json(op_norm(cm, ctx))},
                      {"det", to_json(d)},
                      {"singular", d == 0}};
      lines += j.dump() + "\n";
    }
  }
  std::cout << lines;
  if (!cfg.out.empty()) write_file(cfg, "perturb.jsonl", lines);
  return 0;
}

int cmd_essential(const RunConfig& cfg) {
  const TailDiagonalPencil d = tail_pencil_from_json(read_input(cfg), cfg.p);
  const PrimeContext& ctx = d.ctx();
  const auto sigma_e = essential_spectrum(d);

  std::vector<Rational> probes;
  if (!cfg.lambda.empty()) {
    probes = rationals(cfg.lambda);
  } else {
    probes = sigma_e;
    for (std::size_t i = 0; i < d.prefix_length(); ++i) probes.push_back(d.A().prefix()[i] / d.B().prefix()[i]);
    probes.push_back(0);
  }

  // Two-inclusion audit: essential points stay spectral under sampled
  // completely continuous K, the others are regularized by one.
  Sampler rng(resolve_seed(cfg));
  json points = json::array();
  bool audit_ok = true;
  std::size_t samples = 0;
  for (const auto& l : probes) {
    const bool essential = std::find(sigma_e.begin(), sigma_e.end(), l) != sigma_e.end();
    json j = {{"lambda", to_json(l)},
              {"in_spectrum", seq_spectrum_membership(d, l)},
              {"fredholm_index0", is_fredholm_index0(d, l)},
              {"essential", essential},
              {"kappa", to_json(seq_kappa(d, l))}};
    if (essential) {
      bool kept = true;
      for (std::size_t t = 0; t < cfg.trials; ++t, ++samples) {
        DiagonalSequence k;
        k.tail.push_back({rng.scalar(ctx), rng.uniform(1, 3)});
        kept = kept && !analyze_perturbed(d, l, k, {}).invertible;
      }
      j["stays_spectral"] = kept;
      audit_ok = audit_ok && kept;
    } else if (seq_spectrum_membership(d, l)) {
      const FiniteRankOp k = regularizer(d, l);
      const bool fixed = analyze_perturbed(d, l, {}, k).invertible;
      j["regularizer"] = to_json(k);
      j["regularized_invertible"] = fixed;
      audit_ok = audit_ok && fixed;
    }
    points.push_back(std::move(j));
  }

  json sigma = json::array();
  for (const auto& z : sigma_e) sigma.push_back(to_json(z));
  const json out = {{"sigma_e", std::move(sigma)},
                    {"probes", std::move(points)},
                    {"audit", {{"check", "essential-two-inclusions"},
                               {"verdict", audit_ok ? "pass" : "fail"},
                               {"samples", samples}}}};
  std::cout << out.dump(2) << "\n";
  if (!cfg.out.empty()) write_file(cfg, "essential.json", out.dump(2) + "\n");
  return audit_ok ? 0 : exit_suite;
}

int cmd_check_theorems(const RunConfig& cfg) {
  SuiteConfig sc;
  sc.seed = resolve_seed(cfg);
  sc.trials = cfg.trials;
  if (cfg.mutate == "kappa-sign") {
    sc.mutation = Mutation::kappa_sign;
  } else if (cfg.mutate != "none") {
    throw Error(Errc::parse_error, "unknown --mutate mode \"" + cfg.mutate + "\"");
  }
  const SuiteReport report = run_all_suites(sc);
  const std::string text = to_json(report).dump(2) + "\n";
  std::cout << text;
  if (!cfg.out.empty()) write_file(cfg, "report.json", text);
  return report.passed() ? 0 : exit_suite;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, pseudospectra and condition pseudospectra of pencils over Q_p"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "pencil JSON file");
    sub->add_option("--p", cfg.p, "prime overriding the input's");
    sub->add_option("--eps", cfg.eps, "comma-separated rationals")->delimiter(',');
    sub->add_option("--lambda", cfg.lambda, "comma-separated rationals")->delimiter(',');
    sub->add_option("--seed", cfg.seed, "seed; falls back to ULTRAPENCIL_SEED, then 1");
    sub->add_option("--trials", cfg.trials, "trials per suite")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "directory for output files");
  };

  auto* classify = app.add_subcommand("classify", "spectrum / pseudospectrum / condition pseudospectrum membership");
  common(classify);
  auto* region = app.add_subcommand("region", "exact regions of diagonal pencils and κ heatmaps");
  common(region);
  region->add_option("--grid", cfg.grid, "VMIN:VMAX:DIGITS:COUNT");
  region->add_flag("--exact-region", cfg.exact_region, "require a diagonal pencil");
  region->add_flag("--pgm", cfg.pgm, "also write heatmap.pgm into --out");
  auto* perturb = app.add_subcommand("perturb", "rank-one destabilizer certificates");
  common(perturb);
  auto* essential = app.add_subcommand("essential", "essential spectrum of a tail-diagonal pencil");
  common(essential);
  auto* check = app.add_subcommand("check-theorems", "run every property suite");
  common(check);
  check->add_option("--mutate", cfg.mutate, "none | kappa-sign (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_input;
  }

  try {
    if (*classify) return cmd_classify(cfg);
    if (*region) return cmd_region(cfg);
    if (*perturb) return cmd_perturb(cfg);
    if (*essential) return cmd_essential(cfg);
    return cmd_check_theorems(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? exit_input : exit_precondition;
  }
}
