// ncdir: command-line front end for sampling, densities, moments, the
// Monte-Carlo validation study and the finite-sum vs series benchmark.
//
// Exit codes: 0 success, 2 invalid input, 3 series non-convergence, 1 other.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncdir/ncdir.hpp"

namespace {

using json = nlohmann::json;
using namespace ncdir;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergent = 3;
constexpr std::uint64_t kDefaultSeed = 20240521;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string format = "";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> rel_tol;
  std::optional<std::size_t> max_terms;
};

struct ParamOptions {
  std::vector<double> alpha;
  std::vector<double> lambda;
};

constexpr int kFullPrecision = -2;

// A report table: named columns, rows of JSON scalars. Table output can pin
// the number of decimals per column (kFullPrecision prints 17 significant
// digits); other floats print with 6 significant digits.
struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<int> table_decimals;
};

std::string format_csv_cell(const json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  return v.dump();
}

std::string format_table_cell(const json& v, int decimals) {
  if (v.is_number_float()) {
    char buf[64];
    if (decimals >= 0)
      std::snprintf(buf, sizeof buf, "%.*f", decimals, v.get<double>());
    else if (decimals == kFullPrecision)
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    else
      std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_report(std::ostream& os, const Report& r, const std::string& format) {
  if (format == "csv") {
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_csv_cell(row[c]);
      os << '\n';
    }
  } else if (format == "json") {
    json arr = json::array();
    for (const auto& row : r.rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[r.columns[c]] = row[c];
      arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
  } else {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(r.columns.size());
    for (std::size_t c = 0; c < r.columns.size(); ++c) width[c] = r.columns[c].size();
    for (const auto& row : r.rows) {
      auto& line = cells.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        const int dec = c < r.table_decimals.size() ? r.table_decimals[c] : -1;
        line.push_back(format_table_cell(row[c], dec));
        width[c] = std::max(width[c], line.back().size());
      }
    }
    auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c)
        os << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << line[c];
      os << '\n';
    };
    emit(r.columns);
    for (const auto& line : cells) emit(line);
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void emit(const Report& r, const CommonOptions& common, const std::string& default_format,
          const std::string& command, const json& params, std::optional<std::uint64_t> seed) {
  const std::string format = common.format.empty() ? default_format : common.format;
  if (common.out.empty()) {
    write_report(std::cout, r, format);
    return;
  }
  std::ofstream file(common.out);
  if (!file) throw InputError("cannot open output file '" + common.out + "'");
  write_report(file, r, format);
  json manifest = {{"command", command},
                   {"params", params},
                   {"seed", seed ? json(*seed) : json(nullptr)},
                   {"library_version", kVersion},
                   {"timestamp", iso_timestamp()},
                   {"format", format},
                   {"output", common.out}};
  std::ofstream mf(common.out + ".manifest.json");
  if (!mf) throw InputError("cannot write manifest next to '" + common.out + "'");
  mf << manifest.dump(2) << '\n';
}

std::uint64_t resolve_seed(const CommonOptions& common) {
  if (common.seed) return *common.seed;
  if (const char* env = std::getenv("NCDIR_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw InputError(std::string("NCDIR_SEED must be an unsigned 64-bit integer, got '") + env +
                       "'");
    }
  }
  return kDefaultSeed;
}

SeriesControl make_control(const CommonOptions& common) {
  SeriesControl ctl;
  if (common.rel_tol) ctl.rel_tol = *common.rel_tol;
  if (common.max_terms) ctl.max_terms = *common.max_terms;
  ctl.validate();
  return ctl;
}

json control_json(const SeriesControl& ctl) {
  return {{"rel_tol", ctl.rel_tol}, {"max_terms", ctl.max_terms}, {"guard", ctl.guard}};
}

NcDirParams make_params(const ParamOptions& p) {
  if (p.alpha.empty() || p.lambda.empty()) throw InputError("--alpha and --lambda are required");
  return NcDirParams(p.alpha, p.lambda);
}

json params_json(const NcDirParams& p) {
  return {{"alpha", std::vector<double>(p.alpha().begin(), p.alpha().end())},
          {"lambda", std::vector<double>(p.lambda().begin(), p.lambda().end())}};
}

void add_param_options(CLI::App* cmd, ParamOptions& p) {
  cmd->add_option("--alpha", p.alpha, "Shape parameters alpha_1,...,alpha_{D+1}")->delimiter(',');
  cmd->add_option("--lambda", p.lambda, "Non-centralities lambda_1,...,lambda_{D+1}")->delimiter(',');
}

void add_common_options(CLI::App* cmd, CommonOptions& c, bool analytic) {
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  cmd->add_option("--out", c.out, "Write output to this file (a .manifest.json is written alongside)");
  cmd->add_option("--seed", c.seed, "RNG seed (falls back to NCDIR_SEED)");
  if (analytic) {
    cmd->add_option("--rel-tol", c.rel_tol, "Series relative tolerance");
    cmd->add_option("--max-terms", c.max_terms, "Series term budget");
  }
}

// ---- JSON config for validate and bench ----

struct RunConfig {
  ValidationConfig validation;
  std::size_t n_reps = 30;
};

RunConfig load_config(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  auto& v = rc.validation;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "param_sets") {
        v.param_sets.clear();
        for (const auto& row : value)
          v.param_sets.emplace_back(row.at("alpha").get<std::vector<double>>(),
                                    row.at("lambda").get<std::vector<double>>());
      } else if (key == "orders") {
        v.orders.clear();
        for (const auto& o : value) {
          const auto pair = o.get<std::vector<unsigned>>();
          if (pair.size() != 2) throw InputError("each order must be a pair [r1, r2]");
          v.orders.push_back({pair[0], pair[1]});
        }
      } else if (key == "n_series") {
        v.n_series = value.get<std::size_t>();
      } else if (key == "n_draws_per_series") {
        v.n_draws_per_series = value.get<std::size_t>();
      } else if (key == "seed") {
        v.seed = RngSeed{value.get<std::uint64_t>()};
      } else if (key == "alpha_level") {
        v.alpha_level = value.get<double>();
      } else if (key == "threads") {
        v.threads = value.get<std::size_t>();
      } else if (key == "n_reps") {
        rc.n_reps = value.get<std::size_t>();
      } else if (key == "rel_tol") {
        v.ctl.rel_tol = value.get<double>();
      } else if (key == "max_terms") {
        v.ctl.max_terms = value.get<std::size_t>();
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  return rc;
}

json config_json(const RunConfig& rc) {
  json rows = json::array();
  for (const auto& p : rc.validation.param_sets) rows.push_back(params_json(p));
  json orders = json::array();
  for (const auto& o : rc.validation.orders) orders.push_back({o.r1, o.r2});
  return {{"param_sets", rows},
          {"orders", orders},
          {"n_series", rc.validation.n_series},
          {"n_draws_per_series", rc.validation.n_draws_per_series},
          {"alpha_level", rc.validation.alpha_level},
          {"n_reps", rc.n_reps},
          {"series_control", control_json(rc.validation.ctl)}};
}

void push_param_columns(std::vector<std::string>& cols, std::size_t k) {
  for (std::size_t i = 1; i <= k; ++i) cols.push_back("alpha" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) cols.push_back("lambda" + std::to_string(i));
}

void push_param_values(std::vector<json>& row, const NcDirParams& p) {
  for (double a : p.alpha()) row.emplace_back(a);
  for (double l : p.lambda()) row.emplace_back(l);
}

// ---- subcommands ----

int cmd_sample(const ParamOptions& po, const CommonOptions& common, std::size_t n,
               const std::string& route) {
  const NcDirParams p = make_params(po);
  const std::uint64_t seed = resolve_seed(common);
  Rng rng(seed);
  Report r;
  for (std::size_t d = 1; d <= p.dim(); ++d) r.columns.push_back("x" + std::to_string(d));
  r.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SimplexPoint x = route == "mixture"          ? sample_ncdir_mixture(p, rng)
                           : route == "representation" ? sample_ncdir_representation(p, rng)
                                                       : sample_ncdir_definition(p, rng);
    r.rows.emplace_back(x.coords().begin(), x.coords().end());
  }
  json params = params_json(p);
  params["n"] = n;
  params["route"] = route;
  emit(r, common, "csv", "sample", params, seed);
  return kExitOk;
}

int cmd_density(const ParamOptions& po, const CommonOptions& common, const std::vector<double>& xs,
                const std::string& form) {
  const NcDirParams p = make_params(po);
  const SeriesControl ctl = make_control(common);
  const SimplexPoint x(xs);
  const SeriesSum s =
      form == "perturbation" ? ncdir_density_perturbation(p, x, ctl) : ncdir_density_mixture(p, x, ctl);
  Report r{{"value", "form", "terms_evaluated"}, {{s.value, form, s.terms}}, {kFullPrecision}};
  json params = params_json(p);
  params["x"] = xs;
  params["form"] = form;
  params["series_control"] = control_json(ctl);
  emit(r, common, "table", "density", params, std::nullopt);
  return kExitOk;
}

int cmd_moment(const ParamOptions& po, const CommonOptions& common, const std::vector<unsigned>& ord,
               const std::string& method, std::size_t n, bool central_check) {
  const NcDirParams p = make_params(po);
  if (ord.size() != 2) throw InputError("--order takes two values r1,r2");
  const MomentOrder order{ord[0], ord[1]};
  const SeriesControl ctl = make_control(common);
  json params = params_json(p);
  params["order"] = ord;
  params["method"] = method;
  params["series_control"] = control_json(ctl);

  MomentResult res;
  std::optional<std::uint64_t> seed;
  if (method == "mc") {
    if (n < 1) throw InputError("-n must be >= 1 for method mc");
    seed = resolve_seed(common);
    Rng rng(*seed);
    res.value = moment_mc(p, order, n, rng);
    res.terms_evaluated = n;
    params["n"] = n;
  } else {
    const MomentMethod m = method == "series"             ? MomentMethod::HypergeoSeries
                           : method == "definition"       ? MomentMethod::DefinitionSeries
                           : method == "closed11"         ? MomentMethod::Closed11
                           : method == "closed11-reduced" ? MomentMethod::Closed11Reduced
                                                          : MomentMethod::FiniteSum;
    res = compute_moment(p, order, m, ctl);
  }

  Report r{{"value", "method", "terms_evaluated", "converged"},
           {{res.value, method, res.terms_evaluated, res.converged}},
           {5}};
  if (central_check) {
    if (p.lambda_plus() != 0.0) throw InputError("--central-check requires lambda = 0");
    if (p.dim() != 2) throw InputError("--central-check requires D = 2");
    const double d = dirichlet_mixed_moment(p.alpha(), order);
    const bool equal = std::abs(d - res.value) <= 4.0 * 2.220446049250313e-16 * std::abs(d);
    r.columns.insert(r.columns.end(), {"dirichlet_value", "central_check"});
    r.rows[0].emplace_back(d);
    r.rows[0].emplace_back(equal ? "equal" : "different");
    r.table_decimals = {5, -1, -1, -1, 5};
  }
  emit(r, common, "table", "moment", params, seed);
  return kExitOk;
}

int cmd_validate(const CommonOptions& common, const std::string& config_path) {
  RunConfig rc = load_config(config_path);
  auto& cfg = rc.validation;
  if (common.seed || std::getenv("NCDIR_SEED")) cfg.seed = RngSeed{resolve_seed(common)};
  if (common.rel_tol) cfg.ctl.rel_tol = *common.rel_tol;
  if (common.max_terms) cfg.ctl.max_terms = *common.max_terms;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto reports = run_validation(cfg);

  Report r;
  const std::size_t k = cfg.param_sets.empty() ? 3 : cfg.param_sets.front().dim() + 1;
  push_param_columns(r.columns, k);
  r.columns.insert(r.columns.end(), {"r1", "r2", "target_mu", "sample_mean", "sample_sd", "z",
                                     "p_value", "n_series"});
  r.table_decimals.assign(2 * k, -1);
  r.table_decimals.insert(r.table_decimals.end(), {-1, -1, 5, 5, 5, 3, 5});
  std::size_t above = 0;
  for (const auto& rep : reports) {
    std::vector<json> row;
    push_param_values(row, rep.param_set);
    row.insert(row.end(), {rep.order.r1, rep.order.r2, rep.target_mu, rep.sample_mean,
                           rep.sample_sd, rep.z_stat, rep.p_value, rep.n_series});
    r.rows.push_back(std::move(row));
    if (rep.p_value > 0.01) ++above;
  }
  std::cerr << above << " of " << reports.size() << " p-values > 0.01 (two-tailed Z, n_series="
            << cfg.n_series << ", draws per series=" << cfg.n_draws_per_series << ")\n";
  json params = config_json(rc);
  emit(r, common, "csv", "validate", params, cfg.seed.value);
  return kExitOk;
}

int cmd_bench(const CommonOptions& common, const std::string& config_path, bool check_values) {
  RunConfig rc = load_config(config_path);
  auto& cfg = rc.validation;
  if (common.rel_tol) cfg.ctl.rel_tol = *common.rel_tol;
  if (common.max_terms) cfg.ctl.max_terms = *common.max_terms;
  if (rc.n_reps < 2) throw InputError("n_reps must be >= 2");
  try {
    cfg.ctl.validate();
    for (const auto& p : cfg.param_sets)
      if (p.dim() != 2) throw std::invalid_argument("bench parameter rows need D = 2");
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (rc.n_reps < 30)
    std::cerr << "warning: n_reps = " << rc.n_reps
              << " < 30 weakens the normal approximation behind the Z test\n";
  const auto reports = run_timing(cfg.param_sets, cfg.orders, rc.n_reps, cfg.ctl, check_values);

  Report r;
  push_param_columns(r.columns, 3);
  r.columns.insert(r.columns.end(), {"method", "mean_seconds", "sd_seconds", "median_seconds",
                                     "n_reps", "p_value", "speedup"});
  for (std::size_t i = 0; i + 1 < reports.size(); i += 2) {
    const double ratio = speedup(reports[i], reports[i + 1]);
    for (const auto* rep : {&reports[i], &reports[i + 1]}) {
      std::vector<json> row;
      push_param_values(row, rep->param_set);
      row.insert(row.end(), {std::string(rep->method == MomentMethod::FiniteSum ? "sum" : "series"),
                             rep->mean_seconds, rep->sd_seconds, rep->median_seconds, rep->n_reps,
                             rep->p_value_noninferiority, ratio});
      r.rows.push_back(std::move(row));
    }
  }
  json params = config_json(rc);
  params["check_values"] = check_values;
  emit(r, common, "csv", "bench", params, std::nullopt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-central Dirichlet sampling, densities and mixed moments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ParamOptions po;
  CommonOptions common;
  std::size_t n = 1000;
  std::string route = "definition";
  std::string form = "mixture";
  std::string method = "finite";
  std::vector<double> x;
  std::vector<unsigned> order{1, 1};
  std::string config;
  bool check_values = false;
  bool central_check = false;

  auto* sample = app.add_subcommand("sample", "Draw from NcDir(alpha, lambda)");
  add_param_options(sample, po);
  add_common_options(sample, common, false);
  sample->add_option("-n", n, "Number of draws");
  sample->add_option("--route", route, "Sampler route")
      ->check(CLI::IsMember({"definition", "mixture", "representation"}));

  auto* density = app.add_subcommand("density", "Evaluate the NcDir density at a point");
  add_param_options(density, po);
  add_common_options(density, common, true);
  density->add_option("--x", x, "Point x_1,...,x_D of the open simplex")->delimiter(',')->required();
  density->add_option("--form", form, "Series form")
      ->check(CLI::IsMember({"mixture", "perturbation"}));

  auto* moment = app.add_subcommand("moment", "Mixed raw moment E[X1^r1 X2^r2] for D = 2");
  add_param_options(moment, po);
  add_common_options(moment, common, true);
  moment->add_option("--order", order, "Order r1,r2")->delimiter(',');
  moment->add_option("--method", method, "Algorithm")
      ->check(CLI::IsMember({"finite", "series", "definition", "closed11", "closed11-reduced", "mc"}));
  moment->add_option("-n", n, "Draws for method mc");
  moment->add_flag("--central-check", central_check,
                   "Also print the Dirichlet moment (requires lambda = 0)");

  auto* validate = app.add_subcommand("validate", "Replicated Monte-Carlo Z-test validation");
  add_common_options(validate, common, true);
  validate->add_option("--config", config, "JSON config (defaults to the reference study)");

  auto* bench = app.add_subcommand("bench", "Time the finite sum against the 2F2 series");
  add_common_options(bench, common, true);
  bench->add_option("--config", config, "JSON config (defaults to the reference study)");
  bench->add_flag("--check-values", check_values,
                  "Require both methods to agree to 1e-9 relative before timing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*sample) return cmd_sample(po, common, n, route);
    if (*density) return cmd_density(po, common, x, form);
    if (*moment) return cmd_moment(po, common, order, method, n, central_check);
    if (*validate) return cmd_validate(common, config);
    if (*bench) return cmd_bench(common, config, check_values);
  } catch (const NonConvergent& e) {
    std::cerr << "error: series did not converge: " << e.what() << " (terms=" << e.terms()
              << ", partial_sum=" << std::setprecision(17) << e.partial_sum()
              << ", last_term=" << e.last_term() << ")\n";
    return kExitNonConvergent;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitUnexpected;
}
