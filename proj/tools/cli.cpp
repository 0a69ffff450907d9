#include "cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace distexp::cli {

namespace {

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = {
      "algorithm", "adversary", "model",   "T",        "k",      "n",     "seed_base",
      "seeds",     "threads",   "jitter",  "jitter_slack", "out", "epsilon", "ell",
      "eta",       "p_sync",    "beta",    "budget",   "forecaster", "mu", "lambda",
      "block",     "gap",       "index",   "allocation"};
  return k;
}

const std::vector<std::string>& adversary_keys() {
  static const std::vector<std::string> k = {"mu", "lambda", "block", "gap", "index"};
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& field, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigurationError("field '" + field + "': expected a number, got '" + v + "'");
  }
  return out;
}

std::int64_t to_integer(const std::string& field, const std::string& v) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigurationError("field '" + field + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigurationError("field '" + field + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SiteAllocation parse_allocation(const std::string& v) {
  if (v == "cyclic") return SiteAllocation::Cyclic;
  if (v == "single") return SiteAllocation::SingleSite;
  if (v == "permutation") return SiteAllocation::PermutationPerBlock;
  throw ConfigurationError("field 'allocation': expected cyclic, single or permutation, got '" +
                           v + "'");
}

std::string allocation_name(SiteAllocation a) {
  switch (a) {
    case SiteAllocation::Cyclic: return "cyclic";
    case SiteAllocation::SingleSite: return "single";
    case SiteAllocation::PermutationPerBlock: return "permutation";
  }
  return "cyclic";
}

AdversarySpec default_adversary(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Zigzag: return zigzag_spec(50);
    case AdversaryKind::Markov: return markov_spec(20);
    case AdversaryKind::BlockCoin: return block_coin_spec(16);
    case AdversaryKind::AdaptiveBlock: return adaptive_block_spec();
    case AdversaryKind::CounterPermutation: return counter_permutation_spec();
    case AdversaryKind::AppendixD: return appendix_d_spec(0, 1);
    case AdversaryKind::IidUniform: return iid_uniform_spec();
    case AdversaryKind::Bernoulli: return bernoulli_spec(0.2);
    case AdversaryKind::Custom: break;
  }
  throw ConfigurationError("field 'adversary': custom sequences cannot be configured from a file");
}

std::string params_of(const AlgorithmSpec& a) { return a.params_string(); }

std::string adversary_label(const AdversarySpec& spec) {
  const std::string p = spec.params_string();
  return p.empty() ? to_string(spec.kind) : to_string(spec.kind) + ":" + p;
}

/// DISTEXP_THREADS if set and non-empty.
std::optional<int> env_threads() {
  const char* v = std::getenv("DISTEXP_THREADS");
  if (v == nullptr || trim(v).empty()) return std::nullopt;
  return static_cast<int>(to_integer("DISTEXP_THREADS", trim(v)));
}

// Surfaces configuration errors (bad knobs, horizon constraints) before any
// run starts, so they map to exit code 2 rather than a batch failure.
void dry_build(const ExperimentConfig& config) {
  config.validate();
  const RunOptions options = config.run_options(config.seed_base);
  try {
    make_algorithm(*config.algorithm, options);
    make_adversary(*config.adversary, effective_horizon(*config.algorithm, options), config.k,
                   config.n, config.seed_base);
  } catch (const InvalidArgument& e) {
    throw ConfigurationError(e.what());
  } catch (const UnsupportedArity& e) {
    throw ConfigurationError(e.what());
  }
}

struct Output {
  std::ofstream file;
  std::ostream* csv = nullptr;
  std::ostream* summary = nullptr;

  Output(const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty() || path == "-") {
      csv = &out;
      summary = &err;
      return;
    }
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigurationError("field 'out': cannot open '" + path + "' for writing");
    csv = &file;
    summary = &out;
  }
};

void write_preamble(std::ostream& os, const std::vector<std::string>& lines) {
  os << kCsvSchema << '\n';
  for (const auto& l : lines) os << "# " << l << '\n';
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

void summarize(std::ostream& os, const ExperimentConfig& c, const BatchResult& b) {
  os << to_string(c.algorithm->kind) << " on " << adversary_label(*c.adversary) << " (T=" << b.horizon
     << ", k=" << c.k << ", n=" << c.n << ", seeds=" << b.rows.size() << "): regret "
     << brief(b.mean_regret) << " +- " << brief(b.std_regret) << ", messages "
     << brief(b.mean_messages) << " +- " << brief(b.std_messages) << '\n';
}

void report_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// -- Options shared by all subcommands ---------------------------------------

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag>& knob_flags() {
  static const std::vector<Flag> f = {
      {"--algorithm", "algorithm", "full, none, minibatch, counter, dfpl or lef"},
      {"--adversary", "adversary", "payoff sequence generator"},
      {"--model", "model", "site or coordinator"},
      {"--T", "T", "horizon"},
      {"--k", "k", "number of sites"},
      {"--n", "n", "number of experts"},
      {"--seed-base", "seed_base", "first seed"},
      {"--seeds", "seeds", "number of seeds"},
      {"--threads", "threads", "worker threads (fallback: DISTEXP_THREADS)"},
      {"--epsilon", "epsilon", "DFPL block exponent"},
      {"--ell", "ell", "DFPL block length (overrides epsilon)"},
      {"--eta", "eta", "noise override"},
      {"--p-sync", "p_sync", "mini-batch sync probability"},
      {"--beta", "beta", "counter accuracy"},
      {"--budget", "budget", "LEF communication budget C"},
      {"--forecaster", "forecaster", "LEF forecaster: ewf or fpl"},
      {"--mu", "mu", "zig-zag run length"},
      {"--lambda", "lambda", "Markov correlation"},
      {"--block", "block", "block length for block_coin / adaptive_block"},
      {"--gap", "gap", "Bernoulli mean gap"},
      {"--index", "index", "appendix_d sequence index"},
      {"--allocation", "allocation", "cyclic, single or permutation"},
      {"--jitter-slack", "jitter_slack", "relative block-length slack"},
  };
  return f;
}

struct CommonOptions {
  std::string config_path;
  std::string out = "-";
  CLI::Option* out_opt = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool jitter = false;
  CLI::Option* jitter_flag = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key=value config file");
    out_opt = app->add_option("--out", out, "CSV output path ('-' for standard output)");
    for (const auto& f : knob_flags()) {
      options[f.key] = app->add_option(f.name, values[f.key], f.help);
    }
    jitter_flag = app->add_flag("--jitter", jitter, "jitter DFPL block lengths");
  }

  /// Config file first, then flags; flags win.
  Settings settings() const {
    Settings s;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw ConfigurationError("cannot read config file '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      s = parse_settings(buf.str(), config_path);
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      s[key] = values.at(key);
    }
    if (jitter_flag->count() > 0) s["jitter"] = jitter ? "true" : "false";
    if (s.count("threads") == 0) {
      if (const auto n = env_threads()) s["threads"] = std::to_string(*n);
    }
    return s;
  }

  std::string out_path(const Settings& s) const {
    if (out_opt->count() == 0) {
      auto it = s.find("out");
      if (it != s.end()) return it->second;
    }
    return out;
  }
};

// -- run -----------------------------------------------------------------------

int cmd_run(const CommonOptions& common, std::ostream& out, std::ostream& err) {
  const Settings s = common.settings();
  const ExperimentConfig config = build_config(s);
  dry_build(config);
  Output o(common.out_path(s), out, err);
  const BatchResult batch = run_batch(config);
  report_warnings(err, batch.warnings);
  write_preamble(*o.csv, effective_settings(config));
  *o.csv << kRunHeader << '\n';
  write_run_rows(*o.csv, config, batch);
  o.csv->flush();
  summarize(*o.summary, config, batch);
  return 0;
}

// -- sweep ---------------------------------------------------------------------

const std::map<std::string, std::string>& sweep_knobs() {
  static const std::map<std::string, std::string> m = {
      {"T", "T"},         {"k", "k"},           {"epsilon", "epsilon"}, {"mu", "mu"},
      {"lambda", "lambda"}, {"C", "budget"},    {"beta", "beta"},       {"p_sync", "p_sync"},
  };
  return m;
}

int cmd_sweep(const CommonOptions& common, const std::string& param, const std::string& values,
              std::ostream& out, std::ostream& err) {
  auto knob = sweep_knobs().find(param);
  if (knob == sweep_knobs().end()) {
    throw ConfigurationError("sweep: unknown parameter '" + param +
                             "' (expected T, k, epsilon, mu, lambda, C, beta or p_sync)");
  }
  const auto list = split_list(values);
  if (list.empty()) throw ConfigurationError("sweep: empty value list for '" + param + "'");

  const Settings base = common.settings();
  std::vector<ExperimentConfig> configs;
  for (const auto& v : list) {
    Settings s = base;
    s[knob->second] = v;
    configs.push_back(build_config(s));
    dry_build(configs.back());
  }

  Output o(common.out_path(base), out, err);
  std::vector<std::string> preamble = effective_settings(configs.front());
  preamble.push_back("sweep=" + param);
  preamble.push_back("values=" + values);
  write_preamble(*o.csv, preamble);
  *o.csv << "sweep_param,sweep_value," << kRunHeader << '\n';
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const BatchResult batch = run_batch(configs[i]);
    report_warnings(err, batch.warnings);
    write_run_rows(*o.csv, configs[i], batch, param + "," + list[i] + ",");
    *o.summary << param << "=" << list[i] << ": ";
    summarize(*o.summary, configs[i], batch);
  }
  o.csv->flush();
  return 0;
}

// -- figure --------------------------------------------------------------------

std::vector<double> list_or(const Settings& s, const std::string& key, std::vector<double> fallback) {
  auto it = s.find(key);
  if (it == s.end()) return fallback;
  std::vector<double> out;
  for (const auto& v : split_list(it->second)) out.push_back(to_real(key, v));
  if (out.empty()) throw ConfigurationError("field '" + key + "': empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_number(v[i]);
  return s;
}

ExperimentConfig figure_base(const Settings& s) {
  Settings base;
  for (const char* key : {"T", "k", "n", "seed_base", "seeds", "threads", "jitter", "jitter_slack"}) {
    auto it = s.find(key);
    if (it != s.end()) base[key] = it->second;
  }
  base["algorithm"] = "dfpl";
  base["adversary"] = "markov";
  return build_config(base);
}

int cmd_figure(const CommonOptions& common, const std::string& name, std::ostream& out,
               std::ostream& err) {
  const Settings s = common.settings();
  ExperimentConfig base = figure_base(s);
  auto knob_or = [&](const std::string& key, double fallback) {
    auto it = s.find(key);
    return it == s.end() ? fallback : to_real(key, it->second);
  };

  std::vector<std::string> preamble = {"figure=" + name};
  for (const auto& l : effective_settings(base)) {
    const std::string key = l.substr(0, l.find('='));
    for (const char* kept : {"T", "k", "n", "seed_base", "seeds", "jitter", "jitter_slack"}) {
      if (key == kept) preamble.push_back(l);
    }
  }

  if (name == "fig_a") {
    const auto lambdas = list_or(s, "lambda", {1, 2, 5, 20, 80, 320});
    std::vector<AlgorithmSpec> algos;
    for (auto kind : {AlgorithmKind::FullComm, AlgorithmKind::NoComm, AlgorithmKind::MiniBatch,
                      AlgorithmKind::Counter, AlgorithmKind::Dfpl}) {
      AlgorithmSpec a{kind};
      a.p_sync = knob_or("p_sync", a.p_sync);
      a.beta = knob_or("beta", a.beta);
      a.epsilon = knob_or("epsilon", a.epsilon);
      algos.push_back(a.with_defaults(base.T, base.k));
    }
    for (const auto& l : lambdas) {
      if (!(l >= 0.5)) throw ConfigurationError("field 'lambda': values must be >= 1/2");
    }
    std::vector<std::pair<AlgorithmSpec, ExperimentConfig>> cells;
    for (const auto& a : algos) {
      for (double l : lambdas) {
        ExperimentConfig c = base;
        c.algorithm = a;
        c.adversary = markov_spec(l);
        c.model.reset();
        dry_build(c);
        cells.emplace_back(a, c);
      }
    }
    Output o(common.out_path(s), out, err);
    preamble.push_back("lambda_grid=" + join(lambdas));
    write_preamble(*o.csv, preamble);
    *o.csv << "algo,params,lambda,T,k,n,seeds,mean_regret,std_regret,mean_messages,std_messages\n";
    for (const auto& [a, c] : cells) {
      const BatchResult b = run_batch(c);
      report_warnings(err, b.warnings);
      *o.csv << to_string(a.kind) << ',' << params_of(a) << ','
             << format_number(c.adversary->required("lambda")) << ',' << b.horizon << ',' << c.k
             << ',' << c.n << ',' << b.rows.size() << ',' << format_number(b.mean_regret) << ','
             << format_number(b.std_regret) << ',' << format_number(b.mean_messages) << ','
             << format_number(b.std_messages) << '\n';
      summarize(*o.summary, c, b);
    }
    o.csv->flush();
    return 0;
  }

  if (name == "fig_b") {
    const auto mus = list_or(s, "mu", {10, 50, 250, 1250});
    const auto lambdas = list_or(s, "lambda", {5, 20, 80});
    std::vector<AdversarySpec> grid;
    for (double m : mus) {
      if (!(m >= 1.0) || m != static_cast<double>(static_cast<std::int64_t>(m))) {
        throw ConfigurationError("field 'mu': values must be integers >= 1");
      }
      grid.push_back(zigzag_spec(static_cast<std::int64_t>(m)));
    }
    for (double l : lambdas) {
      if (!(l >= 0.5)) throw ConfigurationError("field 'lambda': values must be >= 1/2");
      grid.push_back(markov_spec(l));
    }
    std::vector<AlgorithmSpec> algos;
    for (double e : list_or(s, "epsilon", {0.05, 0.1, 0.15})) {
      AlgorithmSpec a{AlgorithmKind::Dfpl};
      a.epsilon = e;
      algos.push_back(a);
    }
    for (double p : list_or(s, "p_sync", {0.002, 0.01, 0.05})) {
      AlgorithmSpec a{AlgorithmKind::MiniBatch};
      a.p_sync = p;
      algos.push_back(a);
    }
    const double k = static_cast<double>(base.k);
    for (double beta : list_or(s, "beta", {k, 4 * k, 16 * k})) {
      AlgorithmSpec a{AlgorithmKind::Counter};
      a.beta = beta;
      algos.push_back(a);
    }
    for (const auto& a : algos) {
      for (const auto& g : grid) {
        ExperimentConfig c = base;
        c.algorithm = a;
        c.adversary = g;
        dry_build(c);
      }
    }
    Output o(common.out_path(s), out, err);
    preamble.push_back("mu_grid=" + join(mus));
    preamble.push_back("lambda_grid=" + join(lambdas));
    write_preamble(*o.csv, preamble);
    *o.csv << "algo,params,T,k,n,seeds,worst_regret,worst_messages\n";
    for (const auto& r : worst_case_sweep(algos, grid, base)) {
      for (const auto& p : r.points) report_warnings(err, p.batch.warnings);
      const std::int64_t horizon = r.points.empty() ? base.T : r.points.front().batch.horizon;
      *o.csv << to_string(r.algorithm.kind) << ',' << params_of(r.algorithm) << ','
             << horizon << ',' << base.k << ',' << base.n << ',' << base.seeds << ','
             << format_number(r.worst_regret) << ',' << format_number(r.worst_messages) << '\n';
      *o.summary << to_string(r.algorithm.kind) << " [" << params_of(r.algorithm)
                 << "]: worst regret " << format_number(r.worst_regret) << ", worst messages "
                 << format_number(r.worst_messages) << '\n';
    }
    o.csv->flush();
    return 0;
  }

  throw ConfigurationError("figure: unknown name '" + name + "' (expected fig_a or fig_b)");
}

}  // namespace

// -- Settings ------------------------------------------------------------------

bool known_key(const std::string& key) {
  for (const auto& k : keys()) {
    if (k == key) return true;
  }
  return false;
}

Settings parse_settings(const std::string& text, const std::string& origin) {
  Settings s;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw ConfigurationError(where + ": expected key=value, got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (!known_key(key)) throw ConfigurationError(where + ": unknown key '" + key + "'");
    s[key] = trim(body.substr(eq + 1));
  }
  return s;
}

ExperimentConfig build_config(const Settings& s) {
  ExperimentConfig c;
  for (const auto& [key, value] : s) {
    if (!known_key(key)) throw ConfigurationError("unknown key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };

  if (auto v = get("T")) c.T = to_integer("T", *v);
  if (auto v = get("k")) c.k = static_cast<int>(to_integer("k", *v));
  if (auto v = get("n")) c.n = static_cast<int>(to_integer("n", *v));
  if (auto v = get("seed_base")) {
    const auto b = to_integer("seed_base", *v);
    if (b < 0) throw ConfigurationError("field 'seed_base' must be >= 0");
    c.seed_base = static_cast<std::uint64_t>(b);
  }
  if (auto v = get("seeds")) c.seeds = static_cast<int>(to_integer("seeds", *v));
  if (auto v = get("threads")) c.threads = static_cast<int>(to_integer("threads", *v));
  if (auto v = get("jitter")) c.jitter.enabled = to_bool("jitter", *v);
  if (auto v = get("jitter_slack")) c.jitter.relative_slack = to_real("jitter_slack", *v);
  if (auto v = get("out")) c.output_path = *v;

  if (auto v = get("algorithm")) {
    AlgorithmSpec a{parse_algorithm_kind(*v)};
    if (auto x = get("epsilon")) a.epsilon = to_real("epsilon", *x);
    if (auto x = get("ell")) a.ell = to_integer("ell", *x);
    if (auto x = get("eta")) a.eta = to_real("eta", *x);
    if (auto x = get("p_sync")) a.p_sync = to_real("p_sync", *x);
    if (auto x = get("beta")) a.beta = to_real("beta", *x);
    if (auto x = get("budget")) a.budget = to_integer("budget", *x);
    if (auto x = get("forecaster")) {
      if (*x == "ewf") {
        a.lef_forecaster = LefForecaster::Ewf;
      } else if (*x == "fpl") {
        a.lef_forecaster = LefForecaster::Fpl;
      } else {
        throw ConfigurationError("field 'forecaster': expected ewf or fpl, got '" + *x + "'");
      }
    }
    if (a.ell < 0) throw ConfigurationError("field 'ell' must be >= 1");
    if (a.eta < 0.0) throw ConfigurationError("field 'eta' must be > 0");
    if (a.beta < 0.0) throw ConfigurationError("field 'beta' must be > 0");
    c.algorithm = a.with_defaults(c.T, c.k);
  }

  if (auto v = get("adversary")) {
    AdversarySpec spec = default_adversary(parse_adversary_kind(*v));
    for (const auto& key : adversary_keys()) {
      if (auto x = get(key)) spec.params[key] = to_real(key, *x);
    }
    if (spec.kind == AdversaryKind::AdaptiveBlock && !get("block")) {
      spec.params["block"] = c.k;
    }
    if (auto x = get("allocation")) spec.allocation = parse_allocation(*x);
    c.adversary = spec;
  }

  if (auto v = get("model")) {
    if (*v == "site") {
      c.model = ModelKind::SitePrediction;
    } else if (*v == "coordinator") {
      c.model = ModelKind::CoordinatorPrediction;
    } else {
      throw ConfigurationError("field 'model': expected site or coordinator, got '" + *v + "'");
    }
  }
  c.validate();
  return c;
}

std::vector<std::string> effective_settings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  if (c.algorithm) {
    const AlgorithmSpec& a = *c.algorithm;
    out.push_back("algorithm=" + to_string(a.kind));
    out.push_back("model=" + to_string(c.model.value_or(default_model(a.kind))));
    out.push_back("epsilon=" + format_number(a.epsilon));
    out.push_back("ell=" + std::to_string(a.ell));
    out.push_back("eta=" + format_number(a.eta));
    out.push_back("p_sync=" + format_number(a.p_sync));
    out.push_back("beta=" + format_number(a.beta));
    out.push_back("budget=" + std::to_string(a.budget));
    out.push_back(std::string("forecaster=") +
                  (a.lef_forecaster == LefForecaster::Ewf ? "ewf" : "fpl"));
  }
  if (c.adversary) {
    out.push_back("adversary=" + to_string(c.adversary->kind));
    for (const auto& [key, value] : c.adversary->params) {
      out.push_back(key + "=" + format_number(value));
    }
    out.push_back("allocation=" + allocation_name(c.adversary->allocation));
  }
  out.push_back("T=" + std::to_string(c.T));
  out.push_back("k=" + std::to_string(c.k));
  out.push_back("n=" + std::to_string(c.n));
  out.push_back("seed_base=" + std::to_string(c.seed_base));
  out.push_back("seeds=" + std::to_string(c.seeds));
  out.push_back(std::string("jitter=") + (c.jitter.enabled ? "true" : "false"));
  out.push_back("jitter_slack=" + format_number(c.jitter.relative_slack));
  return out;
}

std::string format_number(double v) { return format_real(v); }

const char* const kRunHeader = "algo,adversary,params,T,k,n,seed,regret,messages,reals_sent";

void write_run_rows(std::ostream& os, const ExperimentConfig& c, const BatchResult& b,
                    const std::string& prefix) {
  const std::string algo = to_string(c.algorithm->kind);
  const std::string adv = adversary_label(*c.adversary);
  const std::string params = params_of(*c.algorithm);
  for (const auto& row : b.rows) {
    os << prefix << algo << ',' << adv << ',' << params << ',' << b.horizon << ',' << c.k << ','
       << c.n << ',' << row.seed << ',' << format_number(row.result.regret) << ','
       << row.result.ledger.messages() << ',' << row.result.ledger.reals_sent() << '\n';
  }
}

// -- Entry point -----------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed experts simulator", "distexp"};
  app.require_subcommand(1);

  CommonOptions run_opts, fig_opts, sweep_opts;
  auto* run_cmd = app.add_subcommand("run", "run one configuration over a batch of seeds");
  run_opts.attach(run_cmd);

  std::string figure_name;
  auto* fig_cmd = app.add_subcommand("figure", "reproduce a simulation figure (fig_a, fig_b)");
  fig_cmd->add_option("name", figure_name, "fig_a or fig_b")->required();
  fig_opts.attach(fig_cmd);

  std::string sweep_param, sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "cross a knob's values with the seed list");
  sweep_cmd->add_option("--param", sweep_param, "T, k, epsilon, mu, lambda, C, beta or p_sync")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep_opts.attach(sweep_cmd);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, out, err);
    if (fig_cmd->parsed()) return cmd_figure(fig_opts, figure_name, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_param, sweep_values, out, err);
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace distexp::cli
