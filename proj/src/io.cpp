#include "hydrob/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <variant>

#include "hydrob/harness.hpp"
#include "json.hpp"

#ifndef HYDROB_VERSION
#define HYDROB_VERSION "0.0.0"
#endif

namespace hydrob {

using nlohmann::ordered_json;

std::string_view version() { return HYDROB_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using Ref = std::variant<int*, double*, bool*, std::uint64_t*, std::string*, std::vector<double>*>;

struct Field {
  const char* section;
  const char* key;
  Ref (*ref)(RunConfig&);
};

#define HYDROB_FIELD(sec, name) \
  Field { #sec, #name, [](RunConfig& c) -> Ref { return &c.sec.name; } }

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      HYDROB_FIELD(grid, dh),
      HYDROB_FIELD(grid, nh),
      HYDROB_FIELD(grid, ny),
      HYDROB_FIELD(grid, lh),
      HYDROB_FIELD(params, theta),
      HYDROB_FIELD(params, b),
      HYDROB_FIELD(params, eps),
      HYDROB_FIELD(params, eps_list),
      HYDROB_FIELD(params, delta),
      HYDROB_FIELD(params, seed),
      HYDROB_FIELD(monitors, s1),
      HYDROB_FIELD(monitors, s2),
      HYDROB_FIELD(monitors, radius_a),
      HYDROB_FIELD(monitors, kappa),
      HYDROB_FIELD(monitors, lambda),
      HYDROB_FIELD(monitors, lambda_tilde),
      HYDROB_FIELD(monitors, eps1),
      HYDROB_FIELD(monitors, bootstrap_c1),
      HYDROB_FIELD(monitors, smallness_c1),
      HYDROB_FIELD(monitors, eps0),
      HYDROB_FIELD(monitors, blowup_ceiling),
      HYDROB_FIELD(monitors, assert_mode),
      HYDROB_FIELD(monitors, lemma_samples),
      HYDROB_FIELD(monitors, product_ceiling),
      HYDROB_FIELD(monitors, composition_ceiling),
      HYDROB_FIELD(stepping, dt),
      HYDROB_FIELD(stepping, t_final),
      HYDROB_FIELD(stepping, snapshot_every),
      HYDROB_FIELD(stepping, dt_list),
      HYDROB_FIELD(stepping, cfl),
      HYDROB_FIELD(stepping, workers),
      HYDROB_FIELD(output, dir),
  };
  return fields;
}

#undef HYDROB_FIELD

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

bool parse_integer(const std::string& text, long long& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

// Returns an error message, empty on success.
std::string assign(Ref ref, const std::string& text) {
  return std::visit(
      [&](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!parse_number(text, *p)) return "expected a number, got '" + text + "'";
        } else if constexpr (std::is_same_v<T, int>) {
          long long v;
          if (!parse_integer(text, v) || v < INT32_MIN || v > INT32_MAX)
            return "expected an integer, got '" + text + "'";
          *p = static_cast<int>(v);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          const std::string s = trim(text);
          char* end = nullptr;
          errno = 0;
          const auto v = std::strtoull(s.c_str(), &end, 10);
          if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE)
            return "expected a nonnegative integer, got '" + text + "'";
          *p = v;
        } else if constexpr (std::is_same_v<T, bool>) {
          const std::string s = trim(text);
          if (s == "true" || s == "1") *p = true;
          else if (s == "false" || s == "0") *p = false;
          else return "expected true or false, got '" + text + "'";
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = trim(text);
        } else {
          p->clear();
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ',')) {
            double v;
            if (!parse_number(item, v)) return "expected a comma-separated list of numbers";
            p->push_back(v);
          }
        }
        return {};
      },
      ref);
}

std::string render(Ref ref) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) return format_double(*p);
        else if constexpr (std::is_same_v<T, bool>) return *p ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return *p;
        else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i) {
            if (i) out += ", ";
            out += format_double((*p)[i]);
          }
          return out;
        } else return std::to_string(*p);
      },
      ref);
}

ordered_json json_value(Ref ref) {
  return std::visit([](auto* p) { return ordered_json(*p); }, ref);
}

ordered_json config_json(const RunConfig& config) {
  RunConfig copy = config;
  ordered_json out = ordered_json::object();
  for (const auto& f : registry()) out[f.section][f.key] = json_value(f.ref(copy));
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config parse error at line " + std::to_string(e.line()) + ": " +
                      e.message());
  }

  RunConfig config;
  std::vector<std::string> issues;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      issues.push_back("key '" + section + "' appears outside a section");
      continue;
    }
    bool known_section = false;
    for (const auto& f : registry()) known_section = known_section || section == f.section;
    if (!known_section) {
      issues.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, node] : body) {
      const Field* match = nullptr;
      for (const auto& f : registry())
        if (section == f.section && key == f.key) match = &f;
      if (!match) {
        issues.push_back("unknown key '" + key + "' in [" + section + "]");
        continue;
      }
      const auto err = assign(match->ref(config), node.data());
      if (!err.empty()) issues.push_back(section + "." + key + ": " + err);
    }
  }
  if (!issues.empty()) throw ConfigError("invalid configuration", issues);
  return config;
}

RunConfig load_config(std::string_view text, Mode mode) {
  auto config = parse_config(text);
  auto issues = validate(config, mode);
  if (!issues.empty()) throw ConfigError("configuration out of range", std::move(issues));
  return config;
}

std::string serialize_config(const RunConfig& config) {
  RunConfig copy = config;
  std::string out;
  std::string current;
  for (const auto& f : registry()) {
    if (current != f.section) {
      if (!current.empty()) out += "\n";
      out += "[" + std::string(f.section) + "]\n";
      current = f.section;
    }
    out += std::string(f.key) + " = " + render(f.ref(copy)) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

// NaN and infinities become null; everything else is a plain number.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct Outcome {
  std::vector<std::pair<std::string, std::string>> files;
  ordered_json summary = ordered_json::object();
  int exit_code = kExitOk;
  std::string message;
};

Outcome run_limit_mode(const RunConfig& config) {
  Outcome o;
  const auto run = run_limit(config);
  CsvWriter csv(limit_columns());
  for (const auto& r : run.rows) csv.row(r.values());
  o.files.emplace_back("timeseries.csv", csv.text());

  const bool energy_ok = run.max_energy_ratio <= 100.0;
  const bool psi_ok = run.min_psi_radius >= 0.5 * config.monitors.radius_a;
  auto& s = o.summary;
  s["status"] = std::string(to_string(run.status));
  s["failure"] = run.failure;
  s["steps"] = run.steps;
  s["t_final"] = num(run.final_state ? run.final_state->t : 0.0);
  s["max_energy_ratio"] = num(run.max_energy_ratio);
  s["energy_ok"] = energy_ok;
  s["bootstrap_violation_time"] =
      run.bootstrap_violation_time ? num(*run.bootstrap_violation_time) : ordered_json(nullptr);
  s["min_psi_radius"] = num(run.min_psi_radius);
  s["psi_radius_ok"] = psi_ok;
  s["eta_monotone"] = run.eta_monotone;
  s["max_vertical_mean"] = num(run.max_vertical_mean);
  s["max_divergence"] = num(run.max_divergence);

  if (run.status == RunStatus::NumericalBlowup) {
    o.exit_code = kExitBlowup;
    o.message = run.failure;
  } else if (config.monitors.assert_mode &&
             (run.status == RunStatus::MonitorViolation || !energy_ok)) {
    o.exit_code = kExitMonitor;
    o.message = run.failure.empty() ? "energy ratio above 100" : run.failure;
  }
  return o;
}

Outcome run_eps_mode(const RunConfig& config) {
  Outcome o;
  const auto run = run_eps(config, config.params.eps);
  CsvWriter csv(eps_columns());
  for (const auto& r : run.rows) csv.row(r.values());
  o.files.emplace_back("timeseries.csv", csv.text());

  const auto& h = run.hypothesis;
  auto& s = o.summary;
  s["status"] = std::string(to_string(run.status));
  s["failure"] = run.failure;
  s["eps"] = num(config.params.eps);
  s["steps"] = run.steps;
  s["max_divergence"] = num(run.max_divergence);
  s["divergence_ok"] = run.max_divergence <= 1e-10;
  s["max_v_mean"] = num(run.max_v_mean);
  s["max_cfl"] = num(run.max_cfl);
  s["hypothesis"] = {{"sup_uv", num(h.sup_uv)},
                     {"sup_sqrt_eps_tau", num(h.sup_sqrt_eps_tau)},
                     {"l2_grad_uv", num(h.l2_grad_uv)},
                     {"l1_grad_uv", num(h.l1_grad_uv)},
                     {"l2_tau", num(h.l2_tau)},
                     {"total", num(h.total())},
                     {"bound", num(h.bound)},
                     {"ok", h.ok()}};
  if (run.status == RunStatus::NumericalBlowup) {
    o.exit_code = kExitBlowup;
    o.message = run.failure;
  } else if (config.monitors.assert_mode && (!h.ok() || run.max_divergence > 1e-10)) {
    o.exit_code = kExitMonitor;
    o.message = "eps run monitor violated";
  }
  return o;
}

ordered_json fit_json(const RateFit& f) {
  return {{"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"residual", num(f.residual)}};
}

Outcome run_convergence_mode(const RunConfig& config) {
  Outcome o;
  const auto study = convergence_study(config, config.params.eps_list);
  CsvWriter csv({"eps", "velocity_error", "stress_error", "error", "hypothesis_total",
                 "max_divergence", "zeta_final", "phi_radius_min"});
  for (const auto& p : study.points)
    csv.row(std::vector<double>{p.eps, p.velocity_error, p.stress_error, p.error,
                                p.hypothesis.total(), p.max_divergence, p.zeta_final,
                                p.phi_radius_min});
  o.files.emplace_back("rate.csv", csv.text());

  const bool in_band = study.fit.slope >= 0.8 && study.fit.slope <= 1.2;
  const bool pass = study.complete && !study.degenerate && in_band && study.errors_decreasing;
  bool zeta_monotone = true, sandwich = true, hypothesis = true;
  double max_div = 0.0;
  for (const auto& p : study.points) {
    zeta_monotone = zeta_monotone && p.zeta_monotone;
    sandwich = sandwich && p.sandwich_ok;
    hypothesis = hypothesis && p.hypothesis.ok();
    max_div = std::max(max_div, p.max_divergence);
  }
  auto& s = o.summary;
  s["complete"] = study.complete;
  s["failure"] = study.failure;
  s["degenerate"] = study.degenerate;
  s["fit"] = fit_json(study.fit);
  s["velocity_fit"] = fit_json(study.velocity_fit);
  s["stress_fit"] = fit_json(study.stress_fit);
  s["slope"] = num(study.fit.slope);
  s["errors_decreasing"] = study.errors_decreasing;
  s["pass"] = pass;
  s["max_divergence"] = num(max_div);
  s["zeta_monotone"] = zeta_monotone;
  s["phi_sandwich_ok"] = sandwich;
  s["hypothesis_ok"] = hypothesis;
  s["limit"] = {{"status", std::string(to_string(study.limit_status))},
                {"max_energy_ratio", num(study.limit_energy_ratio)},
                {"min_psi_radius", num(study.limit_min_psi_radius)},
                {"max_divergence", num(study.limit_max_divergence)},
                {"eta_monotone", study.limit_eta_monotone}};
  if (!study.complete) {
    o.exit_code = kExitBlowup;
    o.message = study.failure;
  } else if (config.monitors.assert_mode && !pass) {
    o.exit_code = kExitMonitor;
    o.message = "rate study outside the acceptance band";
  }
  return o;
}

ordered_json lemma_json(const LemmaReport& r) {
  return {{"samples", r.samples},   {"skipped", r.skipped},   {"max_ratio", num(r.max_ratio)},
          {"ceiling", num(r.ceiling)}, {"violations", r.violations}, {"pass", r.pass}};
}

Outcome run_lemmas_mode(const RunConfig& config) {
  Outcome o;
  const auto suite = lemma_suite(config);
  CsvWriter csv({"check", "sample", "value"});
  auto dump = [&](const std::string& name, const LemmaReport& r) {
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
      csv.row(std::vector<std::string>{name, std::to_string(i), format_double(r.ratios[i])});
  };
  dump("magnitude", suite.magnitude);
  dump("product_n", suite.product_coarse);
  dump("product_2n", suite.product_fine);
  dump("composition_g1", suite.composition);
  dump("composition_g1_small", suite.composition_small);
  dump("composition_g2_small", suite.composition_g2);
  dump("poincare_margin", suite.poincare);
  o.files.emplace_back("lemmas.csv", csv.text());

  auto& s = o.summary;
  s["magnitude"] = lemma_json(suite.magnitude);
  s["product_n"] = lemma_json(suite.product_coarse);
  s["product_2n"] = lemma_json(suite.product_fine);
  s["product_drift"] = num(suite.product_drift);
  s["product_stable"] = suite.product_stable;
  s["composition_g1"] = lemma_json(suite.composition);
  s["composition_g1_small"] = lemma_json(suite.composition_small);
  s["composition_small_error"] = num(suite.composition_small_error);
  s["composition_g2_small"] = lemma_json(suite.composition_g2);
  s["poincare"] = {{"samples", suite.poincare.samples},
                   {"min_margin", num(suite.poincare.max_ratio)},
                   {"violations", suite.poincare.violations},
                   {"pass", suite.poincare.pass}};
  s["pass"] = suite.pass();
  if (config.monitors.assert_mode && !suite.pass()) {
    o.exit_code = kExitMonitor;
    o.message = "lemma suite reported violations";
  }
  return o;
}

Outcome run_selfconv_mode(const RunConfig& config) {
  Outcome o;
  const auto lim = self_convergence(config, config.stepping.dt_list, Solver::Limit);
  const auto eps = self_convergence(config, config.stepping.dt_list, Solver::Eps);
  CsvWriter csv({"solver", "dt_coarse", "dt_fine", "difference"});
  auto dump = [&](const char* name, const SelfConvergence& sc) {
    for (std::size_t i = 0; i < sc.differences.size(); ++i)
      csv.row(std::vector<std::string>{name, format_double(sc.dt[i]), format_double(sc.dt[i + 1]),
                                       format_double(sc.differences[i])});
  };
  dump("limit", lim);
  dump("eps", eps);
  o.files.emplace_back("selfconv.csv", csv.text());

  auto ok = [](const SelfConvergence& sc) {
    return sc.complete && !sc.degenerate && sc.order >= 0.7 && sc.order <= 1.3;
  };
  auto& s = o.summary;
  for (auto [name, sc] : {std::pair{"limit", &lim}, std::pair{"eps", &eps}})
    s[name] = {{"order", num(sc->order)},
               {"degenerate", sc->degenerate},
               {"complete", sc->complete},
               {"failure", sc->failure},
               {"pass", ok(*sc)}};
  s["pass"] = ok(lim) && ok(eps);
  if (!lim.complete || !eps.complete) {
    o.exit_code = kExitBlowup;
    o.message = lim.complete ? eps.failure : lim.failure;
  } else if (config.monitors.assert_mode && !(ok(lim) && ok(eps))) {
    o.exit_code = kExitMonitor;
    o.message = "observed order outside [0.7, 1.3]";
  }
  return o;
}

}  // namespace

ExecuteResult execute(const RunConfig& config, Mode mode, const std::filesystem::path& out_dir) {
  ExecuteResult result;
  if (auto issues = validate(config, mode); !issues.empty()) {
    result.exit_code = kExitConfig;
    result.message = ConfigError("configuration out of range", issues).what();
    return result;
  }

  Outcome o;
  switch (mode) {
    case Mode::Limit: o = run_limit_mode(config); break;
    case Mode::Eps: o = run_eps_mode(config); break;
    case Mode::Convergence: o = run_convergence_mode(config); break;
    case Mode::Lemmas: o = run_lemmas_mode(config); break;
    case Mode::SelfConvergence: o = run_selfconv_mode(config); break;
  }

  ordered_json summary = ordered_json::object();
  summary["mode"] = std::string(to_string(mode));
  summary["exit_code"] = o.exit_code;
  for (auto& [k, v] : o.summary.items()) summary[k] = v;
  result.summary = summary.dump(2) + "\n";
  result.exit_code = o.exit_code;
  result.message = o.message;

  ordered_json manifest = ordered_json::object();
  manifest["name"] = "hydrob";
  manifest["version"] = std::string(version());
  manifest["mode"] = std::string(to_string(mode));
  manifest["seed"] = config.params.seed;
  manifest["config"] = config_json(config);
  std::vector<std::string> names{"manifest.json"};
  for (const auto& f : o.files) names.push_back(f.first);
  names.push_back("summary.json");
  manifest["files"] = names;

  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& [name, text] : o.files) write_file(out_dir / name, text);
    write_file(out_dir / "summary.json", result.summary);
  } catch (const IoError& e) {
    result.exit_code = kExitIo;
    result.message = e.what();
  }
  return result;
}

}  // namespace hydrob
