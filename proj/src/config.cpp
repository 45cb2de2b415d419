#include "mfc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mfc/csv_io.hpp"
#include "mfc/error.hpp"

namespace mfc {

const std::map<std::string, std::vector<std::string>>& config_schema() {
  static const std::map<std::string, std::vector<std::string>> schema{
      {"", {"scenario", "seed"}},
      {"model",
       {"d", "sigma", "N", "m", "p", "k11", "k12", "k21", "k22", "initial", "initial_mean",
        "initial_var", "initial_lower", "initial_upper", "initial_point", "leaders",
        "leader_scheme"}},
      {"grid", {"T", "n_steps"}},
      {"control", {"features", "bins", "gain", "M_h", "h"}},
      {"cost", {"lagrangian", "psi"}},
      {"experiment",
       {"N_list", "N_ref", "seeds", "tol", "max_iter", "budget", "step0", "truncate",
        "truncation_cap", "validation_samples"}},
      {"io", {"output_dir"}},
  };
  return schema;
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::simulate: return "simulate";
    case Scenario::meanfield: return "meanfield";
    case Scenario::coupled: return "coupled";
    case Scenario::optimize: return "optimize";
    case Scenario::chaos: return "chaos";
    case Scenario::gamma: return "gamma";
    case Scenario::validate: return "validate";
  }
  return "?";
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) {
    // Commas are accepted as separators too.
    std::string part;
    for (char c : w) {
      if (c == ',') {
        if (!part.empty()) out.push_back(part);
        part.clear();
      } else {
        part += c;
      }
    }
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string nearest(const std::string& key, const std::vector<std::string>& options) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& o : options) {
    const std::size_t d = levenshtein(key, o);
    if (d < best_d) {
      best_d = d;
      best = o;
    }
  }
  return best;
}

struct Entry {
  std::string section, key, value;
  std::size_t line;
};

class Parser {
 public:
  explicit Parser(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const Entry& e, const std::string& msg) {
    errors_.push_back("line " + std::to_string(e.line) + ": " + msg);
  }

  bool number(const Entry& e, double& out) {
    const std::string v = trim(e.value);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
      error(e, e.key + " must be a finite number (got '" + v + "')");
      return false;
    }
    out = x;
    return true;
  }

  bool integer(const Entry& e, std::uint64_t& out) {
    const std::string v = trim(e.value);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      error(e, e.key + " must be a non-negative integer (got '" + v + "')");
      return false;
    }
    out = x;
    return true;
  }

  bool numbers(const Entry& e, std::vector<double>& out) {
    std::vector<double> vals;
    for (const auto& w : split_words(e.value)) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
      if (ec != std::errc() || ptr != w.data() + w.size() || !std::isfinite(x)) {
        error(e, e.key + " must be a list of finite numbers (bad entry '" + w + "')");
        return false;
      }
      vals.push_back(x);
    }
    out = std::move(vals);
    return true;
  }

  bool integers(const Entry& e, std::vector<std::uint64_t>& out) {
    std::vector<std::uint64_t> vals;
    for (const auto& w : split_words(e.value)) {
      std::uint64_t x = 0;
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
      if (ec != std::errc() || ptr != w.data() + w.size()) {
        error(e, e.key + " must be a list of non-negative integers (bad entry '" + w + "')");
        return false;
      }
      vals.push_back(x);
    }
    out = std::move(vals);
    return true;
  }

  bool boolean(const Entry& e, bool& out) {
    const std::string v = trim(e.value);
    if (v == "true" || v == "1" || v == "yes") {
      out = true;
      return true;
    }
    if (v == "false" || v == "0" || v == "no") {
      out = false;
      return true;
    }
    error(e, e.key + " must be true or false (got '" + v + "')");
    return false;
  }

 private:
  std::vector<std::string>& errors_;
};

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, double fallback) {
  if (v.empty()) return std::vector<double>(n, fallback);
  if (v.size() == 1) return std::vector<double>(n, v[0]);
  return v;
}

}  // namespace

ParseResult parse_config_text(const std::string& text) {
  ParseResult res;
  auto& errors = res.errors;
  RunConfig& c = res.config;
  try {
    const auto& schema = config_schema();
    std::vector<std::string> section_names;
    for (const auto& [s, keys] : schema)
      if (!s.empty()) section_names.push_back(s);

    // Pass 1: tokenize.
    std::vector<Entry> entries;
    std::set<std::string> seen;
    std::string section;
    bool section_ok = true;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = raw;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
          section_ok = false;
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        section_ok = schema.count(section) && !section.empty();
        if (!section_ok)
          errors.push_back("line " + std::to_string(lineno) + ": unknown section [" + section +
                           "] (did you mean [" + nearest(section, section_names) + "]?)");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
      if (!section_ok) continue;
      const auto& keys = schema.at(section);
      if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
        // Suggest across all sections so misplaced keys are easy to fix.
        std::string where = section.empty() ? "top level" : "[" + section + "]";
        errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + e.key + "' in " +
                         where + " (did you mean '" + nearest(e.key, keys) + "'?)");
        continue;
      }
      const std::string full = section.empty() ? e.key : section + "." + e.key;
      if (!seen.insert(full).second) {
        errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
        continue;
      }
      entries.push_back(std::move(e));
    }

    // Pass 2: typed values.
    Parser P(errors);
    auto count = [&](const Entry& e, std::size_t& out, std::uint64_t lo, const char* range) {
      std::uint64_t x = 0;
      if (!P.integer(e, x)) return;
      if (x < lo) {
        P.error(e, e.key + " must be " + range + " (got " + std::to_string(x) + ")");
        return;
      }
      out = static_cast<std::size_t>(x);
    };
    auto positive = [&](const Entry& e, double& out) {
      double x = 0.0;
      if (!P.number(e, x)) return;
      if (!(x > 0.0)) {
        P.error(e, e.key + " must be > 0 (got " + trim(e.value) + ")");
        return;
      }
      out = x;
    };
    auto kernel = [&](const Entry& e, KernelChoice& out) {
      const auto words = split_words(e.value);
      if (words.empty()) {
        P.error(e, e.key + " needs a kernel name");
        return;
      }
      const auto names = kernel_names();
      if (std::find(names.begin(), names.end(), words[0]) == names.end()) {
        P.error(e, "unknown kernel '" + words[0] + "' (did you mean '" + nearest(words[0], names) +
                       "'?)");
        return;
      }
      KernelChoice k{words[0], {}};
      Entry rest = e;
      rest.value.clear();
      for (std::size_t i = 1; i < words.size(); ++i) rest.value += words[i] + " ";
      if (!P.numbers(rest, k.params)) return;
      out = std::move(k);
    };
    auto word_list = [&](const Entry& e, std::string& name, std::vector<double>& params,
                         const std::vector<std::string>& allowed) {
      const auto words = split_words(e.value);
      if (words.empty() || std::find(allowed.begin(), allowed.end(), words[0]) == allowed.end()) {
        const std::string got = words.empty() ? "" : words[0];
        P.error(e, e.key + " must be one of: " +
                       [&] {
                         std::string s;
                         for (const auto& a : allowed) s += (s.empty() ? "" : ", ") + a;
                         return s;
                       }() +
                       " (got '" + got + "')");
        return;
      }
      Entry rest = e;
      rest.value.clear();
      for (std::size_t i = 1; i < words.size(); ++i) rest.value += words[i] + " ";
      std::vector<double> vals;
      if (!P.numbers(rest, vals)) return;
      name = words[0];
      params = std::move(vals);
    };

    for (const Entry& e : entries) {
      const std::string& k = e.key;
      if (e.section.empty()) {
        if (k == "scenario") {
          static const std::map<std::string, Scenario> names{
              {"simulate", Scenario::simulate}, {"meanfield", Scenario::meanfield},
              {"coupled", Scenario::coupled},   {"optimize", Scenario::optimize},
              {"chaos", Scenario::chaos},       {"gamma", Scenario::gamma},
              {"validate", Scenario::validate}};
          const auto it = names.find(e.value);
          if (it == names.end()) {
            std::vector<std::string> opts;
            for (const auto& [n, s] : names) opts.push_back(n);
            P.error(e, "unknown scenario '" + e.value + "' (did you mean '" +
                           nearest(e.value, opts) + "'?)");
          } else {
            c.scenario = it->second;
          }
        } else if (k == "seed") {
          std::uint64_t x = 0;
          if (P.integer(e, x)) c.seed = x;
        }
      } else if (e.section == "model") {
        if (k == "d") count(e, c.d, 1, ">= 1");
        else if (k == "N") count(e, c.N, 1, ">= 1");
        else if (k == "m") count(e, c.m, 0, ">= 0");
        else if (k == "sigma") {
          double x = 0.0;
          if (P.number(e, x)) {
            if (x < 0.0) P.error(e, "sigma must be >= 0 (got " + e.value + ")");
            else c.sigma = x;
          }
        } else if (k == "p") {
          double x = 0.0;
          if (P.number(e, x)) {
            if (x < 1.0) P.error(e, "p must be >= 1 (got " + e.value + ")");
            else c.p = x;
          }
        } else if (k == "k11") kernel(e, c.k11);
        else if (k == "k12") kernel(e, c.k12);
        else if (k == "k21") kernel(e, c.k21);
        else if (k == "k22") kernel(e, c.k22);
        else if (k == "initial") {
          if (e.value == "gaussian" || e.value == "uniform" || e.value == "point")
            c.initial = e.value;
          else
            P.error(e, "initial must be one of: gaussian, uniform, point (got '" + e.value + "')");
        } else if (k == "initial_mean") P.numbers(e, c.initial_mean);
        else if (k == "initial_var") {
          std::vector<double> v;
          if (P.numbers(e, v)) {
            if (std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; }))
              P.error(e, "initial_var entries must be >= 0");
            else c.initial_var = v;
          }
        } else if (k == "initial_lower") P.numbers(e, c.initial_lower);
        else if (k == "initial_upper") P.numbers(e, c.initial_upper);
        else if (k == "initial_point") P.numbers(e, c.initial_point);
        else if (k == "leaders") P.numbers(e, c.leaders);
        else if (k == "leader_scheme") {
          if (e.value == "euler") c.leader_scheme = LeaderScheme::euler;
          else if (e.value == "heun") c.leader_scheme = LeaderScheme::heun;
          else P.error(e, "leader_scheme must be euler or heun (got '" + e.value + "')");
        }
      } else if (e.section == "grid") {
        if (k == "T") positive(e, c.T);
        else if (k == "n_steps") count(e, c.n_steps, 1, ">= 1");
      } else if (e.section == "control") {
        if (k == "features") {
          if (e.value == "constant" || e.value == "standard") c.control_features = e.value;
          else P.error(e, "features must be constant or standard (got '" + e.value + "')");
        } else if (k == "bins") count(e, c.bins, 1, ">= 1");
        else if (k == "gain") positive(e, c.gain);
        else if (k == "M_h") {
          if (e.value == "inf") c.M_h = kUnbounded;
          else positive(e, c.M_h);
        } else if (k == "h") P.numbers(e, c.h);
      } else if (e.section == "cost") {
        if (k == "lagrangian")
          word_list(e, c.lagrangian, c.lagrangian_params,
                    {"zero", "constant", "mean_tracking", "leader_tracking"});
        else if (k == "psi")
          word_list(e, c.psi, c.psi_params, {"zero", "quadratic"});
      } else if (e.section == "experiment") {
        if (k == "N_list") {
          std::vector<std::uint64_t> v;
          if (P.integers(e, v)) {
            if (v.empty() || std::any_of(v.begin(), v.end(), [](auto x) { return x == 0; }))
              P.error(e, "N_list must hold integers >= 1");
            else c.N_list.assign(v.begin(), v.end());
          }
        } else if (k == "N_ref") count(e, c.N_ref, 1, ">= 1");
        else if (k == "seeds") {
          std::vector<std::uint64_t> v;
          if (P.integers(e, v)) {
            if (v.empty()) P.error(e, "seeds must not be empty");
            else c.seeds = v;
          }
        } else if (k == "tol") positive(e, c.tol);
        else if (k == "max_iter") count(e, c.max_iter, 0, ">= 0");
        else if (k == "budget") count(e, c.budget, 1, ">= 1");
        else if (k == "step0") positive(e, c.step0);
        else if (k == "truncate") P.boolean(e, c.truncate);
        else if (k == "truncation_cap") positive(e, c.truncation_cap);
        else if (k == "validation_samples") count(e, c.validation_samples, 1, ">= 1");
      } else if (e.section == "io") {
        if (k == "output_dir") {
          if (e.value.empty()) P.error(e, "output_dir must not be empty");
          else c.output_dir = e.value;
        }
      }
    }

    // Pass 3: cross-field checks.
    const std::size_t n2 = 2 * c.d;
    auto check_len = [&](const std::vector<double>& v, std::size_t n, const std::string& what) {
      if (!v.empty() && v.size() != 1 && v.size() != n)
        errors.push_back(what + " needs " + std::to_string(n) + " entries (or one to broadcast), got " +
                         std::to_string(v.size()));
    };
    check_len(c.initial_mean, n2, "model.initial_mean");
    check_len(c.initial_var, n2, "model.initial_var");
    check_len(c.initial_lower, n2, "model.initial_lower");
    check_len(c.initial_upper, n2, "model.initial_upper");
    check_len(c.initial_point, n2, "model.initial_point");
    check_len(c.leaders, c.m * c.d, "model.leaders");
    if (c.initial == "uniform") {
      const auto lo = broadcast(c.initial_lower, n2, -1.0), hi = broadcast(c.initial_upper, n2, 1.0);
      if (lo.size() == n2 && hi.size() == n2)
        for (std::size_t j = 0; j < n2; ++j)
          if (lo[j] > hi[j]) {
            errors.push_back("model.initial_lower must not exceed model.initial_upper");
            break;
          }
    }
    for (const auto* kc : {&c.k11, &c.k12, &c.k21, &c.k22}) {
      try {
        (void)make_kernel(kc->name, kc->params, c.d);
      } catch (const std::exception& ex) {
        errors.push_back(std::string("model: ") + ex.what());
      }
    }
    for (const auto* kc : {&c.k21, &c.k22})
      if (kc->name == "alignment" || kc->name == "bounded_alignment")
        errors.push_back("model: k21 and k22 must be position-only kernels (got '" + kc->name + "')");
    const std::size_t ell = c.control_features == "standard" ? 2 * c.d + 2 : 1;
    if (!c.h.empty() && c.h.size() != c.bins * c.m * c.d * ell)
      errors.push_back("control.h needs bins*m*d*features = " +
                       std::to_string(c.bins * c.m * c.d * ell) + " entries, got " +
                       std::to_string(c.h.size()));
    auto need = [&](const std::string& name, const std::vector<double>& params, std::size_t n,
                    const std::string& what) {
      if (params.size() != n)
        errors.push_back("cost." + what + " '" + name + "' takes " + std::to_string(n) +
                         " parameter(s), got " + std::to_string(params.size()));
    };
    if (c.lagrangian == "zero") need(c.lagrangian, c.lagrangian_params, 0, "lagrangian");
    if (c.lagrangian == "constant") need(c.lagrangian, c.lagrangian_params, 1, "lagrangian");
    if (c.lagrangian == "mean_tracking" || c.lagrangian == "leader_tracking")
      need(c.lagrangian, c.lagrangian_params, c.d, "lagrangian");
    if (c.psi == "zero") need(c.psi, c.psi_params, 0, "psi");
    if (c.psi == "quadratic") {
      need(c.psi, c.psi_params, 1, "psi");
      if (c.psi_params.size() == 1 && c.psi_params[0] < 0.0)
        errors.push_back("cost.psi quadratic weight must be >= 0");
    }
    if (c.scenario == Scenario::chaos || c.scenario == Scenario::gamma) {
      const std::size_t mx = *std::max_element(c.N_list.begin(), c.N_list.end());
      if (c.N_ref < mx) errors.push_back("experiment.N_ref must be >= max(N_list)");
    }
    if (c.scenario == Scenario::chaos && c.N_list.size() > 0 &&
        *std::max_element(c.N_list.begin(), c.N_list.end()) > kDefaultExactCap)
      errors.push_back("experiment.N_list entries must not exceed " +
                       std::to_string(kDefaultExactCap));

    // Resolved view for manifests.
    auto& r = c.resolved;
    auto join = [](const auto& v) {
      std::string s;
      for (const auto& x : v) {
        if (!s.empty()) s += ' ';
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>) s += format_double(x);
        else s += std::to_string(x);
      }
      return s;
    };
    auto kstr = [&](const KernelChoice& k) { return k.params.empty() ? k.name : k.name + " " + join(k.params); };
    r["scenario"] = scenario_name(c.scenario);
    r["seed"] = std::to_string(c.seed);
    r["model.d"] = std::to_string(c.d);
    r["model.sigma"] = format_double(c.sigma);
    r["model.N"] = std::to_string(c.N);
    r["model.m"] = std::to_string(c.m);
    r["model.p"] = format_double(c.p);
    r["model.k11"] = kstr(c.k11);
    r["model.k12"] = kstr(c.k12);
    r["model.k21"] = kstr(c.k21);
    r["model.k22"] = kstr(c.k22);
    r["model.initial"] = c.initial;
    r["model.initial_mean"] = join(c.initial_mean);
    r["model.initial_var"] = join(c.initial_var);
    r["model.initial_lower"] = join(c.initial_lower);
    r["model.initial_upper"] = join(c.initial_upper);
    r["model.initial_point"] = join(c.initial_point);
    r["model.leaders"] = join(c.leaders);
    r["model.leader_scheme"] = c.leader_scheme == LeaderScheme::euler ? "euler" : "heun";
    r["grid.T"] = format_double(c.T);
    r["grid.n_steps"] = std::to_string(c.n_steps);
    r["control.features"] = c.control_features;
    r["control.bins"] = std::to_string(c.bins);
    r["control.gain"] = format_double(c.gain);
    r["control.M_h"] = c.M_h < kUnbounded ? format_double(c.M_h) : "inf";
    r["control.h"] = join(c.h);
    r["cost.lagrangian"] = c.lagrangian + (c.lagrangian_params.empty() ? "" : " " + join(c.lagrangian_params));
    r["cost.psi"] = c.psi + (c.psi_params.empty() ? "" : " " + join(c.psi_params));
    r["experiment.N_list"] = join(c.N_list);
    r["experiment.N_ref"] = std::to_string(c.N_ref);
    r["experiment.seeds"] = join(c.seeds);
    r["experiment.tol"] = format_double(c.tol);
    r["experiment.max_iter"] = std::to_string(c.max_iter);
    r["experiment.budget"] = std::to_string(c.budget);
    r["experiment.step0"] = format_double(c.step0);
    r["experiment.truncate"] = c.truncate ? "true" : "false";
    r["experiment.truncation_cap"] = format_double(c.truncation_cap);
    r["experiment.validation_samples"] = std::to_string(c.validation_samples);
    r["io.output_dir"] = c.output_dir.string();
  } catch (const std::exception& ex) {
    errors.push_back(std::string("internal error while parsing: ") + ex.what());
  }
  return res;
}

ParseResult parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult res;
    res.errors.push_back("cannot read config file '" + path.string() + "'");
    return res;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

LeaderFollowerModel RunConfig::model() const {
  LeaderFollowerModel mdl;
  mdl.d = d;
  mdl.sigma = sigma;
  mdl.p = p;
  mdl.scheme = leader_scheme;
  mdl.kernels.k11 = make_kernel(k11.name, k11.params, d);
  mdl.kernels.k12 = make_kernel(k12.name, k12.params, d);
  mdl.kernels.k21 = make_kernel(k21.name, k21.params, d);
  mdl.kernels.k22 = make_kernel(k22.name, k22.params, d);
  const std::size_t n2 = 2 * d;
  if (initial == "gaussian")
    mdl.law = InitialLaw::gaussian(d, broadcast(initial_mean, n2, 0.0), broadcast(initial_var, n2, 1.0));
  else if (initial == "uniform")
    mdl.law = InitialLaw::uniform(d, broadcast(initial_lower, n2, -1.0), broadcast(initial_upper, n2, 1.0));
  else
    mdl.law = InitialLaw::point(d, broadcast(initial_point, n2, 0.0));
  if (m == 0) mdl.Y0 = LeaderState(0, d);
  else mdl.Y0 = LeaderState(d, broadcast(leaders, m * d, 0.0), {});
  return mdl;
}

ControlSpec RunConfig::control() const {
  const FeatureMap g =
      control_features == "standard" ? FeatureMap::standard(d, gain) : FeatureMap::constant_only(gain);
  ControlSpec u = ControlSpec::sv(m, d, T, bins, g, M_h);
  if (!h.empty()) u = u.with_parameters(h);
  return u;
}

CostSpec RunConfig::cost() const {
  CostSpec::Lagrangian L;
  if (lagrangian == "constant") L = costs::constant_lagrangian(lagrangian_params.at(0));
  else if (lagrangian == "mean_tracking") L = costs::mean_tracking(lagrangian_params);
  else if (lagrangian == "leader_tracking") L = costs::leader_tracking(lagrangian_params);
  else L = costs::zero_lagrangian();
  CostSpec::Psi P = psi == "quadratic" ? costs::quadratic_psi(psi_params.at(0)) : costs::zero_psi();
  return costs::make(lagrangian + "+" + psi, std::move(L), std::move(P));
}

SimConfig RunConfig::sim() const {
  SimConfig s;
  s.T = T;
  s.n_steps = n_steps;
  s.N = N;
  s.sigma = sigma;
  s.seed = seed;
  s.d = d;
  return s;
}

}  // namespace mfc
