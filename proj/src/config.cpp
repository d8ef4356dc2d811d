#include "lvp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lvp {

using nlohmann::json;

double oscillating_index(double v, double center, double amplitude, double frequency) {
  return center + amplitude * std::sin(frequency * std::sqrt(std::log1p(v)));
}

Density oscillating_index_density(double center, double amplitude, double frequency) {
  Density d;
  d.pi = [=](double u) {
    u = std::abs(u);
    if (u > 1.0) return 1.0 / (u * u);
    const double a = oscillating_index(std::log(1.0 / u), center, amplitude, frequency);
    return std::pow(u, -1.0 - a);
  };
  d.cutoff = 1e3;
  d.tail_mass = [](double v) { return 1.0 / v; };  // used beyond the cutoff only
  d.label = "oscillating_index";
  return d;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

JumpMeasure measure_from_json(const json& m) {
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "stable")
    return JumpMeasure(Stable{get_or(m, "alpha", 1.0), get_or(m, "scale", 1.0)});
  if (kind == "dyadic")
    return JumpMeasure(DyadicDiscrete{get_or(m, "theta", 1.0), get_or(m, "upsilon", 1.0)});
  if (kind == "atoms") {
    Atoms a;
    for (const auto& p : m.at("pairs")) a.pairs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return JumpMeasure(a);
  }
  if (kind == "cauchy_density") return JumpMeasure(cauchy_density());
  if (kind == "oscillating_index")
    return JumpMeasure(oscillating_index_density(get_or(m, "center", 1.0),
                                                 get_or(m, "amplitude", 0.4),
                                                 get_or(m, "frequency", 4.0)));
  throw ConfigError("unknown measure kind '" + kind + "'");
}

std::function<double(double)> position_from_json(const json& a) {
  const std::string kind = a.at("kind").get<std::string>();
  if (kind == "const") {
    const double v = a.at("value").get<double>();
    return [v](double) { return v; };
  }
  if (kind == "sin2") {
    const double offset = get_or(a, "offset", 0.0), amp = get_or(a, "amplitude", 1.0),
                 freq = get_or(a, "frequency", 1.0);
    return [=](double x) {
      const double s = std::sin(freq * x);
      return offset + amp * s * s;
    };
  }
  throw ConfigError("unknown position factor kind '" + kind + "'");
}

Weight jump_factor_from_json(const json& k) {
  const std::string kind = k.at("kind").get<std::string>();
  if (kind == "cap_power") return cap_power(k.at("eps").get<double>(), get_or(k, "amplitude", 1.0));
  throw ConfigError("unknown jump factor kind '" + kind + "'");
}

json sin2_term(double offset, double amplitude, double eps) {
  return json{{"a", {{"kind", "sin2"}, {"offset", offset}, {"amplitude", amplitude}, {"frequency", 1.0}}},
              {"k", {{"kind", "cap_power"}, {"eps", eps}, {"amplitude", 1.0}}}};
}

// 0.5 (1 ^ |u|^0.5) (1 + sin^2 x) / 2 as a(x) k(u).
json shared_perturbation() {
  return json{{"label", "half_root_sin2"},
              {"terms", json::array({sin2_term(0.25, 0.25, 0.5)})},
              {"envelope_c", 0.5},
              {"envelope_eps", 0.5}};
}

std::string freeze_name(Freeze f) { return f == Freeze::x ? "x" : "target"; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

JumpMeasure RunConfig::build_measure() const {
  try {
    JumpMeasure mu = measure_from_json(measure);
    mu.validate();
    return mu;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  }
}

PerturbationSpec RunConfig::build_perturbation() const {
  PerturbationSpec p;
  if (perturbation.is_null() || perturbation.empty()) return zero_perturbation();
  try {
    p.label = get_or<std::string>(perturbation, "label", "custom");
    p.envelope_c = perturbation.at("envelope_c").get<double>();
    p.envelope_eps = perturbation.at("envelope_eps").get<double>();
    for (const auto& term : perturbation.at("terms"))
      p.terms.push_back({position_from_json(term.at("a")), jump_factor_from_json(term.at("k")),
                         get_or<std::string>(term, "label", "")});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("perturbation: ") + e.what());
  }
  return p;
}

ModelSpec RunConfig::build_model() const {
  try {
    return make_model(build_measure(), build_perturbation(), domain, series, freeze);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json j;
  j["name"] = name;
  j["measure"] = measure;
  j["perturbation"] = perturbation;
  j["domain"] = {{"period", domain.period}, {"n", domain.n}};
  j["series"] = {{"delta", series.delta_hint}, {"tol", series.tol}, {"k_max", series.k_max}};
  j["freeze"] = freeze_name(freeze);
  j["t"] = t;
  j["stages"] = stages;
  j["out_dir"] = out_dir;
  j["exact"] = exact;
  j["kernel_stride"] = kernel_stride;
  j["seed"] = seed;
  j["n_paths"] = n_paths;
  j["example_bound"] = example_bound ? json(*example_bound == ExampleBound::stable ? "stable" : "dyadic")
                                     : json(nullptr);
  j["oscillatory"] = oscillatory;
  j["tolerances"] = {{"mass", tol.mass}, {"composed", tol.composed}, {"series", tol.series},
                     {"ks", tol.ks}, {"ks_euler", tol.ks_euler}};
  j["artifact_choices"] = artifact_choices;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
  try {
    c.name = get_or(j, "name", c.name);
    if (j.contains("measure")) c.measure = j.at("measure");
    if (j.contains("perturbation")) c.perturbation = j.at("perturbation");
    if (j.contains("domain")) {
      c.domain.period = get_or(j.at("domain"), "period", c.domain.period);
      c.domain.n = get_or(j.at("domain"), "n", c.domain.n);
    }
    if (j.contains("series")) {
      const auto& s = j.at("series");
      c.series.delta_hint = get_or(s, "delta", c.series.delta_hint);
      c.series.tol = get_or(s, "tol", c.series.tol);
      c.series.k_max = get_or(s, "k_max", c.series.k_max);
    }
    if (j.contains("freeze")) {
      const std::string f = j.at("freeze").get<std::string>();
      if (f != "x" && f != "target") throw ConfigError("freeze must be 'x' or 'target'");
      c.freeze = f == "x" ? Freeze::x : Freeze::target;
    }
    if (j.contains("t")) c.t = j.at("t").get<std::vector<double>>();
    if (j.contains("stages")) c.stages = j.at("stages").get<std::vector<std::string>>();
    c.out_dir = get_or(j, "out_dir", c.out_dir);
    c.exact = get_or(j, "exact", c.exact);
    c.kernel_stride = get_or(j, "kernel_stride", c.kernel_stride);
    c.seed = get_or(j, "seed", c.seed);
    c.n_paths = get_or(j, "n_paths", c.n_paths);
    if (j.contains("example_bound")) {
      const auto& e = j.at("example_bound");
      if (e.is_null()) c.example_bound.reset();
      else if (e == "stable") c.example_bound = ExampleBound::stable;
      else if (e == "dyadic") c.example_bound = ExampleBound::dyadic;
      else throw ConfigError("example_bound must be 'stable', 'dyadic' or null");
    }
    c.oscillatory = get_or(j, "oscillatory", c.oscillatory);
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.tol.mass = get_or(t, "mass", c.tol.mass);
      c.tol.composed = get_or(t, "composed", c.tol.composed);
      c.tol.series = get_or(t, "series", c.tol.series);
      c.tol.ks = get_or(t, "ks", c.tol.ks);
      c.tol.ks_euler = get_or(t, "ks_euler", c.tol.ks_euler);
    }
    if (j.contains("artifact_choices"))
      c.artifact_choices = j.at("artifact_choices").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.measure.is_null()) throw ConfigError("config: a measure is required");
  if (c.t.empty()) throw ConfigError("config: at least one time is required");
  for (double t : c.t)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("config: times must lie in (0, 1]");
  if (c.kernel_stride < 1) throw ConfigError("config: kernel_stride must be positive");
  for (const auto& s : c.stages)
    if (std::find(stage_chain().begin(), stage_chain().end(), s) == stage_chain().end())
      throw ConfigError("config: unknown stage '" + s + "'");
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

std::vector<std::string> RunConfig::resolved_stages() const {
  const auto& chain = stage_chain();
  size_t last = 0;
  for (const auto& s : stages)
    last = std::max(last, static_cast<size_t>(std::find(chain.begin(), chain.end(), s) - chain.begin()));
  return {chain.begin(), chain.begin() + static_cast<long>(last) + 1};
}

bool RunConfig::runs(const std::string& stage) const {
  const auto r = resolved_stages();
  return std::find(r.begin(), r.end(), stage) != r.end();
}

std::string RunConfig::kernel_hash() const {
  json j = to_json();
  for (const char* k : {"stages", "out_dir", "exact", "kernel_stride", "seed", "n_paths",
                        "tolerances", "name"})
    j.erase(k);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::vector<std::string> preset_names() { return {"exa1", "exa2", "exa3", "appendixB"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.domain = DomainSpec{6.0 * std::numbers::pi, 960};
  c.t = {0.25};
  c.artifact_choices = {
      "domain: circle of length 6 pi with 960 points (coefficients are pi-periodic)",
      "time list default {0.25}"};
  if (name == "exa1") {
    c.measure = {{"kind", "stable"}, {"alpha", 1.0}, {"scale", 1.0}};
    c.perturbation = shared_perturbation();
    c.example_bound = ExampleBound::stable;
  } else if (name == "exa2") {
    c.measure = {{"kind", "dyadic"}, {"theta", 1.2}, {"upsilon", 1.0},
                 {"constraint", "0 < theta < 2 upsilon"}};
    c.perturbation = shared_perturbation();
    c.example_bound = ExampleBound::dyadic;
    c.artifact_choices.push_back("theta = 1.2, upsilon = 1 (index 1.2); perturbation eps = 0.5 < 1.2");
  } else if (name == "exa3") {
    c.measure = {{"kind", "oscillating_index"}, {"center", 1.0}, {"amplitude", 0.4}, {"frequency", 4.0}};
    c.perturbation = shared_perturbation();
    c.oscillatory = true;
    c.artifact_choices.push_back(
        "density |u|^{-1-a(ln 1/|u|)} on |u| <= 1, u^{-2} beyond, a(v) = 1 + 0.4 sin(4 sqrt(ln(1+v)))");
    c.artifact_choices.push_back("perturbation shared with exa1 (eps = 0.5 below the lowest index 0.6)");
  } else if (name == "appendixB") {
    c.measure = {{"kind", "stable"}, {"alpha", 1.0}, {"scale", 1.0}};
    c.perturbation = json{{"label", "min_one_u2"},
                          {"terms", json::array({json{{"a", {{"kind", "const"}, {"value", 1.0}}},
                                                      {"k", {{"kind", "cap_power"}, {"eps", 2.0}, {"amplitude", 1.0}}}}})},
                          {"envelope_c", 1.0},
                          {"envelope_eps", 2.0}};
    c.artifact_choices.push_back("envelope c = 1, eps = 2 (m equals its envelope)");
  } else {
    throw ConfigError("unknown preset '" + name + "' (exa1, exa2, exa3, appendixB)");
  }
  return c;
}

}  // namespace lvp
