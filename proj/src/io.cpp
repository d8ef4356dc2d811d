#include "lvp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lvp::io {

using nlohmann::json;

std::string format_double(double v, bool exact) {
  char buf[64];
  if (exact) {
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
  }
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json grid_json(const UniformGrid& g) {
  return {{"start", g.start}, {"step", g.step}, {"size", g.size}};
}

}  // namespace

json to_json(const ValidationReport& r) {
  json j{{"check", r.check},
         {"verdict", verdict_name(r.verdict)},
         {"pass", r.pass()},
         {"t_nodes", r.t_nodes},
         {"grid_points", r.grid_points},
         {"residual", finite_or_null(r.residual)},
         {"tolerance", finite_or_null(r.tolerance)},
         {"note", r.note}};
  json c = json::object();
  for (const auto& [k, v] : r.constants) c[k] = finite_or_null(v);
  j["constants"] = c;
  j["witness"] = r.witness ? json::array({r.witness->first, r.witness->second}) : json(nullptr);
  return j;
}

json to_json(const SeriesDiagnostics& d) {
  return {{"t", d.t},
          {"norms", d.norms},
          {"sup_values", d.sup_values},
          {"ratios", d.ratios},
          {"truncation_index", d.truncation_index},
          {"truncation_bound", finite_or_null(d.truncation_bound)},
          {"converged", d.converged}};
}

json to_json(const A1Report& r) {
  return {{"pass", r.pass},
          {"beta_hat", r.beta_hat},
          {"alpha_hat", r.alpha_hat},
          {"top_decade_variation", r.top_decade_variation},
          {"witness_xi", r.witness_xi ? json(*r.witness_xi) : json(nullptr)},
          {"xi", r.xi},
          {"ratio", r.ratio}};
}

json to_json(const ScalingTable& s) {
  return {{"t", s.t_nodes}, {"rho", s.rho}, {"alpha", s.alpha}, {"beta_hat", s.beta_hat},
          {"sigma_hat", s.sigma_hat}};
}

json to_json(const PerturbationReport& r) {
  json j{{"pass", r.pass},
         {"symmetric", r.symmetric},
         {"enveloped", r.enveloped},
         {"divergent_regime", r.divergent_regime},
         {"intensity", finite_or_null(r.intensity)},
         {"regime", r.regime}};
  j["witness"] = r.witness ? json::array({r.witness->first, r.witness->second}) : json(nullptr);
  return j;
}

json to_json(const BlowupFit& f) {
  return {{"t", f.t}, {"norms", f.norms}, {"exponent", f.exponent}, {"eta_hat", f.eta_hat}};
}

json to_json(const DensityComparison& c) {
  return {{"ks_distance", c.ks_distance},
          {"l1_distance", c.l1_distance},
          {"ks_radius", c.ks_radius},
          {"samples", c.samples}};
}

json to_json(const P0BoundReport& r) {
  json j{{"pass", r.pass},
         {"t_nodes", r.t_nodes},
         {"decay", r.decay},
         {"amplitude", r.amplitude},
         {"amplitude_drift", r.amplitude_drift},
         {"d3", r.d3},
         {"d4", r.d4},
         {"d3_per_t", r.d3_per_t},
         {"d3_drift", r.d3_drift},
         {"failure", r.failure}};
  j["witness"] = r.witness ? json::array({r.witness->first, r.witness->second}) : json(nullptr);
  return j;
}

json describe(const KernelGrid& g) {
  return {{"t", g.t},
          {"x", grid_json(g.x)},
          {"y", grid_json(g.y)},
          {"provenance", provenance_name(g.provenance)},
          {"err_est", g.err_est},
          {"period", g.period},
          {"note", g.note},
          {"clamped", g.clamped},
          {"min_value", g.min_value},
          {"negative_flag", g.negative_flag}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_kernel_csv(const std::string& path, const KernelGrid& g, int stride, bool exact) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,x,y,value,err_est\n";
  const std::string t = format_double(g.t, exact), err = format_double(g.err_est, exact);
  for (int i = 0; i < g.x.size; i += stride)
    for (int j = 0; j < g.y.size; j += stride)
      out << t << ',' << format_double(g.x.at(i), exact) << ',' << format_double(g.y.at(j), exact)
          << ',' << format_double(g.values(i, j), exact) << ',' << err << '\n';
}

void write_samples_csv(const std::string& path, const std::vector<double>& samples, bool exact) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x\n";
  for (double v : samples) out << format_double(v, exact) << '\n';
}

void write_kernel_cache(const std::string& stem, const KernelGrid& g, const std::string& hash) {
  json meta = describe(g);
  meta["hash"] = hash;
  write_json(stem + ".json", meta);
  std::ofstream out(stem + ".bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + stem + ".bin");
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
}

std::optional<KernelGrid> read_kernel_cache(const std::string& stem, const std::string& hash) {
  std::ifstream meta_in(stem + ".json");
  if (!meta_in) return std::nullopt;
  json meta;
  try {
    meta_in >> meta;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (meta.value("hash", std::string()) != hash) return std::nullopt;
  KernelGrid g;
  g.t = meta.at("t").get<double>();
  auto grid = [](const json& j) {
    return UniformGrid{j.at("start").get<double>(), j.at("step").get<double>(), j.at("size").get<int>()};
  };
  g.x = grid(meta.at("x"));
  g.y = grid(meta.at("y"));
  g.period = meta.at("period").get<double>();
  g.err_est = meta.at("err_est").get<double>();
  g.note = meta.at("note").get<std::string>();
  g.clamped = meta.at("clamped").get<int>();
  g.min_value = meta.at("min_value").get<double>();
  g.negative_flag = meta.at("negative_flag").get<bool>();
  g.provenance = Provenance::p;
  g.values.resize(g.x.size, g.y.size);
  std::ifstream in(stem + ".bin", std::ios::binary);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!in) return std::nullopt;
  return g;
}

}  // namespace lvp::io
