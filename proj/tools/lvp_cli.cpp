#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "lvp/io.hpp"
#include "lvp/pipeline.hpp"

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition densities of perturbed Levy-type generators"};
  std::string preset_name, config_path, t_list, stage_list, out_dir;
  std::optional<std::uint64_t> seed;
  bool exact = false;
  std::vector<std::string> tol_overrides;
  app.add_option("--preset", preset_name, "exa1, exa2, exa3 or appendixB");
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--t", t_list, "comma-separated times in (0, 1]");
  app.add_option("--stages", stage_list,
                 "comma-separated stages: exponent,kernel,parametrix,validate,simulate");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_flag("--exact", exact, "hex float encoding in CSV output");
  app.add_option("--tol", tol_overrides, "tolerance override key=value (mass, composed, series, ks, ks_euler)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(lvp::exit_config);
  }

  auto config_error = [&](const std::string& what) {
    std::cerr << nlohmann::json{{"error", "config"}, {"message", what}}.dump() << '\n';
    return static_cast<int>(lvp::exit_config);
  };

  try {
    if (preset_name.empty() == config_path.empty())
      return config_error("give exactly one of --preset or --config");
    nlohmann::json j = config_path.empty() ? lvp::preset(preset_name).to_json()
                                           : lvp::RunConfig::from_file(config_path).to_json();
    if (!t_list.empty()) {
      std::vector<double> ts;
      for (const auto& s : split(t_list)) ts.push_back(std::stod(s));
      j["t"] = ts;
    }
    if (!stage_list.empty()) j["stages"] = split(stage_list);
    if (!out_dir.empty()) j["out_dir"] = out_dir;
    if (seed) j["seed"] = *seed;
    if (exact) j["exact"] = true;
    for (const auto& kv : tol_overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) return config_error("tolerance override must be key=value");
      const std::string key = kv.substr(0, eq);
      if (key != "mass" && key != "composed" && key != "series" && key != "ks" && key != "ks_euler")
        return config_error("unknown tolerance '" + key + "'");
      j["tolerances"][key] = std::stod(kv.substr(eq + 1));
    }
    const lvp::RunConfig cfg = lvp::RunConfig::from_json(j);
    const lvp::RunResult res = lvp::run(cfg, std::cout);
    if (res.summary.contains("error")) std::cerr << res.summary["error"].dump() << '\n';
    return res.exit_code;
  } catch (const lvp::ConfigError& e) {
    return config_error(e.what());
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  }
}
