#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ltf/error.hpp"

namespace ltf::tools {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  if (!obj.is_object()) throw InvalidSpec(path + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw InvalidSpec(path + "." + key + ": unknown field");
}

double get_number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw InvalidSpec(path + ": expected a number");
}

std::size_t get_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw InvalidSpec(path + ": expected a non-negative integer");
  const auto x = v.get<long long>();
  if (x < 0) throw InvalidSpec(path + ": expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw InvalidSpec(path + ": expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw InvalidSpec(path + ": expected true or false");
  return v.get<bool>();
}

std::vector<double> get_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw InvalidSpec(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

ExperimentConfig preset_config(const std::string& name, std::size_t n) {
  ExperimentConfig c;
  if (name == "example1") {
    c.spec = example1_spec(n);
  } else if (name == "example2") {
    c.spec = example2_spec(n);
  } else {
    throw InvalidSpec("preset: unknown preset '" + name + "' (expected example1 or example2)");
  }
  c.label = name;
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j, "config",
                 {"label", "preset", "spec", "noise", "replications", "criterion", "solver", "grid",
                  "base_seed", "tol_kink", "lasso", "workers"});
  ExperimentConfig c;
  if (j.contains("preset")) {
    const std::size_t n =
        j.contains("spec") && j["spec"].contains("n") ? get_count(j["spec"]["n"], "config.spec.n")
                                                      : 500;
    c = preset_config(get_string(j["preset"], "config.preset"), n);
  }
  if (j.contains("label")) c.label = get_string(j["label"], "config.label");
  if (j.contains("spec")) {
    const json& s = j["spec"];
    reject_unknown(s, "config.spec", {"n", "r", "b", "a1", "normalized_time"});
    if (s.contains("n")) c.spec.n = get_count(s["n"], "config.spec.n");
    if (s.contains("r")) c.spec.r = get_numbers(s["r"], "config.spec.r");
    if (s.contains("b")) c.spec.b = get_numbers(s["b"], "config.spec.b");
    if (s.contains("a1")) c.spec.a1 = get_number(s["a1"], "config.spec.a1");
    if (s.contains("normalized_time"))
      c.spec.normalized_time = get_bool(s["normalized_time"], "config.spec.normalized_time");
  }
  if (j.contains("noise")) {
    const json& s = j["noise"];
    reject_unknown(s, "config.noise", {"snr", "signed_mean"});
    if (s.contains("snr")) c.noise.snr = get_number(s["snr"], "config.noise.snr");
    if (s.contains("signed_mean"))
      c.noise.signed_mean = get_bool(s["signed_mean"], "config.noise.signed_mean");
  }
  if (j.contains("replications"))
    c.replications = get_count(j["replications"], "config.replications");
  try {
    if (j.contains("criterion"))
      c.criterion = parse_criterion(get_string(j["criterion"], "config.criterion"));
    if (j.contains("solver")) c.solver = parse_solver(get_string(j["solver"], "config.solver"));
  } catch (const InvalidSpec& e) {
    throw InvalidSpec(std::string("config: ") + e.what());
  }
  if (j.contains("grid")) {
    const json& s = j["grid"];
    reject_unknown(s, "config.grid", {"size", "min_rel"});
    if (s.contains("size")) c.grid_size = get_count(s["size"], "config.grid.size");
    if (s.contains("min_rel")) c.grid_min_rel = get_number(s["min_rel"], "config.grid.min_rel");
  }
  if (j.contains("base_seed")) c.base_seed = get_count(j["base_seed"], "config.base_seed");
  if (j.contains("tol_kink")) c.tol_kink = get_number(j["tol_kink"], "config.tol_kink");
  if (j.contains("lasso")) {
    const json& s = j["lasso"];
    reject_unknown(s, "config.lasso", {"polish", "tol", "max_iter"});
    if (s.contains("polish")) c.lasso_polish = get_bool(s["polish"], "config.lasso.polish");
    if (s.contains("tol")) c.lasso_tol = get_number(s["tol"], "config.lasso.tol");
    if (s.contains("max_iter")) c.lasso_max_iter = get_count(s["max_iter"], "config.lasso.max_iter");
  }
  if (j.contains("workers")) c.workers = get_count(j["workers"], "config.workers");
  try {
    c.validate();
  } catch (const InvalidSpec& e) {
    throw InvalidSpec(std::string("config.") + e.what());
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  return json{
      {"label", c.label},
      {"spec",
       {{"n", c.spec.n},
        {"r", c.spec.r},
        {"b", c.spec.b},
        {"a1", c.spec.a1},
        {"normalized_time", c.spec.normalized_time}}},
      {"noise", {{"snr", number_or_inf(c.noise.snr)}, {"signed_mean", c.noise.signed_mean}}},
      {"replications", c.replications},
      {"criterion", std::string(criterion_name(c.criterion))},
      {"solver", std::string(solver_name(c.solver))},
      {"grid", {{"size", c.grid_size}, {"min_rel", c.grid_min_rel}}},
      {"base_seed", c.base_seed},
      {"tol_kink", c.tol_kink},
      {"lasso", {{"polish", c.lasso_polish}, {"tol", c.lasso_tol}, {"max_iter", c.lasso_max_iter}}},
  };
}

}  // namespace ltf::tools
