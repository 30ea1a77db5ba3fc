#include "ewm/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ewm/error.hpp"

namespace ewm {

using nlohmann::json;

namespace {

json defaults() {
  const RunConfig c;
  return json{
      {"surface", {{"kind", c.surface.kind}, {"epsilon", c.surface.epsilon}, {"table", c.surface.table}, {"R", c.surface.R}}},
      {"target", {{"kind", c.target.kind}}},
      {"l", c.l},
      {"omega", c.omega},
      {"grid", {{"N", c.grid.N}}},
      {"solver",
       {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"multistart", c.solver.multistart}, {"seed", c.solver.seed}}},
      {"evolve",
       {{"T", c.evolve.T},
        {"cfl", c.evolve.cfl},
        {"record_every", c.evolve.record_every},
        {"delta", c.evolve.delta},
        {"shape", c.evolve.shape},
        {"constraint_limit", c.evolve.constraint_limit}}},
      {"stability",
       {{"delta", c.stability.delta}, {"epsilon", c.stability.epsilon}, {"seed", c.stability.seed}, {"shape", c.stability.shape}}},
      {"diagnostics", {{"delta_hoelder", c.diagnostics.delta_hoelder}}},
      {"geometry", {{"samples", c.geometry.samples}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  fail(ErrorCode::config, path + ": " + msg);
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    // Integers may not be given as fractions.
    if (a.is_number_integer() || a.is_number_unsigned()) return b.is_number_integer() || b.is_number_unsigned();
    return true;
  }
  return a.type() == b.type();
}

void merge(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) config_error(path.empty() ? "/" : path, "expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string p = path + "/" + it.key();
    if (!base.contains(it.key())) config_error(p, "unknown key '" + it.key() + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), p);
    } else {
      if (!same_kind(slot, it.value())) config_error(p, "expected " + std::string(slot.type_name()) + ", got " +
                                                            std::string(it.value().type_name()));
      if (slot.is_number_unsigned() && it.value().is_number_integer() && it.value().get<long long>() < 0)
        config_error(p, "must be non-negative");
      slot = it.value();
    }
  }
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) config_error(spec, "override must look like key.path=value");
  const std::string key = spec.substr(0, eq), raw = spec.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  std::stringstream ss(key);
  std::string part, last;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) config_error(key, "override path crosses a scalar");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) config_error(key, "override path crosses a scalar");
  (*node)[parts.back()] = value;
}

template <class T>
T field(const json& doc, const char* section, const char* key) {
  return section ? doc.at(section).at(key).get<T>() : doc.at(key).get<T>();
}

void check(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) config_error(path, msg);
}

}  // namespace

std::string RunConfig::canonical_json() const {
  json j = defaults();
  j["surface"] = {{"kind", surface.kind}, {"epsilon", surface.epsilon}, {"table", surface.table}, {"R", surface.R}};
  j["target"] = {{"kind", target.kind}};
  j["l"] = l;
  j["omega"] = omega;
  j["grid"] = {{"N", grid.N}};
  j["solver"] = {{"tol", solver.tol}, {"max_iter", solver.max_iter}, {"multistart", solver.multistart}, {"seed", solver.seed}};
  j["evolve"] = {{"T", evolve.T},         {"cfl", evolve.cfl},     {"record_every", evolve.record_every},
                 {"delta", evolve.delta}, {"shape", evolve.shape}, {"constraint_limit", evolve.constraint_limit}};
  j["stability"] = {
      {"delta", stability.delta}, {"epsilon", stability.epsilon}, {"seed", stability.seed}, {"shape", stability.shape}};
  j["diagnostics"] = {{"delta_hoelder", diagnostics.delta_hoelder}};
  j["geometry"] = {{"samples", geometry.samples}};
  j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
  return j.dump();
}

std::string RunConfig::hash() const {
  json j = json::parse(canonical_json());
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool RunConfig::wants(const std::string& format) const {
  for (const auto& f : output.formats)
    if (f == format) return true;
  return false;
}

SurfaceProfile RunConfig::make_surface() const {
  if (surface.kind == "round") return SurfaceProfile::round();
  if (surface.kind == "bumpy") return SurfaceProfile::bumpy(surface.epsilon);
  if (surface.kind == "flat") return SurfaceProfile::flat(surface.R);
  return SurfaceProfile::from_csv(surface.table);
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides, const std::string& base_dir) {
  json user = json::parse(text, nullptr, false, true);
  if (user.is_discarded()) config_error("/", "not a valid JSON document");
  if (user.is_null()) user = json::object();
  for (const auto& o : overrides) apply_override(user, o);
  json doc = defaults();
  merge(doc, user, "");

  RunConfig c;
  c.surface.kind = field<std::string>(doc, "surface", "kind");
  c.surface.epsilon = field<double>(doc, "surface", "epsilon");
  c.surface.table = field<std::string>(doc, "surface", "table");
  c.surface.R = field<double>(doc, "surface", "R");
  c.target.kind = field<std::string>(doc, "target", "kind");
  c.l = field<int>(doc, nullptr, "l");
  c.omega = field<double>(doc, nullptr, "omega");
  c.grid.N = field<int>(doc, "grid", "N");
  c.solver.tol = field<double>(doc, "solver", "tol");
  c.solver.max_iter = field<int>(doc, "solver", "max_iter");
  c.solver.multistart = field<bool>(doc, "solver", "multistart");
  c.solver.seed = field<std::uint64_t>(doc, "solver", "seed");
  c.evolve.T = field<double>(doc, "evolve", "T");
  c.evolve.cfl = field<double>(doc, "evolve", "cfl");
  c.evolve.record_every = field<int>(doc, "evolve", "record_every");
  c.evolve.delta = field<double>(doc, "evolve", "delta");
  c.evolve.shape = field<int>(doc, "evolve", "shape");
  c.evolve.constraint_limit = field<double>(doc, "evolve", "constraint_limit");
  c.stability.delta = field<double>(doc, "stability", "delta");
  c.stability.epsilon = field<double>(doc, "stability", "epsilon");
  c.stability.seed = field<std::uint64_t>(doc, "stability", "seed");
  c.stability.shape = field<int>(doc, "stability", "shape");
  c.diagnostics.delta_hoelder = field<double>(doc, "diagnostics", "delta_hoelder");
  c.geometry.samples = field<int>(doc, "geometry", "samples");
  c.output.directory = field<std::string>(doc, "output", "directory");
  c.output.formats = field<std::vector<std::string>>(doc, "output", "formats");

  const auto& k = c.surface.kind;
  check(k == "round" || k == "bumpy" || k == "flat" || k == "tabulated", "/surface/kind",
        "must be round, bumpy, flat or tabulated");
  check(c.surface.epsilon > -1.0 / 3.0, "/surface/epsilon", "must exceed -1/3");
  check(c.surface.R > 0.0, "/surface/R", "must be positive");
  if (k == "tabulated") {
    check(!c.surface.table.empty(), "/surface/table", "required for a tabulated surface");
    std::filesystem::path p(c.surface.table);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    check(std::filesystem::is_regular_file(p), "/surface/table", "file not found: " + p.string());
    c.surface.table = p.string();
  }
  check(c.target.kind == "round", "/target/kind", "only the round target is available");
  check(c.l >= 0, "/l", "must be non-negative");
  check(c.grid.N >= 16, "/grid/N", "must be >= 16");
  check(c.solver.tol > 0.0, "/solver/tol", "must be positive");
  check(c.solver.max_iter >= 1, "/solver/max_iter", "must be >= 1");
  check(c.evolve.T > 0.0, "/evolve/T", "must be positive");
  check(c.evolve.cfl > 0.0 && c.evolve.cfl < 1.0, "/evolve/cfl",
        "cfl = " + std::to_string(c.evolve.cfl) + " refused; it must lie in (0, 1)");
  check(c.evolve.record_every >= 1, "/evolve/record_every", "must be >= 1");
  check(c.evolve.delta >= 0.0, "/evolve/delta", "must be >= 0");
  check(c.evolve.shape == 0 || c.evolve.shape == 1, "/evolve/shape", "must be 0 or 1");
  check(c.evolve.constraint_limit > 0.0, "/evolve/constraint_limit", "must be positive");
  check(c.stability.delta >= 0.0, "/stability/delta", "must be >= 0");
  check(c.stability.epsilon > 0.0, "/stability/epsilon", "must be positive");
  check(c.stability.shape == 0 || c.stability.shape == 1, "/stability/shape", "must be 0 or 1");
  check(c.diagnostics.delta_hoelder > 0.0 && c.diagnostics.delta_hoelder < 0.5, "/diagnostics/delta_hoelder",
        "must lie in (0, 1/2)");
  check(c.geometry.samples >= 1, "/geometry/samples", "must be >= 1");
  check(!c.output.directory.empty(), "/output/directory", "must not be empty");
  for (const auto& f : c.output.formats) check(f == "csv" || f == "json", "/output/formats", "unknown format '" + f + "'");
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, std::filesystem::path(path).parent_path().string());
}

}  // namespace ewm
