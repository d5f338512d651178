#include "spec.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "limabean/errors.hpp"

namespace limabean::cli {

namespace {

using nlohmann::json;

const char* const kCommands[] = {
    "sample-esd", "density-grid", "domain",   "compare",
    "wz-convergence", "sigma-min", "k2-oracle", "limabean",
};

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      throw SpecError(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

double get_number(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key))
    throw SpecError(std::string(where) + " is missing required key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw SpecError(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const char* where, const char* key,
                     double fallback) {
  return obj.contains(key) ? get_number(obj, where, key) : fallback;
}

int get_int(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key))
    throw SpecError(std::string(where) + " is missing required key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw SpecError(std::string(where) + "." + key + " must be an integer");
  return v.get<int>();
}

int get_int_or(const json& obj, const char* where, const char* key, int fallback) {
  return obj.contains(key) ? get_int(obj, where, key) : fallback;
}

std::string get_string(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key))
    throw SpecError(std::string(where) + " is missing required key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_string())
    throw SpecError(std::string(where) + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_list(const json& obj, const char* where,
                                    const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    throw SpecError(std::string(where) + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const json& v : obj.at(key)) {
    if (!v.is_number())
      throw SpecError(std::string(where) + "." + key + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_int_list(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    throw SpecError(std::string(where) + "." + key + " must be an array of integers");
  std::vector<int> out;
  for (const json& v : obj.at(key)) {
    if (!v.is_number_integer())
      throw SpecError(std::string(where) + "." + key + " must contain only integers");
    out.push_back(v.get<int>());
  }
  return out;
}

StepLaw parse_step_law(const json& obj) {
  check_keys(obj, "walk.step_law", {"kind", "atoms"});
  const std::string kind = get_string(obj, "walk.step_law", "kind");
  if (kind == "haar-unitary") return StepLaw::haar();
  if (kind == "circular") return StepLaw::circular();
  if (kind == "atomic-singular") {
    if (!obj.contains("atoms"))
      throw SpecError("walk.step_law of kind atomic-singular needs an atoms array");
    SingularLaw law;
    for (const json& a : obj.at("atoms")) {
      check_keys(a, "walk.step_law.atoms[]", {"value", "weight"});
      law.atoms.push_back({get_number(a, "step atom", "value"),
                           get_number(a, "step atom", "weight")});
    }
    return StepLaw::atomic(std::move(law));
  }
  throw SpecError("walk.step_law.kind must be one of haar-unitary, circular, "
                  "atomic-singular (got '" + kind + "')");
}

InitialLaw parse_initial_law(const json& obj) {
  check_keys(obj, "walk.initial_law", {"atoms"});
  if (!obj.contains("atoms"))
    throw SpecError("walk.initial_law needs an atoms array");
  InitialLaw law;
  for (const json& a : obj.at("atoms")) {
    check_keys(a, "walk.initial_law.atoms[]", {"angle", "weight"});
    law.atoms.push_back({get_number(a, "initial atom", "angle"),
                         get_number(a, "initial atom", "weight")});
  }
  return law;
}

void parse_walk(const json& obj, ExperimentSpec& spec) {
  check_keys(obj, "walk",
             {"n", "k", "t", "step_law", "initial_law", "seed", "trials"});
  WalkConfig cfg;
  cfg.n = get_int(obj, "walk", "n");
  if (!obj.contains("k")) throw SpecError("walk is missing required key 'k'");
  const json& k = obj.at("k");
  if (k.is_string()) {
    if (k.get<std::string>() != "infinity")
      throw SpecError("walk.k must be a positive integer or the string \"infinity\"");
    spec.k_infinite = true;
    cfg.k = 1;  // placeholder so the config still validates
  } else if (k.is_number_integer()) {
    cfg.k = k.get<int>();
  } else {
    throw SpecError("walk.k must be a positive integer or the string \"infinity\"");
  }
  cfg.t = get_number(obj, "walk", "t");
  if (!obj.contains("step_law") || !obj.at("step_law").is_object())
    throw SpecError("walk.step_law object is required");
  cfg.step_law = parse_step_law(obj.at("step_law"));
  if (obj.contains("initial_law")) {
    if (!obj.at("initial_law").is_object())
      throw SpecError("walk.initial_law must be an object");
    cfg.initial_law = parse_initial_law(obj.at("initial_law"));
  }
  if (obj.contains("seed")) {
    const json& s = obj.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw SpecError("walk.seed must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  } else {
    cfg.seed = 1;
  }
  cfg.trials = get_int_or(obj, "walk", "trials", 1);
  cfg.validate();
  spec.walk = cfg;
  spec.has_walk = true;
}

}  // namespace

const WalkConfig& ExperimentSpec::require_walk() const {
  if (!has_walk)
    throw SpecError("command '" + command + "' requires a walk section in the spec");
  return walk;
}

bool is_known_command(const std::string& name) {
  return std::any_of(std::begin(kCommands), std::end(kCommands),
                     [&](const char* c) { return name == c; });
}

ExperimentSpec parse_spec_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("spec root must be a JSON object");
  check_keys(root, "spec",
             {"format_version", "command", "walk", "grid", "output_dir", "wz",
              "sigma_min", "limabean", "compare"});

  ExperimentSpec spec;
  spec.format_version = get_int(root, "spec", "format_version");
  if (spec.format_version != 1)
    throw SpecError("unsupported format_version " + std::to_string(spec.format_version));
  spec.command = get_string(root, "spec", "command");
  if (!is_known_command(spec.command))
    throw SpecError("unknown command '" + spec.command + "'");

  if (root.contains("walk")) {
    if (!root.at("walk").is_object()) throw SpecError("walk must be an object");
    parse_walk(root.at("walk"), spec);
  }
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    check_keys(g, "grid", {"resolution"});
    spec.grid.resolution = get_int(g, "grid", "resolution");
    if (spec.grid.resolution < 16)
      throw SpecError("grid.resolution must be at least 16");
  }
  if (root.contains("output_dir"))
    spec.output_dir = get_string(root, "spec", "output_dir");

  if (root.contains("wz")) {
    const json& w = root.at("wz");
    check_keys(w, "wz", {"n", "horizon", "meshes", "trials", "p"});
    spec.wz.n = get_int_or(w, "wz", "n", spec.wz.n);
    spec.wz.horizon = get_number_or(w, "wz", "horizon", spec.wz.horizon);
    if (w.contains("meshes")) spec.wz.meshes = get_number_list(w, "wz", "meshes");
    spec.wz.trials = get_int_or(w, "wz", "trials", spec.wz.trials);
    spec.wz.p = get_int_or(w, "wz", "p", spec.wz.p);
  }
  if (root.contains("sigma_min")) {
    const json& s = root.at("sigma_min");
    check_keys(s, "sigma_min", {"sizes", "z_re", "z_im", "epsilons"});
    if (s.contains("sizes")) spec.sigma_min.sizes = get_int_list(s, "sigma_min", "sizes");
    spec.sigma_min.z = cplx(get_number_or(s, "sigma_min", "z_re", spec.sigma_min.z.real()),
                            get_number_or(s, "sigma_min", "z_im", spec.sigma_min.z.imag()));
    if (s.contains("epsilons"))
      spec.sigma_min.epsilons = get_number_list(s, "sigma_min", "epsilons");
  }
  if (root.contains("limabean")) {
    const json& l = root.at("limabean");
    check_keys(l, "limabean", {"k_values", "sup_angles", "sup_radii"});
    if (l.contains("k_values"))
      spec.limabean.k_values = get_int_list(l, "limabean", "k_values");
    spec.limabean.sup_angles = get_int_or(l, "limabean", "sup_angles", spec.limabean.sup_angles);
    spec.limabean.sup_radii = get_int_or(l, "limabean", "sup_radii", spec.limabean.sup_radii);
  }
  if (root.contains("compare")) {
    const json& c = root.at("compare");
    check_keys(c, "compare",
               {"esd", "density", "dilation", "max_radial_w1", "max_abs_z",
                "max_outside_fraction"});
    spec.compare.esd_path = get_string(c, "compare", "esd");
    spec.compare.density_path = get_string(c, "compare", "density");
    spec.compare.dilation = get_number_or(c, "compare", "dilation", spec.compare.dilation);
    if (c.contains("max_radial_w1"))
      spec.compare.max_radial_w1 = get_number(c, "compare", "max_radial_w1");
    if (c.contains("max_abs_z"))
      spec.compare.max_abs_z = get_number(c, "compare", "max_abs_z");
    if (c.contains("max_outside_fraction"))
      spec.compare.max_outside_fraction = get_number(c, "compare", "max_outside_fraction");
  }

  spec.canonical = root.dump(2) + "\n";
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_json(buf.str());
}

std::string serialize_spec(const ExperimentSpec& spec) { return spec.canonical; }

}  // namespace limabean::cli
