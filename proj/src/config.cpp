#include "delab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace delab {

const std::map<std::string, SchemaEntry>& config_schema() {
  static const std::map<std::string, SchemaEntry> schema = {
      {"experiment.id", {ValueKind::text, "experiment"}},
      {"experiment.mode", {ValueKind::text, "classical"}},
      {"experiment.n", {ValueKind::integer, "1000"}},
      {"experiment.replications", {ValueKind::integer, "100"}},
      {"experiment.master_seed", {ValueKind::integer, "1"}},
      {"experiment.output", {ValueKind::text, "out"}},
      {"experiment.reference", {ValueKind::text, ""}},
      {"experiment.kls_cap", {ValueKind::integer, "0"}},
      {"spec.family", {ValueKind::text, "gaussian_iso"}},
      {"spec.d", {ValueKind::integer, "1"}},
      {"spec.c", {ValueKind::real, "0.5"}},
      {"spec.k0", {ValueKind::integer, "2"}},
      {"spec.direction", {ValueKind::text, "isotropic"}},
      {"scheme.family", {ValueKind::text, "sqrt_n"}},
      {"scheme.q", {ValueKind::real, "0"}},
      {"scheme.n0", {ValueKind::text, "auto"}},
      {"scheme.table", {ValueKind::real_list, ""}},
      {"integral_test.a", {ValueKind::real, "3"}},
      {"integral_test.b", {ValueKind::real, "0"}},
      {"integral_test.d", {ValueKind::integer, "1"}},
      {"integral_test.n_max", {ValueKind::real, "1e9"}},
      {"tail_bounds.d", {ValueKind::integer, "2"}},
      {"tail_bounds.covariance_eigenvalues", {ValueKind::real_list, "1,0.5"}},
      {"tail_bounds.x_grid", {ValueKind::real_list, "0,1,2,4,6,8"}},
      {"tail_bounds.sigma", {ValueKind::real_list, "0.1,0.3,0.5,0.7,0.9"}},
      {"tail_bounds.z_grid", {ValueKind::real_list, "0.01,0.1,1,10,100"}},
      {"tail_bounds.envelope_d", {ValueKind::integer, "3"}},
      {"tail_bounds.draws", {ValueKind::integer, "1000000"}},
      {"validate.n_grid", {ValueKind::real_list, "16,1e2,1e3,1e4,1e5,1e6"}},
      {"validate.t_grid", {ValueKind::real_list, "10,1e3,1e10,1e100,1e300"}},
      {"shift.grid", {ValueKind::real_list, "1e2,1e3,1e4,1e5,1e6,1e7,1e8"}},
      {"tightness.horizons", {ValueKind::real_list, "1e4,1e5,1e6"}},
      {"tightness.y_grid", {ValueKind::real_list, "-4,-3,-2,-1,0"}},
  };
  return schema;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size();
}

bool parse_integer(const std::string& s, std::int64_t& out) {
  const std::string t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  if (r.ec == std::errc() && r.ptr == t.data() + t.size()) return true;
  // Accept integral reals such as 1e5.
  double v = 0.0;
  if (!parse_real(t, v) || v != std::floor(v) || std::abs(v) > 9.2e18) return false;
  out = static_cast<std::int64_t>(v);
  return true;
}

std::vector<double> split_reals(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    double v = 0.0;
    if (!parse_real(item, v)) throw ConfigError("config: '" + key + "' expects a list of numbers, got '" + s + "'");
    out.push_back(v);
  }
  return out;
}

void check_value(const std::string& key, const SchemaEntry& entry, const std::string& value) {
  double r = 0.0;
  std::int64_t i = 0;
  switch (entry.kind) {
    case ValueKind::integer:
      if (!parse_integer(value, i)) throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
      break;
    case ValueKind::real:
      if (!parse_real(value, r)) throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
      break;
    case ValueKind::real_list: split_reals(key, value); break;
    case ValueKind::text: break;
  }
}

}  // namespace

Config Config::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) cfg.set(section + "." + key, node.get_value<std::string>());
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  const auto& schema = config_schema();
  const auto it = schema.find(dotted_key);
  if (it == schema.end()) throw ConfigError("config: unknown key '" + dotted_key + "'");
  const std::string v = trim(value);
  check_value(dotted_key, it->second, v);
  values_[dotted_key] = v;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string Config::text(const std::string& key) const {
  const auto& schema = config_schema();
  const auto it = schema.find(key);
  if (it == schema.end()) throw ConfigError("config: unknown key '" + key + "'");
  const auto v = values_.find(key);
  return v != values_.end() ? v->second : it->second.default_value;
}

double Config::real(const std::string& key) const {
  double v = 0.0;
  if (!parse_real(text(key), v)) throw ConfigError("config: '" + key + "' is not a number");
  return v;
}

std::int64_t Config::integer(const std::string& key) const {
  std::int64_t v = 0;
  if (!parse_integer(text(key), v)) throw ConfigError("config: '" + key + "' is not an integer");
  return v;
}

std::vector<double> Config::real_list(const std::string& key) const { return split_reals(key, text(key)); }

DistributionSpec SpecParams::build() const {
  switch (family) {
    case Family::gaussian_iso: return DistributionSpec::gaussian_iso(d);
    case Family::rademacher_product: return DistributionSpec::rademacher_product(d);
    case Family::uniform_cube: return DistributionSpec::uniform_cube(d);
    case Family::atom_ladder: return DistributionSpec::atom_ladder(d, c, k0, direction);
    case Family::atom_ladder_fat: return DistributionSpec::atom_ladder_fat(d, k0, direction);
  }
  throw ConfigError("unknown family");
}

ExperimentConfig experiment_config(const Config& cfg) {
  ExperimentConfig out;
  try {
    out.id = cfg.text("experiment.id");
    out.mode = stat_mode_from_string(cfg.text("experiment.mode"));
    out.n = cfg.integer("experiment.n");
    out.replications = cfg.integer("experiment.replications");
    out.master_seed = static_cast<std::uint64_t>(cfg.integer("experiment.master_seed"));
    out.output_dir = cfg.text("experiment.output");
    out.kls_cap = cfg.integer("experiment.kls_cap");
    if (const auto ref = cfg.text("experiment.reference"); !ref.empty()) out.reference = family_from_string(ref);

    out.spec.family = family_from_string(cfg.text("spec.family"));
    out.spec.d = static_cast<int>(cfg.integer("spec.d"));
    out.spec.c = cfg.real("spec.c");
    out.spec.k0 = static_cast<int>(cfg.integer("spec.k0"));
    out.spec.direction = direction_from_string(cfg.text("spec.direction"));

    out.scheme.family = scheme_family_from_string(cfg.text("scheme.family"));
    out.scheme.q = cfg.real("scheme.q");
    if (out.scheme.family == SchemeFamily::table) {
      out.scheme = TruncationScheme::from_table(cfg.real_list("scheme.table"));
      if (out.scheme.table.empty()) throw ConfigError("config: table scheme needs scheme.table values");
    }
    const std::string n0 = cfg.text("scheme.n0");
    if (n0 == "auto") {
      out.scheme.n0 = 0;
    } else {
      Config probe;
      probe.set("experiment.n", n0);
      out.scheme.n0 = probe.integer("experiment.n");
      if (out.scheme.n0 < 1) throw ConfigError("config: scheme.n0 must be >= 1 or 'auto'");
    }
    // Validates the family parameters.
    (void)out.spec.build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (out.n < 1) throw ConfigError("config: experiment.n must be >= 1");
  if (out.replications < 1) throw ConfigError("config: experiment.replications must be >= 1");
  if ((out.mode == StatMode::feller || out.mode == StatMode::kls) && out.spec.d != 1)
    throw ConfigError("config: mode " + to_string(out.mode) + " requires spec.d = 1");
  if (out.mode == StatMode::kls && out.effective_kls_cap() < out.n)
    throw ConfigError("config: experiment.kls_cap must be >= n");
  return out;
}

}  // namespace delab
