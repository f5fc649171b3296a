#include "cvw/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cvw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": not a number: '" + raw + "'");
  return v;
}

int to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": not an integer: '" + raw + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + raw + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CVW_DOUBLE(name, member)                                                       \
  Field {                                                                              \
    name, [](RunConfig& c, const std::string& s) { c.member = to_double(name, s); },   \
        [](const RunConfig& c) { return fmt(c.member); }                               \
  }
#define CVW_INT(name, member)                                                          \
  Field {                                                                              \
    name, [](RunConfig& c, const std::string& s) { c.member = to_int(name, s); },      \
        [](const RunConfig& c) { return std::to_string(c.member); }                    \
  }
#define CVW_BOOL(name, member)                                                         \
  Field {                                                                              \
    name, [](RunConfig& c, const std::string& s) { c.member = to_bool(name, s); },     \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }    \
  }
#define CVW_LIST(name, member)                                                         \
  Field {                                                                              \
    name, [](RunConfig& c, const std::string& s) { c.member = to_list(name, s); },     \
        [](const RunConfig& c) { return fmt(c.member); }                               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      CVW_DOUBLE("physics.g", params.g),
      CVW_DOUBLE("physics.k", params.k),
      CVW_DOUBLE("physics.h", params.h),
      CVW_DOUBLE("physics.upsilon", params.vorticity),
      CVW_INT("grid.modes", continuation.modes),
      CVW_INT("grid.nodes", continuation.nodes),
      Field{"continuation.sign",
            [](RunConfig& c, const std::string& s) {
              const std::string t = trim(s);
              if (t == "minus") c.continuation.sign = BranchSign::minus;
              else if (t == "plus") c.continuation.sign = BranchSign::plus;
              else throw ConfigError("continuation.sign: expected minus or plus");
            },
            [](const RunConfig& c) {
              return std::string(c.continuation.sign == BranchSign::minus ? "minus" : "plus");
            }},
      Field{"continuation.policy",
            [](RunConfig& c, const std::string& s) {
              const std::string t = trim(s);
              if (t == "warn") c.continuation.policy = Policy::warn;
              else if (t == "halt") c.continuation.policy = Policy::halt;
              else throw ConfigError("continuation.policy: expected warn or halt");
            },
            [](const RunConfig& c) {
              return std::string(c.continuation.policy == Policy::warn ? "warn" : "halt");
            }},
      CVW_DOUBLE("continuation.s_init", continuation.s_init),
      CVW_DOUBLE("continuation.initial_step", continuation.initial_step),
      CVW_DOUBLE("continuation.max_step", continuation.max_step),
      CVW_DOUBLE("continuation.min_step", continuation.min_step),
      CVW_DOUBLE("continuation.shrink", continuation.shrink),
      CVW_DOUBLE("continuation.grow", continuation.grow),
      CVW_INT("continuation.easy_iterations", continuation.easy_iterations),
      CVW_DOUBLE("continuation.arclength_switch", continuation.arclength_switch),
      CVW_DOUBLE("continuation.newton_tol", continuation.newton_tol),
      CVW_INT("continuation.max_newton", continuation.max_newton),
      CVW_DOUBLE("continuation.stagnation_stop", continuation.stagnation_stop),
      CVW_INT("continuation.max_points", continuation.max_points),
      CVW_BOOL("continuation.fd_jacobian", continuation.finite_difference_jacobian),
      CVW_INT("kernel.max_terms", continuation.kernel.max_terms),
      CVW_DOUBLE("kernel.tail_tol", continuation.kernel.tail_tol),
      CVW_LIST("kernel_study.d", kernel_d),
      CVW_INT("kernel_study.samples", kernel_samples),
      CVW_LIST("bifurcate.offsets", bifurcate_offsets),
      CVW_INT("reconstruct.point", reconstruct_point),
      CVW_INT("reconstruct.levels", reconstruct_levels),
      CVW_INT("reconstruct.profile_heights", profile_heights),
      CVW_LIST("sweep.upsilons", sweep_upsilons),
      CVW_INT("sweep.workers", sweep_workers),
      Field{"output.dir",
            [](RunConfig& c, const std::string& s) {
              c.output_dir = trim(s);
              if (c.output_dir.empty()) throw ConfigError("output.dir: empty");
            },
            [](const RunConfig& c) { return c.output_dir; }},
      CVW_BOOL("output.svg", svg),
  };
  return table;
}

#undef CVW_DOUBLE
#undef CVW_INT
#undef CVW_BOOL
#undef CVW_LIST

void assign(RunConfig& c, const std::string& key, const std::string& value) {
  for (const Field& f : fields())
    if (key == f.key) {
      f.set(c, value);
      return;
    }
  throw ConfigError("unknown key '" + key + "'");
}

void validate(const RunConfig& c) {
  try {
    c.params.validate();
    c.continuation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.kernel_samples < 2) throw ConfigError("kernel_study.samples must be at least 2");
  for (double d : c.kernel_d)
    if (!(d > 0.0)) throw ConfigError("kernel_study.d values must be positive");
  if (c.reconstruct_levels < 2) throw ConfigError("reconstruct.levels must be at least 2");
  if (c.profile_heights < 2) throw ConfigError("reconstruct.profile_heights must be at least 2");
  if (c.sweep_workers < 1) throw ConfigError("sweep.workers must be at least 1");
  for (double u : c.sweep_upsilons)
    if (!(u >= 0.0)) throw ConfigError("sweep.upsilons must be nonnegative");
}

}  // namespace

std::string RunConfig::effective() const {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
  return out;
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig c;
  c.source_text = text;
  c.overrides = overrides;
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (!body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
      continue;
    }
    for (const auto& [key, value] : body) assign(c, section + "." + key, value.data());
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    assign(c, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  if (path.empty()) return parse_config("", overrides);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

}  // namespace cvw
