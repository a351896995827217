#include "mhdfem/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace mhdfem {

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
  Value value;
  int line = 0;
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& tok, int line) {
  std::string t = trim(tok);
  t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
  if (t.empty()) fail(line, "empty value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) fail(line, "not a number: '" + t + "'");
  return v;
}

Value parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char n = s[++i];
        out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    std::vector<double> arr;
    const std::string inner = trim(s.substr(1, s.size() - 2));
    if (!inner.empty()) {
      std::stringstream ss(inner);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        arr.push_back(parse_number(item, line));
      }
    }
    return arr;
  }
  return parse_number(s, line);
}

Table parse_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      if (t.count(section)) fail(line, "duplicate section [" + section + "]");
      t[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key outside of a section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "empty key");
    auto& sec = t[section];
    if (sec.count(key)) fail(line, "duplicate key '" + key + "'");
    sec[key] = Entry{parse_value(s.substr(eq + 1), line), line};
  }
  return t;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"mesh", {"dim", "divisions", "lower", "upper"}},
      {"physics",
       {"variant", "mu", "lambda", "nu", "background_field", "potential_gradient", "potential_offset", "upwinding",
        "upwind_scale"}},
      {"eos", {"kind", "K", "gamma", "cv"}},
      {"time", {"dt", "t_end"}},
      {"solver", {"abs_tol", "rel_tol", "max_iter", "fd_scale", "max_halvings"}},
      {"output", {"directory", "snapshot_interval", "vtk", "helicity_interval", "debug_checks"}},
      {"initial", {"kind", "density"}},
  };
  return s;
}

class Reader {
 public:
  explicit Reader(const Table& t) : t_(t) {
    for (const auto& [sec, keys] : t_) {
      const auto it = schema().find(sec);
      if (it == schema().end()) throw ConfigError("unknown config section [" + sec + "]");
      for (const auto& [key, entry] : keys)
        if (!it->second.count(key)) fail(entry.line, "unknown key '" + key + "' in [" + sec + "]");
    }
  }

  const Entry* find(const std::string& sec, const std::string& key) const {
    const auto s = t_.find(sec);
    if (s == t_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& require(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    if (!e) throw ConfigError("missing required key '" + key + "' in [" + sec + "]");
    return *e;
  }

  static double number(const Entry& e, const std::string& key) {
    if (const auto* d = std::get_if<double>(&e.value)) return *d;
    fail(e.line, "'" + key + "' must be a number");
  }

  static int integer(const Entry& e, const std::string& key) {
    const double d = number(e, key);
    if (d != std::floor(d) || std::abs(d) > 1e9) fail(e.line, "'" + key + "' must be an integer");
    return static_cast<int>(d);
  }

  static bool boolean(const Entry& e, const std::string& key) {
    if (const auto* b = std::get_if<bool>(&e.value)) return *b;
    fail(e.line, "'" + key + "' must be true or false");
  }

  static std::string string(const Entry& e, const std::string& key) {
    if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
    fail(e.line, "'" + key + "' must be a string");
  }

  static std::vector<double> array(const Entry& e, const std::string& key, std::size_t min_len,
                                   std::size_t max_len) {
    const auto* a = std::get_if<std::vector<double>>(&e.value);
    if (!a) fail(e.line, "'" + key + "' must be an array of numbers");
    if (a->size() < min_len || a->size() > max_len)
      fail(e.line, "'" + key + "' must have " + std::to_string(min_len) + " to " + std::to_string(max_len) +
                       " entries");
    return *a;
  }

  void num(const std::string& sec, const std::string& key, double& out) const {
    if (const Entry* e = find(sec, key)) out = number(*e, key);
  }
  void integer(const std::string& sec, const std::string& key, int& out) const {
    if (const Entry* e = find(sec, key)) out = integer(*e, key);
  }
  void flag(const std::string& sec, const std::string& key, bool& out) const {
    if (const Entry* e = find(sec, key)) out = boolean(*e, key);
  }
  void str(const std::string& sec, const std::string& key, std::string& out) const {
    if (const Entry* e = find(sec, key)) out = string(*e, key);
  }
  void vec(const std::string& sec, const std::string& key, Vec3& out) const {
    if (const Entry* e = find(sec, key)) {
      const auto a = array(*e, key, 2, 3);
      out = Vec3::Zero();
      for (std::size_t i = 0; i < a.size(); ++i) out[static_cast<int>(i)] = a[i];
    }
  }

 private:
  const Table& t_;
};

EosKind parse_eos_kind(const std::string& s) {
  if (s == "POLYTROPIC") return EosKind::Polytropic;
  if (s == "IDEAL_GAS") return EosKind::IdealGas;
  throw ConfigError("unknown eos kind '" + s + "' (POLYTROPIC or IDEAL_GAS)");
}

std::string eos_kind_name(EosKind k) { return k == EosKind::Polytropic ? "POLYTROPIC" : "IDEAL_GAS"; }

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest form that reads back exactly
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_vec(const Vec3& v, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

SimConfig parse_config_string(const std::string& text) {
  const Table table = parse_table(text);
  const Reader r(table);
  SimConfig cfg;

  cfg.mesh.dim = Reader::integer(r.require("mesh", "dim"), "dim");
  if (cfg.mesh.dim != 2 && cfg.mesh.dim != 3) throw ConfigError("mesh dim must be 2 or 3");
  {
    const Entry& e = r.require("mesh", "divisions");
    const auto a = Reader::array(e, "divisions", cfg.mesh.dim, cfg.mesh.dim);
    cfg.mesh.divisions = {1, 1, 1};
    for (int i = 0; i < cfg.mesh.dim; ++i) {
      if (a[i] != std::floor(a[i])) fail(e.line, "divisions must be integers");
      cfg.mesh.divisions[i] = static_cast<int>(a[i]);
    }
  }
  if (cfg.mesh.dim == 2) {
    cfg.mesh.lower = Vec3::Zero();
    cfg.mesh.upper = Vec3(1.0, 1.0, 0.0);
  }
  r.vec("mesh", "lower", cfg.mesh.lower);
  r.vec("mesh", "upper", cfg.mesh.upper);

  Physics& ph = cfg.physics;
  ph.variant = parse_variant(Reader::string(r.require("physics", "variant"), "variant"));
  r.num("physics", "mu", ph.mu);
  r.num("physics", "lambda", ph.lambda);
  r.num("physics", "nu", ph.nu);
  r.vec("physics", "background_field", ph.background);
  r.vec("physics", "potential_gradient", ph.potential_gradient);
  r.num("physics", "potential_offset", ph.potential_offset);
  r.flag("physics", "upwinding", ph.upwind.enabled);
  r.num("physics", "upwind_scale", ph.upwind.scale);

  ph.eos.kind = ph.variant == Variant::FullEntropy ? EosKind::IdealGas : EosKind::Polytropic;
  if (const Entry* e = r.find("eos", "kind")) ph.eos.kind = parse_eos_kind(Reader::string(*e, "kind"));
  r.num("eos", "K", ph.eos.K);
  r.num("eos", "gamma", ph.eos.gamma);
  r.num("eos", "cv", ph.eos.cv);

  cfg.time.dt = Reader::number(r.require("time", "dt"), "dt");
  cfg.time.t_end = Reader::number(r.require("time", "t_end"), "t_end");

  r.num("solver", "abs_tol", cfg.solver.abs_tol);
  r.num("solver", "rel_tol", cfg.solver.rel_tol);
  r.integer("solver", "max_iter", cfg.solver.max_iter);
  r.num("solver", "fd_scale", cfg.solver.fd_scale);
  r.integer("solver", "max_halvings", cfg.solver.max_halvings);

  r.str("output", "directory", cfg.output.directory);
  r.num("output", "snapshot_interval", cfg.output.snapshot_interval);
  r.flag("output", "vtk", cfg.output.vtk);
  r.integer("output", "helicity_interval", cfg.output.helicity_interval);
  r.flag("output", "debug_checks", cfg.output.debug_checks);

  r.str("initial", "kind", cfg.initial.kind);
  r.num("initial", "density", cfg.initial.density);

  (void)cfg.validate();
  return cfg;
}

SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> SimConfig::validate() const {
  if (mesh.dim != 2 && mesh.dim != 3) throw ConfigError("mesh dim must be 2 or 3");
  for (int a = 0; a < mesh.dim; ++a) {
    if (mesh.divisions[a] < 1) throw ConfigError("mesh divisions must be >= 1 on every axis");
    if (!(mesh.upper[a] > mesh.lower[a])) throw ConfigError("mesh bounds are degenerate on axis " + std::to_string(a));
  }
  std::vector<std::string> warnings = physics.validate();
  if (mesh.dim == 2 && (physics.background.z() != 0.0 || physics.potential_gradient.z() != 0.0))
    throw ConfigError("2D runs take in-plane background field and potential gradient");
  if (!(time.dt > 0.0) || !std::isfinite(time.dt)) throw ConfigError("time step dt must be > 0");
  if (!(time.t_end >= 0.0) || !std::isfinite(time.t_end)) throw ConfigError("t_end must be >= 0");
  solver.validate();
  if (!std::isfinite(output.snapshot_interval)) throw ConfigError("snapshot_interval must be finite");
  if (output.helicity_interval < 1) throw ConfigError("helicity_interval must be >= 1");
  if (output.directory.empty()) throw ConfigError("output directory must not be empty");
  if (initial.kind == "invariants3d") {
    if (mesh.dim != 3) throw ConfigError("initial kind invariants3d needs a 3D mesh");
    if (physics.has_entropy()) throw ConfigError("initial kind invariants3d is barotropic");
  } else if (initial.kind == "rayleigh_taylor") {
    if (mesh.dim != 2) throw ConfigError("initial kind rayleigh_taylor needs a 2D mesh");
    if (!physics.has_entropy()) throw ConfigError("initial kind rayleigh_taylor needs FULL_ENTROPY");
  } else if (initial.kind == "rest") {
    if (!(initial.density > 0.0)) throw ConfigError("initial density must be > 0");
  } else {
    throw ConfigError("unknown initial kind '" + initial.kind + "' (invariants3d, rayleigh_taylor, rest)");
  }
  return warnings;
}

bool SimConfig::operator==(const SimConfig& o) const {
  const Physics& a = physics;
  const Physics& b = o.physics;
  return mesh.dim == o.mesh.dim && mesh.divisions == o.mesh.divisions && mesh.lower == o.mesh.lower &&
         mesh.upper == o.mesh.upper && a.variant == b.variant && a.mu == b.mu && a.lambda == b.lambda &&
         a.nu == b.nu && a.eos.kind == b.eos.kind && a.eos.K == b.eos.K && a.eos.gamma == b.eos.gamma &&
         a.eos.cv == b.eos.cv && a.background == b.background && a.potential_gradient == b.potential_gradient &&
         a.potential_offset == b.potential_offset && a.upwind.enabled == b.upwind.enabled &&
         a.upwind.scale == b.upwind.scale && time.dt == o.time.dt && time.t_end == o.time.t_end &&
         solver.abs_tol == o.solver.abs_tol && solver.rel_tol == o.solver.rel_tol &&
         solver.max_iter == o.solver.max_iter && solver.fd_scale == o.solver.fd_scale &&
         solver.max_halvings == o.solver.max_halvings && output.directory == o.output.directory &&
         output.snapshot_interval == o.output.snapshot_interval && output.vtk == o.output.vtk &&
         output.helicity_interval == o.output.helicity_interval && output.debug_checks == o.output.debug_checks &&
         initial.kind == o.initial.kind && initial.density == o.initial.density;
}

std::string serialize_config(const SimConfig& cfg) {
  const int d = cfg.mesh.dim;
  const Physics& ph = cfg.physics;
  std::ostringstream o;
  o << "[mesh]\n"
    << "dim = " << d << "\n"
    << "divisions = [";
  for (int i = 0; i < d; ++i) o << (i ? ", " : "") << cfg.mesh.divisions[i];
  o << "]\n"
    << "lower = " << fmt_vec(cfg.mesh.lower, d) << "\n"
    << "upper = " << fmt_vec(cfg.mesh.upper, d) << "\n\n"
    << "[physics]\n"
    << "variant = " << quote(std::string(variant_name(ph.variant))) << "\n"
    << "mu = " << fmt(ph.mu) << "\n"
    << "lambda = " << fmt(ph.lambda) << "\n"
    << "nu = " << fmt(ph.nu) << "\n"
    << "background_field = " << fmt_vec(ph.background, 3) << "\n"
    << "potential_gradient = " << fmt_vec(ph.potential_gradient, 3) << "\n"
    << "potential_offset = " << fmt(ph.potential_offset) << "\n"
    << "upwinding = " << (ph.upwind.enabled ? "true" : "false") << "\n"
    << "upwind_scale = " << fmt(ph.upwind.scale) << "\n\n"
    << "[eos]\n"
    << "kind = " << quote(eos_kind_name(ph.eos.kind)) << "\n"
    << "K = " << fmt(ph.eos.K) << "\n"
    << "gamma = " << fmt(ph.eos.gamma) << "\n"
    << "cv = " << fmt(ph.eos.cv) << "\n\n"
    << "[time]\n"
    << "dt = " << fmt(cfg.time.dt) << "\n"
    << "t_end = " << fmt(cfg.time.t_end) << "\n\n"
    << "[solver]\n"
    << "abs_tol = " << fmt(cfg.solver.abs_tol) << "\n"
    << "rel_tol = " << fmt(cfg.solver.rel_tol) << "\n"
    << "max_iter = " << cfg.solver.max_iter << "\n"
    << "fd_scale = " << fmt(cfg.solver.fd_scale) << "\n"
    << "max_halvings = " << cfg.solver.max_halvings << "\n\n"
    << "[output]\n"
    << "directory = " << quote(cfg.output.directory) << "\n"
    << "snapshot_interval = " << fmt(cfg.output.snapshot_interval) << "\n"
    << "vtk = " << (cfg.output.vtk ? "true" : "false") << "\n"
    << "helicity_interval = " << cfg.output.helicity_interval << "\n"
    << "debug_checks = " << (cfg.output.debug_checks ? "true" : "false") << "\n\n"
    << "[initial]\n"
    << "kind = " << quote(cfg.initial.kind) << "\n"
    << "density = " << fmt(cfg.initial.density) << "\n";
  return o.str();
}

Mesh build_mesh(const MeshSpec& spec) {
  Box box;
  box.lower = spec.lower;
  box.upper = spec.upper;
  return build_structured_mesh(spec.dim, std::span<const int>(spec.divisions.data(), spec.dim), box);
}

}  // namespace mhdfem
