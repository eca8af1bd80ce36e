#include "dmnls/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dmnls/results.hpp"

namespace dmnls {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

using KeyMap = std::map<std::string, std::string>;

void insert_line(KeyMap& map, std::string& section, const std::string& raw, int lineno) {
  std::string line = raw;
  if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  if (line.front() == '[') {
    if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
    section = trim(line.substr(1, line.size() - 2));
    return;
  }
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
  std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
  if (key.find('.') == std::string::npos) {
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' outside any section");
    key = section + "." + key;
  }
  map[key] = value;
}

class KeyReader {
 public:
  explicit KeyReader(KeyMap map) : map_(std::move(map)) {}

  bool has(const std::string& key) const { return map_.count(key) > 0; }

  std::string raw(const std::string& key) {
    consumed_.push_back(key);
    return map_.at(key);
  }

  Real real(const std::string& key, Real fallback) { return has(key) ? real_required(key) : fallback; }
  Real real_required(const std::string& key) {
    try {
      return parse_real(raw(key));
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + map_.at(key) + "'");
    }
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const std::string v = raw(key);
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = raw(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? raw(key) : fallback; }

  void finish() const {
    std::vector<std::string> sorted = consumed_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [key, value] : map_) {
      (void)value;
      if (!std::binary_search(sorted.begin(), sorted.end(), key)) throw ConfigError("unknown key '" + key + "'");
    }
  }

 private:
  KeyMap map_;
  std::vector<std::string> consumed_;
};

std::vector<Real> parse_real_list(const std::string& text, const std::string& key) {
  std::vector<Real> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list entry");
    try {
      out.push_back(parse_real(item));
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

}  // namespace

InitialDatumSpec parse_initial(const std::string& text) {
  const std::string s = trim(text);
  std::string name = s;
  std::vector<Real> args;
  if (const auto open = s.find('('); open != std::string::npos) {
    if (s.back() != ')') throw ConfigError("study.initial: expected closing ')' in '" + s + "'");
    name = trim(s.substr(0, open));
    const std::string body = s.substr(open + 1, s.size() - open - 2);
    if (!trim(body).empty()) args = parse_real_list(body, "study.initial");
  }
  const auto arg = [&](size_t i, Real fallback) { return i < args.size() ? args[i] : fallback; };
  if (name == "gaussian") {
    if (args.size() > 5) throw ConfigError("study.initial: gaussian takes at most 5 arguments");
    return GaussianSpec{arg(0, 1), arg(1, 1), arg(2, 0), arg(3, 0), arg(4, 0)};
  }
  if (name == "sech") {
    if (args.size() > 2) throw ConfigError("study.initial: sech takes at most 2 arguments");
    return SechSpec{arg(0, 1), arg(1, 1)};
  }
  if (name == "single_mode") {
    if (args.size() > 2) throw ConfigError("study.initial: single_mode takes at most 2 arguments");
    return SingleModeSpec{arg(0, 1), arg(1, 0)};
  }
  throw ConfigError("study.initial: unknown datum '" + name + "' (use gaussian, sech, or single_mode)");
}

std::string format_initial(const InitialDatumSpec& spec) {
  std::string out;
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
    out = "gaussian(" + format_real(g->amplitude) + "," + format_real(g->width) + "," + format_real(g->chirp) + "," +
          format_real(g->center) + "," + format_real(g->carrier) + ")";
  } else if (const auto* s = std::get_if<SechSpec>(&spec)) {
    out = "sech(" + format_real(s->amplitude) + "," + format_real(s->width) + ")";
  } else {
    const auto& m = std::get<SingleModeSpec>(spec);
    out = "single_mode(" + format_real(m.amplitude) + "," + format_real(m.wavenumber) + ")";
  }
  return out;
}

StudyConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  KeyMap map;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) insert_line(map, section, line, ++lineno);

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + ov + "' is not of the form key=value");
    const std::string key = trim(ov.substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' must be section.key");
    map[key] = trim(ov.substr(eq + 1));
  }

  for (const char* req : {"physics.alpha", "physics.d_av", "study.M"})
    if (!map.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");

  KeyReader r(std::move(map));
  StudyConfig cfg;
  cfg.half_width = r.real("grid.L", cfg.half_width);
  cfg.num_points = static_cast<int>(r.integer("grid.N", cfg.num_points));
  cfg.alpha = r.real_required("physics.alpha");
  cfg.d_av = r.real_required("physics.d_av");
  cfg.n_sub = static_cast<int>(r.integer("stepper.n_sub", cfg.n_sub));
  cfg.avg_dt = r.real("stepper.avg_dt", cfg.avg_dt);
  cfg.h1_cap_factor = r.real("stepper.h1_cap_factor", cfg.h1_cap_factor);
  cfg.dealias = r.boolean("stepper.dealias", cfg.dealias);
  const std::string kind = r.text("quadrature.kind", "gauss_legendre");
  if (kind == "gauss_legendre")
    cfg.quad_kind = QuadratureKind::gauss_legendre;
  else if (kind == "composite_simpson")
    cfg.quad_kind = QuadratureKind::composite_simpson;
  else
    throw ConfigError("quadrature.kind: expected gauss_legendre or composite_simpson, got '" + kind + "'");
  cfg.n_r = static_cast<int>(r.integer("quadrature.N_r", cfg.n_r));
  cfg.horizon = r.real_required("study.M");
  if (r.has("study.epsilons")) cfg.epsilons = parse_real_list(r.raw("study.epsilons"), "study.epsilons");
  if (r.has("study.initial")) cfg.initial = parse_initial(r.raw("study.initial"));
  cfg.n_out = static_cast<int>(r.integer("study.n_out", cfg.n_out));
  cfg.trials = static_cast<int>(r.integer("study.trials", cfg.trials));
  const long long seed = r.integer("study.seed", static_cast<long long>(cfg.seed));
  if (seed < 0) throw ConfigError("study.seed: must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  r.finish();

  try {
    validate_study_config(cfg);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return cfg;
}

StudyConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string canonical_config_text(const StudyConfig& cfg) {
  std::ostringstream out;
  out << "grid.L = " << format_real(cfg.half_width) << "\n";
  out << "grid.N = " << cfg.num_points << "\n";
  out << "physics.alpha = " << format_real(cfg.alpha) << "\n";
  out << "physics.d_av = " << format_real(cfg.d_av) << "\n";
  out << "quadrature.N_r = " << cfg.n_r << "\n";
  out << "quadrature.kind = "
      << (cfg.quad_kind == QuadratureKind::gauss_legendre ? "gauss_legendre" : "composite_simpson") << "\n";
  out << "stepper.avg_dt = " << format_real(cfg.avg_dt) << "\n";
  out << "stepper.dealias = " << (cfg.dealias ? "true" : "false") << "\n";
  out << "stepper.h1_cap_factor = " << format_real(cfg.h1_cap_factor) << "\n";
  out << "stepper.n_sub = " << cfg.n_sub << "\n";
  out << "study.M = " << format_real(cfg.horizon) << "\n";
  out << "study.epsilons = ";
  for (size_t i = 0; i < cfg.epsilons.size(); ++i) out << (i ? "," : "") << format_real(cfg.epsilons[i]);
  out << "\n";
  out << "study.initial = " << format_initial(cfg.initial) << "\n";
  out << "study.n_out = " << cfg.n_out << "\n";
  out << "study.seed = " << cfg.seed << "\n";
  out << "study.trials = " << cfg.trials << "\n";
  return out.str();
}

std::string config_hash(const StudyConfig& cfg) {
  const std::string text = canonical_config_text(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

}  // namespace dmnls
