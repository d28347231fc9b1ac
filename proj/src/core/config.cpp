#include "core/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace nelson {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

double to_double(const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: bad number '" + s + "'");
}
int to_int(const std::string& s) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: bad integer '" + s + "'");
}
std::uint64_t to_u64(const std::string& s) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: bad integer '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}
std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& tok : split(s, ',')) out.push_back(to_double(tok));
  return out;
}
std::string join_pairs(const std::vector<std::pair<double, double>>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + fmt(v[i].first) + ":" + fmt(v[i].second);
  return out;
}
std::vector<std::pair<double, double>> parse_pairs(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  if (s.empty()) return out;
  for (const auto& tok : split(s, ',')) {
    auto parts = split(tok, ':');
    if (parts.size() != 2) throw ValidationError("config: bad pair '" + tok + "'");
    out.emplace_back(to_double(parts[0]), to_double(parts[1]));
  }
  return out;
}

struct KeyDef {
  const char* section;
  const char* key;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, const std::string&)> set;
};

#define KEY_NUM(sec, name, field, conv)                              \
  {sec, name, [](const Config& c) { return fmt(c.field); },          \
   [](Config& c, const std::string& v) { c.field = conv(v); }}
#define KEY_STR(sec, name, field)                                    \
  {sec, name, [](const Config& c) { return c.field; },               \
   [](Config& c, const std::string& v) { c.field = v; }}
#define KEY_LIST(sec, name, field)                                   \
  {sec, name, [](const Config& c) { return join_list(c.field); },    \
   [](Config& c, const std::string& v) { c.field = parse_list(v); }}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      KEY_NUM("model", "e", e, to_double),
      KEY_NUM("model", "lambda", lambda, to_double),
      KEY_STR("model", "ir", ir),
      KEY_NUM("model", "kappa", kappa, to_double),
      KEY_STR("model", "potential", potential),
      KEY_NUM("model", "potential_C", pot_C, to_double),
      KEY_NUM("model", "potential_s", pot_s, to_double),

      KEY_NUM("grid", "k_min", k_min, to_double),
      KEY_NUM("grid", "k_max", k_max, to_double),
      KEY_NUM("grid", "n_shells", n_shells, to_int),
      KEY_NUM("grid", "n_dirs", n_dirs, to_int),
      KEY_NUM("grid", "T", T, to_double),
      KEY_NUM("grid", "dt", dt, to_double),
      KEY_NUM("grid", "R_max", R_max, to_double),
      KEY_NUM("grid", "n_grid", n_grid, to_int),
      KEY_LIST("grid", "T_list", T_list),

      KEY_NUM("sampler", "n_sweeps", n_sweeps, to_int),
      KEY_NUM("sampler", "n_burn", n_burn, to_int),
      KEY_NUM("sampler", "block_len", block_len, to_int),
      KEY_NUM("sampler", "n_chains", n_chains, to_int),
      KEY_NUM("sampler", "thin", thin, to_int),
      KEY_NUM("sampler", "seed", seed, to_u64),
      KEY_LIST("sampler", "k_probes", k_probes),
      {"sampler", "st_probes",
       [](const Config& c) { return join_pairs(c.st_probes); },
       [](Config& c, const std::string& v) { c.st_probes = parse_pairs(v); }},

      KEY_NUM("fock", "n_max", fock_n_max, to_int),
      KEY_NUM("fock", "n_shells", fock_n_shells, to_int),
      KEY_NUM("fock", "n_dirs", fock_n_dirs, to_int),
      KEY_NUM("fock", "k_max", fock_k_max, to_double),
      KEY_STR("fock", "dof", fock_dof),
      KEY_NUM("fock", "q0_x", q0_x, to_double),
      KEY_NUM("fock", "q0_y", q0_y, to_double),
      KEY_NUM("fock", "q0_z", q0_z, to_double),
      KEY_NUM("fock", "n_sites", fock_n_sites, to_int),
      KEY_NUM("fock", "spacing", fock_spacing, to_double),
      KEY_NUM("fock", "R_max", fock_R_max, to_double),
      KEY_LIST("fock", "k_mins", fock_k_mins),
  };
  return table;
}

#undef KEY_NUM
#undef KEY_STR
#undef KEY_LIST

const KeyDef& find_key(const std::string& section, const std::string& key) {
  for (const auto& d : key_table())
    if (section == d.section && key == d.key) return d;
  throw ValidationError("config: unknown key '" + section + "." + key + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

IrVariant Config::ir_variant() const { return ir_variant_from_string(ir); }

ConfiningPotential Config::make_potential() const {
  if (potential == "power") return ConfiningPotential::power(pot_C, pot_s);
  if (potential == "harmonic") return ConfiningPotential::harmonic(pot_C);
  throw ValidationError("config: unknown potential '" + potential + "'");
}

void Config::validate() const {
  ir_variant();
  make_potential();
  if (!(lambda > 0.0)) throw ValidationError("config: lambda must be > 0");
  if (!(kappa > 0.0)) throw ValidationError("config: kappa must be > 0");
  if (!(0.0 < k_min && k_min < k_max))
    throw ValidationError("config: need 0 < k_min < k_max");
  if (n_shells < 1 || n_dirs < 2 || n_dirs % 2 != 0)
    throw ValidationError("config: n_shells >= 1 and even n_dirs >= 2 required");
  if (!(T > 0.0) || !(dt > 0.0) || !(R_max > 0.0) || n_grid < 16)
    throw ValidationError("config: grid parameters out of range");
  for (double t : T_list)
    if (!(t > 0.0)) throw ValidationError("config: T_list entries must be > 0");
  if (n_burn >= n_sweeps || block_len < 2 || n_chains < 1 || thin < 1)
    throw ValidationError("config: sampler parameters out of range");
  for (const auto& [s, t] : st_probes)
    if (std::abs(s) > T || std::abs(t) > T)
      throw ValidationError("config: st_probes must lie in [-T, T]");
  if (fock_dof != "static" && fock_dof != "grid1d" && fock_dof != "radial")
    throw ValidationError("config: unknown fock dof '" + fock_dof + "'");
  if (fock_n_max < 0 || fock_n_shells < 1 || fock_n_dirs < 2 ||
      !(fock_k_max > 0.0) || fock_k_mins.empty())
    throw ValidationError("config: fock parameters out of range");
  for (double km : fock_k_mins)
    if (!(0.0 < km && km < fock_k_max))
      throw ValidationError("config: fock k_mins must lie in (0, k_max)");
}

std::string Config::serialize() const {
  std::string out;
  std::string cur;
  for (const auto& d : key_table()) {
    if (cur != d.section) {
      if (!out.empty()) out += "\n";
      cur = d.section;
      out += "[" + cur + "]\n";
    }
    out += std::string(d.key) + " = " + d.get(*this) + "\n";
  }
  return out;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  auto pos = dotted_key.find('.');
  if (pos == std::string::npos)
    throw ValidationError("config: override key must be section.key");
  find_key(dotted_key.substr(0, pos), dotted_key.substr(pos + 1)).set(*this, value);
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ValidationError("config: malformed section at line " +
                              std::to_string(lineno));
      section = t.substr(1, t.size() - 2);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos || section.empty())
      throw ValidationError("config: malformed line " + std::to_string(lineno) +
                            ": '" + t + "'");
    find_key(section, trim(t.substr(0, eq))).set(cfg, trim(t.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace nelson
