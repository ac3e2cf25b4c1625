#include "modcont/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace modcont {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != static_cast<int>(x)) throw ConfigError("'" + key + "': not an integer: " + v);
  return static_cast<int>(x);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::vector<OscillationSpec> to_specs(const std::string& key, const std::string& v) {
  std::vector<OscillationSpec> out;
  for (const auto& s : split(v, ';')) {
    try {
      out.push_back(parse_spec(s));
    } catch (const ConfigError& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
  }
  return out;
}

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::hat_check, "hat_check"},
    {ExperimentKind::b_limit, "b_limit"},
    {ExperimentKind::hat_ratio, "hat_ratio"},
    {ExperimentKind::modulus_check, "modulus_check"},
    {ExperimentKind::convergence, "convergence"},
    {ExperimentKind::log_regularity, "log_regularity"},
    {ExperimentKind::holog_regularity, "holog_regularity"},
    {ExperimentKind::hklg, "hklg"},
    {ExperimentKind::sharpness, "sharpness"},
    {ExperimentKind::density, "density"},
};

const char* kDefaultSuite = R"(# Bundled suite: one or more experiments per acceptance criterion.
output = results

[hat-closed-form]
kind = hat_check
alphas = 1.5, 2, 3
samples = 200

[b-limit]
kind = b_limit

[holog-hat-ratio]
kind = hat_ratio
lambdas = 0.25, 0.5, 0.75
alphas = -1, 0, 1
radii = 1e-8

[modulus-oracle]
kind = modulus_check
grids = 33, 513
window_hi = 0.1
samples = 4

[manufactured-convergence]
kind = convergence
grids = 257, 513

[log-regularity]
kind = log_regularity
spec = log(2)
measure = log(1)
data = counterexample
grids = 257, 513
cutoff = 0.36

[holog-regularity]
kind = holog_regularity
spec = holog(0.5, 1)
data = radial
grids = 257, 513
cutoff = 0.36

[hklg-boundedness]
kind = hklg
spec = log(2); holder(0.5)
grids = 129, 257

[sharpness-counterexample]
kind = sharpness
spec = holder(0.5); holder(0.9); log(2); log(3); holog(0.5, 1); holog(0.25, 1)
candidate = log(1.5)
radii = 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8

[density-failure]
kind = density
spec = holder(0.5)
radii = 1e-6
)";

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kKinds)
    if (s == name) return kind;
  throw ConfigError("unknown experiment kind: " + s);
}

OscillationSpec parse_spec(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') throw ConfigError("malformed spec: " + text);
  std::string fam = trim(t.substr(0, open));
  std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<double> p;
  for (const auto& s : split(t.substr(open + 1, t.size() - open - 2), ',')) p.push_back(to_double("spec", s));
  try {
    if (fam == "holder" && (p.size() == 1 || p.size() == 2))
      return OscillationSpec::holder(p[0], p.size() == 2 ? p[1] : 1.0);
    if (fam == "log" && (p.size() == 1 || p.size() == 2))
      return OscillationSpec::log(p[0], p.size() == 2 ? p[1] : OscillationSpec::kDefaultLogRadius);
    if (fam == "holog" && (p.size() == 2 || p.size() == 3))
      return OscillationSpec::holog(p[0], p[1], p.size() == 3 ? p[2] : OscillationSpec::kDefaultLogRadius);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid spec " + text + ": " + e.what());
  }
  throw ConfigError("malformed spec: " + text);
}

std::string format_spec(const OscillationSpec& s) {
  std::ostringstream os;
  os.precision(17);
  switch (s.family()) {
    case Family::holder: os << "holder(" << s.lambda() << ", " << s.radius() << ")"; break;
    case Family::log: os << "log(" << s.alpha() << ", " << s.radius() << ")"; break;
    case Family::holog:
      os << "holog(" << s.lambda() << ", " << s.alpha() << ", " << s.radius() << ")";
      break;
    case Family::tabulated: os << "tabulated[" << s.table_radii().size() << "]"; break;
  }
  return os.str();
}

ExperimentConfig parse_experiment(const std::string& name,
                                  const std::map<std::string, std::string>& keys) {
  ExperimentConfig c;
  c.name = name;
  c.raw = keys;
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  const auto kind = keys.find("kind");
  if (kind == keys.end()) throw ConfigError("[" + name + "]: missing 'kind'");
  c.kind = parse_kind(kind->second);
  for (const auto& [k, v] : keys) {
    if (k == "kind") continue;
    else if (k == "spec") c.specs = to_specs(k, v);
    else if (k == "measure") c.measure = parse_spec(v);
    else if (k == "candidate") c.candidate = parse_spec(v);
    else if (k == "alphas") c.alphas = to_doubles(k, v);
    else if (k == "lambdas") c.lambdas = to_doubles(k, v);
    else if (k == "radii") c.radii = to_doubles(k, v);
    else if (k == "grids") {
      for (double g : to_doubles(k, v)) {
        if (g != static_cast<int>(g) || g < 3) throw ConfigError("'grids': need integers >= 3");
        c.grids.push_back(static_cast<int>(g));
      }
    }
    else if (k == "operator") c.op = to_doubles(k, v);
    else if (k == "margin") c.margin = to_double(k, v);
    else if (k == "window_lo") c.window_lo = to_double(k, v);
    else if (k == "window_hi") c.window_hi = to_double(k, v);
    else if (k == "cutoff") c.cutoff = to_double(k, v);
    else if (k == "tolerance") c.tolerance = to_double(k, v);
    else if (k == "data") c.data = v;
    else if (k == "offset_cap") c.offset_cap = to_int(k, v);
    else if (k == "samples") c.samples = to_int(k, v);
    else if (k == "seed") c.seed = static_cast<unsigned>(to_int(k, v));
    else if (k == "output") c.output_dir = v;
    else throw ConfigError("[" + name + "]: unknown key '" + k + "'");
  }
  if (!std::is_sorted(c.grids.begin(), c.grids.end()) ||
      std::adjacent_find(c.grids.begin(), c.grids.end()) != c.grids.end())
    throw ConfigError("[" + name + "]: grid sizes must be strictly ascending");
  if (!(c.margin > 0.0 && c.margin < 0.5)) throw ConfigError("[" + name + "]: margin must lie in (0, 0.5)");
  if (c.data != "radial" && c.data != "counterexample" && c.data != "zero")
    throw ConfigError("[" + name + "]: data must be 'radial', 'counterexample' or 'zero'");
  if (c.offset_cap < 1) throw ConfigError("[" + name + "]: offset_cap must be positive");
  if (c.window_lo < 0.0 || c.window_hi < 0.0 || (c.window_hi > 0.0 && c.window_lo >= c.window_hi))
    throw ConfigError("[" + name + "]: invalid radius window");
  if (!c.op.empty() && c.op.size() != 4 && c.op.size() != 9)
    throw ConfigError("[" + name + "]: operator needs 4 or 9 entries");
  return c;
}

std::vector<ExperimentConfig> parse_suite(std::istream& in) {
  std::map<std::string, std::string> globals;
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> sections;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!seen.insert(name).second) throw ConfigError("duplicate experiment name: " + name);
      sections.push_back({name, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    auto& target = sections.empty() ? globals : sections.back().second;
    if (!target.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  // A file without sections is a single experiment named by its 'name' key.
  if (sections.empty() && !globals.empty()) {
    auto name = globals.extract("name");
    return {parse_experiment(name ? name.mapped() : "experiment", globals)};
  }
  std::vector<ExperimentConfig> out;
  for (auto& [name, keys] : sections) {
    for (const auto& [k, v] : globals) keys.emplace(k, v);
    out.push_back(parse_experiment(name, keys));
  }
  return out;
}

std::vector<ExperimentConfig> load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return parse_suite(in);
}

const std::string& default_suite_text() {
  static const std::string text = kDefaultSuite;
  return text;
}

std::vector<ExperimentConfig> default_suite() {
  std::istringstream in(default_suite_text());
  return parse_suite(in);
}

}  // namespace modcont
