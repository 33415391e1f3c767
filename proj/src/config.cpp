#include "pinning/config.hpp"

#include <openssl/evp.h>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pinning/util.hpp"

namespace pinning {

namespace pt = boost::property_tree;

namespace {

constexpr std::array kExperimentNames{
    "E1_pure_bigjump", "E2_pure_loggap", "E3_disorder_nogap", "E4_lclt",
    "E5_rate_convexity", "E6_mesoscopic", "E7_umodel", "E8_soft",
};

template <class T>
T parse_number(const std::string& field, const std::string& raw) {
  const std::string s = boost::trim_copy(raw);
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(field, "cannot parse '" + s + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& field, const std::string& raw) {
  std::vector<std::string> parts;
  const std::string s = boost::trim_copy(raw);
  if (s.empty()) return {};
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<T> out;
  for (const auto& p : parts) out.push_back(parse_number<T>(field, p));
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

using Section = std::map<std::string, std::string>;

std::map<std::string, Section> read_sections(const std::string& text) {
  // '#' comments are accepted in addition to the parser's ';'
  std::istringstream in(text);
  std::ostringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto t = boost::trim_copy(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned << line << '\n';
  }
  pt::ptree tree;
  std::istringstream src(cleaned.str());
  try {
    pt::ini_parser::read_ini(src, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::map<std::string, Section> out;
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty())
      throw ConfigError(name, "key outside of any section");
    for (const auto& [key, val] : sec) out[name][key] = val.data();
  }
  return out;
}

void reject_unknown(const std::map<std::string, Section>& secs) {
  static const std::map<std::string, std::set<std::string>> allowed{
      {"experiment",
       {"name", "n_ladder", "h", "r", "l", "samples", "replicas", "master_seed", "output", "c",
        "epsilon", "side", "window", "r_grid", "potential", "potential_params"}},
      {"law", {"alpha", "ell", "params", "t_max"}},
      {"disorder", {"kind", "param", "seed"}},
  };
  for (const auto& [name, sec] : secs) {
    const auto it = allowed.find(name);
    if (it == allowed.end()) throw ConfigError(name, "unknown section");
    for (const auto& [key, _] : sec)
      if (!it->second.contains(key)) throw ConfigError(name + "." + key, "unknown key");
  }
}

const std::string* find(const std::map<std::string, Section>& secs, const std::string& sec,
                        const std::string& key) {
  const auto s = secs.find(sec);
  if (s == secs.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::optional<std::int64_t> parse_t_max(const std::string& field, const std::string& raw) {
  const auto s = boost::to_lower_copy(boost::trim_copy(raw));
  if (s == "none" || s == "unbounded" || s.empty()) return std::nullopt;
  return parse_number<std::int64_t>(field, s);
}

void check_law(const LawSpec& law) {
  try {
    (void)InterArrivalLaw::build(law);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("law", e.what());
  }
}

void check(const ExperimentConfig& c) {
  if (c.n_ladder.empty()) throw ConfigError("experiment.n_ladder", "must not be empty");
  for (std::size_t i = 0; i < c.n_ladder.size(); ++i) {
    if (c.n_ladder[i] < 1) throw ConfigError("experiment.n_ladder", "sizes must be >= 1");
    if (i && c.n_ladder[i] <= c.n_ladder[i - 1])
      throw ConfigError("experiment.n_ladder", "must be strictly increasing");
  }
  if (c.samples < 1) throw ConfigError("experiment.samples", "must be >= 1");
  if (c.replicas < 1) throw ConfigError("experiment.replicas", "must be >= 1");
  if (c.r && !(*c.r > 0.0 && *c.r < 1.0))
    throw ConfigError("experiment.r", "must lie in (0, 1)");
  if (c.l && *c.l < 0) throw ConfigError("experiment.l", "must be >= 0");
  if (!(c.c > 0.0)) throw ConfigError("experiment.c", "must be positive");
  if (!(c.epsilon > 0.0)) throw ConfigError("experiment.epsilon", "must be positive");
  if (c.window && *c.window < 1) throw ConfigError("experiment.window", "must be >= 1");
  for (double r : c.r_grid)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("experiment.r_grid", "points must lie in (0, 1)");
  const std::size_t want = c.potential.kind == PotentialKind::linear ? 1 : 3;
  if (c.potential.params.size() != want)
    throw ConfigError("experiment.potential_params",
                      "expected " + std::to_string(want) + " values");
  check_law(c.law);
  try {
    validate(c.disorder);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("disorder", e.what());
  }
  using K = ExperimentKind;
  const bool needs_r = c.experiment == K::E1_pure_bigjump || c.experiment == K::E2_pure_loggap ||
                       c.experiment == K::E6_mesoscopic;
  if (needs_r && !c.r && !c.l) throw ConfigError("experiment.r", "required (or experiment.l)");
  if (c.experiment == K::E8_soft && !c.r) throw ConfigError("experiment.r", "required");
  if (c.experiment == K::E5_rate_convexity && c.r_grid.size() < 3)
    throw ConfigError("experiment.r_grid", "needs at least 3 points");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  return kExperimentNames[static_cast<std::size_t>(kind)];
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kExperimentNames.size(); ++i)
    if (name == kExperimentNames[i]) return static_cast<ExperimentKind>(i);
  throw ConfigError("experiment.name", "unknown experiment '" + name + "'");
}

DensityPotential PotentialSpec::function() const {
  const auto p = params;
  if (kind == PotentialKind::linear) return [a = p.at(0)](double r) { return a * r; };
  return [a = p.at(0), b = p.at(1), r0 = p.at(2)](double r) {
    return a * r - b * (r - r0) * (r - r0);
  };
}

ExperimentConfig parse_config(const std::string& text) {
  const auto secs = read_sections(text);
  reject_unknown(secs);
  ExperimentConfig c;
  auto get = [&](const char* sec, const char* key) { return find(secs, sec, key); };
  auto field = [](const char* sec, const char* key) { return std::string(sec) + "." + key; };

  const auto* name = get("experiment", "name");
  if (!name) throw ConfigError("experiment.name", "required");
  c.experiment = experiment_kind_from_string(boost::trim_copy(*name));

  const auto* ladder = get("experiment", "n_ladder");
  if (!ladder) throw ConfigError("experiment.n_ladder", "required");
  c.n_ladder = parse_list<std::int64_t>("experiment.n_ladder", *ladder);

  if (auto* v = get("experiment", "h")) c.h = parse_number<double>(field("experiment", "h"), *v);
  if (auto* v = get("experiment", "r")) c.r = parse_number<double>("experiment.r", *v);
  if (auto* v = get("experiment", "l")) c.l = parse_number<std::int64_t>("experiment.l", *v);
  if (auto* v = get("experiment", "samples"))
    c.samples = parse_number<std::uint64_t>("experiment.samples", *v);
  if (auto* v = get("experiment", "replicas"))
    c.replicas = parse_number<std::uint64_t>("experiment.replicas", *v);
  if (auto* v = get("experiment", "master_seed"))
    c.master_seed = parse_number<std::uint64_t>("experiment.master_seed", *v);
  if (auto* v = get("experiment", "output")) c.output = boost::trim_copy(*v);
  if (auto* v = get("experiment", "c")) c.c = parse_number<double>("experiment.c", *v);
  if (auto* v = get("experiment", "epsilon"))
    c.epsilon = parse_number<double>("experiment.epsilon", *v);
  if (auto* v = get("experiment", "side")) {
    const auto s = boost::trim_copy(*v);
    if (s == "at_least" || s == ">=")
      c.side = Side::at_least;
    else if (s == "at_most" || s == "<=")
      c.side = Side::at_most;
    else
      throw ConfigError("experiment.side", "expected at_least or at_most");
  }
  if (auto* v = get("experiment", "window"))
    c.window = parse_number<std::int64_t>("experiment.window", *v);
  if (auto* v = get("experiment", "r_grid")) {
    try {
      c.r_grid = parse_grid(*v);
    } catch (const std::exception& e) {
      throw ConfigError("experiment.r_grid", e.what());
    }
  }
  if (auto* v = get("experiment", "potential")) {
    const auto s = boost::trim_copy(*v);
    if (s == "linear")
      c.potential.kind = PotentialKind::linear;
    else if (s == "quadratic")
      c.potential.kind = PotentialKind::quadratic;
    else
      throw ConfigError("experiment.potential", "expected linear or quadratic");
  }
  if (auto* v = get("experiment", "potential_params"))
    c.potential.params = parse_list<double>("experiment.potential_params", *v);
  else if (c.potential.kind == PotentialKind::linear)
    c.potential.params = {c.h};

  if (auto* v = get("law", "alpha")) c.law.alpha = parse_number<double>("law.alpha", *v);
  if (auto* v = get("law", "ell")) {
    try {
      c.law.ell_kind = ell_kind_from_string(boost::trim_copy(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("law.ell", e.what());
    }
  }
  if (auto* v = get("law", "params")) c.law.ell_params = parse_list<double>("law.params", *v);
  if (auto* v = get("law", "t_max")) c.law.t_max = parse_t_max("law.t_max", *v);

  if (auto* v = get("disorder", "kind")) {
    try {
      c.disorder.kind = disorder_kind_from_string(boost::trim_copy(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("disorder.kind", e.what());
    }
  }
  if (auto* v = get("disorder", "param"))
    c.disorder.param = parse_number<double>("disorder.param", *v);
  if (auto* v = get("disorder", "seed"))
    c.disorder.seed = parse_number<std::uint64_t>("disorder.seed", *v);

  check(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "name = " << to_string(c.experiment) << '\n';
  os << "n_ladder = " << join(c.n_ladder) << '\n';
  os << "h = " << format_double(c.h) << '\n';
  if (c.r) os << "r = " << format_double(*c.r) << '\n';
  if (c.l) os << "l = " << *c.l << '\n';
  os << "samples = " << c.samples << '\n';
  os << "replicas = " << c.replicas << '\n';
  os << "master_seed = " << c.master_seed << '\n';
  if (!c.output.empty()) os << "output = " << c.output << '\n';
  os << "c = " << format_double(c.c) << '\n';
  os << "epsilon = " << format_double(c.epsilon) << '\n';
  os << "side = " << (c.side == Side::at_least ? "at_least" : "at_most") << '\n';
  if (c.window) os << "window = " << *c.window << '\n';
  if (!c.r_grid.empty()) os << "r_grid = " << join(c.r_grid) << '\n';
  os << "potential = " << (c.potential.kind == PotentialKind::linear ? "linear" : "quadratic")
     << '\n';
  os << "potential_params = " << join(c.potential.params) << '\n';
  os << "\n[law]\n";
  os << "alpha = " << format_double(c.law.alpha) << '\n';
  os << "ell = " << to_string(c.law.ell_kind) << '\n';
  os << "params = " << join(c.law.ell_params) << '\n';
  os << "t_max = " << (c.law.t_max ? std::to_string(*c.law.t_max) : std::string("none")) << '\n';
  os << "\n[disorder]\n";
  os << "kind = " << to_string(c.disorder.kind) << '\n';
  os << "param = " << format_double(c.disorder.param) << '\n';
  os << "seed = " << c.disorder.seed << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  // the output path is where the artifact lives, not what it contains
  ExperimentConfig canon = config;
  canon.output.clear();
  const std::string text = serialize(canon);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::uint64_t config_key(const ExperimentConfig& config) {
  const auto h = config_hash(config);
  std::uint64_t key = 0;
  std::from_chars(h.data(), h.data() + 16, key, 16);
  return key;
}

LawSpec parse_law(const std::string& text_or_path) {
  if (text_or_path.find('=') == std::string::npos) {
    std::ifstream in(text_or_path);
    if (!in) throw ConfigError("law", "cannot open '" + text_or_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto secs = read_sections(ss.str());
    std::string inline_form;
    if (const auto it = secs.find("law"); it != secs.end())
      for (const auto& [k, v] : it->second)
        inline_form += k + "=" + boost::replace_all_copy(v, ",", ";") + ",";
    if (inline_form.empty()) throw ConfigError("law", "no [law] section in '" + text_or_path + "'");
    return parse_law(inline_form);
  }
  // inline: key=value pairs separated by ','; list values use ';'
  LawSpec law;
  std::vector<std::string> parts;
  boost::split(parts, text_or_path, boost::is_any_of(","));
  for (const auto& raw : parts) {
    const auto part = boost::trim_copy(raw);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("law", "expected key=value, got '" + part + "'");
    const auto key = boost::trim_copy(part.substr(0, eq));
    const auto val = boost::trim_copy(part.substr(eq + 1));
    if (key == "alpha") {
      law.alpha = parse_number<double>("law.alpha", val);
    } else if (key == "ell") {
      try {
        law.ell_kind = ell_kind_from_string(val);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("law.ell", e.what());
      }
    } else if (key == "params") {
      law.ell_params = parse_list<double>("law.params", boost::replace_all_copy(val, ";", ","));
    } else if (key == "t_max") {
      law.t_max = parse_t_max("law.t_max", val);
    } else {
      throw ConfigError("law." + key, "unknown key");
    }
  }
  check_law(law);
  return law;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto s = boost::trim_copy(text);
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(":"));
    if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:k");
    const double a = parse_number<double>("grid", parts[0]);
    const double b = parse_number<double>("grid", parts[1]);
    const auto k = parse_number<std::int64_t>("grid", parts[2]);
    if (k < 1) throw std::invalid_argument("grid needs at least one point");
    if (k == 1) return {a};
    std::vector<double> out;
    for (std::int64_t i = 0; i < k; ++i)
      out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
    return out;
  }
  try {
    return parse_list<double>("grid", s);
  } catch (const ConfigError& e) {
    throw std::invalid_argument(e.what());
  }
}

}  // namespace pinning
