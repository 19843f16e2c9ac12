#include "curvcheck/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace curvcheck {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string msg = "invalid configuration:";
  for (const auto& i : issues) msg += "\n  " + (i.path.empty() ? std::string("<file>") : i.path) + ": " + i.message;
  return msg;
}

class Loader {
 public:
  Loader(const std::string& text, const std::string& name) {
    cfg_.name = name;
    cfg_.source = text;
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree_);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("line " + std::to_string(e.line()), e.message());
    }
  }

  ManifoldConfig run() {
    for (const auto& [section, _] : tree_) {
      static const std::vector<std::string> known{"chart",     "metric",   "vectors", "forms",  "frame",
                                                  "structure", "sampling", "soliton", "example"};
      if (std::find(known.begin(), known.end(), section) == known.end()) issue(section, "unknown section");
    }
    if (!load_chart()) throw ConfigError(issues_);
    load_metric();
    load_fields("vectors", cfg_.vectors);
    load_forms();
    load_fields("frame", cfg_.frame);
    if (!cfg_.frame.empty() && cfg_.frame.size() != cfg_.dim()) {
      issue("frame", "needs exactly " + std::to_string(cfg_.dim()) + " vectors");
    }
    load_structure();
    load_sampling();
    load_soliton();
    if (auto ex = tree_.get_child_optional("example")) {
      for (const auto& [k, v] : *ex) cfg_.example.emplace_back(k, v.data());
    }
    if (!issues_.empty()) throw ConfigError(issues_);
    return std::move(cfg_);
  }

 private:
  void issue(std::string path, std::string message) { issues_.push_back({std::move(path), std::move(message)}); }

  const pt::ptree* section(const std::string& name) const {
    auto s = tree_.get_child_optional(name);
    return s ? &*s : nullptr;
  }

  std::optional<Expr> expr(const std::string& path, const std::string& text) {
    try {
      return parse(text, cfg_.chart.coords);
    } catch (const ParseError& e) {
      issue(path, std::string(e.what()) + " in '" + text + "'");
      return std::nullopt;
    }
  }

  std::optional<double> number(const std::string& path, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
      issue(path, "expected a number, got '" + text + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::size_t> coord_index(const std::string& name) const {
    const auto& names = cfg_.chart.names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  }

  bool load_chart() {
    const pt::ptree* s = section("chart");
    if (!s || !s->get_optional<std::string>("coords")) {
      issue("chart.coords", "missing");
      return false;
    }
    const auto names = split(s->get<std::string>("coords"), ',');
    try {
      cfg_.chart = Chart::make(names);
    } catch (const std::exception& e) {
      issue("chart.coords", e.what());
      return false;
    }
    if (auto ex = s->get_optional<std::string>("exclusion")) {
      if (auto e = expr("chart.exclusion", *ex)) cfg_.chart.exclusion = *e;
    }
    for (const auto& [k, _] : *s) {
      if (k != "coords" && k != "exclusion") issue("chart." + k, "unknown key");
    }
    return true;
  }

  void load_metric() {
    const std::size_t n = cfg_.dim();
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::string, Expr>> entries;
    std::set<std::pair<std::size_t, std::size_t>> unparsed;  // present but failed to parse
    const pt::ptree* s = section("metric");
    if (!s) {
      issue("metric", "missing section");
      return;
    }
    bool ok = true;
    for (const auto& [key, v] : *s) {
      const std::string path = "metric." + key;
      const auto parts = split(key, ',');
      std::optional<std::size_t> i, j;
      if (parts.size() == 2) {
        i = coord_index(parts[0]);
        j = coord_index(parts[1]);
      }
      if (!i || !j) {
        issue(path, "key must be two coordinate names 'a,b'");
        ok = false;
        continue;
      }
      const auto lo = std::minmax(*i, *j);
      auto e = expr(path, v.data());
      if (!e) {
        unparsed.insert({lo.second, lo.first});
        ok = false;
        continue;
      }
      auto it = entries.find({lo.second, lo.first});
      if (it != entries.end()) {
        if (!(it->second.second == *e)) {
          issue(path, "asymmetric metric: conflicts with " + it->second.first);
          ok = false;
        }
        continue;
      }
      entries.emplace(std::pair{lo.second, lo.first}, std::pair{path, *e});
    }
    std::vector<Expr> lower;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        auto it = entries.find({i, j});
        if (it != entries.end()) {
          lower.push_back(it->second.second);
        } else if (i == j && !unparsed.count({i, j})) {
          issue("metric." + cfg_.chart.names()[i] + "," + cfg_.chart.names()[i], "missing diagonal entry");
          ok = false;
        } else {
          lower.push_back(Expr::constant(0.0, cfg_.chart.coords));
        }
      }
    }
    if (ok) cfg_.metric = MetricField(cfg_.chart, std::move(lower));
  }

  std::optional<std::vector<Expr>> components(const std::string& path, const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != cfg_.dim()) {
      issue(path, "expected " + std::to_string(cfg_.dim()) + " components, got " + std::to_string(parts.size()));
      return std::nullopt;
    }
    std::vector<Expr> out;
    bool ok = true;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto e = expr(path + "[" + std::to_string(i) + "]", parts[i]);
      if (e) out.push_back(*e);
      ok = ok && e.has_value();
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void load_fields(const std::string& name, Named<VectorField>& out) {
    const pt::ptree* s = section(name);
    if (!s) return;
    for (const auto& [k, v] : *s) {
      if (auto c = components(name + "." + k, v.data())) out.emplace_back(k, VectorField{std::move(*c)});
    }
  }

  void load_forms() {
    const pt::ptree* s = section("forms");
    if (!s) return;
    for (const auto& [k, v] : *s) {
      if (auto c = components("forms." + k, v.data())) cfg_.forms.emplace_back(k, OneFormField{std::move(*c)});
    }
  }

  void load_structure() {
    const pt::ptree* s = section("structure");
    if (!s) return;
    const std::size_t n = cfg_.dim();
    std::vector<std::optional<std::vector<Expr>>> rows(n);
    bool ok = true;
    for (const auto& [k, v] : *s) {
      const auto idx = coord_index(k);
      if (!idx) {
        issue("structure." + k, "row key must be a coordinate name");
        ok = false;
        continue;
      }
      rows[*idx] = components("structure." + k, v.data());
      ok = ok && rows[*idx].has_value();
    }
    StructureTensorField j;
    j.n = n;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!rows[i]) {
        issue("structure." + cfg_.chart.names()[i], "missing row");
        ok = false;
        break;
      }
      for (auto& e : *rows[i]) j.components.push_back(e);
    }
    if (ok) cfg_.structure = std::move(j);
  }

  void load_sampling() {
    const pt::ptree* s = section("sampling");
    const std::size_t n = cfg_.dim();
    SampleSpec& spec = cfg_.sampling;
    if (!s) {
      issue("sampling", "missing section");
      return;
    }
    std::vector<std::optional<std::pair<double, double>>> box(n);
    for (const auto& [k, v] : *s) {
      const std::string path = "sampling." + k;
      if (k == "count") {
        auto c = number(path, v.data());
        if (c && (*c < 1 || *c != static_cast<double>(static_cast<std::size_t>(*c)))) {
          issue(path, "must be a positive integer");
        } else if (c) {
          spec.count = static_cast<std::size_t>(*c);
        }
      } else if (k == "seed") {
        std::uint64_t seed = 0;
        const std::string& t = v.data();
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), seed);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
          issue(path, "expected an unsigned 64-bit integer");
        } else {
          spec.seed = seed;
        }
      } else if (k == "points") {
        for (const auto& pt_text : split(v.data(), ';')) {
          const auto parts = split(pt_text, ',');
          if (parts.size() != n) {
            issue(path, "each point needs " + std::to_string(n) + " coordinates");
            continue;
          }
          std::vector<double> p;
          for (const auto& c : parts) {
            if (auto d = number(path, c)) p.push_back(*d);
          }
          if (p.size() == n) spec.points.push_back(std::move(p));
        }
      } else if (auto idx = coord_index(k)) {
        const auto parts = split(v.data(), ',');
        if (parts.size() != 2) {
          issue(path, "expected 'lo, hi'");
          continue;
        }
        auto lo = number(path, parts[0]);
        auto hi = number(path, parts[1]);
        if (lo && hi && !(*lo < *hi)) issue(path, "empty interval");
        if (lo && hi) box[*idx] = std::pair{*lo, *hi};
      } else {
        issue(path, "unknown key");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (box[i]) {
        spec.box.push_back(*box[i]);
      } else if (spec.points.empty()) {
        issue("sampling." + cfg_.chart.names()[i], "missing interval");
      }
    }
  }

  void load_soliton() {
    const pt::ptree* s = section("soliton");
    if (!s) return;
    SolitonSettings& st = cfg_.soliton;
    for (const auto& [k, v] : *s) {
      const std::string path = "soliton." + k;
      const std::string& t = v.data();
      try {
        if (k == "field") {
          st.field = t;
          if (!cfg_.find_vector(t)) issue(path, "no vector field named '" + t + "'");
        } else if (k == "pi") {
          st.pi = t;
          if (!cfg_.find_form(t)) issue(path, "no 1-form named '" + t + "'");
        } else if (k == "kind") {
          st.kind = parse_soliton_kind(t);
        } else if (k == "connection") {
          st.connection = parse_connection_kind(t);
        } else if (k == "p") {
          if (auto d = number(path, t)) st.p = *d;
        } else if (k == "classify_tol") {
          if (auto d = number(path, t)) st.classify_tol = *d;
        } else if (k == "residual_tol") {
          if (auto d = number(path, t)) st.residual_tol = *d;
        } else {
          issue(path, "unknown key");
        }
      } catch (const std::invalid_argument& e) {
        issue(path, e.what());
      }
    }
  }

  pt::ptree tree_;
  ManifoldConfig cfg_;
  std::vector<ConfigIssue> issues_;
};

std::string euclidean_source(std::size_t n) {
  static const std::vector<std::string> all{"x", "y", "z", "w"};
  const std::vector<std::string> c(all.begin(), all.begin() + static_cast<long>(n));
  auto list = [&](auto&& f) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? ", " : "") + f(i);
    return s;
  };
  std::string s = "[chart]\ncoords = " + list([&](std::size_t i) { return c[i]; }) + "\n\n[metric]\n";
  for (std::size_t i = 0; i < n; ++i) s += c[i] + "," + c[i] + " = 1\n";
  s += "\n[vectors]\n";
  s += "position = " + list([&](std::size_t i) { return c[i]; }) + "\n";
  static const std::vector<std::string> constants{"1", "-0.5", "2", "0.25"};
  s += "constant = " + list([&](std::size_t i) { return constants[i]; }) + "\n";
  s += "exp_position = " + list([&](std::size_t i) { return "exp(x)*" + c[i]; }) + "\n";
  s += "rotation = " + list([](std::size_t i) { return std::string(i == 0 ? "-y" : i == 1 ? "x" : "0"); }) + "\n";
  s += "\n[forms]\n";
  s += "pi = " + list([&](std::size_t i) { return std::string(i + 1 == n ? "1" : "0"); }) + "\n";
  s += "\n[sampling]\n";
  for (std::size_t i = 0; i < n; ++i) s += c[i] + " = -2, 2\n";
  s += "count = 20\nseed = 1\n\n[soliton]\nfield = position\nkind = conformal\nconnection = lc\npi = pi\np = 0\n";
  return s;
}

const std::map<std::string, std::string>& zoo() {
  static const std::map<std::string, std::string> z{
      {"euclidean2", euclidean_source(2)},
      {"euclidean3", euclidean_source(3)},
      {"euclidean4", euclidean_source(4)},
      {"hyperbolic2", R"([chart]
coords = x, y
exclusion = y

[metric]
x,x = 1/y^2
y,y = 1/y^2

[vectors]
vertical = 0, y
dilation = x, y

[forms]
pi = 1, 0

[structure]
x = 0, -1
y = 1, 0

[sampling]
x = -1, 1
y = 0.5, 2
count = 20
seed = 1

[soliton]
field = vertical
kind = conformal
connection = lc
pi = pi
p = 0
)"},
      {"sphere2", R"([chart]
coords = x, y

[metric]
x,x = 4/(1+x^2+y^2)^2
y,y = 4/(1+x^2+y^2)^2

[vectors]
position = x, y

[forms]
pi = 1, 0

[structure]
x = 0, -1
y = 1, 0

[sampling]
x = -1, 1
y = -1, 1
count = 20
seed = 1

[soliton]
field = position
kind = conformal
connection = lc
pi = pi
p = 0
)"},
      {"paper_sec5", R"([chart]
coords = x, y, z
exclusion = z

[metric]
x,x = z^-4
y,y = z^-4
z,z = 1

[frame]
e1 = z^2, 0, 0
e2 = 0, z^2, 0
e3 = 0, 0, 1

[vectors]
X = z^2, z^2, 0.5
Y = z^2, z^2, 2
W = z^2, z^2, 0.5
e3 = 0, 0, 1

[forms]
pi = 0, 0, 1

[sampling]
x = -1, 1
y = -1, 1
z = 0.5, 3
count = 20
seed = 1

[soliton]
field = Y
kind = conformal
connection = lc
pi = pi
p = 0

[example]
; X = a1 e1 + b1 e2 + c1 e3, Y = a2 e1 + b2 e2 + c2 e3, W = a3 e1 + b3 e2 + c3 e3
a1 = 1
b1 = 1
c1 = 0.5
a2 = 1
b2 = 1
c2 = 2
a3 = 1
b3 = 1
c3 = 0.5
; 3c1 g(Y,W) + 3c3 g(X,Y) - 2c2 g(X,W)
constraint_linear = 0
; (a1a2 + b1b2)/c1 + c1(b2/b1 - a2/a1 - 1), must be nonzero
constraint_bracket = 3.5
)"},
      {"flat_r2_complex", R"([chart]
coords = x, y

[metric]
x,x = 1
y,y = 1

[vectors]
position = x, y

[forms]
pi = 1, 0

[structure]
x = 0, -1
y = 1, 0

[sampling]
x = -2, 2
y = -2, 2
count = 20
seed = 1

[soliton]
field = position
kind = star
connection = lc
pi = pi
p = 0
)"},
  };
  return z;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string path, std::string message)
    : ConfigError(std::vector<ConfigIssue>{{std::move(path), std::move(message)}}) {}

const VectorField* ManifoldConfig::find_vector(const std::string& name) const {
  for (const auto& [k, v] : vectors)
    if (k == name) return &v;
  return nullptr;
}

const OneFormField* ManifoldConfig::find_form(const std::string& name) const {
  for (const auto& [k, v] : forms)
    if (k == name) return &v;
  return nullptr;
}

std::optional<FrameField> ManifoldConfig::frame_field() const {
  if (frame.empty()) return std::nullopt;
  FrameField f;
  for (const auto& [_, v] : frame) f.vectors.push_back(v);
  return f;
}

ManifoldConfig parse_config(const std::string& text, const std::string& name) { return Loader(text, name).run(); }

ManifoldConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

const std::vector<std::string>& zoo_names() {
  static const std::vector<std::string> names{"euclidean2", "euclidean3",  "euclidean4",     "hyperbolic2",
                                              "sphere2",    "paper_sec5", "flat_r2_complex"};
  return names;
}

const std::string& zoo_source(const std::string& name) {
  const auto& z = zoo();
  auto it = z.find(name);
  if (it == z.end()) throw ConfigError("zoo", "unknown zoo manifold '" + name + "'");
  return it->second;
}

ManifoldConfig zoo_config(const std::string& name) { return parse_config(zoo_source(name), name); }

}  // namespace curvcheck
