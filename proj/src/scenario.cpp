#include "pmeflow/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pmeflow/error.hpp"
#include "pmeflow/trig.hpp"

namespace pmeflow {

namespace {

constexpr std::array<std::string_view, 7> kCheckNames{"theorem", "entropy", "lemma21", "lemma41",
                                                      "lemma42", "pressure", "mass"};

struct Entry {
  std::string raw;
  int line;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ScenarioError("scenario line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

double as_number(const Entry& e, std::string_view key) {
  double value = 0.0;
  const char* begin = e.raw.data();
  const char* end = begin + e.raw.size();
  if (!e.raw.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    fail(e.line, "'" + std::string(key) + "' expects a finite number, got " + e.raw);
  return value;
}

int as_int(const Entry& e, std::string_view key) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(e.raw.data(), e.raw.data() + e.raw.size(), value);
  if (ec != std::errc() || ptr != e.raw.data() + e.raw.size())
    fail(e.line, "'" + std::string(key) + "' expects an integer, got " + e.raw);
  return value;
}

std::uint64_t as_u64(const Entry& e, std::string_view key) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(e.raw.data(), e.raw.data() + e.raw.size(), value);
  if (ec != std::errc() || ptr != e.raw.data() + e.raw.size())
    fail(e.line, "'" + std::string(key) + "' expects an unsigned integer, got " + e.raw);
  return value;
}

std::string as_string(const Entry& e, std::string_view key) {
  if (e.raw.size() < 2 || e.raw.front() != '"' || e.raw.back() != '"')
    fail(e.line, "'" + std::string(key) + "' expects a quoted string, got " + e.raw);
  const std::string inner = e.raw.substr(1, e.raw.size() - 2);
  if (inner.find('"') != std::string::npos) fail(e.line, "stray quote in " + e.raw);
  return inner;
}

// Key/value pairs of one section, consumed by the typed readers below so
// that leftovers can be reported as unknown keys.
class Table {
 public:
  Table(std::string name, int line) : name_(std::move(name)), line_(line) {}

  void insert(std::string key, Entry entry) {
    if (entries_.count(key)) fail(entry.line, "duplicate key '" + key + "'");
    entries_.emplace(std::move(key), std::move(entry));
  }

  std::optional<Entry> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = std::move(it->second);
    entries_.erase(it);
    return e;
  }

  std::optional<double> number(const std::string& key) {
    const auto e = take(key);
    return e ? std::optional<double>(as_number(*e, key)) : std::nullopt;
  }
  std::optional<int> integer(const std::string& key) {
    const auto e = take(key);
    return e ? std::optional<int>(as_int(*e, key)) : std::nullopt;
  }
  std::optional<std::string> text(const std::string& key) {
    const auto e = take(key);
    return e ? std::optional<std::string>(as_string(*e, key)) : std::nullopt;
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    const auto& [key, entry] = *entries_.begin();
    fail(entry.line, "unknown key '" + key + "' in " + name_);
  }

  int line() const noexcept { return line_; }

 private:
  std::string name_;
  int line_;
  std::map<std::string, Entry> entries_;
};

template <class Enum, std::size_t N>
Enum pick(const std::array<std::pair<std::string_view, Enum>, N>& options, const std::string& value,
          int line, std::string_view key) {
  for (const auto& [name, e] : options)
    if (name == value) return e;
  std::string list;
  for (const auto& [name, e] : options) list += (list.empty() ? "" : "|") + std::string(name);
  fail(line, "'" + std::string(key) + "' must be one of " + list + ", got \"" + value + "\"");
}

void read_manifold(Table& t, Scenario& s) {
  auto& m = s.manifold;
  if (auto kind = t.text("kind"))
    m.kind = pick(std::array{std::pair{std::string_view("circle"), ManifoldKind::circle},
                             std::pair{std::string_view("torus2"), ManifoldKind::torus2}},
                  *kind, t.line(), "kind");
  if (auto v = t.number("length")) m.lengths = {*v, *v};
  if (auto v = t.number("length_y")) m.lengths[1] = *v;
  if (auto v = t.integer("points")) m.points = {*v, *v};
  if (auto v = t.integer("points_y")) m.points[1] = *v;
  std::string phi = t.text("phi").value_or("zero");
  const auto amplitude = t.number("phi_amplitude");
  const auto file = t.text("phi_file");
  m.phi.kind = pick(std::array{std::pair{std::string_view("zero"), WeightKind::zero},
                               std::pair{std::string_view("constant"), WeightKind::constant},
                               std::pair{std::string_view("sin"), WeightKind::sin_first},
                               std::pair{std::string_view("file"), WeightKind::samples}},
                    phi, t.line(), "phi");
  m.phi.amplitude = amplitude.value_or(0.0);
  if (m.phi.kind == WeightKind::samples) {
    if (!file) fail(t.line(), "phi = \"file\" needs phi_file");
    s.phi_file = *file;
  } else if (file) {
    fail(t.line(), "phi_file is only allowed with phi = \"file\"");
  }
  t.reject_leftovers();
}

void read_initial(Table& t, Scenario& s) {
  auto& in = s.initial;
  if (auto kind = t.text("kind"))
    in.kind = pick(std::array{std::pair{std::string_view("constant"), InitialKind::constant},
                              std::pair{std::string_view("cosine"), InitialKind::cosine},
                              std::pair{std::string_view("random_trig"), InitialKind::random_trig},
                              std::pair{std::string_view("file"), InitialKind::file}},
                   *kind, t.line(), "kind");
  if (auto v = t.number("base")) in.base = *v;
  if (auto v = t.number("amplitude")) in.amplitude = *v;
  if (auto v = t.integer("mode")) in.mode = *v;
  if (auto v = t.integer("max_mode")) in.max_mode = *v;
  if (auto v = t.text("file")) in.file = *v;
  if (in.kind == InitialKind::file && in.file.empty())
    fail(t.line(), "initial kind \"file\" needs file");
  t.reject_leftovers();
}

void read_solver(Table& t, Scenario& s) {
  auto& c = s.solver;
  if (auto v = t.number("p")) c.p = *v;
  if (auto scheme = t.text("scheme"))
    c.scheme = pick(std::array{std::pair{std::string_view("euler"), TimeScheme::explicit_euler},
                               std::pair{std::string_view("rk4"), TimeScheme::rk4}},
                    *scheme, t.line(), "scheme");
  if (auto v = t.number("dt")) c.dt = *v;
  if (auto v = t.number("cfl")) c.cfl_fraction = *v;
  if (auto v = t.number("t_end")) c.t_end = *v;
  if (auto v = t.number("floor")) c.positivity_floor = *v;
  if (auto v = t.integer("stride")) c.snapshot_stride = *v;
  t.reject_leftovers();
}

void read_check(Table& t, Scenario& s) {
  CheckSpec c;
  const auto kind = t.text("kind");
  if (!kind) fail(t.line(), "[[check]] needs kind");
  c.kind = CheckKind::theorem;
  bool known = false;
  for (std::size_t i = 0; i < kCheckNames.size(); ++i)
    if (kCheckNames[i] == *kind) {
      c.kind = static_cast<CheckKind>(i);
      known = true;
    }
  if (!known) fail(t.line(), "unknown check kind \"" + *kind + "\"");
  c.id = t.text("id").value_or("");
  if (auto th = t.text("theorem")) {
    c.theorem = parse_theorem(*th);
    if (!c.theorem) fail(t.line(), "unknown theorem \"" + *th + "\" (expected 1.1 ... 1.7)");
  }
  if (c.kind == CheckKind::theorem && !c.theorem) fail(t.line(), "theorem check needs theorem");
  if (c.kind != CheckKind::theorem && c.theorem)
    fail(t.line(), "theorem is only allowed for kind = \"theorem\"");
  c.p = t.number("p");
  c.alpha = t.number("alpha");
  c.m = t.number("m");
  c.eps = t.number("eps");
  c.eps1 = t.number("eps1");
  c.eps2 = t.number("eps2");
  c.t_check_min = t.number("t_check_min");
  c.tol = t.number("tol");
  t.reject_leftovers();
  s.checks.push_back(std::move(c));
}

bool valid_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  });
}

void assign_ids(Scenario& s) {
  std::set<std::string> used;
  for (const auto& c : s.checks)
    if (!c.id.empty()) {
      if (!valid_id(c.id)) throw ScenarioError("check id \"" + c.id + "\" must be [A-Za-z0-9_.-]");
      if (!used.insert(c.id).second) throw ScenarioError("duplicate check id \"" + c.id + "\"");
    }
  for (auto& c : s.checks) {
    if (!c.id.empty()) continue;
    const std::string stem = c.theorem ? "T" + std::string(to_string(*c.theorem))
                                       : std::string(to_string(c.kind));
    std::string id = stem;
    for (int k = 2; used.count(id); ++k) id = stem + "_" + std::to_string(k);
    used.insert(id);
    c.id = id;
  }
}

}  // namespace

std::string_view to_string(CheckKind kind) noexcept {
  return kCheckNames[static_cast<std::size_t>(kind)];
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;

  std::vector<std::pair<std::string, Table>> tables;
  tables.emplace_back("", Table("top level", 0));
  std::set<std::string> seen_sections;

  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const std::string_view body = trim(strip_comment(raw_line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      const bool array = body.starts_with("[[");
      const std::size_t open = array ? 2 : 1;
      if (body.size() < 2 * open + 1 || body.substr(body.size() - open) != (array ? "]]" : "]"))
        fail(line, "malformed section header");
      const std::string name(trim(body.substr(open, body.size() - 2 * open)));
      if (array) {
        if (name != "check") fail(line, "unknown array section [[" + name + "]]");
      } else {
        if (name != "manifold" && name != "initial" && name != "solver")
          fail(line, "unknown section [" + name + "]");
        if (!seen_sections.insert(name).second) fail(line, "duplicate section [" + name + "]");
      }
      tables.emplace_back(name, Table("[" + name + "]", line));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty() || value.empty()) fail(line, "expected key = value");
    tables.back().second.insert(key, Entry{value, line});
  }

  for (auto& [name, table] : tables) {
    if (name.empty()) {
      const auto schema = table.take("schema");
      if (!schema) throw ScenarioError("scenario: missing schema");
      s.schema = as_int(*schema, "schema");
      if (s.schema != kScenarioSchema)
        fail(schema->line, "schema version " + std::to_string(s.schema) + " not supported (expected " +
                               std::to_string(kScenarioSchema) + ")");
      s.name = table.text("name").value_or("scenario");
      if (const auto seed = table.take("seed")) s.seed = as_u64(*seed, "seed");
      s.output = table.text("output").value_or("");
      table.reject_leftovers();
    } else if (name == "manifold") {
      read_manifold(table, s);
    } else if (name == "initial") {
      read_initial(table, s);
    } else if (name == "solver") {
      read_solver(table, s);
    } else {
      read_check(table, s);
    }
  }

  if (s.initial.kind == InitialKind::random_trig && !s.seed)
    throw ScenarioError("scenario: seed is required for random_trig initial data");
  assign_ids(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.parent_path());
}

std::vector<double> read_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw ScenarioError(path.string() + ": not a number: " + token);
    values.push_back(v);
  }
  return values;
}

ManifoldPtr build_manifold(const Scenario& s) {
  ManifoldSpec spec = s.manifold;
  if (spec.phi.kind == WeightKind::samples && spec.phi.samples.empty())
    spec.phi.samples = read_values(s.base_dir / s.phi_file);
  return Manifold::create(std::move(spec));
}

ScalarField build_initial(const Scenario& s, const ManifoldPtr& man) {
  const InitialSpec& in = s.initial;
  switch (in.kind) {
    case InitialKind::constant:
      return ScalarField::constant(man, in.base);
    case InitialKind::cosine: {
      const double L = man->length(0);
      return ScalarField::sample(man, [&](double x, double) {
        return in.base + in.amplitude * std::cos(2.0 * std::numbers::pi * in.mode * x / L);
      });
    }
    case InitialKind::random_trig: {
      if (in.max_mode < 1) throw ParameterError("random_trig needs max_mode >= 1");
      const auto poly = TrigPolynomial::random(man->dimension(), {man->length(0), man->length(1)},
                                               in.max_mode, s.seed.value(), in.base, in.amplitude);
      return poly.sample(man);
    }
    case InitialKind::file:
      return ScalarField(man, read_values(s.base_dir / in.file));
  }
  throw ParameterError("unknown initial kind");
}

}  // namespace pmeflow
