#include "quadent/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace quadent {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, origin + ": field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& j) { return j.type_name(); }

// Typed access to one JSON object that rejects unknown keys.
class Node {
 public:
  Node(const json& j, std::string path, const std::string& origin) : j_(j), path_(std::move(path)), origin_(origin) {
    if (!j_.is_object()) fail(origin_, path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j_));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) const {
    used_.insert(key);
    return j_.at(key);
  }

  Node child(const std::string& key) const { return Node(raw(key), join(path_, key), origin_); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) fail(origin_, join(path_, key), "expected a number, got " + type_name(v));
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(origin_, join(path_, key), "expected an integer, got " + type_name(v));
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(origin_, join(path_, key), "expected true or false, got " + type_name(v));
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(origin_, join(path_, key), "expected a string, got " + type_name(v));
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = raw(key);
    if (!v.is_array()) fail(origin_, join(path_, key), "expected an array of numbers");
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(origin_, join(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) fail(origin_, join(path_, key), "expected an array of integers");
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        fail(origin_, join(path_, key) + "[" + std::to_string(i) + "]", "expected an integer");
      }
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  Matrix matrix(const std::string& key) const { return parse_matrix(raw(key), join(path_, key)); }

  std::vector<Matrix> matrices(const std::string& key) const {
    std::vector<Matrix> out;
    if (!has(key)) return out;
    const json& v = raw(key);
    if (!v.is_array()) fail(origin_, join(path_, key), "expected an array of matrix blocks");
    for (size_t i = 0; i < v.size(); ++i) out.push_back(parse_matrix(v[i], join(path_, key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(origin_, join(path_, it.key()), "unknown key");
    }
  }

  const std::string& path() const { return path_; }
  const std::string& origin() const { return origin_; }

 private:
  Matrix parse_matrix(const json& v, const std::string& path) const {
    if (!v.is_object()) fail(origin_, path, "expected a matrix block {rows, cols, data}");
    Node block(v, path, origin_);
    const int rows = block.integer("rows", -1);
    const int cols = block.integer("cols", -1);
    if (rows <= 0 || cols <= 0) fail(origin_, path, "rows and cols must be positive integers");
    const std::vector<double> data = block.numbers("data");
    block.finish();
    if (static_cast<long long>(data.size()) != static_cast<long long>(rows) * cols) {
      fail(origin_, path + ".data", "holds " + std::to_string(data.size()) + " entries, expected " +
                                        std::to_string(rows * cols) + " (row-major)");
    }
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
    }
    return m;
  }

  const json& j_;
  std::string path_;
  const std::string& origin_;
  mutable std::set<std::string> used_;
};

json matrix_block(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json vector_array(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const char* kind_name(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::Builtin: return "builtin";
    case HamiltonianKind::Constant: return "constant";
    case HamiltonianKind::Fourier: return "fourier";
    case HamiltonianKind::Piecewise: return "piecewise";
  }
  return "builtin";
}

int square_modes(const Matrix& m, const Node& at, const std::string& key) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    fail(at.origin(), join(at.path(), key), "must be a square matrix of even dimension");
  }
  return static_cast<int>(m.rows() / 2);
}

HamiltonianSpec parse_hamiltonian(const Node& n, int& modes) {
  HamiltonianSpec h;
  const std::string kind = n.string("kind", "builtin");
  if (kind == "builtin") {
    h.kind = HamiltonianKind::Builtin;
    h.builtin = n.string("name", "");
    if (h.builtin.empty()) fail(n.origin(), join(n.path(), "name"), "builtin Hamiltonian needs a name");
    if (n.has("params")) {
      const Node p = n.child("params");
      const json& raw = n.raw("params");
      for (auto it = raw.begin(); it != raw.end(); ++it) h.params[it.key()] = p.number(it.key(), 0.0);
      p.finish();
    }
    modes = 0;
  } else if (kind == "constant") {
    h.kind = HamiltonianKind::Constant;
    h.constant = n.matrix("h");
    modes = square_modes(h.constant, n, "h");
  } else if (kind == "fourier") {
    h.kind = HamiltonianKind::Fourier;
    h.fourier.omega = n.number("omega", 1.0);
    if (!(h.fourier.omega > 0.0)) fail(n.origin(), join(n.path(), "omega"), "must be positive");
    h.fourier.h0 = n.matrix("h0");
    modes = square_modes(h.fourier.h0, n, "h0");
    h.fourier.cos_terms = n.matrices("cos");
    h.fourier.sin_terms = n.matrices("sin");
    for (const auto* list : {&h.fourier.cos_terms, &h.fourier.sin_terms}) {
      for (const Matrix& m : *list) {
        if (m.rows() != 2 * modes || m.cols() != 2 * modes) {
          fail(n.origin(), n.path(), "all Fourier coefficients must match h0's dimension");
        }
      }
    }
  } else if (kind == "piecewise") {
    h.kind = HamiltonianKind::Piecewise;
    h.piecewise.periodic = n.boolean("periodic", true);
    const json& segs = n.raw("segments");
    const std::string path = join(n.path(), "segments");
    if (!segs.is_array() || segs.empty()) fail(n.origin(), path, "expected a non-empty array");
    modes = 0;
    for (size_t i = 0; i < segs.size(); ++i) {
      const Node s(segs[i], path + "[" + std::to_string(i) + "]", n.origin());
      const double d = s.number("duration", -1.0);
      if (!(d > 0.0)) fail(n.origin(), s.path() + ".duration", "must be positive");
      Matrix m = s.matrix("h");
      const int k = square_modes(m, s, "h");
      if (modes != 0 && k != modes) fail(n.origin(), s.path() + ".h", "dimension differs from earlier segments");
      modes = k;
      s.finish();
      h.piecewise.durations.push_back(d);
      h.piecewise.segments.push_back(std::move(m));
    }
  } else {
    fail(n.origin(), join(n.path(), "kind"), "unknown kind '" + kind + "' (builtin, constant, fourier, piecewise)");
  }
  if (n.has("linear")) {
    const std::vector<double> f = n.numbers("linear");
    h.linear = Eigen::Map<const Vector>(f.data(), static_cast<Eigen::Index>(f.size()));
  }
  n.finish();
  return h;
}

StateSpec parse_state(const Node& n) {
  StateSpec s;
  const std::string kind = n.string("kind", "gaussian");
  if (kind == "gaussian") {
    s.kind = StateKind::Gaussian;
    if (n.has("covariance")) s.covariance = n.matrix("covariance");
  } else if (kind == "fock") {
    s.kind = StateKind::Fock;
    s.fock_name = n.string("name", "vacuum");
    s.cutoff = n.integer("cutoff", 20);
    s.occupations = n.integers("occupations", {});
    s.alpha = n.numbers("alpha");
    s.cat_mode = n.integer("cat_mode", 0);
    if (n.has("terms")) {
      const json& terms = n.raw("terms");
      const std::string path = join(n.path(), "terms");
      if (!terms.is_array()) fail(n.origin(), path, "expected an array");
      for (size_t i = 0; i < terms.size(); ++i) {
        const Node t(terms[i], path + "[" + std::to_string(i) + "]", n.origin());
        FockTerm term;
        term.occupations = t.integers("occupations", {});
        term.re = t.number("re", 0.0);
        term.im = t.number("im", 0.0);
        t.finish();
        s.terms.push_back(std::move(term));
      }
    }
    static const std::set<std::string> known{"vacuum", "basis", "coherent", "cat", "superposition"};
    if (!known.count(s.fock_name)) fail(n.origin(), join(n.path(), "name"), "unknown Fock state '" + s.fock_name + "'");
  } else {
    fail(n.origin(), join(n.path(), "kind"), "unknown kind '" + kind + "' (gaussian, fock)");
  }
  n.finish();
  return s;
}

ScenarioConfig from_json(const json& root, const std::string& origin) {
  const Node n(root, "", origin);
  ScenarioConfig cfg;
  cfg.name = n.string("name", cfg.name);
  cfg.description = n.string("description", "");
  if (!n.has("hamiltonian")) fail(origin, "hamiltonian", "missing");
  int modes = 0;
  cfg.hamiltonian = parse_hamiltonian(n.child("hamiltonian"), modes);
  cfg.modes = modes;
  cfg.subsystem = n.integers("subsystem", cfg.subsystem);
  if (n.has("state")) cfg.state = parse_state(n.child("state"));

  if (n.has("run")) {
    const Node r = n.child("run");
    cfg.run.horizon = r.number("horizon", cfg.run.horizon);
    cfg.run.dt = r.number("dt", cfg.run.dt);
    cfg.run.samples = r.integer("samples", cfg.run.samples);
    cfg.run.window_start = r.number("window_start", cfg.run.window_start);
    cfg.run.bounds = r.boolean("bounds", cfg.run.bounds);
    cfg.run.gss_times = r.numbers("gss_times");
    cfg.run.log_growth = r.boolean("log_growth", cfg.run.log_growth);
    cfg.run.analysis = r.string("analysis", cfg.run.analysis);
    cfg.run.eps = r.number("eps", cfg.run.eps);
    r.finish();
  }
  if (n.has("oracle")) {
    const Node o = n.child("oracle");
    cfg.oracle.enabled = o.boolean("enabled", cfg.oracle.enabled);
    cfg.oracle.horizon = o.number("horizon", cfg.oracle.horizon);
    cfg.oracle.dt = o.number("dt", cfg.oracle.dt);
    cfg.oracle.samples = o.integer("samples", cfg.oracle.samples);
    cfg.oracle.leak_ceiling = o.number("leak_ceiling", cfg.oracle.leak_ceiling);
    cfg.oracle.max_dimension = static_cast<long long>(o.number("max_dimension", static_cast<double>(cfg.oracle.max_dimension)));
    o.finish();
  }
  if (n.has("output")) {
    const Node o = n.child("output");
    cfg.output.csv = o.string("csv", "");
    cfg.output.report = o.string("report", "");
    cfg.output.json = o.string("json", "");
    o.finish();
  }
  if (n.has("tolerances")) {
    const Node t = n.child("tolerances");
    auto& tol = cfg.tolerances;
    tol.defect_ceiling = t.number("defect_ceiling", tol.defect_ceiling);
    tol.lyapunov_threshold = t.number("lyapunov_threshold", tol.lyapunov_threshold);
    tol.exponent_rel = t.number("exponent_rel", tol.exponent_rel);
    tol.slope_rel = t.number("slope_rel", tol.slope_rel);
    tol.oracle_rel = t.number("oracle_rel", tol.oracle_rel);
    tol.corridor_slack = t.number("corridor_slack", tol.corridor_slack);
    t.finish();
  }
  n.finish();

  if (!(cfg.run.horizon > 0.0)) fail(origin, "run.horizon", "must be positive");
  if (!(cfg.run.dt > 0.0)) fail(origin, "run.dt", "must be positive");
  if (cfg.run.samples < 4) fail(origin, "run.samples", "need at least 4 samples");
  if (!(cfg.run.window_start >= 0.0 && cfg.run.window_start < 1.0)) fail(origin, "run.window_start", "must lie in [0, 1)");
  for (double t : cfg.run.gss_times) {
    if (!(t > 0.0)) fail(origin, "run.gss_times", "times must be positive");
  }
  if (cfg.run.analysis != "quantum" && cfg.run.analysis != "classical_mi") {
    fail(origin, "run.analysis", "must be 'quantum' or 'classical_mi'");
  }
  if (!(cfg.run.eps > 0.0)) fail(origin, "run.eps", "must be positive");
  if (!(cfg.oracle.dt > 0.0)) fail(origin, "oracle.dt", "must be positive");
  if (cfg.oracle.samples < 1) fail(origin, "oracle.samples", "must be positive");
  if (cfg.oracle.horizon < 0.0) fail(origin, "oracle.horizon", "must not be negative");
  if (cfg.modes > 0) {
    if (cfg.hamiltonian.linear.size() != 0 && cfg.hamiltonian.linear.size() != 2 * cfg.modes) {
      fail(origin, "hamiltonian.linear", "length must be twice the mode count");
    }
    std::set<int> seen;
    for (int m : cfg.subsystem) {
      if (m < 0 || m >= cfg.modes || !seen.insert(m).second) fail(origin, "subsystem", "mode indices must be distinct and in range");
    }
    if (cfg.state.kind == StateKind::Gaussian && cfg.state.covariance.size() != 0 &&
        (cfg.state.covariance.rows() != 2 * cfg.modes || cfg.state.covariance.cols() != 2 * cfg.modes)) {
      fail(origin, "state.covariance", "dimension must be twice the mode count");
    }
  }
  if (cfg.subsystem.empty()) fail(origin, "subsystem", "must name at least one mode");
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json h{{"kind", kind_name(cfg.hamiltonian.kind)}};
  switch (cfg.hamiltonian.kind) {
    case HamiltonianKind::Builtin: {
      h["name"] = cfg.hamiltonian.builtin;
      json params = json::object();
      for (const auto& [k, v] : cfg.hamiltonian.params) params[k] = v;
      h["params"] = params;
      break;
    }
    case HamiltonianKind::Constant:
      h["h"] = matrix_block(cfg.hamiltonian.constant);
      break;
    case HamiltonianKind::Fourier: {
      h["omega"] = cfg.hamiltonian.fourier.omega;
      h["h0"] = matrix_block(cfg.hamiltonian.fourier.h0);
      json c = json::array(), s = json::array();
      for (const Matrix& m : cfg.hamiltonian.fourier.cos_terms) c.push_back(matrix_block(m));
      for (const Matrix& m : cfg.hamiltonian.fourier.sin_terms) s.push_back(matrix_block(m));
      h["cos"] = c;
      h["sin"] = s;
      break;
    }
    case HamiltonianKind::Piecewise: {
      h["periodic"] = cfg.hamiltonian.piecewise.periodic;
      json segs = json::array();
      for (size_t i = 0; i < cfg.hamiltonian.piecewise.segments.size(); ++i) {
        segs.push_back({{"duration", cfg.hamiltonian.piecewise.durations[i]},
                        {"h", matrix_block(cfg.hamiltonian.piecewise.segments[i])}});
      }
      h["segments"] = segs;
      break;
    }
  }
  if (cfg.hamiltonian.linear.size() > 0) h["linear"] = vector_array(cfg.hamiltonian.linear);

  json state;
  if (cfg.state.kind == StateKind::Gaussian) {
    state["kind"] = "gaussian";
    if (cfg.state.covariance.size() > 0) state["covariance"] = matrix_block(cfg.state.covariance);
  } else {
    state["kind"] = "fock";
    state["name"] = cfg.state.fock_name;
    state["cutoff"] = cfg.state.cutoff;
    state["occupations"] = cfg.state.occupations;
    state["alpha"] = cfg.state.alpha;
    state["cat_mode"] = cfg.state.cat_mode;
    json terms = json::array();
    for (const auto& t : cfg.state.terms) terms.push_back({{"occupations", t.occupations}, {"re", t.re}, {"im", t.im}});
    state["terms"] = terms;
  }

  const auto& r = cfg.run;
  const auto& o = cfg.oracle;
  const auto& t = cfg.tolerances;
  return json{
      {"name", cfg.name},
      {"description", cfg.description},
      {"hamiltonian", h},
      {"subsystem", cfg.subsystem},
      {"state", state},
      {"run",
       {{"horizon", r.horizon},
        {"dt", r.dt},
        {"samples", r.samples},
        {"window_start", r.window_start},
        {"bounds", r.bounds},
        {"gss_times", r.gss_times},
        {"log_growth", r.log_growth},
        {"analysis", r.analysis},
        {"eps", r.eps}}},
      {"oracle",
       {{"enabled", o.enabled},
        {"horizon", o.horizon},
        {"dt", o.dt},
        {"samples", o.samples},
        {"leak_ceiling", o.leak_ceiling},
        {"max_dimension", o.max_dimension}}},
      {"output", {{"csv", cfg.output.csv}, {"report", cfg.output.report}, {"json", cfg.output.json}}},
      {"tolerances",
       {{"defect_ceiling", t.defect_ceiling},
        {"lyapunov_threshold", t.lyapunov_threshold},
        {"exponent_rel", t.exponent_rel},
        {"slope_rel", t.slope_rel},
        {"oracle_rel", t.oracle_rel},
        {"corridor_slack", t.corridor_slack}}},
  };
}

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ConfigError,
                origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" + e.what() + ")");
  }
}

void apply_override(json& root, const std::string& spec, const std::string& origin) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::ConfigError, origin + ": override '" + spec + "' is not key.path=value");
  }
  const std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &root;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> keys;
  while (std::getline(parts, part, '.')) keys.push_back(part);
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].empty()) throw Error(ErrorCode::ConfigError, origin + ": override key '" + key + "' has an empty part");
    if (!node->is_object()) {
      throw Error(ErrorCode::ConfigError, origin + ": override '" + key + "' descends into a non-object");
    }
    node = &(*node)[keys[i]];
  }
  *node = value;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  return from_json(parse_text(text, origin), origin);
}

ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
  json root = parse_text(text, origin);
  for (const auto& o : overrides) apply_override(root, o, origin);
  return from_json(root, origin);
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides, path);
}

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const ScenarioConfig& cfg) {
  ScenarioConfig experiment = cfg;
  experiment.output = {};
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_config(experiment)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace quadent
