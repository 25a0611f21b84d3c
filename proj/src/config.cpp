#include "gaussgraph/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gaussgraph {

using json = nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed.
class Block {
 public:
  Block(const json* j, std::string path, const std::string& source) : j_(j), path_(std::move(path)), source_(source) {
    if (j_ && !j_->is_object()) bad(path_, "expected an object");
  }

  bool has(const char* key) const { return j_ && j_->contains(key) && !(*j_)[key].is_null(); }

  Block child(const char* key) {
    used_.insert(key);
    return Block(has(key) ? &(*j_)[key] : nullptr, name(key), source_);
  }

  template <class T> void get(const char* key, T& out) {
    used_.insert(key);
    if (!has(key)) return;
    const json& v = (*j_)[key];
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) bad(name(key), "expected true or false");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) bad(name(key), "expected a number");
        if constexpr (std::is_integral_v<T>)
          if (!v.is_number_integer()) bad(name(key), "expected an integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) bad(name(key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      bad(name(key), e.what());
    }
  }

  template <class T> void get(const char* key, std::optional<T>& out) {
    if (has(key)) {
      T v{};
      get(key, v);
      out = v;
    } else {
      used_.insert(key);
    }
  }

  template <class T, size_t N> void get(const char* key, std::array<T, N>& out, size_t min_len = N) {
    used_.insert(key);
    if (!has(key)) return;
    const json& v = (*j_)[key];
    if (!v.is_array() || v.size() < min_len || v.size() > N)
      bad(name(key), "expected an array of " + std::to_string(min_len) + (min_len == N ? "" : " to " + std::to_string(N)) +
                         " numbers");
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) bad(name(key), "expected numbers");
      out[i] = v[i].get<T>();
    }
  }

  void get(const char* key, std::vector<int>& out) {
    used_.insert(key);
    if (!has(key)) return;
    const json& v = (*j_)[key];
    if (!v.is_array() || v.empty()) bad(name(key), "expected a non-empty array of integers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) bad(name(key), "expected integers");
      out.push_back(e.get<int>());
    }
  }

  // Rejects keys nobody asked for.
  void finish() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) bad(name(it.key().c_str()), "unknown key");
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void bad(const std::string& field, const std::string& msg) const {
    fail(ErrorCode::ConfigError, source_ + ": field '" + field + "': " + msg);
  }

 private:
  const json* j_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

std::string lower_kind(const std::string& k) {
  if (k == "hyperbolic" || k == "hyperbolic_conformal") return "hyperbolic";
  if (k == "euclidean" || k == "euclidean_graph") return "euclidean";
  if (k == "epsilon_family" || k == "epsilon") return "epsilon_family";
  return k;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, source + ": " + e.what());
  }
  RunConfig c;
  c.source = source;
  Block top(&root, "", c.source);

  {
    Block b = top.child("chart");
    if (!b.has("kind")) b.bad("chart.kind", "required key missing");
    b.get("kind", c.chart.kind);
    c.chart.kind = lower_kind(c.chart.kind);
    if (c.chart.kind != "hyperbolic" && c.chart.kind != "euclidean" && c.chart.kind != "epsilon_family")
      b.bad("chart.kind", "expected euclidean, hyperbolic or epsilon_family");
    b.get("n", c.chart.n);
    b.get("D", c.chart.D);
    b.get("epsilon", c.chart.epsilon);
    b.get("normalized", c.chart.normalized);
    b.finish();
    try {
      c.chart_spec().validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, source + ": chart: " + e.what());
    }
  }
  {
    Block b = top.child("domain");
    b.get("type", c.domain.type);
    if (!c.domain.type.empty() && c.domain.type != "ball" && c.domain.type != "box")
      b.bad("domain.type", "expected ball or box");
    if (c.chart.n == 1) c.domain.shape = {65, 1};
    b.get("shape", c.domain.shape, 1);
    if (c.chart.n == 1) c.domain.shape[1] = 1;
    b.get("center", c.domain.center, 1);
    b.get("radius", c.domain.radius);
    b.get("lo", c.domain.lo, 1);
    b.get("hi", c.domain.hi, 1);
    b.finish();
  }
  {
    Block b = top.child("problem");
    b.get("k", c.problem.k);
    b.get("k_start", c.problem.k_start);
    Block bar = b.child("barrier");
    bar.get("type", c.problem.barrier);
    bar.get("k", c.problem.barrier_k);
    bar.finish();
    if (c.problem.barrier != "none" && c.problem.barrier != "sphere_cap")
      b.bad("problem.barrier.type", "expected none or sphere_cap");
    b.get("eps_gap", c.problem.eps_gap);
    b.finish();
  }
  {
    Block b = top.child("solver");
    auto& s = c.solver;
    b.get("method", s.method);
    if (s.method != "continuation" && s.method != "newton") b.bad("solver.method", "expected continuation or newton");
    b.get("tol", s.newton.tol);
    b.get("kappa", s.newton.kappa);
    b.get("max_iter", s.newton.max_iter);
    b.get("max_halvings", s.newton.max_halvings);
    b.get("dtau_init", s.path.dtau_init);
    b.get("dtau_min", s.path.dtau_min);
    b.get("dtau_max", s.path.dtau_max);
    b.get("easy_steps", s.path.easy_steps);
    std::string pred = "secant";
    b.get("predictor", pred);
    if (pred == "secant") s.path.predictor = Predictor::Secant;
    else if (pred == "previous") s.path.predictor = Predictor::Previous;
    else b.bad("solver.predictor", "expected secant or previous");
    b.get("sandwich_tol", s.path.sandwich_tol);
    b.get("seed", s.seed);
    b.get("perturbation", s.perturbation);
    if (s.perturbation < 0.0) b.bad("solver.perturbation", "must be non-negative");
    Block in = b.child("init");
    in.get("type", s.init);
    in.get("a", s.init_a);
    in.get("k", s.init_k);
    in.get("path", s.init_path);
    in.finish();
    if (s.init != "zero" && s.init != "paraboloid" && s.init != "cap" && s.init != "file")
      b.bad("solver.init.type", "expected zero, paraboloid, cap or file");
    if (s.init == "file" && s.init_path.empty()) b.bad("solver.init.path", "required when init type is file");
    s.path.newton = s.newton;
    b.finish();
  }
  {
    Block b = top.child("output");
    b.get("dir", c.output.dir);
    b.finish();
  }
  {
    Block b = top.child("input");
    b.get("grid", c.input.grid);
    b.get("barrier", c.input.barrier);
    b.finish();
  }
  {
    Block b = top.child("validate");
    auto& v = c.validate;
    b.get("alpha", v.alpha);
    b.get("cutoff_inner", v.cutoff_inner);
    b.get("cutoff_outer", v.cutoff_outer);
    b.get("sandwich_tol", v.sandwich_tol);
    b.get("residual_tol", v.residual_tol);
    b.get("stability", v.stability);
    b.get("pogorelov", v.pogorelov);
    b.finish();
  }
  {
    Block b = top.child("sweep");
    b.get("shapes", c.sweep.shapes);
    for (int s : c.sweep.shapes)
      if (s < 5) b.bad("sweep.shapes", "grids need at least 5 points per side");
    b.finish();
  }
  top.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IOError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void require_solve_keys(const RunConfig& c) {
  if (c.domain.type.empty()) fail(ErrorCode::ConfigError, c.source + ": field 'domain.type': required key missing");
  if (!c.problem.k) fail(ErrorCode::ConfigError, c.source + ": field 'problem.k': required key missing");
}

ChartSpec RunConfig::chart_spec() const {
  if (chart.kind == "hyperbolic") return ChartSpec::hyperbolic(chart.n, chart.D);
  if (chart.kind == "epsilon_family") return ChartSpec::epsilon_family(chart.n, chart.epsilon, chart.normalized);
  return ChartSpec::euclidean(chart.n);
}

DomainPtr RunConfig::make_domain() const { return make_domain(domain.shape[0]); }

DomainPtr RunConfig::make_domain(int points) const {
  const int n = chart.n;
  std::array<int, 2> shape{points, n == 2 ? points : 1};
  if (points == domain.shape[0]) shape = domain.shape;
  if (n == 1) shape[1] = 1;
  try {
    if (domain.type == "box") return GridDomain::box(n, shape, domain.lo, domain.hi);
    return GridDomain::ball(n, shape, domain.center, domain.radius);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, source + ": domain: " + e.what());
  }
}

}  // namespace gaussgraph
