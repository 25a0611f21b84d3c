#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gaussgraph/grid.hpp"
#include "json.hpp"

namespace gaussgraph {

using nlohmann::json;

namespace {

std::string boundary_rle(const GridDomain& d) {
  std::string out;
  int run = 0;
  int cur = -1;
  auto flush = [&] {
    if (run == 0) return;
    if (!out.empty()) out += ',';
    out += std::to_string(run) + "*" + std::to_string(cur);
  };
  for (int node = 0; node < d.node_count(); ++node) {
    const int b = d.is_interior(node) ? 0 : 1;
    if (b != cur) {
      flush();
      cur = b;
      run = 0;
    }
    ++run;
  }
  flush();
  return out;
}

json domain_json(const GridDomain& d) {
  const auto& g = d.geometry();
  json j;
  if (g.type == DomainType::Ball) {
    j["type"] = "ball";
    j["center"] = std::vector<double>(g.center.begin(), g.center.begin() + d.n());
    j["radius"] = g.radius;
  } else {
    j["type"] = "box";
    j["lo"] = std::vector<double>(g.lo.begin(), g.lo.begin() + d.n());
    j["hi"] = std::vector<double>(g.hi.begin(), g.hi.begin() + d.n());
  }
  return j;
}

[[noreturn]] void header_error(const std::string& path, const std::string& field, const std::string& msg) {
  fail(ErrorCode::ConfigError, path + ": line 1: field '" + field + "': " + msg);
}

template <class T> T field(const json& h, const char* name, const std::string& path) {
  if (!h.contains(name)) header_error(path, name, "missing");
  try {
    return h.at(name).get<T>();
  } catch (const json::exception& e) {
    header_error(path, name, e.what());
  }
}

}  // namespace

void write_grid_file(const std::string& path, const GraphFunction& f, const ChartSpec& chart) {
  const auto& d = *f.domain();
  json h;
  h["shape"] = std::vector<int>(d.shape().begin(), d.shape().begin() + d.n());
  h["spacing"] = std::vector<double>(d.spacing().begin(), d.spacing().begin() + d.n());
  h["chart"] = chart_id(chart);
  h["boundary"] = boundary_rle(d);
  h["domain"] = domain_json(d);
  bool any = false;
  for (double v : f.crossing_values()) any = any || v != 0.0;
  if (any) h["crossing_values"] = f.crossing_values();
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  // json serializes doubles with round-trip precision
  std::string header = h.dump();
  std::fputs(header.c_str(), fp);
  std::fputc('\n', fp);
  for (double v : f.values()) std::fprintf(fp, "%.17g\n", v);
  if (std::fclose(fp) != 0) fail(ErrorCode::IOError, "write to '" + path + "' failed");
}

GridFile read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IOError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ConfigError, path + ": line 1: empty file");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, path + ": line 1: malformed header: " + e.what());
  }
  if (!h.is_object()) fail(ErrorCode::ConfigError, path + ": line 1: header is not an object");

  GridFile out;
  try {
    out.chart = parse_chart_id(field<std::string>(h, "chart", path));
  } catch (const Error& e) {
    header_error(path, "chart", e.what());
  }
  auto shape = field<std::vector<int>>(h, "shape", path);
  auto spacing = field<std::vector<double>>(h, "spacing", path);
  auto rle = field<std::string>(h, "boundary", path);
  if (!h.contains("domain")) header_error(path, "domain", "missing");
  const json& dj = h["domain"];
  const int n = out.chart.n;
  if (static_cast<int>(shape.size()) != n) header_error(path, "shape", "length does not match chart dimension");
  std::array<int, 2> sh{shape[0], n == 2 ? shape[1] : 1};

  DomainPtr dom;
  try {
    std::string type = dj.at("type").get<std::string>();
    if (type == "ball") {
      auto c = dj.at("center").get<std::vector<double>>();
      if (static_cast<int>(c.size()) != n) header_error(path, "domain.center", "wrong length");
      dom = GridDomain::ball(n, sh, {c[0], n == 2 ? c[1] : 0.0}, dj.at("radius").get<double>());
    } else if (type == "box") {
      auto lo = dj.at("lo").get<std::vector<double>>();
      auto hi = dj.at("hi").get<std::vector<double>>();
      if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
        header_error(path, "domain.lo/hi", "wrong length");
      dom = GridDomain::box(n, sh, {lo[0], n == 2 ? lo[1] : 0.0}, {hi[0], n == 2 ? hi[1] : 0.0});
    } else {
      header_error(path, "domain.type", "unknown domain type '" + type + "'");
    }
  } catch (const json::exception& e) {
    header_error(path, "domain", e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    header_error(path, "domain", e.what());
  }
  if (static_cast<int>(spacing.size()) != n) header_error(path, "spacing", "wrong length");
  for (int k = 0; k < n; ++k)
    if (std::abs(spacing[k] - dom->spacing()[k]) > 1e-12 * std::abs(dom->spacing()[k]))
      header_error(path, "spacing", "inconsistent with shape and domain");
  if (rle != boundary_rle(*dom)) header_error(path, "boundary", "mask does not match the domain");

  out.f = GraphFunction(dom);
  if (h.contains("crossing_values")) {
    auto cv = field<std::vector<double>>(h, "crossing_values", path);
    if (cv.size() != out.f.crossing_values().size()) header_error(path, "crossing_values", "wrong length");
    out.f.crossing_values() = cv;
  }
  auto& vals = out.f.values();
  for (size_t k = 0; k < vals.size(); ++k) {
    if (!std::getline(in, line))
      fail(ErrorCode::ConfigError, path + ": line " + std::to_string(k + 2) + ": missing value");
    errno = 0;
    char* end = nullptr;
    vals[k] = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || errno == ERANGE)
      fail(ErrorCode::ConfigError, path + ": line " + std::to_string(k + 2) + ": bad number '" + line + "'");
  }
  return out;
}

}  // namespace gaussgraph
