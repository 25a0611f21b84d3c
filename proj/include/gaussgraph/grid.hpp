#pragma once

// Cartesian grids over a box or a ball in chart coordinates, with cut-cell
// difference stencils that sample the exact boundary crossing when a
// neighbour lies outside the domain.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gaussgraph/error.hpp"
#include "gaussgraph/geometry.hpp"

namespace gaussgraph {

enum class DomainType { Box, Ball };

struct DomainGeometry {
  DomainType type = DomainType::Ball;
  std::array<double, 2> center{};  // ball
  double radius = 1.0;             // ball
  std::array<double, 2> lo{};      // box
  std::array<double, 2> hi{};      // box
  bool operator==(const DomainGeometry&) const = default;
};

using Point = std::array<double, 2>;

struct SampleRef {
  enum Kind : unsigned char { Node, Crossing };
  Kind kind = Node;
  int index = 0;
  bool operator==(const SampleRef&) const = default;
};

// Weights of one sample in the gradient (p_0, p_1) and in the Hessian
// components (xx, xy, yy) at a node.
struct StencilEntry {
  SampleRef ref;
  std::array<double, 2> wp{};
  std::array<double, 3> wH{};
};

class GridDomain {
 public:
  static std::shared_ptr<const GridDomain> ball(int n, std::array<int, 2> shape, Point center, double radius);
  static std::shared_ptr<const GridDomain> box(int n, std::array<int, 2> shape, Point lo, Point hi);

  int n() const { return n_; }
  const std::array<int, 2>& shape() const { return shape_; }
  const std::array<double, 2>& spacing() const { return spacing_; }
  const DomainGeometry& geometry() const { return geom_; }
  int node_count() const { return shape_[0] * shape_[1]; }
  int node_index(int i, int j) const { return i * shape_[1] + j; }
  Point coord(int node) const;

  bool is_interior(int node) const { return interior_id_[node] >= 0; }
  int interior_id(int node) const { return interior_id_[node]; }
  const std::vector<int>& interior_nodes() const { return interior_; }
  int interior_count() const { return static_cast<int>(interior_.size()); }

  const std::vector<Point>& crossings() const { return crossings_; }

  std::span<const StencilEntry> stencil(int interior) const {
    return {entries_.data() + offsets_[interior], entries_.data() + offsets_[interior + 1]};
  }
  // True when the stencil reaches a boundary node or crossing point.
  bool near_boundary(int interior) const { return near_boundary_[interior] != 0; }
  // Directions whose cut-cell stencil had too few samples and were rebuilt
  // from the remaining directions.
  int degenerate_directions() const { return degenerate_; }

  // Inside test used for crossings and for the boundary mask.
  bool strictly_inside(const Point& x) const;
  bool on_boundary(const Point& x) const;

  bool same_as(const GridDomain& other) const;

 private:
  GridDomain() = default;
  void build();
  void build_stencil(int node);

  int n_ = 2;
  std::array<int, 2> shape_{1, 1};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::array<double, 2> mid_{};  // coordinate of the (fractional) middle index
  DomainGeometry geom_;
  std::vector<int> interior_id_;
  std::vector<int> interior_;
  std::vector<Point> crossings_;
  std::vector<StencilEntry> entries_;
  std::vector<int> offsets_;
  std::vector<unsigned char> near_boundary_;
  int degenerate_ = 0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

void require_same_domain(const GridDomain& a, const GridDomain& b);

// Node values plus values at the boundary crossing points. Only interior
// nodes are unknowns; boundary node values and crossing values are data.
class GraphFunction {
 public:
  GraphFunction() = default;
  explicit GraphFunction(DomainPtr domain);
  // Evaluates fn at interior nodes, nodes on the boundary and crossing points;
  // nodes outside the domain are set to zero.
  static GraphFunction from_function(DomainPtr domain, const std::function<double(const Point&)>& fn);

  const DomainPtr& domain() const { return domain_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& crossing_values() { return crossing_; }
  const std::vector<double>& crossing_values() const { return crossing_; }

  double operator[](int node) const { return values_[node]; }
  double& operator[](int node) { return values_[node]; }
  double sample(const SampleRef& r) const {
    return r.kind == SampleRef::Node ? values_[r.index] : crossing_[r.index];
  }

  // Local jet (f, gradient, Hessian xx/xy/yy) at an interior node.
  void jet(int interior, double& f, std::array<double, 2>& p, std::array<double, 3>& H) const;

  // Interior unknowns in interior order.
  std::vector<double> interior_values() const;
  void set_interior_values(std::span<const double> v);

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  std::vector<double> crossing_;
};

// Grid file: one JSON header line, then node values in row-major order.
void write_grid_file(const std::string& path, const GraphFunction& f, const ChartSpec& chart);
struct GridFile {
  ChartSpec chart;
  GraphFunction f;
};
GridFile read_grid_file(const std::string& path);

// Finite-difference weights for derivatives 0..2 at 0 from samples at s.
void fd_weights(std::span<const double> s, std::vector<double>& w1, std::vector<double>& w2);

}  // namespace gaussgraph
