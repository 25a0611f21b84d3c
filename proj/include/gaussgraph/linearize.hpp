#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gaussgraph/kernel.hpp"

namespace gaussgraph {

// Second-order linear operator on grid functions. At interior node k:
//   (L v)_k = c0 v_k + c1 . grad v + c2 . (v_xx, v_xy, v_yy)
// with derivatives taken through the node's stencil.
struct EllipticOperator {
  struct Row {
    double c0 = 0.0;
    std::array<double, 2> c1{};
    std::array<double, 3> c2{};
  };
  DomainPtr domain;
  std::vector<Row> rows;  // interior order

  // Symmetric coefficient matrix of the second-order part at a node.
  std::array<std::array<double, 2>, 2> second_order(int interior) const;
  // Applies the operator to v, including its boundary data.
  std::vector<double> apply(const GraphFunction& v) const;
  // Matrix over interior unknowns (boundary data taken as zero).
  Eigen::SparseMatrix<double> interior_matrix() const;
  // Matrix over all nodes with identity rows on boundary nodes.
  Eigen::SparseMatrix<double> full_matrix() const;
};

// Derivative of the assembled curvature with respect to f, by forward-mode
// differentiation of the local kernel through the stencils.
EllipticOperator build_DK(const GraphFunction& f, const ChartSpec& chart);

// Per-node coefficient matrix Bn = (psi / n) Mn^{-1} in the normalized frame.
std::vector<std::array<std::array<double, 2>, 2>> build_B(const CurvatureAssembly& a);

// First- and second-order part of DK scaled by psi (the curvature-frozen
// operator of the Monge-Ampere form); no zeroth-order term.
EllipticOperator build_L(const GraphFunction& f, const ChartSpec& chart);

// Jacobi-type operator of the base hypersurface acting on normal
// displacements: -tr(A0^{-1} Hess) + tr(A0^{-1} W) - tr(A0), with W from the
// finite-difference Riemann tensor.
EllipticOperator build_JK(const ChartSpec& chart, const DomainPtr& domain);
double jacobi_zeroth_order(const ChartSpec& chart, const Point& x);

// Sparse direct solve over interior unknowns.
class InteriorSolver {
 public:
  explicit InteriorSolver(const EllipticOperator& op);
  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

struct StabilityReport {
  bool stable = false;
  double max_witness = 0.0;      // largest value of w = DK^{-1} 1
  std::vector<double> witness;   // interior order
};
StabilityReport stability_check(const GraphFunction& f, const ChartSpec& chart);

// Repeats the inverse-negativity test on random positive sources drawn from
// mt19937_64(seed), values uniform in [0.1, 1.1).
struct BatteryReport {
  int sources = 0;
  int negative = 0;          // sources whose solution is negative at every node
  double max_value = 0.0;    // largest solution value over all sources
  bool pass() const { return sources > 0 && negative == sources; }
};
BatteryReport stability_battery(const GraphFunction& f, const ChartSpec& chart, int sources = 20,
                                std::uint64_t seed = 1);

void write_triplets(const std::string& path, const Eigen::SparseMatrix<double>& m);

}  // namespace gaussgraph
