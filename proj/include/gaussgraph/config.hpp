#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaussgraph/solver.hpp"

namespace gaussgraph {

// One run, read from a JSON object. Unknown keys are rejected.
struct RunConfig {
  struct Chart {
    std::string kind;  // euclidean | hyperbolic | epsilon_family
    int n = 2;
    double D = 0.5;
    double epsilon = 0.1;
    bool normalized = true;
  } chart;

  struct Domain {
    std::string type;  // ball | box
    std::array<int, 2> shape{65, 65};
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.5;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
  } domain;

  struct Problem {
    std::optional<double> k;
    std::optional<double> k_start;   // path start; default from the barrier
    std::string barrier = "none";    // none | sphere_cap
    double barrier_k = 1.0;
    double eps_gap = 0.05;
  } problem;

  struct Solver {
    std::string method = "continuation";  // continuation | newton
    NewtonOptions newton;
    ContinuationOptions path;
    std::uint64_t seed = 0;
    double perturbation = 0.0;
    std::string init = "zero";  // zero | paraboloid | cap | file
    double init_a = 0.25;       // paraboloid coefficient
    double init_k = 0.0;        // cap curvature
    std::string init_path;
  } solver;

  struct Output {
    std::string dir = "out";
  } output;

  struct Input {
    std::string grid;
    std::string barrier;
  } input;

  struct Validate {
    double alpha = 2.0;
    double cutoff_inner = 0.3;
    double cutoff_outer = 0.8;
    double sandwich_tol = 1e-8;
    double residual_tol = 1e-8;
    bool stability = true;
    bool pogorelov = true;
  } validate;

  struct Sweep {
    std::vector<int> shapes{17, 33, 65};
  } sweep;

  std::string source;  // file the config came from, for messages

  ChartSpec chart_spec() const;
  DomainPtr make_domain() const;  // uses domain.shape
  DomainPtr make_domain(int points) const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// Required-key checks per command; throw ConfigError naming the key.
void require_solve_keys(const RunConfig& c);

}  // namespace gaussgraph
