#include "gaussgraph/grid.hpp"

#include <algorithm>
#include <cmath>

namespace gaussgraph {

namespace {

constexpr double kBoundaryTol = 1e-10;

struct Combo {
  std::vector<std::pair<SampleRef, double>> terms;
  void add(const SampleRef& r, double w) {
    for (auto& t : terms)
      if (t.first == r) {
        t.second += w;
        return;
      }
    terms.emplace_back(r, w);
  }
};

Combo scaled_sum(std::initializer_list<std::pair<const Combo*, double>> parts) {
  Combo out;
  for (auto& [c, s] : parts)
    for (auto& [r, w] : c->terms) out.add(r, s * w);
  return out;
}

}  // namespace

void fd_weights(std::span<const double> s, std::vector<double>& w1, std::vector<double>& w2) {
  // Fornberg's recursion at the origin, derivatives up to order 2.
  const int m = static_cast<int>(s.size());
  std::vector<std::array<double, 3>> c(m, {0.0, 0.0, 0.0});
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = s[0];
  for (int i = 1; i < m; ++i) {
    const int mn = std::min(i, 2);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = s[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = s[i] - s[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  w1.resize(m);
  w2.resize(m);
  for (int i = 0; i < m; ++i) {
    w1[i] = c[i][1];
    w2[i] = c[i][2];
  }
}

std::shared_ptr<const GridDomain> GridDomain::ball(int n, std::array<int, 2> shape, Point center, double radius) {
  if (n != 1 && n != 2) fail(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
  std::shared_ptr<GridDomain> d(new GridDomain());
  d->n_ = n;
  if (n == 1) shape[1] = 1;
  for (int k = 0; k < n; ++k)
    if (shape[k] < 3) fail(ErrorCode::InvalidArgument, "grid needs at least 3 nodes per axis");
  d->shape_ = shape;
  d->geom_.type = DomainType::Ball;
  d->geom_.center = center;
  d->geom_.radius = radius;
  if (n == 1) d->geom_.center[1] = 0.0;
  for (int k = 0; k < n; ++k) {
    d->spacing_[k] = 2.0 * radius / (shape[k] - 1);
    d->mid_[k] = d->geom_.center[k];
  }
  d->build();
  return d;
}

std::shared_ptr<const GridDomain> GridDomain::box(int n, std::array<int, 2> shape, Point lo, Point hi) {
  if (n != 1 && n != 2) fail(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  std::shared_ptr<GridDomain> d(new GridDomain());
  d->n_ = n;
  if (n == 1) {
    shape[1] = 1;
    lo[1] = hi[1] = 0.0;
  }
  for (int k = 0; k < n; ++k) {
    if (shape[k] < 3) fail(ErrorCode::InvalidArgument, "grid needs at least 3 nodes per axis");
    if (!(hi[k] > lo[k])) fail(ErrorCode::InvalidArgument, "box bounds are empty");
  }
  d->shape_ = shape;
  d->geom_.type = DomainType::Box;
  d->geom_.lo = lo;
  d->geom_.hi = hi;
  for (int k = 0; k < n; ++k) {
    d->spacing_[k] = (hi[k] - lo[k]) / (shape[k] - 1);
    d->mid_[k] = 0.5 * (lo[k] + hi[k]);
  }
  d->build();
  return d;
}

Point GridDomain::coord(int node) const {
  const int i = node / shape_[1];
  const int j = node % shape_[1];
  Point x{0.0, 0.0};
  x[0] = mid_[0] + (i - 0.5 * (shape_[0] - 1)) * spacing_[0];
  if (n_ == 2) x[1] = mid_[1] + (j - 0.5 * (shape_[1] - 1)) * spacing_[1];
  return x;
}

bool GridDomain::strictly_inside(const Point& x) const {
  if (geom_.type == DomainType::Ball) {
    double r2 = 0.0;
    for (int k = 0; k < n_; ++k) r2 += (x[k] - geom_.center[k]) * (x[k] - geom_.center[k]);
    return std::sqrt(r2) < geom_.radius * (1.0 - kBoundaryTol);
  }
  for (int k = 0; k < n_; ++k) {
    const double tol = kBoundaryTol * (geom_.hi[k] - geom_.lo[k]);
    if (!(x[k] > geom_.lo[k] + tol && x[k] < geom_.hi[k] - tol)) return false;
  }
  return true;
}

bool GridDomain::on_boundary(const Point& x) const {
  if (geom_.type == DomainType::Ball) {
    double r2 = 0.0;
    for (int k = 0; k < n_; ++k) r2 += (x[k] - geom_.center[k]) * (x[k] - geom_.center[k]);
    return std::abs(std::sqrt(r2) - geom_.radius) <= kBoundaryTol * geom_.radius;
  }
  return !strictly_inside(x);
}

void GridDomain::build() {
  const int N = node_count();
  interior_id_.assign(N, -1);
  interior_.clear();
  for (int node = 0; node < N; ++node) {
    const int i = node / shape_[1];
    const int j = node % shape_[1];
    bool inside;
    if (geom_.type == DomainType::Box) {
      inside = i > 0 && i < shape_[0] - 1 && (n_ == 1 || (j > 0 && j < shape_[1] - 1));
    } else {
      inside = strictly_inside(coord(node));
    }
    if (inside) {
      interior_id_[node] = static_cast<int>(interior_.size());
      interior_.push_back(node);
    }
  }
  offsets_.assign(1, 0);
  near_boundary_.clear();
  for (int node : interior_) build_stencil(node);
}

void GridDomain::build_stencil(int node) {
  const int i0 = node / shape_[1];
  const int j0 = node % shape_[1];
  const Point P = coord(node);
  const SampleRef self{SampleRef::Node, node};

  struct Directional {
    Combo d1, d2;
    bool degenerate = false;
  };

  auto directional = [&](int di, int dj) {
    std::vector<std::pair<double, SampleRef>> samples;
    samples.emplace_back(0.0, self);
    bool plus_one = false, minus_one = false;
    const double vx = di * spacing_[0], vy = dj * spacing_[1];
    for (int sign : {1, -1}) {
      for (int k = 1; k <= 3; ++k) {
        const int qi = i0 + sign * k * di;
        const int qj = j0 + sign * k * dj;
        const bool in_range = qi >= 0 && qi < shape_[0] && qj >= 0 && qj < shape_[1];
        if (in_range) {
          const int q = node_index(qi, qj);
          if (interior_id_[q] >= 0 || geom_.type == DomainType::Box || on_boundary(coord(q))) {
            samples.emplace_back(sign * k, SampleRef{SampleRef::Node, q});
            if (k == 1) (sign > 0 ? plus_one : minus_one) = true;
            if (interior_id_[q] >= 0) continue;
            break;
          }
        }
        // exact crossing with the sphere along the ray P + t * sign * v
        const double ux = sign * vx, uy = sign * vy;
        const double dx = P[0] - geom_.center[0], dy = (n_ == 2 ? P[1] - geom_.center[1] : 0.0);
        const double a = ux * ux + uy * uy;
        const double b = dx * ux + dy * uy;
        const double c = dx * dx + dy * dy - geom_.radius * geom_.radius;
        const double disc = std::sqrt(std::max(b * b - a * c, 0.0));
        // positive root, written to avoid cancellation
        const double t = (b > 0.0) ? -c / (b + disc) : (disc - b) / a;
        const int idx = static_cast<int>(crossings_.size());
        crossings_.push_back(Point{P[0] + t * ux, n_ == 2 ? P[1] + t * uy : 0.0});
        samples.emplace_back(sign * t, SampleRef{SampleRef::Crossing, idx});
        break;
      }
    }
    Directional out;
    std::vector<double> s, w1, w2;
    std::vector<SampleRef> refs;
    if (plus_one && minus_one) {
      for (auto& [sv, r] : samples)
        if (sv == 0.0 || sv == 1.0 || sv == -1.0) {
          s.push_back(sv);
          refs.push_back(r);
        }
    } else {
      std::stable_sort(samples.begin(), samples.end(),
                       [](const auto& a, const auto& b) { return std::abs(a.first) < std::abs(b.first); });
      const size_t m = std::min<size_t>(5, samples.size());
      for (size_t q = 0; q < m; ++q) {
        s.push_back(samples[q].first);
        refs.push_back(samples[q].second);
      }
      out.degenerate = m < 4;
    }
    fd_weights(s, w1, w2);
    for (size_t q = 0; q < s.size(); ++q) {
      out.d1.add(refs[q], w1[q]);
      out.d2.add(refs[q], w2[q]);
    }
    return out;
  };

  Combo grad[2], hess[3];
  const double h0 = spacing_[0], h1 = spacing_[1];
  if (n_ == 1) {
    auto X = directional(1, 0);
    if (X.degenerate) ++degenerate_;
    grad[0] = scaled_sum({{&X.d1, 1.0 / h0}});
    hess[0] = scaled_sum({{&X.d2, 1.0 / (h0 * h0)}});
  } else {
    Directional D[4] = {directional(1, 0), directional(0, 1), directional(1, 1), directional(1, -1)};
    int ndeg = 0;
    for (auto& d : D) ndeg += d.degenerate;
    degenerate_ += ndeg;
    const bool fix = ndeg == 1;
    grad[0] = scaled_sum({{&D[0].d1, 1.0 / h0}});
    grad[1] = scaled_sum({{&D[1].d1, 1.0 / h1}});
    if (fix && D[0].degenerate)
      hess[0] = scaled_sum({{&D[2].d2, 0.5 / (h0 * h0)}, {&D[3].d2, 0.5 / (h0 * h0)}, {&D[1].d2, -1.0 / (h0 * h0)}});
    else
      hess[0] = scaled_sum({{&D[0].d2, 1.0 / (h0 * h0)}});
    if (fix && D[1].degenerate)
      hess[2] = scaled_sum({{&D[2].d2, 0.5 / (h1 * h1)}, {&D[3].d2, 0.5 / (h1 * h1)}, {&D[0].d2, -1.0 / (h1 * h1)}});
    else
      hess[2] = scaled_sum({{&D[1].d2, 1.0 / (h1 * h1)}});
    const double q = 1.0 / (h0 * h1);
    if (fix && D[2].degenerate)
      hess[1] = scaled_sum({{&D[0].d2, 0.5 * q}, {&D[1].d2, 0.5 * q}, {&D[3].d2, -0.5 * q}});
    else if (fix && D[3].degenerate)
      hess[1] = scaled_sum({{&D[2].d2, 0.5 * q}, {&D[0].d2, -0.5 * q}, {&D[1].d2, -0.5 * q}});
    else
      hess[1] = scaled_sum({{&D[2].d2, 0.25 * q}, {&D[3].d2, -0.25 * q}});
  }

  const size_t start = entries_.size();
  auto entry_for = [&](const SampleRef& r) -> StencilEntry& {
    for (size_t e = start; e < entries_.size(); ++e)
      if (entries_[e].ref == r) return entries_[e];
    entries_.push_back(StencilEntry{r, {0.0, 0.0}, {0.0, 0.0, 0.0}});
    return entries_.back();
  };
  entry_for(self);
  for (int k = 0; k < n_; ++k)
    for (auto& [r, w] : grad[k].terms) entry_for(r).wp[k] += w;
  const int nh = n_ == 1 ? 1 : 3;
  for (int k = 0; k < nh; ++k)
    for (auto& [r, w] : hess[k].terms) entry_for(r).wH[k] += w;
  bool near = false;
  for (size_t e = start; e < entries_.size(); ++e) {
    const auto& r = entries_[e].ref;
    if (r.kind == SampleRef::Crossing || interior_id_[r.index] < 0) near = true;
  }
  near_boundary_.push_back(near ? 1 : 0);
  offsets_.push_back(static_cast<int>(entries_.size()));
}

bool GridDomain::same_as(const GridDomain& o) const {
  return n_ == o.n_ && shape_ == o.shape_ && spacing_ == o.spacing_ && geom_ == o.geom_;
}

void require_same_domain(const GridDomain& a, const GridDomain& b) {
  if (&a != &b && !a.same_as(b)) fail(ErrorCode::DomainMismatch, "grid functions live on different domains");
}

GraphFunction::GraphFunction(DomainPtr domain)
    : domain_(std::move(domain)),
      values_(domain_->node_count(), 0.0),
      crossing_(domain_->crossings().size(), 0.0) {}

GraphFunction GraphFunction::from_function(DomainPtr domain, const std::function<double(const Point&)>& fn) {
  GraphFunction g(domain);
  for (int node = 0; node < domain->node_count(); ++node) {
    const Point x = domain->coord(node);
    if (domain->is_interior(node) || domain->on_boundary(x)) g.values_[node] = fn(x);
  }
  const auto& cr = domain->crossings();
  for (size_t c = 0; c < cr.size(); ++c) g.crossing_[c] = fn(cr[c]);
  return g;
}

void GraphFunction::jet(int interior, double& f, std::array<double, 2>& p, std::array<double, 3>& H) const {
  f = values_[domain_->interior_nodes()[interior]];
  p = {0.0, 0.0};
  H = {0.0, 0.0, 0.0};
  for (const auto& e : domain_->stencil(interior)) {
    const double v = sample(e.ref);
    p[0] += e.wp[0] * v;
    p[1] += e.wp[1] * v;
    H[0] += e.wH[0] * v;
    H[1] += e.wH[1] * v;
    H[2] += e.wH[2] * v;
  }
}

std::vector<double> GraphFunction::interior_values() const {
  const auto& in = domain_->interior_nodes();
  std::vector<double> v(in.size());
  for (size_t k = 0; k < in.size(); ++k) v[k] = values_[in[k]];
  return v;
}

void GraphFunction::set_interior_values(std::span<const double> v) {
  const auto& in = domain_->interior_nodes();
  if (v.size() != in.size()) fail(ErrorCode::InvalidArgument, "interior vector has wrong length");
  for (size_t k = 0; k < in.size(); ++k) values_[in[k]] = v[k];
}

}  // namespace gaussgraph
