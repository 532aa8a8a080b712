#include "blowup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "blowup/error.hpp"
#include "delaunay.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

double tri_area(const std::array<Vec2, 3>& v) { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }

}  // namespace

// ---------------------------------------------------------------- DomainSpec

DomainSpec DomainSpec::unit_disk() { return DomainSpec{}; }

DomainSpec DomainSpec::curve(std::vector<Vec2> boundary) {
  if (boundary.size() < 3) throw Error(ErrorKind::InvalidDomain, "boundary curve needs at least 3 points");
  if ((boundary.front() - boundary.back()).norm() == 0.0) boundary.pop_back();
  const std::size_t n = boundary.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((boundary[i] - boundary[(i + 1) % n]).norm() == 0.0)
      throw Error(ErrorKind::InvalidDomain, "repeated boundary point");
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(boundary[i], boundary[(i + 1) % n], boundary[j], boundary[(j + 1) % n]))
        throw Error(ErrorKind::InvalidDomain, "boundary curve is not simple");
    }
  }
  if (signed_area(boundary) < 0.0) std::reverse(boundary.begin(), boundary.end());
  DomainSpec d;
  d.kind_ = DomainKind::BoundaryCurve;
  d.boundary_ = std::move(boundary);
  return d;
}

bool DomainSpec::contains(const Vec2& p) const {
  if (kind_ == DomainKind::UnitDisk) return p.squaredNorm() < 1.0;
  bool in = false;
  const std::size_t n = boundary_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = boundary_[i];
    const Vec2& b = boundary_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

double DomainSpec::distance_to_boundary(const Vec2& p) const {
  if (kind_ == DomainKind::UnitDisk) return std::abs(1.0 - p.norm());
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = boundary_.size();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, segment_distance(p, boundary_[i], boundary_[(i + 1) % n]));
  return d;
}

double DomainSpec::area() const {
  if (kind_ == DomainKind::UnitDisk) return kPi;
  return signed_area(boundary_);
}

double DomainSpec::perimeter() const {
  if (kind_ == DomainKind::UnitDisk) return 2.0 * kPi;
  double len = 0.0;
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    len += (boundary_[(i + 1) % boundary_.size()] - boundary_[i]).norm();
  return len;
}

std::vector<Vec2> DomainSpec::sample_boundary(double h) const {
  std::vector<Vec2> out;
  if (kind_ == DomainKind::UnitDisk) {
    const int n = std::max(16, static_cast<int>(std::ceil(2.0 * kPi / h)));
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * kPi * j / n;
      out.emplace_back(std::cos(t), std::sin(t));
    }
    return out;
  }
  const std::size_t n = boundary_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = boundary_[i];
    const Vec2& b = boundary_[(i + 1) % n];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h)));
    for (int k = 0; k < pieces; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  return out;
}

double DomainSpec::distance_along_ray(const Vec2& p, const Vec2& dir) const {
  if (kind_ == DomainKind::UnitDisk) {
    const double pd = p.dot(dir);
    return -pd + std::sqrt(pd * pd - (p.squaredNorm() - 1.0));
  }
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = boundary_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = boundary_[i];
    const Vec2 e = boundary_[(i + 1) % n] - a;
    const double den = cross(dir, e);
    if (den == 0.0) continue;
    const double t = cross(a - p, e) / den;
    const double s = cross(a - p, dir) / den;
    if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

// ------------------------------------------------------------- PiercedDomain

Annulus PiercedDomain::annulus(std::size_t i) const {
  if (i < 1 || i > hole_count())
    throw Error(ErrorKind::IndexOutOfRange, "annulus index " + std::to_string(i) + " outside 1.." +
                                                std::to_string(hole_count()));
  return Annulus{pierce_.centers[i - 1], pierce_.radii[i - 1], eta_};
}

double PiercedDomain::area() const {
  double a = domain_.area();
  for (double r : pierce_.radii) a -= kPi * r * r;
  return a;
}

double eta_bound(const DomainSpec& domain, const std::vector<Vec2>& centers) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    m = std::min(m, domain.distance_to_boundary(centers[i]));
    for (std::size_t j = i + 1; j < centers.size(); ++j) m = std::min(m, (centers[i] - centers[j]).norm());
  }
  return m;
}

PiercedDomain build_pierced_domain(DomainSpec domain, PierceSpec pierce) {
  const std::size_t m = pierce.count();
  if (m == 0) throw Error(ErrorKind::InvalidDomain, "at least one hole is required");
  if (pierce.radii.size() != m) throw Error(ErrorKind::InvalidDomain, "centers and radii differ in length");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(pierce.radii[i] > 0.0)) throw Error(ErrorKind::InvalidDomain, "hole radius must be positive");
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = (pierce.centers[i] - pierce.centers[j]).norm();
      if (d == 0.0) throw Error(ErrorKind::DuplicateCenters, "holes " + std::to_string(i + 1) + " and " +
                                                                 std::to_string(j + 1) + " share a center");
      if (d <= pierce.radii[i] + pierce.radii[j])
        throw Error(ErrorKind::OverlappingHoles, "holes " + std::to_string(i + 1) + " and " + std::to_string(j + 1));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& c = pierce.centers[i];
    if (!domain.contains(c) || domain.distance_to_boundary(c) <= pierce.radii[i])
      throw Error(ErrorKind::HoleTouchesBoundary, "hole " + std::to_string(i + 1) + " is not inside the domain");
  }
  const double eta = kEtaFraction * eta_bound(domain, pierce.centers);
  for (std::size_t i = 0; i < m; ++i) {
    if (pierce.radii[i] >= eta)
      throw Error(ErrorKind::OverlappingHoles,
                  "hole " + std::to_string(i + 1) + " radius exceeds the annulus radius " + std::to_string(eta));
  }
  return PiercedDomain(std::move(domain), std::move(pierce), eta);
}

std::size_t graded_layer_count(double eps, double eta, double q) {
  std::size_t k = 0;
  for (double r = eps; r <= eta; r *= q) ++k;
  return k;
}

// ---------------------------------------------------------------------- Mesh

Vec2 Mesh::offset(std::size_t n, std::size_t i) const {
  if (anchor[n] == static_cast<int>(i)) return local[n];
  return nodes[n] - centers[i];
}

std::array<Vec2, 3> Mesh::cell_coords(std::size_t c) const {
  const auto& t = cells[c];
  const int a = anchor[t[0]];
  if (a >= 0 && anchor[t[1]] == a && anchor[t[2]] == a) return {local[t[0]], local[t[1]], local[t[2]]};
  return {nodes[t[0]], nodes[t[1]], nodes[t[2]]};
}

double Mesh::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double Mesh::min_quality() const {
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto v = cell_coords(c);
    const double a = (v[1] - v[2]).norm(), b = (v[0] - v[2]).norm(), e = (v[0] - v[1]).norm();
    const double area = std::abs(tri_area(v));
    q = std::min(q, 8.0 * area * area / ((a + b + e) * a * b * e));
  }
  return q;
}

std::size_t Mesh::hole_boundary_count(std::size_t i) const {
  return static_cast<std::size_t>(std::count(hole_of.begin(), hole_of.end(), static_cast<int>(i)));
}

void Mesh::write_table(std::ostream& os) const {
  os.precision(17);
  os << "# nodes " << nodes.size() << "\n";
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const char* tag = tags[n] == NodeTag::Interior ? "interior" : tags[n] == NodeTag::Outer ? "outer" : "hole";
    os << "node " << n << ' ' << nodes[n].x() << ' ' << nodes[n].y() << ' ' << tag;
    if (tags[n] == NodeTag::Hole) os << ' ' << hole_of[n] + 1;
    os << '\n';
  }
  os << "# cells " << cells.size() << "\n";
  for (std::size_t c = 0; c < cells.size(); ++c)
    os << "cell " << c << ' ' << cells[c][0] << ' ' << cells[c][1] << ' ' << cells[c][2] << '\n';
}

namespace {

struct Builder {
  Mesh mesh;

  std::size_t add_node(const Vec2& global, const Vec2& local, int anchor, NodeTag tag, int hole) {
    mesh.nodes.push_back(global);
    mesh.local.push_back(local);
    mesh.anchor.push_back(anchor);
    mesh.tags.push_back(tag);
    mesh.hole_of.push_back(hole);
    return mesh.nodes.size() - 1;
  }

  void add_cell(std::array<int, 3> t) {
    mesh.cells.push_back(t);
    if (tri_area(mesh.cell_coords(mesh.cells.size() - 1)) < 0.0) std::swap(mesh.cells.back()[1], mesh.cells.back()[2]);
  }
};

// Polar patch around hole i: geometric rings eps*q^k until the radial step
// reaches the background spacing, then uniform steps out to eta. Angular
// counts double whenever the arc spacing outgrows the radial step.
std::vector<std::size_t> build_patch(Builder& b, std::size_t i, const Vec2& c, double eps, double eta,
                                     const MeshPolicy& policy) {
  const double q = policy.q;
  const double cap = policy.h * std::sqrt(3.0) / 2.0;
  PatchInfo info;
  info.hole = i;
  info.ring_radii.push_back(eps);
  info.geometric_layers = 1;
  double r = eps;
  for (;;) {
    double step = (q - 1.0) * r;
    bool geometric = true;
    if (step > cap) {
      step = cap;
      geometric = false;
    }
    if (r + 1.3 * step >= eta) break;
    r = geometric ? r * q : r + step;
    info.ring_radii.push_back(r);
    if (geometric) ++info.geometric_layers;
  }
  info.ring_radii.push_back(eta);

  int n0 = static_cast<int>(std::ceil(2.0 * kPi / (q - 1.0) / 8.0)) * 8;
  n0 = std::max(n0, policy.min_hole_nodes);
  int count = n0;
  for (std::size_t k = 0; k < info.ring_radii.size(); ++k) {
    const double rk = info.ring_radii[k];
    const double step = k + 1 < info.ring_radii.size() ? info.ring_radii[k + 1] - rk : rk - info.ring_radii[k - 1];
    while (2.0 * kPi * rk / count > 1.3 * std::max(step, cap)) count *= 2;
    info.ring_counts.push_back(count);
  }

  info.first_node = b.mesh.nodes.size();
  std::vector<std::size_t> ring_start;
  for (std::size_t k = 0; k < info.ring_radii.size(); ++k) {
    ring_start.push_back(b.mesh.nodes.size());
    const int nk = info.ring_counts[k];
    const double rk = info.ring_radii[k];
    for (int j = 0; j < nk; ++j) {
      const double t = 2.0 * kPi * j / nk;
      const Vec2 loc(rk * std::cos(t), rk * std::sin(t));
      const bool hole = (k == 0);
      b.add_node(c + loc, loc, static_cast<int>(i), hole ? NodeTag::Hole : NodeTag::Interior,
                 hole ? static_cast<int>(i) : -1);
    }
  }
  info.node_count = b.mesh.nodes.size() - info.first_node;

  for (std::size_t k = 0; k + 1 < info.ring_radii.size(); ++k) {
    info.band_first_cell.push_back(b.mesh.cells.size());
    const long na = info.ring_counts[k], nb = info.ring_counts[k + 1];
    const auto in = [&](long j) { return static_cast<int>(ring_start[k] + (j % na)); };
    const auto out = [&](long j) { return static_cast<int>(ring_start[k + 1] + (j % nb)); };
    long a = 0, o = 0;
    while (a < na || o < nb) {
      const bool advance_inner = o >= nb || (a < na && (a + 1) * nb <= (o + 1) * na);
      if (advance_inner) {
        b.add_cell({in(a), in(a + 1), out(o)});
        ++a;
      } else {
        b.add_cell({in(a), out(o + 1), out(o)});
        ++o;
      }
    }
  }
  info.band_first_cell.push_back(b.mesh.cells.size());

  std::vector<std::size_t> outer_ring;
  for (int j = 0; j < info.ring_counts.back(); ++j) outer_ring.push_back(ring_start.back() + j);
  b.mesh.patches.push_back(std::move(info));
  return outer_ring;
}

// Mixed Voronoi areas, then circular-segment corrections along curved
// boundaries so the weights integrate the true domain.
void compute_weights(Mesh& mesh, const DomainSpec& domain, const std::vector<std::size_t>& outer_ring) {
  mesh.weights.assign(mesh.nodes.size(), 0.0);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto v = mesh.cell_coords(c);
    const double area = tri_area(v);
    std::array<double, 3> cot{};
    int obtuse = -1;
    for (int k = 0; k < 3; ++k) {
      const Vec2 e1 = v[(k + 1) % 3] - v[k], e2 = v[(k + 2) % 3] - v[k];
      const double d = e1.dot(e2);
      cot[k] = d / std::abs(cross(e1, e2));
      if (d < 0.0) obtuse = k;
    }
    const auto& t = mesh.cells[c];
    if (obtuse < 0) {
      for (int k = 0; k < 3; ++k) {
        const double lj = (v[(k + 1) % 3] - v[k]).squaredNorm();
        const double lk = (v[(k + 2) % 3] - v[k]).squaredNorm();
        mesh.weights[t[k]] += (lj * cot[(k + 2) % 3] + lk * cot[(k + 1) % 3]) / 8.0;
      }
    } else {
      for (int k = 0; k < 3; ++k) mesh.weights[t[k]] += area * (k == obtuse ? 0.5 : 0.25);
    }
  }

  const auto segment = [](double chord, double radius) {
    const double theta = 2.0 * std::asin(std::min(1.0, chord / (2.0 * radius)));
    return 0.5 * radius * radius * (theta - std::sin(theta));
  };
  if (domain.kind() == DomainKind::UnitDisk) {
    for (std::size_t k = 0; k < outer_ring.size(); ++k) {
      const std::size_t a = outer_ring[k], b = outer_ring[(k + 1) % outer_ring.size()];
      const double s = segment((mesh.nodes[a] - mesh.nodes[b]).norm(), 1.0);
      mesh.weights[a] += 0.5 * s;
      mesh.weights[b] += 0.5 * s;
    }
  }
  for (const auto& p : mesh.patches) {
    const int n0 = p.ring_counts.front();
    const double eps = p.ring_radii.front();
    for (int j = 0; j < n0; ++j) {
      const std::size_t a = p.first_node + j, b = p.first_node + (j + 1) % n0;
      const double s = segment((mesh.local[a] - mesh.local[b]).norm(), eps);
      mesh.weights[a] -= 0.5 * s;
      mesh.weights[b] -= 0.5 * s;
    }
  }
}

Mesh assemble(const DomainSpec& domain, const std::vector<Vec2>& centers, const std::vector<double>& radii,
              double eta, const MeshPolicy& policy) {
  const double h = policy.h;
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidDomain, "mesh spacing must be positive");
  if (!(policy.q > 1.0 && policy.q <= 2.0)) throw Error(ErrorKind::InvalidDomain, "grading ratio must lie in (1,2]");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < kMinHoleRadius)
      throw Error(ErrorKind::UnresolvableHole, "hole " + std::to_string(i + 1) + " radius " +
                                                   std::to_string(radii[i]) + " is below the meshable scale");
  }

  Builder b;
  b.mesh.centers = centers;
  b.mesh.hole_radii = radii;
  std::vector<std::vector<std::size_t>> rings;
  for (std::size_t i = 0; i < centers.size(); ++i) rings.push_back(build_patch(b, i, centers[i], radii[i], eta, policy));

  // Background nodes: boundary, then a hexagonal lattice kept clear of the
  // boundary and of every patch.
  std::vector<std::size_t> outer;
  for (const auto& p : domain.sample_boundary(h)) outer.push_back(b.add_node(p, p, -1, NodeTag::Outer, -1));
  Vec2 lo(-1.0, -1.0), hi(1.0, 1.0);
  if (domain.kind() == DomainKind::BoundaryCurve) {
    lo = hi = domain.boundary().front();
    for (const auto& p : domain.boundary()) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  const double dy = h * std::sqrt(3.0) / 2.0;
  const double clear = 0.55 * h;
  std::vector<std::size_t> lattice;
  int row = 0;
  for (double y = lo.y() + 0.5 * dy; y < hi.y(); y += dy, ++row) {
    for (double x = lo.x() + (row % 2 ? 0.5 * h : 0.0); x < hi.x(); x += h) {
      const Vec2 p(x, y);
      if (!domain.contains(p) || domain.distance_to_boundary(p) < clear) continue;
      bool ok = true;
      for (const auto& c : centers) ok = ok && (p - c).norm() >= eta + clear;
      if (ok) lattice.push_back(b.add_node(p, p, -1, NodeTag::Interior, -1));
    }
  }

  std::vector<std::size_t> ids;
  for (const auto& r : rings) ids.insert(ids.end(), r.begin(), r.end());
  ids.insert(ids.end(), outer.begin(), outer.end());
  ids.insert(ids.end(), lattice.begin(), lattice.end());
  std::vector<Vec2> pts;
  pts.reserve(ids.size());
  for (auto id : ids) pts.push_back(b.mesh.nodes[id]);

  std::vector<int> ring_of(b.mesh.nodes.size(), -1);
  for (std::size_t i = 0; i < rings.size(); ++i)
    for (auto id : rings[i]) ring_of[id] = static_cast<int>(i);

  double background_area = 0.0;
  for (const auto& t : detail::delaunay(pts)) {
    std::array<int, 3> g{static_cast<int>(ids[t[0]]), static_cast<int>(ids[t[1]]), static_cast<int>(ids[t[2]])};
    if (ring_of[g[0]] >= 0 && ring_of[g[0]] == ring_of[g[1]] && ring_of[g[1]] == ring_of[g[2]]) continue;
    const Vec2 centroid = (b.mesh.nodes[g[0]] + b.mesh.nodes[g[1]] + b.mesh.nodes[g[2]]) / 3.0;
    if (domain.kind() == DomainKind::BoundaryCurve && !domain.contains(centroid)) continue;
    const double area = std::abs(cross(b.mesh.nodes[g[1]] - b.mesh.nodes[g[0]], b.mesh.nodes[g[2]] - b.mesh.nodes[g[0]]));
    if (area < 1e-10 * h * h) continue;
    b.add_cell(g);
    background_area += tri_area(b.mesh.cell_coords(b.mesh.cells.size() - 1));
  }

  // Every boundary chord of the fill must be used exactly once.
  std::map<std::pair<int, int>, int> edge_use;
  const std::size_t patch_cells = b.mesh.patches.empty() ? 0 : b.mesh.patches.back().band_first_cell.back();
  for (std::size_t c = patch_cells; c < b.mesh.cells.size(); ++c) {
    const auto& t = b.mesh.cells[c];
    for (int k = 0; k < 3; ++k) {
      int u = t[k], w = t[(k + 1) % 3];
      if (u > w) std::swap(u, w);
      ++edge_use[{u, w}];
    }
  }
  const auto check_loop = [&](const std::vector<std::size_t>& loop, const char* what) {
    for (std::size_t k = 0; k < loop.size(); ++k) {
      int u = static_cast<int>(loop[k]), w = static_cast<int>(loop[(k + 1) % loop.size()]);
      if (u > w) std::swap(u, w);
      const auto it = edge_use.find({u, w});
      if (it == edge_use.end() || it->second != 1)
        throw Error(ErrorKind::StitchFailure, std::string("fill does not conform to the ") + what);
    }
  };
  check_loop(outer, "outer boundary");
  for (const auto& r : rings) check_loop(r, "patch boundary");

  double expected = 0.0;
  {
    std::vector<Vec2> poly;
    for (auto id : outer) poly.push_back(b.mesh.nodes[id]);
    expected = signed_area(poly);
    for (const auto& r : rings) {
      std::vector<Vec2> ring;
      for (auto id : r) ring.push_back(b.mesh.nodes[id]);
      expected -= signed_area(ring);
    }
  }
  if (std::abs(background_area - expected) > 1e-9 * std::abs(expected))
    throw Error(ErrorKind::StitchFailure, "fill area mismatch");

  compute_weights(b.mesh, domain, outer);
  b.mesh.reference_area = domain.area();
  for (double r : radii) b.mesh.reference_area -= kPi * r * r;
  return std::move(b.mesh);
}

}  // namespace

Mesh build_mesh(const PiercedDomain& pd, const MeshPolicy& policy) {
  return assemble(pd.domain(), pd.pierce().centers, pd.pierce().radii, pd.eta(), policy);
}

Mesh build_domain_mesh(const DomainSpec& domain, double h) {
  MeshPolicy policy;
  policy.h = h;
  return assemble(domain, {}, {}, 0.0, policy);
}

// -------------------------------------------------------------- PointLocator

namespace {

std::array<double, 3> barycentric(const std::array<Vec2, 3>& v, const Vec2& p) {
  const double det = cross(v[1] - v[0], v[2] - v[0]);
  const double l1 = cross(p - v[0], v[2] - v[0]) / det;
  const double l2 = cross(v[1] - v[0], p - v[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

double min3(const std::array<double, 3>& a) { return std::min({a[0], a[1], a[2]}); }

}  // namespace

PointLocator::PointLocator(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  Vec2 lo = m.nodes.front(), hi = m.nodes.front();
  for (const auto& p : m.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double area = (hi - lo).prod();
  cell_size_ = std::max(1e-12, 2.0 * std::sqrt(area / std::max<std::size_t>(1, m.cells.size())));
  lo_ = lo;
  nx_ = static_cast<int>((hi.x() - lo.x()) / cell_size_) + 1;
  ny_ = static_cast<int>((hi.y() - lo.y()) / cell_size_) + 1;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  std::size_t first_background = m.patches.empty() ? 0 : m.patches.back().band_first_cell.back();
  for (std::size_t c = first_background; c < m.cells.size(); ++c) {
    const auto& t = m.cells[c];
    Vec2 a = m.nodes[t[0]].cwiseMin(m.nodes[t[1]]).cwiseMin(m.nodes[t[2]]);
    Vec2 b = m.nodes[t[0]].cwiseMax(m.nodes[t[1]]).cwiseMax(m.nodes[t[2]]);
    const int x0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
    const int x1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
    const int y0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
    const int y1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(c);
  }
}

PointLocator::Hit PointLocator::locate(const Vec2& p) const {
  const Mesh& m = *mesh_;
  Hit best{0, {0, 0, 0}, false};
  double best_score = -std::numeric_limits<double>::infinity();
  const auto consider = [&](std::size_t c, const Vec2& q, bool local_frame) {
    std::array<Vec2, 3> v;
    if (local_frame) {
      v = m.cell_coords(c);
    } else {
      const auto& t = m.cells[c];
      v = {m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]};
    }
    const auto bary = barycentric(v, q);
    const double s = min3(bary);
    if (s > best_score) {
      best_score = s;
      best = Hit{c, bary, s >= -1e-12};
    }
  };

  for (const auto& patch : m.patches) {
    const Vec2 q = p - m.centers[patch.hole];
    const double r = q.norm();
    const auto& radii = patch.ring_radii;
    if (r > radii.back()) continue;
    const std::size_t bands = radii.size() - 1;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), r) - radii.begin());
    k = k == 0 ? 0 : std::min(k - 1, bands - 1);
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = std::min(bands - 1, k + 1);
    for (std::size_t band = lo; band <= hi; ++band)
      for (std::size_t c = patch.band_first_cell[band]; c < patch.band_first_cell[band + 1]; ++c) consider(c, q, true);
    if (best.inside) return best;
  }

  const int bx = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
  const int by = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
  for (int ring = 0; ring <= std::max(nx_, ny_); ++ring) {
    for (int y = by - ring; y <= by + ring; ++y) {
      for (int x = bx - ring; x <= bx + ring; ++x) {
        if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
        if (std::max(std::abs(x - bx), std::abs(y - by)) != ring) continue;
        for (auto c : buckets_[static_cast<std::size_t>(y) * nx_ + x]) consider(c, p, false);
      }
    }
    if (best.inside || (ring >= 1 && best_score > -std::numeric_limits<double>::infinity())) return best;
  }
  return best;
}

double PointLocator::interpolate(const Eigen::VectorXd& values, const Vec2& p) const {
  const Hit hit = locate(p);
  const auto& t = mesh_->cells[hit.cell];
  return hit.bary[0] * values[t[0]] + hit.bary[1] * values[t[1]] + hit.bary[2] * values[t[2]];
}

}  // namespace blowup
