#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace blowup {

using Vec2 = Eigen::Vector2d;

enum class DomainKind { UnitDisk, BoundaryCurve };

/// The outer domain. The unit disk is handled analytically; any other domain
/// is a simple closed polygon given counter-clockwise or clockwise.
class DomainSpec {
 public:
  static DomainSpec unit_disk();
  static DomainSpec curve(std::vector<Vec2> boundary);

  DomainKind kind() const { return kind_; }
  const std::vector<Vec2>& boundary() const { return boundary_; }

  bool contains(const Vec2& p) const;
  /// Unsigned distance to the boundary.
  double distance_to_boundary(const Vec2& p) const;
  double area() const;
  double perimeter() const;
  /// Boundary nodes with spacing close to h, in counter-clockwise order.
  std::vector<Vec2> sample_boundary(double h) const;
  /// Largest t with p + t*dir inside the closed domain (dir normalized).
  double distance_along_ray(const Vec2& p, const Vec2& dir) const;

 private:
  DomainKind kind_ = DomainKind::UnitDisk;
  std::vector<Vec2> boundary_;
};

struct PierceSpec {
  std::vector<Vec2> centers;
  std::vector<double> radii;
  std::size_t count() const { return centers.size(); }
};

struct Annulus {
  Vec2 center;
  double inner = 0.0;
  double outer = 0.0;
};

class PiercedDomain {
 public:
  PiercedDomain(DomainSpec domain, PierceSpec pierce, double eta)
      : domain_(std::move(domain)), pierce_(std::move(pierce)), eta_(eta) {}

  const DomainSpec& domain() const { return domain_; }
  const PierceSpec& pierce() const { return pierce_; }
  double eta() const { return eta_; }
  std::size_t hole_count() const { return pierce_.count(); }

  /// Annulus A_i, 1-based index as in the construction.
  Annulus annulus(std::size_t i) const;
  double area() const;

 private:
  DomainSpec domain_;
  PierceSpec pierce_;
  double eta_;
};

/// Admissible-bound fraction used for the annulus radius.
inline constexpr double kEtaFraction = 0.45;
/// Holes smaller than this cannot be meshed.
inline constexpr double kMinHoleRadius = 1e-11;

double eta_bound(const DomainSpec& domain, const std::vector<Vec2>& centers);

PiercedDomain build_pierced_domain(DomainSpec domain, PierceSpec pierce);

struct MeshPolicy {
  double h = 0.02;       // background spacing
  double q = 1.15;       // radial grading ratio of the hole patches
  int min_hole_nodes = 32;
};

enum class NodeTag : std::uint8_t { Interior, Outer, Hole };

struct PatchInfo {
  std::size_t hole = 0;
  std::vector<double> ring_radii;
  std::vector<int> ring_counts;
  std::size_t geometric_layers = 0;  // rings placed with ratio q
  std::size_t first_node = 0;        // nodes of the patch are contiguous
  std::size_t node_count = 0;
  std::vector<std::size_t> band_first_cell;  // cells between ring k and k+1, plus end marker
};

/// Number of radii eps*q^k (k >= 0) not exceeding eta.
std::size_t graded_layer_count(double eps, double eta, double q);

/// Triangle mesh of a (possibly pierced) domain. Nodes inside a hole patch
/// also carry their offset from the hole center so that geometry at the
/// hole scale is not lost to cancellation in global coordinates.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<Vec2> local;
  std::vector<int> anchor;  // hole patch index or -1
  std::vector<NodeTag> tags;
  std::vector<int> hole_of;  // hole index for Hole-tagged nodes, else -1
  std::vector<std::array<int, 3>> cells;
  std::vector<double> weights;  // lumped quadrature weight per node
  std::vector<Vec2> centers;
  std::vector<double> hole_radii;
  std::vector<PatchInfo> patches;
  double reference_area = 0.0;

  std::size_t size() const { return nodes.size(); }
  bool is_boundary(std::size_t n) const { return tags[n] != NodeTag::Interior; }

  /// x_n - center_i with full precision when n belongs to patch i.
  Vec2 offset(std::size_t n, std::size_t i) const;
  /// Vertex coordinates of a cell in a common frame (local if shared anchor).
  std::array<Vec2, 3> cell_coords(std::size_t c) const;

  double total_weight() const;
  /// min over cells of inscribed / circumscribed radius.
  double min_quality() const;
  std::size_t hole_boundary_count(std::size_t i) const;

  void write_table(std::ostream& os) const;
};

Mesh build_mesh(const PiercedDomain& pd, const MeshPolicy& policy);
/// Mesh of the unpierced domain.
Mesh build_domain_mesh(const DomainSpec& domain, double h);

/// P1 interpolation on a mesh. Points outside every cell fall back to the
/// nearest cell and are linearly extrapolated.
class PointLocator {
 public:
  explicit PointLocator(std::shared_ptr<const Mesh> mesh);

  struct Hit {
    std::size_t cell;
    std::array<double, 3> bary;
    bool inside;
  };
  Hit locate(const Vec2& p) const;
  double interpolate(const Eigen::VectorXd& values, const Vec2& p) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Vec2 lo_;
  double cell_size_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace blowup
