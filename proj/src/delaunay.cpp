#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blowup/error.hpp"

namespace blowup::detail {
namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[k] is across the edge opposite v[k]
  bool alive = true;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return ad * (bdx * cdy - cdx * bdy) - bd * (adx * cdy - cdx * ady) + cd * (adx * bdy - bdx * ady);
}

class Triangulator {
 public:
  explicit Triangulator(std::vector<Vec2> pts) : p_(std::move(pts)), n_(static_cast<int>(p_.size())) {
    p_.emplace_back(-100.0, -100.0);
    p_.emplace_back(100.0, -100.0);
    p_.emplace_back(0.0, 100.0);
    tris_.push_back(Tri{{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
  }

  void insert(int pi) {
    const Vec2& p = p_[pi];
    const int start = locate(p);
    cavity_.clear();
    cavity_.push_back(start);
    tris_[start].alive = false;
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const Tri& t = tris_[cavity_[q]];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.nb[k];
        if (nb < 0 || !tris_[nb].alive) continue;
        if (in_circumcircle(tris_[nb], p)) {
          tris_[nb].alive = false;
          cavity_.push_back(nb);
        }
      }
    }

    edges_.clear();
    for (int ti : cavity_) {
      const Tri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.nb[k];
        if (nb >= 0 && !tris_[nb].alive) continue;
        edges_.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
      }
    }

    first_.clear();
    for (const auto& e : edges_) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back(Tri{{e.a, e.b, pi}, {-1, -1, e.outside}, true});
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int k = 0; k < 3; ++k) {
          const int u = o.v[(k + 1) % 3], w = o.v[(k + 2) % 3];
          if ((u == e.b && w == e.a) || (u == e.a && w == e.b)) o.nb[k] = id;
        }
      }
      first_.emplace_back(e.a, id);
    }
    for (const auto& entry : first_) {
      const int id = entry.second;
      Tri& t = tris_[id];
      const int b = t.v[1];
      for (const auto& [a2, id2] : first_) {
        if (a2 == b) {
          t.nb[0] = id2;
          tris_[id2].nb[1] = id;
          break;
        }
      }
    }
    last_ = static_cast<int>(tris_.size()) - 1;
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  bool is_super(int v) const { return v >= n_; }

  bool in_circumcircle(const Tri& t, const Vec2& p) const {
    int supers = 0, sk = -1;
    for (int k = 0; k < 3; ++k) {
      if (is_super(t.v[k])) {
        ++supers;
        sk = k;
      }
    }
    if (supers == 1) {
      // Super vertices behave as points at infinity: the circumcircle is the
      // half plane on the far side of the finite edge.
      const Vec2& a = p_[t.v[(sk + 1) % 3]];
      const Vec2& b = p_[t.v[(sk + 2) % 3]];
      return orient(a, b, p) > 0.0;
    }
    return incircle(p_[t.v[0]], p_[t.v[1]], p_[t.v[2]], p) > 0.0;
  }

  int locate(const Vec2& p) const {
    int t = last_;
    while (!tris_[t].alive) --t;
    for (std::size_t guard = 0; guard < 4 * tris_.size() + 16; ++guard) {
      const Tri& tr = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Vec2& a = p_[tr.v[(k + 1) % 3]];
        const Vec2& b = p_[tr.v[(k + 2) % 3]];
        if (orient(a, b, p) < 0.0) {
          next = tr.nb[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw Error(ErrorKind::StitchFailure, "point location did not terminate");
  }

  std::vector<Vec2> p_;
  int n_;
  std::vector<Tri> tris_;
  int last_ = 0;
  std::vector<int> cavity_;
  struct CavityEdge {
    int a, b, outside;
  };
  std::vector<CavityEdge> edges_;
  std::vector<std::pair<int, int>> first_;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n < 3) return {};
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  std::mt19937_64 rng(0x5eed1234ULL);
  std::uniform_real_distribution<double> jitter(-1e-10, 1e-10);
  std::vector<Vec2> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = (points[i] - lo) / span;
    scaled[i] += Vec2(jitter(rng), jitter(rng));
  }

  // Insert in a serpentine bucket order so point location walks stay short.
  const int g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 4.0)));
  std::vector<std::pair<long, int>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    int bx = std::min(g - 1, static_cast<int>(scaled[i].x() * g));
    const int by = std::min(g - 1, static_cast<int>(scaled[i].y() * g));
    if (by % 2 == 1) bx = g - 1 - bx;
    order[i] = {static_cast<long>(by) * g + bx, static_cast<int>(i)};
  }
  std::sort(order.begin(), order.end());

  Triangulator tri(scaled);
  for (const auto& [key, idx] : order) tri.insert(idx);
  auto cells = tri.result();
  for (auto& c : cells) {
    if (orient(points[c[0]], points[c[1]], points[c[2]]) < 0.0) std::swap(c[1], c[2]);
  }
  return cells;
}

}  // namespace blowup::detail
