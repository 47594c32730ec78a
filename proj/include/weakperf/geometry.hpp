#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "weakperf/errors.hpp"
#include "weakperf/precision.hpp"

namespace weakperf {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
Point<Scalar> make_point(Scalar x, Scalar y) {
  if (!is_finite(x) || !is_finite(y)) {
    throw DomainError("point coordinates must be finite");
  }
  return Point<Scalar>(x, y);
}

// Euclidean length without squaring, so radii near the bottom of the
// long double range do not underflow.
template <typename Derived>
typename Derived::Scalar length(const Eigen::MatrixBase<Derived>& p) {
  return std::hypot(p.x(), p.y());
}

// Lexicographic (x, then y) order; used to break ties deterministically.
template <typename Scalar>
bool lexicographic_less(const Point<Scalar>& a, const Point<Scalar>& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

template <typename Scalar>
struct Disc {
  Point<Scalar> center;
  Scalar radius;
  bool closed = true;

  Scalar diameter() const { return 2 * radius; }
};

template <typename Scalar>
Disc<Scalar> make_disc(const Point<Scalar>& center, Scalar radius, bool closed = true) {
  if (!(radius > 0) || !is_finite(radius)) {
    throw DomainError("disc radius must be positive and finite");
  }
  return Disc<Scalar>{center, radius, closed};
}

template <typename Scalar>
struct Annulus {
  Point<Scalar> center;
  Scalar inner;
  Scalar outer;
};

template <typename Scalar>
Annulus<Scalar> make_annulus(const Point<Scalar>& center, Scalar inner, Scalar outer) {
  if (!(inner >= 0) || !(outer > inner) || !is_finite(outer)) {
    throw DomainError("annulus requires 0 <= inner < outer");
  }
  return Annulus<Scalar>{center, inner, outer};
}

// A finite point family whose pairwise displacements are available to full
// relative precision, even when absolute coordinates cannot resolve them.
template <class Set>
concept PointSet = requires(const Set& s, std::size_t i, std::size_t j) {
  typename Set::scalar_type;
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.point(i) } -> std::convertible_to<Point<typename Set::scalar_type>>;
  { s.displacement(i, j) } -> std::convertible_to<Point<typename Set::scalar_type>>;
  { s.resolution() } -> std::convertible_to<typename Set::scalar_type>;
  { s.diameter() } -> std::convertible_to<typename Set::scalar_type>;
};

/// Finite sample of a bounded planar set. Every point of the underlying set
/// lies within `resolution` of some sample point.
template <typename Scalar>
class PlanarSetSample {
 public:
  using scalar_type = Scalar;

  static constexpr std::size_t kGridThreshold = 10000;

  PlanarSetSample(std::vector<Point<Scalar>> points, Scalar resolution, Scalar diameter)
      : points_(std::move(points)), resolution_(resolution), diameter_(diameter) {
    validate();
    if (points_.size() >= kGridThreshold) build_grid();
  }

  // Diameter defaults to the sample's own diameter plus twice the resolution,
  // which bounds the diameter of the underlying set.
  PlanarSetSample(std::vector<Point<Scalar>> points, Scalar resolution)
      : PlanarSetSample(points, resolution, sample_diameter(points) + 2 * resolution) {}

  std::size_t size() const { return points_.size(); }
  const Point<Scalar>& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point<Scalar>>& points() const { return points_; }
  Point<Scalar> displacement(std::size_t i, std::size_t j) const { return points_[j] - points_[i]; }
  Scalar resolution() const { return resolution_; }
  Scalar diameter() const { return diameter_; }
  bool has_grid() const { return !cell_start_.empty(); }

  /// Nearest-sample distance; uses the grid index when present. Always returns
  /// exactly the value an exhaustive scan produces.
  Scalar nearest_distance(const Point<Scalar>& z) const {
    if (!has_grid()) return scan_nearest(z);
    return grid_nearest(z);
  }

  Scalar scan_nearest(const Point<Scalar>& z) const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& p : points_) best = std::min(best, length(p - z));
    return best;
  }

  static Scalar sample_diameter(const std::vector<Point<Scalar>>& pts) {
    Scalar d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, length(pts[j] - pts[i]));
    }
    return d;
  }

 private:
  void validate() const {
    if (points_.empty()) throw DomainError("empty set");
    if (!(resolution_ > 0)) throw DomainError("sample resolution must be positive");
    if (!(diameter_ > 0)) throw DomainError("sample diameter must be positive");
    if (!(resolution_ < diameter_)) throw DomainError("sample resolution must be below the diameter");
    for (const auto& p : points_) {
      if (!is_finite(p.x()) || !is_finite(p.y())) throw DomainError("sample point is not finite");
    }
  }

  void build_grid() {
    lo_ = points_.front();
    Point<Scalar> hi = points_.front();
    for (const auto& p : points_) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Scalar extent = std::max({hi.x() - lo_.x(), hi.y() - lo_.y(), Scalar(1e-300)});
    const auto per_side = static_cast<std::size_t>(std::ceil(std::sqrt(Scalar(points_.size()) / 2)));
    cells_ = std::max<std::size_t>(1, per_side);
    cell_ = extent / Scalar(cells_) * (1 + Scalar(1e-9));
    std::vector<std::size_t> count(cells_ * cells_ + 1, 0);
    for (const auto& p : points_) ++count[cell_of(p) + 1];
    for (std::size_t c = 1; c < count.size(); ++c) count[c] += count[c - 1];
    cell_start_ = count;
    cell_points_.resize(points_.size());
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) cell_points_[fill[cell_of(points_[i])]++] = i;
  }

  long axis_index(Scalar coord, Scalar origin) const {
    return static_cast<long>(std::floor((coord - origin) / cell_));
  }

  std::size_t cell_of(const Point<Scalar>& p) const {
    const auto clamp = [&](long v) {
      return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(cells_) - 1));
    };
    return clamp(axis_index(p.y(), lo_.y())) * cells_ + clamp(axis_index(p.x(), lo_.x()));
  }

  // Ring search; points outside ring k are at least k * cell_ away from z.
  Scalar grid_nearest(const Point<Scalar>& z) const {
    const long zx = axis_index(z.x(), lo_.x());
    const long zy = axis_index(z.y(), lo_.y());
    const long n = static_cast<long>(cells_);
    Scalar best = std::numeric_limits<Scalar>::infinity();
    const long max_ring = n + std::max({std::abs(zx), std::abs(zy), std::abs(zx - n), std::abs(zy - n)});
    for (long ring = 0; ring <= max_ring; ++ring) {
      for (long cy = zy - ring; cy <= zy + ring; ++cy) {
        if (cy < 0 || cy >= n) continue;
        const bool edge_row = (cy == zy - ring || cy == zy + ring);
        const long step = edge_row ? 1 : 2 * ring;
        for (long cx = zx - ring; cx <= zx + ring; cx += std::max<long>(step, 1)) {
          if (cx < 0 || cx >= n) continue;
          const auto c = static_cast<std::size_t>(cy) * cells_ + static_cast<std::size_t>(cx);
          for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
            best = std::min(best, length(points_[cell_points_[k]] - z));
          }
        }
      }
      if (best <= Scalar(ring) * cell_) break;
    }
    return best;
  }

  std::vector<Point<Scalar>> points_;
  Scalar resolution_;
  Scalar diameter_;

  Point<Scalar> lo_ = Point<Scalar>::Zero();
  Scalar cell_ = 0;
  std::size_t cells_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_points_;
};

/// Distance from z to the sample; within `resolution` of the true boundary
/// distance.
template <typename Scalar>
Scalar dist_to_set(const Point<Scalar>& z, const PlanarSetSample<Scalar>& set) {
  return set.nearest_distance(z);
}

struct AnnulusHit {
  bool hit = false;
  // True when the only hits lie in the resolution margin, outside [inner, outer].
  bool margin_only = false;
};

template <typename Scalar>
AnnulusHit classify_distance(Scalar d, Scalar inner, Scalar outer, Scalar resolution, AnnulusHit acc) {
  if (d >= inner && d <= outer) {
    acc.hit = true;
    acc.margin_only = false;
  } else if (d >= inner - resolution && d <= outer + resolution && !acc.hit) {
    acc.hit = true;
    acc.margin_only = true;
  }
  return acc;
}

/// Resolution-inflated annulus test against the sample.
template <typename Scalar>
AnnulusHit annulus_hits_set(const Annulus<Scalar>& a, const PlanarSetSample<Scalar>& set) {
  AnnulusHit result;
  for (const auto& p : set.points()) {
    result = classify_distance(length(p - a.center), a.inner, a.outer, set.resolution(), result);
    if (result.hit && !result.margin_only) break;
  }
  return result;
}

/// Sorted distances from sample point `center` to every other distinct point.
template <typename Scalar>
struct DistanceProfile {
  std::size_t center = 0;
  std::vector<Scalar> distance;
  std::vector<std::size_t> index;
};

template <PointSet Set>
DistanceProfile<typename Set::scalar_type> distance_profile(const Set& set, std::size_t center) {
  using Scalar = typename Set::scalar_type;
  std::vector<std::pair<Scalar, std::size_t>> entries;
  entries.reserve(set.size());
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == center) continue;
    const Scalar d = length(set.displacement(center, j));
    if (d > 0) entries.emplace_back(d, j);
  }
  std::sort(entries.begin(), entries.end());
  DistanceProfile<Scalar> profile;
  profile.center = center;
  profile.distance.reserve(entries.size());
  profile.index.reserve(entries.size());
  for (const auto& [d, j] : entries) {
    profile.distance.push_back(d);
    profile.index.push_back(j);
  }
  return profile;
}

/// Annulus test around a sample point using its distance profile.
template <typename Scalar>
AnnulusHit annulus_hits_profile(const DistanceProfile<Scalar>& profile, Scalar inner, Scalar outer,
                                Scalar resolution) {
  const auto& d = profile.distance;
  AnnulusHit result;
  auto it = std::lower_bound(d.begin(), d.end(), inner);
  if (it != d.end() && *it <= outer) {
    result.hit = true;
    return result;
  }
  auto lo = std::lower_bound(d.begin(), d.end(), inner - resolution);
  if ((lo != d.end() && *lo <= outer + resolution) || inner <= resolution) {
    result.hit = true;
    result.margin_only = true;
  }
  return result;
}

// Point-cloud text format: header `# resolution <r> diameter <d>`, then one
// `x y` pair per line.
template <typename Scalar>
void write_point_cloud(std::ostream& out, const std::vector<Point<Scalar>>& points, Scalar resolution,
                       Scalar diameter) {
  out << std::setprecision(17);
  out << "# resolution " << resolution << " diameter " << diameter << '\n';
  for (const auto& p : points) out << p.x() << ' ' << p.y() << '\n';
}

template <typename Scalar>
void write_point_cloud(std::ostream& out, const PlanarSetSample<Scalar>& set) {
  write_point_cloud(out, set.points(), set.resolution(), set.diameter());
}

template <typename Scalar>
PlanarSetSample<Scalar> read_point_cloud(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("point cloud: missing header");
  std::istringstream header(line);
  std::string hash, key_r, key_d;
  long double resolution = 0, diameter = 0;
  header >> hash >> key_r >> resolution >> key_d >> diameter;
  if (!header || hash != "#" || key_r != "resolution" || key_d != "diameter") {
    throw DomainError("point cloud: header must read '# resolution <r> diameter <d>'");
  }
  std::vector<Point<Scalar>> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long double x = 0, y = 0;
    if (!(row >> x >> y)) throw DomainError("point cloud: malformed row " + std::to_string(line_no));
    points.push_back(make_point(static_cast<Scalar>(x), static_cast<Scalar>(y)));
  }
  return PlanarSetSample<Scalar>(std::move(points), static_cast<Scalar>(resolution),
                                 static_cast<Scalar>(diameter));
}

}  // namespace weakperf
