#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "weakperf/errors.hpp"
#include "weakperf/gauges.hpp"
#include "weakperf/geometry.hpp"
#include "weakperf/precision.hpp"

namespace weakperf {

inline constexpr int kMaxCantorDepth = 60;

/// Interval lengths per level. log(1/l_j) is always exact; the value itself
/// underflows to zero past the scalar's range and is then unusable.
template <typename Scalar>
struct CantorLengths {
  std::vector<Scalar> value;
  std::vector<Scalar> log_inv;

  int depth() const { return static_cast<int>(value.size()) - 1; }
  bool representable(int j) const { return value[j] >= smallest_safe_length<Scalar>(); }
  int deepest_representable() const {
    int j = 0;
    while (j + 1 <= depth() && representable(j + 1)) ++j;
    return j;
  }
};

namespace detail {

template <typename Scalar>
void check_halving(const CantorLengths<Scalar>& lengths) {
  const Scalar log2 = std::log(Scalar(2));
  for (int j = 1; j <= lengths.depth(); ++j) {
    if (!(lengths.log_inv[j] - lengths.log_inv[j - 1] > log2)) {
      throw ConstructionError("level " + std::to_string(j) + ": l_j < l_{j-1}/2 fails", j);
    }
  }
}

inline void check_depth(int depth) {
  if (depth < 0 || depth > kMaxCantorDepth) {
    throw DomainError("Cantor depth must lie in [0, " + std::to_string(kMaxCantorDepth) + "]");
  }
}

}  // namespace detail

/// l_j = l0^(alpha^j).
template <typename Scalar>
CantorLengths<Scalar> build_u1_lengths(Scalar l0, Scalar alpha, int depth) {
  if (!(l0 > 0 && l0 < 1)) throw DomainError("l0 must lie in (0, 1)");
  if (!(alpha > 1)) throw DomainError("alpha must exceed 1");
  detail::check_depth(depth);
  CantorLengths<Scalar> out;
  const Scalar base = -std::log(l0);
  for (int j = 0; j <= depth; ++j) {
    const Scalar li = j == 0 ? base : base * std::pow(alpha, Scalar(j));
    out.log_inv.push_back(li);
    out.value.push_back(j == 0 ? l0 : std::exp(-li));
  }
  detail::check_halving(out);
  return out;
}

/// Solves y = Y + beta log y for the root above Y + log 2 (y = log 1/l_j,
/// Y = log 1/l_{j-1}). Damped fixed point, bisection when it stalls.
template <typename Scalar>
Scalar solve_u2_level(Scalar Y, Scalar beta, int level) {
  const Scalar lo0 = Y + std::log(Scalar(2));
  const auto f = [&](Scalar y) { return y - Y - beta * std::log(y); };
  if (!(f(lo0) < 0)) {
    throw ConstructionError("level " + std::to_string(level) + ": no solution below l_{j-1}/2", level);
  }
  const Scalar tol = 4 * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), Y);
  Scalar y = std::max(lo0, Y + beta * std::log(std::max(Y, Scalar(2))));
  for (int it = 0; it < 200; ++it) {
    const Scalar next = Y + beta * std::log(y);
    // contraction factor beta / y; damp when it is not small
    const Scalar damp = beta / y < Scalar(0.5) ? Scalar(1) : Scalar(0.5);
    const Scalar step = damp * (next - y);
    y += step;
    if (std::abs(step) <= tol) break;
  }
  if (y > lo0 && std::abs(f(y)) <= 8 * tol) return y;
  // bisection on [lo0, hi] with f(lo0) < 0 < f(hi)
  Scalar lo = lo0;
  Scalar hi = lo0 + 1;
  while (f(hi) <= 0) hi = lo0 + 2 * (hi - lo0);
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return lo + (hi - lo) / 2;
}

/// l_j = l_{j-1} (log 1/l_j)^-beta, solved level by level in log space.
template <typename Scalar>
CantorLengths<Scalar> build_u2_lengths(Scalar l0, Scalar beta, int depth) {
  if (!(l0 > 0 && l0 < 1)) throw DomainError("l0 must lie in (0, 1)");
  if (!(beta > 0)) throw DomainError("beta must be positive");
  detail::check_depth(depth);
  CantorLengths<Scalar> out;
  out.log_inv.push_back(-std::log(l0));
  out.value.push_back(l0);
  for (int j = 1; j <= depth; ++j) {
    const Scalar y = solve_u2_level(out.log_inv.back(), beta, j);
    out.log_inv.push_back(y);
    out.value.push_back(std::exp(-y));
  }
  detail::check_halving(out);
  return out;
}

template <typename Scalar>
struct Interval {
  Scalar left;
  Scalar length;
};

/// Levels 0..depth of the nested interval construction on [0, l0].
template <typename Scalar>
class CantorIntervalSet {
 public:
  explicit CantorIntervalSet(CantorLengths<Scalar> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.value.empty()) throw DomainError("no levels");
    if (lengths_.depth() > 62) throw DomainError("too many levels to index");
    detail::check_halving(lengths_);
  }

  int depth() const { return lengths_.depth(); }
  const CantorLengths<Scalar>& lengths() const { return lengths_; }
  Scalar length(int j) const { return lengths_.value[j]; }
  Scalar log_inv_length(int j) const { return lengths_.log_inv[j]; }
  std::uint64_t interval_count(int j) const { return std::uint64_t(1) << j; }

  // Offset of the right child from the left child at level i: l_{i-1} - l_i.
  Scalar shift(int i) const { return lengths_.value[i - 1] - lengths_.value[i]; }

  /// I_{j,k}, k = 0..2^j - 1 in left-to-right order. Bit (j - i) of k picks
  /// the right child at level i.
  Interval<Scalar> interval(int j, std::uint64_t k) const {
    if (j < 0 || j > depth() || k >= interval_count(j)) throw DomainError("interval index out of range");
    Scalar left = 0;
    for (int i = j; i >= 1; --i) {
      if ((k >> (j - i)) & 1u) left += shift(i);
    }
    return {left, lengths_.value[j]};
  }

 private:
  CantorLengths<Scalar> lengths_;
};

/// 2^j * l_j^gamma, the cost of covering level j interval by interval.
template <typename Scalar>
Scalar content_upper_bound_levels(const CantorIntervalSet<Scalar>& set, Scalar gamma, int j) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
  if (j < 0 || j > set.depth()) throw DomainError("level beyond the constructed depth");
  return std::exp(Scalar(j) * std::log(Scalar(2)) - gamma * set.log_inv_length(j));
}

/// Finite sample of the Cantor set on the real axis: the endpoints of every
/// deepest-level interval, optionally with midpoints. Differences between
/// points are computed from interval addresses, so they keep full relative
/// precision even where absolute coordinates cannot separate the points.
template <typename Scalar>
class CantorPointSet {
 public:
  using scalar_type = Scalar;

  CantorPointSet(const CantorIntervalSet<Scalar>& intervals, bool with_midpoints)
      : depth_(intervals.depth()), per_leaf_(with_midpoints ? 3 : 2) {
    if (depth_ > 24) throw DomainError("point sample limited to depth 24");
    for (int j = 0; j <= depth_; ++j) {
      if (!intervals.lengths().representable(j)) {
        throw ConstructionError("level " + std::to_string(j) + ": length below the " +
                                    std::string(precision_tag<Scalar>()) + " range; use extended precision",
                                j);
      }
    }
    leaf_length_ = intervals.length(depth_);
    diameter_ = intervals.length(0);
    shift_.assign(depth_ + 1, 0);
    for (int i = 1; i <= depth_; ++i) shift_[i] = intervals.shift(i);
    const std::uint64_t leaves = intervals.interval_count(depth_);
    left_.reserve(leaves);
    for (std::uint64_t k = 0; k < leaves; ++k) left_.push_back(intervals.interval(depth_, k).left);
  }

  std::size_t size() const { return left_.size() * per_leaf_; }
  int depth() const { return depth_; }
  bool with_midpoints() const { return per_leaf_ == 3; }

  Point<Scalar> point(std::size_t i) const { return Point<Scalar>(left_[i / per_leaf_] + offset(i % per_leaf_), 0); }

  Point<Scalar> displacement(std::size_t i, std::size_t j) const {
    const std::uint64_t a = i / per_leaf_;
    const std::uint64_t b = j / per_leaf_;
    Scalar dx = offset(j % per_leaf_) - offset(i % per_leaf_);
    const std::uint64_t diff = a ^ b;
    if (diff != 0) {
      const int top = std::bit_width(diff) - 1;
      // smallest shifts first
      for (int p = 0; p <= top; ++p) {
        const int bit_a = (a >> p) & 1u;
        const int bit_b = (b >> p) & 1u;
        if (bit_a != bit_b) dx += Scalar(bit_b - bit_a) * shift_[depth_ - p];
      }
    }
    return Point<Scalar>(dx, 0);
  }

  // Every point of the limit set lies within half a leaf (endpoints only)
  // or a quarter leaf (with midpoints) of a sample point.
  Scalar resolution() const { return leaf_length_ / (per_leaf_ == 3 ? 4 : 2); }
  Scalar diameter() const { return diameter_; }

  std::vector<Point<Scalar>> points() const {
    std::vector<Point<Scalar>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
  }

 private:
  Scalar offset(std::size_t kind) const {
    if (kind == 0) return 0;
    if (kind == 1) return leaf_length_;
    return leaf_length_ / 2;
  }

  int depth_;
  std::size_t per_leaf_;
  Scalar leaf_length_ = 0;
  Scalar diameter_ = 0;
  std::vector<Scalar> shift_;
  std::vector<Scalar> left_;
};

template <typename Scalar>
struct DiscNode {
  std::size_t center = 0;  // index into the point set
  Point<Scalar> offset = Point<Scalar>::Zero();  // center minus the parent's center
  Scalar radius = 0;
  int depth = 0;
};

/// Binary tree of closed discs in heap order: node i has children 2i+1 (same
/// center, "B1") and 2i+2 (centered at a witness, "B2").
template <PointSet Set>
class DiscTree {
 public:
  using Scalar = typename Set::scalar_type;

  DiscTree(std::shared_ptr<const Set> set, std::vector<DiscNode<Scalar>> nodes, int depth, Scalar c_tilde,
           GaugeFunction<Scalar> gauge)
      : set_(std::move(set)), nodes_(std::move(nodes)), depth_(depth), c_tilde_(c_tilde), gauge_(std::move(gauge)) {}

  const Set& set() const { return *set_; }
  std::shared_ptr<const Set> set_ptr() const { return set_; }
  int depth() const { return depth_; }
  Scalar c_tilde() const { return c_tilde_; }
  // the h the radii were built from
  const GaugeFunction<Scalar>& gauge() const { return gauge_; }
  std::size_t size() const { return nodes_.size(); }
  const DiscNode<Scalar>& node(std::size_t i) const { return nodes_[i]; }
  const DiscNode<Scalar>& root() const { return nodes_[0]; }
  Scalar radius_at_depth(int k) const { return nodes_[first_at_depth(k)].radius; }
  bool is_leaf(std::size_t i) const { return nodes_[i].depth == depth_; }

  static std::size_t first_at_depth(int k) { return (std::size_t(1) << k) - 1; }
  static std::size_t parent(std::size_t i) { return (i - 1) / 2; }

  /// Absolute disc; only as precise as absolute coordinates allow.
  Disc<Scalar> disc(std::size_t i) const { return make_disc(set_->point(nodes_[i].center), nodes_[i].radius); }

  /// center(j) - center(i), summed through the common ancestor.
  Point<Scalar> relative_center(std::size_t i, std::size_t j) const {
    Point<Scalar> up_i = Point<Scalar>::Zero();
    Point<Scalar> up_j = Point<Scalar>::Zero();
    while (i != j) {
      if (nodes_[i].depth >= nodes_[j].depth) {
        up_i += nodes_[i].offset;
        i = parent(i);
      } else {
        up_j += nodes_[j].offset;
        j = parent(j);
      }
    }
    return up_j - up_i;
  }

 private:
  std::shared_ptr<const Set> set_;
  std::vector<DiscNode<Scalar>> nodes_;
  int depth_;
  Scalar c_tilde_;
  GaugeFunction<Scalar> gauge_;
};

/// Builds the disc tree with rad(child) = c_tilde * h(rad(parent) / 2). The
/// second child sits at the point of the annulus h(rho/2) <= |z - a| <= rho/2
/// closest (in |d - sqrt(inner*outer)|) to the middle of the annulus; ties go
/// to the lexicographically smaller point.
template <PointSet Set>
DiscTree<Set> build_disc_tree(std::shared_ptr<const Set> set, std::size_t root_center,
                              typename Set::scalar_type r,
                              const GaugeFunction<typename Set::scalar_type>& h,
                              typename Set::scalar_type c_tilde, int depth) {
  using Scalar = typename Set::scalar_type;
  if (!(c_tilde > 0 && c_tilde < Scalar(0.5))) throw DomainError("c_tilde must lie in (0, 1/2)");
  if (!(r > 0)) throw DomainError("root radius must be positive");
  if (depth < 0 || depth > 20) throw DomainError("tree depth must lie in [0, 20]");
  if (root_center >= set->size()) throw DomainError("root center is not a sample point");

  std::vector<Scalar> radius(depth + 1);
  std::vector<Scalar> inner(depth + 1);
  radius[0] = r;
  for (int k = 0; k < depth; ++k) {
    const Scalar half = radius[k] / 2;
    inner[k] = evaluate(h, half);
    if (!(inner[k] < half)) {
      throw ConstructionError("level " + std::to_string(k) + ": h(rho/2) >= rho/2, annulus is empty", k);
    }
    radius[k + 1] = c_tilde * inner[k];
    if (!(radius[k + 1] >= smallest_safe_length<Scalar>())) {
      throw ConstructionError("level " + std::to_string(k + 1) + ": radius below the " +
                                  std::string(precision_tag<Scalar>()) + " range",
                              k + 1);
    }
  }

  const std::size_t count = (std::size_t(1) << (depth + 1)) - 1;
  std::vector<DiscNode<Scalar>> nodes(count);
  nodes[0] = {root_center, Point<Scalar>::Zero(), r, 0};
  for (std::size_t i = 0; 2 * i + 2 < count; ++i) {
    const auto& parent = nodes[i];
    const int k = parent.depth;
    const Scalar in = inner[k];
    const Scalar out = radius[k] / 2;
    const Scalar target = std::sqrt(in) * std::sqrt(out);
    std::size_t best = set->size();
    Point<Scalar> best_offset = Point<Scalar>::Zero();
    Scalar best_score = std::numeric_limits<Scalar>::infinity();
    for (std::size_t j = 0; j < set->size(); ++j) {
      if (j == parent.center) continue;
      const Point<Scalar> v = set->displacement(parent.center, j);
      const Scalar d = length(v);
      if (d < in || d > out) continue;
      const Scalar score = std::abs(d - target);
      if (score < best_score || (score == best_score && lexicographic_less(v, best_offset))) {
        best = j;
        best_offset = v;
        best_score = score;
      }
    }
    if (best == set->size()) {
      throw WitnessNotFound("level " + std::to_string(k) + ": no witness in the annulus around point " +
                                std::to_string(parent.center),
                            k, parent.center, static_cast<long double>(in), static_cast<long double>(out));
    }
    nodes[2 * i + 1] = {parent.center, Point<Scalar>::Zero(), radius[k + 1], k + 1};
    nodes[2 * i + 2] = {best, best_offset, radius[k + 1], k + 1};
  }
  return DiscTree<Set>(std::move(set), std::move(nodes), depth, c_tilde, h);
}

/// C2 for h = C0 t^alpha: the iterated radii are (C2 r)^(alpha^k) / C2.
template <typename Scalar>
Scalar power_tree_scale(Scalar coefficient, Scalar alpha, Scalar c_tilde) {
  const Scalar c1 = c_tilde * coefficient * std::pow(Scalar(2), -alpha);
  return std::pow(c1, 1 / (alpha - 1));
}

template <typename Scalar>
Scalar power_tree_radius(Scalar coefficient, Scalar alpha, Scalar c_tilde, Scalar r, int k) {
  const Scalar c2 = power_tree_scale(coefficient, alpha, c_tilde);
  return std::exp(std::pow(alpha, Scalar(k)) * std::log(c2 * r)) / c2;
}

template <typename Scalar>
struct TreeCheck {
  bool nested = true;
  bool siblings_disjoint = true;
  bool radii_consistent = true;
  std::size_t first_bad_node = 0;
  bool ok() const { return nested && siblings_disjoint && radii_consistent; }
};

/// Nesting, sibling disjointness and equal radii per level, on every node.
template <PointSet Set>
TreeCheck<typename Set::scalar_type> check_tree_structure(const DiscTree<Set>& tree) {
  using Scalar = typename Set::scalar_type;
  TreeCheck<Scalar> check;
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    const auto& p = tree.node(DiscTree<Set>::parent(i));
    const bool nested = length(n.offset) + n.radius <= p.radius;
    const bool radius_ok = n.radius == tree.radius_at_depth(n.depth);
    bool disjoint = true;
    if (i % 2 == 0) disjoint = length(n.offset - tree.node(i - 1).offset) > n.radius + tree.node(i - 1).radius;
    if ((!nested || !disjoint || !radius_ok) && check.ok()) check.first_bad_node = i;
    check.nested = check.nested && nested;
    check.siblings_disjoint = check.siblings_disjoint && disjoint;
    check.radii_consistent = check.radii_consistent && radius_ok;
  }
  return check;
}

/// mu(node at depth k) = 2^-k on the tree's discs.
template <PointSet Set>
class MassDistribution {
 public:
  using Scalar = typename Set::scalar_type;
  explicit MassDistribution(std::shared_ptr<const DiscTree<Set>> tree) : tree_(std::move(tree)) {}

  const DiscTree<Set>& tree() const { return *tree_; }
  Scalar mass(std::size_t node) const { return std::ldexp(Scalar(1), -tree_->node(node).depth); }

 private:
  std::shared_ptr<const DiscTree<Set>> tree_;
};

template <typename Scalar>
struct MassInterval {
  Scalar lo = 0;
  Scalar hi = 0;
};

/// Closed disc given relative to a tree node: center = center(anchor) + offset.
template <typename Scalar>
struct AnchoredDisc {
  std::size_t anchor = 0;
  Point<Scalar> offset = Point<Scalar>::Zero();
  Scalar radius = 0;
};

namespace detail {

template <PointSet Set>
class MassQuery {
 public:
  using Scalar = typename Set::scalar_type;

  MassQuery(const MassDistribution<Set>& mu, const AnchoredDisc<Scalar>& q) : mu_(mu), tree_(mu.tree()), q_(q) {
    const int m = tree_.node(q.anchor).depth;
    path_.assign(m + 1, 0);
    to_anchor_.assign(m + 1, Point<Scalar>::Zero());
    Point<Scalar> acc = Point<Scalar>::Zero();
    std::size_t i = q.anchor;
    for (int d = m; d >= 0; --d) {
      path_[d] = i;
      to_anchor_[d] = -acc;  // center(path[d]) - center(anchor)
      if (d > 0) {
        acc += tree_.node(i).offset;
        i = DiscTree<Set>::parent(i);
      }
    }
  }

  MassInterval<Scalar> run() {
    visit(0, to_path_node(0), path_error(0));
    return result_;
  }

 private:
  static constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();

  bool on_path(std::size_t i) const {
    const int d = tree_.node(i).depth;
    return d < static_cast<int>(path_.size()) && path_[d] == i;
  }
  Point<Scalar> to_path_node(int d) const { return to_anchor_[d] - q_.offset; }
  Scalar path_error(int d) const {
    return 8 * eps * (length(to_anchor_[d]) + length(q_.offset) + q_.radius);
  }

  // d: center(node) - query center; err bounds the rounding in |d| and radii.
  void visit(std::size_t i, const Point<Scalar>& d, Scalar err) {
    const auto& n = tree_.node(i);
    const Scalar dist = length(d);
    const Scalar slack = err + 4 * eps * (dist + n.radius + q_.radius);
    if (dist + n.radius <= q_.radius - slack) {
      result_.lo += mu_.mass(i);
      result_.hi += mu_.mass(i);
      return;
    }
    if (dist - n.radius > q_.radius + slack) return;
    if (tree_.is_leaf(i)) {
      result_.hi += mu_.mass(i);
      return;
    }
    for (std::size_t c : {2 * i + 1, 2 * i + 2}) {
      if (on_path(c)) {
        const int cd = tree_.node(c).depth;
        visit(c, to_path_node(cd), path_error(cd));
      } else {
        const auto& off = tree_.node(c).offset;
        visit(c, d + off, err + 4 * eps * (dist + length(off)));
      }
    }
  }

  const MassDistribution<Set>& mu_;
  const DiscTree<Set>& tree_;
  AnchoredDisc<Scalar> q_;
  std::vector<std::size_t> path_;
  std::vector<Point<Scalar>> to_anchor_;
  MassInterval<Scalar> result_;
};

}  // namespace detail

/// Certified mu(A): lo sums leaves inside A, hi sums leaves meeting A.
/// Rounding in the center arithmetic is absorbed by moving a node from
/// "inside"/"disjoint" to "meets" when the decision is within error.
template <PointSet Set>
MassInterval<typename Set::scalar_type> mass_of_disc(const MassDistribution<Set>& mu,
                                                     const AnchoredDisc<typename Set::scalar_type>& query) {
  if (query.anchor >= mu.tree().size()) throw DomainError("anchor node out of range");
  if (!(query.radius > 0)) throw DomainError("query radius must be positive");
  return detail::MassQuery<Set>(mu, query).run();
}

/// Same with a disc in absolute coordinates, anchored at the root.
template <PointSet Set>
MassInterval<typename Set::scalar_type> mass_of_disc(const MassDistribution<Set>& mu,
                                                     const Disc<typename Set::scalar_type>& disc) {
  const auto& tree = mu.tree();
  const auto offset = disc.center - tree.set().point(tree.root().center);
  return mass_of_disc(mu, AnchoredDisc<typename Set::scalar_type>{0, offset, disc.radius});
}

template <typename Scalar>
void write_lengths(std::ostream& out, const CantorLengths<Scalar>& lengths) {
  out << "# j l_j log_inv_l_j\n" << std::setprecision(17);
  for (int j = 0; j <= lengths.depth(); ++j) {
    out << j << ' ' << lengths.value[j] << ' ' << lengths.log_inv[j] << '\n';
  }
}

template <PointSet Set>
void write_tree(std::ostream& out, const DiscTree<Set>& tree) {
  out << "# depth index center_x center_y radius mass\n" << std::setprecision(17);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    const auto c = tree.set().point(n.center);
    out << n.depth << ' ' << i - DiscTree<Set>::first_at_depth(n.depth) << ' ' << c.x() << ' ' << c.y() << ' '
        << n.radius << ' ' << std::ldexp(1.0L, -n.depth) << '\n';
  }
}

}  // namespace weakperf
