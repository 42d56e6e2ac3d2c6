#include "solenoid_measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ebdim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxDepth = 30;

void check_common(int depth, double a) {
  if (depth < 1 || depth > kMaxDepth)
    throw std::invalid_argument("solenoid: depth must be in [1, 30]");
  if (!(a > 0.0 && a < 0.25))
    throw std::invalid_argument("solenoid: contraction must be in (0, 1/4)");
}

// Shared DFS state over branch suffixes. Levels descend i = k..1; the bit
// chosen at level i is a_i and contributes 0.5 a^(k-i) * unit(angle_{i-1})
// with angle_{i-1} = angle_i / 2 + a_i pi.
struct BranchWalk {
  int k;
  double a;
  std::array<double, 2> v0;
  std::vector<double> apow;    // a^j
  std::vector<double> spread;  // max |remaining terms| entering level i

  BranchWalk(int depth, double contraction, const std::array<double, 2>& v0_in)
      : k(depth), a(contraction), v0(v0_in) {
    apow.resize(static_cast<std::size_t>(k) + 1);
    apow[0] = 1.0;
    for (int j = 1; j <= k; ++j) apow[j] = apow[j - 1] * a;
    // entering level i, terms i..1 remain: 0.5 (a^(k-i) + ... + a^(k-1))
    spread.assign(static_cast<std::size_t>(k) + 2, 0.0);
    for (int i = 1; i <= k; ++i) {
      double s = 0.0;
      for (int j = 1; j <= i; ++j) s += apow[k - j];
      spread[static_cast<std::size_t>(i)] = 0.5 * s;
    }
  }

  std::array<double, 2> base() const {
    return {apow[k] * v0[0], apow[k] * v0[1]};
  }
};

}  // namespace

std::array<double, 2> solenoid_branch_point(int depth, double contraction,
                                            double section_angle,
                                            std::uint32_t branch,
                                            const std::array<double, 2>& v0) {
  check_common(depth, contraction);
  double px = std::pow(contraction, depth) * v0[0];
  double py = std::pow(contraction, depth) * v0[1];
  double ang = section_angle;
  for (int i = depth; i >= 1; --i) {
    const int bit = (branch >> (i - 1)) & 1u;
    ang = ang / 2.0 + bit * kPi;
    const double w = 0.5 * std::pow(contraction, depth - i);
    px += w * std::cos(ang);
    py += w * std::sin(ang);
  }
  return {px, py};
}

std::vector<std::array<double, 2>> solenoid_branch_points(
    int depth, double contraction, double section_angle,
    const std::array<double, 2>& v0) {
  check_common(depth, contraction);
  const std::uint64_t n = 1ull << depth;
  std::vector<std::array<double, 2>> out(n);
  for (std::uint64_t g = 0; g < n; ++g)
    out[g] = solenoid_branch_point(depth, contraction, section_angle,
                                   static_cast<std::uint32_t>(g), v0);
  return out;
}

std::uint32_t solenoid_nearest_branch(int depth, double contraction,
                                      double section_angle,
                                      const std::array<double, 2>& v0,
                                      const std::array<double, 2>& target) {
  check_common(depth, contraction);
  BranchWalk w(depth, contraction, v0);

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_bits = 0;

  struct Node {
    int level;
    double px, py, ang;
    std::uint32_t bits;
  };
  std::vector<Node> stack;
  const auto b0 = w.base();
  stack.push_back({depth, b0[0], b0[1], section_angle, 0});
  while (!stack.empty()) {
    Node n = stack.back();
    stack.pop_back();
    const double dx = n.px - target[0], dy = n.py - target[1];
    const double d = std::hypot(dx, dy);
    if (n.level == 0) {
      if (d < best) {
        best = d;
        best_bits = n.bits;
      }
      continue;
    }
    if (d - w.spread[static_cast<std::size_t>(n.level)] > best) continue;
    for (int bit = 0; bit <= 1; ++bit) {
      const double ang = n.ang / 2.0 + bit * kPi;
      const double wgt = 0.5 * w.apow[w.k - n.level];
      stack.push_back({n.level - 1, n.px + wgt * std::cos(ang),
                       n.py + wgt * std::sin(ang), ang,
                       n.bits | (static_cast<std::uint32_t>(bit) << (n.level - 1))});
    }
  }
  return best_bits;
}

double solenoid_ball_measure(const SolenoidQuery& q) {
  check_common(q.depth, q.contraction);
  if (!(q.radius > 0.0))
    throw std::invalid_argument("solenoid_ball_measure: radius must be > 0");

  BranchWalk w(q.depth, q.contraction, q.v0);
  const auto center = solenoid_branch_point(q.depth, q.contraction,
                                            q.section_angle, q.center_branch,
                                            q.v0);
  const double r = q.radius;
  const double r2 = r * r;
  const double collapse = 1e-9 * r;

  double acc = 0.0;
  struct Node {
    int level;
    double px, py, ang;
  };
  std::vector<Node> stack;
  const auto b0 = w.base();
  stack.push_back({q.depth, b0[0], b0[1], q.section_angle});
  while (!stack.empty()) {
    Node n = stack.back();
    stack.pop_back();
    const double dx = n.px - center[0], dy = n.py - center[1];
    const double d2 = dx * dx + dy * dy;
    const double contrib_leaves = std::pow(2.0, n.level);
    if (n.level == 0 || w.spread[static_cast<std::size_t>(n.level)] < collapse) {
      if (q.raw_distance_form) {
        const double d = std::sqrt(d2);
        if (d < r2) acc += contrib_leaves * std::sqrt(r2 - d);
      } else if (d2 < r2) {
        acc += contrib_leaves * std::sqrt(r2 - d2);
      }
      continue;
    }
    const double spread = w.spread[static_cast<std::size_t>(n.level)];
    // raw form contributes while d < r^2, chord form while d < r
    const double cutoff = q.raw_distance_form ? r2 : r;
    if (std::sqrt(d2) - spread > cutoff) continue;
    for (int bit = 0; bit <= 1; ++bit) {
      const double ang = n.ang / 2.0 + bit * kPi;
      const double wgt = 0.5 * w.apow[w.k - n.level];
      stack.push_back({n.level - 1, n.px + wgt * std::cos(ang),
                       n.py + wgt * std::sin(ang), ang});
    }
  }
  return acc / (std::pow(2.0, q.depth) * kPi);
}

double solenoid_dimension(double contraction) {
  if (!(contraction > 0.0 && contraction < 1.0))
    throw std::invalid_argument("solenoid_dimension: contraction outside (0, 1)");
  return 1.0 - std::log(2.0) / std::log(contraction);
}

}  // namespace ebdim
