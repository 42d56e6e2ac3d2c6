#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ebdim {

// Query against the branch-comb approximation of the solenoid invariant
// measure on a Poincare section. Branch count is 2^depth; Gamma* (bit i-1
// holds a_i) selects the branch through the ball center.
struct SolenoidQuery {
  int depth = 20;                       // k, rejected above 30
  double contraction = 0.076;           // a in (0, 1/4)
  double section_angle = 0.0;           // phi_k
  std::uint32_t center_branch = 0;      // Gamma*
  std::array<double, 2> v0 = {0.0, 0.0};
  double radius = 0.0;
  // Evaluate the chord form sqrt(r^2 - d^2) (default) or the raw
  // sqrt(r^2 - d) variant for side-by-side comparison.
  bool raw_distance_form = false;
};

// Section point v_k^Gamma for one branch.
std::array<double, 2> solenoid_branch_point(int depth, double contraction,
                                            double section_angle,
                                            std::uint32_t branch,
                                            const std::array<double, 2>& v0);

// All 2^depth section points, branch index = Gamma as integer.
std::vector<std::array<double, 2>> solenoid_branch_points(
    int depth, double contraction, double section_angle,
    const std::array<double, 2>& v0);

// Branch whose section point is closest to `target` (exact search with
// subtree pruning).
std::uint32_t solenoid_nearest_branch(int depth, double contraction,
                                      double section_angle,
                                      const std::array<double, 2>& v0,
                                      const std::array<double, 2>& target);

// mu(B_r) ~ (1 / (2^k pi)) sum_Gamma sqrt(r^2 - d_Gamma^2), terms with
// d_Gamma >= r contributing zero. Subtrees whose spread is below 1e-9 r are
// collapsed onto their partial sum, so deep queries stay cheap at any k.
double solenoid_ball_measure(const SolenoidQuery& q);

// Hausdorff dimension 1 - log 2 / log a. Accepts a <= 1/4 (the map is only
// defined below 1/4); throws outside (0, 1).
double solenoid_dimension(double contraction);

}  // namespace ebdim
