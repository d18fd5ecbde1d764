// Loading-unloading densities for the cohesive interface.
//
// A law phi(y, z) is defined on the triangle {z >= y >= 0}: y is the current
// slip (unloading direction, convex), z the maximal past slip (loading
// direction, concave along the diagonal psi(z) = phi(z, z)).

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hylam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ProfileFamily { ParabolicCapped, Exponential, Custom };

/// Diagonal loading profile psi: slip energy per unit interface length.
/// psi is non-decreasing, concave, psi(0) = 0. The semiconvexity parameter
/// bounds |psi''| from above; delta_bar is the slip beyond which psi is
/// constant (infinite when the profile never saturates).
struct LoadingProfile {
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;
  std::function<double(double)> psi_second;
  double lambda = 0.0;
  double delta_bar = kInf;
  ProfileFamily family = ProfileFamily::Custom;
  double c = 0.0;
  double k = 0.0;
};

// psi(z) = c z (2k - z) capped at c k^2 from z = k on; delta_bar = k.
LoadingProfile parabolic_capped_profile(double c, double k);

// psi(z) = c (1 - exp(-k z)); delta_bar infinite, lambda = c k^2.
LoadingProfile exponential_profile(double c, double k);

// Derivatives by central differences; lambda estimated as the max
// second-difference quotient over a dyadic probe grid, inflated by 10%.
LoadingProfile custom_profile(std::function<double(double)> psi,
                              double delta_bar = kInf);

enum class LawKind { QuadraticUnloading, Separable };

/// Immutable cohesive density. Evaluation is pure; quadratic-unloading laws
/// truncate both arguments at delta_bar before evaluating.
class CohesiveLaw {
 public:
  double phi(double y, double z) const;
  double dphi_dy(double y, double z) const;
  // Defined away from the diagonal for z < delta_bar; zero beyond.
  double dphi_dz(double y, double z) const;

  double psi(double z) const;
  double psi_prime(double z) const;
  // Threshold slope at the origin of the loading branch (stick threshold).
  double psi_prime0() const { return psi_prime0_; }

  double delta_bar() const { return delta_bar_; }
  double lambda() const { return lambda_; }
  LawKind kind() const { return kind_; }
  const LoadingProfile& profile() const { return profile_; }
  // Finite span on which probe grids live (2*delta_bar when finite).
  double probe_span() const { return probe_span_; }

  friend CohesiveLaw make_quadratic_unloading(LoadingProfile profile);
  friend CohesiveLaw make_separable(std::function<double(double)> phi1,
                                    std::function<double(double)> phi2,
                                    double probe_span);

 private:
  CohesiveLaw() = default;

  LawKind kind_ = LawKind::QuadraticUnloading;
  LoadingProfile profile_;
  std::function<double(double)> phi1_, phi2_;
  double delta_bar_ = kInf;
  double lambda_ = 0.0;
  double psi_prime0_ = 0.0;
  double probe_span_ = 1.0;
};

/// Quadratic unloading regime built from a loading profile:
///   phi(y, z) = psi'(z)/(2z) y^2 + psi(z) - z psi'(z)/2,  phi(0,0) = 0.
/// Rejects profiles whose slope probe turns negative.
CohesiveLaw make_quadratic_unloading(LoadingProfile profile);

/// Additively separable law phi(y, z) = phi1(y) + phi2(z).
/// Rejects phi2 that fails the non-decreasing probe. probe_span bounds the
/// grids used to size delta_bar, lambda and the assumption checks.
CohesiveLaw make_separable(std::function<double(double)> phi1,
                           std::function<double(double)> phi2,
                           double probe_span = 8.0);

enum class CheckStatus { Pass, Fail, Assumed };

struct AssumptionCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double worst_violation = 0.0;  // nonnegative; 0 when clean
  double worst_y = 0.0;
  double worst_z = 0.0;
  double value = 0.0;  // reported quantity (sup, constant, ...)
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> entries;
  int grid_resolution = 0;
  // Empirical strict-monotonicity constant in z on compact probe sets
  // away from the diagonal; zero means the probe found a flat direction.
  double strict_monotonicity_constant = 0.0;
  double lambda_estimate = 0.0;

  const AssumptionCheck* find(const std::string& name) const;
  bool all_passed() const;  // Assumed entries do not count as failures
};

/// Grid-based certification of the law's structural assumptions.
/// Failures are report entries, never exceptions.
AssumptionReport check_law(const CohesiveLaw& law, int grid_resolution,
                           double tolerance);

}  // namespace hylam
