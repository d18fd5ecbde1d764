#include "hylam/cohesive_law.hpp"

#include <algorithm>
#include <cmath>

namespace hylam {

namespace {

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(what);
  return v;
}

// Saturation span for an unbounded profile: doubling scan until psi stops
// growing appreciably.
double saturation_span(const std::function<double(double)>& psi) {
  double s = 1.0;
  for (int i = 0; i < 24; ++i) {
    const double a = psi(s), b = psi(2.0 * s);
    if (std::abs(b - a) <= 1e-10 * (1.0 + std::abs(a))) return 2.0 * s;
    s *= 2.0;
  }
  return s;
}

double estimate_lambda(const std::function<double(double)>& psi, double span) {
  // Worst concavity (negative second-difference quotient) on a dyadic grid,
  // inflated by 10%; convex stretches cost nothing.
  double worst = 0.0;
  for (int level = 3; level <= 9; ++level) {
    const int n = 1 << level;
    const double d = span / n;
    for (int j = 1; j < n; ++j) {
      const double z = j * d;
      const double q = (psi(z + d) - 2.0 * psi(z) + psi(z - d)) / (d * d);
      worst = std::max(worst, -q);
    }
  }
  return 1.1 * worst;
}

std::function<double(double)> central_derivative(
    std::function<double(double)> f) {
  return [f = std::move(f)](double z) {
    const double h = 1e-6 * (1.0 + std::abs(z));
    const double lo = std::max(0.0, z - h);
    return (f(z + h) - f(lo)) / (z + h - lo);
  };
}

std::function<double(double)> central_second_derivative(
    std::function<double(double)> f) {
  return [f = std::move(f)](double z) {
    const double h = 1e-5 * (1.0 + std::abs(z));
    const double zc = std::max(z, h);
    return (f(zc + h) - 2.0 * f(zc) + f(zc - h)) / (h * h);
  };
}

}  // namespace

LoadingProfile parabolic_capped_profile(double c, double k) {
  if (!(c > 0.0) || !(k > 0.0))
    throw std::invalid_argument("parabolic profile requires c > 0, k > 0");
  LoadingProfile p;
  p.family = ProfileFamily::ParabolicCapped;
  p.c = c;
  p.k = k;
  p.psi = [c, k](double z) { return z < k ? c * z * (2.0 * k - z) : c * k * k; };
  p.psi_prime = [c, k](double z) { return z < k ? 2.0 * c * (k - z) : 0.0; };
  p.psi_second = [c, k](double z) { return z < k ? -2.0 * c : 0.0; };
  p.lambda = 2.0 * c;
  p.delta_bar = k;
  return p;
}

LoadingProfile exponential_profile(double c, double k) {
  if (!(c > 0.0) || !(k > 0.0))
    throw std::invalid_argument("exponential profile requires c > 0, k > 0");
  LoadingProfile p;
  p.family = ProfileFamily::Exponential;
  p.c = c;
  p.k = k;
  p.psi = [c, k](double z) { return c * (1.0 - std::exp(-k * z)); };
  p.psi_prime = [c, k](double z) { return c * k * std::exp(-k * z); };
  p.psi_second = [c, k](double z) { return -c * k * k * std::exp(-k * z); };
  p.lambda = c * k * k;
  p.delta_bar = kInf;
  return p;
}

LoadingProfile custom_profile(std::function<double(double)> psi,
                              double delta_bar) {
  if (!psi) throw std::invalid_argument("custom profile requires psi");
  LoadingProfile p;
  p.family = ProfileFamily::Custom;
  p.delta_bar = delta_bar;
  const double span =
      std::isfinite(delta_bar) ? delta_bar : saturation_span(psi);
  p.lambda = estimate_lambda(psi, span);
  p.psi_prime = central_derivative(psi);
  p.psi_second = central_second_derivative(psi);
  p.psi = std::move(psi);
  return p;
}

CohesiveLaw make_quadratic_unloading(LoadingProfile profile) {
  if (!profile.psi || !profile.psi_prime)
    throw std::invalid_argument("loading profile is incomplete");
  const double span = std::isfinite(profile.delta_bar)
                          ? profile.delta_bar
                          : saturation_span(profile.psi);
  // Probe the slope before accepting the profile.
  const int n = 512;
  for (int j = 0; j <= n; ++j) {
    const double z = span * j / n;
    if (finite_or_throw(profile.psi_prime(z), "psi' not finite") < -1e-12)
      throw std::invalid_argument("loading profile has negative slope");
  }
  CohesiveLaw law;
  law.kind_ = LawKind::QuadraticUnloading;
  law.delta_bar_ = profile.delta_bar;
  law.lambda_ = profile.lambda;
  law.psi_prime0_ = profile.psi_prime(0.0);
  law.probe_span_ =
      std::isfinite(profile.delta_bar) ? 2.0 * profile.delta_bar : span;
  law.profile_ = std::move(profile);
  return law;
}

CohesiveLaw make_separable(std::function<double(double)> phi1,
                           std::function<double(double)> phi2,
                           double probe_span) {
  if (!phi1 || !phi2) throw std::invalid_argument("separable law needs both parts");
  if (!(probe_span > 0.0)) throw std::invalid_argument("probe_span must be positive");
  const int n = 512;
  double prev = phi2(0.0);
  for (int j = 0; j <= n; ++j) {
    const double z = probe_span * j / n;
    const double v1 = phi1(z), v2 = phi2(z);
    if (v1 < -1e-12 || v2 < -1e-12)
      throw std::invalid_argument("separable parts must be nonnegative");
    if (v2 < prev - 1e-12 * (1.0 + std::abs(prev)))
      throw std::invalid_argument("phi2 monotonicity probe failed");
    prev = std::max(prev, v2);
  }

  CohesiveLaw law;
  law.kind_ = LawKind::Separable;
  law.phi1_ = phi1;
  law.phi2_ = phi2;
  law.probe_span_ = probe_span;

  auto psi = [phi1, phi2](double z) { return phi1(z) + phi2(z); };
  // delta_bar from the diagonal: earliest point past which psi stays flat
  // on the probe grid; unbounded when the tail still grows.
  law.delta_bar_ = kInf;
  {
    std::vector<double> vals(n + 1);
    for (int j = 0; j <= n; ++j) vals[j] = psi(probe_span * j / n);
    const double scale = 1.0 + std::abs(vals[n]);
    int first_flat = n;
    for (int j = n; j >= 1; --j) {
      if (std::abs(vals[j] - vals[j - 1]) > 1e-12 * scale) break;
      first_flat = j - 1;
    }
    if (first_flat < n) law.delta_bar_ = probe_span * first_flat / n;
  }
  law.lambda_ = estimate_lambda(psi, probe_span);
  law.profile_ = custom_profile(psi, law.delta_bar_);
  law.profile_.lambda = law.lambda_;
  // One-sided slope of the diagonal at the origin.
  {
    const double h = 1e-7;
    law.psi_prime0_ =
        std::max(0.0, (-3.0 * psi(0.0) + 4.0 * psi(h) - psi(2.0 * h)) / (2.0 * h));
  }
  return law;
}

double CohesiveLaw::phi(double y, double z) const {
  if (y < -1e-12 || z < y - 1e-12)
    throw std::domain_error("phi requires z >= y >= 0");
  y = std::max(y, 0.0);
  z = std::max(z, y);
  if (kind_ == LawKind::Separable) return phi1_(y) + phi2_(z);
  const double yt = std::min(y, delta_bar_);
  const double zt = std::min(z, delta_bar_);
  if (zt == 0.0) return 0.0;
  const double sp = profile_.psi_prime(zt);
  return 0.5 * sp / zt * yt * yt + profile_.psi(zt) - 0.5 * zt * sp;
}

double CohesiveLaw::dphi_dy(double y, double z) const {
  if (y < -1e-12 || z < y - 1e-12)
    throw std::domain_error("dphi_dy requires z >= y >= 0");
  y = std::max(y, 0.0);
  z = std::max(z, y);
  if (kind_ == LawKind::Separable) {
    const double h = 1e-7 * (1.0 + y);
    if (y < h)  // second-order one-sided at the left edge
      return (-3.0 * phi1_(y) + 4.0 * phi1_(y + h) - phi1_(y + 2.0 * h)) /
             (2.0 * h);
    return (phi1_(y + h) - phi1_(y - h)) / (2.0 * h);
  }
  const double yt = std::min(y, delta_bar_);
  const double zt = std::min(z, delta_bar_);
  if (zt == 0.0) return 0.0;
  return profile_.psi_prime(zt) / zt * yt;
}

double CohesiveLaw::dphi_dz(double y, double z) const {
  if (y < -1e-12 || z < y - 1e-12)
    throw std::domain_error("dphi_dz requires z >= y >= 0");
  y = std::max(y, 0.0);
  z = std::max(z, y);
  if (kind_ == LawKind::Separable) {
    const double h = 1e-7 * (1.0 + z);
    if (z < h)
      return (-3.0 * phi2_(z) + 4.0 * phi2_(z + h) - phi2_(z + 2.0 * h)) /
             (2.0 * h);
    return (phi2_(z + h) - phi2_(z - h)) / (2.0 * h);
  }
  if (z >= delta_bar_ || z == 0.0) return 0.0;
  const double yt = std::min(y, delta_bar_);
  const double r = yt / z;
  return 0.5 * (profile_.psi_prime(z) - z * profile_.psi_second(z)) *
         (1.0 - r * r);
}

double CohesiveLaw::psi(double z) const { return phi(z, z); }

double CohesiveLaw::psi_prime(double z) const {
  if (kind_ == LawKind::Separable) return profile_.psi_prime(z);
  return z >= delta_bar_ ? 0.0 : profile_.psi_prime(z);
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

bool AssumptionReport::all_passed() const {
  return std::none_of(entries.begin(), entries.end(), [](const auto& e) {
    return e.status == CheckStatus::Fail;
  });
}

namespace {

struct Worst {
  double violation = 0.0;
  double y = 0.0, z = 0.0;
  void update(double v, double yy, double zz) {
    if (v > violation) {
      violation = v;
      y = yy;
      z = zz;
    }
  }
};

AssumptionCheck verdict(std::string name, const Worst& w, double tol) {
  AssumptionCheck c;
  c.name = std::move(name);
  c.worst_violation = w.violation;
  c.worst_y = w.y;
  c.worst_z = w.z;
  c.status = w.violation > tol ? CheckStatus::Fail : CheckStatus::Pass;
  return c;
}

}  // namespace

AssumptionReport check_law(const CohesiveLaw& law, int grid_resolution,
                           double tolerance) {
  if (grid_resolution < 8)
    throw std::invalid_argument("grid_resolution must be at least 8");
  const int n = grid_resolution;
  const double span = law.probe_span();
  const double db = law.delta_bar();
  const double db_eff = std::isfinite(db) ? db : span;
  AssumptionReport rep;
  rep.grid_resolution = n;

  auto zgrid = [&](int j) { return span * j / n; };

  // Lower semicontinuity: certified only for laws we built from smooth
  // closed-form pieces; probing cannot decide it for black-box parts.
  {
    AssumptionCheck c;
    c.name = "lower_semicontinuity";
    if (law.kind() == LawKind::QuadraticUnloading &&
        law.profile().family != ProfileFamily::Custom) {
      c.status = CheckStatus::Pass;
      c.note = "continuous by construction";
    } else {
      c.status = CheckStatus::Assumed;
      c.note = "not decidable by finite probing";
    }
    rep.entries.push_back(c);
  }

  // Boundedness of phi(0, .): report the grid sup; flag a still-growing tail.
  {
    AssumptionCheck c;
    c.name = "bounded_at_zero_slip";
    double sup = 0.0;
    for (int j = 0; j <= n; ++j) sup = std::max(sup, law.phi(0.0, zgrid(j)));
    c.value = sup;
    if (!std::isfinite(sup)) {
      c.status = CheckStatus::Fail;
      c.worst_violation = kInf;
    } else if (!std::isfinite(db) &&
               law.phi(0.0, span) - law.phi(0.0, 0.5 * span) >
                   1e-2 * (1.0 + sup)) {
      c.status = CheckStatus::Assumed;
      c.note = "tail still growing at probe span";
    }
    rep.entries.push_back(c);
  }

  // Monotonicity of phi(y, .) on [y, span].
  {
    Worst w;
    for (int i = 0; i <= n; ++i) {
      const double y = db_eff * i / n;
      double prev = law.phi(y, y);
      for (int j = 0; j <= n; ++j) {
        const double z = y + (span - y) * j / n;
        const double v = law.phi(y, z);
        w.update(prev - v, y, z);
        prev = std::max(prev, v);
      }
    }
    rep.entries.push_back(verdict("monotone_in_history", w, tolerance));
  }

  // Semiconvexity of the diagonal with the law's own lambda.
  {
    Worst w;
    const double lam = law.lambda();
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        const double a = zgrid(i), b = zgrid(j);
        const double mid = 0.5 * (a + b);
        const double lhs = law.psi(mid);
        const double rhs = 0.5 * (law.psi(a) + law.psi(b)) +
                           0.125 * lam * (b - a) * (b - a);
        w.update(lhs - rhs, mid, mid);
      }
    auto c = verdict("semiconvex_diagonal", w,
                     tolerance * (1.0 + std::abs(law.psi(span))));
    c.value = law.lambda();
    rep.entries.push_back(c);
  }

  // phi(., z) non-decreasing and convex on [0, z].
  {
    Worst w;
    for (int j = 1; j <= n; ++j) {
      const double z = db_eff * j / n;
      if (z <= 0.0) continue;
      double prev = law.phi(0.0, z);
      for (int i = 0; i <= n; ++i) {
        const double y = z * i / n;
        const double v = law.phi(y, z);
        w.update(prev - v, y, z);
        prev = std::max(prev, v);
        if (i >= 2) {
          const double y0 = z * (i - 2) / n, y1 = z * (i - 1) / n;
          const double mid = law.phi(y1, z);
          w.update(mid - 0.5 * (law.phi(y0, z) + v), y1, z);
        }
      }
    }
    rep.entries.push_back(verdict("convex_in_slip", w, tolerance));
  }

  // Boundary derivatives: dphi_dy(z, z) = psi'(z) and dphi_dy(0, z) = 0.
  {
    Worst w;
    for (int j = 1; j <= n; ++j) {
      const double z = span * j / n;
      w.update(std::abs(law.dphi_dy(z, z) - law.psi_prime(z)), z, z);
      w.update(std::abs(law.dphi_dy(0.0, z)), 0.0, z);
    }
    rep.entries.push_back(verdict("boundary_slip_derivative", w,
                                  tolerance * (1.0 + law.psi_prime0())));
  }

  // Boundedness of dphi_dy over the probe triangle.
  {
    AssumptionCheck c;
    c.name = "slip_derivative_bounded";
    double sup = 0.0;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i) {
        const double z = zgrid(j), y = z * (j ? double(i) / j : 0.0);
        sup = std::max(sup, std::abs(law.dphi_dy(y, z)));
      }
    c.value = sup;
    if (!std::isfinite(sup)) {
      c.status = CheckStatus::Fail;
      c.worst_violation = kInf;
    }
    rep.entries.push_back(c);
  }

  // Uniform strict monotonicity in z on a compact set away from the
  // diagonal: empirical constant C with phi(y, z2) - phi(y, z1) >= C (z2-z1).
  {
    AssumptionCheck c;
    c.name = "strict_history_monotonicity";
    const double margin = db_eff / n;
    double ck = kInf;
    double wy = 0.0, wz = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double y = (db_eff - 2.0 * margin) * i / n;
      if (y < 0.0) break;
      for (int j = 0; j < n; ++j) {
        const double z1 = y + margin + (db_eff - margin - (y + margin)) * j / n;
        const double z2 = z1 + margin / 2.0;
        if (z2 > db_eff) continue;
        const double slope = (law.phi(y, z2) - law.phi(y, z1)) / (z2 - z1);
        if (slope < ck) {
          ck = slope;
          wy = y;
          wz = z1;
        }
      }
    }
    if (!std::isfinite(ck)) ck = 0.0;
    ck = std::max(ck, 0.0);
    c.value = ck;
    c.worst_y = wy;
    c.worst_z = wz;
    c.status = ck > tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    if (c.status == CheckStatus::Fail) c.note = "flat direction in history";
    rep.strict_monotonicity_constant = ck;
    rep.entries.push_back(c);
  }

  // Semiconvexity constant: grid sup of |psi''| for profile-built laws
  // (their diagonal is concave), concavity defect only for additive ones.
  {
    AssumptionCheck c;
    c.name = "semiconvexity_constant";
    const bool profile_law = law.kind() == LawKind::QuadraticUnloading;
    double sup = 0.0;
    const double d = db_eff / n;
    for (int j = 1; j < n; ++j) {
      const double z = db_eff * j / n;
      if (z + d >= db) break;  // stay inside the smooth range
      const double q =
          (law.psi(z + d) - 2.0 * law.psi(z) + law.psi(z - d)) / (d * d);
      sup = std::max(sup, profile_law ? std::abs(q) : -q);
    }
    // Second differences miss one-sided curvature at z = 0; take the
    // analytic value there when the profile provides one.
    if (profile_law && law.profile().psi_second)
      sup = std::max(sup, std::abs(law.profile().psi_second(0.0)));
    c.value = sup;
    rep.lambda_estimate = sup;
    c.status = law.lambda() >= sup * (1.0 - 1e-6) - tolerance
                   ? CheckStatus::Pass
                   : CheckStatus::Fail;
    rep.entries.push_back(c);
  }

  // Truncation identity phi = phi(. ^ delta_bar, . ^ delta_bar).
  {
    Worst w;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i) {
        const double z = zgrid(j), y = z * (j ? double(i) / j : 0.0);
        const double t = law.phi(std::min(y, db), std::min(z, db));
        w.update(std::abs(law.phi(y, z) - t), y, z);
      }
    rep.entries.push_back(verdict("truncation_identity", w,
                                  tolerance * (1.0 + std::abs(law.psi(span)))));
  }

  // Diagonal identity phi(z, z) = psi(z).
  {
    Worst w;
    for (int j = 0; j <= n; ++j) {
      const double z = zgrid(j);
      w.update(std::abs(law.phi(z, z) - law.psi(z)), z, z);
    }
    rep.entries.push_back(verdict("diagonal_identity", w, tolerance));
  }

  // Nonnegativity on the probe triangle.
  {
    Worst w;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i) {
        const double z = zgrid(j), y = z * (j ? double(i) / j : 0.0);
        w.update(-law.phi(y, z), y, z);
      }
    rep.entries.push_back(verdict("nonnegative", w, tolerance));
  }

  return rep;
}

}  // namespace hylam
