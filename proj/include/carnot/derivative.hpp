#pragma once

// Directional derivatives on measurable domains, density diagnostics,
// Pansu-differential fitting and pointwise differentiability residuals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/maps.hpp"

namespace carnot {

/// t_k = t0 * q^k, k = 0..steps-1.
struct Schedule {
  double t0 = 1.0;
  double q = 0.5;
  int steps = 30;

  std::vector<double> scales() const;
};

/// Parses "t0:q:steps".
Schedule parse_schedule(const std::string& text);

/// Floating-point floor below which double-path quotients are not formed.
inline constexpr double kScaleFloor = 1e-8;

struct ApproxDirection {
  Point zeta_t;       // x^{-1} y_t with x zeta_t in A
  Point correction;   // w with zeta_t = delta_t(zeta) w; zero when x delta_t zeta is in A
  double gap = 0.0;   // d(zeta_t, delta_t zeta) / t
  std::string method; // inside | halfspace | hole | mask | shell
};

/// Near-nearest point of A to x delta_t zeta, returned as x^{-1} y_t.
/// Throws SparseDomainError when the shell search finds no point of A.
ApproxDirection approximate_direction(const DomainSet& A, const Point& x, const Point& zeta, double t,
                                      std::uint64_t seed = 0);

struct DensitySample {
  double radius = 0.0;
  double ratio = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

/// Monte Carlo estimate of mu(A cap B(x, r)) / mu(B(x, r)) for each radius.
std::vector<DensitySample> density_index(const DomainSet& A, const Point& x, const std::vector<double>& radii,
                                         long samples, std::uint64_t seed);

struct DirectionalDensity {
  double t = 0.0;
  double bad_fraction = 0.0;
};

/// Midpoint-grid estimate of |{0 < theta < t : x delta_theta zeta not in A}| / t.
std::vector<DirectionalDensity> directional_density_index(const DomainSet& A, const Point& x, const Point& zeta,
                                                          const std::vector<double>& t_list, long resolution);

struct DerivativeOptions {
  Schedule schedule;
  /// Tolerance is relative_tolerance * L * d(zeta).
  double relative_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct DerivativeEstimate {
  Point direction;
  std::vector<double> scales;
  std::vector<Point> quotients;
  /// Exact quotients, filled when the map has an exact evaluator.
  std::vector<ExactElement> exact_quotients;
  std::vector<double> gaps;
  /// rho(q_k, q_{k-1}); the first entry is 0.
  std::vector<double> increments;
  Point limit;
  bool converged = false;
  double residual = 0.0;
  double tolerance = 0.0;
  bool exact = false;
  /// Scales skipped because they fell below the floating-point floor.
  int floored = 0;
};

/// delta_{1/t}(f(x)^{-1} f(x zeta_x^t)) along the schedule. Converged when
/// the last three quotients are mutually within the tolerance; the limit is
/// the final quotient. A zero direction gives the zero quotient at every scale.
DerivativeEstimate directional_derivative(const MapUnderTest& f, const Point& x, const Point& zeta,
                                          const DerivativeOptions& options = {});
/// Same with an exactly specified direction; used by the exact quotient path.
DerivativeEstimate directional_derivative(const MapUnderTest& f, const Point& x, const ExactElement& zeta,
                                          const DerivativeOptions& options = {});

struct CrossCheck {
  std::string kind;  // layer | dilation
  Point direction;
  double a = 1.0;
  Point measured;
  Point predicted;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  bool passed = false;
};

struct PansuFit {
  Point base;
  std::vector<DerivativeEstimate> horizontal;
  std::vector<std::vector<double>> first_layer;  // target layer-1 rows, source layer-1 columns
  std::optional<HHom> differential;
  std::vector<CrossCheck> checks;
  bool all_converged = false;
  bool consistent = false;
  bool passed = false;
  std::string failure;
};

/// Fits the Pansu differential at x from the layer-1 basis derivatives.
/// Non-convergence and inconsistent extensions are reported in `failure`.
PansuFit fit_pansu_differential(const MapUnderTest& f, const Point& x, const DerivativeOptions& options = {});

struct ResidualSample {
  double radius = 0.0;
  double residual = 0.0;
  long admissible = 0;
  bool inconclusive = false;
};

/// max rho(f(x)^{-1} f(xz), L(z)) / d(z) over sampled z in B(0, r) with xz in A.
std::vector<ResidualSample> differentiability_residual(const MapUnderTest& f, const Point& x, const HHom& L,
                                                       const std::vector<double>& radii, long samples,
                                                       std::uint64_t seed);

struct CompositionReport {
  double discrepancy = 0.0;
  std::vector<double> scales;
  std::vector<double> per_scale;
  DerivativeEstimate zeta;
  DerivativeEstimate eta;
  DerivativeEstimate product;
};

/// rho(est(delta_a zeta . delta_b eta), delta_a est(zeta) . delta_b est(eta)).
/// Throws NonConvergence when an estimate does not converge.
CompositionReport composition_check(const MapUnderTest& f, const Point& x, const Point& zeta, const Point& eta,
                                    double a, double b, const DerivativeOptions& options = {});

}  // namespace carnot
