#pragma once

// Homogeneous norms ||x|| = max_i sigma_i |pi_i x|^{1/i} and the induced
// left-invariant distance rho(x, y) = ||x^{-1} y||.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

enum class LayerNorm { Euclidean, Max };

std::string to_string(LayerNorm n);
LayerNorm parse_layer_norm(const std::string& s);

struct HomogeneousNorm {
  AlgebraPtr algebra;
  std::vector<double> sigmas;  // sigmas[0] == 1
  LayerNorm layer_norm = LayerNorm::Euclidean;
  /// Size of the violation-free calibration sample; 0 when sigmas were supplied.
  long certified_pairs = 0;

  HomogeneousNorm() = default;
  HomogeneousNorm(AlgebraPtr alg, std::vector<double> sigmas, LayerNorm layer_norm = LayerNorm::Euclidean);
  /// All sigma_i = 1.
  static HomogeneousNorm unit(AlgebraPtr alg, LayerNorm layer_norm = LayerNorm::Euclidean);

  const GradedAlgebra& alg() const { return *algebra; }
};

/// |pi_i x| in the chosen layer norm.
double layer_magnitude(const HomogeneousNorm& norm, int layer, std::span<const double> coords);
double hnorm(const HomogeneousNorm& norm, const Point& x);
double hdist(const HomogeneousNorm& norm, const Point& x, const Point& y);

/// Exact evaluation up to the final root extraction: the layer magnitudes
/// are formed in rationals and rounded once.
double hnorm(const HomogeneousNorm& norm, const ExactElement& x);
double hdist(const HomogeneousNorm& norm, const ExactElement& x, const ExactElement& y);

/// Ambient vector norm |x|: max over layers of the Euclidean norm.
double ambient_norm(const GradedAlgebra& alg, const Point& x);
double ambient_layer_norm(const GradedAlgebra& alg, int layer, std::span<const double> coords);

/// Uniform (Haar) sample of the homogeneous ball B(0, r).
Point sample_hball(const HomogeneousNorm& norm, double r, std::mt19937_64& rng);
/// Uniform sample of B(center, r) = center * B(0, r).
Point sample_hball_about(const HomogeneousNorm& norm, const Point& center, double r, std::mt19937_64& rng);
/// Point of homogeneous norm exactly r along a random coordinate direction.
Point sample_hsphere(const HomogeneousNorm& norm, double r, std::mt19937_64& rng);
/// delta_{r / ||z||} z for z != 0.
Point rescale_to(const HomogeneousNorm& norm, const Point& z, double r);

/// Lebesgue measure of the homogeneous unit ball.
double unit_ball_volume(const HomogeneousNorm& norm);

struct CalibrationResult {
  HomogeneousNorm norm;
  bool violation_free = false;
  /// Max of ||xy|| - ||x|| - ||y|| over the sample set at the returned sigma.
  double residual = 0.0;
  long pairs = 0;
  int candidates_tried = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kTriangleSlack = 1e-12;

/// Counts pairs with (||xy|| - ||x|| - ||y||) / (||x|| + ||y||) > kTriangleSlack.
struct TriangleCheck {
  long violations = 0;
  double residual = -1e300;
  double worst_relative = -1e300;
};

struct TrianglePair {
  Point x, y, xy;
};

/// Pair set drawn from the sigma = 1 ball of radius 2, mixing uniform
/// points with layer-zeroed and rescaled ones. Products are sigma-free and
/// computed once.
std::vector<TrianglePair> triangle_sample(const GradedAlgebra& alg, long pairs, std::uint64_t seed);
TriangleCheck check_triangle(const HomogeneousNorm& norm, const std::vector<TrianglePair>& pairs);

CalibrationResult calibrate_sigmas(AlgebraPtr alg, LayerNorm layer_norm, long sample_budget, std::uint64_t seed);

}  // namespace carnot
