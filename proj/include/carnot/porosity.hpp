#pragma once

// Porosity witnesses, bad-set membership diagnostics and measure scans.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/derivative.hpp"

namespace carnot {

struct Certificate {
  bool closed_form = false;  // disjointness follows from the set's descriptor
  long samples = 0;
  long hits = 0;
  std::uint64_t seed = 0;

  bool empty() const { return hits == 0; }
};

/// Samples B(center, radius) uniformly and counts points of E.
Certificate certify_ball(const DomainSet& E, const Point& center, double radius, long budget, std::uint64_t seed);

struct HoleWitness {
  double scale = 0.0;     // probed radius r
  Point center;           // x with d(a, x) = r
  double radius = 0.0;    // Lambda * d(a, x)
  double distance = 0.0;  // d(a, x)
  Certificate certificate;
};

struct ProbeScale {
  double radius = 0.0;
  long candidates = 0;
  std::optional<HoleWitness> witness;
};

struct ProbeReport {
  Point anchor;
  double lambda = 0.0;
  long budget = 0;
  std::vector<ProbeScale> scales;

  std::vector<HoleWitness> witnesses() const;
};

/// Searches the sphere d(a, x) = r for a ball B(x, Lambda r) missing E.
ProbeReport porosity_probe(const DomainSet& E, const Point& a, double lambda, const std::vector<double>& radii,
                           long sampler_budget, std::uint64_t seed);

struct BadSetParams {
  Point zeta;
  Point eta;
  Point y;
  Point z;
  double eps = 1e-3;
  double delta = 1.0;
  std::vector<double> t_grid;
  int omega_restarts = 100;
  int omega_steps = 20;
  int direction_samples = 64;
  long constant_samples = 20000;
  std::uint64_t seed = 0;
};

struct BadSetConstants {
  double b1 = 0.0;  // max{eps, rho(y) + rho(z)}
  double b2 = 0.0;  // max{eps, eps / L, d(zeta) + d(eta)}
  double c1 = 0.0;  // product-perturbation constant of the target at b1
  double c2 = 0.0;  // product-perturbation constant of the source at b2
  double lipschitz = 0.0;
  int nu = 1;       // target step
  int s = 1;        // source step
  double threshold = 0.0;
};

/// 3 C1 eps^{1/nu} + L eps + L C2 (2 + L^{-1/s}) eps^{1/s}, evaluated in that order.
double badset_threshold(double c1, double c2, double lipschitz, double eps, int nu, int s);

BadSetConstants badset_constants(const MapUnderTest& f, const BadSetParams& params);

struct BadSetScale {
  double t = 0.0;
  Point zeta_t;
  Point eta_t;
  double a1 = 0.0;  // d(zeta_t, delta_t zeta)
  double a2 = 0.0;  // d(eta_t, delta_t eta)
  double a3 = 0.0;  // rho(f(p)^{-1} f(p zeta_t), delta_t y)
  double a4 = 0.0;  // rho(f(p)^{-1} f(p eta_t), delta_t z)
  bool conditions = false;
  bool omega_found = false;
  Point omega;
  double omega_gap = 0.0;  // d(omega, delta_t(zeta eta))
  double lhs = 0.0;        // rho(f(p)^{-1} f(p omega), delta_t(y z))
  double rhs = 0.0;        // threshold * t
  bool badt = false;
  bool badt2 = false;
  std::string note;
};

struct BadSetDiagnostic {
  Point p;
  BadSetParams params;
  BadSetConstants constants;
  std::vector<BadSetScale> scales;
  std::string verdict;  // in | out | inconclusive
  std::string reason;
};

/// Checks the bad-set conditions on the t grid. When `constants` is null
/// they are computed from the lemma pipeline.
BadSetDiagnostic bad_set_membership(const MapUnderTest& f, const Point& p, const BadSetParams& params,
                                    const BadSetConstants* constants = nullptr);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  double volume() const;
};

struct MeasureRow {
  int resolution = 0;
  long samples = 0;
  double fraction = 0.0;
  double fraction_stderr = 0.0;
  bool porous_component = false;
  double neighborhood_radius = 0.0;
  double porous_estimate = 0.0;
  double porous_stderr = 0.0;
};

/// Fraction of uniform box samples lying in E at each resolution. For hole
/// families, also estimates mu(E cap union_a B(a, 2^-K - coeff 2^{-K power}))
/// by sampling each anchor neighbourhood, with K the resolution.
std::vector<MeasureRow> porous_measure_scan(const DomainSet& E, const Box& box, const std::vector<int>& resolutions,
                                            long samples, std::uint64_t seed);

}  // namespace carnot
