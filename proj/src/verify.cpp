#include "carnot/verify.hpp"

#include <map>
#include <sstream>

#include "carnot/linalg.hpp"

namespace carnot {

namespace {

using Sparse = std::map<int, Rational>;

// [e_a, v] for a sparse v.
Sparse bracket_basis(const GradedAlgebra& alg, int a, const Sparse& v) {
  Sparse out;
  for (const auto& [m, c] : v) {
    if (m == a) continue;
    const bool flip = a > m;
    for (const auto& t : alg.pair_terms(flip ? m : a, flip ? a : m)) {
      if (flip) {
        out[t.k] -= c * t.value;
      } else {
        out[t.k] += c * t.value;
      }
    }
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

Sparse basis_bracket(const GradedAlgebra& alg, int a, int b) {
  return bracket_basis(alg, a, Sparse{{b, Rational(1)}});
}

void record(VerifyReport& report, Violation v) {
  if (report.violations.size() < kMaxListedViolations) {
    report.violations.push_back(std::move(v));
  } else {
    ++report.unlisted;
  }
}

std::string describe(const Sparse& v) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : v) {
    os << (first ? "" : " + ") << c.get_str() << "*e" << k;
    first = false;
  }
  return first ? "0" : os.str();
}

// Lower central series by exact ranks; returns the length at which it
// reaches zero, or -1 if it stabilizes at a nonzero subspace.
int lower_central_length(const GradedAlgebra& alg) {
  const int n = alg.dim();
  RationalMatrix current;
  for (int a = 0; a < n; ++a) {
    std::vector<Rational> row(static_cast<std::size_t>(n));
    row[static_cast<std::size_t>(a)] = 1;
    current.push_back(std::move(row));
  }
  int previous_rank = n;
  for (int length = 1; length <= n + 1; ++length) {
    RationalMatrix next;
    for (int a = 0; a < n; ++a) {
      for (const auto& row : current) {
        Sparse v;
        for (int m = 0; m < n; ++m) {
          if (sgn(row[static_cast<std::size_t>(m)]) != 0) v[m] = row[static_cast<std::size_t>(m)];
        }
        const Sparse w = bracket_basis(alg, a, v);
        if (w.empty()) continue;
        std::vector<Rational> dense(static_cast<std::size_t>(n));
        for (const auto& [k, c] : w) dense[static_cast<std::size_t>(k)] = c;
        next.push_back(std::move(dense));
      }
    }
    Echelon e = row_reduce(std::move(next));
    const int r = static_cast<int>(e.rows.size());
    if (r == 0) return length;
    if (r == previous_rank) return -1;
    previous_rank = r;
    current = std::move(e.rows);
  }
  return -1;
}

}  // namespace

VerifyReport verify_algebra(const GradedAlgebra& alg) {
  VerifyReport report;
  report.stratified_flag = alg.is_stratified();
  const int n = alg.dim();

  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Sparse sum = basis_bracket(alg, a, b);
      for (const auto& [k, c] : basis_bracket(alg, b, a)) sum[k] += c;
      std::erase_if(sum, [](const auto& kv) { return sgn(kv.second) == 0; });
      if (!sum.empty()) {
        report.antisymmetry = false;
        record(report, {"antisymmetry", a, b, -1, "[e_i,e_j]+[e_j,e_i] = " + describe(sum)});
      }
    }
  }

  for (const auto& t : alg.structure()) {
    const int expected = alg.layer_of(t.i) + alg.layer_of(t.j);
    if (expected > alg.step() || alg.layer_of(t.k) != expected) {
      report.grading = false;
      std::ostringstream os;
      os << "[e" << t.i << ",e" << t.j << "] has coefficient " << t.value.get_str() << " on e" << t.k
         << " in layer " << alg.layer_of(t.k) << ", expected "
         << (expected > alg.step() ? std::string("zero bracket") : "layer " + std::to_string(expected));
      record(report, {"grading", t.i, t.j, t.k, os.str()});
    }
  }

  if (!alg.is_abelian()) {
    std::vector<std::vector<Sparse>> cache(static_cast<std::size_t>(n), std::vector<Sparse>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        cache[a][b] = basis_bracket(alg, a, b);
        Sparse neg = cache[a][b];
        for (auto& [k, c] : neg) c = -c;
        cache[b][a] = std::move(neg);
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          if (cache[b][c].empty() && cache[c][a].empty() && cache[a][b].empty()) continue;
          Sparse sum = bracket_basis(alg, a, cache[b][c]);
          for (const auto& [k, v] : bracket_basis(alg, b, cache[c][a])) sum[k] += v;
          for (const auto& [k, v] : bracket_basis(alg, c, cache[a][b])) sum[k] += v;
          std::erase_if(sum, [](const auto& kv) { return sgn(kv.second) == 0; });
          if (!sum.empty()) {
            report.jacobi = false;
            record(report, {"jacobi", a, b, c, "cyclic sum = " + describe(sum)});
          }
        }
      }
    }
  }

  // A valid grading with brackets vanishing past the step forces nilpotency.
  if (!report.grading) {
    const int length = lower_central_length(alg);
    if (length < 0) {
      report.nilpotent = false;
      record(report, {"nilpotency", -1, -1, -1, "lower central series stabilizes at a nonzero ideal"});
    }
  }

  for (int j = 1; j < alg.step(); ++j) {
    RationalMatrix rows;
    for (int a = alg.layer_begin(1); a < alg.layer_end(1); ++a) {
      for (int b = alg.layer_begin(j); b < alg.layer_end(j); ++b) {
        const Sparse v = basis_bracket(alg, a, b);
        std::vector<Rational> dense(static_cast<std::size_t>(alg.layer_dim(j + 1)));
        bool any = false;
        for (const auto& [k, c] : v) {
          if (alg.layer_of(k) == j + 1) {
            dense[static_cast<std::size_t>(k - alg.layer_begin(j + 1))] = c;
            any = true;
          }
        }
        if (any) rows.push_back(std::move(dense));
      }
    }
    const int r = rank(rows);
    if (r != alg.layer_dim(j + 1)) {
      report.rank_condition = false;
      if (report.stratified_flag) {
        record(report, {"stratification", j, j + 1, -1,
                        "[V_1,V_" + std::to_string(j) + "] has rank " + std::to_string(r) + ", layer " +
                            std::to_string(j + 1) + " has dimension " + std::to_string(alg.layer_dim(j + 1))});
      }
    }
  }
  return report;
}

}  // namespace carnot
