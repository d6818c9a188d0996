#include "carnot/linalg.hpp"

#include <utility>

namespace carnot {

Echelon row_reduce(RationalMatrix m) {
  Echelon out;
  if (m.empty()) return out;
  const std::size_t cols = m.front().size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.size() && sgn(m[pivot][col]) == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[row], m[pivot]);
    const Rational inv = 1 / m[row][col];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || sgn(m[r][col]) == 0) continue;
      const Rational factor = m[r][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    out.pivots.push_back(static_cast<int>(col));
    ++row;
  }
  m.resize(row);
  out.rows = std::move(m);
  return out;
}

int rank(const RationalMatrix& m) { return static_cast<int>(row_reduce(m).rows.size()); }

std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) return std::nullopt;
  const std::size_t n = a.empty() ? 0 : a.front().size();
  RationalMatrix aug = a;
  for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(b[r]);
  Echelon e = row_reduce(std::move(aug));
  std::vector<Rational> x(n, Rational(0));
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    const int p = e.pivots[r];
    if (static_cast<std::size_t>(p) == n) return std::nullopt;
    x[static_cast<std::size_t>(p)] = e.rows[r][n];
  }
  return x;
}

RationalMatrix transpose(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix t(m.front().size(), std::vector<Rational>(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m[r].size(); ++c) t[c][r] = m[r][c];
  }
  return t;
}

}  // namespace carnot
