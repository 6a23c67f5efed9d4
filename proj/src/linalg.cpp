#include "torix/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>

namespace torix {

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntVec IntMatrix::apply(const IntVec& v) const {
  if (v.size() != cols_)
    throw Error(ErrorCode::InvalidArgument, "matrix/vector size mismatch");
  IntVec out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::int64_t s = 0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_)
    throw Error(ErrorCode::InvalidArgument, "matrix size mismatch");
  IntMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const std::int64_t a = (*this)(r, k);
      if (a == 0) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

namespace linalg {

namespace {

void swap_rows(IntMatrix& m, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(i, c), m(j, c));
}

void swap_cols(IntMatrix& m, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, i), m(r, j));
}

// row_i += q * row_k
void add_row(IntMatrix& m, std::size_t i, std::size_t k, std::int64_t q) {
  for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) += q * m(k, c);
}

// col_j += q * col_k
void add_col(IntMatrix& m, std::size_t j, std::size_t k, std::int64_t q) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, j) += q * m(r, k);
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  SmithForm s{a, IntMatrix::identity(rows), IntMatrix::identity(rows),
              IntMatrix::identity(cols), {}};
  IntMatrix& d = s.d;

  // Row operation on D mirrored on U; inverse mirrored on U^{-1} as a column
  // operation.
  auto row_add = [&](std::size_t i, std::size_t k, std::int64_t q) {
    add_row(d, i, k, q);
    add_row(s.u, i, k, q);
    add_col(s.u_inv, k, i, -q);
  };
  auto row_swap = [&](std::size_t i, std::size_t k) {
    swap_rows(d, i, k);
    swap_rows(s.u, i, k);
    swap_cols(s.u_inv, i, k);
  };
  auto col_add = [&](std::size_t j, std::size_t k, std::int64_t q) {
    add_col(d, j, k, q);
    add_col(s.v, j, k, q);
  };
  auto col_swap = [&](std::size_t i, std::size_t k) {
    swap_cols(d, i, k);
    swap_cols(s.v, i, k);
  };

  const std::size_t diag = std::min(rows, cols);
  for (std::size_t k = 0; k < diag; ++k) {
    for (;;) {
      std::size_t pr = rows, pc = cols;
      std::int64_t best = 0;
      for (std::size_t r = k; r < rows; ++r)
        for (std::size_t c = k; c < cols; ++c) {
          const std::int64_t v = std::llabs(d(r, c));
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = r;
            pc = c;
          }
        }
      if (best == 0) break;
      row_swap(k, pr);
      col_swap(k, pc);

      bool dirty = false;
      for (std::size_t r = k + 1; r < rows; ++r) {
        const std::int64_t q = d(r, k) / d(k, k);
        if (q != 0) row_add(r, k, -q);
        if (d(r, k) != 0) dirty = true;
      }
      for (std::size_t c = k + 1; c < cols; ++c) {
        const std::int64_t q = d(k, c) / d(k, k);
        if (q != 0) col_add(c, k, -q);
        if (d(k, c) != 0) dirty = true;
      }
      if (dirty) continue;

      // Divisibility of the remaining block by the pivot.
      bool divides = true;
      for (std::size_t r = k + 1; r < rows && divides; ++r)
        for (std::size_t c = k + 1; c < cols; ++c)
          if (d(r, c) % d(k, k) != 0) {
            row_add(k, r, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d(k, k) < 0) {
      for (std::size_t c = 0; c < cols; ++c) d(k, c) = -d(k, c);
      for (std::size_t c = 0; c < rows; ++c) s.u(k, c) = -s.u(k, c);
      for (std::size_t r = 0; r < rows; ++r) s.u_inv(r, k) = -s.u_inv(r, k);
    }
    if (d(k, k) != 0) s.invariants.push_back(d(k, k));
  }
  return s;
}

std::int64_t determinant(const IntMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols())
    throw Error(ErrorCode::InvalidArgument, "determinant of non-square matrix");
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r][c] = a(r, c);
  __int128 prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * static_cast<std::int64_t>(m[n - 1][n - 1]);
}

IntMatrix inverse_unimodular(const IntMatrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::InvalidArgument, "inverse of non-square matrix");
  const SmithForm s = smith_normal_form(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (s.d(i, i) != 1)
      throw Error(ErrorCode::InvalidArgument, "matrix is not unimodular");
  // U A V = I  =>  A^{-1} = V U
  return s.v * s.u;
}

std::optional<IntVec> kernel_vector(const IntMatrix& a) {
  const std::size_t n = a.cols();
  if (a.rows() + 1 != n)
    throw Error(ErrorCode::InvalidArgument, "kernel_vector needs (n-1) x n");
  IntVec v(n);
  for (std::size_t j = 0; j < n; ++j) {
    IntMatrix minor(n - 1, n - 1);
    for (std::size_t r = 0; r + 1 < n; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) minor(r, cc++) = a(r, c);
    }
    const std::int64_t det = determinant(minor);
    v[j] = (j % 2 == 0) ? det : -det;
  }
  const std::int64_t g = gcd(v);
  if (g == 0) return std::nullopt;
  for (auto& x : v) x /= g;
  return v;
}

std::optional<std::vector<Rational>> solve(const IntMatrix& a, const IntVec& b) {
  const std::size_t n = a.rows();
  if (n != a.cols() || b.size() != n)
    throw Error(ErrorCode::InvalidArgument, "solve: size mismatch");
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r][c] = a(r, c);
    m[r][n] = b[r];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m[p][k] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[k], m[p]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k || m[r][k] == 0) continue;
      const Rational f = m[r][k] / m[k][k];
      for (std::size_t c = k; c <= n; ++c) m[r][c] -= f * m[k][c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = m[k][n] / m[k][k];
  return x;
}

std::optional<std::vector<double>> solve(std::vector<std::vector<double>> a,
                                         std::vector<double> b) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  const double eps = 1e-12 * std::max(scale, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::fabs(a[r][k]) > std::fabs(a[p][k])) p = r;
    if (std::fabs(a[p][k]) <= eps) return std::nullopt;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a[r][k] / a[k][k];
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

bool rows_extend_to_basis(const IntMatrix& rows) {
  if (rows.rows() == 0) return true;
  if (rows.rows() > rows.cols()) return false;
  const SmithForm s = smith_normal_form(rows);
  if (s.invariants.size() != rows.rows()) return false;
  for (auto d : s.invariants)
    if (d != 1) return false;
  return true;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  return std::gcd(a, b);
}

std::int64_t gcd(const IntVec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x);
  return g;
}

}  // namespace linalg
}  // namespace torix
