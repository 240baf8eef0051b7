#include "pifo/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "pifo/instances.hpp"

namespace pifo::dense {

Mat zeros(int rows, int cols) { return Mat(rows, Vec(cols, 0.0)); }

Mat band_matrix(const BandSpec& spec) {
  Mat b = zeros(spec.m, spec.m);
  for (int l = 1; l <= spec.m; ++l) b[l - 1] = row_vector(spec, l);
  return b;
}

Mat tridiag_gram_reference(int m, double omega) {
  Mat a = zeros(m, m);
  for (int j = 0; j < m; ++j) {
    a[j][j] = 2.0;
    if (j > 0) a[j][j - 1] = -1.0;
    if (j + 1 < m) a[j][j + 1] = -1.0;
  }
  a[0][0] = omega * omega + 1.0;
  a[m - 1][m - 1] = 1.0;
  if (m == 1) a[0][0] = omega * omega;  // degenerate single-row case
  return a;
}

Mat transpose(const Mat& a) {
  const int r = static_cast<int>(a.size());
  const int c = static_cast<int>(a[0].size());
  Mat t = zeros(c, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) t[j][i] = a[i][j];
  return t;
}

Mat matmul(const Mat& a, const Mat& b) {
  const int r = static_cast<int>(a.size());
  const int k = static_cast<int>(b.size());
  const int c = static_cast<int>(b[0].size());
  Mat out = zeros(r, c);
  for (int i = 0; i < r; ++i)
    for (int l = 0; l < k; ++l) {
      const double v = a[i][l];
      if (v == 0.0) continue;
      for (int j = 0; j < c; ++j) out[i][j] += v * b[l][j];
    }
  return out;
}

Vec matvec(const Mat& a, const Vec& x) {
  Vec out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = dot(a[i], x);
  return out;
}

Mat group_gram(const BandSpec& spec, const RowPartition& part, int i) {
  Mat out = zeros(spec.m, spec.m);
  for (int l : part.groups[i - 1]) {
    const Vec b = row_vector(spec, l);
    for (int r = 0; r < spec.m; ++r)
      for (int c = 0; c < spec.m; ++c) out[r][c] += b[r] * b[c];
  }
  return out;
}

Vec solve(Mat a, Vec b) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular dense system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h) {
  Vec g(x.size(), 0.0);
  Vec xp = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double orig = xp[j];
    xp[j] = orig + h;
    const double fp = f(xp);
    xp[j] = orig - h;
    const double fm = f(xp);
    xp[j] = orig;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double fm, double whole, double tol,
                int depth, int force) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  // the first few levels split unconditionally: smooth integrands can agree
  // exactly at coarse nodes by accident
  if (depth <= 0 ||
      (force <= 0 && std::abs(left + right - whole) <= 15.0 * tol)) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1, force - 1) +
         adaptive(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1, force - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive(f, a, fa, b, fb, fm, whole, tol, 60, 6);
}

Mat full_hessian(const HardInstance& inst) {
  if (!inst.is_quadratic())
    throw std::runtime_error("dense hessian requires a quadratic family");
  const int m = inst.m;
  const Mat b = band_matrix(inst.band);
  Mat h = matmul(transpose(b), b);
  const double c = 2.0 * inst.lambda1 / inst.n;
  for (int r = 0; r < m; ++r) {
    for (int col = 0; col < m; ++col) h[r][col] *= c;
    h[r][r] += 2.0 * inst.lambda2;
  }
  return h;
}

Vec normal_rhs(const HardInstance& inst) {
  Vec rhs(inst.m, 0.0);
  rhs[inst.m - 1] = inst.lambda0 / inst.n;
  return rhs;
}

Vec dense_minimizer(const HardInstance& inst) {
  return solve(full_hessian(inst), normal_rhs(inst));
}

Vec dense_restricted_minimizer(const HardInstance& inst, int k) {
  const int m = inst.m;
  Vec x(m, 0.0);
  if (k == 0) return x;
  const Mat h = full_hessian(inst);
  Mat hk = zeros(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) hk[r][c] = h[m - k + r][m - k + c];
  Vec rhs(k, 0.0);
  rhs[k - 1] = inst.lambda0 / inst.n;
  const Vec y = solve(std::move(hk), std::move(rhs));
  for (int r = 0; r < k; ++r) x[m - k + r] = y[r];
  return x;
}

Vec dense_component_prox(const HardInstance& inst, int i, const Vec& x,
                         double gamma) {
  if (!inst.is_quadratic())
    throw std::runtime_error("dense prox oracle requires a quadratic family");
  const int m = inst.m;
  Mat a = group_gram(inst.band, inst.part, i);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) a[r][c] *= 2.0 * inst.lambda1;
    a[r][r] += 2.0 * inst.lambda2 + 1.0 / gamma;
  }
  Vec rhs(m);
  for (int j = 0; j < m; ++j) rhs[j] = x[j] / gamma;
  if (i == 1) rhs[m - 1] += inst.lambda0;
  return solve(std::move(a), std::move(rhs));
}

}  // namespace pifo::dense
