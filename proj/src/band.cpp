#include "pifo/band.hpp"

#include <cmath>
#include <stdexcept>

namespace pifo {

namespace {

void check_row(const BandSpec& spec, int l) {
  if (l < 1 || l > spec.m) throw std::out_of_range("band row index out of range");
}

}  // namespace

Vec row_vector(const BandSpec& spec, int l) {
  check_row(spec, l);
  Vec b(spec.m, 0.0);
  if (l == spec.m) {
    b[0] = spec.omega;
  } else {
    b[spec.m - l - 1] = -1.0;  // coordinate m-l
    b[spec.m - l] = 1.0;       // coordinate m-l+1
  }
  return b;
}

double row_dot(const BandSpec& spec, int l, const Vec& x) {
  check_row(spec, l);
  if (l == spec.m) return spec.omega * x[0];
  return x[spec.m - l] - x[spec.m - l - 1];
}

double row_norm2(const BandSpec& spec, int l) {
  check_row(spec, l);
  return l == spec.m ? spec.omega * spec.omega : 2.0;
}

void row_axpy(const BandSpec& spec, int l, double a, Vec& y) {
  check_row(spec, l);
  if (l == spec.m) {
    y[0] += a * spec.omega;
  } else {
    y[spec.m - l - 1] -= a;
    y[spec.m - l] += a;
  }
}

RowPartition partition_rows(const BandSpec& spec) {
  RowPartition part;
  part.m = spec.m;
  part.n = spec.n;
  part.groups.assign(spec.n, {});
  for (int l = 1; l <= spec.m; ++l) {
    const int i = (l % spec.n) + 1;  // l = i-1 (mod n)
    part.groups[i - 1].push_back(l);
  }
  return part;
}

RowPartition partition_rows_head(const BandSpec& spec) {
  RowPartition part;
  part.m = spec.m;
  part.n = spec.n;
  part.groups.assign(spec.n, {});
  // The row supported on coordinates {s, s+1} joins group s+1 (mod n), so
  // from the head subspace of depth k only group k+1 (mod n) can advance the
  // depth; the corner row (support {1}) joins group 1 and never advances it.
  for (int l = 1; l <= spec.m; ++l) {
    const int r = (spec.m + 1 - l) % spec.n;
    const int i = (r == 0) ? spec.n : r;
    part.groups[i - 1].push_back(l);
  }
  return part;
}

Vec apply_group_gram(const BandSpec& spec, const RowPartition& part, int i,
                     const Vec& x) {
  if (i < 1 || i > part.n) throw std::out_of_range("group index out of range");
  Vec out(spec.m, 0.0);
  for (int l : part.groups[i - 1]) {
    const double c = row_dot(spec, l, x);
    if (c != 0.0) row_axpy(spec, l, c, out);
  }
  return out;
}

Vec solve_shifted_group_gram(const BandSpec& spec, const RowPartition& part,
                             int i, double c2, const Vec& y) {
  if (i < 1 || i > part.n) throw std::out_of_range("group index out of range");
  // (I + c2 B^T B)^{-1} = I - B^T (c2^{-1} I + B B^T)^{-1} B, and B B^T is
  // diag(||b_l||^2) here, so the correction is one rank-1 update per row.
  Vec out = y;
  const double inv_c2 = 1.0 / c2;
  for (int l : part.groups[i - 1]) {
    const double c = row_dot(spec, l, y);
    if (c != 0.0) row_axpy(spec, l, -c / (inv_c2 + row_norm2(spec, l)), out);
  }
  return out;
}

int subspace_index(const Vec& x, Orientation orient, double tol) {
  const int m = static_cast<int>(x.size());
  const double thresh = tol * (1.0 + norm_inf(x));
  if (orient == Orientation::tail) {
    // x in F_k iff coordinates 1..m-k vanish; find the first nonzero.
    for (int j = 0; j < m; ++j) {
      if (std::abs(x[j]) > thresh) return m - j;
    }
    return 0;
  }
  // head: x in G_k iff coordinates k+1..m vanish; find the last nonzero.
  for (int j = m - 1; j >= 0; --j) {
    if (std::abs(x[j]) > thresh) return j + 1;
  }
  return 0;
}

}  // namespace pifo
