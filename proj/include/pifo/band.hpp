#pragma once

#include <vector>

#include "pifo/vec.hpp"

namespace pifo {

// Bidiagonal-with-corner band matrix of size m x m: row l (1 <= l < m) has
// -1 at coordinate m-l and +1 at coordinate m-l+1; row m is omega * e_1.
// Its gram is the tridiagonal matrix diag(omega^2+1, 2, ..., 2, 1) with -1
// off-diagonals.
//
// Index conventions, used everywhere in this library: rows l and component
// groups i are 1-based; vector coordinates are stored 0-based, so the
// 1-based coordinate c lives at x[c-1].
struct BandSpec {
  int m = 0;        // matrix dimension
  double omega = 0.0;
  int n = 2;        // number of row groups
};

struct RowPartition {
  int m = 0;
  int n = 0;
  std::vector<std::vector<int>> groups;  // groups[i-1] = sorted 1-based rows of group i
};

enum class Orientation {
  tail,  // k-dimensional subspace = span of the last k coordinates
  head,  // k-dimensional subspace = span of the first k coordinates
};

// Dense row b_l. Exists for tests and dense fallbacks; hot paths use the
// structural helpers below.
Vec row_vector(const BandSpec& spec, int l);

// b_l^T x without materializing the row.
double row_dot(const BandSpec& spec, int l, const Vec& x);

// ||b_l||^2: 2 for l < m, omega^2 for l = m.
double row_norm2(const BandSpec& spec, int l);

// y += a * b_l
void row_axpy(const BandSpec& spec, int l, double a, Vec& y);

// Groups rows by l = i-1 (mod n). Rows within a group are >= n apart, so
// their supports never overlap.
RowPartition partition_rows(const BandSpec& spec);

// Groups rows by m-l = i (mod n), the convention paired with head
// orientation. Covers all m rows; the corner row lands in group n.
RowPartition partition_rows_head(const BandSpec& spec);

// sum_{l in group i} (b_l^T x) b_l in O(|group| + m).
Vec apply_group_gram(const BandSpec& spec, const RowPartition& part, int i,
                     const Vec& x);

// (I + c2 * B_i^T B_i)^{-1} y for c2 > 0 via the Woodbury identity; B_i B_i^T
// is diagonal because rows within a group have disjoint supports.
Vec solve_shifted_group_gram(const BandSpec& spec, const RowPartition& part,
                             int i, double c2, const Vec& y);

// Smallest k such that x lies in the k-dimensional subspace of the given
// orientation up to |coord| <= tol * (1 + max|x|). Returns 0 for the zero
// vector.
int subspace_index(const Vec& x, Orientation orient, double tol = 1e-12);

}  // namespace pifo
