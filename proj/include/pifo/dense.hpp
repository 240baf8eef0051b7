#pragma once

// Dense brute-force counterparts of the structured operations. These exist
// solely as independent oracles for tests and the `verify` suites; nothing in
// a hot path may call them.

#include <functional>

#include "pifo/band.hpp"
#include "pifo/vec.hpp"

namespace pifo::dense {

using Mat = std::vector<Vec>;

Mat zeros(int rows, int cols);

// Band matrix assembled row by row from row_vector.
Mat band_matrix(const BandSpec& spec);

// The tridiagonal gram written out directly from its entries, independent of
// the row representation: diag(omega^2+1, 2, ..., 2, 1), off-diagonals -1.
Mat tridiag_gram_reference(int m, double omega);

Mat transpose(const Mat& a);
Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);

// B_i^T B_i for one row group, assembled densely.
Mat group_gram(const BandSpec& spec, const RowPartition& part, int i);

// Gaussian elimination with partial pivoting; a is copied.
Vec solve(Mat a, Vec b);

// Largest |a_ij - b_ij|.
double max_abs_diff(const Mat& a, const Mat& b);

// Central finite differences with per-coordinate step h.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h);

// Adaptive Simpson quadrature to the requested absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

}  // namespace pifo::dense

namespace pifo {
struct HardInstance;
}

namespace pifo::dense {

// Hessian and stationarity right-hand side of the averaged objective of a
// quadratic-family instance, assembled densely.
Mat full_hessian(const HardInstance& inst);
Vec normal_rhs(const HardInstance& inst);

// Minimizer from a dense solve of the normal equations.
Vec dense_minimizer(const HardInstance& inst);

// Minimizer over the depth-k tail subspace, embedded back into R^m.
Vec dense_restricted_minimizer(const HardInstance& inst, int k);

// Dense solve of the prox normal equations of component i (quadratic
// families).
Vec dense_component_prox(const HardInstance& inst, int i, const Vec& x,
                         double gamma);

}  // namespace pifo::dense
