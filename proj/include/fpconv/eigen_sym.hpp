#ifndef FPCONV_EIGEN_SYM_HPP
#define FPCONV_EIGEN_SYM_HPP

#include <vector>

namespace fpconv {

// Eigenvalues of a dense symmetric matrix (row-major, n x n), ascending.
// Householder reduction to tridiagonal form followed by implicit-shift QL;
// the matrix is consumed. O(n^3), adequate for n <= a few thousand.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// QL with implicit shifts on a symmetric tridiagonal matrix given by its
// diagonal d and subdiagonal e (e[0] unused). Overwrites d with the
// eigenvalues, unsorted.
void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e);

} // namespace fpconv

#endif
