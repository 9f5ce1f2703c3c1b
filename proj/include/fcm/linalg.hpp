#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace fcm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline bool is_hermitian(const Mat& a, double tol = 1e-12) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

Mat kron(const Mat& a, const Mat& b);

// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double opnorm(const Mat& a);

// Total Hilbert-space dimension of a list of local dimensions.
std::int64_t total_dim(const std::vector<int>& dims);

// Apply a single-site operator in place: psi <- (1 x .. x op x .. x 1) psi.
// Site 0 is the most significant index (matches kron in site order).
void apply_site_op(Vec& psi, const std::vector<int>& dims, int site, const Mat& op);

// Reshape |psi> into a matrix with row index running over the sites in
// `region` (in the given order) and column index over the remaining sites
// (in ascending site order).
Mat reshape_region(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& region);

// Reduced density matrix of `region` (ascending site order) from a pure state.
Mat reduced_density_from_state(const Vec& psi, const std::vector<int>& dims,
                               const std::vector<int>& region);

// Extend an orthonormal set of columns to a full unitary (columns 0..r-1
// are the input columns, the rest an orthonormal complement).
Mat complete_basis(const Mat& columns);

} // namespace fcm
