#include "fcm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace fcm {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double opnorm(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::int64_t total_dim(const std::vector<int>& dims) {
    std::int64_t d = 1;
    for (int x : dims) d *= x;
    return d;
}

void apply_site_op(Vec& psi, const std::vector<int>& dims, int site, const Mat& op) {
    const int d = dims[site];
    if (op.rows() != d || op.cols() != d) throw std::invalid_argument("apply_site_op: shape");
    std::int64_t inner = 1; // stride of the site index
    for (std::size_t j = site + 1; j < dims.size(); ++j) inner *= dims[j];
    const std::int64_t dim = psi.size();
    const std::int64_t block = inner * d;
    Vec tmp(d);
    for (std::int64_t base = 0; base < dim; base += block) {
        for (std::int64_t in = 0; in < inner; ++in) {
            for (int s = 0; s < d; ++s) tmp(s) = psi(base + s * inner + in);
            for (int s = 0; s < d; ++s) {
                cplx acc = 0.0;
                for (int t = 0; t < d; ++t) acc += op(s, t) * tmp(t);
                psi(base + s * inner + in) = acc;
            }
        }
    }
}

Mat reshape_region(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& region) {
    const int n = static_cast<int>(dims.size());
    std::vector<bool> in_region(n, false);
    for (int s : region) in_region[s] = true;

    // strides in the flat index (site 0 most significant)
    std::vector<std::int64_t> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    std::int64_t drow = 1;
    for (int s : region) drow *= dims[s];
    std::int64_t dcol = psi.size() / drow;

    // row/col strides for each site in the respective ordering
    std::vector<std::int64_t> row_stride(n, 0), col_stride(n, 0);
    {
        std::int64_t acc = 1;
        for (auto it = region.rbegin(); it != region.rend(); ++it) {
            row_stride[*it] = acc;
            acc *= dims[*it];
        }
        acc = 1;
        for (int s = n - 1; s >= 0; --s) {
            if (in_region[s]) continue;
            col_stride[s] = acc;
            acc *= dims[s];
        }
    }

    Mat out(drow, dcol);
    const std::int64_t dim = psi.size();
    std::vector<int> idx(n, 0);
    for (std::int64_t x = 0; x < dim; ++x) {
        std::int64_t r = 0, c = 0, rem = x;
        for (int s = 0; s < n; ++s) {
            int v = static_cast<int>(rem / stride[s]);
            rem %= stride[s];
            if (in_region[s]) r += v * row_stride[s];
            else c += v * col_stride[s];
        }
        out(r, c) = psi(x);
    }
    return out;
}

Mat reduced_density_from_state(const Vec& psi, const std::vector<int>& dims,
                               const std::vector<int>& region) {
    Mat m = reshape_region(psi, dims, region);
    return m * m.adjoint();
}

Mat complete_basis(const Mat& columns) {
    const Eigen::Index d = columns.rows();
    const Eigen::Index r = columns.cols();
    Mat u = Mat::Zero(d, d);
    u.leftCols(r) = columns;
    Eigen::Index filled = r;
    for (Eigen::Index e = 0; e < d && filled < d; ++e) {
        Vec v = Vec::Zero(d);
        v(e) = 1.0;
        for (Eigen::Index j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
        double nrm = v.norm();
        if (nrm > 1e-8) {
            // second pass for numerical orthogonality
            for (Eigen::Index j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
            u.col(filled++) = v / v.norm();
        }
    }
    if (filled != d) throw std::runtime_error("complete_basis: could not extend");
    return u;
}

} // namespace fcm
