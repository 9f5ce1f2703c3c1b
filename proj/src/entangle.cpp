#include "fcm/entangle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace fcm {

namespace {

double xlogx(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

double log_binom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

SchmidtSpectrum schmidt(const Vec& psi, const std::vector<int>& dims, const Bipartition& bp) {
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("schmidt: state not normalized");
    Mat m = reshape_region(psi, dims, bp.a);
    Eigen::BDCSVD<Mat> svd(m);
    SchmidtSpectrum out;
    out.bipartition = bp;
    out.lambda = svd.singularValues(); // descending by construction
    return out;
}

double entropy_from_singular_values(const RVec& lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) s += xlogx(lambda(i) * lambda(i));
    return s;
}

double entropy(const SchmidtSpectrum& spec) { return entropy_from_singular_values(spec.lambda); }

double entropy_from_probabilities(const RVec& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) s += xlogx(std::max(0.0, p(i)));
    return s;
}

double dicke_half_entropy(const DickeState& ds) {
    const int n = ds.n;
    if (n % 2 != 0) throw std::invalid_argument("dicke_half_entropy: n must be even");
    const int half = n / 2;
    // |D_k^n> splits into half-chain collective states with hypergeometric
    // amplitudes sqrt(C(n/2,k1) C(n/2,k2) / C(n,k1+k2))
    RMat m(half + 1, half + 1);
    for (int k1 = 0; k1 <= half; ++k1)
        for (int k2 = 0; k2 <= half; ++k2) {
            double lw = 0.5 * (log_binom(half, k1) + log_binom(half, k2) - log_binom(n, k1 + k2));
            m(k1, k2) = ds.c(k1 + k2) * std::exp(lw);
        }
    Eigen::BDCSVD<RMat> svd(m);
    return entropy_from_singular_values(svd.singularValues());
}

double fermion_half_entropy(const CovarianceState& cs, const std::vector<int>& region) {
    if (region.empty() || static_cast<int>(region.size()) >= cs.n)
        throw std::invalid_argument("fermion_half_entropy: region must be a proper subset");
    const int r = static_cast<int>(region.size());
    RMat g(2 * r, 2 * r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    g(2 * a + s, 2 * b + t) = cs.gamma(2 * region[a] + s, 2 * region[b] + t);
    Mat ig = cplx(0, 1) * g.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Mat> es(ig, Eigen::EigenvaluesOnly);
    // spectrum is +-nu_j; each pair contributes the binary entropy of (1+nu)/2
    double s = 0.0;
    for (int j = r; j < 2 * r; ++j) {
        double nu = std::clamp(es.eigenvalues()(j), 0.0, 1.0);
        double p = 0.5 * (1.0 + nu);
        s += xlogx(p) + xlogx(1.0 - p);
    }
    return s;
}

Mat reduced_density(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& region) {
    if (region.empty()) throw std::invalid_argument("reduced_density: empty region");
    std::vector<int> sorted = region;
    std::sort(sorted.begin(), sorted.end());
    return reduced_density_from_state(psi, dims, sorted);
}

double trace_distance(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(sigma.trace().real() - 1.0) > 1e-8)
        throw std::invalid_argument("trace_distance: inputs must have unit trace");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho - sigma, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance_factored(const Mat& m, const Mat& n) {
    const Eigen::Index c1 = m.cols(), c2 = n.cols();
    Mat x(m.rows(), c1 + c2);
    x << m, n;
    // X = QR: M M^† - N N^† = Q (R S R^†) Q^† with S = diag(I, -I), so the
    // nonzero spectrum is that of the small Hermitian matrix R S R^†
    Eigen::HouseholderQR<Mat> qr(x);
    Mat r = qr.matrixQR().topRows(std::min<Eigen::Index>(x.rows(), c1 + c2))
                .triangularView<Eigen::Upper>();
    Mat rs = r;
    rs.rightCols(c2) *= -1.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(rs * r.adjoint(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

MatrixProductState to_mps(const Vec& psi, const std::vector<int>& dims, int D,
                          const std::vector<int>& order) {
    if (D < 1) throw std::invalid_argument("to_mps: D >= 1 required");
    const int n = static_cast<int>(dims.size());
    std::vector<int> perm = order;
    if (perm.empty())
        for (int i = 0; i < n; ++i) perm.push_back(i);
    if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("to_mps: bad order");

    MatrixProductState mps;
    mps.sites = perm;
    for (int s : perm) mps.dims.push_back(dims[s]);
    mps.max_bond = D;

    // permute amplitudes into MPS order
    Vec cur = reshape_region(psi, dims, perm).col(0);

    std::int64_t rest = cur.size();
    int bond_left = 1;
    for (int site = 0; site < n; ++site) {
        const int d = mps.dims[site];
        rest /= d;
        Mat m = Eigen::Map<const Mat>(cur.data(), rest, static_cast<std::int64_t>(bond_left) * d)
                    .transpose(); // rows (bond_left*d), cols rest -- see note below
        // Note: cur is row-major in (bond_left, d, rest) with `rest` fastest;
        // Map as (rest, bond_left*d) column-major then transpose.
        if (site == n - 1) {
            mps.tensors.push_back(m); // rest == 1 here
            break;
        }
        Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec& sv = svd.singularValues();
        int full = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-14) ++full;
        int keep = std::min(D, std::max(1, full));
        double discarded = 0.0;
        for (Eigen::Index i = keep; i < sv.size(); ++i) discarded += sv(i) * sv(i);
        mps.discarded.push_back(discarded);
        mps.bond.push_back(keep);
        mps.tensors.push_back(svd.matrixU().leftCols(keep));
        RVec kept = sv.head(keep);
        kept /= kept.norm(); // renormalize the retained block
        Mat next = kept.asDiagonal() * svd.matrixV().leftCols(keep).adjoint(); // keep x rest
        // repack into (keep, rest) with rest fastest: next is keep x rest
        Mat nt = next.transpose();
        cur = Eigen::Map<const Vec>(nt.data(), nt.size());
        bond_left = keep;
    }
    return mps;
}

Vec mps_reconstruct(const MatrixProductState& mps) {
    const int n = static_cast<int>(mps.dims.size());
    Mat left = Mat::Identity(1, 1); // (phys so far) x bond
    std::int64_t phys = 1;
    for (int site = 0; site < n; ++site) {
        const int d = mps.dims[site];
        const Mat& t = mps.tensors[site]; // (bond_left*d) x bond_right
        const std::int64_t bl = t.rows() / d;
        const std::int64_t br = t.cols();
        Mat next = Mat::Zero(phys * d, br);
        for (int s = 0; s < d; ++s) {
            Mat blk(bl, br); // A[:, s, :]
            for (std::int64_t a = 0; a < bl; ++a) blk.row(a) = t.row(a * d + s);
            Mat contrib = left * blk; // phys x br
            for (std::int64_t p = 0; p < phys; ++p) next.row(p * d + s) = contrib.row(p);
        }
        phys *= d;
        left = next;
    }
    return left.col(0);
}

Mat mps_region_factor(const MatrixProductState& mps, int first, int last) {
    const int n = static_cast<int>(mps.dims.size());
    if (first < 0 || last >= n || first > last)
        throw std::invalid_argument("mps_region_factor: bad region");
    // right environment: R_j = tr over sites > j of the right part
    std::vector<Mat> renv(n + 1);
    renv[n] = Mat::Identity(1, 1);
    for (int j = n - 1; j >= 0; --j) {
        const Mat& t = mps.tensors[j];
        const int d = mps.dims[j];
        const std::int64_t bl = t.rows() / d;
        Mat acc = Mat::Zero(bl, bl);
        for (int s = 0; s < d; ++s) {
            Mat blk(bl, t.cols());
            for (std::int64_t a = 0; a < bl; ++a) blk.row(a) = t.row(a * d + s);
            acc += blk * renv[j + 1] * blk.adjoint();
        }
        renv[j] = acc;
    }

    // transfer map T: (bond_{first-1} x phys_X x bond_last) built by
    // sequential contraction over the region
    std::int64_t bl0 = mps.tensors[first].rows() / mps.dims[first];
    Mat t = Mat::Identity(bl0, bl0); // rows: (bl0 * phys), cols: current bond
    std::int64_t phys = 1;
    for (int j = first; j <= last; ++j) {
        const Mat& a = mps.tensors[j];
        const int d = mps.dims[j];
        const std::int64_t bl = a.rows() / d;
        const std::int64_t br = a.cols();
        Mat next = Mat::Zero(bl0 * phys * d, br);
        for (std::int64_t r = 0; r < bl0 * phys; ++r)
            for (int s = 0; s < d; ++s) {
                for (std::int64_t b = 0; b < br; ++b) {
                    cplx acc = 0.0;
                    for (std::int64_t m = 0; m < bl; ++m)
                        acc += t(r, m) * a(m * d + s, b);
                    next(r * d + s, b) = acc;
                }
            }
        t = next;
        phys *= d;
    }
    // rho_X = (I_bl0 traced) ... : rows of t are (alpha, x); left-canonical
    // part gives sum over alpha; columns close on the right environment.
    // N[(x), (alpha, k)] with rho = N N^†:
    Eigen::SelfAdjointEigenSolver<Mat> es(renv[last + 1]);
    Mat sqrt_r = es.eigenvectors() *
                 es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                 es.eigenvectors().adjoint();
    Mat tr = t * sqrt_r; // rows (alpha, x), cols beta
    std::int64_t br = tr.cols();
    Mat nfac(phys, bl0 * br);
    for (std::int64_t alpha = 0; alpha < bl0; ++alpha)
        for (std::int64_t x = 0; x < phys; ++x)
            for (std::int64_t b = 0; b < br; ++b)
                nfac(x, alpha * br + b) = tr(alpha * phys + x, b);
    return nfac;
}

RegionCheck mps_region_check(const MatrixProductState& mps, const Vec& exact,
                             const std::vector<int>& dims, int first, int last) {
    // region in original site labels (MPS order is a permutation)
    std::vector<int> region;
    for (int j = first; j <= last; ++j) region.push_back(mps.sites[j]);
    Mat m = reshape_region(exact, dims, region); // exact factor: rho = M M^†
    Mat n = mps_region_factor(mps, first, last);
    RegionCheck out;
    out.lhs = trace_distance_factored(m, n);
    out.region_size = last - first + 1;
    return out;
}

} // namespace fcm
