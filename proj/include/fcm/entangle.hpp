#pragma once

#include <vector>

#include "fcm/linalg.hpp"
#include "fcm/model.hpp"
#include "fcm/solve.hpp"

namespace fcm {

struct SchmidtSpectrum {
    Bipartition bipartition;
    RVec lambda; // descending singular values
};

// Schmidt coefficients of |psi> across bipartition.a vs bipartition.b.
SchmidtSpectrum schmidt(const Vec& psi, const std::vector<int>& dims, const Bipartition& bp);

// von Neumann entropy in nats, S = -sum lambda^2 ln lambda^2.
double entropy(const SchmidtSpectrum& spec);
double entropy_from_singular_values(const RVec& lambda);
double entropy_from_probabilities(const RVec& p);

// Half-system entropy of a permutation-symmetric state via the
// hypergeometric splitting of collective basis states (log-space binomials).
double dicke_half_entropy(const DickeState& ds);

// Entropy of `region` (mode indices) from a Majorana covariance matrix.
double fermion_half_entropy(const CovarianceState& cs, const std::vector<int>& region);

// Partial trace onto `region` (ascending site order).
Mat reduced_density(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& region);

// ||rho - sigma||_1 via Hermitian eigendecomposition.
double trace_distance(const Mat& rho, const Mat& sigma);

// ||M M^† - N N^†||_1 from factors (cheap when ranks are small).
double trace_distance_factored(const Mat& m, const Mat& n);

struct MatrixProductState {
    std::vector<int> sites;  // original site labels in MPS order
    std::vector<int> dims;   // physical dimension per tensor
    // tensor t: (bond_left * d) x bond_right, left-canonical
    std::vector<Mat> tensors;
    std::vector<int> bond;   // bond[c] = dimension of cut c (size n-1)
    std::vector<double> discarded; // per-cut discarded Schmidt weight
    int max_bond = 0;
};

// Sequential left-to-right SVD compression at bond dimension D. `order`
// permutes the sites before compression (empty = natural order).
MatrixProductState to_mps(const Vec& psi, const std::vector<int>& dims, int D,
                          const std::vector<int>& order = {});

Vec mps_reconstruct(const MatrixProductState& mps);

// Factor N with tr_{X^c}|mps><mps| = N N^†, X = [first, last] contiguous
// in MPS order. Uses left-canonical structure plus a right environment;
// does not reconstruct the full state.
Mat mps_region_factor(const MatrixProductState& mps, int first, int last);

struct RegionCheck {
    double lhs = 0.0; // || tr_{X^c} rho_D - tr_{X^c} rho ||_1
    int region_size = 0;
};

RegionCheck mps_region_check(const MatrixProductState& mps, const Vec& exact,
                             const std::vector<int>& dims, int first, int last);

} // namespace fcm
