#pragma once

#include <cstdint>
#include <functional>

#include "fcm/linalg.hpp"
#include "fcm/model.hpp"

namespace fcm {

inline constexpr double kDegeneracyThreshold = 1e-10;

enum class StateRep { FullVector, DickeCoefficients, Covariance };

struct GroundStateSolution {
    StateRep rep = StateRep::FullVector;
    Vec state;             // ground vector (FullVector rep)
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;      // e1 - e0
    double residual = 0.0; // ||H v - e0 v||
    bool degenerate = false; // gap below the degeneracy threshold
};

using MatVecFn = std::function<Vec(const Vec&)>;

struct LanczosOptions {
    double tol = 1e-10;
    int max_iter = 400;
    std::uint64_t seed = 1;
};

// --- dense route ------------------------------------------------------------

GroundStateSolution solve_dense(const FullyConnectedHamiltonian& h,
                                std::int64_t dense_limit = kDefaultDenseLimit);
// Same contract for an explicit Hermitian matrix (drops to a real solver
// when the matrix is numerically real).
GroundStateSolution solve_dense_matrix(const Mat& h);

// --- Lanczos ----------------------------------------------------------------

GroundStateSolution solve_lanczos(std::int64_t dim, const MatVecFn& apply,
                                  const LanczosOptions& opts = {});
GroundStateSolution solve_lanczos(const FullyConnectedHamiltonian& h,
                                  const LanczosOptions& opts = {});

// Extreme eigenvalues (lowest, highest); used for operator norms.
std::pair<double, double> lanczos_extremes(std::int64_t dim, const MatVecFn& apply,
                                           const LanczosOptions& opts = {});

// --- collective-spin route ---------------------------------------------------

struct DickeState {
    int n = 0;
    RVec c; // coefficients over |D_k^n>, k = 0..n
};

struct DickeSolution {
    DickeState state;
    double e0 = 0.0;
    double e1 = 0.0;  // within the maximal-spin sector
    double gap = 0.0; // sector gap
    bool cross_checked = false;       // dense comparison performed (small n)
    bool sector_gap_is_global = false; // sector gap equals the global gap
};

DickeSolution solve_lmg_dicke(int n, double gamma, double h);

// --- fermions ----------------------------------------------------------------

struct CovarianceState {
    int n = 0;
    RMat gamma; // 2n x 2n real antisymmetric Majorana covariance
    RVec eps;   // quasiparticle energies, ascending, all >= 0
    double e0 = 0.0;
    double gap = 0.0;
};

// `parity_strict = true` reports the two-quasiparticle gap eps_1 + eps_2.
CovarianceState solve_fermion(const FermionModel& m, bool parity_strict = false);

// Brute-force oracle route on the 2^n Fock space (n <= ~12).
struct FockSolution {
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    Vec ground; // occupation-basis vector, mode 0 most significant
};

FockSolution solve_fermion_fock(const FermionModel& m,
                                std::int64_t dense_limit = kDefaultDenseLimit);

} // namespace fcm
