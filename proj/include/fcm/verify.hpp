#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fcm/linalg.hpp"
#include "fcm/mfrg.hpp"
#include "fcm/model.hpp"
#include "fcm/solve.hpp"

namespace fcm {

// Global inequality slack: proofs carry real-arithmetic slack, so a fixed
// tolerance absorbs floating-point noise without ever tightening a bound.
inline constexpr double kCheckSlack = 1e-9;

struct CheckReport {
    std::string check;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    bool satisfied = false;
    bool preconditions_met = true;
};

CheckReport make_report(const std::string& check, const std::string& instance, double lhs,
                        double rhs, bool preconditions_met = true);

// Shared instance constants for bound formulas.
struct VerifyContext {
    int n = 0;
    int k = 2;
    double g1 = 0.0;
    double gbar1 = 0.0;
    double gap = 0.0;
};

VerifyContext make_context(const FullyConnectedHamiltonian& h, double gap);

// A sum of single-site operators on a region, each with spectral norm <= 1.
struct LocalObservable {
    std::vector<std::pair<int, Mat>> terms;  // (site, operator)
    int k_a = 1;                             // locality of each term
};

// Variance-gap trade-off: Var(A_L) * gap <= gamma^2 gbar1 |L| with
// gamma = sqrt(18 k_a^2 k (k + k_a)).
CheckReport check_variance_gap(const FullyConnectedHamiltonian& h, const GroundStateSolution& gs,
                               const LocalObservable& a, const std::string& instance);

// Ground-energy robustness under a unitary that leaves the site's reduced
// density matrix invariant: |<(u^dag H u - H)>| <= delta_rob.
CheckReport check_robustness(const FullyConnectedHamiltonian& h, const GroundStateSolution& gs,
                             int site, const Mat& u, const std::string& instance);

// The phase unitary 2|0><0| - 1 built from the mean-field state at a site.
Mat robustness_unitary(const MeanFieldBasis& mf, int site);

// Per-site Schmidt-weight concentration: sum_{s>=1} lambda_s^2 <= delta_rob/(2 gap).
std::vector<CheckReport> check_schmidt_concentration(const GroundStateSolution& gs,
                                                     const MeanFieldBasis& mf,
                                                     const VerifyContext& ctx,
                                                     const std::string& instance);

// Average deviation count: <M_L> <= (delta_rob / (2 gap)) |L|.
CheckReport check_ml_average(const GroundStateSolution& gs, const MeanFieldBasis& mf,
                             const std::vector<int>& L, const VerifyContext& ctx,
                             const std::string& instance);

// One-particle ladder over the deviation-count eigenspaces of a block.
struct TightBindingModel {
    std::vector<int> sites;        // block L
    std::vector<double> weights;   // ||P_x psi||^2, x = 0..|L|
    std::vector<bool> occupied;    // weight >= 1e-14
    Mat j;                         // J_{x,x'} = <w_x'|H|w_x>, zero at unoccupied levels
    RVec c;                        // ground amplitudes, c_x = sqrt(weights[x])
    double jbar = 0.0;             // max off-diagonal |J_{x,x'}|
};

TightBindingModel build_tight_binding(const FullyConnectedHamiltonian& h,
                                      const GroundStateSolution& gs, const MeanFieldBasis& mf,
                                      const std::vector<int>& L);

// Two-sided deviation tails: for each xbar, the weight outside
// [<x> - xbar, <x> + xbar] is at most 2 exp(-xbar / (29 k sqrt(k gbar1 |L| / gap))).
std::vector<CheckReport> check_tail_decay(const GroundStateSolution& gs, const MeanFieldBasis& mf,
                                          const std::vector<int>& L, const VerifyContext& ctx,
                                          const std::string& instance);

// Effective-Hamiltonian certification for an isometry W with orthonormal
// columns: with eps = 1 - ||W^dag psi||^2 < 1/2 and eps_bar = 9||H|| sqrt(eps)/gap,
//   first report:  ||psi - W psi~|| <= eps_bar / (1 - eps_bar)
//   second report: (1 - eps_bar) gap <= gap(W^dag H W)
// `dense_norm` selects exact ||H|| (dense) over the extensiveness bound gbar1 n.
std::pair<CheckReport, CheckReport> check_effective_hamiltonian(
    const FullyConnectedHamiltonian& h, const GroundStateSolution& gs, const Mat& isometry,
    bool dense_norm, const std::string& instance);

// Discarded-Schmidt-weight lower bound on the distance to any state of lower
// Schmidt rank: sum_{m >= SR(psi')} lambda_m^2(psi) <= ||psi - psi'||^2.
CheckReport check_eckart_young(const Vec& psi, const Vec& psi_prime,
                               const std::vector<int>& dims, const std::vector<int>& region,
                               const std::string& instance);

// Polylogarithmic entropy bound 2 (ln n)^alpha + ln d + 1 with
// alpha = a1 + 230 ln f, f = max{2, ln(324 gbar1 / gap)}; the value is
// astronomically large at desk scale, so it is computed and returned in
// extended precision. `supplement_constants` selects a1 = 230 ln(10368 e k^2)
// (default) over the main-text 10386 variant.
long double entropy_bound(int n, int d, int k, double gbar1, double gap,
                          bool supplement_constants = true);

// CSV with header `check,instance,lhs,rhs,margin,satisfied,preconditions_met`,
// rows sorted by (check, instance) for deterministic merges.
std::string report_csv(std::vector<CheckReport> reports);

// True when no report with preconditions_met is unsatisfied.
bool all_satisfied(const std::vector<CheckReport>& reports);

} // namespace fcm
