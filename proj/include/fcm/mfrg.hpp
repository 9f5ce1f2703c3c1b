#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fcm/errors.hpp"
#include "fcm/linalg.hpp"
#include "fcm/model.hpp"
#include "fcm/solve.hpp"

namespace fcm {

// --- mean-field basis -------------------------------------------------------

// Per-site dominant local state of a ground vector: the top left-singular
// vector of the site-vs-rest reshape, with the rotation sending it to the
// first computational basis vector.
struct MeanFieldBasis {
    std::vector<int> dims;
    std::vector<Vec> local_state;  // |0>_i, unit norm, phase-fixed
    std::vector<double> lambda0;   // top Schmidt coefficient per site
    std::vector<Mat> rotation;     // unitary R_i with R_i |0>_i = e_0
};

// Throws degeneracy_error when |lambda0 - lambda1| < kDegeneracyThreshold
// at some site (an arbitrary tie-break would poison downstream bounds).
MeanFieldBasis mean_field_basis(const Vec& ground, const std::vector<int>& dims);

// --- deviation counting -----------------------------------------------------

// Diagonal description of the deviation counter M_L in the rotated product
// basis of the block: entry = number of sites in L whose local index != 0.
struct DeviationOperator {
    std::vector<int> sites;   // block L, ascending
    std::vector<int> counts;  // length prod_{i in L} d_i; first site most significant
};

DeviationOperator deviation_operator(const MeanFieldBasis& mf, const std::vector<int>& L);

// Weight of the ground state in each M_L eigenspace: w[x] = ||P_{=x}^L psi||^2.
std::vector<double> deviation_weights(const Vec& ground, const MeanFieldBasis& mf,
                                      const std::vector<int>& L);

// <psi| M_L |psi>
double deviation_expectation(const Vec& ground, const MeanFieldBasis& mf,
                             const std::vector<int>& L);

// ||P_{>= m}^L psi||^2, exact; 1 at m = 0, 0 at m = |L|+1.
double tail_probability(const Vec& ground, const MeanFieldBasis& mf,
                        const std::vector<int>& L, int m);

// P_{=x}^L psi: zero out every rotated-basis amplitude whose deviation count
// in L differs from x (unnormalized).
Vec deviation_projection(const Vec& psi, const MeanFieldBasis& mf, const std::vector<int>& L,
                         int x);

// --- block truncation -------------------------------------------------------

// Isometry onto the span of rotated product states with <= z deviations.
struct BlockProjector {
    std::vector<int> sites;                      // block L, ascending
    int z = 0;
    std::vector<std::vector<int>> kept_configs;  // rotated local indices per column
    Mat isometry;                                // (prod d_i) x kept, orthonormal columns
};

BlockProjector block_projector(const MeanFieldBasis& mf, const std::vector<int>& L, int z);

// Kept dimension: sum over deviation patterns with <= z deviating sites of
// prod (d_i - 1) over the deviating sites.
std::int64_t kept_dimension(const std::vector<int>& block_dims, int z);

// --- product-term Hamiltonians ----------------------------------------------

// One term: a scalar-weighted product of per-site factors (identity on the
// sites not listed). Factors are stored in ascending site order with the
// coefficient folded into the first factor.
struct ProductTerm {
    std::vector<std::pair<int, Mat>> factors;
};

// Sum of product terms over a qudit chain; the generic Hamiltonian
// representation carried between coarse-graining levels.
struct LocalTermSum {
    std::vector<int> dims;
    std::vector<ProductTerm> terms;

    std::int64_t dim() const { return total_dim(dims); }
    Vec apply(const Vec& v) const;
    Mat dense(std::int64_t dense_limit = kDefaultDenseLimit) const;
};

LocalTermSum to_term_sum(const FullyConnectedHamiltonian& h);

// Compress each product term through the given block isometries (blocks are
// taken from the projectors and must partition the sites).
LocalTermSum project_term_sum(const LocalTermSum& h, const std::vector<BlockProjector>& ps);

// --- renormalized systems -----------------------------------------------------

struct LevelTrace {
    double eps = 0.0;             // 1 - ||W^dag Omega||^2
    double eps_bar = 0.0;         // 9 ||H|| sqrt(eps) / gap
    double fidelity_bound = 0.0;  // eps_bar / (1 - eps_bar)
    double gap_bound = 0.0;       // (1 - eps_bar) * parent gap
    double state_change = 0.0;    // || Omega_parent - W Omega_child ||
    double parent_gap = 0.0, child_gap = 0.0;
    double parent_e0 = 0.0, child_e0 = 0.0;
    double h_norm = 0.0;          // ||H_parent||
    bool precondition_ok = true;  // eps < 1/2
};

// Claim-style extensiveness bounds carried along the flow.
struct ParameterRecord {
    double g0 = 0.0, g1 = 0.0, gbar1 = 0.0;
};

struct RenormalizedSystem {
    int level = 0;
    std::vector<int> dims;            // per current coarse site
    LocalTermSum hamiltonian;         // current effective Hamiltonian
    Mat dense_hamiltonian;            // filled when dim() <= dense limit
    GroundStateSolution ground;       // full-vector ground solution at this level
    std::vector<std::vector<BlockProjector>> level_isometries;  // one list per step
    std::vector<std::vector<int>> level_dims;  // dims per level, front() = level 0
    std::vector<LevelTrace> trace;
    ParameterRecord params;
    int k = 2;  // interaction body bound, carried along the flow
    double cumulative_fidelity_bound = 0.0;  // sum of per-step eps_bar/(1-eps_bar)
    double cumulative_state_change = 0.0;    // sum of per-step ||Omega - W Omega'||

    // Level-0 factorized form, kept for structured matvecs and compressed
    // projection; null at coarse levels.
    std::shared_ptr<const FullyConnectedHamiltonian> fch;
};

struct MfrgOptions {
    std::int64_t dense_limit = 1 << 12;  // eigensolve dense below, Lanczos above
    LanczosOptions lanczos{1e-10, 600, 1};
};

// Wrap a fully connected Hamiltonian as the level-0 system (solves for the
// ground state; dense below the limit, Lanczos above).
RenormalizedSystem mfrg_init(const FullyConnectedHamiltonian& h, const MfrgOptions& opts = {});

// One coarse-graining step: truncate each block to <= z deviations around the
// given mean-field basis, compress H through the block isometries, re-solve,
// and record the certified error bounds. Throws precondition_error when the
// projection weight loss eps >= 1/2.
RenormalizedSystem renormalize_step(const RenormalizedSystem& sys, const MeanFieldBasis& mf,
                                    const std::vector<std::vector<int>>& blocks, int z,
                                    const MfrgOptions& opts = {});
// Convenience: derive the mean-field basis from the current ground state.
RenormalizedSystem renormalize_step(const RenormalizedSystem& sys,
                                    const std::vector<std::vector<int>>& blocks, int z,
                                    const MfrgOptions& opts = {});

// Embed a current-level vector back to the level-0 space through the
// composed isometry.
Vec embed_to_level0(const RenormalizedSystem& sys, const Vec& v);

// Dense composed isometry (level-0 dim x current dim); test aid, guarded.
Mat composed_isometry(const RenormalizedSystem& sys,
                      std::int64_t dense_limit = kDefaultDenseLimit);

// Norm of the on-site block of the current effective Hamiltonian at each
// coarse site, with the scalar mean-field energy shift removed; compared
// against the g0 flow bound.
std::vector<double> measured_onsite_norms(const RenormalizedSystem& sys);

// --- schedules ---------------------------------------------------------------

struct ScheduleEntry {
    int block_size = 0;
    int z = 0;
};

struct MfrgSchedule {
    std::vector<ScheduleEntry> levels;
    std::int64_t stop_dim = kDefaultDenseLimit;
};

// Flat key-value text: `level.N.block_size`, `level.N.z`, `stop_dim`.
MfrgSchedule parse_schedule_text(const std::string& text);
MfrgSchedule parse_schedule_file(const std::string& path);

// Iterate renormalize_step over the schedule, re-deriving the mean-field
// basis at each level; stops early once dim <= stop_dim.
RenormalizedSystem run_mfrg(const FullyConnectedHamiltonian& h, const MfrgSchedule& schedule,
                            const MfrgOptions& opts = {});

// Partition 0..n-1 into consecutive blocks of the given size (last block may
// be smaller).
std::vector<std::vector<int>> consecutive_blocks(int n, int block_size);

// --- parameter-flow bounds -----------------------------------------------------

struct FlowInputs {
    double g0 = 0.0, g1 = 0.0;
    int z = 0;
    double jbar = 0.0;
};

struct FlowBounds {
    double g0_next = 0.0, g1_next = 0.0, gbar1_next = 0.0;
};

// g0' = (g0 + g1) z + Jbar;  g1' = 16 z g1.
FlowBounds parameter_flow_bounds(const FlowInputs& in);

// Robustness scale 2 gamma g1 sqrt(gbar1 / (n gap)) with gamma = 6 k^2.
double robustness_delta(double g1, double gbar1, int n, double gap, int k);

// delta0^2 = 4 (gbar1 k)^2 (delta_rob / gap) ln^2 n + 123 (gbar1 k)^2 / n.
double delta0_bound(double gbar1, int k, double delta_rob, double gap, int n);

// m0 = sqrt(gbar1 n / gap) (gamma g1 / gap + 15 k^{3/2} ln(3/eps_tilde)),
// eps_tilde = (gap eps0 / (9 gbar1 n))^2, gamma = 6 k^2.
double m0_bound(double g1, double gbar1, int k, int n, double gap, double eps0 = 0.01);

// Jbar = 4 |L| (delta0 + 9 g1 sqrt(k (m0 + 1) / n)) + g1 k |L|^2 / n.
double jbar_bound(int block_size, double delta0, double g1, int k, int n, double m0);

} // namespace fcm
