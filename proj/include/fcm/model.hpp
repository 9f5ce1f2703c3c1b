#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcm/errors.hpp"
#include "fcm/linalg.hpp"

namespace fcm {

inline constexpr std::int64_t kDefaultDenseLimit = 1 << 14;

// One interaction channel of the factorized all-to-all form.
// Assembled contribution:
//   ascending:  (J / N^{l-1}) * sum_{i1<...<il} h_{i1} h_{i2} ... h_{il}
//   ordered:    (J / N^{l-1}) * sum over all ordered distinct tuples
// where N is the normalization site count (norm_n below). Per-site factor
// operators are Hermitian with spectral norm <= 1.
struct Channel {
    double coupling = 0.0;      // J_s
    std::vector<Mat> site_ops;  // h_{i,s}, one per site
    int body = 2;               // l in {2,3}
    bool ascending = true;      // i<j (resp. i<j<k) tuple convention
};

struct ExtensivenessConstants {
    double g0 = 0.0;   // max_i ||V_i||
    double g1 = 0.0;   // sum_s |J_s|
    double gbar1 = 0.0; // g0 + g1
};

// Fully connected spin Hamiltonian:
//   H = sum_s channel_s + sum_i V_i
// Immutable after construction; use the factory functions below.
class FullyConnectedHamiltonian {
  public:
    FullyConnectedHamiltonian(int n, int d, int k, std::vector<Mat> onsite,
                              std::vector<Channel> channels, int norm_n = -1);

    int n() const { return n_; }
    int d() const { return d_; }
    int k() const { return k_; }
    int norm_n() const { return norm_n_; }
    std::int64_t dim() const { return dim_; }
    std::vector<int> dims() const { return std::vector<int>(n_, d_); }
    const std::vector<Mat>& onsite() const { return onsite_; }
    const std::vector<Channel>& channels() const { return channels_; }
    const ExtensivenessConstants& constants() const { return constants_; }

  private:
    int n_, d_, k_, norm_n_;
    std::int64_t dim_;
    std::vector<Mat> onsite_;
    std::vector<Channel> channels_;
    ExtensivenessConstants constants_;
};

// All-to-all bilinear fermion model:
//   H = sum_{i != j} -(t_ij/n)(c_i^† c_j + c_j^† c_i)
//     + sum_{i < j}  (kappa/n)(c_i^† c_j^† + c_j c_i)
//     - mu sum_i c_i^† c_i
// The pairing sum is taken over i<j: with a constant coefficient the
// ordered pair sum would cancel by antisymmetry.
struct FermionModel {
    int n = 0;
    RMat t;          // symmetric, zero diagonal; random entries in [0,1]
    double kappa = 0.0;
    double mu = 0.0;
    std::uint64_t seed = 0; // seed used when t was drawn randomly
};

struct Bipartition {
    std::vector<int> a; // sorted
    std::vector<int> b; // sorted complement
};

Bipartition make_bipartition(int n, const std::vector<int>& a);
Bipartition half_cut(int n); // first half vs second half

// One factor of H_{A,B}: assembled value is
//   (coupling / norm_n^{body_a+body_b-1}) *
//     (sum over ascending body_a-tuples in A of op products) x (same for B)
struct BoundaryChannel {
    double coupling = 0.0;
    int body_a = 1, body_b = 1;
    std::vector<std::pair<int, Mat>> a_ops; // (site, operator)
    std::vector<std::pair<int, Mat>> b_ops;
};

// --- factories ------------------------------------------------------------

// H = -(1/n) sum_{i<j} (sx_i sx_j + gamma sy_i sy_j) - h sum_i sz_i
FullyConnectedHamiltonian build_lmg(int n, double gamma, double h);

// Seeded random instance with `channel_count` k-body channels (unit-norm
// Hermitian factors, couplings in [-1,1]) plus a uniform on-site field of
// strength 3*g1 so the instance is generically gapped.
FullyConnectedHamiltonian build_random_gapped(int n, int d, int k, std::uint64_t seed,
                                              int channel_count);

FermionModel make_fermion_random(int n, double kappa, double mu, std::uint64_t seed);
FermionModel make_fermion_t_zero(int n, double kappa, double mu);

// --- operations -----------------------------------------------------------

Mat assemble_dense(const FullyConnectedHamiltonian& h,
                   std::int64_t dense_limit = kDefaultDenseLimit);

Vec matvec(const FullyConnectedHamiltonian& h, const Vec& v);

// Terms fully inside L, relabeled to sites 0..|L|-1, keeping the original
// 1/n^{l-1} normalization.
FullyConnectedHamiltonian subset_hamiltonian(const FullyConnectedHamiltonian& h,
                                             const std::vector<int>& L);

std::vector<BoundaryChannel> boundary_interaction(const FullyConnectedHamiltonian& h,
                                                  const std::vector<int>& a,
                                                  const std::vector<int>& b);

// Assemble a boundary-channel list over the full n-site space (test aid).
Mat assemble_boundary(const std::vector<BoundaryChannel>& channels, int n, int d, int norm_n,
                      std::int64_t dense_limit = kDefaultDenseLimit);

ExtensivenessConstants extensiveness_constants(const FullyConnectedHamiltonian& h);

// --- model files ----------------------------------------------------------

struct ModelSpec {
    std::string kind; // lmg | fermion | random
    int n = 0, d = 2, k = 2;
    std::uint64_t seed = 0;
    double gamma = 0.0, h = 0.0; // lmg
    double kappa = 0.0, mu = 0.0; // fermion
    bool t_zero = false;          // fermion: decoupled-mode override
    int channels = 1;             // random
};

ModelSpec parse_model_text(const std::string& text);
ModelSpec parse_model_file(const std::string& path);

FullyConnectedHamiltonian build_spin_model(const ModelSpec& spec);
FermionModel build_fermion_model(const ModelSpec& spec);

} // namespace fcm
