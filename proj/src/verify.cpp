#include "fcm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace fcm {

namespace {

double real_expectation(const Vec& v, const Vec& hv) {
    return v.dot(hv).real();
}

Vec apply_observable(const Vec& psi, const std::vector<int>& dims, const LocalObservable& a) {
    Vec out = Vec::Zero(psi.size());
    for (const auto& [site, op] : a.terms) {
        Vec tmp = psi;
        apply_site_op(tmp, dims, site, op);
        out += tmp;
    }
    return out;
}

} // namespace

CheckReport make_report(const std::string& check, const std::string& instance, double lhs,
                        double rhs, bool preconditions_met) {
    CheckReport r;
    r.check = check;
    r.instance = instance;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.satisfied = lhs <= rhs + kCheckSlack;
    r.preconditions_met = preconditions_met;
    return r;
}

VerifyContext make_context(const FullyConnectedHamiltonian& h, double gap) {
    VerifyContext ctx;
    ctx.n = h.n();
    ctx.k = h.k();
    ctx.g1 = h.constants().g1;
    ctx.gbar1 = h.constants().gbar1;
    ctx.gap = gap;
    return ctx;
}

CheckReport check_variance_gap(const FullyConnectedHamiltonian& h, const GroundStateSolution& gs,
                               const LocalObservable& a, const std::string& instance) {
    const bool pre = gs.gap > kDegeneracyThreshold;
    Vec av = apply_observable(gs.state, h.dims(), a);
    const double mean = gs.state.dot(av).real();
    const double var = std::max(0.0, av.squaredNorm() - mean * mean);
    const double lhs = var * gs.gap;
    const double ka = a.k_a, k = h.k();
    const double gamma2 = 18.0 * ka * ka * k * (k + ka);
    const double rhs = gamma2 * h.constants().gbar1 * static_cast<double>(a.terms.size());
    return make_report("variance_gap", instance, lhs, rhs, pre);
}

CheckReport check_robustness(const FullyConnectedHamiltonian& h, const GroundStateSolution& gs,
                             int site, const Mat& u, const std::string& instance) {
    Mat rho = reduced_density_from_state(gs.state, h.dims(), {site});
    const bool pre = (u * rho * u.adjoint() - rho).cwiseAbs().maxCoeff() <= 1e-8;
    Vec rotated = gs.state;
    apply_site_op(rotated, h.dims(), site, u);
    const double e_rot = real_expectation(rotated, matvec(h, rotated));
    const double e = real_expectation(gs.state, matvec(h, gs.state));
    const double lhs = std::abs(e_rot - e);
    const double rhs =
        robustness_delta(h.constants().g1, h.constants().gbar1, h.n(), gs.gap, h.k());
    return make_report("robustness", instance, lhs, rhs, pre);
}

Mat robustness_unitary(const MeanFieldBasis& mf, int site) {
    const Vec& v = mf.local_state[site];
    return 2.0 * (v * v.adjoint()) - Mat::Identity(v.size(), v.size());
}

std::vector<CheckReport> check_schmidt_concentration(const GroundStateSolution& gs,
                                                     const MeanFieldBasis& mf,
                                                     const VerifyContext& ctx,
                                                     const std::string& instance) {
    const double rhs =
        robustness_delta(ctx.g1, ctx.gbar1, ctx.n, ctx.gap, ctx.k) / (2.0 * ctx.gap);
    std::vector<CheckReport> out;
    for (size_t i = 0; i < mf.lambda0.size(); ++i) {
        const double lhs = std::max(0.0, 1.0 - mf.lambda0[i] * mf.lambda0[i]);
        out.push_back(make_report("schmidt_concentration",
                                  instance + ":site" + std::to_string(i), lhs, rhs,
                                  gs.gap > kDegeneracyThreshold));
    }
    return out;
}

CheckReport check_ml_average(const GroundStateSolution& gs, const MeanFieldBasis& mf,
                             const std::vector<int>& L, const VerifyContext& ctx,
                             const std::string& instance) {
    const double lhs = deviation_expectation(gs.state, mf, L);
    const double rhs = robustness_delta(ctx.g1, ctx.gbar1, ctx.n, ctx.gap, ctx.k) /
                       (2.0 * ctx.gap) * static_cast<double>(L.size());
    return make_report("ml_average", instance, lhs, rhs, gs.gap > kDegeneracyThreshold);
}

TightBindingModel build_tight_binding(const FullyConnectedHamiltonian& h,
                                      const GroundStateSolution& gs, const MeanFieldBasis& mf,
                                      const std::vector<int>& L) {
    TightBindingModel tb;
    tb.sites = L;
    tb.weights = deviation_weights(gs.state, mf, L);
    const int levels = static_cast<int>(L.size()) + 1;
    tb.occupied.resize(levels);
    std::vector<Vec> omega(levels);
    for (int x = 0; x < levels; ++x) {
        tb.occupied[x] = tb.weights[x] >= 1e-14;
        if (tb.occupied[x])
            omega[x] = deviation_projection(gs.state, mf, L, x) / std::sqrt(tb.weights[x]);
    }
    tb.j = Mat::Zero(levels, levels);
    for (int x = 0; x < levels; ++x) {
        if (!tb.occupied[x]) continue;
        Vec hx = matvec(h, omega[x]);
        for (int y = 0; y < levels; ++y)
            if (tb.occupied[y]) tb.j(y, x) = omega[y].dot(hx);
    }
    // locality of H forbids hopping across more than k deviation levels
    for (int x = 0; x < levels; ++x)
        for (int y = 0; y < levels; ++y) {
            if (std::abs(x - y) > h.k() && std::abs(tb.j(y, x)) > 1e-10)
                throw std::logic_error("tight-binding ladder violated the hopping-range bound");
            if (std::abs(x - y) > 0)
                tb.jbar = std::max(tb.jbar, std::abs(tb.j(y, x)));
        }
    tb.c.resize(levels);
    for (int x = 0; x < levels; ++x) tb.c(x) = std::sqrt(std::max(0.0, tb.weights[x]));
    return tb;
}

std::vector<CheckReport> check_tail_decay(const GroundStateSolution& gs, const MeanFieldBasis& mf,
                                          const std::vector<int>& L, const VerifyContext& ctx,
                                          const std::string& instance) {
    auto w = deviation_weights(gs.state, mf, L);
    const double mean = deviation_expectation(gs.state, mf, L);
    const double xi = 29.0 * ctx.k *
                      std::sqrt(ctx.k * ctx.gbar1 * static_cast<double>(L.size()) / ctx.gap);
    std::vector<CheckReport> out;
    for (int xbar = 1; xbar <= static_cast<int>(L.size()); ++xbar) {
        double lhs = 0.0;
        for (size_t x = 0; x < w.size(); ++x) {
            if (static_cast<double>(x) >= mean + xbar) lhs += w[x];
            if (static_cast<double>(x) <= mean - xbar) lhs += w[x];
        }
        const double rhs = 2.0 * std::exp(-xbar / xi);
        out.push_back(make_report("tail_decay", instance + ":xbar" + std::to_string(xbar), lhs,
                                  rhs, gs.gap > kDegeneracyThreshold));
    }
    return out;
}

std::pair<CheckReport, CheckReport> check_effective_hamiltonian(
    const FullyConnectedHamiltonian& h, const GroundStateSolution& gs, const Mat& isometry,
    bool dense_norm, const std::string& instance) {
    Vec projected = isometry.adjoint() * gs.state;
    const double eps = std::max(0.0, 1.0 - projected.squaredNorm());
    const bool pre = eps < 0.5 && gs.gap > kDegeneracyThreshold;

    const double hnorm =
        dense_norm ? opnorm(assemble_dense(h)) : h.constants().gbar1 * h.n();
    const double eps_bar = 9.0 * hnorm * std::sqrt(eps) / gs.gap;
    const double fid_rhs = eps_bar < 1.0 ? eps_bar / (1.0 - eps_bar)
                                         : std::numeric_limits<double>::infinity();

    Mat heff = isometry.adjoint() * assemble_dense(h) * isometry;
    GroundStateSolution eff = solve_dense_matrix(heff);
    Vec embedded = isometry * eff.state;
    const cplx overlap = embedded.dot(gs.state);
    if (std::abs(overlap) > 0) embedded *= overlap / std::abs(overlap);
    const double fid_lhs = (gs.state - embedded).norm();

    CheckReport fid = make_report("effective_fidelity", instance, fid_lhs, fid_rhs, pre);
    CheckReport gap =
        make_report("effective_gap", instance, (1.0 - eps_bar) * gs.gap, eff.gap, pre);
    return {fid, gap};
}

CheckReport check_eckart_young(const Vec& psi, const Vec& psi_prime,
                               const std::vector<int>& dims, const std::vector<int>& region,
                               const std::string& instance) {
    Eigen::BDCSVD<Mat> svd_p(reshape_region(psi, dims, region));
    Eigen::BDCSVD<Mat> svd_q(reshape_region(psi_prime, dims, region));
    const RVec& lam = svd_p.singularValues();
    const RVec& mu = svd_q.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        if (mu(i) > 1e-12) ++rank;
    double lhs = 0.0;
    for (Eigen::Index m = rank; m < lam.size(); ++m) lhs += lam(m) * lam(m);
    const double rhs = (psi - psi_prime).squaredNorm();
    return make_report("eckart_young", instance, lhs, rhs, true);
}

long double entropy_bound(int n, int d, int k, double gbar1, double gap,
                          bool supplement_constants) {
    if (n < 3) throw std::invalid_argument("entropy_bound: n >= 3 required");
    const long double base = supplement_constants ? 10368.0L : 10386.0L;
    const long double a1 =
        230.0L * std::log(base * std::exp(1.0L) * static_cast<long double>(k) * k);
    const long double f =
        std::max<long double>(2.0L, std::log(324.0L * gbar1 / static_cast<long double>(gap)));
    const long double alpha = a1 + 230.0L * std::log(f);
    const long double lnln = std::log(std::log(static_cast<long double>(n)));
    return 2.0L * std::exp(alpha * lnln) + std::log(static_cast<long double>(d)) + 1.0L;
}

std::string report_csv(std::vector<CheckReport> reports) {
    std::sort(reports.begin(), reports.end(), [](const CheckReport& a, const CheckReport& b) {
        return a.check != b.check ? a.check < b.check : a.instance < b.instance;
    });
    std::string out = "check,instance,lhs,rhs,margin,satisfied,preconditions_met\n";
    char buf[160];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%d", r.lhs, r.rhs, r.margin,
                      r.satisfied ? 1 : 0, r.preconditions_met ? 1 : 0);
        out += r.check + "," + r.instance + "," + buf + "\n";
    }
    return out;
}

bool all_satisfied(const std::vector<CheckReport>& reports) {
    for (const auto& r : reports)
        if (r.preconditions_met && !r.satisfied) return false;
    return true;
}

} // namespace fcm
