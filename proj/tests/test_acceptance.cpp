// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// when any criterion fails. Each criterion states its own tolerance; these
// are release gates and must never be loosened to make a run pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "fcm/cli.hpp"
#include "fcm/entangle.hpp"
#include "fcm/errors.hpp"
#include "fcm/mfrg.hpp"
#include "fcm/model.hpp"
#include "fcm/rng.hpp"
#include "fcm/solve.hpp"
#include "fcm/verify.hpp"

using namespace fcm;

namespace {

int g_failures = 0;

void run_criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

Mat random_unit_hermitian(int d, Rng& rng) {
    Mat g(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = cplx(rng.gaussian(), rng.gaussian());
    Mat herm = 0.5 * (g + g.adjoint());
    return herm / herm.operatorNorm();
}

std::vector<int> first_half(int n) {
    std::vector<int> region(n / 2);
    for (int i = 0; i < n / 2; ++i) region[i] = i;
    return region;
}

bool collective_oracle(std::string& detail) {
    double worst_e = 0.0, worst_s = 0.0;
    for (int n : {4, 6, 8, 10, 12})
        for (double gamma : {0.8, 0.9})
            for (double h : {1.2, 1.5, 2.0}) {
                DickeSolution dk = solve_lmg_dicke(n, gamma, h);
                FullyConnectedHamiltonian model = build_lmg(n, gamma, h);
                GroundStateSolution dense =
                    model.dim() <= 2048 ? solve_dense(model) : solve_lanczos(model);
                double s_dense = entropy(schmidt(dense.state, model.dims(), half_cut(n)));
                worst_e = std::max(worst_e, std::abs(dk.e0 - dense.e0));
                worst_s = std::max(worst_s, std::abs(dicke_half_entropy(dk.state) - s_dense));
            }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |dE0|=%.2e max |dS|=%.2e", worst_e, worst_s);
    detail = buf;
    return worst_e <= 1e-10 && worst_s <= 1e-8;
}

bool fermion_oracle(std::string& detail) {
    double worst_e = 0.0, worst_s = 0.0, worst_g = 0.0;
    for (int n : {4, 6, 8})
        for (double mu : {0.0, 0.04, 1.0})
            for (double kappa : {0.0, 1.0})
                for (int s = 0; s < 20; ++s) {
                    std::uint64_t seed = derive_seed(
                        7, {static_cast<std::uint64_t>(n), double_bits(mu), double_bits(kappa),
                            static_cast<std::uint64_t>(s)});
                    FermionModel m = make_fermion_random(n, kappa, mu, seed);
                    CovarianceState cs = solve_fermion(m);
                    CovarianceState strict = solve_fermion(m, /*parity_strict=*/true);
                    FockSolution fock = solve_fermion_fock(m);
                    std::vector<int> dims(static_cast<std::size_t>(n), 2);
                    Mat rho = reduced_density(fock.ground, dims, first_half(n));
                    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
                    double s_fock = entropy_from_probabilities(es.eigenvalues().cwiseMax(0.0));
                    worst_e = std::max(worst_e, std::abs(cs.e0 - fock.e0));
                    worst_s = std::max(
                        worst_s, std::abs(fermion_half_entropy(cs, first_half(n)) - s_fock));
                    worst_g = std::max(worst_g, std::min(std::abs(cs.gap - fock.gap),
                                                         std::abs(strict.gap - fock.gap)));
                }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |dE0|=%.2e |dS|=%.2e |dgap|=%.2e", worst_e, worst_s,
                  worst_g);
    detail = buf;
    return worst_e <= 1e-8 && worst_s <= 1e-7 && worst_g <= 1e-8;
}

bool theorem_suite(std::string& detail) {
    int violations = 0, skipped = 0, checked = 0;
    const int combos[4][2] = {{6, 2}, {6, 3}, {8, 2}, {8, 3}};
    for (int i = 0; i < 50; ++i) {
        int n = combos[i % 4][0], k = combos[i % 4][1];
        std::uint64_t seed = derive_seed(101, {static_cast<std::uint64_t>(i)});
        FullyConnectedHamiltonian h = build_random_gapped(n, 2, k, seed, 2);
        GroundStateSolution gs = solve_dense(h);
        if (gs.degenerate) {
            ++skipped;
            continue;
        }
        MeanFieldBasis mf;
        try {
            mf = mean_field_basis(gs.state, h.dims());
        } catch (const degeneracy_error&) {
            ++skipped;
            continue;
        }
        VerifyContext ctx = make_context(h, gs.gap);
        std::vector<int> region = first_half(n);
        std::vector<CheckReport> reports;

        Rng rng(mix64(seed, 0x0b5e));
        LocalObservable a;
        for (int site : region) a.terms.emplace_back(site, random_unit_hermitian(2, rng));
        reports.push_back(check_variance_gap(h, gs, a, "acc"));
        reports.push_back(check_robustness(h, gs, 0, robustness_unitary(mf, 0), "acc"));
        for (auto& r : check_schmidt_concentration(gs, mf, ctx, "acc")) reports.push_back(r);
        reports.push_back(check_ml_average(gs, mf, region, ctx, "acc"));
        for (auto& r : check_tail_decay(gs, mf, region, ctx, "acc")) reports.push_back(r);
        try {
            RenormalizedSystem sys = mfrg_init(h);
            RenormalizedSystem coarse = renormalize_step(sys, consecutive_blocks(n, 2), 1);
            auto [fid, gap] =
                check_effective_hamiltonian(h, gs, composed_isometry(coarse), true, "acc");
            reports.push_back(fid);
            reports.push_back(gap);
        } catch (const precondition_error&) {
            ++skipped;
        }
        MatrixProductState mps = to_mps(gs.state, h.dims(), 2);
        reports.push_back(
            check_eckart_young(gs.state, mps_reconstruct(mps), h.dims(), region, "acc"));

        for (const auto& r : reports) {
            if (!r.preconditions_met) {
                ++skipped;
                continue;
            }
            ++checked;
            if (!r.satisfied) ++violations;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d checks, %d violations, %d skipped", checked, violations,
                  skipped);
    detail = buf;
    return violations == 0 && checked > 0;
}

bool band_structure(std::string& detail) {
    double worst = 0.0;
    int ladders = 0;
    auto scan = [&](const FullyConnectedHamiltonian& h, int k) {
        GroundStateSolution gs = solve_dense(h);
        MeanFieldBasis mf = mean_field_basis(gs.state, h.dims());
        int n = static_cast<int>(h.dims().size());
        for (int len : {2, 3, n / 2}) {
            std::vector<int> region(static_cast<std::size_t>(len));
            for (int i = 0; i < len; ++i) region[static_cast<std::size_t>(i)] = i;
            TightBindingModel tb = build_tight_binding(h, gs, mf, region);
            ++ladders;
            for (int x = 0; x <= len; ++x)
                for (int y = 0; y <= len; ++y)
                    if (std::abs(x - y) > k) worst = std::max(worst, std::abs(tb.j(y, x)));
        }
    };
    scan(build_lmg(10, 0.8, 1.5), 2);
    scan(build_lmg(8, 0.9, 2.0), 2);
    for (std::uint64_t seed : {31ull, 32ull}) scan(build_random_gapped(8, 2, 2, seed, 2), 2);
    for (std::uint64_t seed : {33ull, 34ull}) scan(build_random_gapped(8, 2, 3, seed, 2), 3);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d ladders, max out-of-band |J|=%.2e", ladders, worst);
    detail = buf;
    return worst <= 1e-10;
}

bool gap_asymptote(std::string& detail) {
    DickeSolution dk = solve_lmg_dicke(500, 0.8, 2.0);
    double rel = std::abs(dk.gap - 2.19089) / 2.19089;
    char buf[96];
    std::snprintf(buf, sizeof buf, "gap=%.6f rel=%.4f", dk.gap, rel);
    detail = buf;
    return rel <= 0.05;
}

bool sublog_entropy(std::string& detail) {
    std::vector<double> s;
    for (int n : {50, 100, 200, 400})
        s.push_back(dicke_half_entropy(solve_lmg_dicke(n, 0.8, 1.5).state));
    double d1 = s[1] - s[0], d2 = s[2] - s[1], d3 = s[3] - s[2];
    char buf[96];
    std::snprintf(buf, sizeof buf, "diffs %.4f > %.4f > %.4f", d1, d2, d3);
    detail = buf;
    return d1 > d2 && d2 > d3;
}

bool fermion_saturation(std::string& detail) {
    const int samples = 100;
    auto stats = [&](int n, double mu) {
        double sum_s = 0.0, sum_g = 0.0;
        for (int s = 0; s < samples; ++s) {
            std::uint64_t seed = derive_seed(
                55, {static_cast<std::uint64_t>(n), double_bits(mu), double_bits(1.0),
                     static_cast<std::uint64_t>(s)});
            CovarianceState cs = solve_fermion(make_fermion_random(n, 1.0, mu, seed));
            sum_s += fermion_half_entropy(cs, first_half(n));
            sum_g += cs.gap;
        }
        return std::pair<double, double>{sum_s / samples, sum_g / samples};
    };
    double s50, s100, s200, g_dummy;
    bool gaps_ordered = true;
    std::tie(s50, g_dummy) = stats(50, 1.0);
    std::tie(s100, g_dummy) = stats(100, 1.0);
    std::tie(s200, g_dummy) = stats(200, 1.0);
    for (int n : {50, 100, 200}) {
        auto [s1, g1] = stats(n, 1.0);
        auto [s0, g0] = stats(n, 0.0);
        (void)s1;
        (void)s0;
        if (g1 <= g0) gaps_ordered = false;
    }
    double step1 = std::abs(s100 - s50), step2 = std::abs(s200 - s100);
    char buf[128];
    std::snprintf(buf, sizeof buf, "|dS| %.4f -> %.4f, gap ordering %s", step1, step2,
                  gaps_ordered ? "holds" : "violated");
    detail = buf;
    return step2 < step1 && gaps_ordered;
}

bool mfrg_exactness(std::string& detail) {
    // Exact schedule: keeping every deviation level reproduces the spectrum.
    FullyConnectedHamiltonian small = build_lmg(8, 0.8, 1.5);
    MfrgSchedule exact = parse_schedule_text(
        "level.0.block_size = 2\nlevel.0.z = 2\n"
        "level.1.block_size = 2\nlevel.1.z = 4\nstop_dim = 1\n");
    RenormalizedSystem run = run_mfrg(small, exact);
    double e0_err = std::abs(run.ground.e0 - solve_dense(small).e0);

    // Monotone fidelity over the truncation level on a 16-site instance.
    FullyConnectedHamiltonian big = build_lmg(16, 0.8, 2.0);
    RenormalizedSystem base = mfrg_init(big);
    std::vector<double> fidelity;
    for (int z = 0; z <= 4; ++z) {
        RenormalizedSystem coarse = renormalize_step(base, consecutive_blocks(16, 4), z);
        Vec embedded = embed_to_level0(coarse, coarse.ground.state);
        fidelity.push_back(std::abs(base.ground.state.dot(embedded)));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < fidelity.size(); ++i)
        if (fidelity[i] < fidelity[i - 1] - 1e-12) monotone = false;
    char buf[128];
    std::snprintf(buf, sizeof buf, "|dE0|=%.2e fidelity %.6f..%.12f", e0_err, fidelity.front(),
                  fidelity.back());
    detail = buf;
    return e0_err <= 1e-9 && monotone && std::abs(fidelity.back() - 1.0) <= 1e-9;
}

bool lemma8_certification(std::string& detail) {
    int steps = 0;
    bool ok = true;
    auto audit = [&](const RenormalizedSystem& sys) {
        for (const LevelTrace& tr : sys.trace) {
            ++steps;
            if (!tr.precondition_ok) ok = false;
            if (!(tr.state_change <= tr.fidelity_bound + 1e-9)) ok = false;
            if (!(tr.child_gap >= tr.gap_bound - 1e-9)) ok = false;
        }
    };
    MfrgSchedule sched = parse_schedule_text(
        "level.0.block_size = 2\nlevel.0.z = 1\n"
        "level.1.block_size = 2\nlevel.1.z = 2\nstop_dim = 1\n");
    audit(run_mfrg(build_lmg(12, 0.8, 2.0), sched));
    audit(run_mfrg(build_lmg(8, 0.9, 1.5), sched));
    for (std::uint64_t seed : {41ull, 42ull, 43ull})
        audit(run_mfrg(build_random_gapped(8, 2, 2, seed, 2), sched));
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d certified steps", steps);
    detail = buf;
    return ok && steps > 0;
}

bool mps_criterion(std::string& detail) {
    const int n = 12;
    FullyConnectedHamiltonian h = build_lmg(n, 0.8, 1.5);
    GroundStateSolution gs = solve_dense(h);
    std::vector<int> dims = h.dims();

    std::vector<double> delta;
    bool claim6_ok = true;
    double full_rank_error = -1.0;
    for (int d : {1, 2, 4, 8, 16, 64}) {
        MatrixProductState mps = to_mps(gs.state, dims, d);
        Vec recon = mps_reconstruct(mps);
        double worst = 0.0;
        for (int first = 0; first < n; ++first)
            for (int last = first; last < n; ++last) {
                RegionCheck rc = mps_region_check(mps, gs.state, dims, first, last);
                worst = std::max(worst, rc.lhs / rc.region_size);
            }
        delta.push_back(worst);
        // Rank bound at every cut: discarded weight vs distance to the
        // lower-rank reconstruction.
        for (int cut = 0; cut + 1 < n; ++cut) {
            std::vector<int> left(static_cast<std::size_t>(cut + 1));
            for (int i = 0; i <= cut; ++i) left[static_cast<std::size_t>(i)] = i;
            if (!check_eckart_young(gs.state, recon, dims, left, "acc").satisfied)
                claim6_ok = false;
        }
        if (d == 64) full_rank_error = (gs.state - recon).norm();
    }
    bool monotone = true;
    for (std::size_t i = 1; i < delta.size(); ++i)
        if (delta[i] > delta[i - 1] + 1e-12) monotone = false;
    char buf[128];
    std::snprintf(buf, sizeof buf, "delta %.4f -> %.2e, full-rank error %.2e", delta.front(),
                  delta.back(), full_rank_error);
    detail = buf;
    return monotone && claim6_ok && full_rank_error <= 1e-8;
}

bool determinism(std::string& detail) {
    const int max_workers = static_cast<int>(std::thread::hardware_concurrency());
    SweepConfig fermion = parse_sweep_config_text(
        "kind = fermion\nn = 6, 8\nmu = 0, 1\nkappa = 0, 1\nsamples = 5\nseed = 3\n");
    SweepConfig lmg = parse_sweep_config_text("kind = lmg\nn = 8, 12\n");
    SweepConfig verify_cfg =
        parse_sweep_config_text("kind = verify\nn = 6\nk = 2\nsamples = 2\nseed = 5\n");

    bool ok = true;
    std::string serial_fermion = run_fermion_sweep(fermion);
    std::string serial_lmg = run_lmg_sweep(lmg);
    bool v1 = false, v2 = false;
    std::string serial_verify = run_verify_suite(verify_cfg, v1);
    fermion.workers = lmg.workers = verify_cfg.workers = std::max(2, max_workers);
    if (run_fermion_sweep(fermion) != serial_fermion) ok = false;
    if (run_lmg_sweep(lmg) != serial_lmg) ok = false;
    if (run_verify_suite(verify_cfg, v2) != serial_verify || v1 != v2) ok = false;
    if (serial_fermion != run_fermion_sweep(fermion)) ok = false; // repeat run
    char buf[64];
    std::snprintf(buf, sizeof buf, "workers 1 vs %d", std::max(2, max_workers));
    detail = buf;
    return ok;
}

} // namespace

int main() {
    run_criterion("collective-solver oracle equivalence", collective_oracle);
    run_criterion("fermion-solver oracle equivalence", fermion_oracle);
    run_criterion("inequality suite on random gapped instances", theorem_suite);
    run_criterion("tight-binding band structure beyond locality vanishes", band_structure);
    run_criterion("large-n collective gap matches the asymptote", gap_asymptote);
    run_criterion("half-chain entropy grows slower than log n", sublog_entropy);
    run_criterion("fermion entropy saturates and the field opens the gap", fermion_saturation);
    run_criterion("coarse-graining exactness and monotone fidelity", mfrg_exactness);
    run_criterion("certified error bounds hold on every coarse-graining step",
                  lemma8_certification);
    run_criterion("bond-dimension truncation error shrinks monotonically", mps_criterion);
    run_criterion("sweeps are byte-identical across worker counts", determinism);

    std::printf("%d of 11 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
