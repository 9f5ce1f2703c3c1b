#include "fcm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fcm/entangle.hpp"
#include "fcm/errors.hpp"
#include "fcm/rng.hpp"
#include "fcm/verify.hpp"

namespace fcm {
namespace {

const std::set<std::string> kKinds = {"lmg", "fermion", "mfrg", "verify", "mps"};

std::string fmt(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value in CSV output");
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<int> to_int_grid(const std::vector<std::int64_t>& xs, const std::string& key) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (auto x : xs) {
        if (x < 0 || x > (1 << 30)) throw std::invalid_argument(key + ": value out of range");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

// Run fn(i) for i in [0, count); results must be written into preallocated
// slots so parallel and serial execution produce identical output.
template <typename Fn>
void parallel_for(std::int64_t count, int workers, const Fn& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    int n_threads = static_cast<int>(std::min<std::int64_t>(workers, count));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string csv_preamble(const SweepConfig& cfg) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# config_hash=%016llx base_seed=%llu\n",
                  static_cast<unsigned long long>(config_hash(cfg)),
                  static_cast<unsigned long long>(cfg.base_seed));
    return buf;
}

void require_grid(const std::vector<int>& g, const std::string& name) {
    if (g.empty()) throw std::invalid_argument(name + " grid must not be empty");
}

Mat random_unit_hermitian(int d, Rng& rng) {
    Mat g(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = cplx(rng.gaussian(), rng.gaussian());
    Mat herm = 0.5 * (g + g.adjoint());
    return herm / herm.operatorNorm();
}

double entropy_of_density(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    RVec p = es.eigenvalues().cwiseMax(0.0);
    return entropy_from_probabilities(p);
}

std::vector<int> first_half(int n) {
    std::vector<int> region(n / 2);
    for (int i = 0; i < n / 2; ++i) region[i] = i;
    return region;
}

} // namespace

std::uint64_t double_bits(double v) {
    std::uint64_t bits = 0;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    return bits;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
    std::uint64_t s = base;
    for (auto w : words) s = mix64(s, w);
    return s;
}

SweepConfig parse_sweep_config(const KvFile& kv) {
    static const std::set<std::string> allowed = {
        "kind",    "n",      "gamma", "h",       "mu",          "kappa",
        "z",       "D",      "k",     "samples", "seed",        "workers",
        "out_dir", "t_zero", "ghz",   "schedule", "fock_oracle"};
    for (const auto& e : kv.entries) {
        if (!allowed.count(e.key))
            throw std::invalid_argument("unknown config key '" + e.key + "' (line " +
                                        std::to_string(e.line) + ")");
    }
    SweepConfig cfg;
    cfg.kind = kv.get("kind");
    if (!kKinds.count(cfg.kind)) throw std::invalid_argument("unknown kind '" + cfg.kind + "'");
    if (kv.has("n")) cfg.n_grid = to_int_grid(kv.get_int_list("n"), "n");
    if (kv.has("gamma")) cfg.gamma_grid = kv.get_double_list("gamma");
    if (kv.has("h")) cfg.h_grid = kv.get_double_list("h");
    if (kv.has("mu")) cfg.mu_grid = kv.get_double_list("mu");
    if (kv.has("kappa")) cfg.kappa_grid = kv.get_double_list("kappa");
    if (kv.has("z")) cfg.z_grid = to_int_grid(kv.get_int_list("z"), "z");
    if (kv.has("D")) cfg.d_grid = to_int_grid(kv.get_int_list("D"), "D");
    if (kv.has("k")) cfg.k_grid = to_int_grid(kv.get_int_list("k"), "k");
    if (kv.has("samples")) cfg.samples = static_cast<int>(kv.get_int("samples"));
    if (kv.has("seed")) cfg.base_seed = kv.get_u64("seed");
    if (kv.has("workers")) cfg.workers = static_cast<int>(kv.get_int("workers"));
    cfg.out_dir = kv.get_or("out_dir", cfg.out_dir);
    cfg.t_zero = kv.get_bool("t_zero", false);
    cfg.fock_oracle = kv.get_bool("fock_oracle", false);
    cfg.ghz = kv.get_bool("ghz", false);
    cfg.schedule_file = kv.get_or("schedule", "");

    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    for (int n : cfg.n_grid)
        if (n < 1) throw std::invalid_argument("n must be >= 1");
    for (int d : cfg.d_grid)
        if (d < 1) throw std::invalid_argument("D must be >= 1");
    return cfg;
}

SweepConfig parse_sweep_config_text(const std::string& text) {
    return parse_sweep_config(parse_kv_text(text));
}

SweepConfig parse_sweep_config_file(const std::string& path) {
    return parse_sweep_config(parse_kv_file(path));
}

std::uint64_t config_hash(const SweepConfig& cfg) {
    std::ostringstream canon;
    canon << "kind=" << cfg.kind;
    auto ints = [&](const char* key, const std::vector<int>& xs) {
        canon << '|' << key << '=';
        for (std::size_t i = 0; i < xs.size(); ++i) canon << (i ? "," : "") << xs[i];
    };
    auto doubles = [&](const char* key, const std::vector<double>& xs) {
        canon << '|' << key << '=';
        for (std::size_t i = 0; i < xs.size(); ++i) canon << (i ? "," : "") << fmt(xs[i]);
    };
    ints("n", cfg.n_grid);
    doubles("gamma", cfg.gamma_grid);
    doubles("h", cfg.h_grid);
    doubles("mu", cfg.mu_grid);
    doubles("kappa", cfg.kappa_grid);
    ints("z", cfg.z_grid);
    ints("D", cfg.d_grid);
    ints("k", cfg.k_grid);
    canon << "|samples=" << cfg.samples << "|seed=" << cfg.base_seed;
    canon << "|t_zero=" << cfg.t_zero << "|fock_oracle=" << cfg.fock_oracle;
    canon << "|ghz=" << cfg.ghz << "|schedule=" << cfg.schedule_file;
    // workers and out_dir are execution details, not part of the result identity.
    std::uint64_t hash = 0xcbf29ce484222325ull; // FNV-1a 64
    for (unsigned char c : canon.str()) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string run_lmg_sweep(const SweepConfig& cfg) {
    require_grid(cfg.n_grid, "n");
    if (cfg.gamma_grid.empty() || cfg.h_grid.empty())
        throw std::invalid_argument("gamma/h grids must not be empty");

    struct Point {
        int n;
        double gamma, h;
    };
    std::vector<Point> points;
    for (int n : cfg.n_grid)
        for (double g : cfg.gamma_grid)
            for (double h : cfg.h_grid) points.push_back({n, g, h});

    std::vector<std::string> rows(points.size());
    parallel_for(static_cast<std::int64_t>(points.size()), cfg.workers, [&](std::int64_t i) {
        const Point& p = points[static_cast<std::size_t>(i)];
        DickeSolution sol = solve_lmg_dicke(p.n, p.gamma, p.h);
        double entropy = dicke_half_entropy(sol.state);
        double asym = 2.0 * std::sqrt(std::max(0.0, (p.h - 1.0) * (p.h - p.gamma)));
        std::ostringstream row;
        row << p.n << ',' << fmt(p.gamma) << ',' << fmt(p.h) << ',' << fmt(sol.e0) << ','
            << fmt(sol.e1) << ',' << fmt(sol.gap) << ',' << fmt(entropy) << ',' << fmt(asym)
            << '\n';
        rows[static_cast<std::size_t>(i)] = row.str();
    });

    std::string out = csv_preamble(cfg);
    out += "n,gamma,h,e0,e1,gap,entropy_half,gap_asymptote\n";
    for (const auto& r : rows) out += r;
    return out;
}

std::string run_fermion_sweep(const SweepConfig& cfg) {
    require_grid(cfg.n_grid, "n");
    if (cfg.mu_grid.empty() || cfg.kappa_grid.empty())
        throw std::invalid_argument("mu/kappa grids must not be empty");

    struct Point {
        int n;
        double mu, kappa;
    };
    std::vector<Point> points;
    for (int n : cfg.n_grid)
        for (double mu : cfg.mu_grid)
            for (double kappa : cfg.kappa_grid) points.push_back({n, mu, kappa});

    struct Sample {
        double gap = 0.0, entropy = 0.0;
        double e0_dev = 0.0, gap_dev = 0.0, entropy_dev = 0.0;
    };
    const int samples = cfg.samples;
    std::vector<Sample> all(points.size() * static_cast<std::size_t>(samples));

    parallel_for(static_cast<std::int64_t>(all.size()), cfg.workers, [&](std::int64_t job) {
        const Point& p = points[static_cast<std::size_t>(job) / samples];
        int s = static_cast<int>(job % samples);
        std::uint64_t seed =
            derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(p.n), double_bits(p.mu),
                                        double_bits(p.kappa), static_cast<std::uint64_t>(s)});
        FermionModel m = cfg.t_zero ? make_fermion_t_zero(p.n, p.kappa, p.mu)
                                    : make_fermion_random(p.n, p.kappa, p.mu, seed);
        CovarianceState cs = solve_fermion(m);
        Sample& slot = all[static_cast<std::size_t>(job)];
        slot.gap = cs.gap;
        slot.entropy = fermion_half_entropy(cs, first_half(p.n));
        if (cfg.fock_oracle) {
            if (p.n > 14) throw std::invalid_argument("fock_oracle requires n <= 14");
            FockSolution fock = solve_fermion_fock(m);
            CovarianceState strict = solve_fermion(m, /*parity_strict=*/true);
            std::vector<int> dims(static_cast<std::size_t>(p.n), 2);
            double fock_entropy =
                entropy_of_density(reduced_density(fock.ground, dims, first_half(p.n)));
            slot.e0_dev = std::abs(fock.e0 - cs.e0);
            slot.gap_dev = std::min(std::abs(fock.gap - cs.gap), std::abs(fock.gap - strict.gap));
            slot.entropy_dev = std::abs(fock_entropy - slot.entropy);
        }
    });

    std::string out = csv_preamble(cfg);
    out += "n,mu,kappa,samples,mean_gap,std_gap,mean_entropy,std_entropy";
    if (cfg.fock_oracle) out += ",max_e0_dev,max_gap_dev,max_entropy_dev";
    out += "\n";
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const Sample* batch = &all[pi * static_cast<std::size_t>(samples)];
        double mg = 0.0, me = 0.0;
        double max_e0 = 0.0, max_gap = 0.0, max_ent = 0.0;
        for (int s = 0; s < samples; ++s) {
            mg += batch[s].gap;
            me += batch[s].entropy;
            max_e0 = std::max(max_e0, batch[s].e0_dev);
            max_gap = std::max(max_gap, batch[s].gap_dev);
            max_ent = std::max(max_ent, batch[s].entropy_dev);
        }
        mg /= samples;
        me /= samples;
        double vg = 0.0, ve = 0.0;
        for (int s = 0; s < samples; ++s) {
            vg += (batch[s].gap - mg) * (batch[s].gap - mg);
            ve += (batch[s].entropy - me) * (batch[s].entropy - me);
        }
        double sg = samples > 1 ? std::sqrt(vg / (samples - 1)) : 0.0;
        double se = samples > 1 ? std::sqrt(ve / (samples - 1)) : 0.0;
        std::ostringstream row;
        row << points[pi].n << ',' << fmt(points[pi].mu) << ',' << fmt(points[pi].kappa) << ','
            << samples << ',' << fmt(mg) << ',' << fmt(sg) << ',' << fmt(me) << ',' << fmt(se);
        if (cfg.fock_oracle)
            row << ',' << fmt(max_e0) << ',' << fmt(max_gap) << ',' << fmt(max_ent);
        row << '\n';
        out += row.str();
    }
    return out;
}

std::string run_verify_suite(const SweepConfig& cfg, bool& violations) {
    if (cfg.k_grid.empty()) throw std::invalid_argument("k grid must not be empty");

    struct Instance {
        int n, k, sample;
    };
    std::vector<Instance> instances;
    for (int n : cfg.n_grid)
        for (int k : cfg.k_grid)
            for (int s = 0; s < cfg.samples; ++s) instances.push_back({n, k, s});

    std::vector<std::vector<CheckReport>> slots(instances.size());
    parallel_for(static_cast<std::int64_t>(instances.size()), cfg.workers, [&](std::int64_t i) {
        const Instance& in = instances[static_cast<std::size_t>(i)];
        std::uint64_t seed = derive_seed(
            cfg.base_seed, {static_cast<std::uint64_t>(in.n), static_cast<std::uint64_t>(in.k),
                            static_cast<std::uint64_t>(in.sample)});
        std::string tag = "n" + std::to_string(in.n) + "k" + std::to_string(in.k) + "s" +
                          std::to_string(in.sample);
        FullyConnectedHamiltonian h = build_random_gapped(in.n, 2, in.k, seed, 2);
        GroundStateSolution gs = solve_dense(h);
        std::vector<CheckReport>& reports = slots[static_cast<std::size_t>(i)];
        if (gs.degenerate) {
            reports.push_back(make_report("degenerate_instance", tag, 0.0, 0.0, false));
            return;
        }
        MeanFieldBasis mf;
        try {
            mf = mean_field_basis(gs.state, h.dims());
        } catch (const degeneracy_error&) {
            reports.push_back(make_report("degenerate_instance", tag, 0.0, 0.0, false));
            return;
        }
        VerifyContext ctx = make_context(h, gs.gap);
        std::vector<int> region = first_half(in.n);

        Rng rng(mix64(seed, 0x0b5e));
        LocalObservable a;
        for (int site : region) a.terms.emplace_back(site, random_unit_hermitian(2, rng));
        reports.push_back(check_variance_gap(h, gs, a, tag));
        reports.push_back(check_robustness(h, gs, 0, robustness_unitary(mf, 0), tag));
        for (auto& r : check_schmidt_concentration(gs, mf, ctx, tag)) reports.push_back(r);
        reports.push_back(check_ml_average(gs, mf, region, ctx, tag));
        for (auto& r : check_tail_decay(gs, mf, region, ctx, tag)) reports.push_back(r);

        try {
            RenormalizedSystem sys = mfrg_init(h);
            RenormalizedSystem coarse = renormalize_step(sys, consecutive_blocks(in.n, 2), 1);
            Mat w = composed_isometry(coarse);
            auto [fid, gap] = check_effective_hamiltonian(h, gs, w, /*dense_norm=*/true, tag);
            reports.push_back(fid);
            reports.push_back(gap);
        } catch (const precondition_error&) {
            reports.push_back(make_report("effective_fidelity", tag, 0.0, 0.0, false));
        }

        MatrixProductState mps = to_mps(gs.state, h.dims(), 2);
        reports.push_back(
            check_eckart_young(gs.state, mps_reconstruct(mps), h.dims(), region, tag));
    });

    std::vector<CheckReport> merged;
    for (auto& batch : slots)
        for (auto& r : batch) merged.push_back(std::move(r));
    violations = !all_satisfied(merged);
    return csv_preamble(cfg) + report_csv(std::move(merged));
}

std::string run_mfrg_trace(const SweepConfig& cfg, const MfrgSchedule& schedule) {
    require_grid(cfg.n_grid, "n");
    if (cfg.gamma_grid.empty() || cfg.h_grid.empty())
        throw std::invalid_argument("gamma/h grids must not be empty");
    FullyConnectedHamiltonian h =
        build_lmg(cfg.n_grid.front(), cfg.gamma_grid.front(), cfg.h_grid.front());

    MfrgOptions opts;
    RenormalizedSystem sys = mfrg_init(h, opts);
    const Vec omega0 = sys.ground.state;
    const std::int64_t fidelity_limit = 1 << 20;

    struct Row {
        int level, n_level;
        std::int64_t total_dim;
        double e0, gap, step_error, lemma8, fidelity;
        std::string reason = "-";
    };
    // The certified fidelity bound is +inf when it is vacuous (eps_bar >= 1);
    // report that honestly instead of refusing the row.
    auto fmt_bound = [](double v) { return std::isinf(v) ? std::string("inf") : fmt(v); };
    auto fidelity_of = [&](const RenormalizedSystem& s) {
        if (total_dim(s.level_dims.front()) > fidelity_limit) return -1.0;
        return std::abs(omega0.dot(embed_to_level0(s, s.ground.state)));
    };
    std::vector<Row> rows;
    rows.push_back({0, static_cast<int>(sys.dims.size()), sys.hamiltonian.dim(), sys.ground.e0,
                    sys.ground.gap, 0.0, 0.0, 1.0});

    std::string reason = "schedule_end";
    for (const auto& entry : schedule.levels) {
        if (sys.hamiltonian.dim() <= schedule.stop_dim) {
            reason = "stop_dim";
            break;
        }
        auto blocks = consecutive_blocks(static_cast<int>(sys.dims.size()), entry.block_size);
        sys = renormalize_step(sys, blocks, entry.z, opts);
        const LevelTrace& tr = sys.trace.back();
        rows.push_back({sys.level, static_cast<int>(sys.dims.size()), sys.hamiltonian.dim(),
                        sys.ground.e0, sys.ground.gap, tr.state_change, tr.fidelity_bound,
                        fidelity_of(sys)});
    }
    rows.back().reason = reason;

    std::string out = csv_preamble(cfg);
    out += "level,n_level,total_dim,e0,gap,step_error,lemma8_bound,fidelity_to_exact,stop_reason\n";
    for (const auto& r : rows) {
        std::ostringstream row;
        row << r.level << ',' << r.n_level << ',' << r.total_dim << ',' << fmt(r.e0) << ','
            << fmt(r.gap) << ',' << fmt(r.step_error) << ',' << fmt_bound(r.lemma8) << ','
            << fmt(r.fidelity) << ',' << r.reason << '\n';
        out += row.str();
    }
    return out;
}

std::string run_mps_report(const SweepConfig& cfg) {
    require_grid(cfg.n_grid, "n");
    require_grid(cfg.d_grid, "D");
    const int n = cfg.n_grid.front();
    std::vector<int> dims(static_cast<std::size_t>(n), 2);

    Vec psi;
    if (cfg.ghz) {
        psi = Vec::Zero(std::int64_t{1} << n);
        psi(0) = psi((std::int64_t{1} << n) - 1) = 1.0 / std::sqrt(2.0);
    } else {
        FullyConnectedHamiltonian h =
            build_lmg(n, cfg.gamma_grid.front(), cfg.h_grid.front());
        GroundStateSolution gs =
            h.dim() <= kDefaultDenseLimit ? solve_dense(h) : solve_lanczos(h);
        psi = gs.state;
    }

    std::vector<std::string> rows(cfg.d_grid.size());
    parallel_for(static_cast<std::int64_t>(cfg.d_grid.size()), cfg.workers, [&](std::int64_t i) {
        int d = cfg.d_grid[static_cast<std::size_t>(i)];
        MatrixProductState mps = to_mps(psi, dims, d);
        double recon_error = (psi - mps_reconstruct(mps)).norm();
        double delta = 0.0;
        for (int first = 0; first < n; ++first)
            for (int last = first; last < n; ++last) {
                RegionCheck rc = mps_region_check(mps, psi, dims, first, last);
                delta = std::max(delta, rc.lhs / rc.region_size);
            }
        std::ostringstream row;
        row << d << ',' << mps.max_bond << ',' << fmt(recon_error) << ',' << fmt(delta) << '\n';
        rows[static_cast<std::size_t>(i)] = row.str();
    });

    std::string out = csv_preamble(cfg);
    out += "D,max_bond,recon_error,max_region_error_per_site\n";
    for (const auto& r : rows) out += r;
    return out;
}

std::string emit_plot_script(const std::string& csv_path, const std::string& kind) {
    if (!kKinds.count(kind)) throw std::invalid_argument("unknown plot kind '" + kind + "'");
    if (!std::filesystem::exists(csv_path))
        throw std::invalid_argument("CSV not found: " + csv_path);

    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n"
       << "import numpy as np\n"
       << "import pandas as pd\n\n"
       << "df = pd.read_csv(" << std::quoted(csv_path) << ", comment='#')\n";
    if (kind == "lmg") {
        py << "fig, axes = plt.subplots(1, 3, figsize=(15, 4))\n"
           << "for (gamma, h), grp in df.groupby(['gamma', 'h']):\n"
           << "    label = f'gamma={gamma}, h={h}'\n"
           << "    axes[0].plot(grp['n'], grp['entropy_half'], 'o-', label=label)\n"
           << "    axes[1].semilogx(grp['n'], grp['entropy_half'], 'o-', label=label)\n"
           << "    axes[2].plot(grp['n'], grp['gap'], 'o-', label=label)\n"
           << "    axes[2].plot(grp['n'], grp['gap_asymptote'], 'k--', alpha=0.4)\n"
           << "axes[0].set(xlabel='n', ylabel='half-chain entropy')\n"
           << "axes[1].set(xlabel='n (log scale)', ylabel='half-chain entropy')\n"
           << "axes[2].set(xlabel='n', ylabel='gap')\n"
           << "axes[0].legend(fontsize=7)\n";
    } else if (kind == "fermion") {
        py << "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n"
           << "for (mu, kappa), grp in df.groupby(['mu', 'kappa']):\n"
           << "    label = f'mu={mu}, kappa={kappa}'\n"
           << "    axes[0].errorbar(grp['n'], grp['mean_entropy'], yerr=grp['std_entropy'],\n"
           << "                     fmt='o-', label=label)\n"
           << "    axes[1].errorbar(grp['n'], grp['mean_gap'], yerr=grp['std_gap'],\n"
           << "                     fmt='o-', label=label)\n"
           << "axes[0].set(xlabel='n', ylabel='mean half-cut entropy')\n"
           << "axes[1].set(xlabel='n', ylabel='mean gap')\n"
           << "axes[0].legend(fontsize=7)\n";
    } else if (kind == "mfrg") {
        py << "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n"
           << "axes[0].plot(df['level'], df['e0'], 'o-', label='e0')\n"
           << "ax_gap = axes[0].twinx()\n"
           << "ax_gap.plot(df['level'], df['gap'], 's--', color='tab:orange', label='gap')\n"
           << "axes[0].set(xlabel='level', ylabel='ground energy')\n"
           << "ax_gap.set_ylabel('gap')\n"
           << "axes[1].semilogy(df['level'], df['step_error'].clip(lower=1e-18), 'o-',\n"
           << "                 label='step error')\n"
           << "axes[1].semilogy(df['level'], df['lemma8_bound'].clip(lower=1e-18), 's--',\n"
           << "                 label='certified bound')\n"
           << "axes[1].set(xlabel='level')\n"
           << "axes[1].legend(fontsize=7)\n";
    } else if (kind == "mps") {
        py << "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n"
           << "axes[0].semilogy(df['D'], df['recon_error'].clip(lower=1e-18), 'o-')\n"
           << "axes[0].set(xlabel='bond dimension D', ylabel='reconstruction error')\n"
           << "axes[1].semilogy(df['D'], df['max_region_error_per_site'].clip(lower=1e-18), 'o-')\n"
           << "axes[1].set(xlabel='bond dimension D', ylabel='max region error per site')\n";
    } else { // verify
        py << "fig, axes = plt.subplots(1, 1, figsize=(7, 4))\n"
           << "ok = df[df['preconditions_met'] == 1]\n"
           << "for check, grp in ok.groupby('check'):\n"
           << "    axes.hist(np.log10(grp['margin'].clip(lower=1e-18)), bins=30, alpha=0.5,\n"
           << "              label=check)\n"
           << "axes.set(xlabel='log10 margin (rhs - lhs)', ylabel='count')\n"
           << "axes.legend(fontsize=7)\n";
    }
    py << "fig.tight_layout()\n"
       << "fig.savefig(" << std::quoted(csv_path + ".png") << ", dpi=150)\n"
       << "print(" << std::quoted(csv_path + ".png") << ")\n";
    return py.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string partial = path + ".partial";
    {
        std::ofstream out(partial, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + partial);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + partial);
    }
    std::filesystem::rename(partial, path);
}

} // namespace fcm
