#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fcm/cli.hpp"
#include "fcm/entangle.hpp"
#include "fcm/solve.hpp"

using namespace fcm;

namespace {

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    return rows;
}

std::vector<double> row_values(const std::string& row) {
    std::vector<double> out;
    std::istringstream in(row);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(std::stod(field));
    return out;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fcm_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("config: full round trip with every key") {
    SweepConfig cfg = parse_sweep_config_text(
        "kind = fermion\n"
        "n = 4, 6\n"
        "mu = 0, 1\n"
        "kappa = 0.5\n"
        "samples = 7\n"
        "seed = 42\n"
        "workers = 2\n"
        "t_zero = true\n");
    CHECK(cfg.kind == "fermion");
    CHECK(cfg.n_grid == std::vector<int>{4, 6});
    CHECK(cfg.mu_grid == std::vector<double>{0.0, 1.0});
    CHECK(cfg.kappa_grid == std::vector<double>{0.5});
    CHECK(cfg.samples == 7);
    CHECK(cfg.base_seed == 42);
    CHECK(cfg.workers == 2);
    CHECK(cfg.t_zero);
    CHECK_FALSE(cfg.ghz);
}

TEST_CASE("config: rejections") {
    CHECK_THROWS_AS(parse_sweep_config_text("kind = nonsense\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_config_text("n = 4\n"), std::invalid_argument); // kind missing
    CHECK_THROWS_AS(parse_sweep_config_text("kind = lmg\nbogus_key = 1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_config_text("kind = lmg\nsamples = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_config_text("kind = lmg\nn = -2\n"), std::invalid_argument);
}

TEST_CASE("config: hash is stable, order-insensitive and value-sensitive") {
    SweepConfig a = parse_sweep_config_text("kind = lmg\nn = 8\nseed = 3\n");
    SweepConfig b = parse_sweep_config_text("seed = 3\nkind = lmg\nn = 8\n");
    SweepConfig c = parse_sweep_config_text("kind = lmg\nn = 8\nseed = 4\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    SweepConfig d = a;
    d.workers = 16; // execution detail, not part of the result identity
    CHECK(config_hash(a) == config_hash(d));
}

TEST_CASE("seeds: derivation mixes every coordinate") {
    std::uint64_t s = derive_seed(1, {4, double_bits(0.04), double_bits(1.0), 0});
    CHECK(s == derive_seed(1, {4, double_bits(0.04), double_bits(1.0), 0}));
    CHECK(s != derive_seed(2, {4, double_bits(0.04), double_bits(1.0), 0}));
    CHECK(s != derive_seed(1, {6, double_bits(0.04), double_bits(1.0), 0}));
    CHECK(s != derive_seed(1, {4, double_bits(0.05), double_bits(1.0), 0}));
    CHECK(s != derive_seed(1, {4, double_bits(0.04), double_bits(1.0), 1}));
    // 0.0 and -0.0 have different payloads on purpose: the grid is part of
    // the experiment identity.
    CHECK(double_bits(0.0) != double_bits(-0.0));
}

TEST_CASE("lmg sweep: row content matches the direct solver") {
    SweepConfig cfg = parse_sweep_config_text("kind = lmg\nn = 8, 10\ngamma = 0.8\nh = 2.0\n");
    std::string csv = run_lmg_sweep(cfg);
    auto rows = data_rows(csv);
    REQUIRE(rows.size() == 3); // header + 2 points
    CHECK(rows[0] == "n,gamma,h,e0,e1,gap,entropy_half,gap_asymptote");
    auto v = row_values(rows[1]);
    DickeSolution sol = solve_lmg_dicke(8, 0.8, 2.0);
    CHECK(v[0] == 8.0);
    CHECK(v[3] == doctest::Approx(sol.e0).epsilon(1e-15));
    CHECK(v[5] == doctest::Approx(sol.gap).epsilon(1e-15));
    CHECK(v[6] == doctest::Approx(dicke_half_entropy(sol.state)).epsilon(1e-12));
    CHECK(v[7] == doctest::Approx(2.0 * std::sqrt(1.0 * 1.2)).epsilon(1e-15));
    CHECK(csv.rfind("# config_hash=", 0) == 0);
}

TEST_CASE("fermion sweep: decoupled modes give zero entropy and gap mu") {
    SweepConfig cfg = parse_sweep_config_text(
        "kind = fermion\nn = 6\nmu = 1\nkappa = 0\nsamples = 3\nt_zero = true\n");
    auto rows = data_rows(run_fermion_sweep(cfg));
    REQUIRE(rows.size() == 2);
    auto v = row_values(rows[1]);
    CHECK(v[4] == doctest::Approx(1.0).epsilon(1e-12)); // mean_gap
    CHECK(v[5] == doctest::Approx(0.0).epsilon(1e-12)); // std_gap
    CHECK(v[6] == doctest::Approx(0.0).epsilon(1e-12)); // mean_entropy
}

TEST_CASE("fermion sweep: parallel output is byte-identical to serial") {
    std::string base_cfg =
        "kind = fermion\nn = 4, 6\nmu = 0, 1\nkappa = 0, 1\nsamples = 5\nseed = 9\n";
    SweepConfig serial = parse_sweep_config_text(base_cfg + "workers = 1\n");
    SweepConfig parallel = parse_sweep_config_text(base_cfg + "workers = 8\n");
    CHECK(run_fermion_sweep(serial) == run_fermion_sweep(parallel));
}

TEST_CASE("fermion sweep: fock oracle columns stay small") {
    SweepConfig cfg = parse_sweep_config_text(
        "kind = fermion\nn = 4\nmu = 0.04\nkappa = 1\nsamples = 3\nfock_oracle = true\n");
    auto rows = data_rows(run_fermion_sweep(cfg));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] ==
          "n,mu,kappa,samples,mean_gap,std_gap,mean_entropy,std_entropy,"
          "max_e0_dev,max_gap_dev,max_entropy_dev");
    auto v = row_values(rows[1]);
    CHECK(v[8] <= 1e-8);
    CHECK(v[9] <= 1e-7);
    CHECK(v[10] <= 1e-8);
}

TEST_CASE("verify suite: empty n grid gives a header-only report") {
    SweepConfig cfg = parse_sweep_config_text("kind = verify\nsamples = 3\n");
    bool violations = true;
    auto rows = data_rows(run_verify_suite(cfg, violations));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == "check,instance,lhs,rhs,margin,satisfied,preconditions_met");
    CHECK_FALSE(violations);
}

TEST_CASE("verify suite: small random batch has no violations") {
    SweepConfig cfg =
        parse_sweep_config_text("kind = verify\nn = 6\nk = 2\nsamples = 2\nseed = 5\n");
    bool violations = true;
    std::string csv = run_verify_suite(cfg, violations);
    CHECK_FALSE(violations);
    CHECK(data_rows(csv).size() > 10);
    // determinism under parallel execution
    cfg.workers = 4;
    bool violations2 = true;
    CHECK(run_verify_suite(cfg, violations2) == csv);
}

TEST_CASE("mfrg trace: exact schedule keeps fidelity at one") {
    SweepConfig cfg = parse_sweep_config_text("kind = mfrg\nn = 8\ngamma = 0.8\nh = 1.5\n");
    MfrgSchedule sched = parse_schedule_text(
        "level.0.block_size = 2\nlevel.0.z = 2\nstop_dim = 1\n");
    auto rows = data_rows(run_mfrg_trace(cfg, sched));
    REQUIRE(rows.size() == 3); // header, level 0, level 1
    CHECK(rows[0] ==
          "level,n_level,total_dim,e0,gap,step_error,lemma8_bound,fidelity_to_exact,stop_reason");
    auto lvl0 = row_values(std::string(rows[1], 0, rows[1].rfind(',')));
    auto lvl1 = row_values(std::string(rows[2], 0, rows[2].rfind(',')));
    CHECK(lvl0[7] == 1.0);
    CHECK(lvl1[3] == doctest::Approx(lvl0[3]).epsilon(1e-12)); // z = block size: exact
    CHECK(lvl1[7] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rows[2].substr(rows[2].rfind(',') + 1) == "schedule_end");
}

TEST_CASE("mfrg trace: stop_dim short-circuits the schedule") {
    SweepConfig cfg = parse_sweep_config_text("kind = mfrg\nn = 8\n");
    MfrgSchedule sched = parse_schedule_text(
        "level.0.block_size = 2\nlevel.0.z = 1\n"
        "level.1.block_size = 2\nlevel.1.z = 1\nstop_dim = 100\n");
    auto rows = data_rows(run_mfrg_trace(cfg, sched));
    // 2^8 = 256 -> 3^4 = 81 <= 100, so level 1 of the schedule never runs.
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].substr(rows[2].rfind(',') + 1) == "stop_dim");
}

TEST_CASE("mps report: ghz flag and monotone region error") {
    SweepConfig cfg = parse_sweep_config_text("kind = mps\nn = 6\nD = 1, 2\nghz = true\n");
    auto rows = data_rows(run_mps_report(cfg));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "D,max_bond,recon_error,max_region_error_per_site");
    auto d1 = row_values(rows[1]);
    auto d2 = row_values(rows[2]);
    CHECK(d2[2] <= 1e-12);          // GHZ is exactly bond dimension 2
    CHECK(d1[2] > 0.1);             // bond dimension 1 must lose weight
    CHECK(d2[3] <= d1[3] + 1e-12);  // region error non-increasing in D
}

TEST_CASE("plot scripts: emission, idempotence and missing-file error") {
    TempDir tmp;
    std::string csv_path = (tmp.path / "lmg.csv").string();
    CHECK_THROWS_AS(emit_plot_script(csv_path, "lmg"), std::invalid_argument);

    SweepConfig cfg = parse_sweep_config_text("kind = lmg\nn = 8\n");
    write_file_atomic(csv_path, run_lmg_sweep(cfg));
    CHECK(std::filesystem::exists(csv_path));
    CHECK_FALSE(std::filesystem::exists(csv_path + ".partial"));

    std::string script = emit_plot_script(csv_path, "lmg");
    CHECK(script == emit_plot_script(csv_path, "lmg"));
    CHECK(script.find("entropy_half") != std::string::npos);
    CHECK(script.find("gap_asymptote") != std::string::npos);
    CHECK_THROWS_AS(emit_plot_script(csv_path, "bogus"), std::invalid_argument);
}
