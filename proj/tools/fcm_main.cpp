// Command-line front end: sweeps, verification runs and renormalization
// traces, each emitting a CSV (plus, on request, a matching plot script).
//
// Exit codes: 0 success, 1 usage/config error, 2 bound violation in the
// verification suite, 3 resource limit exceeded.

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "fcm/cli.hpp"
#include "fcm/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int samples = 0;
    int workers = 0;
    bool has_seed = false, has_samples = false, has_workers = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key-value config file");
    cmd->add_option("--out", args.out_dir, "output directory (default from config)");
    cmd->add_option("--seed", args.seed, "override base seed")
        ->each([&](const std::string&) { args.has_seed = true; });
    cmd->add_option("--samples", args.samples, "override sample count")
        ->each([&](const std::string&) { args.has_samples = true; });
    cmd->add_option("--workers", args.workers, "override worker thread count")
        ->each([&](const std::string&) { args.has_workers = true; });
}

fcm::SweepConfig load_config(const CommonArgs& args, const std::string& kind) {
    fcm::SweepConfig cfg;
    if (!args.config_path.empty()) {
        cfg = fcm::parse_sweep_config_file(args.config_path);
        if (cfg.kind != kind)
            throw std::invalid_argument("config kind '" + cfg.kind + "' does not match the '" +
                                        kind + "' subcommand");
    } else {
        cfg.kind = kind;
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.has_seed) cfg.base_seed = args.seed;
    if (args.has_samples) cfg.samples = args.samples;
    if (args.has_workers) cfg.workers = args.workers;
    if (cfg.samples < 1 || cfg.workers < 1)
        throw std::invalid_argument("samples and workers must be >= 1");
    return cfg;
}

void emit(const fcm::SweepConfig& cfg, const std::string& csv) {
    std::string path = cfg.out_dir + "/" + cfg.kind + ".csv";
    fcm::write_file_atomic(path, csv);
    std::printf("%s\n", path.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fch: gapped all-to-all models, entanglement scaling and "
                 "certified mean-field renormalization"};
    app.require_subcommand(1);

    CommonArgs lmg_args, fermion_args, verify_args, mfrg_args, mps_args;
    std::string mfrg_schedule_path;
    std::string plot_csv, plot_kind, plot_out;

    add_common(app.add_subcommand("lmg-sweep", "exact collective-spin sweep"), lmg_args);
    add_common(app.add_subcommand("fermion-sweep", "random bilinear fermion sweep"),
               fermion_args);
    add_common(app.add_subcommand("verify", "run the inequality verification suite"),
               verify_args);
    CLI::App* mfrg_cmd =
        app.add_subcommand("mfrg-run", "coarse-grain a model along a schedule");
    add_common(mfrg_cmd, mfrg_args);
    mfrg_cmd->add_option("--schedule", mfrg_schedule_path, "schedule file (overrides config)");
    add_common(app.add_subcommand("mps-compress", "bond-dimension truncation report"), mps_args);

    CLI::App* plot_cmd = app.add_subcommand("plot-script", "emit a plot script for a CSV");
    plot_cmd->add_option("--csv", plot_csv, "CSV produced by another subcommand")->required();
    plot_cmd->add_option("--kind", plot_kind, "lmg | fermion | mfrg | verify | mps")->required();
    plot_cmd->add_option("--out", plot_out, "script path (default <csv>.plot.py)");

    try {
        app.parse(argc, argv);

        if (app.got_subcommand("lmg-sweep")) {
            fcm::SweepConfig cfg = load_config(lmg_args, "lmg");
            emit(cfg, fcm::run_lmg_sweep(cfg));
        } else if (app.got_subcommand("fermion-sweep")) {
            fcm::SweepConfig cfg = load_config(fermion_args, "fermion");
            emit(cfg, fcm::run_fermion_sweep(cfg));
        } else if (app.got_subcommand("verify")) {
            fcm::SweepConfig cfg = load_config(verify_args, "verify");
            bool violations = false;
            emit(cfg, fcm::run_verify_suite(cfg, violations));
            if (violations) {
                std::fprintf(stderr, "verification suite reported violated bounds\n");
                return 2;
            }
        } else if (app.got_subcommand("mfrg-run")) {
            fcm::SweepConfig cfg = load_config(mfrg_args, "mfrg");
            std::string schedule_path =
                mfrg_schedule_path.empty() ? cfg.schedule_file : mfrg_schedule_path;
            if (schedule_path.empty())
                throw std::invalid_argument("mfrg-run needs a schedule (--schedule or config)");
            emit(cfg, fcm::run_mfrg_trace(cfg, fcm::parse_schedule_file(schedule_path)));
        } else if (app.got_subcommand("mps-compress")) {
            fcm::SweepConfig cfg = load_config(mps_args, "mps");
            emit(cfg, fcm::run_mps_report(cfg));
        } else if (app.got_subcommand("plot-script")) {
            std::string script = fcm::emit_plot_script(plot_csv, plot_kind);
            std::string path = plot_out.empty() ? plot_csv + ".plot.py" : plot_out;
            fcm::write_file_atomic(path, script);
            std::printf("%s\n", path.c_str());
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const fcm::resource_limit_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
