#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcm/kvfile.hpp"
#include "fcm/mfrg.hpp"

namespace fcm {

// Sweep/run description shared by all subcommands; parsed from the flat
// key-value config format.
struct SweepConfig {
    std::string kind;  // lmg | fermion | mfrg | verify | mps
    std::vector<int> n_grid;
    std::vector<double> gamma_grid{0.8};
    std::vector<double> h_grid{1.5};
    std::vector<double> mu_grid{0.0, 0.04, 1.0};
    std::vector<double> kappa_grid{0.0, 0.04, 0.2, 1.0, 5.0, 100.0};
    std::vector<int> z_grid;
    std::vector<int> d_grid;    // MPS bond dimensions
    std::vector<int> k_grid{2, 3};  // verify-suite interaction bodies
    int samples = 100;
    std::uint64_t base_seed = 1;
    int workers = 1;
    std::string out_dir = ".";
    bool t_zero = false;       // fermion: decoupled-mode override
    bool fock_oracle = false;  // fermion: append Fock-oracle deviation columns
    bool ghz = false;          // mps: compress a GHZ state instead of a ground state
    std::string schedule_file; // mfrg
};

SweepConfig parse_sweep_config(const KvFile& kv);
SweepConfig parse_sweep_config_text(const std::string& text);
SweepConfig parse_sweep_config_file(const std::string& path);

// Stable 64-bit hash of the canonical config serialization; embedded in every
// CSV for reproducibility audits.
std::uint64_t config_hash(const SweepConfig& cfg);

// Per-sample seed: base seed mixed with the grid coordinates and sample index.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words);
std::uint64_t double_bits(double v);

// Each runner returns the complete CSV text (comment line with config hash and
// base seed, header, data rows; all numbers at 17 significant digits).
std::string run_lmg_sweep(const SweepConfig& cfg);
std::string run_fermion_sweep(const SweepConfig& cfg);
// `violations` reports whether any preconditions-met check failed.
std::string run_verify_suite(const SweepConfig& cfg, bool& violations);
std::string run_mfrg_trace(const SweepConfig& cfg, const MfrgSchedule& schedule);
std::string run_mps_report(const SweepConfig& cfg);

// Standalone plotting script (python/matplotlib) for a produced CSV; emits
// code referencing column names only, never data values.
std::string emit_plot_script(const std::string& csv_path, const std::string& kind);

// Write via a `.partial` temp name, renaming on success so interrupted runs
// never leave a complete-looking file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace fcm
