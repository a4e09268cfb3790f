// The three workflows behind the CLI, exposed as library calls returning
// process exit codes: 0 success, 1 usage/config, 2 input data, 3 enumeration
// capacity. Keeping them callable makes end-to-end runs scriptable from tests.

#pragma once

#include "mcacq/config.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mcacq {

struct CommonOptions {
    std::string config_path;                 // empty = built-in defaults
    std::vector<std::string> pattern_paths;
    std::string output_dir = ".";
    std::optional<uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::vector<double>> snr_list_db;
    std::optional<int> workers;
    bool pss_only = false;
    std::string surface_dump_path;           // empty = no dump
};

// Exhaustive pattern search for (L, K): writes the ranked design report and
// the winning pattern file into output_dir, prints the top five.
int cmd_design(const CommonOptions& opt, int l, int k, std::ostream& out, std::ostream& err);

// One acquisition on a sample file or a synthesized (delay, doppler_hz,
// snr_db) triple; prints the estimate and the MAC count.
int cmd_acquire(const CommonOptions& opt, const std::string& samples_path,
                const std::optional<std::array<double, 3>>& synthesize, std::ostream& out,
                std::ostream& err);

// Monte Carlo campaign over the configured SNR sweep: writes rmse.csv,
// mta.csv, fig-delay.dat, fig-doppler.dat and prints the acquisition-time
// comparison table.
int cmd_evaluate(const CommonOptions& opt, std::ostream& out, std::ostream& err);

// One complex sample per line as "real,imag".
cvec load_samples(const std::string& path);
void save_samples(const std::string& path, const cvec& samples);

}  // namespace mcacq
