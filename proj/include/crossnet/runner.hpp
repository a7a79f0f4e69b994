#pragma once

#include <ostream>

#include "crossnet/config.hpp"
#include "crossnet/synthdata.hpp"

namespace crossnet {

// Process exit codes for the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigInvalid = 2,
    kExitDiverged = 3,
    kExitIoFailure = 4,
};

/// Per-run outcome of a fitting experiment (one row of the summary file).
struct RunOutcome {
    std::uint64_t seed = 0;
    double final_loss = 0.0;
    double final_metric = 0.0;
};

struct ExperimentResult {
    int exit_code = kExitOk;
    std::vector<RunOutcome> runs;
    double metric_mean = 0.0;
    double metric_stddev = 0.0;
};

/// Dispatches on config.experiment, writes artifacts under config.out_dir,
/// and logs progress to `log`. Never throws; failures are mapped to exit
/// codes with a message on the log stream.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// Helpers shared with the acceptance suite.
PolynomialSpec synthetic_by_name(const std::string& name, std::uint64_t data_seed);
void default_sample_counts(const PolynomialSpec& spec, std::size_t& train_n, std::size_t& test_n);
Dataset to_dataset(const SyntheticDataset& synth);

}  // namespace crossnet
