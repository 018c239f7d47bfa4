#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "vvkrr/analysis.hpp"
#include "vvkrr/cli/config.hpp"

namespace vvkrr::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

struct RunOptions {
  // 0 selects the hardware concurrency.
  std::size_t workers = 0;
  // Progress and result tables; may be null.
  std::ostream* log = nullptr;
};

std::shared_ptr<const SpectralModel> build_spectral(const ExperimentConfig& config);
KernelSpec build_kernel(const ExperimentConfig& config, std::shared_ptr<const SpectralModel> model);
NoiseSpec build_noise(const ExperimentConfig& config);
// Designed kernels get a TargetSpec on the configured spectrum; other
// families get a kernel-section target.
RateExperiment build_rate_experiment(const ExperimentConfig& config, std::size_t workers);

std::string sha256_hex(std::string_view data);

// Writes `files` plus config.txt and manifest.txt into `dir` (created if
// missing). Throws std::runtime_error naming the path on I/O failure.
void write_artifacts(const std::string& dir, std::string_view command, const ExperimentConfig& config, bool pass,
                     const std::map<std::string, std::string>& files);

int cmd_run_rates(const ExperimentConfig& config, const RunOptions& options);
int cmd_bias_check(const ExperimentConfig& config, const RunOptions& options);
int cmd_edim(const ExperimentConfig& config, const RunOptions& options);
int cmd_lower_bound_demo(const ExperimentConfig& config, const RunOptions& options);
int cmd_sobolev_demo(const ExperimentConfig& config, const RunOptions& options);

}  // namespace vvkrr::cli
