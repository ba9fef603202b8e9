// Experiment harness: noise, sparsity, and compression sweeps over seeded
// synthetic scenes, emitting deterministic CSV rows.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hsu/datagen.hpp"

namespace hsu {

enum class ExperimentKind { Noise, Sparsity, Compression };

enum class MethodId { Standard, Rbf, Mp };

std::string experiment_token(ExperimentKind kind);  // "noise" | "sparsity" | "compression"
std::string method_token(MethodId id);              // "standard" | "rbf" | "mp"

enum class ErrorNorm { L1, L2 };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Noise;
  std::string dict_uri = "synth:gaussian:448:480";
  bool orthonormalize = false;
  std::size_t rows = 1;
  std::size_t cols = 10;  // rows * cols pixels per scene
  std::size_t support_size = 17;
  std::size_t k = 20;     // fixed sparsity (sparsity sweep reads it from the grid)
  double gamma = 1.0;
  double flip_probability = 0.1;
  FlipMode flip_mode = FlipMode::Atom;
  std::vector<MethodId> methods;
  std::vector<double> grid;  // SNR dB / k / c depending on experiment
  std::size_t replications = 10;
  std::uint64_t seed = 1;
  bool timing_real = false;  // false writes 0 to wall_ms so output is byte-stable
  bool nonneg_basis = false;  // compression sweep: constrained basis fit
  ErrorNorm error_norm = ErrorNorm::L1;
  std::string cube_path;  // compression sweep: measure this cube instead of synthesizing
  std::size_t planted_rank = 3;
  double plant_scale = 1.0;
  int threads = 0;
};

// Ready-to-run defaults for the given sweep.
ExperimentConfig default_config(ExperimentKind kind);

// Flat key=value file ('#' starts a comment). Starts from
// default_config(kind); an `experiment` key must agree with `kind`.
ExperimentConfig load_config(const std::string& path, ExperimentKind kind);

// One key=value override (same keys as the config file).
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

void validate_config(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::string method;
  double sweep_value = 0.0;
  std::size_t replication = 0;
  double mean_error = 0.0;  // mean over pixels within the replication
  double std_error = 0.0;   // sample std over pixels (n-1)
  double wall_ms = 0.0;
};

// Recovery error vs. Gaussian noise level. Grid entries are SNR in dB; an
// infinite entry means no noise.
std::vector<ResultRow> run_noise_sweep(const ExperimentConfig& config);

// Recovery error vs. sparsity k under sign-flip mixing noise. One scene per
// replication, shared by every grid point.
std::vector<ResultRow> run_sparsity_sweep(const ExperimentConfig& config);

// Scene-mean reconstruction error vs. number of residual basis vectors c.
// Synthetic scenes carry a planted out-of-dictionary residual of rank
// `planted_rank`; set cube_path to measure a stored cube instead.
std::vector<ResultRow> run_compression_sweep(const ExperimentConfig& config);

std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string csv_text(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

// Per (method, sweep value) aggregate across replications; std uses the
// n-1 denominator.
std::string summary_text(const std::vector<ResultRow>& rows);
void emit_summary(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace hsu
