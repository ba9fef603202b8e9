#include "hsu/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "hsu/compress.hpp"
#include "hsu/kernels.hpp"
#include "hsu/solvers.hpp"
#include "hsu/spectra.hpp"
#include "hsu/unmix.hpp"

namespace hsu {
namespace {

// Substream tags: scene seeds per experiment, planted-residual draws, and
// the dictionary itself. Changing any of these changes every output byte.
constexpr std::uint64_t kNoiseTag = 1;
constexpr std::uint64_t kSparsityTag = 2;
constexpr std::uint64_t kCompressionTag = 3;
constexpr std::uint64_t kPlantWeightTag = 4;
constexpr std::uint64_t kPlantDirectionTag = 5;
constexpr std::uint64_t kDictTag = 10;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct PixelStats {
  double mean = 0.0;
  double stddev = 0.0;
};

PixelStats pixel_stats(const std::vector<double>& values) {
  PixelStats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

double recovery_error(const double* c, const double* beta, std::size_t n, ErrorNorm norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = c[i] - beta[i];
    acc += norm == ErrorNorm::L1 ? std::fabs(d) : d * d;
  }
  return norm == ErrorNorm::L1 ? acc : std::sqrt(acc);
}

std::vector<double> recovery_errors(const AbundanceMap& estimate, const AbundanceMap& truth,
                                    ErrorNorm norm) {
  std::vector<double> errors(estimate.pixels());
  const std::size_t n = truth.coeff_rows();
  for (std::size_t r = 0; r < estimate.rows(); ++r) {
    for (std::size_t c = 0; c < estimate.cols(); ++c) {
      errors[r * estimate.cols() + c] =
          recovery_error(estimate.slice(r, c), truth.slice(r, c), n, norm);
    }
  }
  return errors;
}

Dictionary prepare_dictionary(const ExperimentConfig& cfg) {
  Dictionary dict = load_dictionary_uri(cfg.dict_uri, mix_seed({cfg.seed, kDictTag}));
  if (cfg.orthonormalize) dict = gram_schmidt(dict).dict;
  return dict;
}

UnmixResult run_method(const HyperCube& cube, const Dictionary& dict, std::size_t k, MethodId id,
                       const ExperimentConfig& cfg) {
  switch (id) {
    case MethodId::Standard:
      return pnnls_cube(cube, dict, k, PruneMethod::standard(), cfg.threads);
    case MethodId::Rbf:
      return pnnls_cube(cube, dict, k, PruneMethod::rbf(cfg.gamma), cfg.threads);
    case MethodId::Mp:
      return mp_cube(cube, dict, k, cfg.threads);
  }
  throw Error(errc::bad_config, "unknown method id");
}

std::size_t as_count(double v, const std::string& what) {
  const double rounded = std::nearbyint(v);
  require(std::isfinite(v) && std::fabs(v - rounded) < 1e-9 && rounded >= 0.0,
          errc::bad_config, what + " must be a nonnegative integer, got " + format_g17(v));
  return static_cast<std::size_t>(rounded);
}

void require_kind(const ExperimentConfig& cfg, ExperimentKind kind) {
  require(cfg.experiment == kind, errc::bad_config,
          "config is for experiment '" + experiment_token(cfg.experiment) + "'");
}

double elapsed_or_zero(const ExperimentConfig& cfg, double start) {
  return cfg.timing_real ? now_ms() - start : 0.0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  out.push_back(current);
  return out;
}

std::string trim_copy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(errc::bad_config, key + " must be true or false, got '" + value + "'");
}

double parse_number(const std::string& value, const std::string& key) {
  if (value == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  require(end != value.c_str() && *end == '\0', errc::bad_config,
          key + " must be a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  require(end != value.c_str() && *end == '\0', errc::bad_config,
          key + " must be an unsigned integer, got '" + value + "'");
  return v;
}

}  // namespace

std::string experiment_token(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Noise: return "noise";
    case ExperimentKind::Sparsity: return "sparsity";
    case ExperimentKind::Compression: return "compression";
  }
  return "unknown";
}

std::string method_token(MethodId id) {
  switch (id) {
    case MethodId::Standard: return "standard";
    case MethodId::Rbf: return "rbf";
    case MethodId::Mp: return "mp";
  }
  return "unknown";
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  switch (kind) {
    case ExperimentKind::Noise:
      cfg.dict_uri = "synth:gaussian:448:480";
      cfg.orthonormalize = true;
      cfg.rows = 1;
      cfg.cols = 10;
      cfg.support_size = 17;
      cfg.k = 20;
      cfg.methods = {MethodId::Standard, MethodId::Rbf};
      cfg.grid = {10, 20, 30, 40, 50, 60};
      cfg.replications = 10;
      break;
    case ExperimentKind::Sparsity:
      cfg.dict_uri = "synth:gaussian:97:240";
      cfg.orthonormalize = false;
      cfg.rows = 1;
      cfg.cols = 10;
      cfg.support_size = 88;
      cfg.flip_probability = 0.1;
      cfg.methods = {MethodId::Standard, MethodId::Rbf, MethodId::Mp};
      cfg.grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 97};
      cfg.replications = 10;
      break;
    case ExperimentKind::Compression:
      cfg.dict_uri = "synth:gaussian:60:64";
      cfg.orthonormalize = false;
      cfg.rows = 6;
      cfg.cols = 6;
      cfg.support_size = 20;
      cfg.k = 60;
      cfg.methods = {MethodId::Standard, MethodId::Mp};
      cfg.grid = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.replications = 5;
      cfg.planted_rank = 3;
      break;
  }
  return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    if (value == "noise") cfg.experiment = ExperimentKind::Noise;
    else if (value == "sparsity") cfg.experiment = ExperimentKind::Sparsity;
    else if (value == "compression") cfg.experiment = ExperimentKind::Compression;
    else throw Error(errc::bad_config, "unknown experiment '" + value + "'");
  } else if (key == "dict") {
    cfg.dict_uri = value;
  } else if (key == "orthonormalize") {
    cfg.orthonormalize = parse_bool(value, key);
  } else if (key == "rows") {
    cfg.rows = as_count(parse_number(value, key), key);
  } else if (key == "cols") {
    cfg.cols = as_count(parse_number(value, key), key);
  } else if (key == "support") {
    cfg.support_size = as_count(parse_number(value, key), key);
  } else if (key == "k") {
    cfg.k = as_count(parse_number(value, key), key);
  } else if (key == "gamma") {
    cfg.gamma = parse_number(value, key);
  } else if (key == "flip_probability") {
    cfg.flip_probability = parse_number(value, key);
  } else if (key == "flip_mode") {
    if (value == "atom") cfg.flip_mode = FlipMode::Atom;
    else if (value == "band") cfg.flip_mode = FlipMode::Band;
    else throw Error(errc::bad_config, "flip_mode must be atom or band, got '" + value + "'");
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& token : split_list(value)) {
      const std::string t = trim_copy(token);
      if (t == "standard") cfg.methods.push_back(MethodId::Standard);
      else if (t == "rbf") cfg.methods.push_back(MethodId::Rbf);
      else if (t == "mp") cfg.methods.push_back(MethodId::Mp);
      else throw Error(errc::bad_config, "unknown method '" + t + "'");
    }
  } else if (key == "grid") {
    cfg.grid.clear();
    for (const std::string& token : split_list(value)) {
      cfg.grid.push_back(parse_number(trim_copy(token), key));
    }
  } else if (key == "replications") {
    cfg.replications = as_count(parse_number(value, key), key);
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, key);
  } else if (key == "timing") {
    if (value == "real") cfg.timing_real = true;
    else if (value == "zero") cfg.timing_real = false;
    else throw Error(errc::bad_config, "timing must be real or zero, got '" + value + "'");
  } else if (key == "nonneg_basis") {
    cfg.nonneg_basis = parse_bool(value, key);
  } else if (key == "error_norm") {
    if (value == "l1") cfg.error_norm = ErrorNorm::L1;
    else if (value == "l2") cfg.error_norm = ErrorNorm::L2;
    else throw Error(errc::bad_config, "error_norm must be l1 or l2, got '" + value + "'");
  } else if (key == "cube") {
    cfg.cube_path = value;
  } else if (key == "planted_rank") {
    cfg.planted_rank = as_count(parse_number(value, key), key);
  } else if (key == "plant_scale") {
    cfg.plant_scale = parse_number(value, key);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_number(value, key));
  } else {
    throw Error(errc::bad_config, "unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind) {
  std::ifstream file(path);
  require(file.is_open(), errc::io_error, "cannot open for reading: " + path);

  ExperimentConfig cfg = default_config(kind);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim_copy(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, errc::bad_config,
            path + ": line " + std::to_string(line_no) + " is not key=value");
    apply_config_entry(cfg, trim_copy(body.substr(0, eq)), trim_copy(body.substr(eq + 1)));
  }
  require(cfg.experiment == kind, errc::bad_config,
          path + " configures experiment '" + experiment_token(cfg.experiment) +
              "', expected '" + experiment_token(kind) + "'");
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  require(cfg.replications >= 1, errc::bad_config, "replications must be at least 1");
  require(!cfg.grid.empty(), errc::bad_config, "sweep grid must be nonempty");
  for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i) {
    require(cfg.grid[i] < cfg.grid[i + 1], errc::bad_config,
            "sweep grid must be strictly ascending");
  }
  require(!cfg.methods.empty(), errc::bad_config, "method list must be nonempty");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
      require(cfg.methods[i] != cfg.methods[j], errc::bad_config,
              "method list has duplicates");
    }
  }
  require(cfg.rows >= 1 && cfg.cols >= 1, errc::bad_config, "scene must have at least one pixel");
  require(cfg.support_size >= 1, errc::bad_config, "support size must be at least 1");
  require(cfg.k >= 1, errc::bad_config, "k must be at least 1");
  require(cfg.gamma > 0.0, errc::non_positive_gamma, "gamma must be positive");
  require(cfg.flip_probability >= 0.0 && cfg.flip_probability <= 1.0, errc::bad_config,
          "flip_probability must lie in [0, 1]");
  require(cfg.plant_scale > 0.0, errc::bad_config, "plant_scale must be positive");
}

std::vector<ResultRow> run_noise_sweep(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::Noise);
  validate_config(cfg);
  const Dictionary dict = prepare_dictionary(cfg);

  std::vector<ResultRow> rows;
  rows.reserve(cfg.grid.size() * cfg.replications * cfg.methods.size());
  for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
    const double snr = cfg.grid[gi];
    const NoiseSpec noise = std::isinf(snr) ? NoiseSpec::none() : NoiseSpec::awgn(snr);
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const SyntheticScene scene = synth_scene(dict, cfg.rows, cfg.cols, cfg.support_size, noise,
                                               mix_seed({cfg.seed, kNoiseTag, gi, rep}));
      for (MethodId m : cfg.methods) {
        const double start = now_ms();
        const UnmixResult result = run_method(scene.cube, dict, cfg.k, m, cfg);
        const PixelStats stats =
            pixel_stats(recovery_errors(result.abundances, scene.ground_truth, cfg.error_norm));
        rows.push_back({experiment_token(cfg.experiment), method_token(m), snr, rep, stats.mean,
                        stats.stddev, elapsed_or_zero(cfg, start)});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_sparsity_sweep(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::Sparsity);
  validate_config(cfg);
  const Dictionary dict = prepare_dictionary(cfg);

  std::vector<std::size_t> k_values;
  for (double v : cfg.grid) {
    const std::size_t k = as_count(v, "sparsity grid entry");
    require(k >= 1 && k <= dict.size(), errc::bad_config,
            "sparsity grid entry " + std::to_string(k) + " outside [1, " +
                std::to_string(dict.size()) + "]");
    k_values.push_back(k);
  }

  // One scene per replication, shared by every k so curves differ only in
  // sparsity.
  const NoiseSpec noise = NoiseSpec::sign_flip(cfg.flip_probability, cfg.flip_mode);
  std::vector<SyntheticScene> scenes;
  scenes.reserve(cfg.replications);
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    scenes.push_back(synth_scene(dict, cfg.rows, cfg.cols, cfg.support_size, noise,
                                 mix_seed({cfg.seed, kSparsityTag, rep})));
  }

  std::vector<ResultRow> rows;
  rows.reserve(cfg.grid.size() * cfg.replications * cfg.methods.size());
  for (std::size_t gi = 0; gi < k_values.size(); ++gi) {
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      for (MethodId m : cfg.methods) {
        const double start = now_ms();
        const UnmixResult result = run_method(scenes[rep].cube, dict, k_values[gi], m, cfg);
        const PixelStats stats = pixel_stats(
            recovery_errors(result.abundances, scenes[rep].ground_truth, cfg.error_norm));
        rows.push_back({experiment_token(cfg.experiment), method_token(m), cfg.grid[gi], rep,
                        stats.mean, stats.stddev, elapsed_or_zero(cfg, start)});
      }
    }
  }
  return rows;
}

namespace {

// Random unit vectors orthogonal to the dictionary span, shared by every
// pixel of one replication.
std::vector<std::vector<double>> planted_directions(const Dictionary& dict,
                                                    const ExperimentConfig& cfg,
                                                    std::size_t rep) {
  const std::size_t p = dict.bands();
  require(p > dict.size(), errc::bad_config,
          "planted residual needs more bands than atoms so that span(A) has a complement");

  std::vector<std::vector<double>> directions;
  for (std::size_t t = 0; t < cfg.planted_rank; ++t) {
    Rng rng(mix_seed({cfg.seed, kPlantDirectionTag, rep, t}));
    std::vector<double> s(p);
    for (double& v : s) v = rng.normal();
    const std::vector<double> coeffs = lstsq(dict.view(), s);
    for (std::size_t i = 0; i < dict.size(); ++i) {
      kernels::axpy(-coeffs[i], dict.col(i), s.data(), p);
    }
    const double norm = kernels::nrm2(s.data(), p);
    require(norm > 1e-12, errc::zero_residual, "planted direction degenerated to zero");
    kernels::scale(1.0 / norm, s.data(), p);
    directions.push_back(std::move(s));
  }
  return directions;
}

HyperCube compression_scene(const Dictionary& dict, const ExperimentConfig& cfg,
                            std::size_t rep) {
  SyntheticScene scene = synth_scene(dict, cfg.rows, cfg.cols, cfg.support_size,
                                     NoiseSpec::none(), mix_seed({cfg.seed, kCompressionTag, rep}));
  if (cfg.planted_rank == 0) return std::move(scene.cube);

  const auto directions = planted_directions(dict, cfg, rep);
  const std::size_t p = dict.bands();
  for (std::size_t r = 0; r < cfg.rows; ++r) {
    for (std::size_t c = 0; c < cfg.cols; ++c) {
      Rng rng = pixel_stream(mix_seed({cfg.seed, kPlantWeightTag, rep}), r * cfg.cols + c);
      double* y = scene.cube.pixel(r, c);
      for (const auto& s : directions) {
        kernels::axpy(cfg.plant_scale * rng.uniform01(), s.data(), y, p);
      }
    }
  }
  return std::move(scene.cube);
}

}  // namespace

std::vector<ResultRow> run_compression_sweep(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::Compression);
  validate_config(cfg);
  const Dictionary dict = prepare_dictionary(cfg);

  std::vector<std::size_t> c_values;
  for (double v : cfg.grid) c_values.push_back(as_count(v, "compression grid entry"));
  const std::size_t c_max = c_values.back();

  const std::size_t kG = c_values.size();
  const std::size_t kM = cfg.methods.size();
  std::vector<ResultRow> rows(kG * cfg.replications * kM);

  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const HyperCube cube = cfg.cube_path.empty() ? compression_scene(dict, cfg, rep)
                                                 : load_cube(cfg.cube_path);
    require(c_max <= std::min(cube.bands(), cube.pixels()), errc::bad_config,
            "compression grid exceeds min(bands, pixels)");

    for (std::size_t mi = 0; mi < kM; ++mi) {
      const MethodId m = cfg.methods[mi];
      double shared_start = now_ms();
      const UnmixResult stage_one = run_method(cube, dict, cfg.k, m, cfg);
      CompressionBasis basis(cube.bands(), {}, {});
      if (c_max > 0) {
        const HyperCube residuals = residual_cube(cube, dict, stage_one.abundances);
        try {
          basis = compression_basis(residuals, c_max);
        } catch (const Error& e) {
          if (e.code() != errc::zero_residual) throw;
          // Stage one already reconstructs the cube exactly; every c row
          // reports the same (zero) error.
        }
      }
      double shared_ms = elapsed_or_zero(cfg, shared_start);

      for (std::size_t gi = 0; gi < kG; ++gi) {
        const std::size_t c = c_values[gi];
        const double start = now_ms();
        CompressionError err;
        if (c == 0 || basis.count() == 0) {
          err = compression_error(cube, reconstruct(stage_one.abundances, dict));
        } else {
          const CompressionBasis basis_c = basis.truncated(std::min(c, basis.count()));
          CompressOptions options;
          options.nonneg_basis = cfg.nonneg_basis;
          options.threads = cfg.threads;
          const CompressedScene scene = attach_basis(cube, dict, stage_one, basis_c, options);
          err = compression_error(cube, reconstruct_compressed(scene, dict));
        }
        const PixelStats stats = pixel_stats(err.per_pixel);
        ResultRow& row = rows[gi * cfg.replications * kM + rep * kM + mi];
        row = {experiment_token(cfg.experiment), method_token(m), cfg.grid[gi], rep,
               err.scene_mean, stats.stddev, elapsed_or_zero(cfg, start) + shared_ms};
        shared_ms = 0.0;  // stage one and the SVD are charged to the first c row
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Noise: return run_noise_sweep(cfg);
    case ExperimentKind::Sparsity: return run_sparsity_sweep(cfg);
    case ExperimentKind::Compression: return run_compression_sweep(cfg);
  }
  throw Error(errc::bad_config, "unknown experiment kind");
}

std::string csv_text(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,method,sweep_value,replication,mean_error,std_error,wall_ms\n";
  for (const ResultRow& r : rows) {
    out += r.experiment;
    out += ',';
    out += r.method;
    out += ',';
    out += format_g17(r.sweep_value);
    out += ',';
    out += std::to_string(r.replication);
    out += ',';
    out += format_g17(r.mean_error);
    out += ',';
    out += format_g17(r.std_error);
    out += ',';
    out += format_g17(r.wall_ms);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for writing: " + path);
  const std::string text = csv_text(rows);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  file.flush();
  require(file.good(), errc::io_error, "write failed: " + path);
}

std::string summary_text(const std::vector<ResultRow>& rows) {
  struct Group {
    std::string experiment, method;
    double sweep_value;
    std::vector<double> means;
    double wall_sum = 0.0;
  };
  std::vector<Group> groups;
  for (const ResultRow& r : rows) {
    Group* g = nullptr;
    for (Group& existing : groups) {
      if (existing.experiment == r.experiment && existing.method == r.method &&
          existing.sweep_value == r.sweep_value) {
        g = &existing;
        break;
      }
    }
    if (!g) {
      groups.push_back({r.experiment, r.method, r.sweep_value, {}, 0.0});
      g = &groups.back();
    }
    g->means.push_back(r.mean_error);
    g->wall_sum += r.wall_ms;
  }

  std::string out =
      "experiment   method    sweep_value   reps  mean_error     std_over_reps  mean_wall_ms\n";
  for (const Group& g : groups) {
    const PixelStats stats = pixel_stats(g.means);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %-9s %-13.6g %-5zu %-14.6g %-14.6g %-12.6g\n",
                  g.experiment.c_str(), g.method.c_str(), g.sweep_value, g.means.size(),
                  stats.mean, stats.stddev, g.wall_sum / static_cast<double>(g.means.size()));
    out += buf;
  }
  return out;
}

void emit_summary(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for writing: " + path);
  const std::string text = summary_text(rows);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  file.flush();
  require(file.good(), errc::io_error, "write failed: " + path);
}

}  // namespace hsu
