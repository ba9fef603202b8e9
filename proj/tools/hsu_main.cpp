// Command line front end: scene synthesis, unmixing, compression, and the
// benchmark sweeps.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsu/bench.hpp"
#include "hsu/compress.hpp"
#include "hsu/datagen.hpp"
#include "hsu/kernels.hpp"
#include "hsu/spectra.hpp"
#include "hsu/unmix.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

int classify(hsu::errc code) {
  switch (code) {
    case hsu::errc::bad_config:
    case hsu::errc::k_out_of_range:
    case hsu::errc::non_positive_gamma:
    case hsu::errc::support_too_large:
    case hsu::errc::c_too_large:
    case hsu::errc::combinatorial_limit:
    case hsu::errc::dimension_mismatch:
      return kExitConfig;
    default:
      return kExitData;
  }
}

hsu::PruneMethod method_from(const std::string& name, double gamma) {
  if (name == "standard") return hsu::PruneMethod::standard();
  if (name == "rbf") return hsu::PruneMethod::rbf(gamma);
  throw hsu::Error(hsu::errc::bad_config, "unknown method '" + name + "'");
}

struct SynthArgs {
  std::string dict;
  std::size_t rows = 1, cols = 10, support = 17;
  std::string noise = "none";
  double snr_db = 30.0;
  double flip_probability = 0.1;
  std::string flip_mode = "atom";
  std::uint64_t seed = 1;
  std::string out;
  std::string truth_out;
};

void run_synth(const SynthArgs& a) {
  const hsu::Dictionary dict = hsu::load_dictionary_uri(a.dict, hsu::mix_seed({a.seed, 10}));
  hsu::NoiseSpec noise = hsu::NoiseSpec::none();
  const hsu::FlipMode mode = a.flip_mode == "band" ? hsu::FlipMode::Band : hsu::FlipMode::Atom;
  if (a.noise == "awgn") noise = hsu::NoiseSpec::awgn(a.snr_db);
  else if (a.noise == "flip") noise = hsu::NoiseSpec::sign_flip(a.flip_probability, mode);
  else if (a.noise != "none")
    throw hsu::Error(hsu::errc::bad_config, "noise must be none, awgn, or flip");

  hsu::SyntheticScene scene =
      hsu::synth_scene(dict, a.rows, a.cols, a.support, noise, a.seed);
  hsu::save_cube(scene.cube, a.out);
  std::printf("wrote %s: %zu bands, %zu x %zu pixels\n", a.out.c_str(), scene.cube.bands(),
              scene.cube.rows(), scene.cube.cols());
  if (!a.truth_out.empty()) {
    hsu::CompressedScene truth{std::move(scene.ground_truth),
                               hsu::CompressionBasis(dict.bands(), {}, {}), dict.names(), {}};
    hsu::save_compressed(truth, a.truth_out);
    std::printf("wrote %s: ground-truth coefficients\n", a.truth_out.c_str());
  }
}

struct UnmixArgs {
  std::string cube, dict;
  std::size_t k = 20;
  std::string method = "standard";
  double gamma = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

void run_unmix(const UnmixArgs& a) {
  const hsu::HyperCube cube = hsu::load_cube(a.cube);
  const hsu::Dictionary dict = hsu::load_dictionary_uri(a.dict, hsu::mix_seed({a.seed, 10}));

  hsu::UnmixResult result =
      a.method == "mp"
          ? hsu::mp_cube(cube, dict, a.k, a.threads)
          : hsu::pnnls_cube(cube, dict, a.k, method_from(a.method, a.gamma), a.threads);

  hsu::CompressedScene scene{std::move(result.abundances),
                             hsu::CompressionBasis(dict.bands(), {}, {}), dict.names(),
                             std::move(result.failures)};
  hsu::save_compressed(scene, a.out);
  std::printf("wrote %s: %zu pixels, %zu nonzero coefficients, %zu failed pixels\n",
              a.out.c_str(), scene.abundances.pixels(), scene.abundances.nonzeros(),
              scene.failures.size());
  for (const hsu::PixelFailure& f : scene.failures) {
    std::fprintf(stderr, "pixel (%zu, %zu) failed: %s\n", f.row, f.col, f.message.c_str());
  }
}

struct CompressArgs {
  std::string cube, dict;
  std::size_t k = 20;
  std::size_t c = 5;
  std::string method = "standard";
  double gamma = 1.0;
  bool nonneg_basis = false;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

void run_compress(const CompressArgs& a) {
  const hsu::HyperCube cube = hsu::load_cube(a.cube);
  const hsu::Dictionary dict = hsu::load_dictionary_uri(a.dict, hsu::mix_seed({a.seed, 10}));

  hsu::CompressOptions options;
  options.nonneg_basis = a.nonneg_basis;
  options.threads = a.threads;
  const hsu::CompressedScene scene =
      hsu::compress_scene(cube, dict, a.k, a.c, method_from(a.method, a.gamma), options);
  hsu::save_compressed(scene, a.out);

  const hsu::CompressionError err =
      hsu::compression_error(cube, hsu::reconstruct_compressed(scene, dict));
  std::printf("wrote %s: %zu basis vectors, scene-mean compression error %.6g\n", a.out.c_str(),
              scene.basis.count(), err.scene_mean);
  for (const hsu::PixelFailure& f : scene.failures) {
    std::fprintf(stderr, "pixel (%zu, %zu) failed: %s\n", f.row, f.col, f.message.c_str());
  }
}

struct BenchArgs {
  std::string config;
  std::string out = "results.csv";
  std::string summary;
  std::vector<std::pair<std::string, std::string>> overrides;  // key, value
};

void run_bench(hsu::ExperimentKind kind, const BenchArgs& a) {
  hsu::ExperimentConfig cfg =
      a.config.empty() ? hsu::default_config(kind) : hsu::load_config(a.config, kind);
  for (const auto& [key, value] : a.overrides) hsu::apply_config_entry(cfg, key, value);
  hsu::validate_config(cfg);

  const std::vector<hsu::ResultRow> rows = hsu::run_experiment(cfg);
  hsu::emit_csv(rows, a.out);
  std::printf("wrote %s: %zu rows\n", a.out.c_str(), rows.size());
  if (!a.summary.empty()) {
    hsu::emit_summary(rows, a.summary);
    std::printf("wrote %s\n", a.summary.c_str());
  } else {
    std::fputs(hsu::summary_text(rows).c_str(), stdout);
  }
}

// Flags whose value is forwarded verbatim into the config; keeps the CLI
// and the config file in one vocabulary.
void add_override_flags(CLI::App* cmd, BenchArgs& args) {
  static const std::vector<std::pair<std::string, std::string>> kKeys = {
      {"--dict", "dict"},           {"--k", "k"},
      {"--gamma", "gamma"},         {"--seed", "seed"},
      {"--rows", "rows"},           {"--cols", "cols"},
      {"--support", "support"},     {"--replications", "replications"},
      {"--grid", "grid"},           {"--methods", "methods"},
      {"--flip-prob", "flip_probability"}, {"--flip-mode", "flip_mode"},
      {"--timing", "timing"},       {"--error-norm", "error_norm"},
      {"--cube", "cube"},           {"--planted-rank", "planted_rank"},
      {"--plant-scale", "plant_scale"}, {"--threads", "threads"},
      {"--orthonormalize", "orthonormalize"},
  };
  for (const auto& [flag, key] : kKeys) {
    const std::string key_copy = key;
    cmd->add_option_function<std::string>(
        flag,
        [&args, key_copy](const std::string& value) { args.overrides.emplace_back(key_copy, value); },
        "config override " + key);
  }
  cmd->add_flag_callback(
      "--nonneg-basis", [&args]() { args.overrides.emplace_back("nonneg_basis", "true"); },
      "rerun the pruned solve over the compression basis instead of projecting");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse hyperspectral unmixing via pruned non-negative least squares"};
  app.set_version_flag("--version",
                       std::string("hsu 1.0.0 (kernels: ") + hsu::kernels::active().name + ")");
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene cube");
  synth_cmd->add_option("--dict", synth.dict, "dictionary CSV path or synth:<style>:<N>:<p>")
      ->required();
  synth_cmd->add_option("--rows", synth.rows, "scene rows");
  synth_cmd->add_option("--cols", synth.cols, "scene columns");
  synth_cmd->add_option("--support", synth.support, "atoms mixed per pixel");
  synth_cmd->add_option("--noise", synth.noise, "none | awgn | flip");
  synth_cmd->add_option("--snr", synth.snr_db, "SNR in dB for awgn");
  synth_cmd->add_option("--flip-prob", synth.flip_probability, "sign flip probability");
  synth_cmd->add_option("--flip-mode", synth.flip_mode, "atom | band");
  synth_cmd->add_option("--seed", synth.seed, "scene seed");
  synth_cmd->add_option("--out", synth.out, "output cube path")->required();
  synth_cmd->add_option("--truth-out", synth.truth_out, "also save ground-truth coefficients");

  UnmixArgs unmix;
  CLI::App* unmix_cmd = app.add_subcommand("unmix", "per-pixel sparse decomposition of a cube");
  unmix_cmd->add_option("--cube", unmix.cube, "input cube path")->required();
  unmix_cmd->add_option("--dict", unmix.dict, "dictionary CSV path or synth:<style>:<N>:<p>")
      ->required();
  unmix_cmd->add_option("--k", unmix.k, "sparsity (atoms kept per pixel)");
  unmix_cmd->add_option("--method", unmix.method, "standard | rbf | mp");
  unmix_cmd->add_option("--gamma", unmix.gamma, "RBF kernel width");
  unmix_cmd->add_option("--seed", unmix.seed, "seed for synthetic dictionaries");
  unmix_cmd->add_option("--threads", unmix.threads, "worker threads (0 = hardware)");
  unmix_cmd->add_option("--out", unmix.out, "output coefficient container")->required();

  CompressArgs compress;
  CLI::App* compress_cmd =
      app.add_subcommand("compress", "unmix plus residual compression vectors");
  compress_cmd->add_option("--cube", compress.cube, "input cube path")->required();
  compress_cmd->add_option("--dict", compress.dict, "dictionary CSV path or synth:<style>:<N>:<p>")
      ->required();
  compress_cmd->add_option("--k", compress.k, "sparsity (atoms kept per pixel)");
  compress_cmd->add_option("--c", compress.c, "number of compression vectors");
  compress_cmd->add_option("--method", compress.method, "standard | rbf");
  compress_cmd->add_option("--gamma", compress.gamma, "RBF kernel width");
  compress_cmd->add_flag("--nonneg-basis", compress.nonneg_basis,
                         "fit basis coefficients with the pruned nonnegative solve");
  compress_cmd->add_option("--seed", compress.seed, "seed for synthetic dictionaries");
  compress_cmd->add_option("--threads", compress.threads, "worker threads (0 = hardware)");
  compress_cmd->add_option("--out", compress.out, "output compressed scene path")->required();

  CLI::App* bench_cmd = app.add_subcommand("bench", "experiment sweeps with CSV output");
  bench_cmd->require_subcommand(1);
  BenchArgs bench_noise, bench_sparsity, bench_compression;
  struct BenchSub {
    const char* name;
    const char* help;
    hsu::ExperimentKind kind;
    BenchArgs* args;
  };
  const std::vector<BenchSub> bench_subs = {
      {"noise", "recovery error across an SNR grid", hsu::ExperimentKind::Noise, &bench_noise},
      {"sparsity", "recovery error across a sparsity grid under sign-flip noise",
       hsu::ExperimentKind::Sparsity, &bench_sparsity},
      {"compression", "reconstruction error across a basis-size grid",
       hsu::ExperimentKind::Compression, &bench_compression},
  };
  std::vector<std::pair<CLI::App*, const BenchSub*>> bench_dispatch;
  for (const BenchSub& sub : bench_subs) {
    CLI::App* cmd = bench_cmd->add_subcommand(sub.name, sub.help);
    cmd->add_option("--config", sub.args->config, "flat key=value config file");
    cmd->add_option("--out", sub.args->out, "CSV output path");
    cmd->add_option("--summary", sub.args->summary, "aggregate report path");
    add_override_flags(cmd, *sub.args);
    bench_dispatch.emplace_back(cmd, &sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*unmix_cmd) run_unmix(unmix);
    if (*compress_cmd) run_compress(compress);
    for (const auto& [cmd, sub] : bench_dispatch) {
      if (*cmd) run_bench(sub->kind, *sub->args);
    }
  } catch (const hsu::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
