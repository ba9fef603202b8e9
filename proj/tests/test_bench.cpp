#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hsu/bench.hpp"
#include "hsu/datagen.hpp"

using namespace hsu;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& stem) {
    path = (std::filesystem::temp_directory_path() / stem).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

errc entry_error(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    apply_config_entry(cfg, key, value);
    return errc::io_error;  // wrong on purpose; callers expect a specific code
  } catch (const Error& e) {
    return e.code();
  }
}

errc validation_error(const ExperimentConfig& cfg) {
  try {
    validate_config(cfg);
    return errc::io_error;
  } catch (const Error& e) {
    return e.code();
  }
}

ExperimentConfig small_noise_config() {
  ExperimentConfig cfg = default_config(ExperimentKind::Noise);
  cfg.dict_uri = "synth:gaussian:16:24";
  cfg.orthonormalize = false;
  cfg.rows = 1;
  cfg.cols = 5;
  cfg.support_size = 3;
  cfg.k = 8;
  cfg.grid = {20, 40};
  cfg.replications = 2;
  cfg.methods = {MethodId::Standard, MethodId::Rbf};
  return cfg;
}

}  // namespace

TEST_CASE("the built-in defaults validate for every sweep") {
  for (auto kind :
       {ExperimentKind::Noise, ExperimentKind::Sparsity, ExperimentKind::Compression}) {
    const ExperimentConfig cfg = default_config(kind);
    CHECK(cfg.experiment == kind);
    CHECK_NOTHROW(validate_config(cfg));
  }
}

TEST_CASE("noise sweep rows follow grid-major, replication, method order") {
  const ExperimentConfig cfg = small_noise_config();
  const auto rows = run_noise_sweep(cfg);

  REQUIRE(rows.size() == 2 * 2 * 2);
  CHECK(rows[0].experiment == "noise");
  CHECK(rows[0].method == "standard");
  CHECK(rows[0].sweep_value == 20.0);
  CHECK(rows[0].replication == 0);
  CHECK(rows[1].method == "rbf");
  CHECK(rows[2].replication == 1);
  CHECK(rows[4].sweep_value == 40.0);
  for (const ResultRow& r : rows) {
    CHECK(r.wall_ms == 0.0);  // timing defaults to byte-stable zeros
    CHECK(r.mean_error >= 0.0);
    CHECK(r.std_error >= 0.0);
  }
}

TEST_CASE("sweeps are deterministic down to the emitted bytes") {
  const ExperimentConfig cfg = small_noise_config();
  const std::string first = csv_text(run_noise_sweep(cfg));
  const std::string second = csv_text(run_experiment(cfg));
  CHECK(first == second);
  CHECK(first.rfind("experiment,method,sweep_value,replication,mean_error,std_error,wall_ms\n",
                    0) == 0);

  TempFile tmp("hsu_test_rows.csv");
  emit_csv(run_noise_sweep(cfg), tmp.path);
  std::ifstream in(tmp.path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == first);
}

TEST_CASE("csv formatting is stable and exact") {
  const std::vector<ResultRow> rows = {
      {"noise", "standard", 10.0, 0, 1.0, 0.0, 4.0},
      {"noise", "standard", 10.0, 1, 3.0, 0.0, 6.0},
      {"noise", "rbf", 10.0, 0, 0.25, 0.5, 0.0},
  };
  CHECK(csv_text(rows) ==
        "experiment,method,sweep_value,replication,mean_error,std_error,wall_ms\n"
        "noise,standard,10,0,1,0,4\n"
        "noise,standard,10,1,3,0,6\n"
        "noise,rbf,10,0,0.25,0.5,0\n");
}

TEST_CASE("summaries aggregate replications with the n-1 deviation") {
  const std::vector<ResultRow> rows = {
      {"noise", "standard", 10.0, 0, 1.0, 0.0, 4.0},
      {"noise", "standard", 10.0, 1, 3.0, 0.0, 6.0},
      {"noise", "rbf", 10.0, 0, 2.0, 0.0, 0.0},
  };
  const std::string text = summary_text(rows);

  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 3);  // header + one line per (method, sweep value)
  CHECK(text.find("standard") != std::string::npos);
  CHECK(text.find("1.41421") != std::string::npos);  // sqrt(2) from means {1, 3}
  CHECK(text.find(" 2 ") != std::string::npos);
}

TEST_CASE("keeping every atom makes the two pruning rules coincide") {
  ExperimentConfig cfg = default_config(ExperimentKind::Sparsity);
  cfg.dict_uri = "synth:gaussian:12:16";
  cfg.rows = 1;
  cfg.cols = 4;
  cfg.support_size = 4;
  cfg.grid = {6, 12};
  cfg.replications = 2;
  cfg.methods = {MethodId::Standard, MethodId::Rbf};

  const auto rows = run_sparsity_sweep(cfg);
  REQUIRE(rows.size() == 2 * 2 * 2);
  for (std::size_t rep = 0; rep < 2; ++rep) {
    const ResultRow& standard = rows[4 + rep * 2 + 0];  // grid point 12
    const ResultRow& rbf = rows[4 + rep * 2 + 1];
    REQUIRE(standard.sweep_value == 12.0);
    REQUIRE(standard.method == "standard");
    REQUIRE(rbf.method == "rbf");
    CHECK(standard.mean_error == rbf.mean_error);
    CHECK(standard.std_error == rbf.std_error);
  }
}

TEST_CASE("an infinite SNR entry runs the sweep without noise") {
  ExperimentConfig cfg = default_config(ExperimentKind::Noise);
  cfg.dict_uri = "synth:gaussian:15:30";
  cfg.orthonormalize = false;
  cfg.rows = 1;
  cfg.cols = 4;
  cfg.support_size = 3;
  cfg.k = 15;
  cfg.grid = {std::numeric_limits<double>::infinity()};
  cfg.replications = 2;
  cfg.methods = {MethodId::Standard};

  const auto rows = run_noise_sweep(cfg);
  REQUIRE(rows.size() == 2);
  for (const ResultRow& r : rows) CHECK(r.mean_error < 1e-10);
  CHECK(csv_text(rows).find("noise,standard,inf,0,") != std::string::npos);
}

TEST_CASE("sparsity grids outside [1, N] or off the integers are rejected") {
  ExperimentConfig cfg = default_config(ExperimentKind::Sparsity);
  cfg.dict_uri = "synth:gaussian:14:20";
  cfg.support_size = 3;
  cfg.replications = 1;
  cfg.cols = 2;

  for (const std::vector<double>& grid :
       {std::vector<double>{5, 20}, std::vector<double>{0, 5}, std::vector<double>{2.5}}) {
    cfg.grid = grid;
    try {
      static_cast<void>(run_sparsity_sweep(cfg));
      FAIL("expected bad_config");
    } catch (const Error& e) {
      CHECK(e.code() == errc::bad_config);
    }
  }
}

TEST_CASE("compression sweep rows are grouped by c, then replication, then method") {
  ExperimentConfig cfg = default_config(ExperimentKind::Compression);
  cfg.dict_uri = "synth:gaussian:10:16";
  cfg.rows = 2;
  cfg.cols = 3;
  cfg.support_size = 3;
  cfg.k = 10;
  cfg.grid = {0, 1, 2};
  cfg.replications = 2;
  cfg.planted_rank = 2;
  cfg.methods = {MethodId::Standard, MethodId::Mp};

  const auto rows = run_compression_sweep(cfg);
  REQUIRE(rows.size() == 3 * 2 * 2);
  CHECK(rows[0].sweep_value == 0.0);
  CHECK(rows[0].replication == 0);
  CHECK(rows[0].method == "standard");
  CHECK(rows[1].method == "mp");
  CHECK(rows[2].replication == 1);
  CHECK(rows[4].sweep_value == 1.0);

  // Keeping every atom makes stage one exact, so the planted rank-2 part is
  // the whole residual and two basis vectors erase it.
  for (std::size_t rep = 0; rep < 2; ++rep) {
    const double at_zero = rows[0 * 4 + rep * 2 + 0].mean_error;
    const double at_two = rows[2 * 4 + rep * 2 + 0].mean_error;
    CHECK(at_two < 1e-8);
    CHECK(at_two < at_zero);
  }

  CHECK(csv_text(run_compression_sweep(cfg)) == csv_text(rows));
}

TEST_CASE("a zero planted rank leaves nothing for the basis to absorb") {
  ExperimentConfig cfg = default_config(ExperimentKind::Compression);
  cfg.dict_uri = "synth:gaussian:10:16";
  cfg.rows = 1;
  cfg.cols = 4;
  cfg.support_size = 3;
  cfg.k = 10;
  cfg.grid = {0, 1};
  cfg.replications = 1;
  cfg.planted_rank = 0;
  cfg.methods = {MethodId::Standard};

  const auto rows = run_compression_sweep(cfg);
  REQUIRE(rows.size() == 2);
  for (const ResultRow& r : rows) CHECK(r.mean_error < 1e-10);
}

TEST_CASE("the compression sweep can measure a stored cube") {
  const Dictionary d = synth_dictionary("gaussian", 10, 16, 91);
  const auto scene = synth_scene(d, 2, 2, 3, NoiseSpec::awgn(15.0), 910);
  TempFile tmp("hsu_test_bench_cube.hcub");
  save_cube(scene.cube, tmp.path);

  ExperimentConfig cfg = default_config(ExperimentKind::Compression);
  cfg.dict_uri = "synth:gaussian:10:16";
  cfg.rows = 2;
  cfg.cols = 2;
  cfg.support_size = 3;
  cfg.k = 6;
  cfg.grid = {0, 1};
  cfg.replications = 2;
  cfg.cube_path = tmp.path;
  cfg.methods = {MethodId::Standard};

  const auto rows = run_compression_sweep(cfg);
  REQUIRE(rows.size() == 4);
  // Every replication loads the same cube, so the errors repeat exactly.
  CHECK(rows[0].mean_error == rows[1].mean_error);
  CHECK(rows[2].mean_error == rows[3].mean_error);
}

TEST_CASE("compression grids beyond min(bands, pixels) are rejected") {
  ExperimentConfig cfg = default_config(ExperimentKind::Compression);
  cfg.dict_uri = "synth:gaussian:10:16";
  cfg.rows = 2;
  cfg.cols = 3;
  cfg.support_size = 3;
  cfg.k = 10;
  cfg.grid = {0, 7};  // 6 pixels
  cfg.replications = 1;
  cfg.methods = {MethodId::Standard};

  try {
    static_cast<void>(run_compression_sweep(cfg));
    FAIL("expected bad_config");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_config);
  }
}

TEST_CASE("config files override the defaults key by key") {
  TempFile tmp("hsu_test_config.cfg");
  std::ofstream(tmp.path) << "# sparsity sweep exercise\n"
                             "experiment = sparsity\n"
                             "dict = synth:gaussian:14:20  # inline comment\n"
                             "support = 3\n"
                             "grid = 4, 8, 14\n"
                             "replications = 2\n"
                             "methods = standard, rbf\n"
                             "flip_probability = 0.25\n"
                             "flip_mode = band\n"
                             "gamma = 0.5\n"
                             "error_norm = l2\n"
                             "seed = 9\n"
                             "\n";

  const ExperimentConfig cfg = load_config(tmp.path, ExperimentKind::Sparsity);
  CHECK(cfg.dict_uri == "synth:gaussian:14:20");
  CHECK(cfg.support_size == 3);
  CHECK(cfg.grid == std::vector<double>{4, 8, 14});
  CHECK(cfg.replications == 2);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[0] == MethodId::Standard);
  CHECK(cfg.methods[1] == MethodId::Rbf);
  CHECK(cfg.flip_probability == 0.25);
  CHECK(cfg.flip_mode == FlipMode::Band);
  CHECK(cfg.gamma == 0.5);
  CHECK(cfg.error_norm == ErrorNorm::L2);
  CHECK(cfg.seed == 9);

  // The same file refuses to configure a different sweep.
  try {
    static_cast<void>(load_config(tmp.path, ExperimentKind::Noise));
    FAIL("expected bad_config");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_config);
  }
}

TEST_CASE("malformed config lines and keys are rejected") {
  TempFile tmp("hsu_test_config_bad.cfg");

  std::ofstream(tmp.path) << "experiment = noise\nnot a key value line\n";
  CHECK_THROWS_AS(static_cast<void>(load_config(tmp.path, ExperimentKind::Noise)), Error);

  std::ofstream(tmp.path) << "experiment = noise\nwavelength = 17\n";
  try {
    static_cast<void>(load_config(tmp.path, ExperimentKind::Noise));
    FAIL("expected bad_config");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_config);
    CHECK(std::string(e.what()).find("wavelength") != std::string::npos);
  }

  ExperimentConfig cfg = default_config(ExperimentKind::Noise);
  CHECK(entry_error(cfg, "experiment", "plaid") == errc::bad_config);
  CHECK(entry_error(cfg, "methods", "standard,banana") == errc::bad_config);
  CHECK(entry_error(cfg, "flip_mode", "diagonal") == errc::bad_config);
  CHECK(entry_error(cfg, "timing", "fast") == errc::bad_config);
  CHECK(entry_error(cfg, "error_norm", "l3") == errc::bad_config);
  CHECK(entry_error(cfg, "replications", "-2") == errc::bad_config);
  CHECK(entry_error(cfg, "k", "2.5") == errc::bad_config);
  CHECK(entry_error(cfg, "seed", "ten") == errc::bad_config);
  CHECK(entry_error(cfg, "orthonormalize", "maybe") == errc::bad_config);
}

TEST_CASE("validation rejects inconsistent sweep setups") {
  const ExperimentConfig base = small_noise_config();

  ExperimentConfig cfg = base;
  cfg.grid.clear();
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.grid = {30, 20};
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.grid = {20, 20};
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.replications = 0;
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.methods = {MethodId::Standard, MethodId::Standard};
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.methods.clear();
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.gamma = -1.0;
  CHECK(validation_error(cfg) == errc::non_positive_gamma);

  cfg = base;
  cfg.flip_probability = 1.5;
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.rows = 0;
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.support_size = 0;
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.k = 0;
  CHECK(validation_error(cfg) == errc::bad_config);

  cfg = base;
  cfg.plant_scale = 0.0;
  CHECK(validation_error(cfg) == errc::bad_config);

  // A sweep launched with a mismatched kind is refused outright.
  cfg = base;
  try {
    static_cast<void>(run_sparsity_sweep(cfg));
    FAIL("expected bad_config");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_config);
  }
}
