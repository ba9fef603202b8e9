#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hsu/datagen.hpp"
#include "hsu/kernels.hpp"
#include "hsu/rng.hpp"
#include "hsu/spectra.hpp"
#include "hsu/unmix.hpp"
#include "oracles.hpp"

using namespace hsu;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& stem) {
    path = (std::filesystem::temp_directory_path() / stem).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Spectrum parse(const std::string& text) {
  std::istringstream in(text);
  return parse_usgs_ascii(in);
}

errc parse_error(const std::string& text) {
  try {
    static_cast<void>(parse(text));
    return errc::io_error;  // not reached; any wrong code fails the caller's CHECK
  } catch (const Error& e) {
    return e.code();
  }
}

}  // namespace

TEST_CASE("spectrum parsing reads a title line then one value per line") {
  const Spectrum s = parse("Alunite GDS84\n0.25\n0.50\n\n0.75\n");
  CHECK(s.name == "Alunite GDS84");
  REQUIRE(s.bands() == 3);
  CHECK(s.values[0] == 0.25);
  CHECK(s.values[1] == 0.50);
  CHECK(s.values[2] == 0.75);

  CHECK(parse("  padded name \n1.0\n").name == "padded name");
  CHECK(parse("\n1.0\n").name == "spectrum");
}

TEST_CASE("missing channels are linearly interpolated, edges copy the neighbor") {
  const Spectrum mid = parse("s\n1.0\n-1.23e34\n3.0\n");
  CHECK(mid.values[1] == doctest::Approx(2.0));

  const Spectrum run = parse("s\n0.0\n-1e32\n-1e32\n6.0\n");
  CHECK(run.values[1] == doctest::Approx(2.0));
  CHECK(run.values[2] == doctest::Approx(4.0));

  const Spectrum lead = parse("s\n-9.9e35\n5.0\n7.0\n");
  CHECK(lead.values[0] == 5.0);

  const Spectrum tail = parse("s\n5.0\n7.0\n-9.9e35\n");
  CHECK(tail.values[2] == 7.0);
}

TEST_CASE("spectrum parsing reports empty, unparseable, and all-missing inputs") {
  CHECK(parse_error("") == errc::empty_file);
  CHECK(parse_error("name only\n") == errc::empty_file);
  CHECK(parse_error("s\n1.0\nnot-a-number\n") == errc::unparseable_line);
  CHECK(parse_error("s\n-1e32\n-1e33\n") == errc::all_missing);

  // The reported line number counts from the title line.
  try {
    static_cast<void>(parse("s\n1.0\n2.0\nbogus\n"));
    FAIL("expected unparseable_line");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("spectra load from files and directories in filename order") {
  const auto dir = std::filesystem::temp_directory_path() / "hsu_test_spectra";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "b_second.txt") << "second\n2.0\n2.5\n";
  std::ofstream(dir / "a_first.txt") << "first\n1.0\n1.5\n";

  const auto spectra = load_usgs_directory(dir.string());
  REQUIRE(spectra.size() == 2);
  CHECK(spectra[0].name == "first");
  CHECK(spectra[1].name == "second");

  std::filesystem::remove_all(dir);
}

TEST_CASE("dictionary CSV round trips value-exactly") {
  const Dictionary original = synth_dictionary("gaussian", 9, 13, 42);
  TempFile tmp("hsu_test_dict.csv");
  save_dictionary_csv(original, tmp.path);
  const Dictionary loaded = load_dictionary_csv(tmp.path);

  CHECK(loaded.names() == original.names());
  REQUIRE(loaded.bands() == original.bands());
  CHECK(loaded.data() == original.data());
}

TEST_CASE("dictionary CSV rejects malformed files and unstorable names") {
  TempFile tmp("hsu_test_bad.csv");

  std::ofstream(tmp.path) << "";
  CHECK_THROWS_AS(static_cast<void>(load_dictionary_csv(tmp.path)), Error);

  std::ofstream(tmp.path) << "name,v1,v2\natom,1.0\n";  // short row
  try {
    static_cast<void>(load_dictionary_csv(tmp.path));
    FAIL("expected unparseable_line");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unparseable_line);
  }

  std::ofstream(tmp.path) << "name,v1\n";  // header only
  try {
    static_cast<void>(load_dictionary_csv(tmp.path));
    FAIL("expected empty_file");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_file);
  }

  const Dictionary bad_name(2, {"has,comma"}, {1.0, 0.0});
  CHECK_THROWS_AS(save_dictionary_csv(bad_name, tmp.path), Error);
}

TEST_CASE("cube files round trip bit for bit") {
  const Dictionary d = synth_dictionary("gaussian", 6, 11, 7);
  const auto scene = synth_scene(d, 3, 4, 2, NoiseSpec::awgn(22.0), 70);

  TempFile tmp("hsu_test_cube.hcub");
  save_cube(scene.cube, tmp.path);
  const HyperCube loaded = load_cube(tmp.path);

  CHECK(loaded.bands() == scene.cube.bands());
  CHECK(loaded.rows() == scene.cube.rows());
  CHECK(loaded.cols() == scene.cube.cols());
  CHECK(loaded.raw() == scene.cube.raw());
}

TEST_CASE("cube loading rejects wrong magic and truncation") {
  TempFile tmp("hsu_test_cube_bad.bin");

  std::ofstream(tmp.path, std::ios::binary) << "XXXXjunk";
  try {
    static_cast<void>(load_cube(tmp.path));
    FAIL("expected bad_magic");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_magic);
  }

  const Dictionary d = synth_dictionary("gaussian", 4, 6, 1);
  const auto scene = synth_scene(d, 2, 2, 2, NoiseSpec::none(), 10);
  save_cube(scene.cube, tmp.path);
  const auto full_size = std::filesystem::file_size(tmp.path);
  std::filesystem::resize_file(tmp.path, full_size - 5);
  try {
    static_cast<void>(load_cube(tmp.path));
    FAIL("expected truncated_file");
  } catch (const Error& e) {
    CHECK(e.code() == errc::truncated_file);
  }
}

TEST_CASE("synthetic dictionaries are unit-norm, named, and seed-deterministic") {
  const Dictionary a = synth_dictionary("gaussian", 15, 30, 99);
  const Dictionary b = synth_dictionary("gaussian", 15, 30, 99);
  const Dictionary c = synth_dictionary("gaussian", 15, 30, 100);

  CHECK(a.is_normalized());
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
  CHECK(a.name(0) == "atom0000");
  CHECK(a.name(14) == "atom0014");

  const Dictionary smooth = synth_dictionary("smooth", 8, 50, 5);
  CHECK(smooth.is_normalized());
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    for (double v : smooth.atom(i)) CHECK(v > 0.0);
  }

  CHECK_THROWS_AS(static_cast<void>(synth_dictionary("plaid", 4, 8, 0)), Error);
  CHECK_THROWS_AS(static_cast<void>(synth_dictionary("gaussian", 0, 8, 0)), Error);
}

TEST_CASE("dictionary URIs parse synth specs and fall back to CSV paths") {
  const Dictionary via_uri = load_dictionary_uri("synth:gaussian:12:18", 33);
  const Dictionary direct = synth_dictionary("gaussian", 12, 18, 33);
  CHECK(via_uri.data() == direct.data());

  for (const std::string bad : {"synth:gaussian:12", "synth:gaussian:x:18",
                                "synth:gaussian:0:18", "synth:gaussian:12:18:5"}) {
    try {
      static_cast<void>(load_dictionary_uri(bad, 1));
      FAIL("expected bad_config for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == errc::bad_config);
    }
  }

  // CSV fallback renormalizes whatever is on disk.
  std::vector<double> data = direct.data();
  for (double& v : data) v *= 3.0;
  const Dictionary scaled(direct.bands(), direct.names(), std::move(data));
  TempFile tmp("hsu_test_uri.csv");
  save_dictionary_csv(scaled, tmp.path);
  const Dictionary reloaded = load_dictionary_uri(tmp.path, 0);
  CHECK(reloaded.is_normalized());
  CHECK(oracle::linf_diff(reloaded.data(), direct.data()) < 1e-14);
}

TEST_CASE("white noise lands at the requested signal-to-noise ratio") {
  const std::size_t p = 4096;
  std::vector<double> clean(p);
  Rng init(3);
  for (double& v : clean) v = 1.0 + 0.2 * init.normal();

  for (double snr_db : {0.0, 10.0, 25.0}) {
    std::vector<double> noisy = clean;
    Rng rng(17);
    apply_awgn(noisy, snr_db, rng);
    double noise_power = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = noisy[i] - clean[i];
      noise_power += d * d;
    }
    const double measured_db =
        10.0 * std::log10(kernels::nrm2sq(clean.data(), p) / noise_power);
    CHECK(std::abs(measured_db - snr_db) < 0.5);
  }

  // 300 dB is effectively a no-op at double precision.
  std::vector<double> barely = clean;
  Rng rng(18);
  apply_awgn(barely, 300.0, rng);
  CHECK(oracle::linf_diff(barely, clean) < 1e-12);

  std::vector<double> zeros(16, 0.0);
  try {
    apply_awgn(zeros, 10.0, rng);
    FAIL("expected zero_signal");
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_signal);
  }
}

TEST_CASE("sign flips at probability 0 and 1 bracket the clean mixture") {
  const Dictionary d = synth_dictionary("gaussian", 10, 16, 21);
  const std::vector<std::size_t> support = {1, 4, 7};
  const std::vector<double> betas = {0.5, 0.9, 0.3};

  std::vector<double> clean(d.bands(), 0.0);
  for (std::size_t t = 0; t < support.size(); ++t)
    kernels::axpy(betas[t], d.col(support[t]), clean.data(), d.bands());

  // Whole-atom draws reuse the same accumulation kernel, so probability 0 is
  // bitwise clean and probability 1 is its bitwise negation.
  Rng rng(5);
  CHECK(apply_sign_flip(d, support, betas, 0.0, FlipMode::Atom, rng) == clean);
  Rng rng2(5);
  const auto all = apply_sign_flip(d, support, betas, 1.0, FlipMode::Atom, rng2);
  for (std::size_t b = 0; b < d.bands(); ++b) CHECK(all[b] == -clean[b]);

  // Per-band draws accumulate scalar products; match to rounding error.
  Rng rng3(5);
  const auto band_none = apply_sign_flip(d, support, betas, 0.0, FlipMode::Band, rng3);
  CHECK(oracle::linf_diff(band_none, clean) < 1e-14);
  Rng rng4(5);
  const auto band_all = apply_sign_flip(d, support, betas, 1.0, FlipMode::Band, rng4);
  std::vector<double> neg_clean = clean;
  for (double& v : neg_clean) v = -v;
  CHECK(oracle::linf_diff(band_all, neg_clean) < 1e-14);
}

TEST_CASE("atom mode flips whole atoms, band mode flips channels independently") {
  const Dictionary d = synth_dictionary("gaussian", 4, 48, 8);
  const std::vector<std::size_t> support = {2};
  const std::vector<double> betas = {1.0};

  // Whole-atom draws give exactly +-atom.
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = apply_sign_flip(d, support, betas, 0.5, FlipMode::Atom, rng);
    const double plus = oracle::linf_diff(y, std::vector<double>(d.atom(2).begin(),
                                                                 d.atom(2).end()));
    std::vector<double> neg(d.atom(2).begin(), d.atom(2).end());
    for (double& v : neg) v = -v;
    const double minus = oracle::linf_diff(y, neg);
    CHECK(std::min(plus, minus) == 0.0);
  }

  // Per-band draws mix signs almost surely over 48 bands.
  Rng rng2(102);
  bool saw_mixed = false;
  for (int trial = 0; trial < 20 && !saw_mixed; ++trial) {
    const auto y = apply_sign_flip(d, support, betas, 0.5, FlipMode::Band, rng2);
    bool any_same = false, any_flip = false;
    for (std::size_t b = 0; b < d.bands(); ++b) {
      if (y[b] == d.col(2)[b]) any_same = true;
      if (y[b] == -d.col(2)[b]) any_flip = true;
    }
    saw_mixed = any_same && any_flip;
  }
  CHECK(saw_mixed);

  CHECK_THROWS_AS(static_cast<void>(apply_sign_flip(d, support, std::vector<double>{1.0, 2.0},
                                                    0.5, FlipMode::Atom, rng2)),
                  Error);
  CHECK_THROWS_AS(static_cast<void>(apply_sign_flip(d, support, betas, 1.5, FlipMode::Atom,
                                                    rng2)),
                  Error);
}

TEST_CASE("scenes are deterministic in the seed and independent of shape traversal") {
  const Dictionary d = synth_dictionary("gaussian", 20, 25, 3);

  const auto a = synth_scene(d, 2, 3, 5, NoiseSpec::awgn(20.0), 77);
  const auto b = synth_scene(d, 2, 3, 5, NoiseSpec::awgn(20.0), 77);
  CHECK(a.cube.raw() == b.cube.raw());
  CHECK(a.ground_truth.raw() == b.ground_truth.raw());

  // Pixel data depends only on the linear pixel index, so reshaping the same
  // pixel count leaves the buffers untouched.
  const auto wide = synth_scene(d, 1, 6, 5, NoiseSpec::awgn(20.0), 77);
  CHECK(wide.cube.raw() == a.cube.raw());
  CHECK(wide.ground_truth.raw() == a.ground_truth.raw());

  const auto other_seed = synth_scene(d, 2, 3, 5, NoiseSpec::awgn(20.0), 78);
  CHECK(other_seed.cube.raw() != a.cube.raw());
}

TEST_CASE("scene ground truth has the declared support and unit-interval weights") {
  const Dictionary d = synth_dictionary("gaussian", 30, 22, 9);
  const auto scene = synth_scene(d, 3, 3, 7, NoiseSpec::none(), 90);

  CHECK(scene.ground_truth.sparsity_k() == 7);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double* truth = scene.ground_truth.slice(r, c);
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (truth[i] != 0.0) {
          ++nonzero;
          CHECK(truth[i] > 0.0);
          CHECK(truth[i] <= 1.0);
        }
      }
      CHECK(nonzero == 7);
    }
  }

  // Noiseless pixels equal the dictionary mixture of the stored truth.
  const HyperCube recon = reconstruct(scene.ground_truth, d);
  CHECK(oracle::linf_diff(recon.raw(), scene.cube.raw()) < 1e-12);
}

TEST_CASE("a zero flip probability reproduces the clean scene bit for bit") {
  const Dictionary d = synth_dictionary("gaussian", 16, 20, 6);
  const auto clean = synth_scene(d, 2, 2, 4, NoiseSpec::none(), 60);
  const auto flip0 = synth_scene(d, 2, 2, 4, NoiseSpec::sign_flip(0.0), 60);
  CHECK(flip0.cube.raw() == clean.cube.raw());
  CHECK(flip0.ground_truth.raw() == clean.ground_truth.raw());

  // Full flipping negates every pixel bitwise.
  const auto flip1 = synth_scene(d, 2, 2, 4, NoiseSpec::sign_flip(1.0), 60);
  for (std::size_t i = 0; i < clean.cube.raw().size(); ++i)
    CHECK(flip1.cube.raw()[i] == -clean.cube.raw()[i]);
}

TEST_CASE("oversized supports and single-atom scenes behave") {
  const Dictionary d = synth_dictionary("gaussian", 5, 12, 2);
  try {
    static_cast<void>(synth_scene(d, 1, 1, 6, NoiseSpec::none(), 1));
    FAIL("expected support_too_large");
  } catch (const Error& e) {
    CHECK(e.code() == errc::support_too_large);
  }

  const auto one = synth_scene(d, 1, 1, 1, NoiseSpec::none(), 2);
  std::size_t hot = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (one.ground_truth.at(i, 0, 0) != 0.0) hot = i;
  }
  REQUIRE(hot < d.size());
  const double beta = one.ground_truth.at(hot, 0, 0);
  for (std::size_t b = 0; b < d.bands(); ++b)
    CHECK(one.cube.at(b, 0, 0) == doctest::Approx(beta * d.col(hot)[b]).epsilon(1e-15));
}
