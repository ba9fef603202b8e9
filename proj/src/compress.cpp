#include "hsu/compress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "binary_io.hpp"
#include "hsu/kernels.hpp"
#include "hsu/parallel.hpp"
#include "hsu/solvers.hpp"

namespace hsu {
namespace {

constexpr char kMagic[4] = {'H', 'S', 'C', 'Z'};
constexpr std::uint16_t kVersion = 1;

std::string basis_row_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cvec%03zu", j);
  return buf;
}

std::vector<std::string> stacked_names(const Dictionary& dict, std::size_t c) {
  std::vector<std::string> names = dict.names();
  names.reserve(names.size() + c);
  for (std::size_t j = 0; j < c; ++j) names.push_back(basis_row_name(j));
  return names;
}

}  // namespace

CompressionBasis::CompressionBasis(std::size_t bands, std::vector<double> vectors,
                                   std::vector<double> singular_values)
    : bands_(bands), vectors_(std::move(vectors)), singular_values_(std::move(singular_values)) {
  require(vectors_.size() == bands_ * singular_values_.size(), errc::dimension_mismatch,
          "basis storage does not match bands x count");
  for (std::size_t j = 0; j + 1 < singular_values_.size(); ++j) {
    require(singular_values_[j] >= singular_values_[j + 1], errc::dimension_mismatch,
            "singular values must be nonincreasing");
  }
}

CompressionBasis CompressionBasis::truncated(std::size_t c) const {
  require(c <= count(), errc::c_too_large, "cannot truncate basis beyond its size");
  return CompressionBasis(
      bands_, std::vector<double>(vectors_.begin(), vectors_.begin() + c * bands_),
      std::vector<double>(singular_values_.begin(), singular_values_.begin() + c));
}

HyperCube residual_cube(const HyperCube& cube, const Dictionary& dict,
                        const AbundanceMap& abundances) {
  require(cube.bands() == dict.bands(), errc::dimension_mismatch,
          "cube band count does not match dictionary");
  require(cube.rows() == abundances.rows() && cube.cols() == abundances.cols(),
          errc::dimension_mismatch, "cube and abundance map shapes differ");
  require(abundances.coeff_rows() >= dict.size(), errc::dimension_mismatch,
          "abundance map has fewer coefficient rows than dictionary atoms");

  HyperCube out(cube.bands(), cube.rows(), cube.cols());
  out.raw() = cube.raw();
  for (std::size_t r = 0; r < cube.rows(); ++r) {
    for (std::size_t c = 0; c < cube.cols(); ++c) {
      const double* coeff = abundances.slice(r, c);
      double* res = out.pixel(r, c);
      for (std::size_t i = 0; i < dict.size(); ++i) {
        if (coeff[i] != 0.0) kernels::axpy(-coeff[i], dict.col(i), res, dict.bands());
      }
    }
  }
  return out;
}

CompressionBasis compression_basis(const HyperCube& residuals, std::size_t c) {
  const std::size_t limit = std::min(residuals.bands(), residuals.pixels());
  require(c >= 1, errc::c_too_large, "compression_basis needs c >= 1");
  require(c <= limit, errc::c_too_large,
          "c exceeds min(bands, pixels) = " + std::to_string(limit));

  const SvdResult svd = thin_svd(residuals.pooled(), c);
  require(svd.singular_values[0] > 0.0, errc::zero_residual,
          "residual cube is zero; nothing to compress");

  // Vectors past the numerical rank of the residual pool carry no signal.
  std::size_t keep = c;
  while (keep > 1 && svd.singular_values[keep - 1] <= 1e-12 * svd.singular_values[0]) --keep;

  return CompressionBasis(
      residuals.bands(), std::vector<double>(svd.u.begin(), svd.u.begin() + keep * svd.rows),
      std::vector<double>(svd.singular_values.begin(), svd.singular_values.begin() + keep));
}

CompressedScene attach_basis(const HyperCube& cube, const Dictionary& dict,
                             const UnmixResult& stage_one, const CompressionBasis& basis,
                             const CompressOptions& options) {
  const std::size_t n = dict.size();
  const std::size_t c = basis.count();
  require(stage_one.abundances.coeff_rows() == n, errc::dimension_mismatch,
          "stage-one map must have exactly one row per atom");
  require(basis.bands() == dict.bands() || c == 0, errc::dimension_mismatch,
          "basis band count does not match dictionary");
  require(cube.rows() == stage_one.abundances.rows() && cube.cols() == stage_one.abundances.cols(),
          errc::dimension_mismatch, "cube and abundance map shapes differ");

  CompressedScene scene{
      AbundanceMap(n + c, cube.rows(), cube.cols(), stacked_names(dict, c),
                   stage_one.abundances.sparsity_k()),
      basis, dict.names(), stage_one.failures};

  // The constrained fit reruns the pruned-NNLS pipeline over the basis
  // columns; nonnegativity then discards the variance carried by negative
  // projections, so the signed default reconstructs at least as well.
  std::vector<std::string> basis_names;
  for (std::size_t j = 0; j < c; ++j) basis_names.push_back(basis_row_name(j));
  const Dictionary basis_dict = options.nonneg_basis && c > 0
                                    ? Dictionary(basis.bands(), basis_names, basis.vectors())
                                    : Dictionary(1, {"unused"}, {1.0});

  const std::size_t p = dict.bands();
  std::mutex failures_mutex;
  parallel_for(cube.pixels(), options.threads, [&](std::size_t pix) {
    const std::size_t r = pix / cube.cols();
    const std::size_t col = pix % cube.cols();
    const double* coeff = stage_one.abundances.slice(r, col);
    double* out = scene.abundances.slice(r, col);
    std::copy_n(coeff, n, out);
    if (c == 0) return;

    std::vector<double> res(cube.pixel(r, col), cube.pixel(r, col) + p);
    for (std::size_t i = 0; i < n; ++i) {
      if (coeff[i] != 0.0) kernels::axpy(-coeff[i], dict.col(i), res.data(), p);
    }
    if (options.nonneg_basis) {
      try {
        const std::vector<double> fitted = pnnls_pixel(res, basis_dict, c, PruneMethod::rbf());
        std::copy(fitted.begin(), fitted.end(), out + n);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        scene.failures.push_back({r, col, e.code(), e.what()});
      }
      return;
    }
    // Orthonormal columns make the least-squares fit a plain projection.
    for (std::size_t j = 0; j < c; ++j) {
      out[n + j] = kernels::dot(basis.col(j), res.data(), p);
    }
  });

  std::sort(scene.failures.begin(), scene.failures.end(),
            [](const PixelFailure& a, const PixelFailure& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  return scene;
}

CompressedScene compress_scene(const HyperCube& cube, const Dictionary& dict, std::size_t k,
                               std::size_t c, PruneMethod method,
                               const CompressOptions& options) {
  UnmixResult stage_one = pnnls_cube(cube, dict, k, method, options.threads);
  if (c == 0) {
    return {std::move(stage_one.abundances), CompressionBasis(cube.bands(), {}, {}),
            dict.names(), std::move(stage_one.failures)};
  }

  const HyperCube residuals = residual_cube(cube, dict, stage_one.abundances);
  const CompressionBasis basis = compression_basis(residuals, c);
  return attach_basis(cube, dict, stage_one, basis, options);
}

HyperCube reconstruct_compressed(const CompressedScene& scene, const Dictionary& dict) {
  const std::size_t n = dict.size();
  const std::size_t c = scene.basis.count();
  require(scene.abundances.coeff_rows() == n + c, errc::dimension_mismatch,
          "abundance rows do not match dictionary plus basis");
  require(c == 0 || scene.basis.bands() == dict.bands(), errc::dimension_mismatch,
          "basis band count does not match dictionary");

  HyperCube cube(dict.bands(), scene.abundances.rows(), scene.abundances.cols());
  for (std::size_t r = 0; r < cube.rows(); ++r) {
    for (std::size_t col = 0; col < cube.cols(); ++col) {
      const double* coeff = scene.abundances.slice(r, col);
      double* y = cube.pixel(r, col);
      for (std::size_t i = 0; i < n; ++i) {
        if (coeff[i] != 0.0) kernels::axpy(coeff[i], dict.col(i), y, dict.bands());
      }
      for (std::size_t j = 0; j < c; ++j) {
        if (coeff[n + j] != 0.0) kernels::axpy(coeff[n + j], scene.basis.col(j), y, dict.bands());
      }
    }
  }
  return cube;
}

CompressionError compression_error(const HyperCube& cube, const HyperCube& reconstruction) {
  require(cube.bands() == reconstruction.bands() && cube.rows() == reconstruction.rows() &&
              cube.cols() == reconstruction.cols(),
          errc::dimension_mismatch, "cube shapes differ");

  CompressionError out;
  out.per_pixel.resize(cube.pixels());
  const std::size_t p = cube.bands();
  for (std::size_t r = 0; r < cube.rows(); ++r) {
    for (std::size_t col = 0; col < cube.cols(); ++col) {
      const double* a = cube.pixel(r, col);
      const double* b = reconstruction.pixel(r, col);
      double l1 = 0.0;
      for (std::size_t band = 0; band < p; ++band) l1 += std::fabs(a[band] - b[band]);
      out.per_pixel[r * cube.cols() + col] = l1 / static_cast<double>(p);
    }
  }
  for (double e : out.per_pixel) out.scene_mean += e;
  if (!out.per_pixel.empty()) out.scene_mean /= static_cast<double>(out.per_pixel.size());
  return out;
}

void save_compressed(const CompressedScene& scene, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for writing: " + path);
  io::Writer w(file, path);

  const std::size_t n = scene.dictionary_names.size();
  const std::size_t c = scene.basis.count();
  const std::size_t p = scene.basis.bands();
  require(scene.abundances.coeff_rows() == n + c, errc::dimension_mismatch,
          "abundance rows do not match dictionary plus basis");

  w.bytes(kMagic, 4);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(p));
  w.u32(static_cast<std::uint32_t>(scene.abundances.rows()));
  w.u32(static_cast<std::uint32_t>(scene.abundances.cols()));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(c));
  for (const std::string& name : scene.dictionary_names) w.str(name);
  for (double v : scene.basis.vectors()) w.f64(v);
  for (double s : scene.basis.singular_values()) w.f64(s);

  for (std::size_t pix = 0; pix < scene.abundances.pixels(); ++pix) {
    const double* slice = scene.abundances.raw().data() + pix * (n + c);
    for (std::size_t row = 0; row < n + c; ++row) {
      if (slice[row] != 0.0) {
        w.u32(static_cast<std::uint32_t>(pix));
        w.u32(static_cast<std::uint32_t>(row));
        w.f64(slice[row]);
      }
    }
  }
  file.flush();
  require(file.good(), errc::io_error, "write failed: " + path);
}

CompressedScene load_compressed(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for reading: " + path);
  io::Reader r(file, path);

  char magic[4];
  r.bytes(magic, 4);
  require(std::equal(magic, magic + 4, kMagic), errc::bad_magic,
          path + " is not a compressed scene file");
  const std::uint16_t version = r.u16();
  require(version == kVersion, errc::version_unsupported,
          "unsupported container version " + std::to_string(version));

  const std::size_t p = r.u32();
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  const std::size_t n = r.u32();
  const std::size_t c = r.u32();

  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(r.str());

  std::vector<double> vectors(p * c);
  for (double& v : vectors) v = r.f64();
  std::vector<double> singular(c);
  for (double& s : singular) s = r.f64();

  std::vector<std::string> all_names = names;
  for (std::size_t j = 0; j < c; ++j) all_names.push_back(basis_row_name(j));

  CompressedScene scene{AbundanceMap(n + c, rows, cols, std::move(all_names), n),
                        CompressionBasis(p, std::move(vectors), std::move(singular)),
                        std::move(names),
                        {}};

  double* data = scene.abundances.raw().data();
  while (!r.at_eof()) {
    const std::size_t pix = r.u32();
    const std::size_t row = r.u32();
    const double value = r.f64();
    require(pix < rows * cols && row < n + c, errc::truncated_file,
            path + ": coefficient index out of range at byte offset " +
                std::to_string(r.offset()));
    data[pix * (n + c) + row] = value;
  }
  return scene;
}

}  // namespace hsu
