// Error taxonomy shared by all hsu modules.
#pragma once

#include <stdexcept>
#include <string>

namespace hsu {

enum class errc {
  // construction / argument problems
  dimension_mismatch,
  zero_atom,
  not_normalized,
  empty_result,
  combinatorial_limit,
  k_out_of_range,
  non_positive_gamma,
  support_too_large,
  c_too_large,
  zero_residual,
  zero_signal,
  bad_config,
  // numeric failures
  max_iterations,
  convergence_failure,
  // file / data problems
  io_error,
  bad_magic,
  truncated_file,
  version_unsupported,
  empty_file,
  unparseable_line,
  all_missing,
  non_finite_data,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::dimension_mismatch: return "dimension mismatch";
    case errc::zero_atom: return "zero atom";
    case errc::not_normalized: return "dictionary not normalized";
    case errc::empty_result: return "empty result";
    case errc::combinatorial_limit: return "combinatorial limit";
    case errc::k_out_of_range: return "k out of range";
    case errc::non_positive_gamma: return "non-positive gamma";
    case errc::support_too_large: return "support too large";
    case errc::c_too_large: return "c too large";
    case errc::zero_residual: return "zero residual";
    case errc::zero_signal: return "zero signal";
    case errc::bad_config: return "bad config";
    case errc::max_iterations: return "max iterations";
    case errc::convergence_failure: return "convergence failure";
    case errc::io_error: return "io error";
    case errc::bad_magic: return "bad magic";
    case errc::truncated_file: return "truncated file";
    case errc::version_unsupported: return "unsupported version";
    case errc::empty_file: return "empty file";
    case errc::unparseable_line: return "unparseable line";
    case errc::all_missing: return "all values missing";
    case errc::non_finite_data: return "non-finite data";
  }
  return "error";
}

}  // namespace hsu
