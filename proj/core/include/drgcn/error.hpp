#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drgcn {

enum class ErrorCode {
  invalid_input,
  invalid_covariance,
  shape_mismatch,
  missing_file,
  size_mismatch,
  index_out_of_range,
  overlapping_splits,
  duplicate_edge,
  self_loop,
  unsorted,
  bad_format,
  empty_mask,
  degenerate_covariance,
  degenerate_operator,
  step_underflow,
  divergence,
  non_convergence,
  checkpoint_mismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace drgcn
