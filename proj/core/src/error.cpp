#include "drgcn/error.hpp"

namespace drgcn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_covariance: return "invalid-covariance";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::missing_file: return "missing-file";
    case ErrorCode::size_mismatch: return "size-mismatch";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::overlapping_splits: return "overlapping-splits";
    case ErrorCode::duplicate_edge: return "duplicate-edge";
    case ErrorCode::self_loop: return "self-loop";
    case ErrorCode::unsorted: return "unsorted";
    case ErrorCode::bad_format: return "bad-format";
    case ErrorCode::empty_mask: return "empty-mask";
    case ErrorCode::degenerate_covariance: return "degenerate-covariance";
    case ErrorCode::degenerate_operator: return "degenerate-operator";
    case ErrorCode::step_underflow: return "step-underflow";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::checkpoint_mismatch: return "checkpoint-mismatch";
  }
  return "unknown";
}

}  // namespace drgcn
