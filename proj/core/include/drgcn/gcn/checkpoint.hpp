#pragma once

#include <filesystem>

#include "drgcn/gcn/model.hpp"

namespace drgcn::gcn {

/// One JSON header line (format, spec, block names and shapes) followed by
/// the raw little-endian float64 parameter blocks in declaration order.
void save_checkpoint(const Model& m, const std::filesystem::path& file);

/// Throws checkpoint-mismatch when the blocks disagree with the header spec.
Model load_checkpoint(const std::filesystem::path& file);

}  // namespace drgcn::gcn
