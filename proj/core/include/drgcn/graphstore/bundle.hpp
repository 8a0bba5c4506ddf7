#pragma once

#include <filesystem>

#include "drgcn/graphstore/graph.hpp"

namespace drgcn::graph {

inline constexpr int kBundleFormatVersion = 1;

/// Reads a bundle directory:
///   meta.json     {"n","d","classes","edges","format_version"}
///   features.f32  n*d little-endian float32, row-major
///   labels.u16    n uint16
///   edges.u32     2*edges uint32, pairs (i, j) with i < j, sorted
///   train.idx, val.idx, test.idx   sorted uint32 node ids
Graph load_bundle(const std::filesystem::path& dir);

/// Writes `g` in the same format. Features are narrowed to float32, so a
/// round trip is exact only for float-representable features.
void save_bundle(const Graph& g, const std::filesystem::path& dir);

}  // namespace drgcn::graph
