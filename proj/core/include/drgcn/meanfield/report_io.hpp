#pragma once

#include <string>

#include "drgcn/meanfield/fixed_point.hpp"
#include "drgcn/meanfield/operator.hpp"
#include "drgcn/meanfield/theorems.hpp"

namespace drgcn::mf {

// Compact JSON objects; callers embed them in larger documents.
std::string to_json(const Bsb1Point& p);
std::string to_json(const SpectralReport& r);
std::string to_json(const Theorem1Result& r);
std::string to_json(const GrowthTrace& t);
std::string to_json(const DosEigenReport& r);

/// step,g_component,total_deviation
std::string growth_csv(const GrowthTrace& t);

}  // namespace drgcn::mf
