#include "drgcn/meanfield/config.hpp"

#include <cmath>

#include "drgcn/error.hpp"

namespace drgcn::mf {

void MeanFieldConfig::validate() const {
  if (d < 2) throw Error(ErrorCode::invalid_input, "mean-field width must be >= 2");
  if (!(sigma_b2 >= 0.0) || !std::isfinite(sigma_b2))
    throw Error(ErrorCode::invalid_input, "sigma_b2 must be finite and >= 0");
  if (s.size() != d) throw Error(ErrorCode::shape_mismatch, "scaling vector length != d");
  for (double x : s)
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::invalid_input, "scaling entries must be > 0");
}

bool MeanFieldConfig::identity_scaling() const {
  for (double x : s)
    if (x != 1.0) return false;
  return true;
}

MeanFieldConfig MeanFieldConfig::make(std::size_t d, double sigma_b2, bool normalized) {
  MeanFieldConfig c;
  c.d = d;
  c.sigma_b2 = sigma_b2;
  c.s.assign(d, 1.0);
  c.normalized = normalized;
  return c;
}

}  // namespace drgcn::mf
