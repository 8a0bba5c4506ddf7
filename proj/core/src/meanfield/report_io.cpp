#include "drgcn/meanfield/report_io.hpp"

#include <cstdio>

#include "json.hpp"

namespace drgcn::mf {

using nlohmann::ordered_json;

std::string to_json(const Bsb1Point& p) {
  return ordered_json{{"q", p.q}, {"c", p.c}, {"residual", p.residual}, {"iterations", p.iterations},
                      {"residual_trace", p.residual_trace}}
      .dump();
}

std::string to_json(const SpectralReport& r) {
  ordered_json j{{"d", r.d},
                 {"sigma_b2", r.sigma_b2},
                 {"q", r.q},
                 {"c", r.c},
                 {"lambda_g", r.lambda_g},
                 {"lambda_l", r.lambda_l},
                 {"lambda_m", r.lambda_m},
                 {"residuals", {{"v0", r.residual_v0}, {"g", r.residual_g}, {"l", r.residual_l}, {"m", r.residual_m}}},
                 {"dims", {{"v0", r.dim_v0}, {"g", r.dim_g}, {"l", r.dim_l}, {"m", r.dim_m}}},
                 {"v_m_empty", r.dim_m == 0},
                 {"checks",
                  {{"v0_annihilated", r.v0_ok},
                   {"g_expanding", r.g_expanding},
                   {"l_contracting", r.l_contracting},
                   {"m_contracting", r.m_contracting},
                   {"invariance", r.invariance_ok}}},
                 {"verified", r.verified()},
                 {"failures", r.failures}};
  return j.dump();
}

std::string to_json(const Theorem1Result& r) {
  return ordered_json{{"s", r.s},
                      {"ratio", r.ratio},
                      {"initial_norm", r.initial_norm},
                      {"final_norm", r.final_norm},
                      {"iterations", r.iterations},
                      {"stalled", r.stalled}}
      .dump();
}

std::string to_json(const GrowthTrace& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"step", r.step}, {"g_component", r.g_component}, {"total_deviation", r.total_deviation}});
  return ordered_json{{"rows", rows}, {"per_step", t.per_step}, {"growth", t.growth}, {"truncated", t.truncated}}
      .dump();
}

std::string to_json(const DosEigenReport& r) {
  return ordered_json{{"m_residual", r.m_residual}, {"l_residual", r.l_residual}, {"m_count", r.m_count},
                      {"l_count", r.l_count},       {"rank", r.rank},             {"ok", r.ok}}
      .dump();
}

std::string growth_csv(const GrowthTrace& t) {
  std::string out = "step,g_component,total_deviation\n";
  char buf[96];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r.step, r.g_component, r.total_deviation);
    out += buf;
  }
  return out;
}

}  // namespace drgcn::mf
