#include <iostream>

#include "cli_util.hpp"
#include "drgcn/error.hpp"

int main(int argc, char** argv) {
  using namespace drgcn::cli;
  CLI::App app{"Graph convolution training with dimensional reweighting, plus the mean-field analyzer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", artifact_version());
  int exit_code = kExitOk;
  register_train(app, exit_code);
  register_meanfield(app, exit_code);
  register_measure_k(app, exit_code);
  register_convert_check(app, exit_code);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const drgcn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == drgcn::ErrorCode::divergence ? kExitDivergence : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return exit_code;
}
