#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace drgcn::cli {

using nlohmann::ordered_json;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitVerification = 4;

/// Options that may also come from the --config JSON file. A key in the file
/// only fills an option that was not given on the command line.
class ConfigurableOptions {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + key, var, help)->capture_default_str();
    entries_[key] = {opt, [&var](const nlohmann::json& j) { var = j.get<T>(); },
                     [&var] { return ordered_json(var); }};
    return opt;
  }
  CLI::Option* add_flag(CLI::App* app, const std::string& key, bool& var, const std::string& help);

  /// Reads the file and fills unset options. Throws drgcn::Error on bad
  /// JSON or unknown keys.
  void apply_file(const std::filesystem::path& file);
  ordered_json resolved() const;

 private:
  struct Entry {
    CLI::Option* opt;
    std::function<void(const nlohmann::json&)> set;
    std::function<ordered_json()> get;
  };
  std::map<std::string, Entry> entries_;
};

struct RunManifest {
  std::string command;
  ordered_json config;
  std::vector<std::uint64_t> seeds;
  ordered_json input_checksums = ordered_json::object();
  std::vector<std::string> outputs;

  ordered_json to_json() const;
};

std::string artifact_version();
std::string sha256_file(const std::filesystem::path& file);
ordered_json bundle_checksums(const std::filesystem::path& bundle_dir);
std::string utc_now();

void write_text(const std::filesystem::path& file, const std::string& text);
/// {"manifest": ..., <key>: body, "timing": timing}
std::string wrap_report(const RunManifest& m, const std::string& key, const ordered_json& body,
                        const ordered_json& timing);

void register_train(CLI::App& app, int& exit_code);
void register_meanfield(CLI::App& app, int& exit_code);
void register_measure_k(CLI::App& app, int& exit_code);
void register_convert_check(CLI::App& app, int& exit_code);

}  // namespace drgcn::cli
