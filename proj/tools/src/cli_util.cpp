#include "cli_util.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>

#include "drgcn/error.hpp"

#ifndef DRGCN_VERSION
#define DRGCN_VERSION "unknown"
#endif

namespace drgcn::cli {

CLI::Option* ConfigurableOptions::add_flag(CLI::App* app, const std::string& key, bool& var,
                                           const std::string& help) {
  CLI::Option* opt = app->add_flag("--" + key, var, help);
  entries_[key] = {opt, [&var](const nlohmann::json& j) { var = j.get<bool>(); }, [&var] { return ordered_json(var); }};
  return opt;
}

void ConfigurableOptions::apply_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::missing_file, "config file not found: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_format, "config " + file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::bad_format, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(ErrorCode::bad_format, "unknown config key '" + key + "'");
    if (it->second.opt->count() > 0) continue;
    try {
      it->second.set(value);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::bad_format, "config key '" + key + "': " + e.what());
    }
  }
}

ordered_json ConfigurableOptions::resolved() const {
  ordered_json out = ordered_json::object();
  for (const auto& [key, e] : entries_) out[key] = e.get();
  return out;
}

ordered_json RunManifest::to_json() const {
  return ordered_json{{"command", command},
                      {"version", artifact_version()},
                      {"config", config},
                      {"seeds", seeds},
                      {"input_checksums", input_checksums},
                      {"outputs", outputs}};
}

std::string artifact_version() { return DRGCN_VERSION; }

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 15];
  }
  return hex;
}

ordered_json bundle_checksums(const std::filesystem::path& bundle_dir) {
  ordered_json out = ordered_json::object();
  for (const char* name :
       {"meta.json", "features.f32", "labels.u16", "edges.u32", "train.idx", "val.idx", "test.idx"}) {
    const auto p = bundle_dir / name;
    if (std::filesystem::exists(p)) out[name] = sha256_file(p);
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::missing_file, "cannot write " + file.string());
  out << text;
}

std::string wrap_report(const RunManifest& m, const std::string& key, const ordered_json& body,
                        const ordered_json& timing) {
  ordered_json j;
  j["manifest"] = m.to_json();
  j[key] = body;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

}  // namespace drgcn::cli
