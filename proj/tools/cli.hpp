#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zrner/error.hpp"
#include "zrner/model.hpp"

namespace zrner::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

// Bad flags, unknown config keys, malformed config values.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Everything a command needs. Flat key = value view via to_key_values /
// set_key; precedence is defaults < config file < --set < dedicated flags.
struct RunConfig {
  std::filesystem::path train_file;
  std::filesystem::path dev_file;
  std::filesystem::path test_file;
  std::filesystem::path vectors_file;
  std::filesystem::path checkpoint;
  std::filesystem::path input_file;
  std::filesystem::path gold_file;
  std::filesystem::path pred_file;
  std::filesystem::path out_dir;
  // Comma-separated entity categories; empty infers them from the data.
  std::string categories;
  bool oov_only = false;
  bool gate = false;
  bool log_timing = true;
  std::size_t seeds = 1;
  model::ModelConfig model;
  model::TrainConfig train;
};

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& config);
// Throws UsageError for unknown keys and malformed values.
void set_key(RunConfig& config, const std::string& key, const std::string& value);
// "key = value" lines; '#' starts a comment; blank lines ignored.
void load_config(RunConfig& config, std::istream& in);
void load_config_file(RunConfig& config, const std::filesystem::path& path);
// Resolved config with a "# zrner <command> seed=<seed>" header. Loadable by
// load_config.
std::string format_config(const RunConfig& config, const std::string& command);

// Tag scheme from explicit categories or from the B-/I- tags of `files`:
// PER, LOC, ORG, MISC first when present, then the rest in sorted order.
corpus::TagScheme infer_scheme(const std::string& categories,
                               std::span<const std::filesystem::path> files);

int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_predict(const RunConfig& config, std::ostream& out);
int cmd_score(const RunConfig& config, std::ostream& out);

// Parses argv, dispatches, and maps failures to exit statuses: usage 1,
// data 2, anything else 3. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zrner::cli
