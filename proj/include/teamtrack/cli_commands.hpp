#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace teamtrack {

// Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 acceptance
// assertion failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAcceptance = 3;

int cmd_synth(const std::string& preset, const std::filesystem::path& spec_file,
              const std::filesystem::path& out_dir, bool quiet);
int cmd_track(const std::filesystem::path& config_path, bool quiet);
int cmd_eval(const std::filesystem::path& log_path, const std::filesystem::path& events_path,
             const std::filesystem::path& gt_path, const std::filesystem::path& report_path,
             bool quiet);
int cmd_repro(const std::string& scenario, const std::filesystem::path& out_dir, bool quiet);

int run_cli(int argc, const char* const* argv);

}  // namespace teamtrack
