#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mtsdvgan::cli {

/// Everything a command needs to run, and everything its manifest records.
/// `config` is the flat key-value configuration before materialization;
/// `inputs`, `outputs` and `options` hold paths and flag values by name.
struct Invocation {
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::map<std::string, std::string> options;
};

/// Runs one invocation and writes its manifest. Throws on failure.
void execute(const Invocation& inv, std::ostream& log);

/// Reads a manifest back into the invocation that produced it. With a
/// non-empty `out_dir` every output is redirected into that directory.
Invocation load_manifest(const std::filesystem::path& path, const std::filesystem::path& out_dir = {});

/// Path of the manifest written for an invocation.
std::filesystem::path manifest_path(const Invocation& inv);

/// Full command line: parses `args` (without the program name), runs, and
/// maps errors to exit codes 2 (validation) and 3 (runtime or numeric).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// MTSDVGAN_THREADS, or 1 when unset. Throws on a value that is not a positive integer.
int thread_cap();

}  // namespace mtsdvgan::cli
