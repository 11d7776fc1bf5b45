#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sphereview::cli {

struct CommonOptions {
    int jobs = 0; // 0: resolve from SPHEREVIEW_JOBS, else 1
    bool keep_going = false;
};

// SPHEREVIEW_JOBS environment default; always at least 1.
int resolve_jobs(int requested);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn returns an error
// message on failure, nothing on success. Messages come back indexed so
// diagnostics stay in input order.
std::vector<std::optional<std::string>> run_parallel(
    size_t n, int jobs, const std::function<std::optional<std::string>(size_t)>& fn);

// Expands files and directories into a flat list: explicit files keep their
// position, directories contribute their matching files sorted by name.
std::vector<std::string> collect_inputs(const std::vector<std::string>& paths,
                                        const std::string& extension);

// outdir/basename(input); creates outdir, refuses to overwrite the input.
std::filesystem::path output_path(const std::filesystem::path& outdir,
                                  const std::filesystem::path& input);

// Prints per-item failures to stderr and converts counts to an exit code:
// 0 when everything succeeded, or under keep_going when at least one item
// did; 1 otherwise.
int finish_batch(const std::vector<std::string>& items,
                 const std::vector<std::optional<std::string>>& errors, bool keep_going);

struct ParsedSize {
    int w = 0;
    int h = 0;
};
ParsedSize parse_size(const std::string& text);

int cmd_transform(std::vector<std::string> args);
int cmd_viewport(std::vector<std::string> args);
int cmd_stats(std::vector<std::string> args);
int cmd_eval(std::vector<std::string> args);
int cmd_savt(std::vector<std::string> args);

} // namespace sphereview::cli
