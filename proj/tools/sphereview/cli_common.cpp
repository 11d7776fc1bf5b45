#include "cli_common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace sphereview::cli {

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPHEREVIEW_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

std::vector<std::optional<std::string>> run_parallel(
    size_t n, int jobs, const std::function<std::optional<std::string>(size_t)>& fn) {
    std::vector<std::optional<std::string>> errors(n);
    if (n == 0) return errors;
    const size_t workers = std::min<size_t>(std::max(jobs, 1), n);
    auto body = [&](size_t i) {
        try {
            errors[i] = fn(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        } catch (...) {
            errors[i] = "unknown error";
        }
    };
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return errors;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
    return errors;
}

std::vector<std::string> collect_inputs(const std::vector<std::string>& paths,
                                        const std::string& extension) {
    std::vector<std::string> out;
    for (const auto& p : paths) {
        fs::path path(p);
        if (fs::is_directory(path)) {
            std::vector<std::string> batch;
            for (const auto& entry : fs::directory_iterator(path)) {
                if (!entry.is_regular_file()) continue;
                if (entry.path().extension() == extension) batch.push_back(entry.path().string());
            }
            std::sort(batch.begin(), batch.end());
            out.insert(out.end(), batch.begin(), batch.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

fs::path output_path(const fs::path& outdir, const fs::path& input) {
    fs::create_directories(outdir);
    fs::path out = outdir / input.filename();
    std::error_code ec;
    if (fs::exists(out, ec) && fs::equivalent(out, input, ec))
        throw std::runtime_error("output would overwrite input: " + input.string());
    return out;
}

int finish_batch(const std::vector<std::string>& items,
                 const std::vector<std::optional<std::string>>& errors, bool keep_going) {
    size_t failed = 0;
    for (size_t i = 0; i < items.size(); ++i) {
        if (errors[i]) {
            ++failed;
            std::fprintf(stderr, "sphereview: %s: %s\n", items[i].c_str(), errors[i]->c_str());
        }
    }
    if (failed == 0) return 0;
    if (keep_going && failed < items.size()) return 0;
    return 1;
}

ParsedSize parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= text.size())
        throw std::runtime_error("size must look like 512x256, got '" + text + "'");
    ParsedSize s;
    try {
        size_t used = 0;
        s.w = std::stoi(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(text);
        s.h = std::stoi(text.substr(x + 1), &used);
        if (used != text.size() - x - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw std::runtime_error("size must look like 512x256, got '" + text + "'");
    }
    if (s.w <= 0 || s.h <= 0) throw std::runtime_error("size must be positive, got '" + text + "'");
    return s;
}

} // namespace sphereview::cli
