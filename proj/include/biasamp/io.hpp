#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace biasamp::io {

std::string sha256_hex(std::string_view bytes);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct OutputFile {
    std::string path;  ///< relative to the output directory
    std::string sha256;
    std::size_t bytes;
};

/// Collects emitted files so the manifest can list each with its digest.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }

    void write(const std::string& relative, std::string_view contents);

    const std::vector<OutputFile>& files() const noexcept { return files_; }

private:
    std::filesystem::path root_;
    std::vector<OutputFile> files_;
};

/// UTC timestamp, e.g. 2026-10-14T12:00:00.123Z.
std::string utc_timestamp_now();

}  // namespace biasamp::io
