#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tiltpump/experiments.hpp"

namespace tiltpump::detail {

/// %.{precision}g with "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v, int precision);

/// CSV file with a header row; numbers written at a fixed significant-digit
/// precision so identical runs produce identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& dir, std::string name, std::vector<std::string> columns,
              std::string description, int precision);

    void row(const std::vector<double>& values);
    const std::string& path() const noexcept { return entry_.path; }
    /// Closes the file and returns its manifest entry.
    OutputFile finish();

private:
    std::ofstream out_;
    OutputFile entry_;
    int precision_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// summary.json; wall_clock_seconds and created_utc are the only fields that
/// vary between identical runs.
void write_summary(const std::filesystem::path& path, const RunResult& result,
                   const RunOptions& options);

} // namespace tiltpump::detail
