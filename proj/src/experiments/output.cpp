#include "experiments/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include <json.hpp>

namespace tiltpump::detail {

std::string format_number(double v, int precision) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& dir, std::string name,
                     std::vector<std::string> columns, std::string description, int precision)
    : precision_(precision) {
    entry_.path = std::move(name);
    entry_.columns = std::move(columns);
    entry_.description = std::move(description);
    out_.open(dir / entry_.path, std::ios::binary);
    if (!out_)
        throw std::runtime_error("cannot write " + (dir / entry_.path).string());
    for (std::size_t i = 0; i < entry_.columns.size(); ++i)
        out_ << (i ? "," : "") << entry_.columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != entry_.columns.size())
        throw std::logic_error("CSV row width does not match the header of " + entry_.path);
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_number(values[i], precision_);
    out_ << "\n";
    ++entry_.rows;
}

OutputFile CsvWriter::finish() {
    out_.close();
    if (!out_)
        throw std::runtime_error("failed while writing " + entry_.path);
    return entry_;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

namespace {

nlohmann::json number_or_null(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

void write_summary(const std::filesystem::path& path, const RunResult& result,
                   const RunOptions& options) {
    using nlohmann::json;
    json root;
    root["schema_version"] = 1;
    root["scenario"] = result.config.name;
    root["kind"] = to_string(result.config.kind);
    root["config"] = to_toml(result.config);
    root["threads"] = options.threads;
    root["seed"] = options.seed;

    json variants = json::array();
    for (const auto& v : result.variants) {
        json jv;
        jv["name"] = v.name;
        json scalars = json::object();
        for (const auto& [key, s] : v.scalars)
            scalars[key] = {{"value", number_or_null(s.value)}, {"source", s.source}};
        jv["scalars"] = scalars;
        json flags = json::object();
        for (const auto& [key, f] : v.flags)
            flags[key] = {{"value", f.value}, {"source", f.source}};
        jv["flags"] = flags;
        json files = json::array();
        for (const auto& f : v.files)
            files.push_back({{"path", f.path},
                             {"description", f.description},
                             {"columns", f.columns},
                             {"rows", f.rows}});
        jv["files"] = files;
        variants.push_back(jv);
    }
    root["variants"] = variants;
    root["diagnostics"] = result.diagnostics;
    root["wall_clock_seconds"] = result.wall_clock_seconds;
    root["created_utc"] = utc_now();
    write_text_file(path, root.dump(2) + "\n");
}

} // namespace tiltpump::detail
