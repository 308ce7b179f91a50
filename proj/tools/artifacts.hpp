#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "config.hpp"

namespace qcs::cli {

namespace fs = std::filesystem;

using Cell = std::variant<std::monostate, double, long, bool, std::string>;
using Row = std::vector<Cell>;

inline std::string format_number(double x) { return fmt::format("{:.12g}", x); }

/// JSON value for a number at the same 12 significant digits as the CSV.
inline json json_number(double x)
{
    if (!std::isfinite(x)) {
        return nullptr;
    }
    const std::string s = format_number(x);
    double y = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), y);
    return y;
}

inline json json_number(std::optional<double> x) { return x ? json_number(*x) : json(nullptr); }

inline std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", md[i]);
    }
    return hex;
}

inline std::string sha256_text(const std::string& text)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", md[i]);
    }
    return hex;
}

/**
 * @brief Row-oriented table written as CSV or JSON.
 *
 * CSV rows go straight to disk and are flushed per block; the JSON form
 * {"columns": [...], "rows": [[...], ...]} is written on close.
 */
class TableWriter {
public:
    TableWriter(const fs::path& stem, std::vector<std::string> columns, OutputFormat format)
        : columns_(std::move(columns)), format_(format)
    {
        path_ = stem;
        path_ += format == OutputFormat::csv ? ".csv" : ".json";
        out_.open(path_, std::ios::binary | std::ios::trunc);
        if (!out_) {
            throw std::runtime_error("cannot write " + path_.string());
        }
        if (format_ == OutputFormat::csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                out_ << (i ? "," : "") << columns_[i];
            }
            out_ << '\n';
        }
    }

    void write(const Row& row)
    {
        if (row.size() != columns_.size()) {
            throw std::logic_error("TableWriter: row width does not match header");
        }
        if (format_ == OutputFormat::csv) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out_ << (i ? "," : "") << csv_cell(row[i]);
            }
            out_ << '\n';
        } else {
            json r = json::array();
            for (const Cell& c : row) {
                r.push_back(json_cell(c));
            }
            rows_.push_back(std::move(r));
        }
    }

    void flush() { out_.flush(); }

    fs::path close()
    {
        if (format_ == OutputFormat::json) {
            out_ << json{{"columns", columns_}, {"rows", rows_}}.dump(1) << '\n';
        }
        out_.close();
        return path_;
    }

private:
    static std::string csv_cell(const Cell& c)
    {
        struct {
            std::string operator()(std::monostate) const { return ""; }
            std::string operator()(double x) const { return std::isfinite(x) ? format_number(x) : ""; }
            std::string operator()(long x) const { return std::to_string(x); }
            std::string operator()(bool x) const { return x ? "true" : "false"; }
            std::string operator()(const std::string& s) const { return s; }
        } v;
        return std::visit(v, c);
    }

    static json json_cell(const Cell& c)
    {
        struct {
            json operator()(std::monostate) const { return nullptr; }
            json operator()(double x) const { return json_number(x); }
            json operator()(long x) const { return x; }
            json operator()(bool x) const { return x; }
            json operator()(const std::string& s) const { return s; }
        } v;
        return std::visit(v, c);
    }

    std::vector<std::string> columns_;
    OutputFormat format_;
    fs::path path_;
    std::ofstream out_;
    json rows_ = json::array();
};

inline fs::path write_json(const fs::path& path, const json& doc)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
    return path;
}

/// Written only after every output of a run is complete.
inline void write_manifest(const fs::path& dir, const std::string& version, const std::string& command,
                           const RunConfig& cfg, const std::vector<fs::path>& outputs)
{
    json files = json::object();
    for (const fs::path& p : outputs) {
        files[p.filename().string()] = sha256_file(p);
    }
    const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    json m = {{"version", version},
              {"command", command},
              {"config_sha256", sha256_text(canonical(cfg).dump())},
              {"config", canonical(cfg)},
              {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)))},
              {"outputs", files}};
    write_json(dir / (command + "_manifest.json"), m);
}

} // namespace qcs::cli
