#include "cli/output.hpp"

#include "mipt/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace mipt::cli {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string canonical_config(const json& config) { return config.dump(); }

std::string config_digest(const json& config) { return "fnv1a64:" + fnv1a64_hex(canonical_config(config)); }

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    const auto& s = std::get<std::string>(c);
    if (s.empty()) return nullptr;
    return s;
}

} // namespace

std::string render_csv(const Table& table, const json& config) {
    std::ostringstream out;
    out << "# schema=" << schema_version << '\n';
    out << "# digest=" << config_digest(config) << " config=" << canonical_config(config) << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
    return out.str();
}

std::string render_json(const Table& table, const json& config) {
    json doc;
    doc["schema"] = schema_version;
    doc["command"] = config.value("command", "");
    doc["config"] = config;
    doc["digest"] = config_digest(config);
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(1) + "\n";
}

std::string render(const Table& table, const json& config, const std::string& format) {
    if (format == "csv") return render_csv(table, config);
    if (format == "json") return render_json(table, config);
    throw ConfigError("format must be csv or json (got '" + format + "')");
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::flush;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot open output file '" + tmp.string() + "'");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ConfigError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at '" + path + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json artifact_config(const std::string& content) {
    json config;
    std::string digest;
    if (content.rfind("# schema=", 0) == 0) {
        const std::size_t l1 = content.find('\n');
        const std::size_t l2 = content.find('\n', l1 + 1);
        if (l1 == std::string::npos || l2 == std::string::npos) throw ConfigError("truncated CSV artifact");
        if (content.substr(9, l1 - 9) != std::to_string(schema_version)) {
            throw ConfigError("unsupported artifact schema");
        }
        const std::string line = content.substr(l1 + 1, l2 - l1 - 1);
        const std::string prefix = "# digest=";
        const std::size_t cfg_pos = line.find(" config=");
        if (line.rfind(prefix, 0) != 0 || cfg_pos == std::string::npos) {
            throw ConfigError("CSV artifact lacks the digest/config line");
        }
        digest = line.substr(prefix.size(), cfg_pos - prefix.size());
        try {
            config = json::parse(line.substr(cfg_pos + 8));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("embedded config is not valid JSON: ") + e.what());
        }
    } else {
        json doc;
        try {
            doc = json::parse(content);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("artifact is neither CSV nor JSON: ") + e.what());
        }
        if (!doc.is_object() || !doc.contains("config") || !doc.contains("digest")) {
            throw ConfigError("JSON artifact lacks config/digest");
        }
        if (doc.value("schema", 0) != schema_version) throw ConfigError("unsupported artifact schema");
        config = doc["config"];
        digest = doc["digest"].get<std::string>();
    }
    if (digest != config_digest(config)) throw ConfigError("artifact digest does not match its config");
    return config;
}

} // namespace mipt::cli
