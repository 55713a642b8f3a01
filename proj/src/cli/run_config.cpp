#include "cli/run_config.hpp"

#include "mipt/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace mipt::cli {

namespace {

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return false;
    if (s == "inf" || s == "+inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

[[noreturn]] void bad(std::string_view key, const std::string& why) {
    throw ConfigError("invalid value for '" + std::string(key) + "': " + why);
}

// Round away the accumulated binary error of start + i*step.
double tidy(double v) {
    if (v == 0.0) return 0.0;
    const double mag = std::pow(10.0, 12 - static_cast<int>(std::ceil(std::log10(std::abs(v)))));
    return std::round(v * mag) / mag;
}

std::vector<double> expand_string(std::string_view s, std::string_view key) {
    std::vector<double> out;
    for (std::string_view item : split(s, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() == 1) {
            double v;
            if (!parse_double(fields[0], v)) bad(key, "'" + std::string(item) + "' is not a number");
            out.push_back(v);
        } else if (fields.size() == 3) {
            double a, b, step;
            if (!parse_double(fields[0], a) || !parse_double(fields[1], b) || !parse_double(fields[2], step)) {
                bad(key, "range '" + std::string(item) + "' must be start:stop:step");
            }
            if (!(step > 0.0) || !std::isfinite(a) || !std::isfinite(b) || b < a) {
                bad(key, "range '" + std::string(item) + "' needs step > 0 and stop >= start");
            }
            const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
            if (count > 1000000) bad(key, "range has too many points");
            for (long i = 0; i < count; ++i) out.push_back(tidy(a + static_cast<double>(i) * step));
        } else {
            bad(key, "'" + std::string(item) + "' is neither a number nor start:stop:step");
        }
    }
    return out;
}

} // namespace

std::vector<double> parse_real_list(const json& value, std::string_view key) {
    if (value.is_number()) return {value.get<double>()};
    if (value.is_string()) return expand_string(value.get<std::string>(), key);
    if (value.is_array()) {
        std::vector<double> out;
        for (const auto& item : value) {
            const auto part = parse_real_list(item, key);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    bad(key, "expected a number, a list or a range");
}

std::vector<int> parse_int_list(const json& value, std::string_view key) {
    std::vector<int> out;
    for (double v : parse_real_list(value, key)) {
        if (v != std::floor(v) || std::abs(v) > 1e9) bad(key, "expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

json token_to_json(const std::string& token) {
    double v;
    if (parse_double(token, v) && std::isfinite(v)) {
        if (v == std::floor(v) && std::abs(v) < 9e15 && token.find_first_of(".eE") == std::string::npos) {
            return json(static_cast<long long>(v));
        }
        return json(v);
    }
    return json(token);
}

// --- ConfigReader ---

ConfigReader::ConfigReader(json raw) : raw_(std::move(raw)), resolved_(json::object()) {
    if (!raw_.is_object()) throw ConfigError("configuration must be a JSON object");
}

const json* ConfigReader::lookup(const std::string& key) {
    used_.insert(key);
    const auto it = raw_.find(key);
    if (it == raw_.end() || it->is_null()) return nullptr;
    return &*it;
}

bool ConfigReader::has(const std::string& key) const {
    const auto it = raw_.find(key);
    return it != raw_.end() && !it->is_null();
}

double ConfigReader::real(const std::string& key, double fallback) {
    const json* v = lookup(key);
    double out = fallback;
    if (v) {
        const auto list = parse_real_list(*v, key);
        if (list.size() != 1) bad(key, "expected a single number");
        out = list.front();
    }
    if (std::isnan(out)) bad(key, "NaN");
    resolved_[key] = std::isinf(out) ? json("inf") : json(out);
    return out;
}

double ConfigReader::real(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required option '" + key + "'");
    return real(key, 0.0);
}

int ConfigReader::integer(const std::string& key, int fallback) {
    const json* v = lookup(key);
    int out = fallback;
    if (v) {
        const auto list = parse_int_list(*v, key);
        if (list.size() != 1) bad(key, "expected a single integer");
        out = list.front();
    }
    resolved_[key] = out;
    return out;
}

int ConfigReader::integer(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required option '" + key + "'");
    return integer(key, 0);
}

long long ConfigReader::integer64(const std::string& key, long long fallback) {
    const json* v = lookup(key);
    long long out = fallback;
    if (v) {
        if (v->is_number_integer()) {
            out = v->get<long long>();
        } else if (v->is_string()) {
            const std::string s = v->get<std::string>();
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc() || ptr != s.data() + s.size()) bad(key, "expected an integer");
        } else {
            bad(key, "expected an integer");
        }
    }
    resolved_[key] = out;
    return out;
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
    const json* v = lookup(key);
    std::string out = fallback;
    if (v) {
        if (!v->is_string()) bad(key, "expected a string");
        out = v->get<std::string>();
    }
    resolved_[key] = out;
    return out;
}

bool ConfigReader::flag(const std::string& key) {
    const json* v = lookup(key);
    bool out = false;
    if (v) {
        if (v->is_boolean()) {
            out = v->get<bool>();
        } else if (v->is_number_integer()) {
            out = v->get<long long>() != 0;
        } else if (v->is_string() && (*v == "true" || *v == "false")) {
            out = *v == "true";
        } else {
            bad(key, "expected true or false");
        }
    }
    resolved_[key] = out;
    return out;
}

std::vector<double> ConfigReader::reals(const std::string& key, const std::vector<double>& fallback) {
    const json* v = lookup(key);
    std::vector<double> out = v ? parse_real_list(*v, key) : fallback;
    json arr = json::array();
    for (double x : out) {
        if (std::isnan(x)) bad(key, "NaN");
        arr.push_back(std::isinf(x) ? json("inf") : json(x));
    }
    resolved_[key] = arr;
    return out;
}

std::vector<double> ConfigReader::reals(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required option '" + key + "'");
    return reals(key, {});
}

std::vector<int> ConfigReader::integers(const std::string& key, const std::vector<int>& fallback) {
    const json* v = lookup(key);
    std::vector<int> out = v ? parse_int_list(*v, key) : fallback;
    resolved_[key] = out;
    return out;
}

std::vector<int> ConfigReader::integers(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required option '" + key + "'");
    return integers(key, {});
}

void ConfigReader::set(const std::string& key, json value) {
    used_.insert(key);
    resolved_[key] = std::move(value);
}

void ConfigReader::finish() const {
    std::string unknown;
    for (const auto& [key, value] : raw_.items()) {
        if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ConfigError("unknown option(s) for this command: " + unknown);
}

} // namespace mipt::cli
