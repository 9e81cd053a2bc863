#include "encounterlens/csv.hpp"

#include <charconv>
#include <stdexcept>

#include "encounterlens/ids.hpp"

namespace encounterlens::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

std::optional<std::string_view> LineReader::next() {
    if (!std::getline(in_, buf_)) return std::nullopt;
    ++line_no_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    return std::string_view(buf_);
}

void expect_header(LineReader& reader, std::string_view expected, std::string_view what) {
    const auto header = reader.next();
    if (!header) {
        throw SchemaError(std::string(what) + ": missing header row (expected '" +
                          std::string(expected) + "')");
    }
    if (trim(*header) != expected) {
        throw SchemaError(std::string(what) + ": bad header '" + std::string(*header) +
                          "', expected '" + std::string(expected) + "'");
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw MissingInput("input not found: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("cannot open input: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output: " + path.string());
    return out;
}

}  // namespace encounterlens::csv
