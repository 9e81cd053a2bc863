#pragma once

// Minimal CSV plumbing shared by every stage. Fields never contain commas or
// quotes (ids are canonicalized upstream), so no quoting rules are needed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace encounterlens::csv {

[[nodiscard]] std::vector<std::string_view> split(std::string_view line, char sep = ',');
[[nodiscard]] std::string_view trim(std::string_view s);

[[nodiscard]] std::optional<std::int64_t> parse_int(std::string_view s);
[[nodiscard]] std::optional<double> parse_double(std::string_view s);

/// Shortest representation that round-trips (std::to_chars), so files are byte-stable.
[[nodiscard]] std::string format_double(double v);

/// Line reader that tracks 1-based physical line numbers and strips '\r'.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next line, or nullopt at EOF.
    std::optional<std::string_view> next();
    [[nodiscard]] std::size_t line_number() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::string buf_;
    std::size_t line_no_ = 0;
};

/// Reads the header line and throws SchemaError unless it equals `expected`.
void expect_header(LineReader& reader, std::string_view expected, std::string_view what);

/// Opens for reading; throws MissingInput when the file does not exist.
[[nodiscard]] std::ifstream open_input(const std::filesystem::path& path);
/// Opens for writing (creating parent directories); throws std::runtime_error on failure.
[[nodiscard]] std::ofstream open_output(const std::filesystem::path& path);

}  // namespace encounterlens::csv
