#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace encounterlens {

/// A caller broke a documented precondition (bad parameter, wrong metric, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input data does not have the expected shape (header, column count, T not a power of 2).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required input file or artifact is absent.
class MissingInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Seconds = std::int64_t;

enum class BinUnit { day, hour };

constexpr Seconds kSecondsPerDay = 24 * 60 * 60;
constexpr Seconds kSecondsPerHour = 60 * 60;

[[nodiscard]] constexpr Seconds bin_seconds(BinUnit unit) noexcept {
    return unit == BinUnit::day ? kSecondsPerDay : kSecondsPerHour;
}

[[nodiscard]] std::string_view to_string(BinUnit unit) noexcept;
[[nodiscard]] BinUnit parse_bin_unit(std::string_view text);

/**
 * Canonical node identifier.
 *
 * Anything that reduces to 12 hex digits once ':', '-' and '.' separators are
 * removed is treated as a MAC address and rendered as "aa:bb:cc:dd:ee:ff".
 * Other identifiers are trimmed and lowercased.
 */
[[nodiscard]] std::string canonical_node_id(std::string_view raw);

/// Unordered node pair stored with first < second (lexicographic).
struct NodePair {
    std::string first;
    std::string second;

    auto operator<=>(const NodePair&) const = default;
    bool operator==(const NodePair&) const = default;

    /// "first|second"; used as the id column of spectrum files.
    [[nodiscard]] std::string key() const { return first + "|" + second; }
};

/// Orders the two ids. Throws ContractViolation when a == b.
[[nodiscard]] NodePair make_pair_canonical(std::string a, std::string b);

/// Inverse of NodePair::key().
[[nodiscard]] NodePair parse_pair_key(std::string_view key);

[[nodiscard]] constexpr bool is_power_of_two(std::uint64_t n) noexcept {
    return n != 0 && (n & (n - 1)) == 0;
}

}  // namespace encounterlens
