#include "encounterlens/ids.hpp"

#include <algorithm>
#include <cctype>

namespace encounterlens {

std::string_view to_string(BinUnit unit) noexcept {
    return unit == BinUnit::day ? "day" : "hour";
}

BinUnit parse_bin_unit(std::string_view text) {
    if (text == "day") return BinUnit::day;
    if (text == "hour") return BinUnit::hour;
    throw ContractViolation("bin must be 'day' or 'hour', got '" + std::string(text) + "'");
}

std::string canonical_node_id(std::string_view raw) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!raw.empty() && is_space(raw.front())) raw.remove_prefix(1);
    while (!raw.empty() && is_space(raw.back())) raw.remove_suffix(1);

    std::string lowered(raw);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::string hex;
    for (char c : lowered) {
        if (c == ':' || c == '-' || c == '.') continue;
        if (!std::isxdigit(static_cast<unsigned char>(c))) return lowered;
        hex.push_back(c);
    }
    if (hex.size() != 12) return lowered;

    std::string mac;
    mac.reserve(17);
    for (std::size_t i = 0; i < 12; i += 2) {
        if (i != 0) mac.push_back(':');
        mac.append(hex, i, 2);
    }
    return mac;
}

NodePair make_pair_canonical(std::string a, std::string b) {
    if (a == b) throw ContractViolation("a pair needs two distinct nodes, got '" + a + "' twice");
    if (b < a) std::swap(a, b);
    return NodePair{std::move(a), std::move(b)};
}

NodePair parse_pair_key(std::string_view key) {
    const auto bar = key.find('|');
    if (bar == std::string_view::npos) {
        throw SchemaError("pair id '" + std::string(key) + "' lacks the '|' separator");
    }
    return make_pair_canonical(std::string(key.substr(0, bar)), std::string(key.substr(bar + 1)));
}

}  // namespace encounterlens
