#include "screener/key_path.hpp"

#include "screener/error.hpp"

#include <charconv>
#include <cmath>

namespace screener {

std::string to_string(const KeyPath& path) {
    if (path.scope == Scope::Household) {
        return "household." + path.key;
    }
    return "member(" + std::to_string(path.member_index) + ")." + path.key;
}

std::string to_string(const SlotKey& slot) {
    return (slot.scope == Scope::Household ? "household." : "member.") + slot.key;
}

std::string to_prompt_key(const KeyPath& path) {
    if (path.scope == Scope::Household) {
        return "hh[\"" + path.key + "\"]";
    }
    return "hh[" + std::to_string(path.member_index) + "][\"" + path.key + "\"]";
}

KeyPath parse_key_path(const std::string& text) {
    if (text.rfind("household.", 0) == 0 && text.size() > 10) {
        return KeyPath::household(text.substr(10));
    }
    if (text.rfind("member.", 0) == 0 && text.size() > 7) {
        return KeyPath::member(0, text.substr(7));
    }
    if (text.rfind("member(", 0) == 0) {
        auto close = text.find(')');
        if (close != std::string::npos && close + 2 < text.size() && text[close + 1] == '.') {
            int index = -1;
            auto [ptr, ec] = std::from_chars(text.data() + 7, text.data() + close, index);
            if (ec == std::errc{} && ptr == text.data() + close && index >= 0) {
                return KeyPath::member(index, text.substr(close + 2));
            }
        }
    }
    throw Error("malformed key path: '" + text + "'");
}

SlotKey parse_slot_key(const std::string& text) {
    return SlotKey::of(parse_key_path(text));
}

std::string format_real(double value) {
    if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 1e15) {
        return std::to_string(static_cast<long long>(value));
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_value(const FeatureValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        return std::to_string(*i);
    }
    if (const auto* d = std::get_if<double>(&value)) {
        return format_real(*d);
    }
    return std::get<std::string>(value);
}

}  // namespace screener
