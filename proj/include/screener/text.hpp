#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace screener::text {

std::string trim(std::string_view s);
// ASCII lower-case of the trimmed input; the matching key for choice values.
std::string fold(std::string_view s);
std::string lower(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split_lines(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

// Substitutes every `{name}` in `tmpl` with `values.at(name)`. Braces that do
// not name a known placeholder are copied through untouched, so templates
// can contain literal code samples.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Lower-cased alphanumeric words, everything else is a separator.
std::vector<std::string> words(std::string_view s);

}  // namespace screener::text
