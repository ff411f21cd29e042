#pragma once
// Tolerant extraction of JSON payloads from LLM replies: strips code
// fences and prose, scans for the first balanced object or array.

#include <optional>
#include <string>

#include <json.hpp>

namespace emem {

// First balanced {...} or [...] in the text, parsed. String-aware so
// braces inside string literals do not end the scan.
inline std::optional<nlohmann::json> extract_json(const std::string& text) {
    size_t start = text.find_first_of("{[");
    while (start != std::string::npos) {
        const char open = text[start];
        const char close = (open == '{') ? '}' : ']';
        int depth = 0;
        bool in_string = false, escaped = false;
        for (size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close && --depth == 0) {
                auto parsed = nlohmann::json::parse(text.substr(start, i - start + 1),
                                                    nullptr, false);
                if (!parsed.is_discarded()) return parsed;
                break; // balanced but unparsable; try the next candidate
            }
        }
        start = text.find_first_of("{[", start + 1);
    }
    return std::nullopt;
}

} // namespace emem
