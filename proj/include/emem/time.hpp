#pragma once
// Calendar timestamps with minute precision. Canonical form is the
// ISO-8601 string "YYYY-MM-DDTHH:MM"; parsing is deliberately lenient
// because conversation datasets carry dates in several shapes
// ("2023-05-30", "March 2024", "1:56 pm on 8 May, 2023",
// "2023/05/30 (Tue) 21:54").

#include <array>
#include <cctype>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace emem {

struct Timestamp {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;
    int minute = 0;

    auto key() const { return std::tie(year, month, day, hour, minute); }
    bool operator==(const Timestamp& o) const { return key() == o.key(); }
    bool operator!=(const Timestamp& o) const { return key() != o.key(); }
    bool operator<(const Timestamp& o) const { return key() < o.key(); }
    bool operator<=(const Timestamp& o) const { return key() <= o.key(); }
};

inline std::string format_timestamp(const Timestamp& t) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d",
                  t.year, t.month, t.day, t.hour, t.minute);
    return buf;
}

namespace detail {

inline const std::array<const char*, 12>& month_names() {
    static const std::array<const char*, 12> names = {
        "january", "february", "march", "april", "may", "june",
        "july", "august", "september", "october", "november", "december"};
    return names;
}

inline std::string lower(const std::string& s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Matches a full or three-letter month name, returns 1..12 or 0.
inline int month_from_name(const std::string& word) {
    const std::string w = lower(word);
    if (w.size() < 3) return 0;
    int i = 1;
    for (const char* name : month_names()) {
        const std::string full(name);
        if (w == full || w == full.substr(0, 3)) return i;
        ++i;
    }
    return 0;
}

inline bool valid_date(int y, int m, int d) {
    if (y < 1 || m < 1 || m > 12 || d < 1) return false;
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dmax = days[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) dmax = 29;
    return d <= dmax;
}

inline bool valid_time(int h, int mi) { return h >= 0 && h < 24 && mi >= 0 && mi < 60; }

// Splits a string into alphabetic words and integer runs, dropping
// everything else (punctuation, parenthesised weekday tags, ...).
struct Token {
    std::string word; // lowercase, empty when numeric
    long number = -1; // -1 when alphabetic
};

inline std::vector<Token> tokenize_date(const std::string& s) {
    std::vector<Token> toks;
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isdigit(c)) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            toks.push_back({"", std::stol(s.substr(i, j - i))});
            i = j;
        } else if (std::isalpha(c)) {
            size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            toks.push_back({lower(s.substr(i, j - i)), -1});
            i = j;
        } else {
            ++i;
        }
    }
    return toks;
}

} // namespace detail

// Parses one timestamp string; returns nullopt when nothing sensible
// can be extracted. Month-only strings map to day 1, 00:00; dates
// without a clock map to 00:00; seconds are truncated.
inline std::optional<Timestamp> parse_timestamp(const std::string& raw) {
    using namespace detail;

    // Fast path: ISO-like prefixes YYYY-MM-DD or YYYY/MM/DD.
    {
        int y = 0, mo = 0, d = 0, h = 0, mi = 0;
        char sep = 0;
        if (std::sscanf(raw.c_str(), "%4d%c%2d%c%2d", &y, &sep, &mo, &sep, &d) == 5 &&
            valid_date(y, mo, d)) {
            Timestamp t{y, mo, d, 0, 0};
            // Optional time anywhere after the date part ("T09:30", " 21:54",
            // "(Tue) 21:54"). Take the first HH:MM pair.
            size_t pos = raw.find(':');
            if (pos != std::string::npos && pos >= 2) {
                size_t hs = pos;
                while (hs > 0 && std::isdigit(static_cast<unsigned char>(raw[hs - 1]))) --hs;
                if (hs < pos && std::sscanf(raw.c_str() + hs, "%d:%d", &h, &mi) == 2 &&
                    valid_time(h, mi)) {
                    t.hour = h;
                    t.minute = mi;
                }
            }
            return t;
        }
    }

    // Word-based forms: "March 2024", "8 May, 2023", "May 8, 2023",
    // "1:56 pm on 8 May, 2023".
    auto toks = tokenize_date(raw);
    if (toks.empty()) return std::nullopt;

    int month = 0, day = 0, year = 0, hour = -1, minute = -1;
    bool pm = false, am = false;

    for (size_t i = 0; i < toks.size(); ++i) {
        const auto& tk = toks[i];
        if (tk.number < 0) {
            if (int m = month_from_name(tk.word); m && !month) month = m;
            else if (tk.word == "pm") pm = true;
            else if (tk.word == "am") am = true;
            continue;
        }
        long n = tk.number;
        if (n >= 1000 && n <= 9999 && !year) {
            year = static_cast<int>(n);
        } else if (hour < 0 && i + 1 < toks.size() && toks[i + 1].number >= 0 &&
                   n <= 23 && toks[i + 1].number <= 59 &&
                   raw.find(':') != std::string::npos) {
            // consecutive numbers around a colon: clock time
            hour = static_cast<int>(n);
            minute = static_cast<int>(toks[i + 1].number);
            ++i;
        } else if (n >= 1 && n <= 31 && !day) {
            day = static_cast<int>(n);
        }
    }

    if (!year || !month) return std::nullopt;
    if (!day) day = 1;
    if (!valid_date(year, month, day)) return std::nullopt;

    Timestamp t{year, month, day, 0, 0};
    if (hour >= 0 && minute >= 0 && valid_time(hour, minute)) {
        if (pm && hour < 12) hour += 12;
        if (am && hour == 12) hour = 0;
        if (hour < 24) {
            t.hour = hour;
            t.minute = minute;
        }
    }
    return t;
}

// Day of week, 0=Sunday .. 6=Saturday (civil calendar).
inline int day_of_week(int y, int m, int d) {
    static const int offs[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
    if (m < 3) y -= 1;
    return (y + y / 4 - y / 100 + y / 400 + offs[m - 1] + d) % 7;
}

inline const char* day_of_week_name(const Timestamp& t) {
    static const char* names[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
    return names[day_of_week(t.year, t.month, t.day)];
}

// "2023/05/30 (Tue) 21:54" — the query-date line shape used when
// wrapping user questions with their ask time.
inline std::string format_query_date(const Timestamp& t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d/%02d/%02d (%s) %02d:%02d",
                  t.year, t.month, t.day, day_of_week_name(t), t.hour, t.minute);
    return buf;
}

} // namespace emem
