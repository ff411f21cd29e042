#pragma once
// Domain types shared by every stage: conversations and their sessions,
// the event-like memory units (EDUs) extracted from them, deduplicated
// argument records, and the engine configuration.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "emem/error.hpp"
#include "emem/time.hpp"

namespace emem {

using json = nlohmann::json;

struct Turn {
    int index = 0; // 0-based, contiguous within the session
    std::string speaker;
    std::string text;
};

struct Session {
    std::string session_id;
    std::optional<Timestamp> timestamp;
    std::vector<Turn> turns;
};

struct Conversation {
    std::string conversation_id;
    std::vector<Session> sessions; // timestamped ones sorted ascending, undated after
    std::set<std::string> speakers; // derived

    const Session* find_session(const std::string& id) const {
        for (const auto& s : sessions)
            if (s.session_id == id) return &s;
        return nullptr;
    }
};

enum class EduKind { atomic, chunk };

inline const char* edu_kind_name(EduKind k) { return k == EduKind::atomic ? "atomic" : "chunk"; }

struct RoleArg {
    std::string role;
    std::string argument;
    bool operator==(const RoleArg& o) const { return role == o.role && argument == o.argument; }
};

// An enriched elementary discourse unit: a short self-contained event
// statement with source-turn attribution and a timestamp. Chunk EDUs
// index a 2-3 sentence summary as `text` and keep the full block in
// `expanded_text`, which is substituted only when assembling QA context.
struct Edu {
    std::string edu_id;     // deterministic: "<session_id>:eNNNN"
    std::string session_id; // owning session
    std::string text;
    std::set<int> src; // supporting turn indices in the session
    std::optional<Timestamp> timestamp;
    EduKind kind = EduKind::atomic;
    std::string expanded_text; // non-empty iff kind == chunk
    std::string event_type;
    std::vector<RoleArg> role_args;
};

inline std::string make_edu_id(const std::string& session_id, int ordinal) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), ":e%04d", ordinal);
    return session_id + buf;
}

// One deduplicated argument string shared across EDUs. Dedup key is the
// lowercase trimmed surface; the first-seen casing is kept.
struct ArgumentRecord {
    std::string arg_id; // deterministic: "aNNNN" in first-insertion order
    std::string surface;
    std::string norm_key;
    std::set<std::string> edu_ids;
};

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string to_lower(const std::string& s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// The conversation-global argument set. Insertion is idempotent on the
// normalized surface: repeats merge their edu_ids into one record.
class ArgumentSet {
public:
    // Returns the arg_id the surface resolved to, or empty when the
    // surface trims to nothing.
    std::string insert(const std::string& surface, const std::string& edu_id) {
        const std::string trimmed = trim(surface);
        if (trimmed.empty()) return "";
        const std::string key = to_lower(trimmed);
        auto it = by_key_.find(key);
        if (it == by_key_.end()) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "a%04d", static_cast<int>(records_.size()));
            ArgumentRecord rec;
            rec.arg_id = buf;
            rec.surface = trimmed;
            rec.norm_key = key;
            rec.edu_ids.insert(edu_id);
            by_key_.emplace(key, records_.size());
            records_.push_back(std::move(rec));
            return records_.back().arg_id;
        }
        records_[it->second].edu_ids.insert(edu_id);
        return records_[it->second].arg_id;
    }

    const std::vector<ArgumentRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const ArgumentRecord* find(const std::string& arg_id) const {
        for (const auto& r : records_)
            if (r.arg_id == arg_id) return &r;
        return nullptr;
    }

    void restore(std::vector<ArgumentRecord> records) {
        records_ = std::move(records);
        by_key_.clear();
        for (size_t i = 0; i < records_.size(); ++i) by_key_[records_[i].norm_key] = i;
    }

private:
    std::vector<ArgumentRecord> records_;
    std::map<std::string, size_t> by_key_;
};

struct EngineFlags {
    bool use_graph = true;
    bool use_edu_filter = true;
    bool use_arg_filter = true;
    bool use_cot = true;
};

struct EngineConfig {
    double delta = 0.9;  // synonym-edge cosine threshold
    int syn_cap = 100;   // max synonym neighbors nominated per argument
    int link_top_ke = 30;
    int link_top_ka = 10;
    int seed_cap = 30;   // max nonzero argument seeds
    int final_top_k = 10;
    double alpha = 0.5;  // PPR damping
    double ppr_tol = 1e-8;
    int ppr_max_iters = 128;
    EngineFlags flags;

    void validate() const {
        if (syn_cap <= 0 || link_top_ke <= 0 || link_top_ka <= 0 || seed_cap <= 0 ||
            final_top_k <= 0 || ppr_max_iters <= 0)
            throw Error(ErrorCode::FormatError, "config counts must be positive");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw Error(ErrorCode::FormatError, "alpha must be in (0,1)");
        if (delta < -1.0 || delta > 1.01)
            throw Error(ErrorCode::FormatError, "delta out of range");
    }
};

inline void to_json(json& j, const EngineConfig& c) {
    j = json{{"delta", c.delta},
             {"syn_cap", c.syn_cap},
             {"link_top_ke", c.link_top_ke},
             {"link_top_ka", c.link_top_ka},
             {"seed_cap", c.seed_cap},
             {"final_top_k", c.final_top_k},
             {"alpha", c.alpha},
             {"ppr_tol", c.ppr_tol},
             {"ppr_max_iters", c.ppr_max_iters},
             {"use_graph", c.flags.use_graph},
             {"use_edu_filter", c.flags.use_edu_filter},
             {"use_arg_filter", c.flags.use_arg_filter},
             {"use_cot", c.flags.use_cot}};
}

inline void from_json(const json& j, EngineConfig& c) {
    EngineConfig defaults;
    c.delta = j.value("delta", defaults.delta);
    c.syn_cap = j.value("syn_cap", defaults.syn_cap);
    c.link_top_ke = j.value("link_top_ke", defaults.link_top_ke);
    c.link_top_ka = j.value("link_top_ka", defaults.link_top_ka);
    c.seed_cap = j.value("seed_cap", defaults.seed_cap);
    c.final_top_k = j.value("final_top_k", defaults.final_top_k);
    c.alpha = j.value("alpha", defaults.alpha);
    c.ppr_tol = j.value("ppr_tol", defaults.ppr_tol);
    c.ppr_max_iters = j.value("ppr_max_iters", defaults.ppr_max_iters);
    c.flags.use_graph = j.value("use_graph", true);
    c.flags.use_edu_filter = j.value("use_edu_filter", true);
    c.flags.use_arg_filter = j.value("use_arg_filter", true);
    c.flags.use_cot = j.value("use_cot", true);
}

// Warnings accumulated while building an index (skipped sessions,
// unparsable time hints, clipped attributions, ...).
struct IndexLog {
    std::vector<std::string> warnings;
    void warn(const std::string& msg) { warnings.push_back(msg); }
};

// ---------------------------------------------------------------------------
// Validation

// Normalizes a parsed conversation: sessions sorted ascending by
// timestamp (undated sessions keep their input order at the end), turn
// indices rewritten contiguous from 0, speaker set derived. Structural
// violations throw.
inline Conversation validate_conversation(Conversation raw) {
    std::set<std::string> ids;
    for (auto& s : raw.sessions) {
        if (s.turns.empty())
            throw Error(ErrorCode::EmptySession, "session '" + s.session_id + "' has no turns");
        if (!ids.insert(s.session_id).second)
            throw Error(ErrorCode::DuplicateSessionId, "session id '" + s.session_id + "'");
        for (size_t i = 0; i < s.turns.size(); ++i) {
            auto& t = s.turns[i];
            t.index = static_cast<int>(i);
            if (trim(t.speaker).empty())
                throw Error(ErrorCode::FormatError,
                            "empty speaker in session '" + s.session_id + "'");
        }
    }
    std::stable_sort(raw.sessions.begin(), raw.sessions.end(),
                     [](const Session& a, const Session& b) {
                         if (a.timestamp && b.timestamp) return *a.timestamp < *b.timestamp;
                         return a.timestamp.has_value() && !b.timestamp.has_value();
                     });
    raw.speakers.clear();
    for (const auto& s : raw.sessions)
        for (const auto& t : s.turns) raw.speakers.insert(t.speaker);
    return raw;
}

// Timestamp for one EDU: the extractor's time hint when it parses,
// otherwise the session date, otherwise absent. An unparsable hint is
// not an error; it falls back with a warning.
inline std::optional<Timestamp> derive_edu_timestamp(const std::optional<Timestamp>& session_ts,
                                                     const std::optional<std::string>& hint,
                                                     IndexLog* log = nullptr) {
    if (hint && !trim(*hint).empty()) {
        if (auto parsed = parse_timestamp(*hint)) return parsed;
        if (log) log->warn("unparsable time hint '" + *hint + "', using session date");
    }
    return session_ts;
}

// ---------------------------------------------------------------------------
// Conversation wire format
//
// {conversation_id, sessions: [{session_id, timestamp, turns: [{speaker, text}]}]}

inline Conversation conversation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("sessions"))
        throw Error(ErrorCode::FormatError, "conversation document needs a 'sessions' array");
    Conversation conv;
    conv.conversation_id = j.value("conversation_id", "");
    for (const auto& js : j.at("sessions")) {
        Session s;
        s.session_id = js.value("session_id", "");
        if (js.contains("timestamp") && !js.at("timestamp").is_null()) {
            const std::string raw = js.at("timestamp").get<std::string>();
            if (!trim(raw).empty()) {
                auto parsed = parse_timestamp(raw);
                if (!parsed)
                    throw Error(ErrorCode::UnparsableTimestamp,
                                "'" + raw + "' in session '" + s.session_id + "'");
                s.timestamp = parsed;
            }
        }
        for (const auto& jt : js.value("turns", json::array())) {
            Turn t;
            t.index = static_cast<int>(s.turns.size());
            t.speaker = jt.value("speaker", "");
            t.text = jt.value("text", "");
            s.turns.push_back(std::move(t));
        }
        conv.sessions.push_back(std::move(s));
    }
    return conv;
}

inline json conversation_to_json(const Conversation& conv) {
    json sessions = json::array();
    for (const auto& s : conv.sessions) {
        json turns = json::array();
        for (const auto& t : s.turns) turns.push_back({{"speaker", t.speaker}, {"text", t.text}});
        json js{{"session_id", s.session_id}, {"turns", std::move(turns)}};
        if (s.timestamp) js["timestamp"] = format_timestamp(*s.timestamp);
        sessions.push_back(std::move(js));
    }
    return json{{"conversation_id", conv.conversation_id}, {"sessions", std::move(sessions)}};
}

} // namespace emem
