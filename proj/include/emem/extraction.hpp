#pragma once
// LLM-backed transformations: session -> EDUs (with structured chunks
// for long assistant turns), EDU -> event type and role-argument pairs,
// query -> surface mentions, and the two recall-oriented relevance
// filters. All prompts demand strict JSON; a single repair retry
// re-sends with the parse error appended.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emem/core.hpp"
#include "emem/json_util.hpp"
#include "emem/prompts.hpp"
#include "emem/providers.hpp"

namespace emem {

enum class ExtractionMode { generic, assistant_chunking };

enum class MentionStrategy { generic, ned_only };

struct MentionSet {
    std::string query;
    std::vector<std::string> mentions; // deduplicated case-insensitively
};

struct FilterVerdict {
    std::vector<std::string> candidate_ids; // ordered as prompted
    std::vector<std::string> selected;      // subset, candidate order
    bool fail_open = false;                 // parse failed twice; kept everything
};

namespace detail {

// One chat call plus one repair retry; nullopt when both replies fail
// to yield JSON.
inline std::optional<json> chat_json(ChatProvider& chat, const std::string& role_tag,
                                     const std::string& system, const std::string& user) {
    ChatRequest req{role_tag, system, user};
    std::string reply = chat.complete(req);
    if (auto j = extract_json(reply)) return j;
    ChatRequest repair{role_tag, system,
                       user + "\n\nYour previous reply could not be parsed as JSON. "
                              "Reply with strict JSON only."};
    reply = chat.complete(repair);
    return extract_json(reply);
}

inline bool is_assistant(const std::string& speaker) {
    return to_lower(trim(speaker)) == "assistant";
}

inline std::string render_turns(const Session& session, bool assistant_side, bool all_turns) {
    std::string out;
    for (const auto& t : session.turns) {
        if (!all_turns && is_assistant(t.speaker) != assistant_side) continue;
        out += "[" + std::to_string(t.index) + "] " + t.speaker + ": " + t.text + "\n";
    }
    return out;
}

inline std::string session_header(const Session& session, const std::set<std::string>& speakers) {
    std::string head = "Session " + session.session_id;
    if (session.timestamp) head += " (" + format_timestamp(*session.timestamp) + ")";
    head += "\nSpeakers:";
    for (const auto& s : speakers) head += " " + s;
    head += "\nTurns (0-based indices):\n";
    return head;
}

// Clips src indices to the session's turn range; optionally restricts
// to assistant turns (chunk attributions must not name user turns).
inline std::set<int> parse_src(const json& j, const Session& session, bool assistant_only,
                               IndexLog* log, const std::string& what) {
    std::set<int> src;
    for (const auto& v : j.value("src", json::array())) {
        if (!v.is_number_integer()) continue;
        int i = v.get<int>();
        bool valid = i >= 0 && i < static_cast<int>(session.turns.size());
        if (valid && assistant_only && !is_assistant(session.turns[static_cast<size_t>(i)].speaker))
            valid = false;
        if (valid) src.insert(i);
        else if (log)
            log->warn("clipped src index " + std::to_string(i) + " on " + what + " in session '" +
                      session.session_id + "'");
    }
    return src;
}

inline std::optional<std::string> opt_string(const json& j, const char* key) {
    if (j.contains(key) && j.at(key).is_string()) {
        std::string s = j.at(key).get<std::string>();
        if (!trim(s).empty()) return s;
    }
    return std::nullopt;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Session -> EDUs

// Generic mode issues one extraction call over the whole session.
// Assistant-chunking mode issues two role-separated calls: the generic
// path over user turns, and a chunking call over assistant turns that
// returns atomic EDUs plus structured chunks (summary indexed, full
// content reserved for QA). A session whose output cannot be parsed
// after the repair retry is skipped with a warning.
inline std::vector<Edu> extract_edus(const Session& session,
                                     const std::set<std::string>& conversation_speakers,
                                     ExtractionMode mode, ChatProvider& chat, IndexLog& log) {
    using namespace detail;
    std::vector<Edu> edus;
    int ordinal = 0;

    auto append_atomic = [&](const json& je) {
        Edu e;
        e.text = trim(je.value("text", ""));
        if (e.text.empty()) {
            log.warn("dropped empty EDU in session '" + session.session_id + "'");
            return;
        }
        e.edu_id = make_edu_id(session.session_id, ordinal++);
        e.session_id = session.session_id;
        e.src = parse_src(je, session, false, &log, "edu");
        if (e.src.empty())
            log.warn("EDU " + e.edu_id + " has no valid source turns");
        e.timestamp =
            derive_edu_timestamp(session.timestamp, opt_string(je, "time_hint"), &log);
        edus.push_back(std::move(e));
    };

    const std::string header = session_header(session, conversation_speakers);

    if (mode == ExtractionMode::generic) {
        const std::string user = header + render_turns(session, false, true) + "\n" +
                                 prompts::kEduExtractInstructions;
        auto j = chat_json(chat, "edu_extract", prompts::kEduExtractSystem, user);
        if (!j) {
            log.warn("extraction parse failure, skipping session '" + session.session_id + "'");
            return {};
        }
        for (const auto& je : j->value("edus", json::array())) append_atomic(je);
        return edus;
    }

    // assistant-chunking: user turns first, via the unmodified generic path
    const std::string user_turns = render_turns(session, false, false);
    if (!user_turns.empty()) {
        const std::string user = header + user_turns + "\n" + prompts::kEduExtractInstructions;
        auto j = chat_json(chat, "edu_extract", prompts::kEduExtractSystem, user);
        if (!j) {
            log.warn("user-side extraction parse failure in session '" + session.session_id +
                     "', skipping session");
            return {};
        }
        for (const auto& je : j->value("edus", json::array())) append_atomic(je);
    }

    const std::string assistant_turns = render_turns(session, true, false);
    if (!assistant_turns.empty()) {
        const std::string user =
            header + assistant_turns + "\n" + prompts::kChunkExtractInstructions;
        auto j = chat_json(chat, "chunk_extract", prompts::kChunkExtractSystem, user);
        if (!j) {
            log.warn("assistant-side extraction parse failure in session '" +
                     session.session_id + "', keeping user-side EDUs only");
            return edus;
        }
        for (const auto& je : j->value("edus", json::array())) append_atomic(je);
        for (const auto& jc : j->value("chunks", json::array())) {
            Edu e;
            e.text = trim(jc.value("summary", ""));
            e.expanded_text = jc.value("content", "");
            if (e.text.empty() || trim(e.expanded_text).empty()) {
                log.warn("dropped chunk without summary or content in session '" +
                         session.session_id + "'");
                continue;
            }
            e.edu_id = make_edu_id(session.session_id, ordinal++);
            e.session_id = session.session_id;
            e.kind = EduKind::chunk;
            e.src = parse_src(jc, session, true, &log, "chunk");
            e.timestamp =
                derive_edu_timestamp(session.timestamp, opt_string(jc, "time_hint"), &log);
            edus.push_back(std::move(e));
        }
    }
    return edus;
}

// ---------------------------------------------------------------------------
// EDU -> event type + role-argument pairs

// Chunk EDUs are analyzed on their summary (the indexed text), never on
// the expanded content. A parse failure after the repair retry leaves
// the EDU with no arguments rather than failing the build.
inline std::pair<std::string, std::vector<RoleArg>> extract_arguments(const Edu& edu,
                                                                      ChatProvider& chat,
                                                                      IndexLog& log) {
    using namespace detail;
    const std::string user = "Event statement: " + edu.text + "\n\n" +
                             prompts::kArgExtractInstructions;
    auto j = chat_json(chat, "arg_extract", prompts::kArgExtractSystem, user);
    if (!j) {
        log.warn("argument extraction parse failure for " + edu.edu_id);
        return {"", {}};
    }
    std::string event_type = trim(j->value("event_type", ""));
    std::vector<RoleArg> args;
    for (const auto& ja : j->value("args", json::array())) {
        RoleArg ra;
        ra.role = trim(ja.value("role", ""));
        ra.argument = trim(ja.value("argument", ""));
        if (ra.argument.empty()) continue; // empty-argument pairs dropped
        args.push_back(std::move(ra));
    }
    return {event_type, args};
}

// ---------------------------------------------------------------------------
// Query -> mentions

// Provider failure degrades to an empty mention set (the pipeline then
// runs with EDU seeds only).
inline MentionSet detect_mentions(const std::string& query, ChatProvider& chat,
                                  MentionStrategy strategy = MentionStrategy::generic,
                                  IndexLog* log = nullptr) {
    using namespace detail;
    MentionSet out;
    out.query = query;
    const char* system = strategy == MentionStrategy::ned_only ? prompts::kMentionNedSystem
                                                               : prompts::kMentionSystem;
    const std::string user = "Question: " + query + "\n\n" + prompts::kMentionInstructions;
    std::optional<json> j;
    try {
        j = chat_json(chat, "mention", system, user);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TransportError && e.code() != ErrorCode::ProviderRefusal)
            throw;
        if (log) log->warn(std::string("mention detection failed: ") + e.what());
        return out;
    }
    if (!j) {
        if (log) log->warn("mention detection reply unparsable; no mentions");
        return out;
    }
    std::set<std::string> seen;
    const json arr = j->is_array() ? *j : j->value("mentions", json::array());
    for (const auto& jm : arr) {
        if (!jm.is_string()) continue;
        std::string m = trim(jm.get<std::string>());
        if (m.empty()) continue;
        if (seen.insert(to_lower(m)).second) out.mentions.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recall-oriented filters

namespace detail {

// Accepts {"keep": [...]} with 1-based numbers or exact candidate
// strings, a bare JSON array, or a plain comma-separated number list.
// nullopt means unparsable.
inline std::optional<std::vector<size_t>> parse_keep(const std::string& reply,
                                                     const std::vector<std::string>& texts) {
    json arr;
    if (auto j = extract_json(reply)) {
        if (j->is_object() && j->contains("keep") && j->at("keep").is_array())
            arr = j->at("keep");
        else if (j->is_array())
            arr = *j;
        else
            return std::nullopt;
    } else {
        // bare list like "1, 4, 7"
        const std::string t = trim(reply);
        if (t.empty() || t.find_first_not_of("0123456789, \t\r\n") != std::string::npos)
            return std::nullopt;
        arr = json::array();
        size_t i = 0;
        while (i < t.size()) {
            if (std::isdigit(static_cast<unsigned char>(t[i]))) {
                size_t j2 = i;
                while (j2 < t.size() && std::isdigit(static_cast<unsigned char>(t[j2]))) ++j2;
                arr.push_back(std::stol(t.substr(i, j2 - i)));
                i = j2;
            } else {
                ++i;
            }
        }
        if (arr.empty()) return std::nullopt;
    }

    std::set<size_t> picked;
    for (const auto& v : arr) {
        if (v.is_number_integer()) {
            long n = v.get<long>(); // 1-based; out-of-range ignored
            if (n >= 1 && n <= static_cast<long>(texts.size()))
                picked.insert(static_cast<size_t>(n - 1));
        } else if (v.is_string()) {
            const std::string s = trim(v.get<std::string>());
            for (size_t i = 0; i < texts.size(); ++i)
                if (texts[i] == s) picked.insert(i);
        }
    }
    return std::vector<size_t>(picked.begin(), picked.end());
}

// Shared filter body: one chat call over the numbered candidate list,
// one repair retry, then fail-open (keep everything). Losing candidates
// is the worse failure for a recall-oriented filter.
inline FilterVerdict run_filter(ChatProvider& chat, const std::string& role_tag,
                                const char* system, const std::string& query,
                                const std::vector<std::string>& ids,
                                const std::vector<std::string>& texts) {
    FilterVerdict verdict;
    verdict.candidate_ids = ids;
    if (ids.empty()) return verdict;

    std::string user = "Question: " + query + "\n\nCandidates:\n";
    for (size_t i = 0; i < texts.size(); ++i)
        user += std::to_string(i + 1) + ". " + texts[i] + "\n";
    user += "\n";
    user += prompts::kFilterInstructions;

    ChatRequest req{role_tag, system, user};
    auto selection = parse_keep(chat.complete(req), texts);
    if (!selection) {
        ChatRequest repair{role_tag, system,
                           user + "\n\nYour previous reply could not be parsed. " +
                               prompts::kFilterInstructions};
        selection = parse_keep(chat.complete(repair), texts);
    }
    if (!selection) {
        verdict.selected = ids; // fail-open
        verdict.fail_open = true;
        return verdict;
    }
    for (size_t i : *selection) verdict.selected.push_back(ids[i]);
    return verdict;
}

} // namespace detail

inline FilterVerdict filter_edus(const std::string& query, const std::vector<Edu>& candidates,
                                 ChatProvider& chat) {
    std::vector<std::string> ids, texts;
    for (const auto& e : candidates) {
        ids.push_back(e.edu_id);
        texts.push_back(e.text);
    }
    return detail::run_filter(chat, "edu_filter", prompts::kEduFilterSystem, query, ids, texts);
}

inline FilterVerdict filter_args(const std::string& query,
                                 const std::vector<ArgumentRecord>& candidates,
                                 ChatProvider& chat) {
    std::vector<std::string> ids, texts;
    for (const auto& a : candidates) {
        ids.push_back(a.arg_id);
        texts.push_back(a.surface);
    }
    return detail::run_filter(chat, "arg_filter", prompts::kArgFilterSystem, query, ids, texts);
}

} // namespace emem
