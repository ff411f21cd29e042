#pragma once
// A frozen per-conversation index (conversation, EDUs, arguments,
// graph, vectors) plus the offline build pipeline that produces it and
// the graph statistics report.

#include <atomic>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "emem/core.hpp"
#include "emem/extraction.hpp"
#include "emem/graph.hpp"
#include "emem/providers.hpp"
#include "emem/vector_index.hpp"

namespace emem {

struct ConversationIndex {
    Conversation conversation;
    std::vector<Edu> edus;
    ArgumentSet args;
    MemoryGraph graph;
    VectorStore store;
    EngineConfig config; // config the index was built with
    std::string chat_model;
    std::string embed_model;

    const Edu* find_edu(const std::string& edu_id) const {
        auto it = edu_lookup_.find(edu_id);
        return it == edu_lookup_.end() ? nullptr : &edus[it->second];
    }

    const Session* find_session(const std::string& session_id) const {
        return conversation.find_session(session_id);
    }

    void rebuild_lookups() {
        edu_lookup_.clear();
        for (size_t i = 0; i < edus.size(); ++i) edu_lookup_[edus[i].edu_id] = i;
    }

private:
    std::unordered_map<std::string, size_t> edu_lookup_;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first
// exception wins and is rethrown after all threads join.
template <typename F>
inline void parallel_for(size_t n, int workers, F&& fn) {
    if (n == 0) return;
    const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (nthreads == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = cursor.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Offline build

// Full indexing pass: EDU extraction per session, argument extraction
// per EDU (both parallel under the provider bound, merged in session /
// EDU order so the result is deterministic), embedding of EDU texts and
// argument surfaces, graph assembly, synonym edges, freeze.
inline ConversationIndex build_conversation_index(const Conversation& raw, ChatProvider& chat,
                                                  EmbeddingProvider& embedder,
                                                  const EngineConfig& config, ExtractionMode mode,
                                                  IndexLog& log,
                                                  const ProviderPolicy& policy = {}) {
    config.validate();
    ConversationIndex ix;
    ix.config = config;
    ix.conversation = validate_conversation(raw);

    // per-session extraction, deterministic merge in session order
    const auto& sessions = ix.conversation.sessions;
    std::vector<std::vector<Edu>> per_session(sessions.size());
    std::vector<IndexLog> session_logs(sessions.size());
    detail::parallel_for(sessions.size(), policy.max_concurrent_requests, [&](size_t i) {
        per_session[i] = extract_edus(sessions[i], ix.conversation.speakers, mode, chat,
                                      session_logs[i]);
    });
    for (size_t i = 0; i < sessions.size(); ++i) {
        for (auto& w : session_logs[i].warnings) log.warn(w);
        for (auto& e : per_session[i]) ix.edus.push_back(std::move(e));
    }

    // per-EDU argument extraction, merged in EDU order
    std::vector<std::pair<std::string, std::vector<RoleArg>>> extracted(ix.edus.size());
    std::vector<IndexLog> edu_logs(ix.edus.size());
    detail::parallel_for(ix.edus.size(), policy.max_concurrent_requests, [&](size_t i) {
        extracted[i] = extract_arguments(ix.edus[i], chat, edu_logs[i]);
    });
    for (size_t i = 0; i < ix.edus.size(); ++i) {
        for (auto& w : edu_logs[i].warnings) log.warn(w);
        ix.edus[i].event_type = extracted[i].first;
        ix.edus[i].role_args = std::move(extracted[i].second);
        for (const auto& ra : ix.edus[i].role_args)
            ix.args.insert(ra.argument, ix.edus[i].edu_id);
    }

    // embeddings: EDU summaries and argument surfaces
    std::vector<std::string> edu_texts;
    for (const auto& e : ix.edus) edu_texts.push_back(e.text);
    if (!edu_texts.empty()) {
        auto vecs = embedder.embed_batch(edu_texts);
        for (size_t i = 0; i < ix.edus.size(); ++i)
            ix.store.add(Ns::edu, ix.edus[i].edu_id, vecs[i]);
    }
    std::vector<std::string> arg_texts;
    for (const auto& a : ix.args.records()) arg_texts.push_back(a.surface);
    if (!arg_texts.empty()) {
        auto vecs = embedder.embed_batch(arg_texts);
        for (size_t i = 0; i < arg_texts.size(); ++i)
            ix.store.add(Ns::arg, ix.args.records()[i].arg_id, vecs[i]);
    }
    if (ix.store.dimension() == 0) {
        // conversation produced no EDUs at all; pin d from the provider
        ix.store = VectorStore(embedder.dimension());
    }

    ix.graph = build_graph(ix.conversation, ix.edus, ix.args);
    add_synonym_edges(ix.graph, ix.store, config.delta, config.syn_cap);
    ix.graph.freeze();
    ix.rebuild_lookups();
    return ix;
}

// ---------------------------------------------------------------------------
// Graph statistics

struct SpeakerStats {
    int edus = 0;   // atomic EDUs attributed to this speaker
    int chunks = 0; // chunk EDUs
    double mean_edu_words = 0.0;
    double mean_chunk_words = 0.0; // full chunk content length
};

struct GraphStats {
    int sessions = 0, edus = 0, args = 0;
    size_t sess_edu_edges = 0, edu_arg_edges = 0, syn_edges = 0;
    double mean_degree_session = 0.0, mean_degree_edu = 0.0, mean_degree_arg = 0.0;
    double mean_session_words = 0.0;
    double mean_turns_per_session = 0.0;
    int chunk_count = 0;
    double mean_chunk_summary_words = 0.0;
    std::map<std::string, SpeakerStats> per_speaker;
};

inline size_t word_count(const std::string& s) {
    size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        bool ws = std::isspace(static_cast<unsigned char>(c));
        if (!ws && !in_word) ++n;
        in_word = !ws;
    }
    return n;
}

inline GraphStats graph_stats(const ConversationIndex& ix) {
    GraphStats st;
    const auto& g = ix.graph;
    st.sessions = static_cast<int>(g.node_count(NodeKind::session));
    st.edus = static_cast<int>(g.node_count(NodeKind::edu));
    st.args = static_cast<int>(g.node_count(NodeKind::arg));
    st.sess_edu_edges = g.edge_count(EdgeKind::sess_edu);
    st.edu_arg_edges = g.edge_count(EdgeKind::edu_arg);
    st.syn_edges = g.edge_count(EdgeKind::syn);

    double deg[3] = {0, 0, 0};
    for (int i = 0; i < g.node_count(); ++i)
        deg[static_cast<int>(g.node(i).kind)] += g.degree(i);
    st.mean_degree_session = st.sessions ? deg[0] / st.sessions : 0.0;
    st.mean_degree_edu = st.edus ? deg[1] / st.edus : 0.0;
    st.mean_degree_arg = st.args ? deg[2] / st.args : 0.0;

    size_t words = 0, turns = 0;
    for (const auto& s : ix.conversation.sessions) {
        turns += s.turns.size();
        for (const auto& t : s.turns) words += word_count(t.text);
    }
    const size_t nsess = ix.conversation.sessions.size();
    st.mean_session_words = nsess ? double(words) / nsess : 0.0;
    st.mean_turns_per_session = nsess ? double(turns) / nsess : 0.0;

    // EDU speaker attribution: the speaker of the first source turn
    std::map<std::string, std::pair<size_t, size_t>> edu_words;   // speaker -> (count, words)
    std::map<std::string, std::pair<size_t, size_t>> chunk_words; // chunk content length
    size_t summary_words = 0;
    for (const auto& e : ix.edus) {
        std::string speaker = "(unattributed)";
        if (!e.src.empty()) {
            if (const Session* s = ix.find_session(e.session_id)) {
                int first = *e.src.begin();
                if (first >= 0 && first < static_cast<int>(s->turns.size()))
                    speaker = s->turns[static_cast<size_t>(first)].speaker;
            }
        }
        if (e.kind == EduKind::chunk) {
            ++st.chunk_count;
            summary_words += word_count(e.text);
            auto& [cnt, w] = chunk_words[speaker];
            ++cnt;
            w += word_count(e.expanded_text);
        } else {
            auto& [cnt, w] = edu_words[speaker];
            ++cnt;
            w += word_count(e.text);
        }
    }
    st.mean_chunk_summary_words = st.chunk_count ? double(summary_words) / st.chunk_count : 0.0;
    for (const auto& [spk, cw] : edu_words) {
        auto& ss = st.per_speaker[spk];
        ss.edus = static_cast<int>(cw.first);
        ss.mean_edu_words = cw.first ? double(cw.second) / cw.first : 0.0;
    }
    for (const auto& [spk, cw] : chunk_words) {
        auto& ss = st.per_speaker[spk];
        ss.chunks = static_cast<int>(cw.first);
        ss.mean_chunk_words = cw.first ? double(cw.second) / cw.first : 0.0;
    }
    return st;
}

inline void to_json(json& j, const GraphStats& st) {
    json speakers = json::object();
    for (const auto& [spk, ss] : st.per_speaker)
        speakers[spk] = {{"edus", ss.edus},
                         {"chunks", ss.chunks},
                         {"mean_edu_words", ss.mean_edu_words},
                         {"mean_chunk_words", ss.mean_chunk_words}};
    j = json{{"sessions", st.sessions},
             {"edus", st.edus},
             {"args", st.args},
             {"sess_edu_edges", st.sess_edu_edges},
             {"edu_arg_edges", st.edu_arg_edges},
             {"syn_edges", st.syn_edges},
             {"mean_degree_session", st.mean_degree_session},
             {"mean_degree_edu", st.mean_degree_edu},
             {"mean_degree_arg", st.mean_degree_arg},
             {"mean_session_words", st.mean_session_words},
             {"mean_turns_per_session", st.mean_turns_per_session},
             {"chunks", st.chunk_count},
             {"mean_chunk_summary_words", st.mean_chunk_summary_words},
             {"per_speaker", std::move(speakers)}};
}

} // namespace emem
