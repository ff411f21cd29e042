#pragma once
// Heterogeneous memory graph over session, EDU, and argument nodes with
// three typed undirected edge sets, plus Personalized PageRank by power
// iteration over the uniform-transition random walk.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "emem/core.hpp"
#include "emem/error.hpp"
#include "emem/vector_index.hpp"

namespace emem {

enum class NodeKind { session = 0, edu = 1, arg = 2 };

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::session: return "session";
        case NodeKind::edu: return "edu";
        case NodeKind::arg: return "arg";
    }
    return "?";
}

enum class EdgeKind { sess_edu = 0, edu_arg = 1, syn = 2 };

inline const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::sess_edu: return "sess-edu";
        case EdgeKind::edu_arg: return "edu-arg";
        case EdgeKind::syn: return "syn";
    }
    return "?";
}

class MemoryGraph {
public:
    struct Node {
        NodeKind kind;
        std::string id; // session_id / edu_id / arg_id
    };

    struct Edge {
        int a, b; // node indices, a < b
        EdgeKind kind;
    };

    int add_node(NodeKind kind, const std::string& id) {
        auto key = std::make_pair(static_cast<int>(kind), id);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int n = static_cast<int>(nodes_.size());
        nodes_.push_back({kind, id});
        adjacency_.emplace_back();
        index_.emplace(std::move(key), n);
        return n;
    }

    int find_node(NodeKind kind, const std::string& id) const {
        auto it = index_.find({static_cast<int>(kind), id});
        return it == index_.end() ? -1 : it->second;
    }

    // Undirected, deduplicated, kind-typed. Returns false on duplicates.
    bool add_edge(int a, int b, EdgeKind kind) {
        check_edge_typing(a, b, kind);
        if (a > b) std::swap(a, b);
        if (a == b) throw Error(ErrorCode::FormatError, "self-loop rejected");
        if (!edge_set_.insert((uint64_t(a) << 32) | uint64_t(b)).second) return false;
        edges_.push_back({a, b, kind});
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
        return true;
    }

    bool has_edge(int a, int b) const {
        if (a > b) std::swap(a, b);
        return edge_set_.count((uint64_t(a) << 32) | uint64_t(b)) > 0;
    }

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<size_t>(i)]; }
    int degree(int i) const { return static_cast<int>(adjacency_[static_cast<size_t>(i)].size()); }

    size_t edge_count(EdgeKind kind) const {
        size_t n = 0;
        for (const auto& e : edges_)
            if (e.kind == kind) ++n;
        return n;
    }

    size_t node_count(NodeKind kind) const {
        size_t n = 0;
        for (const auto& v : nodes_)
            if (v.kind == kind) ++n;
        return n;
    }

private:
    void check_edge_typing(int a, int b, EdgeKind kind) const {
        NodeKind ka = nodes_[static_cast<size_t>(a)].kind;
        NodeKind kb = nodes_[static_cast<size_t>(b)].kind;
        if (ka > kb) std::swap(ka, kb);
        bool ok = false;
        switch (kind) {
            case EdgeKind::sess_edu: ok = (ka == NodeKind::session && kb == NodeKind::edu); break;
            case EdgeKind::edu_arg: ok = (ka == NodeKind::edu && kb == NodeKind::arg); break;
            case EdgeKind::syn: ok = (ka == NodeKind::arg && kb == NodeKind::arg); break;
        }
        if (!ok)
            throw Error(ErrorCode::FormatError,
                        std::string("edge kind ") + edge_kind_name(kind) +
                            " cannot connect " + node_kind_name(ka) + "/" + node_kind_name(kb));
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::set<uint64_t> edge_set_;
    std::map<std::pair<int, std::string>, int> index_;
    bool frozen_ = false;
};

// Sparse personalization vector over graph nodes. Nonzero entries live
// only on edu/arg nodes; normalized weights sum to 1.
struct SeedVector {
    std::map<int, double> weights;
    bool normalized = false;

    void normalize() {
        double sum = 0.0;
        for (auto& [n, w] : weights) sum += w;
        if (sum <= 0.0) throw Error(ErrorCode::EmptySeed, "seed vector has no mass");
        for (auto& [n, w] : weights) w /= sum;
        normalized = true;
    }
};

// ---------------------------------------------------------------------------
// Construction

// One session node per session, one edu node per EDU (chunk EDUs
// included), one arg node per argument record; sess-edu and edu-arg
// edges deduplicated.
inline MemoryGraph build_graph(const Conversation& conv, const std::vector<Edu>& edus,
                               const ArgumentSet& args) {
    MemoryGraph g;
    for (const auto& s : conv.sessions) g.add_node(NodeKind::session, s.session_id);
    for (const auto& e : edus) g.add_node(NodeKind::edu, e.edu_id);
    for (const auto& a : args.records()) g.add_node(NodeKind::arg, a.arg_id);

    for (const auto& e : edus) {
        int ve = g.find_node(NodeKind::edu, e.edu_id);
        int vs = g.find_node(NodeKind::session, e.session_id);
        if (vs >= 0) g.add_edge(vs, ve, EdgeKind::sess_edu);
    }
    for (const auto& a : args.records()) {
        int va = g.find_node(NodeKind::arg, a.arg_id);
        for (const auto& edu_id : a.edu_ids) {
            int ve = g.find_node(NodeKind::edu, edu_id);
            if (ve >= 0) g.add_edge(ve, va, EdgeKind::edu_arg);
        }
    }
    return g;
}

// Connects argument pairs whose embedding cosine reaches delta. Each
// node nominates at most syn_cap highest-similarity neighbors; an edge
// survives if either endpoint nominates it, so a node's final degree
// can exceed its own cap only through others' nominations.
inline void add_synonym_edges(MemoryGraph& g, const VectorStore& store, double delta,
                              int syn_cap) {
    std::vector<int> arg_nodes;
    for (int i = 0; i < g.node_count(); ++i)
        if (g.node(i).kind == NodeKind::arg) arg_nodes.push_back(i);
    if (arg_nodes.size() < 2) return;

    for (int va : arg_nodes) {
        const std::string& id = g.node(va).id;
        if (!store.contains(Ns::arg, id)) continue;
        // +1 so the self-hit does not consume a nomination slot
        auto hits = store.top_k(Ns::arg, store.get(Ns::arg, id), syn_cap + 1);
        int nominated = 0;
        for (const auto& h : hits) {
            if (h.id == id) continue;
            if (h.score < delta) break; // score-descending
            if (nominated >= syn_cap) break;
            int vb = g.find_node(NodeKind::arg, h.id);
            if (vb < 0) continue;
            g.add_edge(va, vb, EdgeKind::syn);
            ++nominated;
        }
    }
}

// ---------------------------------------------------------------------------
// Personalized PageRank

struct PprResult {
    std::vector<double> scores; // one per node, sums to 1
    int iterations = 0;
    bool converged = true;
};

// Power iteration for pi = (1-alpha)*s + alpha*T^t*pi with T
// column-stochastic and uniform over each node's neighbors. Dangling
// nodes teleport their mass back into the seed distribution, so pi
// stays a probability distribution. Non-convergence within max_iters is
// reported, not thrown.
inline PprResult ppr(const MemoryGraph& g, const SeedVector& seeds, double alpha, double tol,
                     int max_iters) {
    const int n = g.node_count();
    if (seeds.weights.empty()) throw Error(ErrorCode::EmptySeed, "no seed entries");
    if (!seeds.normalized) throw Error(ErrorCode::EmptySeed, "seed vector not normalized");

    std::vector<double> s(static_cast<size_t>(n), 0.0);
    for (const auto& [node, w] : seeds.weights) {
        if (node < 0 || node >= n) throw Error(ErrorCode::EmptySeed, "seed node out of range");
        if (w < 0.0) throw Error(ErrorCode::EmptySeed, "negative seed weight");
        s[static_cast<size_t>(node)] = w;
    }

    PprResult out;
    out.scores = s;
    std::vector<double> next(static_cast<size_t>(n), 0.0);

    for (int it = 0; it < max_iters; ++it) {
        double dangling = 0.0;
        for (int v = 0; v < n; ++v)
            if (g.degree(v) == 0) dangling += out.scores[static_cast<size_t>(v)];

        for (int u = 0; u < n; ++u) {
            double inflow = 0.0;
            for (int v : g.neighbors(u))
                inflow += out.scores[static_cast<size_t>(v)] / g.degree(v);
            next[static_cast<size_t>(u)] =
                (1.0 - alpha) * s[static_cast<size_t>(u)] +
                alpha * (inflow + dangling * s[static_cast<size_t>(u)]);
        }

        double diff = 0.0;
        for (int u = 0; u < n; ++u) diff += std::abs(next[static_cast<size_t>(u)] -
                                                     out.scores[static_cast<size_t>(u)]);
        out.scores.swap(next);
        out.iterations = it + 1;
        if (diff <= tol) {
            out.converged = true;
            return out;
        }
    }
    out.converged = false;
    return out;
}

// Restriction of pi to EDU nodes: the k highest-scoring, score
// descending, ties by edu_id ascending.
inline std::vector<ScoredId> select_top_edus(const PprResult& pi, const MemoryGraph& g,
                                             int final_top_k) {
    std::vector<ScoredId> edus;
    for (int i = 0; i < g.node_count(); ++i)
        if (g.node(i).kind == NodeKind::edu)
            edus.push_back({g.node(i).id, pi.scores[static_cast<size_t>(i)]});
    std::sort(edus.begin(), edus.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (static_cast<int>(edus.size()) > final_top_k) edus.resize(static_cast<size_t>(final_top_k));
    return edus;
}

} // namespace emem
