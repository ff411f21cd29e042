#pragma once
// Chat-completion and embedding backends behind small interfaces, plus
// the deterministic mocks used for offline tests: a scripted chat
// provider keyed by (role tag, input digest or substring) and a seeded
// hash embedder with plantable similarity groups.

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "emem/core.hpp"
#include "emem/error.hpp"

namespace emem {

struct ChatRequest {
    std::string role_tag; // which pipeline call this is (edu_extract, qa, judge, ...)
    std::string system;
    std::string user;
    double temperature = 0.0;
    int max_output_tokens = 2048;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
};

struct EmbeddingVector {
    std::vector<float> values;

    int dimension() const { return static_cast<int>(values.size()); }

    double norm() const {
        double s = 0.0;
        for (float v : values) s += static_cast<double>(v) * v;
        return std::sqrt(s);
    }
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dimension() const = 0;
    // One vector per input text, order preserved.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;

    EmbeddingVector embed(const std::string& text) { return embed_batch({text}).front(); }
};

struct ProviderPolicy {
    int max_concurrent_requests = 4;
    int retry_count = 2;
    int backoff_base_ms = 100;
};

// Global in-flight bound shared by all providers of one engine run.
class RequestGate {
public:
    explicit RequestGate(int limit) : limit_(limit > 0 ? limit : 1) {}

    class Lease {
    public:
        explicit Lease(RequestGate* g) : gate_(g) {}
        Lease(Lease&& o) noexcept : gate_(o.gate_) { o.gate_ = nullptr; }
        Lease(const Lease&) = delete;
        ~Lease() {
            if (gate_) gate_->release();
        }

    private:
        RequestGate* gate_;
    };

    Lease acquire() {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return in_flight_ < limit_; });
        ++in_flight_;
        return Lease(this);
    }

private:
    void release() {
        {
            std::lock_guard<std::mutex> lk(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }

    std::mutex m_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    int limit_;
};

// Runs fn with up to retry_count retries on TransportError, doubling
// the backoff each attempt. ProviderRefusal is never retried.
template <typename F>
auto with_retries(const ProviderPolicy& policy, F&& fn) -> decltype(fn()) {
    int attempt = 0;
    for (;;) {
        try {
            return fn();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TransportError || attempt >= policy.retry_count) throw;
            int delay = policy.backoff_base_ms << attempt;
            if (delay > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            ++attempt;
        }
    }
}

// Applies the policy (in-flight bound + retries) around any chat backend.
class GatedChatProvider : public ChatProvider {
public:
    GatedChatProvider(std::shared_ptr<ChatProvider> inner, ProviderPolicy policy,
                      std::shared_ptr<RequestGate> gate = nullptr)
        : inner_(std::move(inner)),
          policy_(policy),
          gate_(gate ? std::move(gate)
                     : std::make_shared<RequestGate>(policy.max_concurrent_requests)) {}

    std::string complete(const ChatRequest& req) override {
        auto lease = gate_->acquire();
        return with_retries(policy_, [&] { return inner_->complete(req); });
    }

    const std::shared_ptr<RequestGate>& gate() const { return gate_; }

private:
    std::shared_ptr<ChatProvider> inner_;
    ProviderPolicy policy_;
    std::shared_ptr<RequestGate> gate_;
};

// Caches embeddings by exact text. A batch with repeats issues at most
// one backend call covering the distinct misses.
class CachingEmbedder : public EmbeddingProvider {
public:
    explicit CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner)
        : inner_(std::move(inner)) {}

    int dimension() const override { return inner_->dimension(); }

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        std::vector<std::string> misses;
        {
            std::lock_guard<std::mutex> lk(m_);
            std::unordered_map<std::string, bool> queued;
            for (const auto& t : texts)
                if (!cache_.count(t) && !queued.count(t)) {
                    queued.emplace(t, true);
                    misses.push_back(t);
                }
        }
        if (!misses.empty()) {
            auto fresh = inner_->embed_batch(misses);
            std::lock_guard<std::mutex> lk(m_);
            for (size_t i = 0; i < misses.size(); ++i) cache_[misses[i]] = fresh[i];
        }
        std::lock_guard<std::mutex> lk(m_);
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(cache_.at(t));
        return out;
    }

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::mutex m_;
    std::unordered_map<std::string, EmbeddingVector> cache_;
};

// ---------------------------------------------------------------------------
// Deterministic mocks

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 14695981039346656037ull) {
    return fnv1a64(s.data(), s.size(), h);
}

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Scripted chat provider loaded from fixture files. Entries are matched
// in order against the request's role tag plus one of: an exact user
// string, a user-content digest, or a substring. An entry may carry a
// sequence of responses consumed across repeated hits (the last one
// repeats).
class ScriptedChatProvider : public ChatProvider {
public:
    struct Entry {
        std::string role;
        std::string exact;    // full user text
        std::string digest;   // hex fnv1a64 of user text
        std::string contains; // substring of user text
        std::vector<std::string> responses;
        size_t next = 0;
    };

    void add(Entry e) {
        std::lock_guard<std::mutex> lk(m_);
        entries_.push_back(std::move(e));
    }

    void add_contains(const std::string& role, const std::string& substring,
                      const std::string& response) {
        add(Entry{role, "", "", substring, {response}, 0});
    }

    std::string complete(const ChatRequest& req) override {
        std::lock_guard<std::mutex> lk(m_);
        for (auto& e : entries_) {
            if (!e.role.empty() && e.role != req.role_tag) continue;
            bool hit = false;
            if (!e.exact.empty()) hit = (req.user == e.exact);
            else if (!e.digest.empty()) hit = (hex64(fnv1a64(req.user)) == e.digest);
            else if (!e.contains.empty()) hit = (req.user.find(e.contains) != std::string::npos);
            if (!hit) continue;
            const std::string& r = e.responses[std::min(e.next, e.responses.size() - 1)];
            ++e.next;
            return r;
        }
        throw Error(ErrorCode::ScriptMiss, "no scripted reply for role '" + req.role_tag +
                                               "' digest " + hex64(fnv1a64(req.user)));
    }

    // {"chat": [{"role": ..., "contains"|"exact"|"digest": ...,
    //            "response": ... | "responses": [...]}, ...]}
    static std::shared_ptr<ScriptedChatProvider> from_json(const json& j) {
        auto p = std::make_shared<ScriptedChatProvider>();
        for (const auto& je : j.value("chat", json::array())) {
            Entry e;
            e.role = je.value("role", "");
            e.exact = je.value("exact", "");
            e.digest = je.value("digest", "");
            e.contains = je.value("contains", "");
            if (je.contains("responses"))
                for (const auto& r : je.at("responses")) e.responses.push_back(r.get<std::string>());
            else
                e.responses.push_back(je.value("response", ""));
            p->add(std::move(e));
        }
        return p;
    }

private:
    std::mutex m_;
    std::vector<Entry> entries_;
};

// Deterministic pseudorandom unit vector for a (text, dimension, seed)
// triple. Test double for the embedding encoder.
inline EmbeddingVector mock_hash_embed(const std::string& text, int d, uint64_t seed) {
    std::mt19937_64 rng(fnv1a64(text) ^ (seed * 0x9e3779b97f4a7c15ull));
    std::normal_distribution<double> gauss(0.0, 1.0);
    EmbeddingVector v;
    v.values.resize(static_cast<size_t>(d));
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (auto& x : v.values) {
            x = static_cast<float>(gauss(rng));
            norm2 += static_cast<double>(x) * x;
        }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v.values) x = static_cast<float>(x * inv);
    return v;
}

// Hash embedder with planted similarity groups: texts assigned to the
// same group key map to vectors within cosine >= 0.95 of each other
// (centroid plus a small orthogonal perturbation), so synonym-edge and
// retrieval tests can plant known neighborhoods.
class HashEmbedder : public EmbeddingProvider {
public:
    explicit HashEmbedder(int dimension = 16, uint64_t seed = 42)
        : dim_(dimension), seed_(seed) {
        if (dim_ < 2) throw Error(ErrorCode::DimensionMismatch, "hash embedder needs d >= 2");
    }

    int dimension() const override { return dim_; }

    void set_group(const std::string& text, const std::string& group_key) {
        std::lock_guard<std::mutex> lk(m_);
        groups_[text] = group_key;
    }

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

    // {"embedding": {"dimension": 16, "seed": 42, "groups": {"text": "g1", ...}}}
    static std::shared_ptr<HashEmbedder> from_json(const json& j) {
        const json je = j.value("embedding", json::object());
        auto p = std::make_shared<HashEmbedder>(je.value("dimension", 16),
                                                je.value("seed", uint64_t{42}));
        for (const auto& [text, group] : je.value("groups", json::object()).items())
            p->set_group(text, group.get<std::string>());
        return p;
    }

private:
    EmbeddingVector embed_one(const std::string& text) {
        std::string group;
        {
            std::lock_guard<std::mutex> lk(m_);
            auto it = groups_.find(text);
            if (it != groups_.end()) group = it->second;
        }
        if (group.empty()) return mock_hash_embed(text, dim_, seed_);

        // member = normalize(centroid + lambda * u), u unit and orthogonal to
        // the centroid. Worst-case pairwise cosine is (1-l^2)/(1+l^2) = 0.956.
        constexpr double lambda = 0.15;
        EmbeddingVector c = mock_hash_embed("group:" + group, dim_, seed_);
        EmbeddingVector u = mock_hash_embed("member:" + text, dim_, seed_);
        double dot = 0.0;
        for (int i = 0; i < dim_; ++i) dot += double(u.values[i]) * c.values[i];
        double un2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double x = double(u.values[i]) - dot * c.values[i];
            u.values[i] = static_cast<float>(x);
            un2 += x * x;
        }
        if (un2 < 1e-12) return c; // member collinear with centroid; keep centroid
        const double uinv = 1.0 / std::sqrt(un2);
        EmbeddingVector v;
        v.values.resize(static_cast<size_t>(dim_));
        double n2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double x = double(c.values[i]) + lambda * double(u.values[i]) * uinv;
            v.values[i] = static_cast<float>(x);
            n2 += x * x;
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : v.values) x = static_cast<float>(x * inv);
        return v;
    }

    int dim_;
    uint64_t seed_;
    std::mutex m_;
    std::map<std::string, std::string> groups_;
};

// ---------------------------------------------------------------------------
// Mock fixture bundle: scripted chat + hash embedder from one JSON file.

struct MockProviders {
    std::shared_ptr<ScriptedChatProvider> chat;
    std::shared_ptr<HashEmbedder> embedder;

    static MockProviders from_json(const json& j) {
        return MockProviders{ScriptedChatProvider::from_json(j), HashEmbedder::from_json(j)};
    }
};

} // namespace emem
