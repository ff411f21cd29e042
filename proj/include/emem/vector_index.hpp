#pragma once
// Exact cosine top-k store over unit-normalized float vectors,
// partitioned into the edu and arg namespaces. Full scan per query:
// per-conversation stores stay in the low thousands of entries, so
// exactness is affordable and the results are reproducible.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "emem/error.hpp"
#include "emem/providers.hpp"

namespace emem {

enum class Ns { edu = 0, arg = 1 };

inline const char* ns_name(Ns ns) { return ns == Ns::edu ? "edu" : "arg"; }

struct ScoredId {
    std::string id;
    double score = 0.0;
    bool operator==(const ScoredId& o) const { return id == o.id && score == o.score; }
};

inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dimension() != v.dimension())
        throw Error(ErrorCode::DimensionMismatch, "cosine over mismatched dimensions");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (int i = 0; i < u.dimension(); ++i) {
        const double a = u.values[i], b = v.values[i];
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu <= 0.0 || nv <= 0.0) throw Error(ErrorCode::ZeroVector, "cosine of zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

class VectorStore {
public:
    explicit VectorStore(int dimension = 0) : dim_(dimension) {}

    int dimension() const { return dim_; }

    struct Entry {
        std::string id;
        EmbeddingVector vec; // unit norm
    };

    // Normalizes and stores; re-adding an id replaces its vector.
    void add(Ns ns, const std::string& id, const EmbeddingVector& vec) {
        if (dim_ == 0) dim_ = vec.dimension();
        if (vec.dimension() != dim_)
            throw Error(ErrorCode::DimensionMismatch,
                        "expected d=" + std::to_string(dim_) + ", got d=" +
                            std::to_string(vec.dimension()) + " for '" + id + "'");
        double n = vec.norm();
        if (n <= 0.0) throw Error(ErrorCode::ZeroVector, "zero vector for '" + id + "'");
        EmbeddingVector unit;
        unit.values.resize(vec.values.size());
        for (size_t i = 0; i < vec.values.size(); ++i)
            unit.values[i] = static_cast<float>(vec.values[i] / n);
        auto& part = parts_[idx(ns)];
        auto it = part.slot.find(id);
        if (it != part.slot.end()) {
            part.entries[it->second].vec = std::move(unit);
        } else {
            part.slot.emplace(id, part.entries.size());
            part.entries.push_back({id, std::move(unit)});
        }
    }

    bool contains(Ns ns, const std::string& id) const {
        return parts_[idx(ns)].slot.count(id) > 0;
    }

    const EmbeddingVector& get(Ns ns, const std::string& id) const {
        const auto& part = parts_[idx(ns)];
        auto it = part.slot.find(id);
        if (it == part.slot.end())
            throw Error(ErrorCode::EmptyNamespace, "no vector for '" + id + "'");
        return part.entries[it->second].vec;
    }

    size_t size(Ns ns) const { return parts_[idx(ns)].entries.size(); }

    const std::vector<Entry>& entries(Ns ns) const { return parts_[idx(ns)].entries; }

    // The k highest-cosine entries, score descending, ties by id
    // ascending. Returns fewer than k when the namespace is smaller.
    std::vector<ScoredId> top_k(Ns ns, const EmbeddingVector& query, int k) const {
        const auto& part = parts_[idx(ns)];
        if (part.entries.empty())
            throw Error(ErrorCode::EmptyNamespace,
                        std::string("namespace '") + ns_name(ns) + "' is empty");
        if (k < 1) k = 1;
        if (query.dimension() != dim_)
            throw Error(ErrorCode::DimensionMismatch, "query dimension mismatch");
        double qn = query.norm();
        if (qn <= 0.0) throw Error(ErrorCode::ZeroVector, "zero query vector");

        std::vector<ScoredId> scored;
        scored.reserve(part.entries.size());
        for (const auto& e : part.entries) {
            double dot = 0.0;
            for (int i = 0; i < dim_; ++i)
                dot += static_cast<double>(query.values[i]) * e.vec.values[i];
            scored.push_back({e.id, std::clamp(dot / qn, -1.0, 1.0)});
        }
        auto better = [](const ScoredId& a, const ScoredId& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        };
        const size_t kk = std::min<size_t>(static_cast<size_t>(k), scored.size());
        std::nth_element(scored.begin(), scored.begin() + kk - 1, scored.end(), better);
        scored.resize(kk);
        std::sort(scored.begin(), scored.end(), better);
        return scored;
    }

    // -----------------------------------------------------------------------
    // Persistence: one binary file per namespace.
    // Header: magic "EMVX", u32 version, u32 d, u64 count, then the id
    // table (u32 length + bytes each), then count*d float32 LE values.

    static constexpr uint32_t kFileVersion = 1;

    void save_namespace(Ns ns, const std::string& path) const {
        const auto& part = parts_[idx(ns)];
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
        out.write("EMVX", 4);
        write_u32(out, kFileVersion);
        write_u32(out, static_cast<uint32_t>(dim_));
        write_u64(out, part.entries.size());
        for (const auto& e : part.entries) {
            write_u32(out, static_cast<uint32_t>(e.id.size()));
            out.write(e.id.data(), static_cast<std::streamsize>(e.id.size()));
        }
        for (const auto& e : part.entries)
            out.write(reinterpret_cast<const char*>(e.vec.values.data()),
                      static_cast<std::streamsize>(e.vec.values.size() * sizeof(float)));
        if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
    }

    void load_namespace(Ns ns, const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, "EMVX", 4) != 0)
            throw Error(ErrorCode::FormatError, "bad magic in '" + path + "'");
        uint32_t version = read_u32(in);
        if (version != kFileVersion)
            throw Error(ErrorCode::VersionMismatch,
                        "vector file version " + std::to_string(version));
        uint32_t d = read_u32(in);
        if (dim_ == 0) dim_ = static_cast<int>(d);
        if (static_cast<int>(d) != dim_)
            throw Error(ErrorCode::DimensionMismatch, "vector file d=" + std::to_string(d));
        uint64_t count = read_u64(in);
        auto& part = parts_[idx(ns)];
        part.entries.clear();
        part.slot.clear();
        part.entries.reserve(count);
        for (uint64_t i = 0; i < count; ++i) {
            uint32_t len = read_u32(in);
            std::string id(len, '\0');
            in.read(id.data(), len);
            part.slot.emplace(id, part.entries.size());
            part.entries.push_back({std::move(id), {}});
        }
        for (auto& e : part.entries) {
            e.vec.values.resize(static_cast<size_t>(dim_));
            in.read(reinterpret_cast<char*>(e.vec.values.data()),
                    static_cast<std::streamsize>(dim_ * sizeof(float)));
        }
        if (!in) throw Error(ErrorCode::IoError, "truncated vector file '" + path + "'");
    }

private:
    struct Partition {
        std::vector<Entry> entries;
        std::unordered_map<std::string, size_t> slot;
    };

    static size_t idx(Ns ns) { return static_cast<size_t>(ns); }

    static void write_u32(std::ofstream& out, uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(b), 4);
    }
    static void write_u64(std::ofstream& out, uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 8);
    }
    static uint32_t read_u32(std::ifstream& in) {
        unsigned char b[4] = {};
        in.read(reinterpret_cast<char*>(b), 4);
        return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
    }
    static uint64_t read_u64(std::ifstream& in) {
        unsigned char b[8] = {};
        in.read(reinterpret_cast<char*>(b), 8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
        return v;
    }

    int dim_;
    Partition parts_[2];
};

} // namespace emem
