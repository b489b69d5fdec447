#include "k2rag/hybrid.hpp"

#include <algorithm>
#include <set>

#include "k2rag/error.hpp"

namespace k2rag {

void HybridConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0)
        throw Error(ErrorCategory::config, "lambda must lie in [0, 1]");
    if (k == 0)
        throw Error(ErrorCategory::config, "k must be >= 1");
    if (candidate_pool_size == 0)
        throw Error(ErrorCategory::config, "candidate_pool_size must be >= 1");
    if (k > candidate_pool_size)
        throw Error(ErrorCategory::config, "k must not exceed candidate_pool_size");
}

std::unordered_map<ChunkRef, double>
minmax_normalize(const std::unordered_map<ChunkRef, double>& scores) {
    std::unordered_map<ChunkRef, double> out;
    if (scores.empty()) return out;
    double lo = scores.begin()->second;
    double hi = lo;
    for (const auto& [_, s] : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    out.reserve(scores.size());
    if (hi == lo) {
        for (const auto& [ref, _] : scores) out[ref] = 1.0;
    } else {
        for (const auto& [ref, s] : scores) out[ref] = (s - lo) / (hi - lo);
    }
    return out;
}

std::unordered_map<ChunkRef, double>
fuse_scores(double lambda, const std::unordered_map<ChunkRef, double>& dense_raw,
            const std::unordered_map<ChunkRef, double>& sparse_raw) {
    auto dense_norm = minmax_normalize(dense_raw);
    auto sparse_norm = minmax_normalize(sparse_raw);
    std::unordered_map<ChunkRef, double> fused;
    fused.reserve(std::max(dense_norm.size(), sparse_norm.size()));
    auto side = [](const std::unordered_map<ChunkRef, double>& m, ChunkRef ref) {
        auto it = m.find(ref);
        return it == m.end() ? 0.0 : it->second;
    };
    for (const auto& [ref, _] : dense_raw) fused[ref] = 0.0;
    for (const auto& [ref, _] : sparse_raw) fused[ref] = 0.0;
    for (auto& [ref, score] : fused)
        score = lambda * side(dense_norm, ref) + (1.0 - lambda) * side(sparse_norm, ref);
    return fused;
}

namespace {

void require_aligned(const SparseIndex& sparse, const DenseIndex& dense) {
    if (sparse.chunks.size() != dense.chunks.size())
        throw Error(ErrorCategory::query,
                    "sparse and dense indexes cover different chunk sets (" +
                        std::to_string(sparse.chunks.size()) + " vs " +
                        std::to_string(dense.chunks.size()) + " chunks)");
    for (std::size_t i = 0; i < sparse.chunks.size(); ++i) {
        const Chunk& a = sparse.chunks[i];
        const Chunk& b = dense.chunks[i];
        if (a.doc_id != b.doc_id || a.chunk_index != b.chunk_index)
            throw Error(ErrorCategory::query,
                        "sparse/dense chunk mismatch at position " + std::to_string(i));
    }
}

} // namespace

std::vector<RankedChunk> hybrid_top_k(const std::string& question, const SparseIndex& sparse,
                                      const DenseIndex& dense, Provider& embedder,
                                      const HybridConfig& cfg) {
    cfg.validate();
    require_aligned(sparse, dense);
    if (sparse.chunks.empty()) return {};

    if (!dense.embedder_id.empty() && embedder.id() != dense.embedder_id)
        throw Error(ErrorCategory::query,
                    "embedder mismatch: index built with '" + dense.embedder_id +
                        "', query uses '" + embedder.id() + "'");

    const bool use_dense = cfg.lambda > 0.0;
    const bool use_sparse = cfg.lambda < 1.0;

    std::unordered_map<ChunkRef, double> sparse_raw;
    if (use_sparse) sparse_raw = sparse_scores(sparse, question);

    std::vector<double> dense_all;
    std::vector<double> query_vec;
    if (use_dense) {
        query_vec = embedder.embed(question);
        dense_all = dense_scores(dense, query_vec);
    }

    // Candidate pool: top candidate_pool_size from each active side.
    std::set<ChunkRef> pool;
    if (use_sparse) {
        std::vector<ScoredChunk> ranked;
        ranked.reserve(sparse_raw.size());
        for (const auto& [ref, s] : sparse_raw) ranked.push_back({ref, s});
        sort_ranked(ranked, sparse.chunks);
        for (std::size_t i = 0; i < ranked.size() && i < cfg.candidate_pool_size; ++i)
            pool.insert(ranked[i].ref);
    }
    if (use_dense) {
        auto ranked = dense_top_k(dense, query_vec,
                                  std::min(cfg.candidate_pool_size, dense.chunks.size()));
        for (const auto& r : ranked) pool.insert(r.ref);
    }
    if (pool.empty()) return {};

    std::unordered_map<ChunkRef, double> dense_pool, sparse_pool;
    for (ChunkRef ref : pool) {
        dense_pool[ref] = use_dense ? dense_all[ref] : 0.0;
        auto it = sparse_raw.find(ref);
        sparse_pool[ref] = it == sparse_raw.end() ? 0.0 : it->second;
    }

    auto fused = fuse_scores(cfg.lambda, dense_pool, sparse_pool);
    std::vector<ScoredChunk> ranked;
    ranked.reserve(fused.size());
    for (const auto& [ref, s] : fused) ranked.push_back({ref, s});
    sort_ranked(ranked, sparse.chunks);
    if (ranked.size() > cfg.k) ranked.resize(cfg.k);

    std::vector<RankedChunk> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.push_back({sparse.chunks[r.ref], r.score});
    return out;
}

} // namespace k2rag
