#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "k2rag/dense_index.hpp"
#include "k2rag/provider.hpp"
#include "k2rag/sparse_index.hpp"

namespace k2rag {

struct HybridConfig {
    double lambda = 0.8;               // dense weight; 1 = purely semantic, 0 = purely keyword
    std::size_t k = 10;
    std::size_t candidate_pool_size = 50;

    void validate() const;
};

struct RankedChunk {
    Chunk chunk;
    double score = 0.0;
};

/// (s - min) / (max - min); all-equal maps to 1.0; empty map stays empty.
std::unordered_map<ChunkRef, double>
minmax_normalize(const std::unordered_map<ChunkRef, double>& scores);

/// λ-weighted fusion of normalized raw score maps. Exposed for tests; the
/// maps must cover the same chunk refs (a ref absent from one map counts as
/// raw 0 on that side before normalization).
std::unordered_map<ChunkRef, double>
fuse_scores(double lambda, const std::unordered_map<ChunkRef, double>& dense_raw,
            const std::unordered_map<ChunkRef, double>& sparse_raw);

/// Fused top-k over a candidate pool drawn from both stores: fused score =
/// λ·dense_norm + (1-λ)·sparse_norm, each side min-max normalized over the
/// pool. At the λ endpoints candidates come from the active side only, so
/// λ=0/λ=1 reproduce pure keyword/semantic retrieval.
std::vector<RankedChunk> hybrid_top_k(const std::string& question, const SparseIndex& sparse,
                                      const DenseIndex& dense, Provider& embedder,
                                      const HybridConfig& cfg);

} // namespace k2rag
