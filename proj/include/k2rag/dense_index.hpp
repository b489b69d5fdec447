#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "k2rag/chunking.hpp"
#include "k2rag/provider.hpp"
#include "k2rag/sparse_index.hpp"

namespace k2rag {

/// Flat exact-search vector store: one embedding per chunk, scored by cosine.
struct DenseIndex {
    ChunkSet chunks;
    std::vector<std::vector<double>> embeddings; // aligned with chunks
    std::size_t dim = 0;
    std::string embedder_id;
};

/// Embeds every chunk in order. The embedding dimension is inferred from the
/// first vector; any later mismatch is a build error naming the chunk.
DenseIndex build_dense(const ChunkSet& chunks, Provider& embedder);

/// Standard cosine similarity. Zero vectors score 0 instead of erroring the
/// query; mismatched dimensions are an error.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

std::vector<double> dense_scores(const DenseIndex& index, const std::vector<double>& query_vec);

/// Exhaustive exact top-k, same tie-break rule as sparse_top_k.
std::vector<ScoredChunk> dense_top_k(const DenseIndex& index,
                                     const std::vector<double>& query_vec, std::size_t k);

void persist_dense(const DenseIndex& index, const std::filesystem::path& path);
DenseIndex load_dense(const std::filesystem::path& path);

} // namespace k2rag
