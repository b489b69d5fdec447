#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "k2rag/chunking.hpp"

namespace k2rag {

/// Position of a chunk inside an index's chunk list.
using ChunkRef = std::size_t;

struct ScoredChunk {
    ChunkRef ref = 0;
    double score = 0.0;
};

/// Okapi BM25 inverted index over a chunk set.
struct SparseIndex {
    struct Posting {
        ChunkRef chunk = 0;
        std::uint32_t term_frequency = 0;
    };

    ChunkSet chunks;
    std::unordered_map<std::string, std::vector<Posting>> postings;
    std::vector<std::size_t> doc_lengths; // token count per chunk
    double avg_doc_length = 0.0;
    double k1 = 1.5;
    double b = 0.75;

    std::size_t doc_count() const { return chunks.size(); }
};

SparseIndex build_sparse(const ChunkSet& chunks, double k1 = 1.5, double b = 0.75);

/// Raw BM25 scores for every chunk sharing at least one query term.
/// IDF(t) = ln((N - df + 0.5)/(df + 0.5) + 1); duplicate query terms
/// contribute once per occurrence.
std::unordered_map<ChunkRef, double> sparse_scores(const SparseIndex& index,
                                                   const std::string& query);

/// Descending score; ties broken by (doc_id, chunk_index) ascending.
/// Returns fewer than k entries when fewer chunks match.
std::vector<ScoredChunk> sparse_top_k(const SparseIndex& index, const std::string& query,
                                      std::size_t k);

void persist_sparse(const SparseIndex& index, const std::filesystem::path& path);
SparseIndex load_sparse(const std::filesystem::path& path);

/// Shared tie-break: score descending, then (doc_id, chunk_index) ascending.
/// `chunks` is the owning index's chunk list.
void sort_ranked(std::vector<ScoredChunk>& ranked, const ChunkSet& chunks);

} // namespace k2rag
