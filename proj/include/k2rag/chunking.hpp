#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "k2rag/tokenizer.hpp"

namespace k2rag {

/// Sliding-window parameters: window of `chunk_size` tokens advancing by
/// `chunk_size - overlap`. Requires overlap < chunk_size.
struct ChunkingConfig {
    std::size_t chunk_size = 256;
    std::size_t overlap = 20;
    /// Emit a final chunk for any token suffix the full windows leave
    /// uncovered (and for documents shorter than one window).
    bool emit_tail = true;

    void validate() const;
};

/// One token window of a document. Token positions are 1-based inclusive.
struct Chunk {
    std::string doc_id;
    std::size_t chunk_index = 1; // 1-based within the document
    std::size_t token_start = 1;
    std::size_t token_end = 1;
    std::string text;

    std::size_t token_span() const { return token_end - token_start + 1; }

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

using ChunkSet = std::vector<Chunk>;

/// Number of full windows for a document of `total_tokens` tokens:
/// floor((N - O) / (S - O)), clamped at zero for short documents.
std::size_t full_chunk_count(std::size_t total_tokens, const ChunkingConfig& cfg);

/// Windows a single tokenized document. Full chunk i covers tokens
/// (i-1)(S-O)+1 .. (i-1)(S-O)+S; an optional tail chunk covers the remainder.
std::vector<Chunk> chunk_document(const std::string& doc_id,
                                  const TokenSequence& doc_tokens,
                                  const ChunkingConfig& cfg);

/// Chunks every (doc_id, text) pair in corpus order and concatenates the
/// results. Duplicate doc_ids are an error.
ChunkSet chunk_corpus(const std::vector<std::pair<std::string, std::string>>& texts,
                      const ChunkingConfig& cfg);

/// json-lines chunk serialization: {doc_id, index, start, end, text} per line.
void save_chunks(const ChunkSet& chunks, const std::filesystem::path& path);
ChunkSet load_chunks(const std::filesystem::path& path);

} // namespace k2rag
