#include "k2rag/chunking.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "k2rag/error.hpp"

namespace k2rag {

void ChunkingConfig::validate() const {
    if (chunk_size == 0)
        throw Error(ErrorCategory::config, "chunk_size must be positive");
    if (overlap >= chunk_size)
        throw Error(ErrorCategory::config,
                    "overlap (" + std::to_string(overlap) + ") must be smaller than chunk_size (" +
                        std::to_string(chunk_size) + ")");
}

std::size_t full_chunk_count(std::size_t total_tokens, const ChunkingConfig& cfg) {
    cfg.validate();
    if (total_tokens < cfg.chunk_size) return 0;
    return (total_tokens - cfg.overlap) / (cfg.chunk_size - cfg.overlap);
}

std::vector<Chunk> chunk_document(const std::string& doc_id,
                                  const TokenSequence& doc_tokens,
                                  const ChunkingConfig& cfg) {
    cfg.validate();
    const std::size_t n = doc_tokens.size();
    const std::size_t stride = cfg.chunk_size - cfg.overlap;
    const std::size_t full = full_chunk_count(n, cfg);

    std::vector<Chunk> chunks;
    chunks.reserve(full + 1);
    for (std::size_t i = 1; i <= full; ++i) {
        Chunk c;
        c.doc_id = doc_id;
        c.chunk_index = i;
        c.token_start = (i - 1) * stride + 1;
        c.token_end = c.token_start + cfg.chunk_size - 1;
        c.text = join_tokens(doc_tokens.tokens, c.token_start - 1, c.token_end);
        chunks.push_back(std::move(c));
    }

    if (cfg.emit_tail && n > 0) {
        const std::size_t covered = full == 0 ? 0 : (full - 1) * stride + cfg.chunk_size;
        if (covered < n) {
            Chunk tail;
            tail.doc_id = doc_id;
            tail.chunk_index = full + 1;
            tail.token_start = full * stride + 1; // keeps overlap O with the last full window
            tail.token_end = n;
            tail.text = join_tokens(doc_tokens.tokens, tail.token_start - 1, tail.token_end);
            chunks.push_back(std::move(tail));
        }
    }
    return chunks;
}

ChunkSet chunk_corpus(const std::vector<std::pair<std::string, std::string>>& texts,
                      const ChunkingConfig& cfg) {
    cfg.validate();
    std::set<std::string> seen;
    ChunkSet all;
    for (const auto& [doc_id, text] : texts) {
        if (!seen.insert(doc_id).second)
            throw Error(ErrorCategory::index, "duplicate doc_id in corpus: " + doc_id);
        auto chunks = chunk_document(doc_id, tokenize(text), cfg);
        all.insert(all.end(), std::make_move_iterator(chunks.begin()),
                   std::make_move_iterator(chunks.end()));
    }
    return all;
}

void save_chunks(const ChunkSet& chunks, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open for writing: " + path.string());
    for (const auto& c : chunks) {
        nlohmann::json j{{"doc_id", c.doc_id},
                         {"index", c.chunk_index},
                         {"start", c.token_start},
                         {"end", c.token_end},
                         {"text", c.text}};
        out << j.dump() << '\n';
    }
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

ChunkSet load_chunks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open: " + path.string());
    ChunkSet chunks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorCategory::io,
                        "malformed chunk record at line " + std::to_string(lineno) + " in " +
                            path.string());
        Chunk c;
        try {
            c.doc_id = j.at("doc_id").get<std::string>();
            c.chunk_index = j.at("index").get<std::size_t>();
            c.token_start = j.at("start").get<std::size_t>();
            c.token_end = j.at("end").get<std::size_t>();
            c.text = j.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::io, "malformed chunk record at line " +
                                               std::to_string(lineno) + ": " + e.what());
        }
        chunks.push_back(std::move(c));
    }
    return chunks;
}

} // namespace k2rag
