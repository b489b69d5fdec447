#include "k2rag/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "k2rag/error.hpp"

namespace k2rag {

namespace {

constexpr const char* kFormatTag = "k2rag.dense";
constexpr int kFormatVersion = 1;

} // namespace

DenseIndex build_dense(const ChunkSet& chunks, Provider& embedder) {
    DenseIndex index;
    index.chunks = chunks;
    index.embedder_id = embedder.id();
    index.embeddings.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        std::vector<double> vec = embedder.embed(chunks[i].text);
        if (index.dim == 0) {
            index.dim = vec.size();
            if (index.dim == 0)
                throw Error(ErrorCategory::index,
                            "embedder returned an empty vector for chunk " +
                                chunks[i].doc_id + "#" + std::to_string(chunks[i].chunk_index));
        } else if (vec.size() != index.dim) {
            throw Error(ErrorCategory::index,
                        "inconsistent embedding dimension for chunk " + chunks[i].doc_id + "#" +
                            std::to_string(chunks[i].chunk_index) + ": got " +
                            std::to_string(vec.size()) + ", expected " +
                            std::to_string(index.dim));
        }
        index.embeddings.push_back(std::move(vec));
    }
    return index;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw Error(ErrorCategory::query, "cosine dimension mismatch: " +
                                              std::to_string(a.size()) + " vs " +
                                              std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> dense_scores(const DenseIndex& index, const std::vector<double>& query_vec) {
    if (!index.chunks.empty() && query_vec.size() != index.dim)
        throw Error(ErrorCategory::query,
                    "query vector dimension " + std::to_string(query_vec.size()) +
                        " does not match index dimension " + std::to_string(index.dim));
    std::vector<double> scores;
    scores.reserve(index.embeddings.size());
    for (const auto& vec : index.embeddings) scores.push_back(cosine(query_vec, vec));
    return scores;
}

std::vector<ScoredChunk> dense_top_k(const DenseIndex& index,
                                     const std::vector<double>& query_vec, std::size_t k) {
    if (k == 0)
        throw Error(ErrorCategory::query, "top-k requires k >= 1");
    auto scores = dense_scores(index, query_vec);
    std::vector<ScoredChunk> ranked;
    ranked.reserve(scores.size());
    for (ChunkRef ref = 0; ref < scores.size(); ++ref) ranked.push_back({ref, scores[ref]});
    sort_ranked(ranked, index.chunks);
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

void persist_dense(const DenseIndex& index, const std::filesystem::path& path) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < index.chunks.size(); ++i) {
        const Chunk& c = index.chunks[i];
        entries.push_back({{"doc_id", c.doc_id},
                           {"index", c.chunk_index},
                           {"start", c.token_start},
                           {"end", c.token_end},
                           {"text", c.text},
                           {"embedding", index.embeddings[i]}});
    }
    nlohmann::json j{{"format", kFormatTag},
                     {"version", kFormatVersion},
                     {"dim", index.dim},
                     {"embedder_id", index.embedder_id},
                     {"entries", std::move(entries)}};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open for writing: " + path.string());
    out << j.dump(1, '\t') << '\n';
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

DenseIndex load_dense(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCategory::io, "malformed index file: " + path.string());
    if (!j.is_object() || j.value("format", "") != kFormatTag)
        throw Error(ErrorCategory::io, "not a dense index file: " + path.string());
    if (j.value("version", -1) != kFormatVersion)
        throw Error(ErrorCategory::io, "unsupported dense index version in " + path.string());

    DenseIndex index;
    try {
        index.dim = j.at("dim").get<std::size_t>();
        index.embedder_id = j.at("embedder_id").get<std::string>();
        for (const auto& e : j.at("entries")) {
            Chunk c;
            c.doc_id = e.at("doc_id").get<std::string>();
            c.chunk_index = e.at("index").get<std::size_t>();
            c.token_start = e.at("start").get<std::size_t>();
            c.token_end = e.at("end").get<std::size_t>();
            c.text = e.at("text").get<std::string>();
            auto vec = e.at("embedding").get<std::vector<double>>();
            if (vec.size() != index.dim)
                throw Error(ErrorCategory::io,
                            "entry dimension mismatch in " + path.string());
            index.chunks.push_back(std::move(c));
            index.embeddings.push_back(std::move(vec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::io,
                    "malformed dense index " + path.string() + ": " + e.what());
    }
    return index;
}

} // namespace k2rag
