#include "k2rag/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "k2rag/error.hpp"
#include "k2rag/tokenizer.hpp"

namespace k2rag {

namespace {

constexpr const char* kFormatTag = "k2rag.sparse";
constexpr int kFormatVersion = 1;

std::vector<std::string> index_terms(const std::string& text) {
    auto tokens = tokenize(text).tokens;
    for (auto& t : tokens) t = ascii_lower(std::move(t));
    return tokens;
}

} // namespace

void sort_ranked(std::vector<ScoredChunk>& ranked, const ChunkSet& chunks) {
    std::sort(ranked.begin(), ranked.end(), [&](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        const Chunk& ca = chunks[a.ref];
        const Chunk& cb = chunks[b.ref];
        if (ca.doc_id != cb.doc_id) return ca.doc_id < cb.doc_id;
        return ca.chunk_index < cb.chunk_index;
    });
}

SparseIndex build_sparse(const ChunkSet& chunks, double k1, double b) {
    SparseIndex index;
    index.chunks = chunks;
    index.k1 = k1;
    index.b = b;
    index.doc_lengths.reserve(chunks.size());

    std::size_t total_len = 0;
    for (ChunkRef ref = 0; ref < chunks.size(); ++ref) {
        auto terms = index_terms(chunks[ref].text);
        index.doc_lengths.push_back(terms.size());
        total_len += terms.size();

        std::map<std::string, std::uint32_t> tf;
        for (auto& t : terms) ++tf[std::move(t)];
        for (auto& [term, freq] : tf)
            index.postings[term].push_back({ref, freq});
    }
    index.avg_doc_length =
        chunks.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(chunks.size());
    return index;
}

std::unordered_map<ChunkRef, double> sparse_scores(const SparseIndex& index,
                                                   const std::string& query) {
    std::unordered_map<ChunkRef, double> scores;
    if (index.doc_count() == 0) return scores;

    const double n = static_cast<double>(index.doc_count());
    for (const auto& term : index_terms(query)) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        const auto& plist = it->second;
        const double df = static_cast<double>(plist.size());
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        for (const auto& p : plist) {
            const double tf = static_cast<double>(p.term_frequency);
            const double len = static_cast<double>(index.doc_lengths[p.chunk]);
            const double denom =
                tf + index.k1 * (1.0 - index.b + index.b * len / index.avg_doc_length);
            scores[p.chunk] += idf * tf * (index.k1 + 1.0) / denom;
        }
    }
    return scores;
}

std::vector<ScoredChunk> sparse_top_k(const SparseIndex& index, const std::string& query,
                                      std::size_t k) {
    if (k == 0)
        throw Error(ErrorCategory::query, "top-k requires k >= 1");
    auto scores = sparse_scores(index, query);
    std::vector<ScoredChunk> ranked;
    ranked.reserve(scores.size());
    for (const auto& [ref, score] : scores) ranked.push_back({ref, score});
    sort_ranked(ranked, index.chunks);
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

void persist_sparse(const SparseIndex& index, const std::filesystem::path& path) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& c : index.chunks)
        chunks.push_back({{"doc_id", c.doc_id},
                          {"index", c.chunk_index},
                          {"start", c.token_start},
                          {"end", c.token_end},
                          {"text", c.text}});

    // Sorted-key object so files are byte-stable across runs.
    nlohmann::json postings = nlohmann::json::object();
    std::vector<std::string> terms;
    terms.reserve(index.postings.size());
    for (const auto& [term, _] : index.postings) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    for (const auto& term : terms) {
        nlohmann::json plist = nlohmann::json::array();
        for (const auto& p : index.postings.at(term))
            plist.push_back({p.chunk, p.term_frequency});
        postings[term] = std::move(plist);
    }

    nlohmann::json j{{"format", kFormatTag},
                     {"version", kFormatVersion},
                     {"k1", index.k1},
                     {"b", index.b},
                     {"avg_doc_length", index.avg_doc_length},
                     {"doc_lengths", index.doc_lengths},
                     {"chunks", std::move(chunks)},
                     {"postings", std::move(postings)}};

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open for writing: " + path.string());
    out << j.dump(1, '\t') << '\n';
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

SparseIndex load_sparse(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCategory::io, "malformed index file: " + path.string());
    if (!j.is_object() || j.value("format", "") != kFormatTag)
        throw Error(ErrorCategory::io, "not a sparse index file: " + path.string());
    if (j.value("version", -1) != kFormatVersion)
        throw Error(ErrorCategory::io,
                    "unsupported sparse index version in " + path.string());

    SparseIndex index;
    try {
        index.k1 = j.at("k1").get<double>();
        index.b = j.at("b").get<double>();
        index.avg_doc_length = j.at("avg_doc_length").get<double>();
        index.doc_lengths = j.at("doc_lengths").get<std::vector<std::size_t>>();
        for (const auto& cj : j.at("chunks")) {
            Chunk c;
            c.doc_id = cj.at("doc_id").get<std::string>();
            c.chunk_index = cj.at("index").get<std::size_t>();
            c.token_start = cj.at("start").get<std::size_t>();
            c.token_end = cj.at("end").get<std::size_t>();
            c.text = cj.at("text").get<std::string>();
            index.chunks.push_back(std::move(c));
        }
        for (const auto& [term, plist] : j.at("postings").items()) {
            auto& out = index.postings[term];
            for (const auto& p : plist) {
                SparseIndex::Posting posting;
                posting.chunk = p.at(0).get<ChunkRef>();
                posting.term_frequency = p.at(1).get<std::uint32_t>();
                if (posting.chunk >= index.chunks.size())
                    throw Error(ErrorCategory::io,
                                "posting references missing chunk in " + path.string());
                out.push_back(posting);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::io,
                    "malformed sparse index " + path.string() + ": " + e.what());
    }
    if (index.doc_lengths.size() != index.chunks.size())
        throw Error(ErrorCategory::io,
                    "inconsistent sparse index (doc_lengths vs chunks): " + path.string());
    return index;
}

} // namespace k2rag
