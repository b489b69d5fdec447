#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "k2rag/provider.hpp"

namespace k2rag {

/// One raw corpus unit (an article).
struct Document {
    std::string id;
    std::string title;
    std::string body;
    std::map<std::string, std::string> source_meta;

    friend bool operator==(const Document&, const Document&) = default;
};

using Corpus = std::vector<Document>;

struct SummarizedDocument {
    std::string source_id;
    std::string summary;
    std::size_t original_token_count = 0;
    std::size_t summary_token_count = 0;

    /// 1 - summary_tokens / original_tokens. Negative when a summarizer
    /// expands a pathological input; always recorded.
    double reduction_ratio() const;

    friend bool operator==(const SummarizedDocument&, const SummarizedDocument&) = default;
};

enum class CorpusFormat { json_array, json_lines, csv };

CorpusFormat corpus_format_from_string(const std::string& s);
const char* to_string(CorpusFormat f);

struct CorpusLoadOptions {
    CorpusFormat format = CorpusFormat::json_lines;
    bool skip_malformed = false;
    std::string id_field = "id";
    std::string title_field = "title";
    std::string body_field = "body";
};

struct LoadedCorpus {
    Corpus docs;
    std::vector<std::string> warnings;
};

/// Ingests a corpus file, preserving record order. Malformed records are
/// skipped with a warning or abort the load, per options.
LoadedCorpus load_corpus(const std::filesystem::path& path, const CorpusLoadOptions& options);

struct SummarizeOptions {
    std::size_t parallelism = 1;
};

struct SummarizeResult {
    std::vector<SummarizedDocument> summaries; // corpus order, failures removed
    struct Failure {
        std::string doc_id;
        std::string error;
    };
    std::vector<Failure> failures;
};

/// Runs the summarizer over every document; failures are recorded, never
/// silently dropped. May fan out provider calls; output order always
/// matches input order.
SummarizeResult summarize_corpus(const Corpus& corpus, Provider& summarizer,
                                 const SummarizeOptions& options = {});

/// CSV persistence: header source_id,summary,original_token_count,summary_token_count.
void save_summarized(const std::vector<SummarizedDocument>& docs,
                     const std::filesystem::path& path);
std::vector<SummarizedDocument> load_summarized(const std::filesystem::path& path);

struct ReductionStats {
    std::vector<double> per_document_ratio;
    double mean_ratio = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Size-reduction statistics across a corpus/summary pair aligned 1:1 by id.
ReductionStats reduction_stats(const Corpus& corpus,
                               const std::vector<SummarizedDocument>& summarized);

} // namespace k2rag
