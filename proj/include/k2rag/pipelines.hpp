#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "k2rag/chunking.hpp"
#include "k2rag/hybrid.hpp"
#include "k2rag/knowledge_graph.hpp"
#include "k2rag/prompts.hpp"
#include "k2rag/provider.hpp"

namespace k2rag {

enum class PipelineKind { semantic, keyword, hybrid, kg, k2rag };

PipelineKind pipeline_kind_from_string(const std::string& s);
const char* to_string(PipelineKind kind);

/// λ per naive vector kind: semantic = 1, keyword = 0, hybrid = 0.8.
double lambda_for(PipelineKind kind);

struct StepRecord {
    std::string label;
    std::string input_digest;
    std::string output_digest;
    double duration_s = 0.0;
};

struct PipelineAnswer {
    std::string question;
    std::string answer;
    std::vector<StepRecord> steps;
    double total_duration_s = 0.0;
    std::vector<std::string> warnings;

    /// Deterministic identity of a run: step labels and digests plus the
    /// answer digest. Excludes wall-clock durations, so repeated mock runs
    /// are byte-identical.
    std::string trace_signature() const;

    nlohmann::json to_json() const;
};

/// Step labels, in the order the staged pipeline emits them.
namespace step {
inline constexpr const char* kRetrieve = "RETRIEVE";
inline constexpr const char* kKgQuery = "KG_QUERY";
inline constexpr const char* kKgSummary = "KG_SUMMARY";
inline constexpr const char* kSubqGen = "SUBQ_GEN";
inline constexpr const char* kHybridRetrieve = "HYBRID_RETRIEVE";
inline constexpr const char* kSubansGen = "SUBANS_GEN";
inline constexpr const char* kSubansSummary = "SUBANS_SUMMARY";
inline constexpr const char* kSubansConcatSummary = "SUBANS_CONCAT_SUMMARY";
inline constexpr const char* kFinalGen = "FINAL_GEN";
} // namespace step

/// Single-shot retrieval pipeline over the raw-corpus stores: retrieve top-k
/// (λ per kind), pass the concatenated chunks to one generation call.
PipelineAnswer answer_naive_vector(const std::string& question, PipelineKind kind,
                                   const SparseIndex& sparse, const DenseIndex& dense,
                                   const Providers& providers, const HybridConfig& cfg);

/// Naive knowledge-graph pipeline: graph query output becomes the context of
/// one generation call.
PipelineAnswer answer_naive_kg(const std::string& question, const KnowledgeGraph& kg,
                               const Providers& providers, const KgQueryOptions& kg_options);

struct K2RagConfig {
    HybridConfig hybrid;                         // λ=0.8, k=10 by default
    ChunkingConfig kg_results_chunking{128, 10}; // windows over the KG output
    KgQueryOptions kg_query;
};

/// Staged pipeline over the summarized-corpus stores: graph query, summary,
/// per-chunk sub-question decomposition with hybrid retrieval and sub-answer
/// summarization, then one final generation over the fused context.
PipelineAnswer answer_k2rag(const std::string& question, const KnowledgeGraph& kg,
                            const SparseIndex& sparse, const DenseIndex& dense,
                            const Providers& providers, const K2RagConfig& cfg);

} // namespace k2rag
