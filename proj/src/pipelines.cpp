#include "k2rag/pipelines.hpp"

#include <chrono>

#include "k2rag/error.hpp"
#include "k2rag/hash.hpp"

namespace k2rag {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects step records and timings for one pipeline invocation.
class Trace {
public:
    explicit Trace(PipelineAnswer& answer) : answer_(answer), start_(Clock::now()) {}

    template <typename Fn>
    std::string step(const char* label, const std::string& input, Fn&& fn) {
        Clock::time_point t0 = Clock::now();
        std::string output;
        try {
            output = fn();
        } catch (const Error& e) {
            throw Error(e.category(), std::string(label) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCategory::query, std::string(label) + ": " + e.what());
        }
        answer_.steps.push_back(
            {label, hex_digest(input), hex_digest(output), seconds_since(t0)});
        return output;
    }

    void finish() { answer_.total_duration_s = seconds_since(start_); }

    std::size_t checkpoint() const { return answer_.steps.size(); }
    void rollback(std::size_t mark) { answer_.steps.resize(mark); }

private:
    PipelineAnswer& answer_;
    Clock::time_point start_;
};

std::string join_blank_separated(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "\n\n";
        out += p;
    }
    return out;
}

std::string concat_chunk_texts(const std::vector<RankedChunk>& ranked) {
    std::vector<std::string> texts;
    texts.reserve(ranked.size());
    for (const auto& r : ranked) texts.push_back(r.chunk.text);
    return join_blank_separated(texts);
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

PipelineKind pipeline_kind_from_string(const std::string& s) {
    if (s == "semantic") return PipelineKind::semantic;
    if (s == "keyword") return PipelineKind::keyword;
    if (s == "hybrid") return PipelineKind::hybrid;
    if (s == "kg") return PipelineKind::kg;
    if (s == "k2rag") return PipelineKind::k2rag;
    throw Error(ErrorCategory::config, "unknown pipeline kind: " + s);
}

const char* to_string(PipelineKind kind) {
    switch (kind) {
    case PipelineKind::semantic: return "semantic";
    case PipelineKind::keyword: return "keyword";
    case PipelineKind::hybrid: return "hybrid";
    case PipelineKind::kg: return "kg";
    case PipelineKind::k2rag: return "k2rag";
    }
    return "k2rag";
}

double lambda_for(PipelineKind kind) {
    switch (kind) {
    case PipelineKind::semantic: return 1.0;
    case PipelineKind::keyword: return 0.0;
    case PipelineKind::hybrid: return 0.8;
    default:
        throw Error(ErrorCategory::config,
                    std::string(to_string(kind)) + " is not a naive vector pipeline");
    }
}

std::string PipelineAnswer::trace_signature() const {
    std::string out;
    for (const auto& s : steps)
        out += s.label + " " + s.input_digest + " " + s.output_digest + "\n";
    out += "answer " + hex_digest(answer) + "\n";
    return out;
}

nlohmann::json PipelineAnswer::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const auto& s : steps)
        steps_json.push_back({{"label", s.label},
                              {"input_digest", s.input_digest},
                              {"output_digest", s.output_digest},
                              {"duration_s", s.duration_s}});
    return nlohmann::json{{"question", question},
                          {"answer", answer},
                          {"total_duration_s", total_duration_s},
                          {"steps", std::move(steps_json)},
                          {"warnings", warnings}};
}

PipelineAnswer answer_naive_vector(const std::string& question, PipelineKind kind,
                                   const SparseIndex& sparse, const DenseIndex& dense,
                                   const Providers& providers, const HybridConfig& cfg) {
    HybridConfig effective = cfg;
    effective.lambda = lambda_for(kind);

    PipelineAnswer answer;
    answer.question = question;
    Trace trace(answer);

    std::string context = trace.step(step::kRetrieve, question, [&] {
        return concat_chunk_texts(
            hybrid_top_k(question, sparse, dense, *providers.embedder, effective));
    });

    answer.answer = trace.step(step::kFinalGen, build_generation_prompt(context, question), [&] {
        GenerationRequest req;
        req.prompt = build_generation_prompt(context, question);
        return providers.generator->generate(req);
    });
    trace.finish();
    return answer;
}

PipelineAnswer answer_naive_kg(const std::string& question, const KnowledgeGraph& kg,
                               const Providers& providers, const KgQueryOptions& kg_options) {
    PipelineAnswer answer;
    answer.question = question;
    Trace trace(answer);

    std::string kg_output = trace.step(step::kKgQuery, question, [&] {
        return query_graph(question, kg, *providers.embedder, *providers.generator, kg_options);
    });

    answer.answer =
        trace.step(step::kFinalGen, build_generation_prompt(kg_output, question), [&] {
            GenerationRequest req;
            req.prompt = build_generation_prompt(kg_output, question);
            return providers.generator->generate(req);
        });
    trace.finish();
    return answer;
}

PipelineAnswer answer_k2rag(const std::string& question, const KnowledgeGraph& kg,
                            const SparseIndex& sparse, const DenseIndex& dense,
                            const Providers& providers, const K2RagConfig& cfg) {
    cfg.hybrid.validate();
    cfg.kg_results_chunking.validate();

    PipelineAnswer answer;
    answer.question = question;
    Trace trace(answer);

    // (A) Knowledge graph results for the user question.
    std::string kg_output = trace.step(step::kKgQuery, question, [&] {
        return query_graph(question, kg, *providers.embedder, *providers.generator,
                           cfg.kg_query);
    });

    // (B) Summarize the graph output. An empty output skips the provider call
    // but still records the step so the trace shape is invariant.
    std::string kg_summary = trace.step(step::kKgSummary, kg_output, [&] {
        if (blank(kg_output)) return std::string();
        return providers.summarizer->summarize(kg_output);
    });

    // (C)+(D) Chunk the raw graph output; one sub-question per chunk, hybrid
    // retrieval, sub-answer generation, sub-answer summarization.
    auto kg_chunks = chunk_document("kg-output", tokenize(kg_output), cfg.kg_results_chunking);
    std::vector<std::string> summarized_subanswers;
    for (const auto& chunk : kg_chunks) {
        std::size_t mark = trace.checkpoint();
        try {
            std::string subq =
                trace.step(step::kSubqGen, build_question_prompt(chunk.text), [&] {
                    GenerationRequest req;
                    req.prompt = build_question_prompt(chunk.text);
                    return providers.generator->generate(req);
                });
            std::string sub_context = trace.step(step::kHybridRetrieve, subq, [&] {
                return concat_chunk_texts(
                    hybrid_top_k(subq, sparse, dense, *providers.embedder, cfg.hybrid));
            });
            std::string subans = trace.step(
                step::kSubansGen, build_generation_prompt(sub_context, subq), [&] {
                    GenerationRequest req;
                    req.prompt = build_generation_prompt(sub_context, subq);
                    return providers.generator->generate(req);
                });
            std::string subans_summary = trace.step(step::kSubansSummary, subans, [&] {
                if (blank(subans)) return std::string();
                return providers.summarizer->summarize(subans);
            });
            summarized_subanswers.push_back(std::move(subans_summary));
        } catch (const std::exception& e) {
            // One flaky sub-answer must not void the whole answer: drop this
            // chunk's partial steps so the trace stays pattern-conformant.
            trace.rollback(mark);
            answer.warnings.push_back("sub-question chunk " +
                                      std::to_string(chunk.chunk_index) + " skipped: " +
                                      e.what());
        }
    }

    std::string subanswer_concat = join_blank_separated(summarized_subanswers);
    std::string subanswer_context =
        trace.step(step::kSubansConcatSummary, subanswer_concat, [&] {
            if (blank(subanswer_concat)) return std::string();
            return providers.summarizer->summarize(subanswer_concat);
        });

    // (E) Final generation over graph summary + summarized sub-answers, with
    // the original user question.
    std::string full_context;
    if (!kg_summary.empty() && !subanswer_context.empty())
        full_context = kg_summary + "\n\n" + subanswer_context;
    else
        full_context = kg_summary + subanswer_context;

    answer.answer =
        trace.step(step::kFinalGen, build_generation_prompt(full_context, question), [&] {
            GenerationRequest req;
            req.prompt = build_generation_prompt(full_context, question);
            return providers.generator->generate(req);
        });
    trace.finish();
    return answer;
}

} // namespace k2rag
