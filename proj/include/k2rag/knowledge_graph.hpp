#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "k2rag/chunking.hpp"
#include "k2rag/provider.hpp"
#include "k2rag/sparse_index.hpp"

namespace k2rag {

struct Entity {
    std::string name; // canonical: trimmed, lowercased
    std::string description;
    std::vector<double> embedding;
    std::set<ChunkRef> source_chunks;
};

struct Relation {
    std::string subject;
    std::string predicate;
    std::string object;
    std::string description;
    ChunkRef source_chunk = 0;

    friend bool operator==(const Relation&, const Relation&) = default;
};

struct KnowledgeGraph {
    std::map<std::string, Entity> entities;
    std::vector<Relation> relations;
    // Entity name -> indices into `relations` where it appears as subject or
    // object; sorted, deduplicated, exact inverse of the relation list.
    std::map<std::string, std::vector<std::size_t>> adjacency;
    std::string embedder_id;

    bool empty() const { return entities.empty(); }
};

/// Prompt sent to the extractor model; one pipe-delimited fact per line.
std::string build_extraction_prompt(const std::string& chunk_text);

struct ExtractionResult {
    std::vector<Relation> relations;
    std::size_t dropped_lines = 0; // lines that did not parse as a fact
};

/// Parses the extractor's delimited response. Unparseable lines are dropped
/// and counted; entity names are canonicalized (trim + lowercase).
ExtractionResult extract_triples(const Chunk& chunk, ChunkRef ref, Provider& llm);

struct GraphBuildOptions {
    std::size_t max_description_chars = 2000;
};

struct GraphBuildReport {
    std::size_t chunks_processed = 0;
    std::size_t chunks_failed = 0;
    std::size_t relations_added = 0;
    std::size_t dropped_lines = 0;
    std::vector<std::string> failures;
};

/// Extracts triples per chunk and merges entities by canonical name;
/// entity embeddings come from "name: merged description".
KnowledgeGraph build_graph(const ChunkSet& chunks, Provider& llm, Provider& embedder,
                           const GraphBuildOptions& options = {},
                           GraphBuildReport* report = nullptr);

struct KgQueryOptions {
    std::size_t seed_entities = 5;  // top-E entities by cosine against the question
    std::size_t hops = 1;           // neighborhood expansion radius
    std::size_t token_budget = 2000; // context cap; lowest-relevance items dropped first
};

/// Embeds the question, seeds on the top-E entities, expands an H-hop
/// neighborhood, assembles a budgeted context, and asks the generator for an
/// answer over it. An empty graph takes the empty-context path.
std::string query_graph(const std::string& question, const KnowledgeGraph& kg,
                        Provider& embedder, Provider& llm, const KgQueryOptions& options = {});

/// The context-assembly half of query_graph, exposed for tests.
std::string assemble_graph_context(const std::string& question, const KnowledgeGraph& kg,
                                   Provider& embedder, const KgQueryOptions& options);

void persist_graph(const KnowledgeGraph& kg, const std::filesystem::path& path);
KnowledgeGraph load_graph(const std::filesystem::path& path);

} // namespace k2rag
