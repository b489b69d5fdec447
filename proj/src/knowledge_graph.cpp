#include "k2rag/knowledge_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>

#include <json.hpp>

#include "k2rag/dense_index.hpp"
#include "k2rag/error.hpp"
#include "k2rag/prompts.hpp"
#include "k2rag/tokenizer.hpp"

namespace k2rag {

namespace {

constexpr const char* kFormatTag = "k2rag.kg";
constexpr int kFormatVersion = 1;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string canonical_name(const std::string& s) {
    return ascii_lower(trim(s));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_pipes(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find('|', start);
        if (end == std::string::npos) {
            parts.push_back(line.substr(start));
            break;
        }
        parts.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

std::string entity_embedding_text(const Entity& e) {
    if (e.description.empty()) return e.name;
    return e.name + ": " + e.description;
}

void append_description(std::string& target, const std::string& piece, std::size_t cap) {
    if (piece.empty()) return;
    if (target.find(piece) != std::string::npos) return; // exact duplicate
    if (target.size() >= cap) return;
    if (!target.empty()) target += "; ";
    target += piece;
    if (target.size() > cap) target.resize(cap);
}

} // namespace

std::string build_extraction_prompt(const std::string& chunk_text) {
    return "Instruction: Extract factual relationships from the text below. Write one "
           "relationship per line in exactly this format and output nothing else:\n"
           "subject | predicate | object | description\n\n"
           "Text:\n" +
           chunk_text + "\n\nRelationships:";
}

ExtractionResult extract_triples(const Chunk& chunk, ChunkRef ref, Provider& llm) {
    GenerationRequest req;
    req.prompt = build_extraction_prompt(chunk.text);
    req.max_tokens = 1024;
    std::string response = llm.generate(req);

    ExtractionResult result;
    for (const auto& raw_line : split_lines(response)) {
        std::string line = trim(raw_line);
        if (line.empty()) continue;
        auto parts = split_pipes(line);
        if (parts.size() != 4) {
            ++result.dropped_lines;
            continue;
        }
        Relation rel;
        rel.subject = canonical_name(parts[0]);
        rel.predicate = trim(parts[1]);
        rel.object = canonical_name(parts[2]);
        rel.description = trim(parts[3]);
        rel.source_chunk = ref;
        if (rel.subject.empty() || rel.predicate.empty() || rel.object.empty()) {
            ++result.dropped_lines;
            continue;
        }
        result.relations.push_back(std::move(rel));
    }
    return result;
}

KnowledgeGraph build_graph(const ChunkSet& chunks, Provider& llm, Provider& embedder,
                           const GraphBuildOptions& options, GraphBuildReport* report) {
    KnowledgeGraph kg;
    kg.embedder_id = embedder.id();
    GraphBuildReport local;
    GraphBuildReport& rep = report ? *report : local;

    auto touch_entity = [&](const std::string& name, const std::string& description,
                            ChunkRef ref) {
        Entity& e = kg.entities[name];
        e.name = name;
        append_description(e.description, description, options.max_description_chars);
        e.source_chunks.insert(ref);
    };

    for (ChunkRef ref = 0; ref < chunks.size(); ++ref) {
        ++rep.chunks_processed;
        ExtractionResult extracted;
        try {
            extracted = extract_triples(chunks[ref], ref, llm);
        } catch (const std::exception& e) {
            ++rep.chunks_failed;
            rep.failures.push_back(chunks[ref].doc_id + "#" +
                                   std::to_string(chunks[ref].chunk_index) + ": " + e.what());
            continue;
        }
        rep.dropped_lines += extracted.dropped_lines;
        for (auto& rel : extracted.relations) {
            touch_entity(rel.subject, rel.description, ref);
            touch_entity(rel.object, rel.description, ref);
            std::size_t idx = kg.relations.size();
            kg.adjacency[rel.subject].push_back(idx);
            if (rel.object != rel.subject) kg.adjacency[rel.object].push_back(idx);
            kg.relations.push_back(std::move(rel));
            ++rep.relations_added;
        }
    }

    for (auto& [name, entity] : kg.entities)
        entity.embedding = embedder.embed(entity_embedding_text(entity));
    return kg;
}

namespace {

struct ContextItem {
    double relevance = 0.0;
    int kind = 0; // 0 = entity, 1 = relation; entities sort first on ties
    std::string order_key;
    std::string line;
};

} // namespace

std::string assemble_graph_context(const std::string& question, const KnowledgeGraph& kg,
                                   Provider& embedder, const KgQueryOptions& options) {
    if (kg.empty()) return "";
    std::vector<double> qvec = embedder.embed(question);

    // Score every entity against the question.
    std::map<std::string, double> score;
    for (const auto& [name, entity] : kg.entities)
        score[name] = cosine(qvec, entity.embedding);

    // Top-E seeds by (score desc, name asc); selection is unconditional.
    std::vector<std::string> names;
    names.reserve(kg.entities.size());
    for (const auto& [name, _] : kg.entities) names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    if (names.size() > options.seed_entities) names.resize(options.seed_entities);

    // H-hop breadth-first expansion over the relation adjacency.
    std::map<std::string, std::size_t> hop;
    std::queue<std::string> frontier;
    for (const auto& n : names) {
        hop[n] = 0;
        frontier.push(n);
    }
    while (!frontier.empty()) {
        std::string current = frontier.front();
        frontier.pop();
        std::size_t d = hop[current];
        if (d >= options.hops) continue;
        auto adj = kg.adjacency.find(current);
        if (adj == kg.adjacency.end()) continue;
        for (std::size_t rel_idx : adj->second) {
            const Relation& rel = kg.relations[rel_idx];
            for (const std::string* other : {&rel.subject, &rel.object}) {
                if (*other == current) continue;
                if (hop.emplace(*other, d + 1).second) frontier.push(*other);
            }
        }
    }

    std::vector<ContextItem> items;
    for (const auto& [name, _] : hop) {
        const Entity& e = kg.entities.at(name);
        ContextItem item;
        item.relevance = score[name];
        item.kind = 0;
        item.order_key = name;
        item.line = e.description.empty() ? e.name : e.name + ": " + e.description;
        items.push_back(std::move(item));
    }
    for (std::size_t idx = 0; idx < kg.relations.size(); ++idx) {
        const Relation& rel = kg.relations[idx];
        if (!hop.count(rel.subject) || !hop.count(rel.object)) continue;
        ContextItem item;
        item.relevance = std::max(score[rel.subject], score[rel.object]);
        item.kind = 1;
        item.order_key = std::to_string(idx);
        item.line = rel.subject + " " + rel.predicate + " " + rel.object;
        if (!rel.description.empty()) item.line += ": " + rel.description;
        items.push_back(std::move(item));
    }

    std::sort(items.begin(), items.end(), [](const ContextItem& a, const ContextItem& b) {
        if (a.relevance != b.relevance) return a.relevance > b.relevance;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.order_key < b.order_key;
    });

    // Budget cut: keep the highest-relevance prefix that fits.
    std::string context;
    std::size_t used_tokens = 0;
    std::set<std::string> seen_lines;
    for (const auto& item : items) {
        if (!seen_lines.insert(item.line).second) continue;
        std::size_t cost = token_count(item.line);
        if (used_tokens + cost > options.token_budget) break;
        used_tokens += cost;
        if (!context.empty()) context.push_back('\n');
        context += item.line;
    }
    return context;
}

std::string query_graph(const std::string& question, const KnowledgeGraph& kg,
                        Provider& embedder, Provider& llm, const KgQueryOptions& options) {
    std::string context = assemble_graph_context(question, kg, embedder, options);
    GenerationRequest req;
    req.prompt = build_generation_prompt(context, question);
    req.max_tokens = 1024;
    return llm.generate(req);
}

void persist_graph(const KnowledgeGraph& kg, const std::filesystem::path& path) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& [name, e] : kg.entities) {
        entities.push_back({{"name", name},
                            {"description", e.description},
                            {"embedding", e.embedding},
                            {"source_chunks", std::vector<ChunkRef>(e.source_chunks.begin(),
                                                                    e.source_chunks.end())}});
    }
    nlohmann::json relations = nlohmann::json::array();
    for (const auto& r : kg.relations)
        relations.push_back({{"subject", r.subject},
                             {"predicate", r.predicate},
                             {"object", r.object},
                             {"description", r.description},
                             {"source_chunk", r.source_chunk}});
    nlohmann::json j{{"format", kFormatTag},
                     {"version", kFormatVersion},
                     {"embedder_id", kg.embedder_id},
                     {"entities", std::move(entities)},
                     {"relations", std::move(relations)}};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open for writing: " + path.string());
    out << j.dump(1, '\t') << '\n';
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

KnowledgeGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCategory::io, "malformed graph file: " + path.string());
    if (!j.is_object() || j.value("format", "") != kFormatTag)
        throw Error(ErrorCategory::io, "not a knowledge graph file: " + path.string());
    if (j.value("version", -1) != kFormatVersion)
        throw Error(ErrorCategory::io, "unsupported graph version in " + path.string());

    KnowledgeGraph kg;
    try {
        kg.embedder_id = j.at("embedder_id").get<std::string>();
        for (const auto& ej : j.at("entities")) {
            Entity e;
            e.name = ej.at("name").get<std::string>();
            e.description = ej.at("description").get<std::string>();
            e.embedding = ej.at("embedding").get<std::vector<double>>();
            for (const auto& c : ej.at("source_chunks"))
                e.source_chunks.insert(c.get<ChunkRef>());
            kg.entities[e.name] = std::move(e);
        }
        for (const auto& rj : j.at("relations")) {
            Relation r;
            r.subject = rj.at("subject").get<std::string>();
            r.predicate = rj.at("predicate").get<std::string>();
            r.object = rj.at("object").get<std::string>();
            r.description = rj.at("description").get<std::string>();
            r.source_chunk = rj.at("source_chunk").get<ChunkRef>();
            if (!kg.entities.count(r.subject) || !kg.entities.count(r.object))
                throw Error(ErrorCategory::io,
                            "relation references missing entity in " + path.string());
            std::size_t idx = kg.relations.size();
            kg.adjacency[r.subject].push_back(idx);
            if (r.object != r.subject) kg.adjacency[r.object].push_back(idx);
            kg.relations.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::io, "malformed graph " + path.string() + ": " + e.what());
    }
    return kg;
}

} // namespace k2rag
