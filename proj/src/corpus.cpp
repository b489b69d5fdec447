#include "k2rag/corpus.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "k2rag/csv.hpp"
#include "k2rag/error.hpp"
#include "k2rag/stats.hpp"
#include "k2rag/tokenizer.hpp"

namespace k2rag {

namespace {

bool whitespace_only(const std::string& s) {
    return tokenize(s).empty();
}

struct RecordSink {
    const CorpusLoadOptions& options;
    Corpus docs;
    std::vector<std::string> warnings;
    std::set<std::string> seen_ids;

    void malformed(std::size_t index, const std::string& why) {
        std::string msg = "record " + std::to_string(index) + ": " + why;
        if (!options.skip_malformed)
            throw Error(ErrorCategory::ingest, msg);
        warnings.push_back("skipped " + msg);
    }

    void add(std::size_t index, std::string id, std::string title, std::string body,
             std::map<std::string, std::string> meta) {
        if (whitespace_only(body)) {
            malformed(index, "missing or empty '" + options.body_field + "' field");
            return;
        }
        if (id.empty()) {
            id = "doc-" + std::to_string(index);
            warnings.push_back("record " + std::to_string(index) +
                               ": no id field, assigned " + id);
        }
        if (!seen_ids.insert(id).second) {
            malformed(index, "duplicate id '" + id + "'");
            return;
        }
        docs.push_back(Document{std::move(id), std::move(title), std::move(body),
                                std::move(meta)});
    }

    void add_json(std::size_t index, const nlohmann::json& j) {
        if (!j.is_object()) {
            malformed(index, "not a JSON object");
            return;
        }
        auto get_str = [&](const std::string& key) -> std::string {
            auto it = j.find(key);
            if (it == j.end()) return "";
            if (it->is_string()) return it->get<std::string>();
            return it->dump();
        };
        std::map<std::string, std::string> meta;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == options.id_field || it.key() == options.title_field ||
                it.key() == options.body_field)
                continue;
            meta[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
        }
        add(index, get_str(options.id_field), get_str(options.title_field),
            get_str(options.body_field), std::move(meta));
    }
};

} // namespace

CorpusFormat corpus_format_from_string(const std::string& s) {
    if (s == "json-array") return CorpusFormat::json_array;
    if (s == "json-lines" || s == "jsonl") return CorpusFormat::json_lines;
    if (s == "csv") return CorpusFormat::csv;
    throw Error(ErrorCategory::config, "unknown corpus format: " + s);
}

const char* to_string(CorpusFormat f) {
    switch (f) {
    case CorpusFormat::json_array: return "json-array";
    case CorpusFormat::json_lines: return "json-lines";
    case CorpusFormat::csv: return "csv";
    }
    return "json-lines";
}

LoadedCorpus load_corpus(const std::filesystem::path& path, const CorpusLoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::ingest, "cannot read corpus file: " + path.string());

    RecordSink sink{options, {}, {}, {}};

    switch (options.format) {
    case CorpusFormat::json_lines: {
        std::string line;
        std::size_t index = 0;
        while (std::getline(in, line)) {
            if (whitespace_only(line)) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                sink.malformed(index, "invalid JSON");
            } else {
                sink.add_json(index, j);
            }
            ++index;
        }
        break;
    }
    case CorpusFormat::json_array: {
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (whitespace_only(text)) break; // empty file, warning below
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_array())
            throw Error(ErrorCategory::ingest,
                        "corpus file is not a JSON array: " + path.string());
        std::size_t index = 0;
        for (const auto& rec : j) sink.add_json(index++, rec);
        break;
    }
    case CorpusFormat::csv: {
        in.close();
        auto rows = csv::parse_file(path);
        if (rows.empty()) break;
        const auto& header = rows.front();
        auto column = [&](const std::string& name) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i] == name) return i;
            return std::nullopt;
        };
        auto id_col = column(options.id_field);
        auto title_col = column(options.title_field);
        auto body_col = column(options.body_field);
        if (!body_col)
            throw Error(ErrorCategory::ingest, "csv corpus missing required column '" +
                                                   options.body_field + "'");
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            std::size_t index = r - 1;
            auto cell = [&](std::optional<std::size_t> col) -> std::string {
                if (!col || *col >= row.size()) return "";
                return row[*col];
            };
            std::map<std::string, std::string> meta;
            for (std::size_t c = 0; c < header.size() && c < row.size(); ++c) {
                if ((id_col && c == *id_col) || (title_col && c == *title_col) ||
                    c == *body_col)
                    continue;
                meta[header[c]] = row[c];
            }
            sink.add(index, cell(id_col), cell(title_col), cell(body_col), std::move(meta));
        }
        break;
    }
    }

    if (sink.docs.empty() && sink.warnings.empty())
        sink.warnings.push_back("corpus file yielded no documents: " + path.string());
    return LoadedCorpus{std::move(sink.docs), std::move(sink.warnings)};
}

double SummarizedDocument::reduction_ratio() const {
    if (original_token_count == 0) return 0.0;
    return 1.0 - static_cast<double>(summary_token_count) /
                     static_cast<double>(original_token_count);
}

SummarizeResult summarize_corpus(const Corpus& corpus, Provider& summarizer,
                                 const SummarizeOptions& options) {
    struct Slot {
        std::optional<SummarizedDocument> doc;
        std::optional<SummarizeResult::Failure> failure;
    };
    std::vector<Slot> slots(corpus.size());

    auto work = [&](std::size_t i) {
        const Document& doc = corpus[i];
        try {
            std::string summary = summarizer.summarize(doc.body);
            SummarizedDocument sd;
            sd.source_id = doc.id;
            sd.summary = std::move(summary);
            sd.original_token_count = token_count(doc.body);
            sd.summary_token_count = token_count(sd.summary);
            slots[i].doc = std::move(sd);
        } catch (const std::exception& e) {
            slots[i].failure = SummarizeResult::Failure{doc.id, e.what()};
        }
    };

    std::size_t workers = std::max<std::size_t>(1, options.parallelism);
    if (workers == 1 || corpus.size() <= 1) {
        for (std::size_t i = 0; i < corpus.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        workers = std::min(workers, corpus.size());
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < corpus.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    SummarizeResult result;
    for (auto& slot : slots) {
        if (slot.doc) result.summaries.push_back(std::move(*slot.doc));
        if (slot.failure) result.failures.push_back(std::move(*slot.failure));
    }
    return result;
}

void save_summarized(const std::vector<SummarizedDocument>& docs,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open for writing: " + path.string());
    csv::write_row(out, {"source_id", "summary", "original_token_count",
                         "summary_token_count"});
    for (const auto& d : docs)
        csv::write_row(out, {d.source_id, d.summary, std::to_string(d.original_token_count),
                             std::to_string(d.summary_token_count)});
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

std::vector<SummarizedDocument> load_summarized(const std::filesystem::path& path) {
    auto rows = csv::parse_file(path);
    if (rows.empty())
        throw Error(ErrorCategory::io, "summarized corpus file is empty: " + path.string());
    const std::vector<std::string> expected{"source_id", "summary", "original_token_count",
                                            "summary_token_count"};
    if (rows.front() != expected)
        throw Error(ErrorCategory::io,
                    "unexpected summarized corpus header in " + path.string());
    std::vector<SummarizedDocument> docs;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 4)
            throw Error(ErrorCategory::io, "malformed row " + std::to_string(r + 1) + " in " +
                                               path.string() + ": expected 4 columns, got " +
                                               std::to_string(row.size()));
        SummarizedDocument d;
        d.source_id = row[0];
        d.summary = row[1];
        try {
            d.original_token_count = std::stoull(row[2]);
            d.summary_token_count = std::stoull(row[3]);
        } catch (const std::exception&) {
            throw Error(ErrorCategory::io, "malformed token count in row " +
                                               std::to_string(r + 1) + " in " + path.string());
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

ReductionStats reduction_stats(const Corpus& corpus,
                               const std::vector<SummarizedDocument>& summarized) {
    if (corpus.size() != summarized.size())
        throw Error(ErrorCategory::eval,
                    "corpus/summary alignment mismatch: " + std::to_string(corpus.size()) +
                        " documents vs " + std::to_string(summarized.size()) + " summaries");
    ReductionStats stats;
    stats.per_document_ratio.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].id != summarized[i].source_id)
            throw Error(ErrorCategory::eval, "alignment mismatch at position " +
                                                 std::to_string(i) + ": document '" +
                                                 corpus[i].id + "' vs summary '" +
                                                 summarized[i].source_id + "'");
        stats.per_document_ratio.push_back(summarized[i].reduction_ratio());
    }
    if (!stats.per_document_ratio.empty()) {
        stats.mean_ratio = stats::mean(stats.per_document_ratio);
        auto sorted = stats.per_document_ratio;
        std::sort(sorted.begin(), sorted.end());
        stats.q1 = stats::quantile_sorted(sorted, 0.25);
        stats.median = stats::quantile_sorted(sorted, 0.5);
        stats.q3 = stats::quantile_sorted(sorted, 0.75);
    }
    return stats;
}

} // namespace k2rag
