#include "k2rag/provider.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "k2rag/error.hpp"
#include "k2rag/hash.hpp"
#include "k2rag/tokenizer.hpp"

namespace k2rag {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

constexpr const char* kSummarizeInstruction =
    "Summarize the following text concisely, preserving key facts.\n\n";

} // namespace

const char* to_string(Capability c) {
    switch (c) {
    case Capability::generate: return "generate";
    case Capability::embed: return "embed";
    case Capability::summarize: return "summarize";
    }
    return "generate";
}

Capability capability_from_string(const std::string& s) {
    if (s == "generate") return Capability::generate;
    if (s == "embed") return Capability::embed;
    if (s == "summarize") return Capability::summarize;
    throw Error(ErrorCategory::config, "unknown capability: " + s);
}

void ProviderConfig::validate() const {
    if (timeout_s <= 0)
        throw Error(ErrorCategory::config, "provider timeout must be positive");
    if (max_retries < 0)
        throw Error(ErrorCategory::config, "provider max_retries must be >= 0");
}

Provider::Provider(ProviderConfig cfg) : config_(std::move(cfg)) {
    config_.validate();
}

std::string Provider::generate(const GenerationRequest& req) {
    if (config_.capability != Capability::generate)
        throw Error(ErrorCategory::provider,
                    std::string("generate called on a ") + to_string(config_.capability) +
                        " provider");
    if (req.prompt.empty())
        throw Error(ErrorCategory::provider, "empty prompt rejected");
    return do_generate(req);
}

std::vector<double> Provider::embed(const std::string& text) {
    if (config_.capability != Capability::embed)
        throw Error(ErrorCategory::provider,
                    std::string("embed called on a ") + to_string(config_.capability) +
                        " provider");
    if (text.empty())
        throw Error(ErrorCategory::provider, "empty text rejected for embedding");
    return do_embed(text);
}

std::string Provider::summarize(const std::string& text) {
    if (config_.capability != Capability::summarize)
        throw Error(ErrorCategory::provider,
                    std::string("summarize called on a ") + to_string(config_.capability) +
                        " provider");
    if (trim(text).empty())
        throw Error(ErrorCategory::provider, "empty text rejected for summarization");
    return do_summarize(text);
}

// ---------------------------------------------------------------------------
// MockProvider

namespace {

ProviderConfig mock_config(Capability cap, std::uint64_t seed) {
    ProviderConfig cfg;
    cfg.base_url = "mock://" + std::to_string(seed);
    cfg.model_name = "mock";
    cfg.capability = cap;
    return cfg;
}

} // namespace

MockProvider::MockProvider(Capability capability, std::uint64_t seed)
    : Provider(mock_config(capability, seed)), seed_(seed) {}

std::string MockProvider::id() const {
    std::string out = std::string("mock:") + to_string(config_.capability) + ":s" +
                      std::to_string(seed_);
    if (config_.capability == Capability::embed)
        out += ":d" + std::to_string(kEmbeddingDim);
    return out;
}

void MockProvider::set_generate_rule(GenerateRule rule) {
    std::lock_guard lock(mutex_);
    generate_rule_ = std::move(rule);
}

void MockProvider::set_generate_script(std::vector<std::string> responses) {
    std::lock_guard lock(mutex_);
    script_ = std::move(responses);
    script_pos_ = 0;
}

void MockProvider::set_summarize_rule(std::function<std::string(const std::string&)> rule) {
    std::lock_guard lock(mutex_);
    summarize_rule_ = std::move(rule);
}

std::string MockProvider::do_generate(const GenerationRequest& req) {
    {
        std::lock_guard lock(mutex_);
        if (script_pos_ < script_.size()) return script_[script_pos_++];
        if (generate_rule_) return generate_rule_(req);
    }
    // Default rule: answer from the last "Question:" line when the prompt has
    // one, otherwise from the prompt tail, plus a digest of (prompt, seed).
    const std::string& prompt = req.prompt;
    std::vector<std::string> tokens;
    bool from_question = false;
    std::size_t pos = prompt.rfind("Question:");
    if (pos != std::string::npos) {
        std::size_t begin = pos + 9;
        std::size_t end = prompt.find('\n', begin);
        std::string segment =
            prompt.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
        tokens = tokenize(segment).tokens;
        from_question = true;
    } else {
        tokens = tokenize(prompt).tokens;
    }
    std::size_t take = std::min<std::size_t>(16, tokens.size());
    if (req.max_tokens > 0)
        take = std::min<std::size_t>(take, static_cast<std::size_t>(req.max_tokens));
    std::string body;
    if (from_question) {
        body = join_tokens(tokens, 0, take);
    } else {
        body = join_tokens(tokens, tokens.size() - take, tokens.size());
    }
    std::string digest =
        hex_digest(prompt + "\x1f" + std::to_string(seed_)).substr(0, 8);
    std::string out = "mock-answer";
    if (!body.empty()) out += " " + body;
    out += " [" + digest + "]";
    return out;
}

std::vector<double> MockProvider::mock_embedding(const std::string& text, std::uint64_t seed) {
    // Token-multiset hashing: each distinct token contributes a seeded
    // pseudorandom direction, summed with multiplicity, then normalized.
    std::vector<double> vec(kEmbeddingDim, 0.0);
    auto tokens = tokenize(text).tokens;
    for (const auto& raw : tokens) {
        std::string tok = ascii_lower(raw);
        std::uint64_t state = fnv1a64(tok) ^ (seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        SplitMix64 rng(state);
        for (std::size_t d = 0; d < kEmbeddingDim; ++d)
            vec[d] += rng.next_double() * 2.0 - 1.0;
    }
    double norm2 = 0.0;
    for (double v : vec) norm2 += v * v;
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (double& v : vec) v *= inv;
    }
    return vec;
}

std::vector<double> MockProvider::do_embed(const std::string& text) {
    return mock_embedding(text, seed_);
}

std::string MockProvider::do_summarize(const std::string& text) {
    {
        std::lock_guard lock(mutex_);
        if (summarize_rule_) return summarize_rule_(text);
    }
    // First ceil(0.2 * n) tokens: deterministic and length-reducing.
    auto tokens = tokenize(text).tokens;
    std::size_t n = tokens.size();
    if (n == 0) return "";
    std::size_t keep = std::min((n + 4) / 5, n);
    return join_tokens(tokens, 0, keep);
}

// ---------------------------------------------------------------------------
// HttpProvider

HttpProvider::HttpProvider(ProviderConfig cfg) : Provider(std::move(cfg)) {
    const std::string& url = config_.base_url;
    if (url.rfind("https://", 0) == 0)
        throw Error(ErrorCategory::config,
                    "https endpoints are not supported by this build; use http: " + url);
    if (url.rfind("http://", 0) != 0)
        throw Error(ErrorCategory::config, "provider base_url must start with http://: " + url);
    std::size_t path_start = url.find('/', 7);
    if (path_start == std::string::npos) {
        host_part_ = url;
    } else {
        host_part_ = url.substr(0, path_start);
        std::string prefix = url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        path_prefix_ = prefix;
    }
}

std::string HttpProvider::id() const { return config_.model_name; }

std::string HttpProvider::post_json(const std::string& path, const std::string& body) {
    const int attempts = config_.max_retries + 1;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            double delay = config_.backoff_initial_s * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        httplib::Client cli(host_part_);
        cli.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
        cli.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
        cli.set_write_timeout(std::chrono::duration<double>(config_.timeout_s));
        httplib::Headers headers;
        if (!config_.auth_token.empty())
            headers.emplace("Authorization", "Bearer " + config_.auth_token);

        auto res = cli.Post(path_prefix_ + path, headers, body, "application/json");
        if (!res) {
            last_error = "connection failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        throw Error(ErrorCategory::provider,
                    "provider request failed (HTTP " + std::to_string(res->status) + "): " +
                        res->body.substr(0, 200));
    }
    throw Error(ErrorCategory::provider,
                "provider unreachable after " + std::to_string(attempts) + " attempts (" +
                    host_part_ + "): " + last_error);
}

namespace {

std::string extract_completion_text(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCategory::provider, "provider returned malformed JSON");
    try {
        const auto& choice = j.at("choices").at(0);
        if (choice.contains("message"))
            return choice.at("message").at("content").get<std::string>();
        return choice.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::provider,
                    std::string("unexpected completion response shape: ") + e.what());
    }
}

} // namespace

std::string HttpProvider::do_generate(const GenerationRequest& req) {
    nlohmann::json body{
        {"model", config_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
    const int attempts = config_.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::string text = trim(extract_completion_text(
            post_json("/v1/chat/completions", body.dump())));
        if (!text.empty()) return text;
        // An empty completion is treated as a transient failure; callers
        // must never see empty-string answers.
    }
    throw Error(ErrorCategory::provider, "provider kept returning empty completions");
}

std::vector<double> HttpProvider::do_embed(const std::string& text) {
    nlohmann::json body{{"model", config_.model_name}, {"input", text}};
    std::string response = post_json("/v1/embeddings", body.dump());
    nlohmann::json j = nlohmann::json::parse(response, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCategory::provider, "provider returned malformed JSON");
    try {
        return j.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::provider,
                    std::string("unexpected embedding response shape: ") + e.what());
    }
}

std::string HttpProvider::do_summarize(const std::string& text) {
    GenerationRequest req;
    req.prompt = kSummarizeInstruction + text;
    req.max_tokens = 1024;
    return do_generate(req);
}

// ---------------------------------------------------------------------------

ProviderHandle make_provider(const ProviderConfig& cfg) {
    if (cfg.base_url.rfind("mock:", 0) == 0) {
        std::uint64_t seed = 0;
        std::size_t pos = cfg.base_url.find_first_not_of(":/", 5);
        if (pos != std::string::npos) {
            try {
                seed = std::stoull(cfg.base_url.substr(pos));
            } catch (const std::exception&) {
                throw Error(ErrorCategory::config,
                            "mock provider URL must be mock://<seed>: " + cfg.base_url);
            }
        }
        return std::make_shared<MockProvider>(cfg.capability, seed);
    }
    return std::make_shared<HttpProvider>(cfg);
}

std::shared_ptr<MockProvider> make_mock_provider(Capability capability, std::uint64_t seed) {
    return std::make_shared<MockProvider>(capability, seed);
}

} // namespace k2rag
