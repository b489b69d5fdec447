#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace k2rag {

enum class Capability { generate, embed, summarize };

const char* to_string(Capability c);
Capability capability_from_string(const std::string& s);

struct ProviderConfig {
    std::string base_url = "mock://0";
    std::string model_name = "mock";
    Capability capability = Capability::generate;
    double timeout_s = 30.0;
    int max_retries = 3;
    std::string auth_token;       // resolved secret, empty = none
    double backoff_initial_s = 0.2;

    void validate() const;
};

struct GenerationRequest {
    std::string prompt;
    int max_tokens = 512;
    double temperature = 0.0; // deterministic sampling by default
};

/// Handle on one hosted model capability. Instances are shareable across
/// threads; concurrent in-flight calls are allowed.
class Provider {
public:
    virtual ~Provider() = default;

    Capability capability() const { return config_.capability; }
    const ProviderConfig& config() const { return config_; }

    /// Stable identity recorded into indexes so a query-time embedder swap
    /// is detectable.
    virtual std::string id() const = 0;

    std::string generate(const GenerationRequest& req);
    std::vector<double> embed(const std::string& text);
    std::string summarize(const std::string& text);

protected:
    explicit Provider(ProviderConfig cfg);
    virtual std::string do_generate(const GenerationRequest& req) = 0;
    virtual std::vector<double> do_embed(const std::string& text) = 0;
    virtual std::string do_summarize(const std::string& text) = 0;

    ProviderConfig config_;
};

using ProviderHandle = std::shared_ptr<Provider>;

/// Deterministic in-process provider: every default rule is a pure function
/// of (request, seed). Tests may install scripted rules to drive specific
/// pipeline shapes; scripts are a test affordance, not part of the contract.
class MockProvider : public Provider {
public:
    static constexpr std::size_t kEmbeddingDim = 64;

    MockProvider(Capability capability, std::uint64_t seed = 0);

    std::string id() const override;

    using GenerateRule = std::function<std::string(const GenerationRequest&)>;
    void set_generate_rule(GenerateRule rule);
    /// Queue of responses consumed call-by-call; falls back to the default
    /// rule when exhausted.
    void set_generate_script(std::vector<std::string> responses);
    void set_summarize_rule(std::function<std::string(const std::string&)> rule);

    std::uint64_t seed() const { return seed_; }

    /// The default construction, exposed so tests can recompute it.
    static std::vector<double> mock_embedding(const std::string& text, std::uint64_t seed);

protected:
    std::string do_generate(const GenerationRequest& req) override;
    std::vector<double> do_embed(const std::string& text) override;
    std::string do_summarize(const std::string& text) override;

private:
    std::uint64_t seed_;
    GenerateRule generate_rule_;
    std::function<std::string(const std::string&)> summarize_rule_;
    std::vector<std::string> script_;
    std::size_t script_pos_ = 0;
    std::mutex mutex_;
};

/// OpenAI-compatible HTTP client (chat completions + embeddings) with
/// bounded retry and exponential backoff.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig cfg);

    std::string id() const override;

protected:
    std::string do_generate(const GenerationRequest& req) override;
    std::vector<double> do_embed(const std::string& text) override;
    std::string do_summarize(const std::string& text) override;

private:
    std::string post_json(const std::string& path, const std::string& body);

    std::string host_part_;   // scheme://host:port
    std::string path_prefix_; // optional path under the base URL
};

/// Builds a provider from config. base_url "mock://<seed>" yields the
/// deterministic mock; anything else the HTTP client.
ProviderHandle make_provider(const ProviderConfig& cfg);

/// Convenience for tests and the mock CLI stack.
std::shared_ptr<MockProvider> make_mock_provider(Capability capability, std::uint64_t seed = 0);

/// The three model roles a pipeline needs.
struct Providers {
    ProviderHandle generator;
    ProviderHandle embedder;
    ProviderHandle summarizer;
};

} // namespace k2rag
