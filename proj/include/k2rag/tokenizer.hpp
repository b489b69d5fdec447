#pragma once

#include <string>
#include <vector>

namespace k2rag {

/// Token stream of a text plus the text it came from. Joining `tokens` with
/// single spaces yields the whitespace-normalized form of `source_text`.
struct TokenSequence {
    std::vector<std::string> tokens;
    std::string source_text;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

/// Deterministic Unicode-aware tokenizer: splits on whitespace and detaches
/// punctuation code points as standalone tokens. "a, b." -> {"a", ",", "b", "."}.
TokenSequence tokenize(const std::string& text);

/// Joining rule for reconstructing chunk text: single space between tokens.
std::string join_tokens(const std::vector<std::string>& tokens,
                        std::size_t begin, std::size_t end);
std::string join_tokens(const std::vector<std::string>& tokens);

std::size_t token_count(const std::string& text);

/// ASCII lowercasing used for index terms (documented: no Unicode case folding).
std::string ascii_lower(std::string s);

} // namespace k2rag
