#include "k2rag/tokenizer.hpp"

#include <cctype>
#include <cstdint>

namespace k2rag {

namespace {

bool is_unicode_space(std::uint32_t cp) {
    if (cp < 0x80) return std::isspace(static_cast<int>(cp)) != 0;
    switch (cp) {
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_unicode_punct(std::uint32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    // General punctuation, CJK punctuation, fullwidth ASCII punctuation.
    if (cp >= 0x2010 && cp <= 0x2027) return true;
    if (cp >= 0x2030 && cp <= 0x205E) return true;
    if (cp >= 0x3001 && cp <= 0x303F) return true;
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    if (cp >= 0xFF3B && cp <= 0xFF40) return true;
    if (cp >= 0xFF5B && cp <= 0xFF65) return true;
    switch (cp) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7:
    case 0x00BB: case 0x00BF:
        return true;
    default:
        return false;
    }
}

// Decodes one UTF-8 code point starting at text[i]; advances i past it.
// Malformed bytes are returned as single-byte code points so tokenization
// stays total and deterministic on arbitrary input.
std::uint32_t decode_utf8(const std::string& text, std::size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    std::uint32_t cp = b0;
    if ((b0 & 0x80) == 0x00) {
        len = 1;
        cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + len > text.size()) {
        ++i;
        return b0;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char bk = static_cast<unsigned char>(text[i + k]);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

} // namespace

TokenSequence tokenize(const std::string& text) {
    TokenSequence seq;
    seq.source_text = text;
    std::string word;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        std::uint32_t cp = decode_utf8(text, i);
        if (is_unicode_space(cp)) {
            if (!word.empty()) {
                seq.tokens.push_back(std::move(word));
                word.clear();
            }
        } else if (is_unicode_punct(cp)) {
            if (!word.empty()) {
                seq.tokens.push_back(std::move(word));
                word.clear();
            }
            seq.tokens.push_back(text.substr(start, i - start));
        } else {
            word.append(text, start, i - start);
        }
    }
    if (!word.empty()) seq.tokens.push_back(std::move(word));
    return seq;
}

std::string join_tokens(const std::vector<std::string>& tokens,
                        std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
        if (i > begin) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    return join_tokens(tokens, 0, tokens.size());
}

std::size_t token_count(const std::string& text) {
    return tokenize(text).size();
}

std::string ascii_lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

} // namespace k2rag
