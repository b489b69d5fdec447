#include "k2rag/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "k2rag/error.hpp"

namespace k2rag::csv {

std::string quote_field(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.put(',');
        out << quote_field(fields[i]);
    }
    out.put('\n');
}

std::vector<std::vector<std::string>> parse_text(const std::string& text,
                                                 const std::string& origin) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    std::size_t rowno = 1;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
        ++rowno;
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted)
                throw Error(ErrorCategory::io, origin + ": stray quote in row " +
                                                   std::to_string(rowno));
            in_quotes = true;
            field_was_quoted = true;
            row_has_content = true;
            ++i;
            break;
        case ',':
            end_field();
            row_has_content = true;
            ++i;
            break;
        case '\r':
            if (i + 1 < n && text[i + 1] == '\n') ++i;
            [[fallthrough]];
        case '\n':
            if (row_has_content || !field.empty() || !row.empty()) end_row();
            ++i;
            break;
        default:
            field.push_back(c);
            row_has_content = true;
            ++i;
            break;
        }
    }
    if (in_quotes)
        throw Error(ErrorCategory::io,
                    origin + ": unterminated quoted field in row " + std::to_string(rowno));
    if (row_has_content || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::vector<std::vector<std::string>> parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::io, "cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path.string());
}

} // namespace k2rag::csv
