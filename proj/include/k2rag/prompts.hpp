#pragma once

#include <string>

namespace k2rag {

/// Answer-generation prompt shared by every pipeline. Byte-exact template;
/// context and question are inserted literally.
std::string build_generation_prompt(const std::string& context, const std::string& question);

/// Sub-question creation prompt used on knowledge-graph result chunks.
std::string build_question_prompt(const std::string& chunk_text);

} // namespace k2rag
