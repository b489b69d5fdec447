#include "k2rag/prompts.hpp"

namespace k2rag {

std::string build_generation_prompt(const std::string& context, const std::string& question) {
    return "Additional Information:\n" + context +
           "\n\nInstruction: You are a smart LLM who gives an answer to the question in as "
           "little words as possible using the additional information provided above.\n\n"
           "Question: " +
           question + "\n\nShort Answer:";
}

std::string build_question_prompt(const std::string& chunk_text) {
    return "Instruction: Your task is to create a small question out of the below "
           "information.\n\nInformation: \n" +
           chunk_text + "\n\nAnswer:";
}

} // namespace k2rag
