#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rtp/errors.hpp"
#include "rtp/signature.hpp"

namespace rtp {

struct PromptPair {
    std::string system;
    std::string user;
};

enum class SchemaName { summary, question, answer, material };

// Every reply schema has exactly one payload field.
struct ReplySchema {
    SchemaName name;
    std::string field;
    bool boolean = false;  // field type: boolean instead of string
};

ReplySchema reply_schema(SchemaName name);

// The text substituted for {schema_str}: a compact one-line object description,
// e.g. {"answer": "boolean"}.
std::string schema_hint(const ReplySchema& schema);

struct InvalidMaxWordsError : Error {
    using Error::Error;
};
struct TooFewTextsError : Error {
    using Error::Error;
};
struct EmptyFieldError : Error {
    using Error::Error;
};
struct EmptyContextError : Error {
    using Error::Error;
};
struct ParseFailureError : Error {
    using Error::Error;
};
struct WrongTypeError : Error {
    using Error::Error;
};

PromptPair render_summarize_prompt(const std::string& text, int max_words);

// User prompt carries the texts as a Python-style list: single-quoted items,
// comma-space separated, backslash escapes for quotes, backslashes and
// newlines. Requires at least two texts.
PromptPair render_question_prompt(const std::vector<std::string>& texts);

PromptPair render_answer_prompt(const std::string& text, const std::string& question);

// System prompt embeds the dataset context line; the user prompt lists the
// signature's (question, answer) pairs root-first, one "Q: ... A: yes|no" line
// per step. An empty signature yields the header and zero Q/A lines.
PromptPair render_generation_prompt(const std::string& context, const ThematicSignature& signature);

// The generation system prompt alone (shared by the few-shot and uncontrolled
// strategies, which swap out the user prompt).
std::string generation_system_prompt(const std::string& context);

std::string render_text_list(const std::vector<std::string>& texts);

using ParsedReply = std::variant<std::string, bool>;

// Tolerant extraction: scans the raw reply for balanced JSON objects (code
// fences and surrounding prose are skipped because they sit outside the
// braces), then requires the schema's single field with the right type.
ParsedReply parse_structured_reply(const std::string& raw, const ReplySchema& schema);

std::string parse_text_reply(const std::string& raw, const ReplySchema& schema);
bool parse_bool_reply(const std::string& raw);

// Inverse of parse_structured_reply for well-formed values.
std::string serialize_reply(const ReplySchema& schema, const ParsedReply& value);

}  // namespace rtp
