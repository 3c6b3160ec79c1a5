#include "rtp/prompts.hpp"

#include <nlohmann/json.hpp>

namespace rtp {

using nlohmann::json;

namespace {

// Figure texts are reproduced line-for-line, including the original
// indentation and the "formated" spelling.
constexpr const char* kSummarizeSystem =
    "Summarize the following text into summary with a maximum of {max_words} words.\n"
    "The summary should be concise and capture the main points of the text.\n"
    "Reply solely with the summary, without any additional text or formatting.\n"
    "Your answer should be a JSON object following the schema: {schema_str}";

constexpr const char* kSummarizeUser = "Text: {text}";

constexpr const char* kQuestionSystem =
    "You are an analyst.\n"
    "    You will receive a list of texts formated as a list.\n"
    "    You will propose one yes/no question whose answer can be determined from each individual text.\n"
    "    The question must be answerable \"yes\" to half of these texts, and \"no\" to the other half.\n"
    "    The question must be concise and clear, allowing for a straightforward yes/no answer for each text.\n"
    "    Do not use any external knowledge or assumptions. Your answer must be determined only from the texts "
    "provided.\n"
    "    You must reply following a json in the schema: {schema_str}";

constexpr const char* kQuestionUser = "Texts: {texts}";

constexpr const char* kAnswerSystem =
    "You will receive a text and a question about it.\n"
    "    Answer the question as yes (true) or no (false) based solely on the text. Do NOT\n"
    "    use any external knowledge or assumptions. Your answer must be determined only\n"
    "    from the text provided. If the question is not answerable from the text, respond with \"false\".\n"
    "    Ignore assumptions or implications not explicitly stated in the text.\n"
    "    Reply with a JSON object following the schema: {schema_str}";

constexpr const char* kAnswerUser = "Text: {text}\n\nQuestion: {question}";

constexpr const char* kGenerationSystem =
    "You are a skillful writer.\n"
    "You are writing under the following context:\n"
    "{context}\n"
    "Ensure the material is coherent and relevant to the questions asked.\n"
    "You will be asked to generate material based on questions and answers\n"
    "Reply with a json string that containing the generated material in the following schema:\n"
    "{schema_str}";

constexpr const char* kGenerationUserHeader = "Questions and answers:";

std::string replace_all(std::string text, std::string_view token, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::string escape_list_item(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 2);
    for (const char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Finds top-level balanced {...} spans, skipping brace characters inside JSON
// string literals. Fenced or prose-wrapped replies fall out naturally: the
// wrapping sits outside the braces.
std::vector<std::string> balanced_objects(const std::string& raw) {
    std::vector<std::string> found;
    std::size_t start = 0;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"' && depth > 0) {
            in_string = true;
        } else if (c == '{') {
            if (depth == 0) start = i;
            ++depth;
        } else if (c == '}') {
            if (depth > 0 && --depth == 0) {
                found.push_back(raw.substr(start, i - start + 1));
            }
        }
    }
    return found;
}

}  // namespace

ReplySchema reply_schema(SchemaName name) {
    switch (name) {
        case SchemaName::summary: return {name, "summary", false};
        case SchemaName::question: return {name, "question", false};
        case SchemaName::answer: return {name, "answer", true};
        case SchemaName::material: return {name, "material", false};
    }
    return {SchemaName::summary, "summary", false};
}

std::string schema_hint(const ReplySchema& schema) {
    return "{\"" + schema.field + "\": \"" + (schema.boolean ? "boolean" : "string") + "\"}";
}

PromptPair render_summarize_prompt(const std::string& text, int max_words) {
    if (max_words < 1) throw InvalidMaxWordsError("max_words must be >= 1");
    if (text.empty()) throw EmptyFieldError("summarize prompt requires non-empty text");
    PromptPair pair;
    pair.system = replace_all(kSummarizeSystem, "{max_words}", std::to_string(max_words));
    pair.system = replace_all(std::move(pair.system), "{schema_str}", schema_hint(reply_schema(SchemaName::summary)));
    pair.user = replace_all(kSummarizeUser, "{text}", text);
    return pair;
}

std::string render_text_list(const std::vector<std::string>& texts) {
    std::string out = "[";
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (i > 0) out += ", ";
        out += "'" + escape_list_item(texts[i]) + "'";
    }
    out += "]";
    return out;
}

PromptPair render_question_prompt(const std::vector<std::string>& texts) {
    if (texts.size() < 2) throw TooFewTextsError("question prompt requires at least two texts");
    PromptPair pair;
    pair.system = replace_all(kQuestionSystem, "{schema_str}", schema_hint(reply_schema(SchemaName::question)));
    pair.user = replace_all(kQuestionUser, "{texts}", render_text_list(texts));
    return pair;
}

PromptPair render_answer_prompt(const std::string& text, const std::string& question) {
    if (text.empty() || question.empty()) throw EmptyFieldError("answer prompt requires text and question");
    PromptPair pair;
    pair.system = replace_all(kAnswerSystem, "{schema_str}", schema_hint(reply_schema(SchemaName::answer)));
    pair.user = replace_all(kAnswerUser, "{text}", text);
    pair.user = replace_all(std::move(pair.user), "{question}", question);
    return pair;
}

std::string generation_system_prompt(const std::string& context) {
    if (context.empty()) throw EmptyContextError("generation prompt requires a non-empty context");
    std::string system = replace_all(kGenerationSystem, "{context}", context);
    return replace_all(std::move(system), "{schema_str}", schema_hint(reply_schema(SchemaName::material)));
}

PromptPair render_generation_prompt(const std::string& context, const ThematicSignature& signature) {
    PromptPair pair;
    pair.system = generation_system_prompt(context);
    pair.user = kGenerationUserHeader;
    for (const auto& step : signature.steps) {
        pair.user += "\nQ: " + step.question + " A: " + (step.answer ? "yes" : "no");
    }
    return pair;
}

ParsedReply parse_structured_reply(const std::string& raw, const ReplySchema& schema) {
    bool wrong_type_seen = false;
    for (const auto& candidate : balanced_objects(raw)) {
        const json obj = json::parse(candidate, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains(schema.field)) continue;
        const json& value = obj.at(schema.field);
        if (schema.boolean) {
            if (value.is_boolean()) return ParsedReply{value.get<bool>()};
        } else {
            if (value.is_string()) return ParsedReply{value.get<std::string>()};
        }
        wrong_type_seen = true;
    }
    if (wrong_type_seen) {
        throw WrongTypeError("field \"" + schema.field + "\" is not of type " +
                             (schema.boolean ? "boolean" : "string"));
    }
    throw ParseFailureError("no JSON object with field \"" + schema.field + "\" in reply");
}

std::string parse_text_reply(const std::string& raw, const ReplySchema& schema) {
    if (schema.boolean) throw WrongTypeError("schema \"" + schema.field + "\" is boolean, not text");
    return std::get<std::string>(parse_structured_reply(raw, schema));
}

bool parse_bool_reply(const std::string& raw) {
    return std::get<bool>(parse_structured_reply(raw, reply_schema(SchemaName::answer)));
}

std::string serialize_reply(const ReplySchema& schema, const ParsedReply& value) {
    json obj;
    if (schema.boolean) {
        obj[schema.field] = std::get<bool>(value);
    } else {
        obj[schema.field] = std::get<std::string>(value);
    }
    return obj.dump();
}

}  // namespace rtp
