#include "rtp/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rtp/random.hpp"

namespace rtp {

namespace {

using nlohmann::json;

std::string coerce_to_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
}

struct RawRecord {
    std::optional<std::string> id;
    std::optional<std::string> text;
    std::optional<std::string> label;
    std::size_t line = 0;
};

std::vector<RawRecord> read_jsonl(std::istream& in) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw MalformedRecordError(line_number, "not a JSON object");
        }
        RawRecord rec;
        rec.line = line_number;
        if (obj.contains("id") && !obj["id"].is_null()) rec.id = coerce_to_string(obj["id"]);
        if (obj.contains("text") && obj["text"].is_string()) rec.text = obj["text"].get<std::string>();
        if (obj.contains("label") && !obj["label"].is_null()) rec.label = coerce_to_string(obj["label"]);
        records.push_back(std::move(rec));
    }
    return records;
}

// RFC-4180-style rows: quoted fields may contain commas, quotes ("" escape)
// and newlines. Returns one row per record plus the record's starting line.
std::vector<std::pair<std::vector<std::string>, std::size_t>> read_csv_rows(std::istream& in) {
    std::vector<std::pair<std::vector<std::string>, std::size_t>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line_number = 1;
    std::size_t record_start = 1;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = row.size() == 1 && row[0].empty();
        if (!blank) rows.emplace_back(row, record_start);
        row.clear();
        record_start = line_number;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_number;
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            ++line_number;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw MalformedRecordError(record_start, "unterminated quoted field");
    if (!field.empty() || !row.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        ++line_number;
        end_record();
    }
    return rows;
}

std::vector<RawRecord> read_csv(std::istream& in) {
    auto rows = read_csv_rows(in);
    if (rows.empty()) return {};

    const auto& header = rows.front().first;
    std::ptrdiff_t id_col = -1, text_col = -1, label_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "id") id_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "text") text_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "label") label_col = static_cast<std::ptrdiff_t>(i);
    }
    if (text_col < 0) throw MalformedRecordError(rows.front().second, "header has no \"text\" column");

    std::vector<RawRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [cells, line] = rows[r];
        RawRecord rec;
        rec.line = line;
        auto cell = [&](std::ptrdiff_t col) -> std::optional<std::string> {
            if (col < 0 || static_cast<std::size_t>(col) >= cells.size()) return std::nullopt;
            return cells[static_cast<std::size_t>(col)];
        };
        if (auto v = cell(id_col); v && !v->empty()) rec.id = *v;
        if (auto v = cell(text_col)) rec.text = *v;
        if (auto v = cell(label_col); v && !v->empty()) rec.label = *v;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

MalformedRecordError::MalformedRecordError(std::size_t line_number, const std::string& what)
    : Error("malformed record at line " + std::to_string(line_number) + ": " + what), line(line_number) {}

DuplicateIdError::DuplicateIdError(const std::string& duplicate)
    : Error("duplicate document id \"" + duplicate + "\""), id(duplicate) {}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file: " + path.string());

    const auto records = format == CorpusFormat::jsonl ? read_jsonl(in) : read_csv(in);
    if (records.empty()) throw EmptyCorpusError("empty corpus: " + path.string());

    Corpus corpus;
    corpus.source = path.string() + (format == CorpusFormat::jsonl ? " (jsonl)" : " (csv)");
    std::unordered_set<std::string> seen;
    for (const auto& rec : records) {
        if (!rec.text || rec.text->empty()) throw MalformedRecordError(rec.line, "missing or empty \"text\"");
        Document doc;
        doc.id = rec.id ? *rec.id : "row-" + std::to_string(rec.line);
        doc.text = *rec.text;
        doc.label = rec.label;
        if (!seen.insert(doc.id).second) throw DuplicateIdError(doc.id);
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

SampleSet sample_corpus(const Corpus& corpus, std::size_t size, std::uint64_t seed) {
    if (size < 1) throw InvalidSizeError("sample size must be >= 1");

    SampleSet sample;
    sample.seed = seed;
    sample.requested_size = size;

    if (corpus.documents.size() <= size) {
        sample.documents = corpus.documents;
        sample.clamped = corpus.documents.size() < size;
        return sample;
    }

    for (const std::size_t i : sampled_indices(corpus.documents.size(), size, seed)) {
        sample.documents.push_back(corpus.documents[i]);
    }
    return sample;
}

}  // namespace rtp
