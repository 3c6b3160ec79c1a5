#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rtp/errors.hpp"

namespace rtp {

struct Document {
    std::string id;
    std::string text;
    std::optional<std::string> summary;
    std::optional<std::string> label;
};

struct Corpus {
    std::vector<Document> documents;
    std::string source;  // "<path> (<format>)"
};

struct DiscardedDoc {
    std::string doc_id;
    std::string reason;
};

struct SampleSet {
    std::vector<Document> documents;
    std::uint64_t seed = 0;
    std::size_t requested_size = 0;
    bool clamped = false;  // corpus was smaller than the requested size
    std::vector<DiscardedDoc> discarded;
};

enum class CorpusFormat { jsonl, csv };

struct EmptyCorpusError : Error {
    using Error::Error;
};

struct MalformedRecordError : Error {
    MalformedRecordError(std::size_t line_number, const std::string& what);
    std::size_t line;
};

struct DuplicateIdError : Error {
    explicit DuplicateIdError(const std::string& duplicate);
    std::string id;
};

struct InvalidSizeError : Error {
    using Error::Error;
};

// jsonl: one object per line with fields id, text, optional label.
// csv: header row naming columns id, text, label (text required, rest optional).
// Records without an id get a synthesized "row-<line>" id.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

// Uniform sample without replacement: seeded permutation, take the first `size`.
// A corpus smaller than `size` is returned whole with the clamp flag set.
SampleSet sample_corpus(const Corpus& corpus, std::size_t size, std::uint64_t seed);

}  // namespace rtp
