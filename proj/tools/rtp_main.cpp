#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rtp/classifier.hpp"
#include "rtp/config.hpp"
#include "rtp/corpus.hpp"
#include "rtp/generation.hpp"
#include "rtp/http_transport.hpp"
#include "rtp/metrics.hpp"
#include "rtp/parallel.hpp"
#include "rtp/partitioner.hpp"
#include "rtp/prompts.hpp"
#include "rtp/provider.hpp"
#include "rtp/tree.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitProvider = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string iso_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rtp::Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rtp::Error("cannot write " + path.string());
    out << content;
    if (!out) throw rtp::Error("write to " + path.string() + " failed");
}

rtp::CorpusFormat sniff_format(const fs::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".csv" ? rtp::CorpusFormat::csv : rtp::CorpusFormat::jsonl;
}

rtp::Corpus load_corpus_auto(const fs::path& path) {
    return rtp::load_corpus(path, sniff_format(path));
}

std::map<std::string, std::string> corpus_labels(const rtp::Corpus& corpus) {
    std::map<std::string, std::string> labels;
    for (const auto& doc : corpus.documents) {
        if (doc.label) labels[doc.id] = *doc.label;
    }
    return labels;
}

// ---- settings: flags > environment > config file > defaults ----

class Settings {
public:
    Settings(std::map<std::string, std::string> config_values) : config_(std::move(config_values)) {}

    void resolve(const CLI::Option* opt, const char* env_name, const std::string& config_key,
                 const std::function<void(const std::string&)>& apply) const {
        if (opt != nullptr && opt->count() > 0) return;
        if (env_name != nullptr) {
            if (const char* value = std::getenv(env_name); value != nullptr && *value != '\0') {
                apply(value);
                return;
            }
        }
        auto it = config_.find(config_key);
        if (it == config_.end()) it = config_.find("rtp." + config_key);
        if (it != config_.end()) apply(it->second);
    }

private:
    std::map<std::string, std::string> config_;
};

std::map<std::string, std::string> load_config_file(const std::string& path, bool explicitly_given) {
    std::map<std::string, std::string> values;
    if (!fs::exists(path)) {
        if (explicitly_given) throw UsageError("config file not found: " + path);
        return values;
    }
    CLI::ConfigTOML reader;
    for (const auto& item : reader.from_file(path)) {
        values[item.fullname()] = item.inputs.empty() ? "true" : item.inputs.back();
    }
    return values;
}

long long parse_integer(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long value = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw UsageError("invalid integer for " + what + ": \"" + text + "\"");
    }
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw UsageError("invalid integer for " + what + ": \"" + text + "\"");
    }
}

bool parse_flag(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw UsageError("invalid boolean for " + what + ": \"" + text + "\"");
}

// ---- backend selection ----

struct BackendOpts {
    std::string backend = "live";
    std::string rules;
    int max_inflight = 8;

    CLI::Option* backend_opt = nullptr;
    CLI::Option* rules_opt = nullptr;
    CLI::Option* inflight_opt = nullptr;
};

void add_backend_options(CLI::App* cmd, BackendOpts& opts) {
    opts.backend_opt = cmd->add_option("--backend", opts.backend, "Provider backend: live or scripted")
                           ->check(CLI::IsMember({"live", "scripted"}));
    opts.rules_opt = cmd->add_option("--rules", opts.rules, "Rule table for the scripted backend (jsonl)");
    opts.inflight_opt =
        cmd->add_option("--max-inflight", opts.max_inflight, "Concurrent in-flight provider requests")
            ->check(CLI::PositiveNumber);
}

void resolve_backend(const Settings& settings, BackendOpts& opts) {
    settings.resolve(opts.backend_opt, "RTP_BACKEND", "backend", [&](const std::string& v) {
        if (v != "live" && v != "scripted") throw UsageError("backend must be live or scripted, got \"" + v + "\"");
        opts.backend = v;
    });
    settings.resolve(opts.rules_opt, "RTP_RULES", "rules", [&](const std::string& v) { opts.rules = v; });
    settings.resolve(opts.inflight_opt, "RTP_MAX_INFLIGHT", "max-inflight", [&](const std::string& v) {
        opts.max_inflight = static_cast<int>(parse_integer(v, "max-inflight"));
        if (opts.max_inflight < 1) throw UsageError("max-inflight must be positive");
    });
}

std::unique_ptr<rtp::ProviderGateway> make_gateway(const BackendOpts& opts) {
    std::unique_ptr<rtp::Transport> transport;
    if (opts.backend == "scripted") {
        if (opts.rules.empty()) throw UsageError("--rules is required with --backend scripted");
        transport = std::make_unique<rtp::ScriptedTransport>(rtp::ScriptedTransport::from_rules_file(opts.rules));
    } else {
        transport = std::make_unique<rtp::HttpTransport>(rtp::HttpConfig::from_env());
    }
    return std::make_unique<rtp::ProviderGateway>(std::move(transport), rtp::RetryPolicy{}, opts.max_inflight);
}

// ---- build options shared by build/evaluate ----

struct BuildOpts {
    rtp::BuildConfig cfg;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* sample_opt = nullptr;
    CLI::Option* depth_opt = nullptr;
    CLI::Option* leaf_opt = nullptr;
    CLI::Option* votes_opt = nullptr;
    CLI::Option* words_opt = nullptr;
    CLI::Option* summarize_train_opt = nullptr;
};

void add_build_options(CLI::App* cmd, BuildOpts& opts) {
    opts.sample_opt = cmd->add_option("--sample-size", opts.cfg.sample_size, "Documents sampled for the build")
                          ->check(CLI::PositiveNumber);
    opts.depth_opt =
        cmd->add_option("--max-depth", opts.cfg.max_depth, "Maximum tree depth")->check(CLI::PositiveNumber);
    opts.leaf_opt = cmd->add_option("--min-leaf", opts.cfg.min_leaf, "Minimum documents per split node")
                        ->check(CLI::PositiveNumber);
    opts.votes_opt =
        cmd->add_option("--votes", opts.cfg.votes, "Answers per vote")->check(CLI::PositiveNumber);
    opts.words_opt = cmd->add_option("--max-words", opts.cfg.max_words, "Summary word limit")
                         ->check(CLI::PositiveNumber);
    opts.seed_opt = cmd->add_option("--seed", opts.cfg.seed, "Seed for all sampling");
    opts.summarize_train_opt =
        cmd->add_flag("--summarize-train", opts.cfg.summarize_train, "Summarize sampled documents before building");
}

void resolve_build(const Settings& settings, BuildOpts& opts) {
    auto apply_int = [](int& target, const std::string& what) {
        return [&target, what](const std::string& v) { target = static_cast<int>(parse_integer(v, what)); };
    };
    settings.resolve(opts.sample_opt, nullptr, "sample-size", apply_int(opts.cfg.sample_size, "sample-size"));
    settings.resolve(opts.depth_opt, nullptr, "max-depth", apply_int(opts.cfg.max_depth, "max-depth"));
    settings.resolve(opts.leaf_opt, nullptr, "min-leaf", apply_int(opts.cfg.min_leaf, "min-leaf"));
    settings.resolve(opts.votes_opt, nullptr, "votes", apply_int(opts.cfg.votes, "votes"));
    settings.resolve(opts.words_opt, nullptr, "max-words", apply_int(opts.cfg.max_words, "max-words"));
    settings.resolve(opts.seed_opt, "RTP_SEED", "seed",
                     [&](const std::string& v) { opts.cfg.seed = parse_unsigned(v, "seed"); });
    settings.resolve(opts.summarize_train_opt, nullptr, "summarize-train",
                     [&](const std::string& v) { opts.cfg.summarize_train = parse_flag(v, "summarize-train"); });
}

// ---- shared output helpers ----

void print_ledger(const rtp::TokenLedger& ledger) {
    if (ledger.total() == 0) return;
    std::cout << "Token usage (Q = question creation, A = question answering)\n";
    std::cout << "  Q      " << ledger.question_stage << "\n";
    std::cout << "  A      " << ledger.answer_stage << "\n";
    if (ledger.summarize_stage != 0) std::cout << "  Summ   " << ledger.summarize_stage << "\n";
    if (ledger.generation_stage != 0) std::cout << "  Gen    " << ledger.generation_stage << "\n";
    std::cout << "  Total  " << ledger.total() << "\n";
}

void write_manifest(const fs::path& artifact, const std::string& command, const json& config, const json& inputs,
                    const json& outputs, std::uint64_t seed, const rtp::TokenLedger& ledger,
                    const std::string& started_at) {
    json ledger_json;
    rtp::to_json(ledger_json, ledger);
    const json manifest{
        {"command", command},     {"config", config},   {"inputs", inputs},
        {"outputs", outputs},     {"seed", seed},       {"ledger", ledger_json},
        {"started_at", started_at}, {"finished_at", iso_utc_now()},
    };
    write_file(artifact.string() + ".manifest.json", manifest.dump(2) + "\n");
}

// ---- subcommand payloads ----

struct BuildArgs {
    std::string input;
    std::string out;
    BuildOpts build;
    BackendOpts backend;
};

int run_build(const BuildArgs& args) {
    const std::string started = iso_utc_now();
    auto gateway = make_gateway(args.backend);
    const rtp::Corpus corpus = load_corpus_auto(args.input);
    const rtp::SampleSet sample =
        rtp::sample_corpus(corpus, static_cast<std::size_t>(args.build.cfg.sample_size), args.build.cfg.seed);

    json config_json;
    rtp::to_json(config_json, args.build.cfg);
    const json inputs{{"corpus", args.input}, {"rules", args.backend.rules.empty() ? json(nullptr) : json(args.backend.rules)}};

    const auto label_and_save = [&](rtp::ThematicTree tree) {
        const auto labels = corpus_labels(corpus);
        if (!labels.empty()) {
            try {
                tree = rtp::assign_leaf_labels(std::move(tree), labels);
            } catch (const rtp::NoLabeledDocsError& e) {
                std::cerr << "note: leaving tree unlabeled (" << e.what() << ")\n";
            }
        }
        write_file(args.out, rtp::serialize_tree(tree));
        write_manifest(args.out, "build", config_json, inputs, json{{"tree", args.out}}, args.build.cfg.seed,
                       tree.ledger, started);
        print_ledger(tree.ledger);
        return tree;
    };

    try {
        const rtp::ThematicTree tree = label_and_save(rtp::build_tree(sample, args.build.cfg, *gateway));
        std::cout << "tree written to " << args.out << " (" << tree.nodes.size() << " nodes, "
                  << tree.leaf_ids().size() << " leaves)\n";
        return 0;
    } catch (const rtp::PartialBuildError& e) {
        label_and_save(e.partial);
        std::cerr << "error: " << e.what() << "\npartial tree written to " << args.out << "\n";
        return kExitProvider;
    }
}

struct ReportArgs {
    std::string tree_path;
    std::string labels_path;
    std::string out;
};

int run_report(const ReportArgs& args) {
    const std::string started = iso_utc_now();
    rtp::ThematicTree tree = rtp::deserialize_tree(read_file(args.tree_path));
    const rtp::Corpus label_corpus = load_corpus_auto(args.labels_path);
    tree = rtp::assign_leaf_labels(std::move(tree), corpus_labels(label_corpus));

    const std::string csv = rtp::alignment_report_csv(rtp::tree_alignment_report(tree));
    write_file(args.out, csv);

    json config_json;
    rtp::to_json(config_json, tree.config);
    write_manifest(args.out, "report", config_json, json{{"tree", args.tree_path}, {"labels", args.labels_path}},
                   json{{"report", args.out}}, tree.config.seed, rtp::TokenLedger{}, started);
    std::cout << "report written to " << args.out << "\n";
    return 0;
}

struct ClassifyArgs {
    std::string tree_path;
    std::string input;
    std::string labels_path;
    std::string out;
    bool summarize_eval = false;
    BackendOpts backend;
};

int run_classify(const ClassifyArgs& args) {
    const std::string started = iso_utc_now();
    auto gateway = make_gateway(args.backend);
    rtp::ThematicTree tree = rtp::deserialize_tree(read_file(args.tree_path));
    if (!args.labels_path.empty()) {
        tree = rtp::assign_leaf_labels(std::move(tree), corpus_labels(load_corpus_auto(args.labels_path)));
    }
    const rtp::Corpus corpus = load_corpus_auto(args.input);

    rtp::BuildConfig cfg = tree.config;
    cfg.summarize_eval = args.summarize_eval;

    struct Row {
        json line;
    };
    std::vector<Row> rows(corpus.documents.size());
    rtp::parallel_for(corpus.documents.size(), static_cast<unsigned>(gateway->max_inflight()), [&](std::size_t i) {
        const rtp::Document& doc = corpus.documents[i];
        try {
            const rtp::ClassificationOutcome outcome = rtp::classify_document(tree, doc, cfg, *gateway);
            rows[i].line = json{{"doc_id", doc.id}, {"leaf", outcome.leaf_id}, {"label", outcome.predicted_label}};
        } catch (const rtp::RefusalError& e) {
            rows[i].line = json{{"doc_id", doc.id}, {"unclassifiable", true}, {"reason", e.what()}};
        }
    });

    std::string body;
    for (const auto& row : rows) body += row.line.dump() + "\n";
    if (args.out.empty()) {
        std::cout << body;
    } else {
        write_file(args.out, body);
        json config_json;
        rtp::to_json(config_json, cfg);
        write_manifest(args.out, "classify", config_json,
                       json{{"tree", args.tree_path}, {"corpus", args.input}}, json{{"classifications", args.out}},
                       cfg.seed, gateway->ledger_snapshot(), started);
        std::cout << "classifications written to " << args.out << "\n";
    }
    print_ledger(gateway->ledger_snapshot());
    return 0;
}

struct EvaluateArgs {
    std::string input;
    std::string out;
    int repetitions = 5;
    int test_size = 200;
    std::string variant = "plain";
    BuildOpts build;
    BackendOpts backend;
};

int run_evaluate(const EvaluateArgs& args) {
    const std::string started = iso_utc_now();
    auto gateway = make_gateway(args.backend);
    const rtp::Corpus corpus = load_corpus_auto(args.input);

    rtp::EvalOptions options;
    options.repetitions = args.repetitions;
    options.test_size = args.test_size;
    options.variant = rtp::eval_variant_from_name(args.variant);

    const rtp::EvalReport report = rtp::evaluate_classifier(corpus, args.build.cfg, *gateway, options);

    std::cout << "variant  reps  mean     two_sigma  unclassifiable  failed\n";
    char line[128];
    std::snprintf(line, sizeof(line), "%-7s  %-4d  %-7.4f  %-9.4f  %-14d  %zu\n",
                  rtp::eval_variant_name(report.variant), report.repetitions, report.mean, report.two_sigma,
                  report.unclassifiable, report.failed_repetitions.size());
    std::cout << line << "accuracies:";
    for (const double a : report.accuracies) {
        std::snprintf(line, sizeof(line), " %.4f", a);
        std::cout << line;
    }
    std::cout << "\n";
    for (const auto& failure : report.failed_repetitions) std::cerr << "failed: " << failure << "\n";

    if (!args.out.empty()) {
        json report_json;
        rtp::to_json(report_json, report);
        write_file(args.out, report_json.dump(2) + "\n");
        json config_json;
        rtp::to_json(config_json, args.build.cfg);
        write_manifest(args.out, "evaluate", config_json, json{{"corpus", args.input}},
                       json{{"report", args.out}}, args.build.cfg.seed, gateway->ledger_snapshot(), started);
        std::cout << "report written to " << args.out << "\n";
    }
    print_ledger(gateway->ledger_snapshot());
    return 0;
}

struct GenerateArgs {
    std::string tree_path;
    std::string leaf;
    std::string strategy = "ctg";
    std::string context;
    int count = 1;
    std::string eval_mode;
    std::string reference;
    std::string input;
    std::string out;
    BackendOpts backend;
};

int run_generate(const GenerateArgs& args) {
    const std::string started = iso_utc_now();
    auto gateway = make_gateway(args.backend);
    const rtp::ThematicTree tree = rtp::deserialize_tree(read_file(args.tree_path));
    const rtp::Strategy strategy = rtp::strategy_from_name(args.strategy);

    if (strategy != rtp::Strategy::uncontrolled && args.leaf.empty()) {
        throw UsageError("--leaf is required for the " + args.strategy + " strategy");
    }

    rtp::GenerationBatch batch;
    switch (strategy) {
        case rtp::Strategy::ctg:
            batch = rtp::generate_thematic(tree, args.leaf, args.context, args.count, tree.config, *gateway);
            break;
        case rtp::Strategy::fewshot: {
            if (args.input.empty()) {
                throw UsageError("--input (the corpus that supplied the leaf documents) is required for fewshot");
            }
            const rtp::Corpus corpus = load_corpus_auto(args.input);
            batch = rtp::generate_fewshot(tree, args.leaf, args.context, args.count, tree.config, *gateway,
                                          corpus.documents);
            break;
        }
        case rtp::Strategy::uncontrolled:
            batch = rtp::generate_uncontrolled(args.context, args.count, tree.config, *gateway);
            break;
    }

    std::string body;
    for (const auto& text : batch.texts) {
        const json line{{"strategy", rtp::strategy_name(batch.strategy)},
                        {"leaf", batch.target_leaf ? json(*batch.target_leaf) : json(nullptr)},
                        {"text", text}};
        body += line.dump() + "\n";
    }
    if (args.out.empty()) {
        std::cout << body;
    } else {
        write_file(args.out, body);
        json config_json;
        rtp::to_json(config_json, tree.config);
        write_manifest(args.out, "generate", config_json, json{{"tree", args.tree_path}},
                       json{{"batch", args.out}}, tree.config.seed, gateway->ledger_snapshot(), started);
        std::cout << "batch written to " << args.out << "\n";
    }
    for (const auto& failure : batch.failures) std::cerr << "generation failed: " << failure << "\n";
    if (batch.examples_truncated) std::cerr << "note: few-shot examples were subsampled to fit the prompt budget\n";

    if (!args.eval_mode.empty()) {
        if (args.eval_mode == "node") {
            std::optional<std::string> reference_leaf;
            if (!args.leaf.empty()) reference_leaf = args.leaf;
            const double accuracy =
                rtp::eval_node_accuracy(batch, tree, tree.config, *gateway, reference_leaf);
            char line[64];
            std::snprintf(line, sizeof(line), "node_accuracy %.4f\n", accuracy);
            std::cout << line;
        } else if (args.eval_mode == "centroid") {
            if (args.reference.empty()) throw UsageError("--reference is required with --eval centroid");
            const rtp::Corpus reference = load_corpus_auto(args.reference);
            std::vector<std::string> reference_texts;
            reference_texts.reserve(reference.documents.size());
            for (const auto& doc : reference.documents) reference_texts.push_back(doc.text);
            const double similarity = rtp::eval_centroid_similarity(batch, reference_texts, *gateway);
            char line[64];
            std::snprintf(line, sizeof(line), "centroid_similarity %.4f\n", similarity);
            std::cout << line;
        } else {
            throw UsageError("--eval must be node or centroid, got \"" + args.eval_mode + "\"");
        }
    }

    print_ledger(gateway->ledger_snapshot());
    return batch.failures.empty() ? 0 : kExitProvider;
}

struct ExportArgs {
    std::string tree_path;
    std::string format = "dot";
    std::string out;
};

int run_export(const ExportArgs& args) {
    const std::string started = iso_utc_now();
    const rtp::ThematicTree tree = rtp::deserialize_tree(read_file(args.tree_path));
    const std::string rendered = args.format == "dot" ? rtp::export_dot(tree) : rtp::serialize_tree(tree);
    if (args.out.empty()) {
        std::cout << rendered;
    } else {
        write_file(args.out, rendered);
        json config_json;
        rtp::to_json(config_json, tree.config);
        write_manifest(args.out, "export", config_json, json{{"tree", args.tree_path}},
                       json{{"export", args.out}}, tree.config.seed, rtp::TokenLedger{}, started);
        std::cout << "export written to " << args.out << "\n";
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Recursive thematic partitioning: interpretable question trees over text corpora"};
    app.require_subcommand(1);
    std::string config_path = "rtp.toml";
    CLI::Option* config_opt = app.add_option("--config", config_path, "TOML settings file");

    BuildArgs build_args;
    CLI::App* build_cmd = app.add_subcommand("build", "Build a thematic tree from a corpus");
    build_cmd->add_option("--input", build_args.input, "Corpus file (jsonl or csv)")->required();
    build_cmd->add_option("--out", build_args.out, "Output tree file")->required();
    add_build_options(build_cmd, build_args.build);
    add_backend_options(build_cmd, build_args.backend);

    ReportArgs report_args;
    CLI::App* report_cmd = app.add_subcommand("report", "Alignment report (entropy/purity per node)");
    report_cmd->add_option("--tree", report_args.tree_path, "Tree file")->required();
    report_cmd->add_option("--labels", report_args.labels_path, "Labeled corpus file")->required();
    report_cmd->add_option("--out", report_args.out, "Output CSV file")->required();

    ClassifyArgs classify_args;
    CLI::App* classify_cmd = app.add_subcommand("classify", "Route documents through a tree");
    classify_cmd->add_option("--tree", classify_args.tree_path, "Tree file")->required();
    classify_cmd->add_option("--input", classify_args.input, "Corpus of documents to classify")->required();
    classify_cmd->add_option("--labels", classify_args.labels_path, "Labeled corpus for leaf majorities");
    classify_cmd->add_option("--out", classify_args.out, "Output jsonl file (default: stdout)");
    classify_cmd->add_flag("--summarize-eval", classify_args.summarize_eval, "Summarize documents before routing");
    add_backend_options(classify_cmd, classify_args.backend);

    EvaluateArgs evaluate_args;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Repeated build-and-classify accuracy evaluation");
    evaluate_cmd->add_option("--input", evaluate_args.input, "Labeled corpus file")->required();
    evaluate_cmd->add_option("--repetitions", evaluate_args.repetitions, "Independent repetitions")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--test-size", evaluate_args.test_size, "Held-out test documents per repetition")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--variant", evaluate_args.variant, "Summarization variant: plain, T, E or TE");
    evaluate_cmd->add_option("--out", evaluate_args.out, "Output JSON report");
    add_build_options(evaluate_cmd, evaluate_args.build);
    add_backend_options(evaluate_cmd, evaluate_args.backend);

    GenerateArgs generate_args;
    CLI::App* generate_cmd = app.add_subcommand("generate", "Generate texts for a leaf theme");
    generate_cmd->add_option("--tree", generate_args.tree_path, "Tree file")->required();
    generate_cmd->add_option("--leaf", generate_args.leaf, "Target leaf id");
    generate_cmd->add_option("--strategy", generate_args.strategy, "ctg, fewshot or uncontrolled")
        ->check(CLI::IsMember({"ctg", "fewshot", "uncontrolled"}));
    generate_cmd->add_option("--context", generate_args.context, "Dataset context sentence")->required();
    generate_cmd->add_option("--count", generate_args.count, "Texts to generate")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--eval", generate_args.eval_mode, "Evaluation: node or centroid");
    generate_cmd->add_option("--reference", generate_args.reference, "Reference corpus for centroid evaluation");
    generate_cmd->add_option("--input", generate_args.input, "Corpus supplying leaf documents (fewshot)");
    generate_cmd->add_option("--out", generate_args.out, "Output jsonl file (default: stdout)");
    add_backend_options(generate_cmd, generate_args.backend);

    ExportArgs export_args;
    CLI::App* export_cmd = app.add_subcommand("export", "Export a tree as DOT or canonical JSON");
    export_cmd->add_option("--tree", export_args.tree_path, "Tree file")->required();
    export_cmd->add_option("--format", export_args.format, "dot or json")
        ->check(CLI::IsMember({"dot", "json"}));
    export_cmd->add_option("--out", export_args.out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const Settings settings(load_config_file(config_path, config_opt->count() > 0));
        if (build_cmd->parsed()) {
            resolve_build(settings, build_args.build);
            resolve_backend(settings, build_args.backend);
            build_args.build.cfg.validate();
            return run_build(build_args);
        }
        if (report_cmd->parsed()) return run_report(report_args);
        if (classify_cmd->parsed()) {
            resolve_backend(settings, classify_args.backend);
            return run_classify(classify_args);
        }
        if (evaluate_cmd->parsed()) {
            resolve_build(settings, evaluate_args.build);
            resolve_backend(settings, evaluate_args.backend);
            evaluate_args.build.cfg.validate();
            return run_evaluate(evaluate_args);
        }
        if (generate_cmd->parsed()) {
            resolve_backend(settings, generate_args.backend);
            return run_generate(generate_args);
        }
        if (export_cmd->parsed()) return run_export(export_args);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rtp::InvalidConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rtp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProvider;
    }
}

}  // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
