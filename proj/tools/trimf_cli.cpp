// SPDX-License-Identifier: Apache-2.0
//
// Batch command-line interface. All model functionality goes through the C
// API in trimf.h; this file only handles argument parsing, config merging,
// and file plumbing. Exit code 0 on success, otherwise the trimf status
// code (see trimf.h), or 64 for bad command-line usage.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trimf.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kUsageError = 64;

struct StringOut {
    char* s = nullptr;
    ~StringOut() { trimf_string_free(s); }
    std::string str() const { return s ? std::string(s) : std::string(); }
};

int fail(int code) {
    std::cerr << "error: " << trimf_last_error() << "\n";
    return code;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot read " << path << "\n";
        std::exit(TRIMF_ERR_IO);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(TRIMF_ERR_IO);
    }
}

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

using CorpusPtr = std::unique_ptr<trimf_corpus, decltype(&trimf_corpus_free)>;
using ModelPtr = std::unique_ptr<trimf_model, decltype(&trimf_model_free)>;

CorpusPtr load_corpus_or_exit(const std::string& path) {
    trimf_corpus* c = nullptr;
    int rc = trimf_corpus_load(path.c_str(), &c);
    if (rc != TRIMF_OK) std::exit(fail(rc));
    return CorpusPtr(c, trimf_corpus_free);
}

ModelPtr load_model_or_exit(const std::string& path) {
    trimf_model* m = nullptr;
    int rc = trimf_model_load(path.c_str(), &m);
    if (rc != TRIMF_OK) std::exit(fail(rc));
    return ModelPtr(m, trimf_model_free);
}

double model_threshold(const trimf_model* m) {
    StringOut cfg;
    if (trimf_model_config(m, &cfg.s) != TRIMF_OK) return 0.5;
    return ordered_json::parse(cfg.str()).value("relation_threshold", 0.5);
}

// pull one number out of an eval report: relation micro f1
double relation_f1(const std::string& report_json) {
    return ordered_json::parse(report_json).at("relation").at("f1").get<double>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TriMF trainer and extractor"};
    app.require_subcommand(1);

    // --- train ---
    auto* train = app.add_subcommand("train", "two-stage training run");
    std::string tr_config, tr_corpus, tr_out = ".";
    std::vector<std::string> tr_sets;
    train->add_option("--config", tr_config, "config JSON file");
    train->add_option("--corpus", tr_corpus, "training corpus")->required();
    train->add_option("--out", tr_out, "output directory");
    train->add_option("--set", tr_sets,
                      "config override key=value (value parsed as JSON); "
                      "repeatable");
    std::optional<int64_t> tr_stage1, tr_stage2, tr_batch;
    std::optional<double> tr_lr;
    std::optional<uint64_t> tr_seed;
    train->add_option("--stage1-epochs", tr_stage1);
    train->add_option("--stage2-epochs", tr_stage2);
    train->add_option("--batch-size", tr_batch);
    train->add_option("--peak-lr", tr_lr);
    train->add_option("--seed", tr_seed);

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "score a corpus");
    std::string ev_ckpt, ev_corpus, ev_regime = "strict", ev_avg = "micro";
    std::string ev_sweep, ev_out;
    std::optional<double> ev_threshold;
    eval->add_option("--checkpoint", ev_ckpt)->required();
    eval->add_option("--corpus", ev_corpus)->required();
    eval->add_option("--regime", ev_regime, "strict | boundary | both");
    eval->add_option("--averaging", ev_avg, "micro | macro");
    eval->add_option("--threshold", ev_threshold,
                     "relation filter (default: checkpoint value)");
    eval->add_option("--threshold-sweep", ev_sweep,
                     "lo:hi:step, prints threshold/relation-F1 rows");
    eval->add_option("--out", ev_out, "write report JSON here");

    // --- predict ---
    auto* predict = app.add_subcommand("predict", "extract entities and relations");
    std::string pr_ckpt, pr_corpus, pr_out;
    std::optional<double> pr_threshold;
    predict->add_option("--checkpoint", pr_ckpt)->required();
    predict->add_option("--corpus", pr_corpus)->required();
    predict->add_option("--threshold", pr_threshold);
    predict->add_option("--out", pr_out);

    // --- triggers ---
    auto* triggers = app.add_subcommand("triggers", "top-k trigger words per relation");
    std::string tg_ckpt, tg_corpus, tg_stopwords, tg_out;
    size_t tg_k = 5;
    std::optional<double> tg_threshold;
    triggers->add_option("--checkpoint", tg_ckpt)->required();
    triggers->add_option("--corpus", tg_corpus)->required();
    triggers->add_option("--k", tg_k, "ranking size (default 5)");
    triggers->add_option("--threshold", tg_threshold);
    triggers->add_option("--stopwords", tg_stopwords, "one word per line");
    triggers->add_option("--out", tg_out);

    // --- dump-attention ---
    auto* dump = app.add_subcommand("dump-attention",
                                    "memory-flow weights, raw and entity-masked");
    std::string da_ckpt, da_corpus, da_out;
    dump->add_option("--checkpoint", da_ckpt)->required();
    dump->add_option("--corpus", da_corpus)->required();
    dump->add_option("--out", da_out);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::string sy_out;
    size_t sy_sentences = 50, sy_ents = 3, sy_rels = 2, sy_triggers = 2;
    uint64_t sy_seed = 1;
    synth->add_option("--out", sy_out, "corpus JSON path")->required();
    synth->add_option("--sentences", sy_sentences);
    synth->add_option("--entity-types", sy_ents);
    synth->add_option("--relation-types", sy_rels);
    synth->add_option("--triggers-per-relation", sy_triggers);
    synth->add_option("--seed", sy_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    if (train->parsed()) {
        ordered_json cfg = ordered_json::object();
        if (!tr_config.empty()) cfg = ordered_json::parse(read_file(tr_config));
        if (tr_stage1) cfg["stage1_epochs"] = *tr_stage1;
        if (tr_stage2) cfg["stage2_epochs"] = *tr_stage2;
        if (tr_batch) cfg["batch_size"] = *tr_batch;
        if (tr_lr) cfg["peak_lr"] = *tr_lr;
        if (tr_seed) cfg["seed"] = *tr_seed;
        for (const std::string& kv : tr_sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: --set expects key=value, got " << kv << "\n";
                return kUsageError;
            }
            try {
                cfg[kv.substr(0, eq)] = ordered_json::parse(kv.substr(eq + 1));
            } catch (const std::exception&) {
                cfg[kv.substr(0, eq)] = kv.substr(eq + 1);  // bare string value
            }
        }
        std::string corpus_text = read_file(tr_corpus);
        auto corpus = load_corpus_or_exit(tr_corpus);
        std::string started = now_iso8601();

        trimf_model* model_raw = nullptr;
        StringOut metrics;
        int rc = trimf_train(cfg.dump().c_str(), corpus.get(), &model_raw,
                             &metrics.s);
        if (rc != TRIMF_OK) return fail(rc);
        ModelPtr model(model_raw, trimf_model_free);

        fs::create_directories(tr_out);
        std::string ckpt_path = (fs::path(tr_out) / "checkpoint.json").string();
        rc = trimf_model_save(model.get(), ckpt_path.c_str());
        if (rc != TRIMF_OK) return fail(rc);
        write_file((fs::path(tr_out) / "metrics.log").string(), metrics.str());

        StringOut resolved;
        rc = trimf_model_config(model.get(), &resolved.s);
        if (rc != TRIMF_OK) return fail(rc);
        ordered_json history = ordered_json::parse(metrics.str());
        ordered_json manifest;
        manifest["config"] = ordered_json::parse(resolved.str());
        manifest["corpus_path"] = tr_corpus;
        manifest["corpus_fnv1a"] = fnv1a_hex(corpus_text);
        manifest["started_at"] = started;
        manifest["finished_at"] = now_iso8601();
        manifest["epochs"] = history.size();
        manifest["final_loss"] =
            history.empty() ? 0.0 : history.back().at("mean_loss").get<double>();
        write_file((fs::path(tr_out) / "manifest.json").string(),
                   manifest.dump(2) + "\n");
        std::cout << "checkpoint: " << ckpt_path << "\n";
        return 0;
    }

    if (eval->parsed()) {
        auto model = load_model_or_exit(ev_ckpt);
        auto corpus = load_corpus_or_exit(ev_corpus);
        double threshold = ev_threshold.value_or(model_threshold(model.get()));
        if (ev_regime != "strict" && ev_regime != "boundary" &&
            ev_regime != "both") {
            std::cerr << "error: unknown regime " << ev_regime << "\n";
            return kUsageError;
        }
        if (!ev_sweep.empty()) {
            double lo, hi, step;
            if (std::sscanf(ev_sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) !=
                    3 || step <= 0) {
                std::cerr << "error: --threshold-sweep expects lo:hi:step\n";
                return kUsageError;
            }
            std::string regime = ev_regime == "both" ? "strict" : ev_regime;
            std::ostringstream rows;
            for (double t = lo; t <= hi + 1e-12; t += step) {
                StringOut report;
                int rc = trimf_evaluate(model.get(), corpus.get(), regime.c_str(),
                                        ev_avg.c_str(), t, &report.s);
                if (rc != TRIMF_OK) return fail(rc);
                rows << t << "\t" << relation_f1(report.str()) << "\n";
            }
            emit(rows.str(), ev_out);
            return 0;
        }
        std::vector<std::string> regimes =
            ev_regime == "both" ? std::vector<std::string>{"strict", "boundary"}
                                : std::vector<std::string>{ev_regime};
        ordered_json out = ordered_json::array();
        for (const std::string& regime : regimes) {
            StringOut report;
            int rc = trimf_evaluate(model.get(), corpus.get(), regime.c_str(),
                                    ev_avg.c_str(), threshold, &report.s);
            if (rc != TRIMF_OK) return fail(rc);
            out.push_back(ordered_json::parse(report.str()));
        }
        std::string text =
            (out.size() == 1 ? out[0].dump(2) : out.dump(2)) + "\n";
        emit(text, ev_out);
        return 0;
    }

    if (predict->parsed()) {
        auto model = load_model_or_exit(pr_ckpt);
        auto corpus = load_corpus_or_exit(pr_corpus);
        double threshold = pr_threshold.value_or(model_threshold(model.get()));
        StringOut out;
        int rc = trimf_predict(model.get(), corpus.get(), threshold, &out.s);
        if (rc != TRIMF_OK) return fail(rc);
        emit(out.str(), pr_out);
        return 0;
    }

    if (triggers->parsed()) {
        auto model = load_model_or_exit(tg_ckpt);
        auto corpus = load_corpus_or_exit(tg_corpus);
        double threshold = tg_threshold.value_or(model_threshold(model.get()));
        StringOut out;
        int rc = trimf_triggers(model.get(), corpus.get(), threshold, tg_k,
                                tg_stopwords.empty() ? nullptr
                                                     : tg_stopwords.c_str(),
                                &out.s);
        if (rc != TRIMF_OK) return fail(rc);
        emit(out.str(), tg_out);
        return 0;
    }

    if (dump->parsed()) {
        auto model = load_model_or_exit(da_ckpt);
        auto corpus = load_corpus_or_exit(da_corpus);
        StringOut out;
        int rc = trimf_dump_attention(model.get(), corpus.get(), &out.s);
        if (rc != TRIMF_OK) return fail(rc);
        emit(out.str(), da_out);
        return 0;
    }

    if (synth->parsed()) {
        ordered_json spec;
        spec["n_sentences"] = sy_sentences;
        spec["n_entity_types"] = sy_ents;
        spec["n_relation_types"] = sy_rels;
        spec["triggers_per_relation"] = sy_triggers;
        spec["seed"] = sy_seed;
        trimf_corpus* corpus_raw = nullptr;
        int rc = trimf_corpus_synth(spec.dump().c_str(), &corpus_raw);
        if (rc != TRIMF_OK) return fail(rc);
        CorpusPtr corpus(corpus_raw, trimf_corpus_free);
        rc = trimf_corpus_save(corpus.get(), sy_out.c_str());
        if (rc != TRIMF_OK) return fail(rc);
        std::cout << "corpus: " << sy_out << "\n";
        return 0;
    }

    return kUsageError;
}
