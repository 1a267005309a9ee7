// Command-line driver: ingest, extract-events, run, bench.
//
// Exit codes: 0 success, 1 runtime failure, 2 validation or config failure.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ucreat/ucreat.hpp"

namespace {

namespace fs = std::filesystem;

struct common_args {
    std::string config;
    std::string corpus;
};

// Config from --config (if given) with --corpus overriding the corpus path.
ucreat::run_config resolve_config(common_args const& args)
{
    ucreat::run_config cfg;
    if (!args.config.empty()) {
        cfg = ucreat::run_config::from_file(args.config);
    }
    if (!args.corpus.empty()) {
        cfg.corpus_dir = fs::absolute(args.corpus).lexically_normal().string();
    }
    if (cfg.corpus_dir.empty()) {
        throw ucreat::config_error("no corpus given (use --corpus or paths.corpus in the config)");
    }
    return cfg;
}

int cmd_ingest(common_args const& args)
{
    auto cfg = resolve_config(args);
    auto c = ucreat::load_corpus(cfg.corpus_dir, cfg.normalization());
    auto s = ucreat::compute_ingest_stats(c);
    std::cout << "corpus: " << cfg.corpus_dir << "\n"
              << "# Documents                     " << s.documents << "\n"
              << "# Candidates                    " << s.candidates << "\n"
              << "# Queries (train/val/test)      " << s.queries << " (" << s.train << "/" << s.validation << "/"
              << s.test << ")\n"
              << "# Citation links                " << s.citation_links << "\n"
              << std::fixed << std::setprecision(3)
              << "Avg. Citation Links per query   " << s.avg_citations_per_query << "\n"
              << std::setprecision(1)
              << "Avg. Document size (tokens)     " << s.avg_document_tokens << "\n";
    return 0;
}

int cmd_extract_events(common_args const& args, std::string parses, std::string out)
{
    auto cfg = resolve_config(args);
    if (parses.empty()) {
        parses = cfg.parses_dir;
    }
    if (out.empty()) {
        out = cfg.events_cache;
    }
    if (parses.empty() || out.empty()) {
        throw ucreat::config_error("extract-events needs a parses directory and an events cache directory");
    }
    auto c = ucreat::load_corpus(cfg.corpus_dir, cfg.normalization());
    auto s = ucreat::extract_events_to_cache(c, parses, out, cfg.extraction(), cfg.workers);
    std::cout << "extracted " << s.extracted << " documents, " << s.fresh << " cached, " << s.events
              << " events -> " << out << "\n";
    return 0;
}

void print_result(ucreat::run_config const& cfg, ucreat::run_result const& r)
{
    auto const& t = r.report.test_point;
    std::cout << std::fixed << std::setprecision(4) << "run " << cfg.name << ": variant=" << ucreat::to_string(cfg.kind)
              << " scorer=" << ucreat::to_string(cfg.score) << " n=" << cfg.ngram_order << "\n"
              << "selected K=" << r.report.selected_k << " test P=" << t.precision << " R=" << t.recall
              << " F1=" << t.f1 << "\n"
              << "artifacts: " << (fs::path(cfg.out_dir) / cfg.name).string() << "\n";
}

int cmd_run(common_args const& args)
{
    auto cfg = resolve_config(args);
    auto r = ucreat::run_pipeline(cfg);
    print_result(cfg, r);
    return 0;
}

int cmd_bench(common_args const& args, bool single_worker)
{
    auto cfg = resolve_config(args);
    if (single_worker) {
        cfg.workers = 1;
    }
    // Extraction is part of the measured work, so the cache is bypassed.
    auto r = ucreat::run_pipeline(cfg, false);
    print_result(cfg, r);
    std::cout << ucreat::to_json(r.timing).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Event-based prior case retrieval"};
    app.set_version_flag("--version", std::string(ucreat::version));
    app.require_subcommand(1);

    common_args args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config, "Run configuration (JSON)");
        sub->add_option("--corpus", args.corpus, "Corpus root directory");
    };

    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print its statistics");
    add_common(ingest);

    std::string parses;
    std::string events_out;
    auto* extract = app.add_subcommand("extract-events", "Extract events from parses into the event cache");
    add_common(extract);
    extract->add_option("--parses", parses, "Directory of <doc_id>.conllu files (overrides config)");
    extract->add_option("--out", events_out, "Event cache directory (overrides config)");

    auto* run = app.add_subcommand("run", "Rank all split queries, evaluate and write run artifacts");
    add_common(run);

    bool single_worker = false;
    auto* bench = app.add_subcommand("bench", "Run with stage timing");
    add_common(bench);
    bench->add_flag("--single-worker", single_worker, "Force sequential execution");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        auto code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            return cmd_ingest(args);
        }
        if (*extract) {
            return cmd_extract_events(args, parses, events_out);
        }
        if (*run) {
            return cmd_run(args);
        }
        if (*bench) {
            return cmd_bench(args, single_worker);
        }
    } catch (ucreat::validation_error const& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (ucreat::config_error const& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (ucreat::parse_error const& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
