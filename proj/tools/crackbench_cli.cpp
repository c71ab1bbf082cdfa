// crackbench: adaptive-indexing microbenchmark harness.
//
// Modes:
//   crackbench [flags]            run one algorithm x workload cell
//   crackbench grid [flags]       run an algorithm x workload x selectivity grid
//   crackbench summarize <csv>..  fold per-run reports into summary grids
//
// Exit codes: 0 success, 1 I/O error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crackbench/crackbench.hpp"

using namespace crackbench;

namespace {

std::optional<double> parse_selectivity(const std::string& s) {
    if (s == "rand") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("--selectivity expects a fraction in (0,1] or 'rand'");
    }
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CRACKBENCH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("CRACKBENCH_SEED is not an integer");
        }
    }
    return 42;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// Folds the timing sidecar (when present) back into a report read from disk
// so summaries can show wall time next to the counters.
RunReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path);
    RunReport report = read_report_csv(in);
    std::ifstream tin(timing_path(path));
    if (tin) {
        std::string line;
        while (std::getline(tin, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("rep,", 0) == 0) continue;
            std::size_t rep = 0, query = 0;
            unsigned long long ns = 0, cum = 0;
            if (std::sscanf(line.c_str(), "%zu,%zu,%llu,%llu", &rep, &query, &ns, &cum) != 4) continue;
            if (rep == 0 && query < report.rows.size()) {
                report.rows[query].elapsed_ns = ns;
                report.rows[query].cumulative_ns = cum;
            }
        }
    }
    return report;
}

struct CliOptions {
    std::string algo = "crack";
    std::string workload = "random";
    std::string selectivity = "0.01";
    std::size_t n = 1'000'000;
    std::size_t queries = 1000;
    std::uint64_t seed = 42;
    std::size_t crack_at_size = 32768;
    double progressive_p = 1.0;
    bool flip_flop = false;
    std::string data_file;
    std::string data_format = "raw_i64_le";
    std::string out;
    int reps = 1;
    std::string max_piece_mode = "every-query";
    std::size_t selector_window = 32;
    double selector_ratio = 0.9;
    Key domain_min = 0;
    Key domain_max = 100'000'000;
    Key stride = 0;
    double skew_exponent = 1.0;
};

RunConfig to_run_config(const CliOptions& o) {
    RunConfig cfg;
    cfg.algo = algo_from_string(o.algo);
    cfg.workload.kind = workload_from_string(o.workload);
    cfg.workload.selectivity = parse_selectivity(o.selectivity);
    cfg.workload.query_count = o.queries;
    cfg.workload.domain_min = o.domain_min;
    cfg.workload.domain_max = o.domain_max;
    cfg.workload.stride = o.stride;
    cfg.workload.skew_exponent = o.skew_exponent;
    cfg.stochastic.crack_at_size = o.crack_at_size;
    cfg.stochastic.progressive_fraction = o.progressive_p;
    cfg.stochastic.flip_flop_enabled = o.flip_flop;
    cfg.selector.window = o.selector_window;
    cfg.selector.monotone_threshold = o.selector_ratio;
    if (o.max_piece_mode == "first-only")
        cfg.max_piece_mode = MaxPieceCrackMode::first_only;
    else if (o.max_piece_mode == "every-query")
        cfg.max_piece_mode = MaxPieceCrackMode::every_query;
    else
        throw std::invalid_argument("--max-piece-crack-mode must be first-only or every-query");
    cfg.data.generated_n = o.n;
    if (!o.data_file.empty()) {
        cfg.data.file = o.data_file;
        if (o.data_format == "raw_i64_le") {
            cfg.data.format = FileFormat::raw_i64_le;
        } else if (o.data_format == "csv") {
            cfg.data.format = FileFormat::csv;
        } else if (o.data_format == "csv_header") {
            cfg.data.format = FileFormat::csv;
            cfg.data.csv_skip_header = true;
        } else {
            throw std::invalid_argument("--data-format must be raw_i64_le, csv or csv_header");
        }
    }
    cfg.out_path = o.out;
    cfg.repetitions = o.reps;
    cfg.seed = o.seed;
    return cfg;
}

int run_single(const CliOptions& opts, bool dump_config) {
    const RunConfig cfg = to_run_config(opts);
    if (dump_config) {
        std::cout << config_json(cfg, cfg.workload.effective_selectivity()).dump(2) << '\n';
        return 0;
    }
    const RunReport report = run(cfg);
    std::cout << "algo=" << to_string(cfg.algo) << " queries=" << report.rows.size()
              << " tuples_touched=" << report.total_touched() << " elapsed_ms=" << report.total_ns() / 1000000
              << '\n';
    if (!cfg.out_path.empty())
        std::cout << "wrote " << cfg.out_path << " and " << timing_path(cfg.out_path) << '\n';
    return 0;
}

int run_grid(const CliOptions& opts, const std::string& outdir, const std::string& algos_csv,
             const std::string& workloads_csv, const std::string& selectivities_csv) {
    std::filesystem::create_directories(outdir);
    std::vector<RunReport> reports;
    for (const auto& wl : split_list(workloads_csv)) {
        for (const auto& sel : split_list(selectivities_csv)) {
            for (const auto& algo : split_list(algos_csv)) {
                CliOptions cell = opts;
                cell.algo = algo;
                cell.workload = wl;
                cell.selectivity = sel;
                cell.out = (std::filesystem::path(outdir) / (algo + "_" + wl + "_" + sel + ".csv")).string();
                const RunConfig cfg = to_run_config(cell);
                std::cerr << "running " << algo << " " << wl << "/" << sel << "...\n";
                reports.push_back(run(cfg));
            }
        }
    }
    const Summary s = summarize(reports);
    std::ofstream(std::filesystem::path(outdir) / "summary_touched.csv")
        << summary_csv(s, SummaryMetric::tuples_touched);
    std::ofstream(std::filesystem::path(outdir) / "summary_time.csv") << summary_csv(s, SummaryMetric::elapsed_ns);
    std::cout << summary_text(s, SummaryMetric::tuples_touched, "cumulative tuples touched") << '\n';
    std::cout << summary_text(s, SummaryMetric::elapsed_ns, "cumulative wall time (ns)") << '\n';
    std::cout << "wrote per-run CSVs and summaries under " << outdir << '\n';
    return 0;
}

int run_summarize(const std::vector<std::string>& files, const std::string& out_prefix) {
    std::vector<RunReport> reports;
    reports.reserve(files.size());
    for (const auto& f : files) reports.push_back(load_report(f));
    const Summary s = summarize(reports);
    std::cout << summary_text(s, SummaryMetric::tuples_touched, "cumulative tuples touched") << '\n';
    std::cout << summary_text(s, SummaryMetric::elapsed_ns, "cumulative wall time (ns)") << '\n';
    if (!out_prefix.empty()) {
        std::ofstream(out_prefix + "_touched.csv") << summary_csv(s, SummaryMetric::tuples_touched);
        std::ofstream(out_prefix + "_time.csv") << summary_csv(s, SummaryMetric::elapsed_ns);
        std::cout << "wrote " << out_prefix << "_touched.csv and " << out_prefix << "_time.csv\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive range-query indexing microbenchmark"};
    app.require_subcommand(0, 1);

    CliOptions opts;
    bool dump_config = false;
    app.add_option("--algo", opts.algo,
                   "scan|sort|crack|ddc|ddr|dd1c|dd1r|mdd1r|pmdd1r|optimized|hybrid")
        ->capture_default_str();
    app.add_option("--workload", opts.workload, "random|sequential|skewed")->capture_default_str();
    app.add_option("--selectivity", opts.selectivity, "fraction in (0,1] or 'rand'")->capture_default_str();
    app.add_option("--n", opts.n, "generated column size")->capture_default_str();
    app.add_option("--queries", opts.queries, "queries per run")->capture_default_str();
    app.add_option("--seed", opts.seed, "master seed (falls back to CRACKBENCH_SEED)");
    app.add_option("--crack-at-size", opts.crack_at_size, "piece size threshold for auxiliary cracks")
        ->capture_default_str();
    app.add_option("--progressive-p", opts.progressive_p, "pmdd1r swap budget fraction")->capture_default_str();
    app.add_flag("--flip-flop", opts.flip_flop, "route small pieces back to plain cracking");
    app.add_option("--data-file", opts.data_file, "load the column from a file instead of generating");
    app.add_option("--data-format", opts.data_format, "raw_i64_le|csv|csv_header")->capture_default_str();
    app.add_option("--out", opts.out, "counter CSV path (timing sidecar written next to it)");
    app.add_option("--reps", opts.reps, "repetitions of the full run")->capture_default_str();
    app.add_option("--max-piece-crack-mode", opts.max_piece_mode, "first-only|every-query")
        ->capture_default_str();
    app.add_option("--selector-window", opts.selector_window, "hybrid selector window")->capture_default_str();
    app.add_option("--selector-ratio", opts.selector_ratio, "hybrid monotone-ratio threshold")
        ->capture_default_str();
    app.add_option("--domain-min", opts.domain_min, "key domain lower bound")->capture_default_str();
    app.add_option("--domain-max", opts.domain_max, "key domain upper bound (exclusive)")->capture_default_str();
    app.add_option("--stride", opts.stride, "sequential advance per query (0: span/queries)")
        ->capture_default_str();
    app.add_option("--skew-exponent", opts.skew_exponent, "skewed workload exponent")->capture_default_str();
    app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

    auto* grid = app.add_subcommand("grid", "run a full algorithm x workload x selectivity grid");
    grid->fallthrough();  // grid cells reuse the top-level run flags
    std::string outdir = "grid_out";
    std::string algos = "scan,sort,crack,dd1r,pmdd1r";
    std::string workloads = "random,sequential";
    std::string selectivities = "1e-4,1e-2,0.1,0.5,rand";
    grid->add_option("--outdir", outdir, "output directory")->capture_default_str();
    grid->add_option("--algos", algos, "comma-separated algorithm tags")->capture_default_str();
    grid->add_option("--workloads", workloads, "comma-separated workload kinds")->capture_default_str();
    grid->add_option("--selectivities", selectivities, "comma-separated fractions or 'rand'")
        ->capture_default_str();

    auto* summ = app.add_subcommand("summarize", "fold per-run report CSVs into summary grids");
    std::vector<std::string> files;
    std::string out_prefix;
    summ->add_option("files", files, "report CSVs produced by --out")->required();
    summ->add_option("--out-prefix", out_prefix, "also write <prefix>_touched.csv / <prefix>_time.csv");

    try {
        opts.seed = default_seed();
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (grid->parsed()) {
            // The progressive grid row is meant to run on a tenth of the
            // piece budget unless explicitly overridden.
            CliOptions gopts = opts;
            if (app.count("--progressive-p") == 0) gopts.progressive_p = 0.1;
            return run_grid(gopts, outdir, algos, workloads, selectivities);
        }
        if (summ->parsed()) return run_summarize(files, out_prefix);
        return run_single(opts, dump_config);
    } catch (const LoadError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
