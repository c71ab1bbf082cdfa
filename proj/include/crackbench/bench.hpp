#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crackbench/baselines.hpp"
#include "crackbench/column.hpp"
#include "crackbench/optimized.hpp"
#include "crackbench/stochastic.hpp"
#include "crackbench/workload.hpp"

namespace crackbench {

inline constexpr std::string_view kBuildId = "crackbench 0.1.0";
inline constexpr std::string_view kReportSchema = "crackbench-report v1";
inline constexpr std::string_view kTimingSchema = "crackbench-timing v1";

struct DataSource {
    std::size_t generated_n = 1'000'000;
    std::optional<std::string> file;
    FileFormat format = FileFormat::raw_i64_le;
    bool csv_skip_header = false;
};

struct RunConfig {
    AlgoTag algo = AlgoTag::crack;
    WorkloadSpec workload;
    StochasticConfig stochastic;
    SelectorConfig selector;
    MaxPieceCrackMode max_piece_mode = MaxPieceCrackMode::every_query;
    DataSource data;
    std::string out_path;  // empty: nothing written
    int repetitions = 1;
    // Master seed; generated data, the query stream and the algorithms draw
    // from fixed substreams of it.
    std::uint64_t seed = 42;

    std::uint64_t data_seed() const { return detail::splitmix64(seed ^ 0x01); }
    std::uint64_t workload_seed() const { return detail::splitmix64(seed ^ 0x02); }
    std::uint64_t algo_seed() const { return detail::splitmix64(seed ^ 0x03); }
};

// One line per executed query. Wall time lives in the in-memory report and
// the timing sidecar; the counter CSV body is reproducible byte for byte.
struct ReportRow {
    std::size_t query = 0;
    std::uint64_t elapsed_ns = 0;
    std::uint64_t cumulative_ns = 0;
    std::uint64_t tuples_touched = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t swaps = 0;
    std::uint64_t moves = 0;
    std::size_t pieces_after = 1;
    AlgoTag algorithm = AlgoTag::crack;
    std::uint64_t answer_count = 0;
    std::uint64_t answer_sum = 0;
};

struct RunReport {
    RunConfig config;
    std::vector<ReportRow> rows;
    std::string rng_name = std::string(StochasticCracker::rng_name()) + "/mod";
    double effective_selectivity = -1.0;
    // Per-repetition wall times, rep_timings[rep][query].
    std::vector<std::vector<std::uint64_t>> rep_timings;
    // One-time sort cost, set for sort runs; folded into row 0 either way.
    std::optional<CostRecord> sort_build_cost;

    std::uint64_t total_touched() const {
        std::uint64_t t = 0;
        for (const auto& r : rows) t += r.tuples_touched;
        return t;
    }
    std::uint64_t total_ns() const { return rows.empty() ? 0 : rows.back().cumulative_ns; }
};

inline nlohmann::json config_json(const RunConfig& cfg, double effective_selectivity) {
    nlohmann::json j;
    j["algo"] = std::string(to_string(cfg.algo));
    j["seed"] = cfg.seed;
    j["repetitions"] = cfg.repetitions;
    if (cfg.data.file) {
        j["data"]["file"] = *cfg.data.file;
        j["data"]["format"] = std::string(to_string(cfg.data.format));
    } else {
        j["data"]["n"] = cfg.data.generated_n;
    }
    const auto& w = cfg.workload;
    j["workload"]["kind"] = std::string(to_string(w.kind));
    if (w.selectivity)
        j["workload"]["selectivity"] = *w.selectivity;
    else
        j["workload"]["selectivity"] = "rand";
    j["workload"]["effective_selectivity"] = effective_selectivity;
    j["workload"]["queries"] = w.query_count;
    j["workload"]["domain_min"] = w.domain_min;
    j["workload"]["domain_max"] = w.domain_max;
    j["workload"]["stride"] = w.stride;
    j["workload"]["skew_exponent"] = w.skew_exponent;
    j["stochastic"]["crack_at_size"] = cfg.stochastic.crack_at_size;
    j["stochastic"]["progressive_fraction"] = cfg.stochastic.progressive_fraction;
    j["stochastic"]["flip_flop"] = cfg.stochastic.flip_flop_enabled;
    j["selector"]["window"] = cfg.selector.window;
    j["selector"]["monotone_threshold"] = cfg.selector.monotone_threshold;
    j["max_piece_crack_mode"] = std::string(to_string(cfg.max_piece_mode));
    return j;
}

inline std::vector<Key> make_dataset(const RunConfig& cfg) {
    if (cfg.data.file) return load_file(*cfg.data.file, cfg.data.format, cfg.data.csv_skip_header);
    std::mt19937_64 rng(cfg.data_seed());
    const Key span = cfg.workload.span();
    std::vector<Key> out(cfg.data.generated_n);
    for (auto& v : out)
        v = cfg.workload.domain_min + static_cast<Key>(rng() % static_cast<std::uint64_t>(span));
    return out;
}

namespace detail {

// Uniform per-query access to whichever algorithm a run drives.
class AlgoDriver {
public:
    AlgoDriver(const RunConfig& cfg, std::vector<Key> data) : algo_(cfg.algo) {
        StochasticConfig sc = cfg.stochastic;
        sc.rng_seed = cfg.algo_seed();
        switch (algo_) {
            case AlgoTag::scan:
            case AlgoTag::sort:
                source_ = std::move(data);
                break;
            case AlgoTag::optimized:
                opt_.emplace(std::move(data), OptimizedConfig{cfg.algo_seed(), cfg.max_piece_mode});
                break;
            case AlgoTag::hybrid:
                col_ = CrackedColumn::load(std::move(data));
                hybrid_.emplace(sc, cfg.selector);
                break;
            case AlgoTag::crack:
                col_ = CrackedColumn::load(std::move(data));
                break;
            default:
                col_ = CrackedColumn::load(std::move(data));
                stoch_.emplace(sc);
                break;
        }
    }

    QueryAnswer query(const RangeQuery& q) {
        switch (algo_) {
            case AlgoTag::scan:
                return query_scan(source_, q, &acc_);
            case AlgoTag::sort:
                if (!sorted_) {
                    sorted_ = build_sorted(std::move(source_));
                    acc_ += sorted_->built_cost;
                }
                return query_sorted(*sorted_, q, &acc_);
            case AlgoTag::crack:
                return col_.query(q);
            case AlgoTag::optimized:
                return opt_->query(q);
            case AlgoTag::hybrid:
                return hybrid_->query(col_, q);
            default:
                return stoch_->query(algo_, col_, q);
        }
    }

    CostRecord totals() const {
        switch (algo_) {
            case AlgoTag::scan:
            case AlgoTag::sort:
                return acc_;
            case AlgoTag::optimized:
                return opt_->column().totals();
            default:
                return col_.totals();
        }
    }

    std::size_t piece_count() const {
        switch (algo_) {
            case AlgoTag::scan:
            case AlgoTag::sort:
                return 1;
            case AlgoTag::optimized:
                return opt_->initialized() ? opt_->column().index().piece_count() : 1;
            default:
                return col_.index().piece_count();
        }
    }

    AlgoTag chosen() const { return algo_ == AlgoTag::hybrid ? hybrid_->last_choice() : algo_; }

    // Post-run verification hooks: the cracked column when one exists, the
    // sorted buffer for sort runs.
    const CrackedColumn* column_for_checks() const {
        switch (algo_) {
            case AlgoTag::scan:
            case AlgoTag::sort:
                return nullptr;
            case AlgoTag::optimized:
                return opt_->initialized() ? &opt_->column() : nullptr;
            default:
                return &col_;
        }
    }
    const SortedColumn* sorted_for_checks() const { return sorted_ ? &*sorted_ : nullptr; }

    std::span<const Key> view_container() const {
        switch (algo_) {
            case AlgoTag::scan:
                return {};
            case AlgoTag::sort:
                return sorted_ ? std::span<const Key>(sorted_->values) : std::span<const Key>{};
            case AlgoTag::optimized:
                return opt_->column().values();
            default:
                return col_.values();
        }
    }

private:
    AlgoTag algo_;
    std::vector<Key> source_;
    CostRecord acc_;
    std::optional<SortedColumn> sorted_;
    CrackedColumn col_;
    std::optional<StochasticCracker> stoch_;
    std::optional<OptimizedCracker> opt_;
    std::optional<HybridCracker> hybrid_;
};

inline std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

inline std::string timing_path(const std::string& out_path) {
    if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv")
        return out_path.substr(0, out_path.size() - 4) + ".timing.csv";
    return out_path + ".timing.csv";
}

inline std::string report_body(const RunReport& report) {
    std::ostringstream os;
    os << "query,tuples_touched,comparisons,swaps,moves,pieces_after,algorithm,answer_count,answer_sum\n";
    for (const auto& r : report.rows)
        os << r.query << ',' << r.tuples_touched << ',' << r.comparisons << ',' << r.swaps << ','
           << r.moves << ',' << r.pieces_after << ',' << to_string(r.algorithm) << ',' << r.answer_count
           << ',' << r.answer_sum << '\n';
    return os.str();
}

inline void write_report_csv(const RunReport& report, std::ostream& os) {
    os << "# " << kReportSchema << '\n';
    os << "# config " << config_json(report.config, report.effective_selectivity).dump() << '\n';
    os << "# rng " << report.rng_name << '\n';
    os << "# build " << kBuildId << '\n';
    os << "# generated " << detail::iso_timestamp() << '\n';
    os << report_body(report);
}

inline void write_timing_csv(const RunReport& report, std::ostream& os) {
    os << "# " << kTimingSchema << '\n';
    os << "# generated " << detail::iso_timestamp() << '\n';
    os << "rep,query,elapsed_ns,cumulative_ns\n";
    for (std::size_t rep = 0; rep < report.rep_timings.size(); ++rep) {
        std::uint64_t cum = 0;
        for (std::size_t i = 0; i < report.rep_timings[rep].size(); ++i) {
            cum += report.rep_timings[rep][i];
            os << rep << ',' << i << ',' << report.rep_timings[rep][i] << ',' << cum << '\n';
        }
    }
}

// Executes the configured query sequence against a fresh column (once per
// repetition; counters must replay identically, wall time may not) and
// optionally writes the counter CSV plus the timing sidecar.
inline RunReport run(const RunConfig& cfg) {
    cfg.workload.validate();
    cfg.stochastic.validate();
    if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");

    WorkloadSpec wl = cfg.workload;
    wl.seed = cfg.workload_seed();
    const std::vector<RangeQuery> queries = gen_workload(wl);
    const std::vector<Key> data = make_dataset(cfg);

    RunReport report;
    report.config = cfg;
    report.effective_selectivity = wl.effective_selectivity();

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        detail::AlgoDriver driver(cfg, data);
        std::vector<ReportRow> rows;
        rows.reserve(queries.size());
        std::vector<std::uint64_t> timing;
        timing.reserve(queries.size());
        CostRecord prev;
        std::uint64_t cum_ns = 0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            const QueryAnswer answer = driver.query(queries[i]);
            const auto ns = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
            const CostRecord now = driver.totals();
            const CostRecord d = now.delta_since(prev);
            prev = now;
            cum_ns += ns;
            ReportRow row;
            row.query = i;
            row.elapsed_ns = ns;
            row.cumulative_ns = cum_ns;
            row.tuples_touched = d.tuples_touched;
            row.comparisons = d.comparisons;
            row.swaps = d.swaps;
            row.moves = d.moves;
            row.pieces_after = driver.piece_count();
            row.algorithm = driver.chosen();
            row.answer_count = answer.count();
            row.answer_sum = answer.sum(driver.view_container());
            rows.push_back(row);
            timing.push_back(ns);
        }
        if (rep == 0) {
            report.rows = std::move(rows);
            if (const auto* sc = driver.sorted_for_checks()) report.sort_build_cost = sc->built_cost;
        }
        report.rep_timings.push_back(std::move(timing));
    }

    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw LoadError("cannot write " + cfg.out_path);
        write_report_csv(report, out);
        std::ofstream tout(timing_path(cfg.out_path));
        if (!tout) throw LoadError("cannot write " + timing_path(cfg.out_path));
        write_timing_csv(report, tout);
    }
    return report;
}

// Reads back a counter CSV produced by write_report_csv. Wall-time fields
// stay zero unless the timing sidecar is folded in separately.
inline RunReport read_report_csv(std::istream& is) {
    RunReport report;
    std::string line;
    bool saw_schema = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find(kReportSchema) != std::string::npos) saw_schema = true;
            const std::string config_prefix = "# config ";
            if (line.rfind(config_prefix, 0) == 0) {
                const auto j = nlohmann::json::parse(line.substr(config_prefix.size()));
                report.config.algo = algo_from_string(j.at("algo").get<std::string>());
                report.config.seed = j.at("seed").get<std::uint64_t>();
                const auto& w = j.at("workload");
                report.config.workload.kind = workload_from_string(w.at("kind").get<std::string>());
                if (w.at("selectivity").is_string())
                    report.config.workload.selectivity = std::nullopt;
                else
                    report.config.workload.selectivity = w.at("selectivity").get<double>();
                report.config.workload.query_count = w.at("queries").get<std::size_t>();
                report.config.workload.domain_min = w.at("domain_min").get<Key>();
                report.config.workload.domain_max = w.at("domain_max").get<Key>();
                report.effective_selectivity = w.at("effective_selectivity").get<double>();
                if (j.at("data").contains("n")) report.config.data.generated_n = j["data"]["n"].get<std::size_t>();
            }
            continue;
        }
        if (line.rfind("query,", 0) == 0) continue;  // column header
        char algo_buf[16] = {0};
        unsigned long long query = 0, touched = 0, cmps = 0, swaps = 0, moves = 0, pieces = 0, count = 0,
                           sum = 0;
        const int got = std::sscanf(line.c_str(), "%llu,%llu,%llu,%llu,%llu,%llu,%15[^,],%llu,%llu", &query,
                                    &touched, &cmps, &swaps, &moves, &pieces, algo_buf, &count, &sum);
        if (got != 9) throw LoadError("malformed report row: " + line);
        ReportRow row;
        row.query = static_cast<std::size_t>(query);
        row.tuples_touched = touched;
        row.comparisons = cmps;
        row.swaps = swaps;
        row.moves = moves;
        row.pieces_after = static_cast<std::size_t>(pieces);
        row.algorithm = algo_from_string(algo_buf);
        row.answer_count = count;
        row.answer_sum = sum;
        report.rows.push_back(row);
    }
    if (!saw_schema) throw LoadError("missing report schema header");
    return report;
}

struct SummaryCell {
    bool present = false;
    std::uint64_t total_touched = 0;
    std::uint64_t total_ns = 0;
};

struct Summary {
    std::vector<std::string> row_labels;  // algorithms
    std::vector<std::string> col_labels;  // workload/selectivity cells
    std::vector<std::vector<SummaryCell>> cells;
    std::vector<std::string> warnings;
};

inline std::string selectivity_label(const std::optional<double>& sel) {
    if (!sel) return "rand";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *sel);
    return buf;
}

// Collapses per-run reports into the cumulative-cost grids: algorithms as
// rows, workload x selectivity as columns.
inline Summary summarize(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("summarize: need at least one report");
    Summary s;
    std::vector<std::size_t> ns;
    for (const auto& r : reports) {
        const std::string col =
            std::string(to_string(r.config.workload.kind)) + "/" + selectivity_label(r.config.workload.selectivity);
        const std::string row = std::string(to_string(r.config.algo));
        if (std::find(s.col_labels.begin(), s.col_labels.end(), col) == s.col_labels.end())
            s.col_labels.push_back(col);
        if (std::find(s.row_labels.begin(), s.row_labels.end(), row) == s.row_labels.end())
            s.row_labels.push_back(row);
        const std::size_t n = r.config.data.file ? 0 : r.config.data.generated_n;
        if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
    }
    if (ns.size() > 1) s.warnings.push_back("mixed column sizes across reports");
    s.cells.assign(s.row_labels.size(), std::vector<SummaryCell>(s.col_labels.size()));
    for (const auto& r : reports) {
        const std::string col =
            std::string(to_string(r.config.workload.kind)) + "/" + selectivity_label(r.config.workload.selectivity);
        const std::string row = std::string(to_string(r.config.algo));
        const auto ci = static_cast<std::size_t>(
            std::find(s.col_labels.begin(), s.col_labels.end(), col) - s.col_labels.begin());
        const auto ri = static_cast<std::size_t>(
            std::find(s.row_labels.begin(), s.row_labels.end(), row) - s.row_labels.begin());
        auto& cell = s.cells[ri][ci];
        cell.present = true;
        cell.total_touched += r.total_touched();
        cell.total_ns += r.total_ns();
    }
    return s;
}

enum class SummaryMetric { tuples_touched, elapsed_ns };

inline std::string summary_csv(const Summary& s, SummaryMetric metric) {
    std::ostringstream os;
    os << "algo";
    for (const auto& c : s.col_labels) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < s.row_labels.size(); ++r) {
        os << s.row_labels[r];
        for (std::size_t c = 0; c < s.col_labels.size(); ++c) {
            os << ',';
            if (s.cells[r][c].present)
                os << (metric == SummaryMetric::tuples_touched ? s.cells[r][c].total_touched
                                                               : s.cells[r][c].total_ns);
        }
        os << '\n';
    }
    return os.str();
}

inline std::string summary_text(const Summary& s, SummaryMetric metric, std::string_view title) {
    std::ostringstream os;
    os << title << '\n';
    for (const auto& w : s.warnings) os << "warning: " << w << '\n';
    std::size_t label_w = 4;
    for (const auto& r : s.row_labels) label_w = std::max(label_w, r.size());
    std::vector<std::size_t> widths;
    for (const auto& c : s.col_labels) widths.push_back(std::max<std::size_t>(c.size(), 12));
    os << std::left << std::setw(static_cast<int>(label_w + 2)) << "algo";
    for (std::size_t c = 0; c < s.col_labels.size(); ++c)
        os << std::right << std::setw(static_cast<int>(widths[c] + 2)) << s.col_labels[c];
    os << '\n';
    for (std::size_t r = 0; r < s.row_labels.size(); ++r) {
        os << std::left << std::setw(static_cast<int>(label_w + 2)) << s.row_labels[r];
        for (std::size_t c = 0; c < s.col_labels.size(); ++c) {
            std::string v = "-";
            if (s.cells[r][c].present)
                v = std::to_string(metric == SummaryMetric::tuples_touched ? s.cells[r][c].total_touched
                                                                           : s.cells[r][c].total_ns);
            os << std::right << std::setw(static_cast<int>(widths[c] + 2)) << v;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace crackbench
