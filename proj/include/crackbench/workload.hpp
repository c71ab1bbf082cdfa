#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "crackbench/types.hpp"

namespace crackbench {

enum class WorkloadKind { random, sequential, skewed };

inline std::string_view to_string(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::random: return "random";
        case WorkloadKind::sequential: return "sequential";
        case WorkloadKind::skewed: return "skewed";
    }
    return "?";
}

inline WorkloadKind workload_from_string(std::string_view s) {
    for (WorkloadKind k : {WorkloadKind::random, WorkloadKind::sequential, WorkloadKind::skewed})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown workload kind: " + std::string(s));
}

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::random;
    // Fraction of the key domain each query spans; empty means a fresh
    // uniform width in [1, span/2] per query.
    std::optional<double> selectivity = 0.01;
    std::size_t query_count = 1000;
    Key domain_min = 0;
    Key domain_max = 100'000'000;  // domain is [domain_min, domain_max)
    // Sequential advance per query; 0 means span / query_count (one sweep).
    Key stride = 0;
    double skew_exponent = 1.0;
    std::uint64_t seed = 42;

    Key span() const { return domain_max - domain_min; }

    // Query width for a fixed selectivity, clamped to at least one key unit.
    Key fixed_width() const {
        if (!selectivity) return 0;
        const auto w = static_cast<Key>(std::llround(*selectivity * static_cast<double>(span())));
        return std::max<Key>(w, 1);
    }

    double effective_selectivity() const {
        if (!selectivity) return -1.0;
        return static_cast<double>(fixed_width()) / static_cast<double>(span());
    }

    void validate() const {
        if (domain_min >= domain_max) throw std::invalid_argument("workload: empty key domain");
        if (selectivity) {
            if (!(*selectivity > 0.0) || *selectivity > 1.0)
                throw std::invalid_argument("workload: selectivity must be in (0, 1]");
            if (fixed_width() > span()) throw std::invalid_argument("workload: query width exceeds the domain");
        }
        if (stride < 0) throw std::invalid_argument("workload: stride must be non-negative");
    }
};

namespace detail {

// Zipf-like bucket sampler: probability of bucket i proportional to
// 1/(i+1)^exponent over a fixed number of buckets across the domain.
class ZipfBuckets {
public:
    ZipfBuckets(double exponent, std::size_t buckets = 1024) : cdf_(buckets) {
        double total = 0.0;
        for (std::size_t i = 0; i < buckets; ++i) {
            total += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
            cdf_[i] = total;
        }
        for (auto& v : cdf_) v /= total;
    }

    std::size_t sample(double u) const {
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
    }

    std::size_t buckets() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

}  // namespace detail

// Deterministic query stream for one benchmark run. All queries use
// exclusive bounds and stay inside the key domain.
inline std::vector<RangeQuery> gen_workload(const WorkloadSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const Key span = spec.span();
    const auto draw_width = [&]() -> Key {
        if (spec.selectivity) return spec.fixed_width();
        const Key max_w = std::max<Key>(span / 2, 1);
        return 1 + static_cast<Key>(rng() % static_cast<std::uint64_t>(max_w));
    };
    const auto uniform_low = [&](Key width) {
        const Key room = span - width + 1;
        return spec.domain_min + static_cast<Key>(rng() % static_cast<std::uint64_t>(room));
    };

    std::vector<RangeQuery> out;
    out.reserve(spec.query_count);
    const Key stride = spec.stride > 0 ? spec.stride
                                       : std::max<Key>(span / static_cast<Key>(std::max<std::size_t>(spec.query_count, 1)), 1);
    detail::ZipfBuckets zipf(spec.skew_exponent);
    // Unit doubles straight from generator bits; distribution classes are
    // implementation-defined and would break cross-build reproducibility.
    const auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Key seq_low = spec.domain_min;

    for (std::size_t i = 0; i < spec.query_count; ++i) {
        const Key width = draw_width();
        Key low = 0;
        switch (spec.kind) {
            case WorkloadKind::random:
                low = uniform_low(width);
                break;
            case WorkloadKind::sequential:
                if (seq_low + width > spec.domain_max) seq_low = spec.domain_min;
                low = seq_low;
                seq_low += stride;
                break;
            case WorkloadKind::skewed: {
                const std::size_t bucket = zipf.sample(unit());
                const Key room = span - width + 1;
                const Key bucket_lo = spec.domain_min + static_cast<Key>(
                    static_cast<double>(room) * static_cast<double>(bucket) / static_cast<double>(zipf.buckets()));
                const Key bucket_hi = spec.domain_min + static_cast<Key>(
                    static_cast<double>(room) * static_cast<double>(bucket + 1) / static_cast<double>(zipf.buckets()));
                const Key bucket_span = std::max<Key>(bucket_hi - bucket_lo, 1);
                low = bucket_lo + static_cast<Key>(rng() % static_cast<std::uint64_t>(bucket_span));
                break;
            }
        }
        out.push_back(RangeQuery::exclusive(low, low + width));
    }
    return out;
}

enum class FileFormat { raw_i64_le, csv };

inline std::string_view to_string(FileFormat f) {
    return f == FileFormat::raw_i64_le ? "raw_i64_le" : "csv";
}

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads a column from disk. raw_i64_le is exactly N*8 bytes of packed
// little-endian signed 64-bit integers, no header; csv is one integer per
// line. Errors reject the whole file: no partial column is ever returned.
inline std::vector<Key> load_file(const std::string& path, FileFormat format, bool csv_skip_header = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path);

    std::vector<Key> out;
    if (format == FileFormat::raw_i64_le) {
        in.seekg(0, std::ios::end);
        const auto bytes = static_cast<std::uint64_t>(in.tellg());
        in.seekg(0, std::ios::beg);
        if (bytes % 8 != 0)
            throw LoadError(path + ": size " + std::to_string(bytes) + " is not a multiple of 8 bytes");
        out.resize(bytes / 8);
        std::vector<unsigned char> buf(bytes);
        if (bytes > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes)))
            throw LoadError(path + ": short read");
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::uint64_t u = 0;
            for (int b = 7; b >= 0; --b) u = (u << 8) | buf[i * 8 + static_cast<std::size_t>(b)];
            out[i] = static_cast<Key>(u);
        }
        return out;
    }

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && csv_skip_header) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t used = 0;
        Key v = 0;
        try {
            v = std::stoll(line, &used);
        } catch (const std::exception&) {
            throw LoadError(path + ":" + std::to_string(line_no) + ": not an integer: '" + line + "'");
        }
        while (used < line.size() && (line[used] == ' ' || line[used] == '\t')) ++used;
        if (used != line.size())
            throw LoadError(path + ":" + std::to_string(line_no) + ": trailing characters: '" + line + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace crackbench
