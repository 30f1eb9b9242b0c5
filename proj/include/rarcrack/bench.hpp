/*
 * Copyright 2026 The rarcrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "archive.hpp"
#include "candidates.hpp"
#include "engine.hpp"

namespace rarcrack {

struct bench_row {
    std::size_t password_len = 0;
    std::uint64_t batch_size = 0;
    unsigned workers = 0;
    std::uint64_t tested = 0;
    double throughput = 0.0; // passwords per second of wall time
    double derivation_total = 0.0;
    double verification_total = 0.0;
    double wall_time = 0.0;

    double stage_ratio() const noexcept {
        return verification_total > 0 ? derivation_total / verification_total : 0.0;
    }
};

struct bench_report {
    std::vector<bench_row> rows;

    /// Row with the highest throughput.
    std::optional<std::size_t> best() const {
        if (rows.empty()) return std::nullopt;
        auto it = std::max_element(rows.begin(), rows.end(),
                                   [](const bench_row& a, const bench_row& b) { return a.throughput < b.throughput; });
        return static_cast<std::size_t>(it - rows.begin());
    }
};

/// `count` seeded random lowercase passwords of one length, plus a fixture
/// archive whose password (all uppercase) cannot be among them. Every
/// candidate therefore runs the full derive-and-verify path.
struct synthetic_workload {
    candidate_spec spec;
    archive_info archive;
};

inline synthetic_workload make_synthetic_workload(std::size_t password_len, std::uint64_t count,
                                                  std::uint32_t seed = 20150429) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> letter('a', 'z');
    std::vector<std::string> lines;
    lines.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string pw(password_len, 'a');
        for (auto& c : pw) c = static_cast<char>(letter(rng));
        lines.push_back(std::move(pw));
    }
    fixture_recipe recipe;
    recipe.password = std::string(password_len, 'Z');
    for (auto& b : recipe.salt) b = static_cast<std::uint8_t>(rng());
    recipe.header_payload = make_file_header();
    return {candidate_spec::dictionary(lines), parse_archive(build_fixture(recipe))};
}

inline bench_row measure(engine& eng, const candidate_spec& spec, const archive_info& archive,
                         std::size_t password_len) {
    const crack_result r = eng.run(spec, archive);
    bench_row row;
    row.password_len = password_len;
    row.batch_size = eng.config().batch_size;
    row.workers = eng.config().derivation_workers;
    row.tested = r.tested;
    row.wall_time = r.elapsed;
    row.throughput = r.elapsed > 0 ? static_cast<double>(r.tested) / r.elapsed : 0.0;
    row.derivation_total = r.stages.derivation_total;
    row.verification_total = r.stages.verification_total;
    return row;
}

/// Derivation vs verification cost per password length over a fixed
/// candidate count.
inline bench_report bench_stages(const std::vector<std::size_t>& lengths, std::uint64_t count, engine_config config) {
    bench_report report;
    if (count == 0) return report;
    config.progress_sink = nullptr;
    engine eng(config);
    for (std::size_t len : lengths) {
        auto work = make_synthetic_workload(len, count);
        eng.table_for(len);
        report.rows.push_back(measure(eng, work.spec, work.archive, len));
    }
    return report;
}

/// Identical workload across batch sizes, and optionally worker counts.
/// Empty `worker_values` keeps config.derivation_workers.
inline bench_report bench_sweep(const candidate_spec& spec, const archive_info& archive,
                                const std::vector<std::uint64_t>& batch_values,
                                const std::vector<unsigned>& worker_values, engine_config config) {
    if (batch_values.empty()) throw error(error_code::range, "sweep needs at least one batch size");
    for (auto v : batch_values)
        if (v == 0) throw error(error_code::range, "sweep batch size must be at least 1");
    for (auto v : worker_values)
        if (v == 0) throw error(error_code::range, "sweep worker count must be at least 1");

    std::vector<unsigned> workers = worker_values;
    if (workers.empty()) workers.push_back(config.derivation_workers);
    config.progress_sink = nullptr;
    std::size_t len = spec.fixed_length().value_or(0);
    if (len == 0 && space_size(spec) > 0) len = decode_utf8(candidate_at(spec, 0))->size();

    bench_report report;
    for (unsigned w : workers) {
        for (auto bs : batch_values) {
            engine_config c = config;
            c.batch_size = bs;
            c.derivation_workers = w;
            engine eng(c);
            report.rows.push_back(measure(eng, spec, archive, len));
        }
    }
    return report;
}

} // namespace rarcrack
