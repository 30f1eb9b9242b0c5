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

// rarcrack: password recovery for RAR3 archives with encrypted headers.
//
//   rarcrack crack   --archive a.rar --mode dict|brute|mask ...
//   rarcrack fixture --password pw [--salt hex] --out a.rar
//   rarcrack kdf     --password pw --salt hex
//   rarcrack bench stages | sweep ...
//
// Exit status: 0 password found (or command succeeded), 1 space exhausted
// without a match, 2 usage or input error.

#include <rarcrack/rarcrack.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace rarcrack;

constexpr int exit_found = 0;
constexpr int exit_exhausted = 1;
constexpr int exit_error = 2;

enum class output_format { plain, json };

struct crack_options {
    std::string archive_path;
    std::string mode;
    std::string dict_path;
    std::string charset;
    std::size_t min_len = 0;
    std::size_t max_len = 0;
    std::string mask;
    std::uint64_t batch_size = default_batch_size;
    unsigned workers = default_derivation_workers();
    std::uint64_t start_index = 0;
    output_format format = output_format::plain;
    bool quiet = false;
    bool synchronous = false;
};

struct fixture_options {
    std::string password;
    std::string salt_hex;
    std::string out_path;
    std::string file_name = "secret.txt";
};

struct kdf_options {
    std::string password;
    std::string salt_hex;
    bool naive = false;
};

struct bench_options {
    std::vector<std::size_t> lengths{4, 10, 11, 25};
    std::uint64_t count = 1000;
    std::size_t length = 4;
    std::vector<std::uint64_t> batch_sizes;
    std::vector<unsigned> worker_values;
    std::string archive_path;
    std::string dict_path;
    std::uint64_t batch_size = default_batch_size;
    unsigned workers = default_derivation_workers();
    output_format format = output_format::plain;
};

void usage_error(const std::string& message) { throw CLI::ValidationError(message); }

salt_bytes parse_salt(const std::string& hex) {
    auto bytes = from_hex(hex);
    if (!bytes || bytes->size() != 8) usage_error("--salt must be 16 hex digits");
    salt_bytes salt;
    std::copy(bytes->begin(), bytes->end(), salt.begin());
    return salt;
}

std::vector<candidate_spec> spaces_for(const crack_options& o) {
    std::vector<candidate_spec> spaces;
    if (o.mode == "dict") {
        if (o.dict_path.empty()) usage_error("--mode dict requires --dict");
        spaces.push_back(candidate_spec::dictionary_file(o.dict_path));
        if (auto skipped = spaces.back().skipped())
            std::cerr << "warning: skipped " << skipped << " unusable dictionary line(s)\n";
    } else if (o.mode == "brute") {
        if (o.charset.empty()) usage_error("--mode brute requires --charset");
        if (o.min_len == 0) usage_error("--mode brute requires --min-len");
        const std::size_t max_len = o.max_len == 0 ? o.min_len : o.max_len;
        if (max_len < o.min_len) usage_error("--max-len is below --min-len");
        const auto charset = parse_charset(o.charset);
        for (std::size_t len = o.min_len; len <= max_len; ++len) spaces.push_back(candidate_spec::brute_force(charset, len));
    } else {
        if (o.mask.empty()) usage_error("--mode mask requires --mask");
        spaces.push_back(candidate_spec::mask(o.mask));
    }
    return spaces;
}

json match_json(const crack_match& m, std::size_t space) {
    return {{"space", space}, {"index", m.index}, {"password", m.password}};
}

int run_crack(const crack_options& o) {
    const auto spaces = spaces_for(o);
    const archive_info archive = parse_archive_file(o.archive_path);

    std::vector<std::pair<std::size_t, crack_match>> matches;
    std::uint64_t tested = 0;
    double elapsed = 0;
    for (std::size_t s = 0; s < spaces.size(); ++s) {
        engine_config cfg;
        cfg.batch_size = o.batch_size;
        cfg.derivation_workers = o.workers;
        cfg.start_index = s == 0 ? o.start_index : 0;
        cfg.mode = o.synchronous ? pipeline_mode::synchronous : pipeline_mode::asynchronous;
        if (!o.quiet) {
            cfg.progress_sink = [&, s](const progress_event& e) {
                if (o.format == output_format::json) {
                    std::cout << json{{"event", "progress"},     {"space", s},
                                      {"batch", e.batch_index},   {"last", e.last_candidate_tested},
                                      {"tested", e.tested_so_far}, {"speed", e.throughput},
                                      {"matches", e.matches_so_far}}
                                     .dump()
                              << '\n';
                } else {
                    std::printf("space %zu batch %llu: tested %llu, last \"%s\", %.1f pw/s, %llu match(es)\n", s,
                                static_cast<unsigned long long>(e.batch_index),
                                static_cast<unsigned long long>(e.tested_so_far), e.last_candidate_tested.c_str(),
                                e.throughput, static_cast<unsigned long long>(e.matches_so_far));
                }
                std::cout.flush();
            };
        }
        engine eng(cfg);
        const crack_result r = eng.run(spaces[s], archive);
        tested += r.tested;
        elapsed += r.elapsed;
        for (const auto& m : r.matches) matches.emplace_back(s, m);
    }

    if (o.format == output_format::json) {
        json ms = json::array();
        for (const auto& [s, m] : matches) ms.push_back(match_json(m, s));
        std::cout << json{{"event", "result"},
                          {"tested", tested},
                          {"elapsed", elapsed},
                          {"speed", elapsed > 0 ? static_cast<double>(tested) / elapsed : 0.0},
                          {"matches", ms}}
                         .dump()
                  << '\n';
    } else {
        for (const auto& [s, m] : matches)
            std::printf("found: %s (space %zu, index %llu)\n", m.password.c_str(), s,
                        static_cast<unsigned long long>(m.index));
        std::printf("tested %llu candidate(s) in %.3f s (%.1f pw/s), %zu match(es)\n",
                    static_cast<unsigned long long>(tested), elapsed,
                    elapsed > 0 ? static_cast<double>(tested) / elapsed : 0.0, matches.size());
    }
    return matches.empty() ? exit_exhausted : exit_found;
}

int run_fixture(const fixture_options& o) {
    fixture_recipe recipe;
    recipe.password = o.password;
    if (o.salt_hex.empty()) {
        std::random_device rd;
        for (auto& b : recipe.salt) b = static_cast<std::uint8_t>(rd());
    } else {
        recipe.salt = parse_salt(o.salt_hex);
    }
    recipe.header_payload = make_file_header(o.file_name);
    write_file_bytes(o.out_path, build_fixture(recipe));
    std::printf("salt: %s\n", to_hex(recipe.salt).c_str());
    return exit_found;
}

int run_kdf(const kdf_options& o) {
    const salt_bytes salt = parse_salt(o.salt_hex);
    derived_key dk;
    if (o.naive) {
        dk = derive_key_naive(o.password, salt);
    } else {
        pattern_buffer pattern(o.password, salt);
        counter_table table(pattern.layout());
        dk = derive_key_optimized(pattern, table);
    }
    std::printf("key: %s\niv:  %s\n", to_hex(dk.key).c_str(), to_hex(dk.iv).c_str());
    return exit_found;
}

void print_report(const bench_report& report, output_format format, bool stages) {
    const auto best = report.best();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        if (format == output_format::json) {
            std::cout << json{{"event", "bench"},
                              {"password_len", r.password_len},
                              {"batch_size", r.batch_size},
                              {"workers", r.workers},
                              {"tested", r.tested},
                              {"speed", r.throughput},
                              {"derivation_total", r.derivation_total},
                              {"verification_total", r.verification_total},
                              {"ratio", r.stage_ratio()},
                              {"wall_time", r.wall_time}}
                             .dump()
                      << '\n';
        } else if (stages) {
            const double n = static_cast<double>(r.tested);
            std::printf("len %2zu: %llu candidates, derive %.3f s (%.1f us each), verify %.4f s (%.3f us each), "
                        "ratio %.0f\n",
                        r.password_len, static_cast<unsigned long long>(r.tested), r.derivation_total,
                        1e6 * r.derivation_total / n, r.verification_total, 1e6 * r.verification_total / n,
                        r.stage_ratio());
        } else {
            std::printf("batch %6llu workers %2u: %llu tested in %.3f s, %.1f pw/s\n",
                        static_cast<unsigned long long>(r.batch_size), r.workers,
                        static_cast<unsigned long long>(r.tested), r.wall_time, r.throughput);
        }
    }
    if (!stages && best) {
        const auto& r = report.rows[*best];
        if (format == output_format::json)
            std::cout << json{{"event", "best"}, {"batch_size", r.batch_size}, {"workers", r.workers},
                              {"speed", r.throughput}}
                             .dump()
                      << '\n';
        else
            std::printf("best: batch %llu, workers %u (%.1f pw/s)\n", static_cast<unsigned long long>(r.batch_size),
                        r.workers, r.throughput);
    }
}

int run_bench_stages(const bench_options& o) {
    engine_config cfg;
    cfg.batch_size = o.batch_size;
    cfg.derivation_workers = o.workers;
    print_report(bench_stages(o.lengths, o.count, cfg), o.format, true);
    return exit_found;
}

int run_bench_sweep(const bench_options& o) {
    if (o.batch_sizes.empty()) usage_error("--batch-sizes needs at least one value");
    engine_config cfg;
    cfg.derivation_workers = o.workers;
    bench_report report;
    if (!o.archive_path.empty() || !o.dict_path.empty()) {
        if (o.archive_path.empty() || o.dict_path.empty()) usage_error("--archive and --dict go together");
        report = bench_sweep(candidate_spec::dictionary_file(o.dict_path), parse_archive_file(o.archive_path),
                             o.batch_sizes, o.worker_values, cfg);
    } else {
        auto work = make_synthetic_workload(o.length, o.count);
        report = bench_sweep(work.spec, work.archive, o.batch_sizes, o.worker_values, cfg);
    }
    print_report(report, o.format, false);
    return exit_found;
}

const std::map<std::string, output_format> format_names{{"plain", output_format::plain},
                                                        {"json", output_format::json}};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Password recovery for RAR3 archives with encrypted headers"};
    app.require_subcommand(1);

    crack_options crack;
    auto* crack_cmd = app.add_subcommand("crack", "Search a candidate space for the archive password");
    crack_cmd->add_option("--archive", crack.archive_path, "Archive file")->required();
    crack_cmd->add_option("--mode", crack.mode, "Candidate source")
        ->required()
        ->check(CLI::IsMember({"dict", "brute", "mask"}));
    crack_cmd->add_option("--dict", crack.dict_path, "Dictionary file, one password per line");
    crack_cmd->add_option("--charset", crack.charset, "Brute-force characters; ?l ?u ?d ?s expand to classes");
    crack_cmd->add_option("--min-len", crack.min_len, "Shortest brute-force length")->check(CLI::Range(1, 25));
    crack_cmd->add_option("--max-len", crack.max_len, "Longest brute-force length")->check(CLI::Range(1, 25));
    crack_cmd->add_option("--mask", crack.mask, "Per-position mask, e.g. ?u?l?l?d?d");
    crack_cmd->add_option("--batch-size", crack.batch_size, "Candidates per batch")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    crack_cmd->add_option("--workers", crack.workers, "Key derivation threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    crack_cmd->add_option("--start-index", crack.start_index, "Resume from this candidate index");
    crack_cmd->add_option("--format", crack.format, "plain or json (one JSON record per line)")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));
    crack_cmd->add_flag("--quiet", crack.quiet, "Only print the final summary");
    crack_cmd->add_flag("--sync", crack.synchronous, "Derive then verify each batch without overlap");

    fixture_options fixture;
    auto* fixture_cmd = app.add_subcommand("fixture", "Write a header-encrypted test archive");
    fixture_cmd->add_option("--password", fixture.password, "Archive password")->required();
    fixture_cmd->add_option("--salt", fixture.salt_hex, "8-byte salt as hex (random if omitted)");
    fixture_cmd->add_option("--out", fixture.out_path, "Output path")->required();
    fixture_cmd->add_option("--name", fixture.file_name, "File name stored in the encrypted header")
        ->capture_default_str();

    kdf_options kdf;
    auto* kdf_cmd = app.add_subcommand("kdf", "Print the AES key and IV derived from a password and salt");
    kdf_cmd->add_option("--password", kdf.password, "Password")->required();
    kdf_cmd->add_option("--salt", kdf.salt_hex, "8-byte salt as hex")->required();
    kdf_cmd->add_flag("--naive", kdf.naive, "Use the byte-streaming reference path");

    bench_options bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measurement harness");
    bench_cmd->require_subcommand(1);
    auto* stages_cmd = bench_cmd->add_subcommand("stages", "Derivation vs verification time per password length");
    stages_cmd->add_option("--lengths", bench.lengths, "Password lengths")->capture_default_str()->delimiter(',');
    stages_cmd->add_option("--count", bench.count, "Candidates per length")->capture_default_str();
    stages_cmd->add_option("--workers", bench.workers, "Key derivation threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    stages_cmd->add_option("--batch-size", bench.batch_size, "Candidates per batch")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    stages_cmd->add_option("--format", bench.format, "plain or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    auto* sweep_cmd = bench_cmd->add_subcommand("sweep", "Throughput across batch sizes (and worker counts)");
    sweep_cmd->add_option("--batch-sizes", bench.batch_sizes, "Batch sizes to try")->required()->delimiter(',');
    sweep_cmd->add_option("--workers-list", bench.worker_values, "Worker counts to try")->delimiter(',');
    sweep_cmd->add_option("--workers", bench.workers, "Key derivation threads when no list is given")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--length", bench.length, "Synthetic password length")
        ->capture_default_str()
        ->check(CLI::Range(1, 25));
    sweep_cmd->add_option("--count", bench.count, "Synthetic candidate count")->capture_default_str();
    sweep_cmd->add_option("--archive", bench.archive_path, "Sweep a real archive (with --dict)");
    sweep_cmd->add_option("--dict", bench.dict_path, "Dictionary for --archive");
    sweep_cmd->add_option("--format", bench.format, "plain or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    try {
        app.parse(argc, argv);
        if (crack_cmd->parsed()) return run_crack(crack);
        if (fixture_cmd->parsed()) return run_fixture(fixture);
        if (kdf_cmd->parsed()) return run_kdf(kdf);
        if (stages_cmd->parsed()) return run_bench_stages(bench);
        if (sweep_cmd->parsed()) return run_bench_sweep(bench);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_error;
    } catch (const std::exception& e) {
        std::cerr << "rarcrack: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
