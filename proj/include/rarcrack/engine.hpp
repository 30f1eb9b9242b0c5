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

// Recovery runs as two stages joined by a bounded queue of per-batch key
// sets. The derivation stage (a pool of workers splitting each batch) does
// the SHA-1 key setup; the verification stage (the calling thread) does
// AES+CRC and reports progress. Key sets flow in batch order, so matches and
// progress are identical for any worker count. In synchronous mode the same
// thread derives a batch and then verifies it, with no overlap.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "archive.hpp"
#include "bounded_queue.hpp"
#include "candidates.hpp"
#include "error.hpp"
#include "kdf.hpp"
#include "verifier.hpp"

namespace rarcrack {

inline constexpr std::uint64_t default_batch_size = 14336;

inline unsigned default_derivation_workers() noexcept {
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 1 ? hw - 1 : 1;
}

enum class pipeline_mode { asynchronous, synchronous };

struct progress_event {
    std::uint64_t batch_index = 0;
    std::string last_candidate_tested;
    std::uint64_t tested_so_far = 0;
    double throughput = 0.0;
    std::uint64_t matches_so_far = 0;
};

struct engine_config {
    std::uint64_t batch_size = default_batch_size;
    unsigned derivation_workers = default_derivation_workers();
    std::function<void(const progress_event&)> progress_sink;
    pipeline_mode mode = pipeline_mode::asynchronous;
    std::uint64_t start_index = 0;
    std::size_t queue_capacity = 2;
};

struct crack_match {
    std::uint64_t index = 0;
    std::string password;

    friend bool operator==(const crack_match&, const crack_match&) = default;
};

struct batch_outcome {
    std::uint64_t batch_index = 0;
    batch range;
    std::vector<std::uint64_t> matched_indices;

    friend bool operator==(const batch_outcome&, const batch_outcome&) = default;
};

struct stage_times {
    double derivation_total = 0.0;   // summed over workers, seconds
    double verification_total = 0.0; // seconds
};

struct engine_telemetry {
    std::uint64_t derived = 0;
    std::uint64_t verified = 0;
    std::size_t peak_live_key_sets = 0;
    double table_setup_seconds = 0.0;
    std::vector<batch_outcome> batches;
};

struct crack_result {
    std::vector<crack_match> matches;
    std::uint64_t tested = 0;
    double elapsed = 0.0;
    double throughput = 0.0;
    stage_times stages;
    engine_telemetry telemetry;
};

/// A failed run. resume_index is where a rerun with --start-index picks up.
class engine_error : public error {
public:
    engine_error(const std::string& cause, std::optional<std::uint64_t> last_completed_batch,
                 std::uint64_t resume_index)
        : error(error_code::aborted, describe(cause, last_completed_batch, resume_index)),
          last_completed_batch_(last_completed_batch),
          resume_index_(resume_index) {}

    std::optional<std::uint64_t> last_completed_batch() const noexcept { return last_completed_batch_; }
    std::uint64_t resume_index() const noexcept { return resume_index_; }

private:
    static std::string describe(const std::string& cause, std::optional<std::uint64_t> last, std::uint64_t resume) {
        std::string s = cause + " (last completed batch: ";
        s += last ? std::to_string(*last) : std::string("none");
        s += ", resume with start index " + std::to_string(resume) + ")";
        return s;
    }

    std::optional<std::uint64_t> last_completed_batch_;
    std::uint64_t resume_index_;
};

class engine {
public:
    explicit engine(engine_config config) : config_(std::move(config)) {
        if (config_.batch_size == 0) throw error(error_code::range, "batch size must be at least 1");
        if (config_.derivation_workers == 0) throw error(error_code::range, "need at least one derivation worker");
    }

    const engine_config& config() const noexcept { return config_; }

    /// Counter tables survive across runs of the same engine.
    std::shared_ptr<const counter_table> table_for(std::size_t password_len) {
        auto& slot = tables_[password_len];
        if (!slot) slot = std::make_shared<const counter_table>(kdf_layout::for_length(password_len));
        return slot;
    }

    crack_result run(const candidate_spec& spec, const archive_info& archive);

private:
    struct key_set;
    class live_tracker;

    engine_config config_;
    std::map<std::size_t, std::shared_ptr<const counter_table>> tables_;
};

class engine::live_tracker {
public:
    void acquire() noexcept {
        std::size_t now = live_.fetch_add(1) + 1;
        std::size_t peak = peak_.load();
        while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
        }
    }
    void release() noexcept { live_.fetch_sub(1); }
    std::size_t peak() const noexcept { return peak_.load(); }

private:
    std::atomic<std::size_t> live_{0};
    std::atomic<std::size_t> peak_{0};
};

struct engine::key_set {
    key_set(std::uint64_t index, batch range, live_tracker& tracker)
        : batch_index(index), range(range), tracker(&tracker) {
        tracker.acquire();
    }
    key_set(key_set&& other) noexcept
        : batch_index(other.batch_index),
          range(other.range),
          passwords(std::move(other.passwords)),
          keys(std::move(other.keys)),
          tracker(std::exchange(other.tracker, nullptr)) {}
    key_set& operator=(key_set&&) = delete;
    ~key_set() {
        if (tracker) tracker->release();
    }

    std::uint64_t batch_index;
    batch range;
    std::vector<std::string> passwords;
    std::vector<derived_key> keys;
    live_tracker* tracker;
};

inline crack_result engine::run(const candidate_spec& spec, const archive_info& archive) {
    using clock = std::chrono::steady_clock;
    const std::uint64_t total = space_size(spec);
    if (config_.start_index > total)
        throw error(error_code::range, "start index " + std::to_string(config_.start_index) + " beyond space of " +
                                           std::to_string(total));
    if (archive.encrypted_header.empty() || archive.encrypted_header.size() % 16 != 0)
        throw error(error_code::block_alignment, "archive ciphertext is not block aligned");

    const auto setup_start = clock::now();
    std::map<std::size_t, std::shared_ptr<const counter_table>> tables;
    if (auto len = spec.fixed_length()) {
        tables[*len] = table_for(*len);
    } else if (auto* dict = std::get_if<dictionary_space>(&spec.space())) {
        for (std::uint64_t i = config_.start_index; i < dict->entries.size(); ++i) {
            std::size_t len = utf16le_encode(dict->entries[i]).size() / 2;
            if (!tables.count(len)) tables[len] = table_for(len);
        }
    }

    crack_result result;
    result.telemetry.table_setup_seconds = std::chrono::duration<double>(clock::now() - setup_start).count();

    const batch_sequence plan = batches(spec, config_.batch_size, config_.start_index);
    const unsigned workers = config_.derivation_workers;
    live_tracker tracker;
    std::atomic<std::uint64_t> derived{0};
    std::atomic<std::int64_t> derive_nanos{0};
    const auto start = clock::now();

    auto derive = [&](std::uint64_t bi) {
        const batch b = plan[bi];
        key_set ks(bi, b, tracker);
        ks.passwords.resize(b.count);
        ks.keys.resize(b.count);
        for (std::uint64_t i = 0; i < b.count; ++i) ks.passwords[i] = candidate_at(spec, b.start_index + i);

        std::atomic<std::uint64_t> next{0};
        auto work = [&]() {
            const auto t0 = clock::now();
            for (std::uint64_t i = next.fetch_add(1); i < b.count; i = next.fetch_add(1)) {
                pattern_buffer pattern(ks.passwords[i], archive.salt);
                ks.keys[i] = derive_key_optimized(pattern, *tables.at(pattern.layout().password_len));
                derived.fetch_add(1, std::memory_order_relaxed);
            }
            derive_nanos.fetch_add(std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count());
        };

        const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(workers, b.count));
        if (n <= 1) {
            work();
        } else {
            std::vector<std::exception_ptr> failures(n);
            {
                std::vector<std::jthread> pool;
                pool.reserve(n);
                for (unsigned w = 0; w < n; ++w) {
                    pool.emplace_back([&, w] {
                        try {
                            work();
                        } catch (...) {
                            failures[w] = std::current_exception();
                            next.store(b.count);
                        }
                    });
                }
            }
            for (auto& f : failures)
                if (f) std::rethrow_exception(f);
        }
        return ks;
    };

    std::uint64_t verified = 0;
    double verify_seconds = 0.0;
    std::optional<std::uint64_t> last_completed;
    std::uint64_t resume_index = config_.start_index;

    auto verify = [&](const key_set& ks) {
        batch_outcome outcome{ks.batch_index, ks.range, {}};
        const auto t0 = clock::now();
        for (std::uint64_t i = 0; i < ks.range.count; ++i) {
            if (verify_candidate(ks.keys[i], archive)) {
                outcome.matched_indices.push_back(ks.range.start_index + i);
                result.matches.push_back({ks.range.start_index + i, ks.passwords[i]});
            }
            ++verified;
        }
        verify_seconds += std::chrono::duration<double>(clock::now() - t0).count();
        result.telemetry.batches.push_back(std::move(outcome));

        if (config_.progress_sink) {
            progress_event ev;
            ev.batch_index = ks.batch_index;
            ev.last_candidate_tested = ks.passwords.empty() ? std::string() : ks.passwords.back();
            ev.tested_so_far = verified;
            const double secs = std::chrono::duration<double>(clock::now() - start).count();
            ev.throughput = secs > 0 ? static_cast<double>(verified) / secs : 0.0;
            ev.matches_so_far = result.matches.size();
            config_.progress_sink(ev);
        }
        last_completed = ks.batch_index;
        resume_index = ks.range.end_index();
    };

    auto describe = [](std::exception_ptr e) {
        try {
            std::rethrow_exception(e);
        } catch (const std::exception& ex) {
            return std::string(ex.what());
        } catch (...) {
            return std::string("unknown failure");
        }
    };

    if (config_.mode == pipeline_mode::synchronous) {
        try {
            for (std::uint64_t bi = 0; bi < plan.size(); ++bi) verify(derive(bi));
        } catch (...) {
            throw engine_error(describe(std::current_exception()), last_completed, resume_index);
        }
    } else {
        bounded_queue<key_set> queue(config_.queue_capacity);
        std::exception_ptr producer_failure;
        std::jthread producer([&] {
            try {
                for (std::uint64_t bi = 0; bi < plan.size(); ++bi)
                    if (!queue.push(derive(bi))) break;
            } catch (...) {
                producer_failure = std::current_exception();
            }
            queue.close();
        });

        std::exception_ptr consumer_failure;
        try {
            while (auto ks = queue.pop()) verify(*ks);
        } catch (...) {
            consumer_failure = std::current_exception();
            queue.close();
        }
        producer.join();
        if (consumer_failure) throw engine_error(describe(consumer_failure), last_completed, resume_index);
        if (producer_failure) throw engine_error(describe(producer_failure), last_completed, resume_index);
    }

    result.tested = verified;
    result.elapsed = std::chrono::duration<double>(clock::now() - start).count();
    result.throughput = result.elapsed > 0 ? static_cast<double>(result.tested) / result.elapsed : 0.0;
    result.stages.derivation_total = static_cast<double>(derive_nanos.load()) * 1e-9;
    result.stages.verification_total = verify_seconds;
    result.telemetry.derived = derived.load();
    result.telemetry.verified = verified;
    result.telemetry.peak_live_key_sets = tracker.peak();
    return result;
}

} // namespace rarcrack
