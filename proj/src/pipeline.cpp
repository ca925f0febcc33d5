/*
 * Copyright 2026 cdsflow contributors
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

#include "cdsflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

namespace cdsflow {

void EngineConfig::validate() const {
    if (lanes < 1 || lanes > kMaxLanes)
        throw std::invalid_argument("EngineConfig: lanes must be in [1, 64]");
    if (replication < 1) throw std::invalid_argument("EngineConfig: replication must be >= 1");
    if (stream_capacity < 2) throw std::invalid_argument("EngineConfig: stream_capacity must be >= 2");
    if (engines < 1) throw std::invalid_argument("EngineConfig: engines must be >= 1");
    if (frame_size < 1) throw std::invalid_argument("EngineConfig: frame_size must be >= 1");
}

const StageStats* PipelineStats::find(std::string_view stage_name) const {
    for (const StageStats& stage : stages)
        if (stage.name == stage_name) return &stage;
    return nullptr;
}

namespace {

// Messages. The per-option stream carries one header per option; the
// per-point streams carry frames of grid points. Stages fill in their
// fields and pass the frame along, so the whole chain moves without
// copying point data.

struct OptionJob {
    std::size_t index;
    CdsOption option;
};

struct OptionHeader {
    std::size_t index;
    std::uint64_t point_count;
    double recovery_rate;
    std::string error;  // non-empty: option rejected upstream, no frames follow
};

struct GridPoint {
    double t_prev;
    double t;
    double surv;
    double df_end;
    double df_mid;
    double surv_drop;
    double premium;
    double payoff;
    double accrual;
};

struct PointFrame {
    std::size_t index;
    std::vector<GridPoint> points;
};

struct LegTotals {
    std::size_t index;
    double premium;
    double payoff_raw;
    double accrual;
    double recovery_rate;
    std::string error;
};

// Optional per-message delay used by the adversarial-scheduling tests.
class Jitter {
public:
    Jitter(unsigned max_us, std::uint64_t seed) : max_us_(max_us), rng_(seed) {}

    void operator()() {
        if (max_us_ == 0) return;
        std::this_thread::sleep_for(std::chrono::microseconds(rng_() % (max_us_ + 1)));
    }

private:
    unsigned max_us_;
    std::mt19937_64 rng_;
};

// First stage failure of a run; later failures are cascade noise.
class ErrorSink {
public:
    void record(const std::string& stage, const std::string& message) {
        std::lock_guard lock(mutex_);
        if (!failed_) {
            failed_ = true;
            stage_ = stage;
            message_ = message;
        }
    }

    bool failed() const { return failed_; }
    std::string describe() const { return "pipeline stage '" + stage_ + "' failed: " + message_; }

private:
    mutable std::mutex mutex_;
    bool failed_ = false;
    std::string stage_;
    std::string message_;
};

struct StageSpec {
    std::string name;
    std::function<void(StageStats*, Jitter&)> body;
    std::vector<StreamBase*> attached;  // streams to poison if this stage dies
};

// Runs one stage body, accounting its lifecycle and converting any
// escape into poison on the attached streams. A StreamPoisonedError is
// a cascade from an earlier death and keeps the original origin; every
// other exception makes this stage the origin.
void run_stage(const StageSpec& spec, StageStats* stats, ErrorSink& sink, const EngineConfig& config) {
    if (stats) ++stats->starts;
    Jitter jitter(config.debug.jitter_us,
                  config.debug.jitter_seed ^ std::hash<std::string>{}(spec.name));
    try {
        if (spec.name == config.debug.fail_stage)
            throw std::runtime_error("injected failure (debug.fail_stage)");
        spec.body(stats, jitter);
    } catch (const StreamPoisonedError& e) {
        for (StreamBase* stream : spec.attached) stream->poison(e.origin_stage());
    } catch (const std::exception& e) {
        sink.record(spec.name, e.what());
        for (StreamBase* stream : spec.attached) stream->poison(spec.name);
    } catch (...) {
        sink.record(spec.name, "unknown error");
        for (StreamBase* stream : spec.attached) stream->poison(spec.name);
    }
    if (stats) ++stats->stops;
}

}  // namespace

std::vector<SpreadResult> run_pipeline(std::span<const CdsOption> options,
                                       const TermStructure& interest, const TermStructure& hazard,
                                       const EngineConfig& config, PipelineStats* stats) {
    config.validate();
    if (options.empty()) throw std::invalid_argument("run_pipeline: option batch must not be empty");
    if (interest.kind() != CurveKind::Interest)
        throw std::invalid_argument("run_pipeline: interest curve has the wrong kind");
    if (hazard.kind() != CurveKind::Hazard)
        throw std::invalid_argument("run_pipeline: hazard curve has the wrong kind");

    const unsigned replication = config.replication;
    const std::size_t capacity = config.stream_capacity;

    BoundedStream<OptionJob> jobs(capacity);
    BoundedStream<OptionHeader> headers(capacity);
    BoundedStream<PointFrame> raw_frames(capacity);
    std::vector<std::unique_ptr<BoundedStream<PointFrame>>> to_worker;
    std::vector<std::unique_ptr<BoundedStream<PointFrame>>> from_worker;
    std::vector<BoundedStream<PointFrame>*> worker_inputs;
    std::vector<BoundedStream<PointFrame>*> worker_outputs;
    for (unsigned v = 0; v < replication; ++v) {
        to_worker.push_back(std::make_unique<BoundedStream<PointFrame>>(capacity));
        from_worker.push_back(std::make_unique<BoundedStream<PointFrame>>(capacity));
        worker_inputs.push_back(to_worker.back().get());
        worker_outputs.push_back(from_worker.back().get());
    }
    BoundedStream<PointFrame> curved(capacity);
    BoundedStream<PointFrame> with_premium(capacity);
    BoundedStream<PointFrame> with_payoff(capacity);
    BoundedStream<PointFrame> with_accrual(capacity);
    BoundedStream<LegTotals> leg_totals(capacity);
    BoundedStream<SpreadResult> finished(capacity);

    std::vector<SpreadResult> results;
    results.reserve(options.size());

    std::vector<StageSpec> specs;
    specs.reserve(10 + replication);

    // Feeds the batch in; message stream per option.
    specs.push_back({"ingest",
                     [&](StageStats* st, Jitter& jitter) {
                         for (std::size_t i = 0; i < options.size(); ++i) {
                             jitter();
                             jobs.push(OptionJob{i, options[i]}, st);
                         }
                         jobs.close();
                     },
                     {&jobs}});

    // Validates each option, announces it on the header stream, then
    // streams its payment grid as frames. The header always precedes the
    // option's frames, so the accumulator downstream never waits on a
    // frame whose header is stuck behind it.
    specs.push_back({"timegrid",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto job = jobs.pop(st)) {
                             jitter();
                             OptionHeader header{job->index, 0, job->option.recovery_rate, {}};
                             std::optional<TimeGrid> grid;
                             try {
                                 grid.emplace(generate_time_points(job->option));
                             } catch (const std::invalid_argument& e) {
                                 header.error = e.what();
                             }
                             if (!grid) {
                                 headers.push(std::move(header), st);
                                 continue;
                             }
                             header.point_count = grid->size();
                             headers.push(std::move(header), st);
                             PointFrame frame{job->index, {}};
                             frame.points.reserve(std::min(config.frame_size, grid->size()));
                             double t_prev = 0.0;
                             for (double t : grid->points()) {
                                 frame.points.push_back(GridPoint{t_prev, t, 0, 0, 0, 0, 0, 0, 0});
                                 t_prev = t;
                                 if (frame.points.size() == config.frame_size) {
                                     raw_frames.push(std::move(frame), st);
                                     frame = PointFrame{job->index, {}};
                                     frame.points.reserve(config.frame_size);
                                 }
                             }
                             if (!frame.points.empty()) raw_frames.push(std::move(frame), st);
                         }
                         headers.close();
                         raw_frames.close();
                     },
                     {&jobs, &headers, &raw_frames}});

    // Frame k goes to worker k mod replication.
    {
        std::vector<StreamBase*> attached{&raw_frames};
        for (BoundedStream<PointFrame>* w : worker_inputs) attached.push_back(w);
        specs.push_back({"scatter",
                         [&](StageStats* st, Jitter& jitter) {
                             std::size_t k = 0;
                             while (auto frame = raw_frames.pop(st)) {
                                 jitter();
                                 worker_inputs[k % worker_inputs.size()]->push(std::move(*frame), st);
                                 ++k;
                             }
                             for (BoundedStream<PointFrame>* w : worker_inputs) w->close();
                         },
                         std::move(attached)});
    }

    // Replicated workers: the expensive per-point work. Survival uses the
    // strided hazard accumulation; both discount factors interpolate the
    // shared interest curve.
    for (unsigned v = 0; v < replication; ++v) {
        specs.push_back({"survival_worker_" + std::to_string(v),
                         [&, v](StageStats* st, Jitter& jitter) {
                             auto& in = *worker_inputs[v];
                             auto& out = *worker_outputs[v];
                             while (auto frame = in.pop(st)) {
                                 jitter();
                                 for (GridPoint& pt : frame->points) {
                                     pt.surv = survival_probability_strided(hazard, pt.t, config.lanes);
                                     pt.df_end = discount_factor(interest, pt.t);
                                     pt.df_mid = discount_factor(
                                         interest, period_midpoint(pt.t_prev, pt.t));
                                 }
                                 out.push(std::move(*frame), st);
                             }
                             out.close();
                         },
                         {worker_inputs[v], worker_outputs[v]}});
    }

    // Gathers worker output in scatter order (restoring the global frame
    // order) and turns survival levels into per-period drops. S(0) = 1,
    // and the survival state resets whenever a new option's frames begin.
    {
        std::vector<StreamBase*> attached{&curved};
        for (BoundedStream<PointFrame>* w : worker_outputs) attached.push_back(w);
        specs.push_back({"default_probability",
                         [&](StageStats* st, Jitter& jitter) {
                             std::optional<std::size_t> current;
                             double surv_prev = 1.0;
                             round_robin_gather_each<PointFrame>(
                                 worker_outputs,
                                 [&](PointFrame frame) {
                                     jitter();
                                     if (!current || *current != frame.index) {
                                         if (current && frame.index < *current)
                                             throw std::logic_error(
                                                 "default_probability: option order violated");
                                         current = frame.index;
                                         surv_prev = 1.0;
                                     }
                                     for (GridPoint& pt : frame.points) {
                                         pt.surv_drop = surv_prev - pt.surv;
                                         surv_prev = pt.surv;
                                     }
                                     curved.push(std::move(frame), st);
                                 },
                                 st);
                             curved.close();
                         },
                         std::move(attached)});
    }

    specs.push_back({"payment",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto frame = curved.pop(st)) {
                             jitter();
                             for (GridPoint& pt : frame->points)
                                 pt.premium = premium_term(pt.t - pt.t_prev, pt.df_end, pt.surv);
                             with_premium.push(std::move(*frame), st);
                         }
                         with_premium.close();
                     },
                     {&curved, &with_premium}});

    specs.push_back({"payoff",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto frame = with_premium.pop(st)) {
                             jitter();
                             for (GridPoint& pt : frame->points)
                                 pt.payoff = payoff_term(pt.df_mid, pt.surv_drop);
                             with_payoff.push(std::move(*frame), st);
                         }
                         with_payoff.close();
                     },
                     {&with_premium, &with_payoff}});

    specs.push_back({"accrual",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto frame = with_payoff.pop(st)) {
                             jitter();
                             for (GridPoint& pt : frame->points)
                                 pt.accrual =
                                     accrual_term(pt.t - pt.t_prev, pt.df_mid, pt.surv_drop);
                             with_accrual.push(std::move(*frame), st);
                         }
                         with_accrual.close();
                     },
                     {&with_payoff, &with_accrual}});

    // Folds each option's frames into the three leg sums, pairing the
    // header stream with the point stream. The fold is a plain running
    // sum in frame order, the same order the sequential engine uses.
    specs.push_back({"accumulate",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto header = headers.pop(st)) {
                             jitter();
                             LegTotals totals{header->index, 0.0, 0.0, 0.0, header->recovery_rate,
                                              std::move(header->error)};
                             if (totals.error.empty()) {
                                 std::uint64_t remaining = header->point_count;
                                 while (remaining > 0) {
                                     auto frame = with_accrual.pop(st);
                                     if (!frame)
                                         throw std::logic_error(
                                             "accumulate: point stream ended mid-option");
                                     if (frame->index != header->index)
                                         throw std::logic_error(
                                             "accumulate: frame does not match current option");
                                     if (frame->points.size() > remaining)
                                         throw std::logic_error(
                                             "accumulate: more points than announced");
                                     for (const GridPoint& pt : frame->points) {
                                         totals.premium += pt.premium;
                                         totals.payoff_raw += pt.payoff;
                                         totals.accrual += pt.accrual;
                                     }
                                     remaining -= frame->points.size();
                                 }
                             }
                             leg_totals.push(std::move(totals), st);
                         }
                         if (with_accrual.pop(st))
                             throw std::logic_error("accumulate: trailing frames after last option");
                         leg_totals.close();
                     },
                     {&headers, &with_accrual, &leg_totals}});

    // Applies (1 - recovery) to the raw payoff and forms the spread. A
    // degenerate denominator is an option-level error, not an engine
    // fault, so it travels as result data.
    specs.push_back({"combine",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto totals = leg_totals.pop(st)) {
                             jitter();
                             SpreadResult result;
                             result.option_index = totals->index;
                             result.error = std::move(totals->error);
                             if (result.error.empty()) {
                                 result.legs = LegValues{
                                     totals->premium,
                                     (1.0 - totals->recovery_rate) * totals->payoff_raw,
                                     totals->accrual};
                                 try {
                                     result.spread_bps = fair_spread(result.legs);
                                 } catch (const std::domain_error& e) {
                                     result.error = e.what();
                                 }
                             }
                             finished.push(std::move(result), st);
                         }
                         finished.close();
                     },
                     {&leg_totals, &finished}});

    specs.push_back({"emit",
                     [&](StageStats* st, Jitter& jitter) {
                         while (auto result = finished.pop(st)) {
                             jitter();
                             results.push_back(std::move(*result));
                         }
                     },
                     {&finished}});

    // Stats slots are fixed before launch so stage threads can hold
    // stable pointers into the vector.
    if (stats) {
        stats->stages.assign(specs.size(), StageStats{});
        for (std::size_t i = 0; i < specs.size(); ++i) stats->stages[i].name = specs[i].name;
        stats->interest_nodes = static_cast<const void*>(interest.times().data());
        stats->hazard_nodes = static_cast<const void*>(hazard.times().data());
    }

    ErrorSink sink;
    {
        std::vector<std::jthread> threads;
        threads.reserve(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            StageStats* stage_stats = stats ? &stats->stages[i] : nullptr;
            threads.emplace_back(
                [&, i, stage_stats] { run_stage(specs[i], stage_stats, sink, config); });
        }
    }

    if (sink.failed()) throw std::runtime_error(sink.describe());
    if (results.size() != options.size())
        throw std::logic_error("run_pipeline: result count does not match batch size");
    return results;
}

}  // namespace cdsflow
