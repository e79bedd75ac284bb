#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <surreal/config.hpp>
#include <surreal/guidelines.hpp>
#include <surreal/trace.hpp>

namespace surreal {

enum class Quality { Good, Bad };

struct Finding {
    std::string tag;
    std::string detail;
};

struct CoachMetrics {
    double stop_frequency_per_s = 0.0;          // Stop-action onsets per second
    double speed_change_frequency_per_s = 0.0;  // accel/decel sign flips per second
    double override_rate = 0.0;                 // overridden fraction of decisions
    int collision_count = 0;                    // ego-involved only
};

struct Assessment {
    Quality quality = Quality::Good;
    CoachMetrics metrics;
    std::vector<Finding> reasons;  // nonempty iff quality == Bad
};

/// Recomputes the four behavior metrics straight from the records.
inline CoachMetrics compute_metrics(const EpisodeTrace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("cannot assess an empty trace");
    CoachMetrics m;
    double total_time = trace.footer.total_time_s;
    if (total_time <= 0.0) {
        throw std::invalid_argument("cannot assess a trace with non-positive duration");
    }

    int stop_onsets = 0;
    bool was_stopping = false;
    for (const TraceRecord& r : trace.records) {
        bool stopping = r.final_action == AtomicAction::Stop;
        if (stopping && !was_stopping) ++stop_onsets;
        was_stopping = stopping;
    }
    m.stop_frequency_per_s = stop_onsets / total_time;

    int flips = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        double delta = trace.records[i].ego_speed - trace.records[i - 1].ego_speed;
        int sign = delta > 0.0 ? 1 : delta < 0.0 ? -1 : 0;
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++flips;
        last_sign = sign;
    }
    m.speed_change_frequency_per_s = flips / total_time;

    int decided = 0, overridden = 0;
    for (const TraceRecord& r : trace.records) {
        if (!r.decided) continue;
        ++decided;
        if (r.overridden) ++overridden;
    }
    m.override_rate = decided > 0 ? static_cast<double>(overridden) / decided : 0.0;

    for (const TraceRecord& r : trace.records) {
        for (const CollisionEvent& e : r.collisions) {
            if (e.ego_involved) ++m.collision_count;
        }
    }
    return m;
}

inline constexpr std::string_view kFindingExcessiveStopping = "excessive stopping";
inline constexpr std::string_view kFindingFrequentSpeedChanges = "frequent speed changes";
inline constexpr std::string_view kFindingHighOverrideRate = "high override rate";
inline constexpr std::string_view kFindingCollision = "collision occurred";

/// Compares the metrics against the thresholds. Bad iff at least one
/// finding; deterministic.
inline Assessment assess_episode(const EpisodeTrace& trace, const CoachThresholds& th) {
    Assessment a;
    a.metrics = compute_metrics(trace);
    auto flag = [&](std::string_view tag, const std::string& detail) {
        a.reasons.push_back({std::string(tag), detail});
    };
    char buf[128];
    if (a.metrics.stop_frequency_per_s > th.stop_frequency_per_s) {
        std::snprintf(buf, sizeof(buf), "%.3f stops per second exceeds %.3f",
                      a.metrics.stop_frequency_per_s, th.stop_frequency_per_s);
        flag(kFindingExcessiveStopping, buf);
    }
    if (a.metrics.speed_change_frequency_per_s > th.speed_change_frequency_per_s) {
        std::snprintf(buf, sizeof(buf), "%.3f speed direction changes per second exceeds %.3f",
                      a.metrics.speed_change_frequency_per_s, th.speed_change_frequency_per_s);
        flag(kFindingFrequentSpeedChanges, buf);
    }
    if (a.metrics.override_rate > th.override_rate) {
        std::snprintf(buf, sizeof(buf), "%.1f%% of decisions were overridden (limit %.1f%%)",
                      100.0 * a.metrics.override_rate, 100.0 * th.override_rate);
        flag(kFindingHighOverrideRate, buf);
    }
    if (a.metrics.collision_count > th.collision_count) {
        std::snprintf(buf, sizeof(buf), "%d ego-involved collision(s)", a.metrics.collision_count);
        flag(kFindingCollision, buf);
    }
    a.quality = a.reasons.empty() ? Quality::Good : Quality::Bad;
    return a;
}

/// Fixed finding-to-text table. One guideline per finding; Good yields
/// nothing.
inline std::vector<Guideline> generate_guidelines(const Assessment& a, int episode_index = 0) {
    std::vector<Guideline> out;
    for (const Finding& f : a.reasons) {
        Guideline g;
        g.source_finding = f.tag;
        g.created_at = episode_index;
        if (f.tag == kFindingExcessiveStopping) {
            g.text = "Maintain a consistent and safe speed.";
        } else if (f.tag == kFindingFrequentSpeedChanges) {
            g.text = "Avoid abrupt speed changes; adjust gradually and hold a steady pace.";
        } else if (f.tag == kFindingHighOverrideRate) {
            g.text = "Respect safe following distances before the safety system must intervene.";
        } else if (f.tag == kFindingCollision) {
            g.text = "Leave wider margins around other road users and reduce speed in dense traffic.";
        } else {
            continue;  // unknown finding tags produce no guideline
        }
        out.push_back(std::move(g));
    }
    return out;
}

/// Convenience wrapper: assess, generate, and fold into the store.
inline Assessment coach_episode(const EpisodeTrace& trace, const CoachThresholds& th,
                                GuidelineStore& store, int episode_index = 0) {
    Assessment a = assess_episode(trace, th);
    store.merge(generate_guidelines(a, episode_index));
    return a;
}

inline std::string render_assessment_text(const Assessment& a) {
    std::string out;
    out += "quality: ";
    out += a.quality == Quality::Good ? "Good" : "Bad";
    out += "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "metrics: stop_frequency=%.4f/s speed_change_frequency=%.4f/s "
                  "override_rate=%.4f collisions=%d\n",
                  a.metrics.stop_frequency_per_s, a.metrics.speed_change_frequency_per_s,
                  a.metrics.override_rate, a.metrics.collision_count);
    out += buf;
    for (const Finding& f : a.reasons) {
        out += "finding: " + f.tag + " (" + f.detail + ")\n";
    }
    return out;
}

} // namespace surreal
