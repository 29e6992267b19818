#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace convsim {

// Thrown when a handler tries to schedule an event earlier than the clock.
struct SchedulePastEvent : std::runtime_error {
    SchedulePastEvent(double event_time, double now)
        : std::runtime_error("event scheduled in the past"),
          event_time(event_time),
          now(now) {}
    double event_time;
    double now;
};

// Single-threaded event loop. Events run in (time, sequence) order; the
// sequence number breaks ties so two events at the same instant always run
// in schedule order, which keeps runs bit-reproducible.
class SimEngine {
public:
    SimEngine() = default;
    SimEngine(const SimEngine&) = delete;
    SimEngine& operator=(const SimEngine&) = delete;

    // Schedules fn at absolute time t. t may equal now().
    void schedule(double t, std::function<void()> fn);

    // Executes every pending event with time <= t_end, then advances the
    // clock to t_end. Events scheduled while running are honored if they
    // fall inside the horizon.
    void run_until(double t_end);

    double now() const { return now_; }
    uint64_t executed() const { return executed_; }
    size_t pending() const { return queue_.size(); }

    // FNV-1a over the (time, sequence) pairs of executed events. Two runs
    // of the same scenario and seed must produce the same value.
    uint64_t trace_hash() const { return trace_hash_; }

private:
    struct Ev {
        double time;
        uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Ev& a, const Ev& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Ev, std::vector<Ev>, Later> queue_;
    double now_ = 0.0;
    uint64_t next_seq_ = 0;
    uint64_t executed_ = 0;
    uint64_t trace_hash_ = 1469598103934665603ULL;
};

}  // namespace convsim
