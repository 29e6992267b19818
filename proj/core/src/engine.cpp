#include "convsim/engine.hpp"

#include <cstring>
#include <utility>

namespace convsim {

namespace {

uint64_t fnv1a_u64(uint64_t h, uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

void SimEngine::schedule(double t, std::function<void()> fn) {
    if (t < now_) throw SchedulePastEvent(t, now_);
    queue_.push(Ev{t, next_seq_++, std::move(fn)});
}

void SimEngine::run_until(double t_end) {
    while (!queue_.empty() && queue_.top().time <= t_end) {
        // priority_queue::top is const; the handler is moved out before pop.
        Ev ev = std::move(const_cast<Ev&>(queue_.top()));
        queue_.pop();
        now_ = ev.time;
        ++executed_;
        uint64_t tbits;
        static_assert(sizeof(tbits) == sizeof(ev.time));
        std::memcpy(&tbits, &ev.time, sizeof(tbits));
        trace_hash_ = fnv1a_u64(fnv1a_u64(trace_hash_, tbits), ev.seq);
        ev.fn();
    }
    if (t_end > now_) now_ = t_end;
}

}  // namespace convsim
