#include "tg/core.hpp"

#include <algorithm>
#include <sstream>

namespace tg {

EventStream validate_stream(std::vector<Event> events, NodeId num_nodes_hint) {
    if (events.empty()) {
        throw ValidationError("validate_stream: empty event list");
    }

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.t_start > e.t_end || e.src < 0 || e.dst < 0 || e.t_start < 0) {
            bad.push_back(i);
        }
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "validate_stream: invalid events at indices [";
        for (std::size_t j = 0; j < bad.size(); ++j) {
            if (j) msg << ", ";
            if (j == 16) {
                msg << "... " << bad.size() - j << " more";
                break;
            }
            msg << bad[j];
        }
        msg << "] (require src,dst >= 0 and 0 <= t_start <= t_end)";
        throw ValidationError(msg.str());
    }

    const bool sorted = std::is_sorted(events.begin(), events.end(),
                                       [](const Event& a, const Event& b) { return a.t_start < b.t_start; });
    if (!sorted) {
        std::stable_sort(events.begin(), events.end(),
                         [](const Event& a, const Event& b) { return a.t_start < b.t_start; });
    }

    EventStream s;
    s.t_min = events.front().t_start;
    s.t_max = events.front().t_end;
    s.transient = true;
    NodeId max_id = 0;
    for (const Event& e : events) {
        s.t_max = std::max(s.t_max, e.t_end);
        max_id = std::max({max_id, e.src, e.dst});
        if (e.t_start != e.t_end) s.transient = false;
    }
    s.num_nodes = std::max(num_nodes_hint, static_cast<NodeId>(max_id + 1));
    s.events = std::move(events);
    return s;
}

NormalizedTime normalize_time(Time t, const EventStream& stream) {
    if (t < stream.t_min || t > stream.t_max) {
        std::ostringstream msg;
        msg << "normalize_time: t=" << t << " outside [" << stream.t_min << ", " << stream.t_max << "]";
        throw RangeError(msg.str());
    }
    if (stream.t_max == stream.t_min) {
        return NormalizedTime{0.0};
    }
    return NormalizedTime{static_cast<double>(t - stream.t_min) /
                          static_cast<double>(stream.t_max - stream.t_min)};
}

EventStream slice_stream(const EventStream& stream, std::size_t begin, std::size_t end) {
    if (begin >= end || end > stream.events.size()) {
        throw ParameterError("slice_stream: bad range");
    }
    EventStream s;
    s.events.assign(stream.events.begin() + static_cast<std::ptrdiff_t>(begin),
                    stream.events.begin() + static_cast<std::ptrdiff_t>(end));
    s.num_nodes = stream.num_nodes;
    s.t_min = s.events.front().t_start;
    s.t_max = s.events.front().t_end;
    s.transient = true;
    for (const Event& e : s.events) {
        s.t_max = std::max(s.t_max, e.t_end);
        if (e.t_start != e.t_end) s.transient = false;
    }
    return s;
}

}  // namespace tg
