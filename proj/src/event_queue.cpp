#include "tsn/event_queue.hpp"

#include "tsn/errors.hpp"

namespace tsn::sim {

void EventQueue::schedule(TimeNs at, Phase phase, std::function<void()> action) {
  if (at < now_) throw InvalidArgument("event scheduled in the past");
  heap_.push(Event{at, static_cast<int>(phase), next_seq_++, std::move(action)});
}

std::size_t EventQueue::run_until(TimeNs horizon) {
  std::size_t n = 0;
  while (!heap_.empty() && heap_.top().at <= horizon) {
    Event e = heap_.top();
    heap_.pop();
    now_ = e.at;
    e.action();
    ++n;
  }
  return n;
}

}  // namespace tsn::sim
