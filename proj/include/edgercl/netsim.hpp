/*
 *   Copyright 2026 The edgercl authors
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

/**
 * @file
 *
 * Deterministic virtual-clock machinery for the coordination protocol:
 * an event queue ordered by (time, insertion sequence) and a seeded
 * message-latency model with per-pair FIFO delivery. Latency draws use a
 * hand-rolled uniform so transcripts are byte-stable across standard
 * library implementations.
 */

#ifndef EDGERCL_NETSIM_HPP
#define EDGERCL_NETSIM_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "edgercl/core.hpp"

namespace edgercl {

struct LatencyModel {
  double mean_ms = 5.0;
  double jitter_ms = 1.0;
};

/// Samples per-message delays of mean + jitter * U[-1,1], clamped at 0,
/// and enforces per-(from,to) FIFO ordering on delivery times.
class VirtualNet {
 public:
  VirtualNet(const LatencyModel& model, std::uint64_t seed)
      : model_(model), rng_(seed) {
    if (!(model.mean_ms >= 0.0) || !(model.jitter_ms >= 0.0)) {
      throw Error("latency mean and jitter must be non-negative");
    }
  }

  double sample_delay() {
    const double u =
        static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // [0,1), portable
    const double d = model_.mean_ms + model_.jitter_ms * (2.0 * u - 1.0);
    return d > 0.0 ? d : 0.0;
  }

  /// Delivery time for a message sent at @p send_time on the given pair.
  double deliver_at(const std::string& from, const std::string& to,
                    double send_time) {
    double t = send_time + sample_delay();
    double& last = last_delivery_[{from, to}];
    if (t < last) t = last;  // reliable channel, no reordering
    last = t;
    return t;
  }

  const LatencyModel& model() const { return model_; }

 private:
  LatencyModel model_;
  std::mt19937_64 rng_;
  std::map<std::pair<std::string, std::string>, double> last_delivery_;
};

/// Priority event loop; equal times run in scheduling order so a fixed
/// schedule always replays identically.
class EventQueue {
 public:
  void at(double time, std::function<void()> fn) {
    if (time < now_) {
      throw Error("event scheduled in the past");
    }
    queue_.push(Event{time, seq_++, std::move(fn)});
  }

  void run() {
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      ev.fn();
    }
  }

  double now() const { return now_; }

 private:
  struct Event {
    double time;
    std::uint64_t seq;
    std::function<void()> fn;

    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
};

}  // namespace edgercl

#endif  // EDGERCL_NETSIM_HPP
