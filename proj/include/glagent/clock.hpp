// Copyright 2026 The glagent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <memory>
#include <string_view>

namespace glagent {

// Milliseconds since an arbitrary origin.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_ms() const = 0;
  // Charge simulated time (declared LLM latency). Wall clocks ignore it.
  virtual void advance(double ms) = 0;
  virtual bool logical() const = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}
  double now_ms() const override {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - origin_)
        .count();
  }
  void advance(double) override {}
  bool logical() const override { return false; }

 private:
  std::chrono::steady_clock::time_point origin_;
};

// Deterministic clock: only declared latencies move it.
class LogicalClock final : public Clock {
 public:
  double now_ms() const override { return now_; }
  void advance(double ms) override {
    if (ms > 0) now_ += ms;
  }
  bool logical() const override { return true; }

 private:
  double now_ = 0.0;
};

std::unique_ptr<Clock> make_clock(std::string_view kind);

}  // namespace glagent
