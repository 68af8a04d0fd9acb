/*
 * Copyright 2026 The flipflag Authors
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

#ifndef FLIPFLAG_CLOCK_HPP
#define FLIPFLAG_CLOCK_HPP

#include <cstdint>

namespace flipflag {

/// Injected time source. Never reads the wall clock, so every scenario is
/// reproducible.
class SimClock {
 public:
  static constexpr std::uint64_t kDefaultEpoch = 1'600'000'000;

  std::uint64_t now() const { return now_; }
  void set(std::uint64_t seconds) { now_ = seconds; }
  void advance(std::uint64_t seconds) { now_ += seconds; }
  void advance_days(std::uint64_t days) { now_ += days * 86'400; }

 private:
  std::uint64_t now_ = kDefaultEpoch;
};

}  // namespace flipflag

#endif  // FLIPFLAG_CLOCK_HPP
