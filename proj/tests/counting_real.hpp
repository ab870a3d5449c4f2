// Copyright 2026 The qtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drop-in scalar that counts arithmetic operations, for verifying update
// cost empirically. Comparisons and copies are free; +, -, *, / count one.

#ifndef QTRACK_TESTS_COUNTING_REAL_HPP
#define QTRACK_TESTS_COUNTING_REAL_HPP

#include <cstdint>

namespace qtrack::testing {

struct CountingReal {
  double v = 0.0;

  static inline std::uint64_t ops = 0;
  static void reset() { ops = 0; }

  CountingReal() = default;
  CountingReal(double x) : v(x) {}  // NOLINT: implicit by design
  CountingReal(int x) : v(x) {}     // NOLINT: literals like Real(1)

  explicit operator double() const { return v; }

  friend CountingReal operator+(CountingReal a, CountingReal b) {
    ++ops;
    return {a.v + b.v};
  }
  friend CountingReal operator-(CountingReal a, CountingReal b) {
    ++ops;
    return {a.v - b.v};
  }
  friend CountingReal operator*(CountingReal a, CountingReal b) {
    ++ops;
    return {a.v * b.v};
  }
  friend CountingReal operator/(CountingReal a, CountingReal b) {
    ++ops;
    return {a.v / b.v};
  }
  CountingReal operator-() const {
    ++ops;
    return {-v};
  }
  CountingReal& operator+=(CountingReal b) {
    ++ops;
    v += b.v;
    return *this;
  }
  CountingReal& operator-=(CountingReal b) {
    ++ops;
    v -= b.v;
    return *this;
  }
  CountingReal& operator*=(CountingReal b) {
    ++ops;
    v *= b.v;
    return *this;
  }
  CountingReal& operator/=(CountingReal b) {
    ++ops;
    v /= b.v;
    return *this;
  }

  friend bool operator<(CountingReal a, CountingReal b) { return a.v < b.v; }
  friend bool operator>(CountingReal a, CountingReal b) { return a.v > b.v; }
  friend bool operator<=(CountingReal a, CountingReal b) { return a.v <= b.v; }
  friend bool operator>=(CountingReal a, CountingReal b) { return a.v >= b.v; }
  friend bool operator==(CountingReal a, CountingReal b) { return a.v == b.v; }
  friend bool operator!=(CountingReal a, CountingReal b) { return a.v != b.v; }
};

}  // namespace qtrack::testing

#endif  // QTRACK_TESTS_COUNTING_REAL_HPP
