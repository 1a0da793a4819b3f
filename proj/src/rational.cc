// Copyright 2026 The legone Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "legone/rational.h"

#include <limits>
#include <stdexcept>

namespace legone {
namespace {

__int128 Gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = FromWide(n, d);
}

Rational Rational::FromWide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = Gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();
  if (n > kMax || n < -kMax || d > kMax) {
    throw std::overflow_error("rational overflow");
  }
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

std::string Rational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::Parse(std::string_view text) {
  auto fail = [&]() {
    throw std::invalid_argument("not a rational literal: " + std::string(text));
  };
  if (text.empty()) fail();
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::string_view body = text.substr(pos);
  if (body.empty()) fail();
  auto parse_digits = [&](std::string_view s) -> __int128 {
    if (s.empty()) fail();
    __int128 v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
      if (v > std::numeric_limits<std::int64_t>::max()) {
        throw std::overflow_error("rational literal too large");
      }
    }
    return v;
  };
  Rational r;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    r = FromWide(parse_digits(body.substr(0, slash)),
                 parse_digits(body.substr(slash + 1)));
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view ip = body.substr(0, dot);
    std::string_view fp = body.substr(dot + 1);
    if (ip.empty() && fp.empty()) fail();
    __int128 n = ip.empty() ? 0 : parse_digits(ip);
    __int128 d = 1;
    for (char c : fp) {
      if (c < '0' || c > '9') fail();
      n = n * 10 + (c - '0');
      d *= 10;
      if (d > std::numeric_limits<std::int64_t>::max() ||
          n > std::numeric_limits<std::int64_t>::max()) {
        throw std::overflow_error("decimal literal too long");
      }
    }
    r = FromWide(n, d);
  } else {
    r = FromWide(parse_digits(body), 1);
  }
  return negative ? -r : r;
}

Rational Rational::operator-() const { return FromWide(-(__int128)num_, den_); }

Rational& Rational::operator+=(const Rational& o) {
  *this = FromWide((__int128)num_ * o.den_ + (__int128)o.num_ * den_,
                   (__int128)den_ * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  *this = FromWide((__int128)num_ * o.num_, (__int128)den_ * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  *this = FromWide((__int128)num_ * o.den_, (__int128)den_ * o.num_);
  return *this;
}

bool operator<(const Rational& a, const Rational& b) {
  return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.ToString();
}

}  // namespace legone
