//
// Copyright 2026 The dptopk Authors
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
//

#include "dptopk/dates.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace dptopk {

namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[month - 1];
}

// Parses exactly `width` digits starting at `pos`; throws on anything else.
int parse_digits(std::string_view text, size_t pos, size_t width, std::string_view what) {
  if (pos + width > text.size()) {
    throw std::invalid_argument("date field too short: " + std::string(what));
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc() || ptr != first + width) {
    throw std::invalid_argument("non-numeric date field: " + std::string(what));
  }
  return value;
}

}  // namespace

bool is_valid_year_month(const YearMonth& ym) {
  return ym.month >= 1 && ym.month <= 12;
}

bool is_valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

YearMonth parse_year_month(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') {
    throw std::invalid_argument("expected YYYY-MM, got '" + std::string(text) + "'");
  }
  YearMonth ym{parse_digits(text, 0, 4, "year"), parse_digits(text, 5, 2, "month")};
  if (!is_valid_year_month(ym)) {
    throw std::invalid_argument("month out of range in '" + std::string(text) + "'");
  }
  return ym;
}

std::string to_string(const YearMonth& ym) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
  return buf;
}

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  Date d{parse_digits(text, 0, 4, "year"), parse_digits(text, 5, 2, "month"),
         parse_digits(text, 8, 2, "day")};
  if (!is_valid_date(d)) {
    throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
  }
  return d;
}

std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

YearMonth month_of(const Date& d) { return {d.year, d.month}; }

long month_index(const YearMonth& ym) {
  return static_cast<long>(ym.year) * 12 + (ym.month - 1);
}

YearMonth add_months(const YearMonth& ym, int delta) {
  long idx = month_index(ym) + delta;
  long year = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
  return {static_cast<int>(year), static_cast<int>(idx - year * 12 + 1)};
}

}  // namespace dptopk
