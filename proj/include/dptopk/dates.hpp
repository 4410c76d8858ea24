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

#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace dptopk {

// Calendar month; the granularity of report dates.
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12
  auto operator<=>(const YearMonth&) const = default;
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;
  auto operator<=>(const Date&) const = default;
};

bool is_valid_year_month(const YearMonth& ym);
bool is_valid_date(const Date& d);

// "YYYY-MM". Throws std::invalid_argument on malformed input.
YearMonth parse_year_month(std::string_view text);
std::string to_string(const YearMonth& ym);

// ISO-8601 calendar date "YYYY-MM-DD". Throws std::invalid_argument.
Date parse_date(std::string_view text);
std::string to_string(const Date& d);

YearMonth month_of(const Date& d);

// Months since year 0: year * 12 + (month - 1). Window arithmetic runs on
// these indices so month ranges never depend on day-of-month.
long month_index(const YearMonth& ym);

YearMonth add_months(const YearMonth& ym, int delta);

}  // namespace dptopk
