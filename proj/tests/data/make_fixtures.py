# Copyright 2026 The dptopk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Deterministic synthetic fixtures for the test suite.

No randomness: member ids are sequential, attributes cycle through fixed
lists, so every distinct-member count below is exact by construction.
Rerunning this script reproduces the committed CSVs byte for byte.
"""

import os

HERE = os.path.dirname(os.path.abspath(__file__))

REGIONS = ["ca", "ny"]
INDUSTRIES = ["tech", "fin", "health"]
CURRENT_DATES = ["2026-04-03", "2026-05-11", "2026-06-28", "2026-04-17", "2026-05-29", "2026-06-09"]
PREVIOUS_DATES = ["2026-01-05", "2026-02-14", "2026-03-21", "2026-01-26", "2026-02-03", "2026-03-30"]

# (employer, title, current-window members, previous-window members)
EMPLOYER_BLOCKS = [
    ("e_acme", "j_eng", 450, 400),
    ("e_globex", "j_sales", 380, 390),
    ("e_initech", "j_eng", 300, 150),
    ("e_umbrella", "j_ops", 120, 100),
    ("e_stark", "j_sales", 60, 55),
    ("e_tiny", "j_intern", 5, 3),
]

# Extra title volume so the jobs metric has a spread independent of the
# employer blocks above (same members, second title assignment not needed:
# titles come from the blocks; j_eng 750, j_sales 440, j_ops 120, j_intern 5).

# (skill, title, members in window)
SKILL_BLOCKS = [
    ("s_python", "j_eng", 700),
    ("s_comm", "j_sales", 600),
    ("s_sql", "j_eng", 500),
    ("s_git", "j_eng", 450),
    ("s_excel", "j_ops", 300),
    ("s_comm", "j_eng", 80),
    ("s_comm", "j_ops", 60),
    ("s_rare1", "j_eng", 2),
    ("s_rare2", "j_ops", 2),
]
SKILL_DATES = ["2021-09-15", "2022-05-10", "2023-02-20", "2024-08-05", "2025-12-01", "2026-03-18"]


def write_hires():
    rows = []
    member = 0

    def emit(count, employer, title, dates, country="us"):
        nonlocal member
        for i in range(count):
            member += 1
            rows.append(
                f"m{member:06d},{employer},{title},{country},"
                f"{REGIONS[i % 2]},{INDUSTRIES[i % 3]},{dates[i % len(dates)]}"
            )

    for employer, title, current, previous in EMPLOYER_BLOCKS:
        emit(current, employer, title, CURRENT_DATES)
    for employer, title, current, previous in EMPLOYER_BLOCKS:
        emit(previous, employer, title, PREVIOUS_DATES)
    # A handful of members with a second hire in the current window.
    for i in range(1, 11):
        rows.append(f"m{i:06d},e_tiny,j_intern,us,ca,tech,2026-06-15")
    # Rows outside both windows and outside the country, to exercise filters.
    for i in range(15):
        member += 1
        rows.append(f"m{member:06d},e_acme,j_eng,us,{REGIONS[i % 2]},{INDUSTRIES[i % 3]},2025-09-10")
    for i in range(20):
        member += 1
        rows.append(f"m{member:06d},e_acme,j_eng,de,be,tech,2026-05-20")

    with open(os.path.join(HERE, "hires.csv"), "w", newline="") as f:
        f.write("member_id,employer_id,title_id,country,region,industry,hire_date\n")
        f.write("\n".join(rows) + "\n")
    print(f"hires.csv: {len(rows)} data rows")


def write_skills():
    rows = []
    member = 0
    for skill, title, count in SKILL_BLOCKS:
        for i in range(count):
            member += 1
            rows.append(
                f"m{member:06d},us,{REGIONS[i % 2]},{title},{skill},{SKILL_DATES[i % len(SKILL_DATES)]}"
            )
    # Outside the five-year window, and outside the country.
    for i in range(10):
        member += 1
        rows.append(f"m{member:06d},us,ca,j_eng,s_python,2020-01-15")
    for i in range(10):
        member += 1
        rows.append(f"m{member:06d},de,be,j_eng,s_python,2025-06-01")

    with open(os.path.join(HERE, "skills.csv"), "w", newline="") as f:
        f.write("member_id,country,region,title_id,skill_id,observed_date\n")
        f.write("\n".join(rows) + "\n")
    print(f"skills.csv: {len(rows)} data rows")


def write_geography():
    with open(os.path.join(HERE, "geography.csv"), "w", newline="") as f:
        f.write("country,region\n")
        f.write("us,ca\n")
        f.write("us,ny\n")
        f.write("de,be\n")
        f.write("mx,\n")


def write_malformed():
    with open(os.path.join(HERE, "hires_malformed.csv"), "w", newline="") as f:
        f.write("member_id,employer_id,title_id,country,region,industry,hire_date\n")
        f.write("m000001,e_acme,j_eng,us,ca,tech,2026-05-01\n")
        f.write("m000002,e_acme,j_eng,us,ca,tech\n")                # 6 fields
        f.write("m000003,e_acme,j_eng,us,ca,tech,2026-05-02\n")
        f.write(",e_acme,j_eng,us,ca,tech,2026-05-03\n")            # empty member
        f.write("m000005,e_acme,j_eng,us,ca,tech,2026-13-01\n")     # bad month
        f.write("m000006,e_acme,j_eng,us,ca,tech,20260501\n")       # bad format
        f.write("m000007,e_acme,j_eng,,ca,tech,2026-05-04\n")       # empty country
        f.write("m000008,e_acme,j_eng,us,ca,tech,2026-05-05\n")

    with open(os.path.join(HERE, "skills_malformed.csv"), "w", newline="") as f:
        f.write("member_id,country,region,title_id,skill_id,observed_date\n")
        f.write("m000001,us,ca,j_eng,s_python,2026-01-10\n")
        f.write("m000002,us,ca,j_eng,s_python\n")                   # 5 fields
        f.write("m000003,us,ca,j_eng,s_python,2026-02-30\n")        # bad day
        f.write("m000004,us,ca,j_eng,s_sql,2026-01-12\n")

    with open(os.path.join(HERE, "hires_wrong_header.csv"), "w", newline="") as f:
        f.write("employer_id,member_id,title_id,country,region,industry,hire_date\n")
        f.write("e_acme,m000001,j_eng,us,ca,tech,2026-05-01\n")


if __name__ == "__main__":
    write_hires()
    write_skills()
    write_geography()
    write_malformed()
