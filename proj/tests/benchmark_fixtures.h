/*
 * Copyright 2026 The ifaad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Stand-in raw files shaped like the public benchmark downloads: same column
// layout and the per-class row counts of the real files, random feature
// values. They exercise the preparation path when the real files are absent.

#ifndef IFAAD_TESTS_BENCHMARK_FIXTURES_H_
#define IFAAD_TESTS_BENCHMARK_FIXTURES_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "ifaad/random.h"

namespace ifaad::fixture {

struct RawLayout {
  std::string name;
  // Class value and its row count in the real file.
  std::vector<std::pair<std::string, int>> class_counts;
};

inline const std::vector<RawLayout>& Layouts() {
  static const auto* layouts = new std::vector<RawLayout>{
      {"abalone",
       {{"1", 1}, {"2", 1}, {"3", 15}, {"4", 57}, {"5", 115}, {"6", 259}, {"7", 391},
        {"8", 568}, {"9", 689}, {"10", 634}, {"11", 487}, {"12", 267}, {"13", 203},
        {"14", 126}, {"15", 103}, {"16", 67}, {"17", 58}, {"18", 42}, {"19", 32},
        {"20", 26}, {"21", 14}, {"22", 6}, {"23", 9}, {"24", 2}, {"25", 1}, {"26", 1},
        {"27", 2}, {"29", 1}}},
      {"ann-thyroid-1v3", {{"1", 73}, {"2", 177}, {"3", 3178}}},
      {"cardiotocography", {{"1", 1655}, {"2", 295}, {"3", 176}}},
      {"mammography", {{"'-1'", 10923}, {"'1'", 260}}},
      {"shuttle",
       {{"1", 11478}, {"2", 13}, {"3", 39}, {"4", 2155}, {"5", 809}, {"6", 4}, {"7", 2}}},
      {"yeast",
       {{"CYT", 463}, {"NUC", 429}, {"MIT", 244}, {"ME3", 163}, {"ME2", 51}, {"ME1", 44},
        {"EXC", 35}, {"VAC", 30}, {"POX", 20}, {"ERL", 5}}},
  };
  return *layouts;
}

inline std::string Number(RandomEngine& rng) {
  return absl::StrCat(static_cast<int>(UniformIndex(rng, 1000)) / 100.0);
}

// Classes are interleaved round-robin so the file is not sorted by class.
inline std::string RawText(const RawLayout& layout, uint64_t seed) {
  RandomEngine rng = MakeEngine(seed, 0);
  std::vector<std::string> labels;
  std::vector<int> remaining;
  for (const auto& [label, count] : layout.class_counts) {
    labels.push_back(label);
    remaining.push_back(count);
  }
  std::string out;
  if (layout.name == "cardiotocography") {
    out = "FileName,Date,b,e,LBE,LB,AC,FM,UC,ASTV,MSTV,ALTV,MLTV,DL,DS,DP,DR,Width,"
          "Min,Max,Nmax,Nzeros,Mode,Mean,Median,Variance,Tendency,A,B,C,D,E,AD,DE,"
          "LD,FS,SUSP,CLASS,NSP\n";
  } else if (layout.name == "mammography") {
    out = "attr1,attr2,attr3,attr4,attr5,attr6,class\n";
  }
  int row = 0;
  bool any = true;
  while (any) {
    any = false;
    for (size_t c = 0; c < labels.size(); ++c) {
      if (remaining[c] == 0) continue;
      --remaining[c];
      any = true;
      std::string line;
      const std::string& label = labels[c];
      if (layout.name == "abalone") {
        static const char* kSex[] = {"M", "F", "I"};
        line = kSex[UniformIndex(rng, 3)];
        for (int i = 0; i < 7; ++i) absl::StrAppend(&line, ",", Number(rng));
        absl::StrAppend(&line, ",", label);
      } else if (layout.name == "ann-thyroid-1v3") {
        for (int i = 0; i < 21; ++i) absl::StrAppend(&line, Number(rng), " ");
        absl::StrAppend(&line, label, "  ");
      } else if (layout.name == "cardiotocography") {
        absl::StrAppend(&line, "F", row, ".txt,1996-01-0", 1 + row % 9);
        for (int i = 0; i < 36; ++i) absl::StrAppend(&line, ",", Number(rng));
        absl::StrAppend(&line, ",", label);
      } else if (layout.name == "mammography") {
        for (int i = 0; i < 6; ++i) absl::StrAppend(&line, Number(rng), ",");
        absl::StrAppend(&line, label);
      } else if (layout.name == "shuttle") {
        for (int i = 0; i < 9; ++i) absl::StrAppend(&line, Number(rng), " ");
        absl::StrAppend(&line, label);
      } else if (layout.name == "yeast") {
        absl::StrAppend(&line, "SEQ", row, "_YEAST ");
        for (int i = 0; i < 8; ++i) absl::StrAppend(&line, "  ", Number(rng));
        absl::StrAppend(&line, "  ", label);
      }
      absl::StrAppend(&out, line, "\n");
      ++row;
    }
  }
  return out;
}

}  // namespace ifaad::fixture

#endif  // IFAAD_TESTS_BENCHMARK_FIXTURES_H_
