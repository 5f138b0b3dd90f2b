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

// Binary forest format, all integers little-endian:
//
//   magic      8 bytes  "IFAADFOR"
//   version    u32      currently 1
//   scheme     u8       WeightScheme value
//   seed       u64
//   subsample  u32
//   features   u32
//   trees      u32
//   nodes      u32      total node count m
//   per tree:
//     count    u32
//     per node (pre-order):
//       global_index i32, kind u8 (0 internal, 1 leaf), split_feature i32,
//       split_threshold f64, left i32, right i32, depth i32,
//       train_count i32, node_score f64
//
// Doubles are written as their IEEE-754 bit patterns.

#include <bit>
#include <cstring>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ifaad/forest.h"
#include "ifaad/status_macros.h"

namespace ifaad {

namespace {

constexpr char kMagic[8] = {'I', 'F', 'A', 'A', 'D', 'F', 'O', 'R'};
constexpr uint32_t kFormatVersion = 1;

class Writer {
 public:
  void Bytes(const char* data, size_t size) { out_.append(data, size); }
  void U8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  std::string Release() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  absl::Status Need(size_t size) const {
    if (in_.size() - pos_ < size) {
      return absl::DataLossError(
          absl::StrCat("truncated forest stream at byte ", pos_));
    }
    return absl::OkStatus();
  }
  absl::StatusOr<uint8_t> U8() {
    RETURN_IF_ERROR(Need(1));
    return static_cast<uint8_t>(in_[pos_++]);
  }
  absl::StatusOr<uint32_t> U32() {
    RETURN_IF_ERROR(Need(4));
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(in_[pos_++])) << (8 * i);
    }
    return v;
  }
  absl::StatusOr<uint64_t> U64() {
    RETURN_IF_ERROR(Need(8));
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(in_[pos_++])) << (8 * i);
    }
    return v;
  }
  absl::StatusOr<int32_t> I32() {
    ASSIGN_OR_RETURN(const uint32_t v, U32());
    return static_cast<int32_t>(v);
  }
  absl::StatusOr<double> F64() {
    ASSIGN_OR_RETURN(const uint64_t v, U64());
    return std::bit_cast<double>(v);
  }
  absl::StatusOr<std::string_view> Bytes(size_t size) {
    RETURN_IF_ERROR(Need(size));
    std::string_view view = in_.substr(pos_, size);
    pos_ += size;
    return view;
  }
  bool AtEnd() const { return pos_ == in_.size(); }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  size_t pos_ = 0;
};

// Bytes per serialized node.
constexpr size_t kNodeBytes = 4 + 1 + 4 + 8 + 4 + 4 + 4 + 4 + 8;

}  // namespace

std::string SerializeForest(const Forest& forest) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kFormatVersion);
  w.U8(static_cast<uint8_t>(forest.scheme));
  w.U64(forest.seed);
  w.U32(static_cast<uint32_t>(forest.subsample_size));
  w.U32(static_cast<uint32_t>(forest.num_features));
  w.U32(static_cast<uint32_t>(forest.trees.size()));
  w.U32(static_cast<uint32_t>(forest.num_nodes));
  for (const Tree& tree : forest.trees) {
    w.U32(static_cast<uint32_t>(tree.nodes.size()));
    for (const TreeNode& node : tree.nodes) {
      w.I32(node.global_index);
      w.U8(node.is_leaf ? 1 : 0);
      w.I32(node.split_feature);
      w.F64(node.split_threshold);
      w.I32(node.left);
      w.I32(node.right);
      w.I32(node.depth);
      w.I32(node.train_count);
      w.F64(node.node_score);
    }
  }
  return w.Release();
}

absl::StatusOr<Forest> DeserializeForest(std::string_view bytes) {
  Reader r(bytes);
  ASSIGN_OR_RETURN(const std::string_view magic, r.Bytes(sizeof(kMagic)));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    return absl::DataLossError("not a forest stream (bad magic)");
  }
  ASSIGN_OR_RETURN(const uint32_t version, r.U32());
  if (version != kFormatVersion) {
    return absl::FailedPreconditionError(absl::StrCat(
        "unsupported forest format version ", version, " (expected ",
        kFormatVersion, ")"));
  }

  Forest forest;
  ASSIGN_OR_RETURN(const uint8_t scheme, r.U8());
  if (scheme > static_cast<uint8_t>(WeightScheme::kLeafDepth)) {
    return absl::DataLossError(absl::StrCat("unknown weight scheme ", scheme));
  }
  forest.scheme = static_cast<WeightScheme>(scheme);
  ASSIGN_OR_RETURN(forest.seed, r.U64());
  ASSIGN_OR_RETURN(const uint32_t subsample, r.U32());
  ASSIGN_OR_RETURN(const uint32_t features, r.U32());
  ASSIGN_OR_RETURN(const uint32_t num_trees, r.U32());
  ASSIGN_OR_RETURN(const uint32_t num_nodes, r.U32());
  constexpr uint32_t kMaxField = static_cast<uint32_t>(INT32_MAX);
  if (subsample > kMaxField || features > kMaxField || num_nodes > kMaxField) {
    return absl::DataLossError("forest header field out of range");
  }
  // Each tree costs at least its count word plus one node.
  if (num_trees > r.remaining() / (4 + kNodeBytes)) {
    return absl::DataLossError("truncated forest stream: tree count exceeds data");
  }
  forest.subsample_size = static_cast<int32_t>(subsample);
  forest.num_features = static_cast<int32_t>(features);
  forest.num_nodes = static_cast<int32_t>(num_nodes);
  forest.trees.resize(num_trees);

  for (Tree& tree : forest.trees) {
    ASSIGN_OR_RETURN(const uint32_t count, r.U32());
    if (count > r.remaining() / kNodeBytes) {
      return absl::DataLossError("truncated forest stream: node count exceeds data");
    }
    tree.nodes.resize(count);
    for (TreeNode& node : tree.nodes) {
      ASSIGN_OR_RETURN(node.global_index, r.I32());
      ASSIGN_OR_RETURN(const uint8_t kind, r.U8());
      if (kind > 1) return absl::DataLossError("bad node kind");
      node.is_leaf = kind == 1;
      ASSIGN_OR_RETURN(node.split_feature, r.I32());
      ASSIGN_OR_RETURN(node.split_threshold, r.F64());
      ASSIGN_OR_RETURN(node.left, r.I32());
      ASSIGN_OR_RETURN(node.right, r.I32());
      ASSIGN_OR_RETURN(node.depth, r.I32());
      ASSIGN_OR_RETURN(node.train_count, r.I32());
      ASSIGN_OR_RETURN(node.node_score, r.F64());
    }
  }
  if (!r.AtEnd()) return absl::DataLossError("trailing bytes after forest");

  const absl::Status valid = ValidateForest(forest);
  if (!valid.ok()) {
    return absl::DataLossError(absl::StrCat("corrupt forest: ", valid.message()));
  }
  return forest;
}

}  // namespace ifaad
