/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ddf/error.hpp"

namespace ddf {

enum class DataType : uint8_t {
  Int64 = 0,
  Float64 = 1,
  Bool = 2,
  Utf8 = 3,
};

inline bool is_fixed_width(DataType t) { return t != DataType::Utf8; }
inline bool is_numeric(DataType t) {
  return t == DataType::Int64 || t == DataType::Float64;
}

/// Bytes per value for fixed-width types. Bool is stored one byte per row;
/// only validity bitmaps are bit-packed.
inline int fixed_width(DataType t) {
  switch (t) {
    case DataType::Int64: return 8;
    case DataType::Float64: return 8;
    case DataType::Bool: return 1;
    default: throw InvalidArgument("fixed_width: Utf8 has no fixed width");
  }
}

const char* to_string(DataType t);
DataType data_type_from_tag(uint8_t tag);

/// Int64 sums wrap around on overflow (two's complement), like the columnar
/// engines this format mirrors.
inline int64_t wrapping_add(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) + uint64_t(b));
}

/// One value of any column type; monostate encodes null.
using Scalar = std::variant<std::monostate, int64_t, double, bool, std::string>;

inline bool scalar_is_null(const Scalar& s) {
  return std::holds_alternative<std::monostate>(s);
}

/// Total order over scalars of one column type: null sorts before any value.
int compare_scalars(const Scalar& a, const Scalar& b);

/// Immutable typed column: optional bit-packed validity bitmap (1 = valid),
/// optional string offsets, and a contiguous value buffer.
class Column {
 public:
  Column(DataType dtype, int64_t length, std::vector<uint8_t> validity,
         std::vector<int64_t> offsets, std::vector<uint8_t> data);

  DataType dtype() const { return dtype_; }
  int64_t length() const { return length_; }

  bool has_validity() const { return !validity_.empty(); }
  bool is_valid(int64_t i) const {
    return validity_.empty() || (validity_[i >> 3] >> (i & 7)) & 1;
  }
  bool is_null(int64_t i) const { return !is_valid(i); }
  int64_t null_count() const;

  int64_t int64_at(int64_t i) const {
    int64_t v;
    std::memcpy(&v, data_.data() + i * 8, 8);
    return v;
  }
  double float64_at(int64_t i) const {
    double v;
    std::memcpy(&v, data_.data() + i * 8, 8);
    return v;
  }
  bool bool_at(int64_t i) const { return data_[i] != 0; }
  std::string_view utf8_at(int64_t i) const {
    return {reinterpret_cast<const char*>(data_.data()) + offsets_[i],
            static_cast<size_t>(offsets_[i + 1] - offsets_[i])};
  }

  /// Numeric value widened to double; caller must ensure is_numeric(dtype).
  double numeric_at(int64_t i) const {
    return dtype_ == DataType::Int64 ? static_cast<double>(int64_at(i))
                                     : float64_at(i);
  }

  Scalar scalar_at(int64_t i) const;

  std::span<const uint8_t> validity_buffer() const { return validity_; }
  std::span<const int64_t> offsets() const { return offsets_; }
  std::span<const uint8_t> data() const { return data_; }

 private:
  DataType dtype_;
  int64_t length_;
  std::vector<uint8_t> validity_;  // empty means all valid
  std::vector<int64_t> offsets_;   // Utf8 only, length+1 entries
  std::vector<uint8_t> data_;
};

/// Compares cell a[ia] with b[ib]; null sorts first, nulls compare equal.
/// Requires matching dtypes.
int compare_cells(const Column& a, int64_t ia, const Column& b, int64_t ib);
bool cells_equal(const Column& a, int64_t ia, const Column& b, int64_t ib);

/// Incremental column construction; the only mutating path to a Column.
class ColumnBuilder {
 public:
  explicit ColumnBuilder(DataType dtype) : dtype_(dtype) {
    if (dtype == DataType::Utf8) offsets_.push_back(0);
  }

  DataType dtype() const { return dtype_; }
  int64_t length() const { return length_; }

  void reserve(int64_t rows);
  void append_int64(int64_t v);
  void append_float64(double v);
  void append_bool(bool v);
  void append_utf8(std::string_view v);
  void append_null();
  void append_scalar(const Scalar& s);
  /// Copies cell `row` of `src` (value or null). Dtypes must match.
  void append_from(const Column& src, int64_t row);

  Column finish();

 private:
  void push_valid_bit(bool valid);
  void require(DataType t, const char* op) const;

  DataType dtype_;
  int64_t length_ = 0;
  bool any_null_ = false;
  std::vector<uint8_t> validity_;
  std::vector<int64_t> offsets_;
  std::vector<uint8_t> data_;
};

}  // namespace ddf
