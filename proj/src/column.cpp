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

#include "ddf/column.hpp"

namespace ddf {

const char* to_string(DataType t) {
  switch (t) {
    case DataType::Int64: return "int64";
    case DataType::Float64: return "float64";
    case DataType::Bool: return "bool";
    case DataType::Utf8: return "utf8";
  }
  return "?";
}

DataType data_type_from_tag(uint8_t tag) {
  if (tag > 3) {
    throw DecodeError("unknown dtype tag " + std::to_string(int(tag)));
  }
  return static_cast<DataType>(tag);
}

int compare_scalars(const Scalar& a, const Scalar& b) {
  const bool an = scalar_is_null(a), bn = scalar_is_null(b);
  if (an || bn) return int(bn) - int(an);  // null < value, null == null
  if (a.index() != b.index()) {
    // Mixed numeric comparison (int64 pivot vs float64 key and vice versa).
    if ((std::holds_alternative<int64_t>(a) || std::holds_alternative<double>(a)) &&
        (std::holds_alternative<int64_t>(b) || std::holds_alternative<double>(b))) {
      double da = std::holds_alternative<int64_t>(a)
                      ? double(std::get<int64_t>(a)) : std::get<double>(a);
      double db = std::holds_alternative<int64_t>(b)
                      ? double(std::get<int64_t>(b)) : std::get<double>(b);
      return da < db ? -1 : (db < da ? 1 : 0);
    }
    throw InvalidArgument("compare_scalars: mismatched scalar types");
  }
  auto cmp3 = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
  switch (a.index()) {
    case 1: return cmp3(std::get<int64_t>(a), std::get<int64_t>(b));
    case 2: return cmp3(std::get<double>(a), std::get<double>(b));
    case 3: return cmp3(int(std::get<bool>(a)), int(std::get<bool>(b)));
    case 4: {
      int c = std::get<std::string>(a).compare(std::get<std::string>(b));
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return 0;
}

Column::Column(DataType dtype, int64_t length, std::vector<uint8_t> validity,
               std::vector<int64_t> offsets, std::vector<uint8_t> data)
    : dtype_(dtype),
      length_(length),
      validity_(std::move(validity)),
      offsets_(std::move(offsets)),
      data_(std::move(data)) {
  if (length_ < 0) throw InvalidArgument("column length must be >= 0");
  if (!validity_.empty() &&
      validity_.size() < static_cast<size_t>((length_ + 7) / 8)) {
    throw InvalidArgument("validity bitmap shorter than column length");
  }
  if (dtype_ == DataType::Utf8) {
    if (offsets_.size() != static_cast<size_t>(length_ + 1)) {
      throw InvalidArgument("utf8 column needs length+1 offsets");
    }
    if (offsets_.front() != 0) throw InvalidArgument("offsets must start at 0");
    for (size_t i = 1; i < offsets_.size(); i++) {
      if (offsets_[i] < offsets_[i - 1]) {
        throw InvalidArgument("offsets must be non-decreasing");
      }
    }
    if (offsets_.back() != static_cast<int64_t>(data_.size())) {
      throw InvalidArgument("final offset must equal data size");
    }
  } else {
    if (!offsets_.empty()) {
      throw InvalidArgument("fixed-width column cannot carry offsets");
    }
    if (data_.size() != static_cast<size_t>(length_ * fixed_width(dtype_))) {
      throw InvalidArgument("data buffer size does not match length * width");
    }
  }
}

int64_t Column::null_count() const {
  if (validity_.empty()) return 0;
  int64_t nulls = 0;
  for (int64_t i = 0; i < length_; i++) nulls += is_null(i);
  return nulls;
}

Scalar Column::scalar_at(int64_t i) const {
  if (is_null(i)) return std::monostate{};
  switch (dtype_) {
    case DataType::Int64: return int64_at(i);
    case DataType::Float64: return float64_at(i);
    case DataType::Bool: return bool_at(i);
    case DataType::Utf8: return std::string(utf8_at(i));
  }
  return std::monostate{};
}

int compare_cells(const Column& a, int64_t ia, const Column& b, int64_t ib) {
  const bool an = a.is_null(ia), bn = b.is_null(ib);
  if (an || bn) return int(bn) - int(an);
  auto cmp3 = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
  switch (a.dtype()) {
    case DataType::Int64: return cmp3(a.int64_at(ia), b.int64_at(ib));
    case DataType::Float64: return cmp3(a.float64_at(ia), b.float64_at(ib));
    case DataType::Bool: return cmp3(int(a.bool_at(ia)), int(b.bool_at(ib)));
    case DataType::Utf8: {
      int c = a.utf8_at(ia).compare(b.utf8_at(ib));
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return 0;
}

bool cells_equal(const Column& a, int64_t ia, const Column& b, int64_t ib) {
  return compare_cells(a, ia, b, ib) == 0;
}

void ColumnBuilder::require(DataType t, const char* op) const {
  if (dtype_ != t) {
    throw InvalidArgument(std::string(op) + ": column dtype is " +
                          to_string(dtype_));
  }
}

void ColumnBuilder::push_valid_bit(bool valid) {
  if (!valid && !any_null_) {
    // Materialize the bitmap lazily; earlier rows were all valid.
    any_null_ = true;
    validity_.assign((length_ + 8) / 8 + 8, 0);
    for (int64_t i = 0; i < length_; i++) validity_[i >> 3] |= uint8_t(1u << (i & 7));
  }
  if (any_null_) {
    size_t byte = static_cast<size_t>(length_ >> 3);
    if (byte >= validity_.size()) validity_.resize(validity_.size() * 2 + 8, 0);
    if (valid) validity_[byte] |= uint8_t(1u << (length_ & 7));
  }
  length_++;
}

void ColumnBuilder::reserve(int64_t rows) {
  if (dtype_ == DataType::Utf8) {
    offsets_.reserve(rows + 1);
  } else {
    data_.reserve(rows * fixed_width(dtype_));
  }
}

void ColumnBuilder::append_int64(int64_t v) {
  require(DataType::Int64, "append_int64");
  const auto* p = reinterpret_cast<const uint8_t*>(&v);
  data_.insert(data_.end(), p, p + 8);
  push_valid_bit(true);
}

void ColumnBuilder::append_float64(double v) {
  require(DataType::Float64, "append_float64");
  const auto* p = reinterpret_cast<const uint8_t*>(&v);
  data_.insert(data_.end(), p, p + 8);
  push_valid_bit(true);
}

void ColumnBuilder::append_bool(bool v) {
  require(DataType::Bool, "append_bool");
  data_.push_back(v ? 1 : 0);
  push_valid_bit(true);
}

void ColumnBuilder::append_utf8(std::string_view v) {
  require(DataType::Utf8, "append_utf8");
  data_.insert(data_.end(), v.begin(), v.end());
  offsets_.push_back(static_cast<int64_t>(data_.size()));
  push_valid_bit(true);
}

void ColumnBuilder::append_null() {
  // Null slots still occupy space so that offsets/data stay aligned.
  switch (dtype_) {
    case DataType::Utf8:
      offsets_.push_back(static_cast<int64_t>(data_.size()));
      break;
    case DataType::Bool:
      data_.push_back(0);
      break;
    default:
      data_.insert(data_.end(), 8, 0);
  }
  push_valid_bit(false);
}

void ColumnBuilder::append_scalar(const Scalar& s) {
  if (scalar_is_null(s)) {
    append_null();
  } else if (std::holds_alternative<int64_t>(s)) {
    append_int64(std::get<int64_t>(s));
  } else if (std::holds_alternative<double>(s)) {
    append_float64(std::get<double>(s));
  } else if (std::holds_alternative<bool>(s)) {
    append_bool(std::get<bool>(s));
  } else {
    append_utf8(std::get<std::string>(s));
  }
}

void ColumnBuilder::append_from(const Column& src, int64_t row) {
  if (src.dtype() != dtype_) {
    throw InvalidArgument("append_from: dtype mismatch");
  }
  if (src.is_null(row)) {
    append_null();
    return;
  }
  switch (dtype_) {
    case DataType::Int64: append_int64(src.int64_at(row)); break;
    case DataType::Float64: append_float64(src.float64_at(row)); break;
    case DataType::Bool: append_bool(src.bool_at(row)); break;
    case DataType::Utf8: append_utf8(src.utf8_at(row)); break;
  }
}

Column ColumnBuilder::finish() {
  std::vector<uint8_t> validity;
  if (any_null_) {
    validity.assign(validity_.begin(), validity_.begin() + (length_ + 7) / 8);
  }
  if (dtype_ != DataType::Utf8) offsets_.clear();
  return Column(dtype_, length_, std::move(validity), std::move(offsets_),
                std::move(data_));
}

}  // namespace ddf
