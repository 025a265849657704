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

#include <string>
#include <string_view>
#include <vector>

#include "ddf/column.hpp"

namespace ddf {

struct Field {
  std::string name;
  DataType dtype;
};

/// Ordered column names and types, with an optional set of key columns used
/// by keyed operators (join, groupby, ...).
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Field> fields, std::vector<int> key_indices = {});

  int num_fields() const { return static_cast<int>(fields_.size()); }
  const Field& field(int i) const { return fields_[i]; }
  const std::vector<Field>& fields() const { return fields_; }
  const std::vector<int>& key_indices() const { return key_indices_; }

  /// Position of `name`, or -1 when absent.
  int index_of(std::string_view name) const;
  /// Position of `name`; throws InvalidArgument when absent.
  int require(std::string_view name) const;

  /// Same names and dtypes, in order. Key designation is runtime metadata and
  /// is not part of structural equality.
  bool equals(const Schema& other) const;

  Schema with_keys(std::vector<int> key_indices) const;

 private:
  std::vector<Field> fields_;
  std::vector<int> key_indices_;
};

}  // namespace ddf
