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

#include "ddf/schema.hpp"

#include <unordered_set>

namespace ddf {

Schema::Schema(std::vector<Field> fields, std::vector<int> key_indices)
    : fields_(std::move(fields)), key_indices_(std::move(key_indices)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& f : fields_) {
    if (!seen.insert(f.name).second) {
      throw InvalidArgument("duplicate column name: " + f.name);
    }
  }
  for (int k : key_indices_) {
    if (k < 0 || k >= num_fields()) {
      throw InvalidArgument("key index out of range: " + std::to_string(k));
    }
  }
}

int Schema::index_of(std::string_view name) const {
  for (int i = 0; i < num_fields(); i++) {
    if (fields_[i].name == name) return i;
  }
  return -1;
}

int Schema::require(std::string_view name) const {
  int i = index_of(name);
  if (i < 0) throw InvalidArgument("unknown column: " + std::string(name));
  return i;
}

bool Schema::equals(const Schema& other) const {
  if (num_fields() != other.num_fields()) return false;
  for (int i = 0; i < num_fields(); i++) {
    if (fields_[i].name != other.fields_[i].name ||
        fields_[i].dtype != other.fields_[i].dtype) {
      return false;
    }
  }
  return true;
}

Schema Schema::with_keys(std::vector<int> key_indices) const {
  return Schema(fields_, std::move(key_indices));
}

}  // namespace ddf
