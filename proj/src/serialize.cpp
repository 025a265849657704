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

#include "ddf/serialize.hpp"

#include <cstring>

#include "ddf/bytes.hpp"

namespace ddf {

namespace {

constexpr uint8_t kMagic[4] = {'D', 'D', 'F', '1'};
constexpr uint8_t kFlagHasValidity = 0x01;

std::vector<uint8_t> encode_offsets(std::span<const int64_t> offsets) {
  std::vector<uint8_t> out;
  out.reserve(offsets.size() * 8);
  for (int64_t v : offsets) put_u64(out, static_cast<uint64_t>(v));
  return out;
}

std::vector<int64_t> decode_offsets(std::span<const uint8_t> bytes) {
  if (bytes.size() % 8 != 0) {
    throw DecodeError("offsets buffer size not a multiple of 8");
  }
  std::vector<int64_t> out(bytes.size() / 8);
  for (size_t i = 0; i < out.size(); i++) {
    out[i] = static_cast<int64_t>(load_u64(bytes.data() + i * 8));
  }
  return out;
}

struct ColumnMeta {
  DataType dtype;
  bool has_validity;
  std::string name;
};

struct Header {
  uint64_t rows;
  std::vector<ColumnMeta> columns;
  std::vector<uint64_t> buffer_sizes;
};

Header parse_header(std::span<const uint8_t> header) {
  ByteReader r(header);
  const uint8_t* magic = r.take(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DecodeError("bad magic, not a serialized table");
  }
  Header h;
  uint32_t ncols = r.u32("column count");
  h.rows = r.u64("row count");
  h.columns.reserve(ncols);
  size_t nbuffers = 0;
  for (uint32_t c = 0; c < ncols; c++) {
    ColumnMeta m;
    m.dtype = data_type_from_tag(r.u8("dtype tag"));
    uint8_t flags = r.u8("flags");
    m.has_validity = flags & kFlagHasValidity;
    uint16_t name_len = r.u16("name length");
    const uint8_t* name = r.take(name_len, "name");
    m.name.assign(reinterpret_cast<const char*>(name), name_len);
    nbuffers += 1 + (m.has_validity ? 1 : 0) + (m.dtype == DataType::Utf8 ? 1 : 0);
    h.columns.push_back(std::move(m));
  }
  h.buffer_sizes.reserve(nbuffers);
  for (size_t b = 0; b < nbuffers; b++) {
    h.buffer_sizes.push_back(r.u64("buffer size"));
  }
  if (r.remaining() != 0) throw DecodeError("trailing bytes after header");
  return h;
}

}  // namespace

uint64_t SerializedTable::total_bytes() const {
  uint64_t n = header.size();
  for (const auto& b : buffers) n += b.size();
  return n;
}

std::vector<uint8_t> SerializedTable::to_bytes() const {
  std::vector<uint8_t> out;
  out.reserve(total_bytes());
  out.insert(out.end(), header.begin(), header.end());
  for (const auto& b : buffers) out.insert(out.end(), b.begin(), b.end());
  return out;
}

SerializedTable SerializedTable::from_bytes(std::span<const uint8_t> bytes) {
  // The header has no explicit length; re-parse to locate its end. Walk the
  // same fields parse_header validates.
  ByteReader r(bytes);
  const uint8_t* magic = r.take(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DecodeError("bad magic, not a serialized table");
  }
  uint32_t ncols = r.u32("column count");
  r.u64("row count");
  size_t nbuffers = 0;
  for (uint32_t c = 0; c < ncols; c++) {
    DataType dtype = data_type_from_tag(r.u8("dtype tag"));
    uint8_t flags = r.u8("flags");
    uint16_t name_len = r.u16("name length");
    r.take(name_len, "name");
    nbuffers += 1 + ((flags & kFlagHasValidity) ? 1 : 0) +
                (dtype == DataType::Utf8 ? 1 : 0);
  }
  std::vector<uint64_t> sizes(nbuffers);
  for (auto& s : sizes) s = r.u64("buffer size");

  SerializedTable st;
  st.header.assign(bytes.begin(), bytes.begin() + r.position());
  for (uint64_t s : sizes) {
    const uint8_t* p = r.take(s, "buffer payload");
    st.buffers.emplace_back(p, p + s);
  }
  if (r.remaining() != 0) throw DecodeError("trailing bytes after buffers");
  return st;
}

SerializedTable serialize_table(const Table& t) {
  SerializedTable st;
  auto& h = st.header;
  h.insert(h.end(), kMagic, kMagic + 4);
  put_u32(h, static_cast<uint32_t>(t.num_columns()));
  put_u64(h, static_cast<uint64_t>(t.num_rows()));
  for (int c = 0; c < t.num_columns(); c++) {
    const auto& field = t.schema().field(c);
    const auto& col = t.column(c);
    h.push_back(static_cast<uint8_t>(field.dtype));
    h.push_back(col.has_validity() ? kFlagHasValidity : 0);
    if (field.name.size() > 0xFFFF) {
      throw InvalidArgument("column name longer than 65535 bytes");
    }
    put_u16(h, static_cast<uint16_t>(field.name.size()));
    h.insert(h.end(), field.name.begin(), field.name.end());
  }
  for (int c = 0; c < t.num_columns(); c++) {
    const auto& col = t.column(c);
    if (col.has_validity()) {
      st.buffers.emplace_back(col.validity_buffer().begin(),
                              col.validity_buffer().end());
    }
    if (col.dtype() == DataType::Utf8) {
      st.buffers.push_back(encode_offsets(col.offsets()));
    }
    st.buffers.emplace_back(col.data().begin(), col.data().end());
  }
  for (const auto& b : st.buffers) put_u64(h, b.size());
  return st;
}

Table deserialize_table(const SerializedTable& s) {
  Header h = parse_header(s.header);
  if (h.buffer_sizes.size() != s.buffers.size()) {
    throw DecodeError("header buffer count does not match buffer list");
  }
  for (size_t b = 0; b < s.buffers.size(); b++) {
    if (h.buffer_sizes[b] != s.buffers[b].size()) {
      throw DecodeError("buffer " + std::to_string(b) + " size mismatch: header says " +
                        std::to_string(h.buffer_sizes[b]) + ", got " +
                        std::to_string(s.buffers[b].size()));
    }
  }

  const int64_t rows = static_cast<int64_t>(h.rows);
  std::vector<Field> fields;
  std::vector<Column> columns;
  size_t next = 0;
  for (const auto& m : h.columns) {
    fields.push_back({m.name, m.dtype});
    std::vector<uint8_t> validity;
    if (m.has_validity) {
      validity = s.buffers[next++];
      if (validity.size() < static_cast<size_t>((rows + 7) / 8)) {
        throw DecodeError("validity bitmap too short for row count");
      }
    }
    std::vector<int64_t> offsets;
    if (m.dtype == DataType::Utf8) {
      offsets = decode_offsets(s.buffers[next++]);
      if (offsets.size() != static_cast<size_t>(rows + 1)) {
        throw DecodeError("offsets length does not match row count");
      }
    }
    std::vector<uint8_t> data = s.buffers[next++];
    if (is_fixed_width(m.dtype) &&
        data.size() != static_cast<size_t>(rows * fixed_width(m.dtype))) {
      throw DecodeError("data buffer size does not match row count for " + m.name);
    }
    try {
      columns.emplace_back(m.dtype, rows, std::move(validity), std::move(offsets),
                           std::move(data));
    } catch (const InvalidArgument& e) {
      throw DecodeError(std::string("invalid column payload: ") + e.what());
    }
  }
  try {
    return Table(Schema(std::move(fields)), std::move(columns));
  } catch (const InvalidArgument& e) {
    throw DecodeError(std::string("invalid table payload: ") + e.what());
  }
}

}  // namespace ddf
