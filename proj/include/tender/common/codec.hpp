#pragma once

#include <optional>
#include <string>

#include "tender/common/types.hpp"

namespace tender {

Hash32 sha256(ByteView data);

/// Big-endian, length-prefixed binary writer. Used for transaction payloads,
/// hashing preimages and the state digest, so its layout is consensus-relevant.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  ByteWriter& f64(double v);
  ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
  // Raw bytes, no length prefix.
  ByteWriter& raw(ByteView v);
  // u32 length prefix followed by the bytes.
  ByteWriter& bytes(ByteView v);
  ByteWriter& str(std::string_view v) { return bytes(as_bytes(v)); }
  template <std::size_t N, typename Tag>
  ByteWriter& fixed(const FixedBytes<N, Tag>& v) {
    return raw(v.view());
  }

  const Bytes& data() const& { return buf_; }
  Bytes take() && { return std::move(buf_); }
  Hash32 digest() const { return sha256(buf_); }

 private:
  Bytes buf_;
};

/// Reader counterpart; every accessor throws ProtocolError(kMalformedPayload)
/// when the input is exhausted.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  bool boolean();
  Bytes raw(std::size_t n);
  Bytes bytes();
  std::string str();
  template <typename Fixed>
  Fixed fixed() {
    auto b = raw(Fixed::size());
    return Fixed::from_span(b);
  }

  bool done() const { return pos_ == data_.size(); }
  // Throws if trailing bytes remain.
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace tender
