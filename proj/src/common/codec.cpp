#include "tender/common/codec.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

namespace tender {

Hash32 sha256(ByteView data) {
  Hash32 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::raw(ByteView v) {
  buf_.insert(buf_.end(), v.begin(), v.end());
  return *this;
}

ByteWriter& ByteWriter::bytes(ByteView v) {
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw ProtocolError(ErrorCode::kMalformedPayload, "truncated input");
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

bool ByteReader::boolean() {
  auto v = u8();
  if (v > 1) throw ProtocolError(ErrorCode::kMalformedPayload, "boolean out of range");
  return v == 1;
}

Bytes ByteReader::raw(std::size_t n) {
  need(n);
  Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
            data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

Bytes ByteReader::bytes() { return raw(u32()); }

std::string ByteReader::str() {
  auto b = bytes();
  return {b.begin(), b.end()};
}

void ByteReader::expect_done() const {
  if (!done()) throw ProtocolError(ErrorCode::kMalformedPayload, "trailing bytes");
}

}  // namespace tender
