#include <gtest/gtest.h>

#include "tender/common/codec.hpp"

using namespace tender;

TEST(Hex, RoundTripsAndAcceptsPrefix) {
  const Bytes raw{0x00, 0x7f, 0xab, 0xff};
  EXPECT_EQ(to_hex(raw), "007fabff");
  EXPECT_EQ(from_hex("007fabff"), raw);
  EXPECT_EQ(from_hex("0x007FABFF"), raw);
  EXPECT_THROW(from_hex("abc"), std::invalid_argument);
  EXPECT_THROW(from_hex("zz"), std::invalid_argument);
}

TEST(FixedBytes, OrderingIsLexicographic) {
  const auto a = Address::from_hex("0000000000000000000000000000000000000001");
  const auto b = Address::from_hex("0000000000000000000000000000000000000100");
  EXPECT_LT(a, b);
  EXPECT_TRUE(Address{}.is_zero());
  EXPECT_THROW(Address::from_span(Bytes(19)), std::invalid_argument);
}

TEST(Sha256, MatchesKnownDigest) {
  EXPECT_EQ(sha256(as_bytes("abc")).hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256({}).hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Codec, RoundTripsEveryPrimitive) {
  ByteWriter w;
  w.u8(7).u32(0xdeadbeef).u64(1ull << 40).i64(-5).f64(-0.125).boolean(true).str("tender").bytes(Bytes{1, 2});
  const auto data = std::move(w).take();
  ByteReader r(data);
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u32(), 0xdeadbeefu);
  EXPECT_EQ(r.u64(), 1ull << 40);
  EXPECT_EQ(r.i64(), -5);
  EXPECT_EQ(r.f64(), -0.125);
  EXPECT_TRUE(r.boolean());
  EXPECT_EQ(r.str(), "tender");
  EXPECT_EQ(r.bytes(), (Bytes{1, 2}));
  EXPECT_NO_THROW(r.expect_done());
}

TEST(Codec, IsBigEndian) {
  ByteWriter w;
  w.u32(0x01020304);
  EXPECT_EQ(w.data(), (Bytes{1, 2, 3, 4}));
}

TEST(Codec, TruncationAndTrailingBytesAreMalformed) {
  const Bytes short_input{0, 0, 0, 9, 1};
  ByteReader r(short_input);
  try {
    r.bytes();
    FAIL() << "expected a throw";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedPayload);
  }
  const Bytes extra{1, 2};
  ByteReader r2(extra);
  r2.u8();
  EXPECT_THROW(r2.expect_done(), ProtocolError);
}

TEST(ErrorCode, NamesAreScreamingCase) {
  EXPECT_EQ(to_string(ErrorCode::kDataTooLarge), "DATA_TOO_LARGE");
  EXPECT_EQ(to_string(ErrorCode::kRepublishForbidden), "REPUBLISH_FORBIDDEN");
  const ProtocolError e(ErrorCode::kNotOwner, "x");
  EXPECT_EQ(e.code(), ErrorCode::kNotOwner);
}
