#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <set>

#include "dynamiqs/sym/derive.hpp"
#include "dynamiqs/sym/hash_chain.hpp"

using namespace dynamiqs;
using namespace dynamiqs::sym;

namespace {

// one-shot OpenSSL digest, separate from the EVP path the library uses
Digest oracle_sha(ByteView data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest oracle_link(const Digest& th, const Digest& mh, std::size_t k) {
  if (k == 0) return oracle_sha(concat({th, mh}));
  return oracle_sha(oracle_link(th, mh, k - 1));
}

Block32 filled(std::uint8_t v) {
  Block32 b;
  b.fill(v);
  return b;
}

}  // namespace

TEST(Sha256, KnownAnswers) {
  EXPECT_EQ(to_hex(sha256(ByteView{})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256("split input"), Sha256().update(as_view("split ")).update(as_view("input")).finish());
}

TEST(SessionKey, DeterministicAndOrderSensitive) {
  const auto a = filled(0x00), b = filled(0x01);
  const auto k = derive_session_key(a, b);
  EXPECT_EQ(k, derive_session_key(a, b));
  EXPECT_EQ(k.role, KeyRole::Session);
  EXPECT_NE(k.bytes, derive_session_key(b, a).bytes);
  EXPECT_EQ(to_hex(k.bytes), "5c85955f709283ecce2b74f1b1552918819f390911816e7bb466805a38ab87f3");
}

TEST(SessionKey, AnyByteChangesOutput) {
  SeededRandomSource rng(1);
  const auto a = rng.block32(), b = rng.block32();
  const auto base = derive_session_key(a, b).bytes;
  for (std::size_t i = 0; i < 64; ++i) {
    auto x = a, y = b;
    (i < 32 ? x[i] : y[i - 32]) ^= 0x80;
    EXPECT_NE(derive_session_key(x, y).bytes, base) << "byte " << i;
  }
  EXPECT_THROW(derive_session_key(ByteView(a.data(), 31), b), LengthError);
}

TEST(Pseudonym, KnownAnswerFixture) {
  const auto ps = derive_pseudonym(as_view("EV42"), 3, 5, 1);
  EXPECT_EQ(to_hex(ps.value), "f36edf48024bb712c930bb925fc69c4db565c9182ad13f2f7e3355116be7c78a");
  EXPECT_EQ(ps.index, 1u);
}

TEST(Pseudonym, DeterministicAndDistinct) {
  SeededRandomSource rng(2);
  const uint256_t d = from_be32(rng.block32());
  EXPECT_EQ(derive_pseudonym(as_view("EV-1"), d, 7, 0), derive_pseudonym(as_view("EV-1"), d, 7, 0));
  std::set<Digest> seen;
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const uint256_t a = from_be32(rng.block32()) | 1;
    seen.insert(derive_pseudonym(as_view("EV-1"), d, a, i).value);
  }
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(Pseudonym, FullWidthProductIsEncoded) {
  const uint256_t max = ~uint256_t(0);
  const auto enc = to_be64(uint512_t(max) * uint512_t(max));
  // (2^256 - 1)^2 = 2^512 - 2^257 + 1
  EXPECT_EQ(enc[0], 0xff);
  EXPECT_EQ(enc[31], 0xfe);
  EXPECT_EQ(enc[32], 0x00);
  EXPECT_EQ(enc[63], 0x01);
  EXPECT_NO_THROW(derive_pseudonym(as_view("EV"), max, max, 0));
}

TEST(Pseudonym, ZeroMultiplierRejected) {
  EXPECT_THROW(derive_pseudonym(as_view("EV"), 0, 5, 0), Error);
  EXPECT_THROW(derive_pseudonym(as_view("EV"), 3, 0, 0), Error);
}

TEST(Timestamp, LittleEndianPaddedTo32) {
  const auto t = encode_timestamp(0x0102030405060708ull);
  EXPECT_EQ(t[0], 0x08);
  EXPECT_EQ(t[7], 0x01);
  for (std::size_t i = 8; i < 32; ++i) EXPECT_EQ(t[i], 0);
  EXPECT_EQ(decode_timestamp(t), 0x0102030405060708ull);
  auto bad = t;
  bad[20] = 1;
  EXPECT_THROW(decode_timestamp(bad), FormatError);
}

TEST(Uint256, AdditionWrapsModulo2To256) {
  const uint256_t max = ~uint256_t(0);
  EXPECT_EQ(add_mod256(max, 1), 0);
  EXPECT_EQ(add_mod256(max, 5), 4);
  SeededRandomSource rng(3);
  const auto b = rng.block32();
  EXPECT_EQ(to_be32(from_be32(b)), b);
}

TEST(HashChain, SingleLinkUnrolled) {
  const auto t = filled(0xaa), m = filled(0xbb);
  const auto chain = build_hash_chain(t, m, 1);
  EXPECT_EQ(chain.link(1), oracle_sha(oracle_sha(concat({oracle_sha(t), oracle_sha(m)}))));
  EXPECT_EQ(chain.head(), chain.link(1));
  EXPECT_EQ(chain.value_for_pad(1), chain.link(0));
}

TEST(HashChain, ChainProperty) {
  const auto chain = build_hash_chain(filled(1), filled(2), 3);
  EXPECT_EQ(oracle_sha(chain.link(2)), chain.link(3));
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(oracle_sha(chain.link(k - 1)), chain.link(k));
  EXPECT_THROW(build_hash_chain(filled(1), filled(2), 0), LengthError);
}

TEST(HashChain, MatchesRecursiveDefinitionAt200) {
  SeededRandomSource rng(4);
  const auto t = rng.block32(), m = rng.block32();
  const auto chain = build_hash_chain(t, m, 200);
  ASSERT_EQ(chain.length(), 200u);
  const auto th = oracle_sha(t), mh = oracle_sha(m);
  for (std::size_t k : {0u, 1u, 57u, 199u, 200u}) EXPECT_EQ(chain.link(k), oracle_link(th, mh, k)) << k;
}

TEST(HashChain, VerifyAcceptsExactlyTheChainPairs) {
  SeededRandomSource rng(5);
  const auto chain = build_hash_chain(rng.block32(), rng.block32(), 20);
  const auto n = chain.length();
  for (std::size_t k = 1; k <= n; ++k) EXPECT_TRUE(chain_verify(chain.link(k - 1), chain.link(k)));
  EXPECT_FALSE(chain_verify(chain.head(), chain.head()));
  int accepts = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto candidate = rng.block32();
    for (std::size_t k = 0; k <= n; ++k) accepts += chain_verify(candidate, chain.link(k));
  }
  EXPECT_EQ(accepts, 0);
  // pad j gets link[n - j], which hashes to the value pad j - 1 saw
  for (std::size_t j = 2; j <= n; ++j) EXPECT_TRUE(chain_verify(chain.value_for_pad(j), chain.value_for_pad(j - 1)));
  EXPECT_TRUE(chain_verify(chain.value_for_pad(1), chain.head()));
}

TEST(Aead, Aes256GcmKnownAnswer) {
  SymmetricKey key{to_block32(from_hex("feffe9928665731c6d6a8f9467308308feffe9928665731c6d6a8f9467308308")),
                   KeyRole::Session};
  const auto iv = from_hex("cafebabefacedbaddecaf888");
  const auto pt = from_hex(
      "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a721c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657"
      "ba637b39");
  const auto aad = from_hex("feedfacedeadbeeffeedfacedeadbeefabaddad2");
  const auto sealed = aead_seal_with_nonce(key, iv, pt, aad);
  EXPECT_EQ(to_hex(sealed),
            "cafebabefacedbaddecaf888"
            "522dc1f099567d07f47f37a32a84427d643a8cdcbfe5c0c97598a2bd2555d1aa8cb08e48590dbb3da7b08b1056828838c5f61e63"
            "93ba7a0abcc9f662"
            "76fc6ece0f4e1768cddf8853bb2d551b");
  EXPECT_EQ(aead_open(key, sealed, aad), pt);
}

TEST(Aead, ZeroKeyEmptyInputTag) {
  const SymmetricKey key{};
  const auto sealed = aead_seal_with_nonce(key, Bytes(12, 0), {}, {});
  EXPECT_EQ(to_hex(sealed), "000000000000000000000000530f8afbc74536b9a963b4f1c4cb738b");
  EXPECT_TRUE(aead_open(key, sealed, {}).empty());
}

TEST(Aead, RoundTripAllLengths) {
  SeededRandomSource rng(6);
  const SymmetricKey key{rng.block32(), KeyRole::GroupCspaRsu};
  for (std::size_t len = 0; len <= 4096; len += (len < 64 ? 1 : 61)) {
    const auto pt = rng.bytes(len);
    const auto sealed = aead_seal(key, pt, as_view("ad"), rng);
    ASSERT_EQ(sealed.size(), len + kNonceSize + kTagSize);
    ASSERT_EQ(aead_open(key, sealed, as_view("ad")), pt) << len;
  }
  const auto pt = rng.bytes(4096);
  EXPECT_EQ(aead_open(key, aead_seal(key, pt, {}, rng), {}), pt);
}

TEST(Aead, RejectsEverySingleBitMutation) {
  SeededRandomSource rng(7);
  const SymmetricKey key{rng.block32(), KeyRole::GroupRsuCp};
  const auto ad = to_bytes("m3");
  const auto sealed = aead_seal(key, rng.bytes(96), ad, rng);
  int accepts = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = sealed;
    auto k = key;
    auto a = ad;
    switch (trial % 3) {
      case 0: c[rng.uniform_below(c.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform_below(8)); break;
      case 1: k.bytes[rng.uniform_below(32)] ^= static_cast<std::uint8_t>(1u << rng.uniform_below(8)); break;
      default: a[rng.uniform_below(a.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform_below(8)); break;
    }
    try {
      aead_open(k, c, a);
      ++accepts;
    } catch (const AuthenticationFailure&) {
    }
  }
  EXPECT_EQ(accepts, 0);
  EXPECT_THROW(aead_open(key, ByteView(sealed.data(), 20), ad), AuthenticationFailure);
}
