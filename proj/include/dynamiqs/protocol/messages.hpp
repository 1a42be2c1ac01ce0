#pragma once

#include <string>
#include <vector>

#include "dynamiqs/bytes.hpp"
#include "dynamiqs/errors.hpp"

namespace dynamiqs::protocol {

enum class MessageKind : std::uint8_t { M1 = 1, M2, M3, M4, M5, M6, M7, M8, M9, ChainStep };

inline std::string_view to_string(MessageKind k) {
  static constexpr std::string_view names[] = {"m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8", "m9", "chain"};
  return names[static_cast<std::size_t>(k) - 1];
}

// Sizes the cost model charges, independent of the real encoding.
inline std::size_t nominal_size(MessageKind k) {
  switch (k) {
    case MessageKind::M1:
    case MessageKind::M2:
    case MessageKind::M3: return 128;
    case MessageKind::M4:
    case MessageKind::M5: return 96;
    default: return 32;
  }
}

struct Message {
  MessageKind kind = MessageKind::M1;
  std::string sender;
  std::string receiver;
  Bytes wire;  // kind byte followed by the body

  std::size_t nominal_size() const { return protocol::nominal_size(kind); }
  ByteView body() const { return ByteView(wire).subspan(1); }
  // Associated data binding a ciphertext to its message kind.
  static Bytes associated_data(MessageKind k) { return Bytes{0x44, 0x51, static_cast<std::uint8_t>(k)}; }
};

inline Message make_message(MessageKind kind, std::string sender, std::string receiver, ByteView body) {
  Bytes wire;
  wire.reserve(body.size() + 1);
  wire.push_back(static_cast<std::uint8_t>(kind));
  wire.insert(wire.end(), body.begin(), body.end());
  return {kind, std::move(sender), std::move(receiver), std::move(wire)};
}

// Field tags of the tag-length-value payload encoding.
enum class Field : std::uint8_t {
  Pseudonym = 1,
  NonceEv = 2,
  Timestamp = 3,
  SecretZ = 4,
  Token = 5,
  NonceCspa = 6,
  SecretSum = 7,
  TokenHash = 8,
  SessionKey = 9,
  NonceRsu = 10,
  NonceRsuReply = 11,
  ChainNonce = 12,
  ChainLength = 13,
  ChainValue = 14,
};

class TlvWriter {
 public:
  TlvWriter& put(Field tag, ByteView value) {
    w_.u8(static_cast<std::uint8_t>(tag));
    w_.u16(static_cast<std::uint16_t>(value.size()));
    w_.raw(value);
    return *this;
  }
  TlvWriter& put_u32(Field tag, std::uint32_t v) {
    ByteWriter b;
    b.u32(v);
    return put(tag, b.bytes());
  }
  Bytes take() { return std::move(w_).take(); }

 private:
  ByteWriter w_;
};

// Reads fields in a fixed order; any deviation is a FormatError.
class TlvReader {
 public:
  explicit TlvReader(ByteView data) : r_(data) {}

  ByteView get(Field tag, std::size_t expected_len) {
    if (r_.u8() != static_cast<std::uint8_t>(tag)) throw FormatError("unexpected field tag");
    const auto len = r_.u16();
    if (len != expected_len) throw FormatError("unexpected field length");
    return r_.raw(len);
  }
  Block32 get32(Field tag) { return to_block32(get(tag, 32)); }
  std::uint32_t get_u32(Field tag) {
    ByteReader b(get(tag, 4));
    return b.u32();
  }
  void done() const { r_.expect_done(); }

 private:
  ByteReader r_;
};

}  // namespace dynamiqs::protocol
