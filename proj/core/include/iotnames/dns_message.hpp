#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotnames/error.hpp"
#include "iotnames/names.hpp"

namespace iotnames::dns {

using Bytes = std::vector<std::uint8_t>;

enum class RecordType : std::uint16_t {
  A = 1,
  NS = 2,
  CNAME = 5,
  SOA = 6,
  PTR = 12,
  MX = 15,
  TXT = 16,
  AAAA = 28,
  OPT = 41,
  ANY = 255,
};

inline constexpr std::uint16_t kClassIn = 1;
inline constexpr std::size_t kHeaderSize = 12;
inline constexpr std::size_t kMaxWireLabel = 63;
inline constexpr std::size_t kMaxWireName = 255;
inline constexpr std::uint16_t kEdnsPayload = 1232;

enum class Rcode : std::uint8_t {
  NoError = 0,
  FormErr = 1,
  ServFail = 2,
  NxDomain = 3,
  NotImp = 4,
  Refused = 5,
};

std::string rcode_name(std::uint8_t rcode);

struct Header {
  std::uint16_t id = 0;
  bool qr = false;
  std::uint8_t opcode = 0;
  bool aa = false;
  bool tc = false;
  bool rd = false;
  bool ra = false;
  std::uint8_t rcode = 0;

  bool operator==(const Header&) const = default;
};

struct Question {
  DomainName qname;
  std::uint16_t qtype = static_cast<std::uint16_t>(RecordType::A);
  std::uint16_t qclass = kClassIn;

  bool operator==(const Question&) const = default;
};

/// A resource record. An empty `name` is the root (used by OPT).
struct ResourceRecord {
  std::vector<std::string> name;
  std::uint16_t type = 0;
  std::uint16_t rclass = kClassIn;
  std::uint32_t ttl = 0;
  Bytes rdata;

  bool operator==(const ResourceRecord&) const = default;
};

struct Message {
  Header header;
  std::vector<Question> questions;
  std::vector<ResourceRecord> answers;
  std::vector<ResourceRecord> authority;
  std::vector<ResourceRecord> additional;

  bool operator==(const Message&) const = default;
};

class EncodeError : public InputError {
 public:
  using InputError::InputError;
};

/// Malformed wire data; `offset` is where decoding stopped.
class DecodeError : public InputError {
 public:
  enum class Kind { Truncated, PointerLoop, PointerOutOfRange, BadLabel, NameTooLong, EmptyQuestionName };

  DecodeError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Serializes without name compression.
Bytes encode(const Message& message);

/// Parses a complete message, following compression pointers. Pointers must
/// refer to an earlier offset; anything else is reported as a loop.
Message decode(std::span<const std::uint8_t> wire);

struct QueryOptions {
  bool recursion_desired = true;
  /// Adds an EDNS0 OPT record advertising this UDP payload size.
  std::optional<std::uint16_t> edns_payload;
};

/// A single-question query for `name`.
Bytes encode_query(const DomainName& name, RecordType qtype, std::uint16_t id,
                   const QueryOptions& options = {});

/// Alias of decode() for responses.
inline Message decode_response(std::span<const std::uint8_t> wire) { return decode(wire); }

/// A response to `query` with the given rcode and answer records.
Message make_response(const Message& query, std::uint8_t rcode,
                      std::vector<ResourceRecord> answers = {});

}  // namespace iotnames::dns
