#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotnames/corpus.hpp"
#include "iotnames/error.hpp"
#include "iotnames/label.hpp"

namespace iotnames::pcap {

using Bytes = std::vector<std::uint8_t>;

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

inline constexpr std::uint32_t kMagicMicros = 0xA1B2C3D4;
inline constexpr std::uint32_t kMagicNanos = 0xA1B23C4D;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

struct FileHeader {
  bool swapped = false;
  bool nanosecond = false;
  std::uint16_t version_major = 2;
  std::uint16_t version_minor = 4;
  std::int32_t thiszone = 0;
  std::uint32_t sigfigs = 0;
  std::uint32_t snaplen = 65535;
  std::uint32_t linktype = kLinkTypeEthernet;
};

struct Packet {
  std::uint32_t ts_sec = 0;
  std::uint32_t ts_frac = 0;
  std::uint32_t original_length = 0;
  Bytes data;
};

struct Capture {
  FileHeader header;
  std::vector<Packet> packets;
  /// True when the file ended inside a record.
  bool truncated = false;
};

/// Classic pcap in either byte order. Throws FormatError on a bad file header.
Capture parse_capture(std::span<const std::uint8_t> bytes);
Capture read_capture(const std::filesystem::path& path);

/// Serializes in the byte order recorded in `capture.header`.
Bytes serialize_capture(const Capture& capture);

using MacAddress = std::array<std::uint8_t, 6>;

/// Maps MAC or IP addresses to a device class. MAC matches take precedence.
class DeviceMap {
 public:
  /// Accepts "aa:bb:cc:dd:ee:ff" or an IPv4/IPv6 literal.
  void add(std::string_view address, NameClass device_class);

  std::optional<NameClass> lookup(const MacAddress& mac, std::span<const std::uint8_t> ip) const;

  std::size_t size() const noexcept { return by_mac_.size() + by_ip_.size(); }

  /// CSV `address,class`; a header row, blank lines and '#' comments are skipped.
  static DeviceMap parse(std::string_view csv_text);
  static DeviceMap load(const std::filesystem::path& path);

 private:
  std::map<MacAddress, NameClass> by_mac_;
  std::map<Bytes, NameClass> by_ip_;
};

struct ExtractionResult {
  /// One list per class; names sorted so packet order does not matter.
  std::map<NameClass, NameList> lists;
  std::size_t packets = 0;
  std::size_t dns_responses = 0;
  std::size_t unmapped = 0;
  std::size_t parse_failures = 0;
  std::size_t skipped = 0;
};

/// Collects the question names of DNS responses (UDP source port 53, QR set)
/// delivered to mapped devices.
ExtractionResult extract_qnames(const Capture& capture, const DeviceMap& devices,
                                std::string_view provenance = {});

}  // namespace iotnames::pcap
