#include "iotnames/pcap.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "iotnames/csv.hpp"
#include "iotnames/dns_message.hpp"

namespace iotnames::pcap {
namespace {

std::uint32_t bswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xFF00) | ((v << 8) & 0xFF0000) | (v << 24);
}
std::uint16_t bswap16(std::uint16_t v) { return static_cast<std::uint16_t>((v >> 8) | (v << 8)); }

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t load_le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint16_t load_be16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

void store_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void store_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

struct PacketError {};

// Destination addresses and UDP payload of one frame, or nullopt when the
// frame is not a UDP datagram from port 53.
struct Delivery {
  MacAddress dst_mac{};
  Bytes dst_ip;
  std::span<const std::uint8_t> payload;
};

std::optional<Delivery> dissect(std::span<const std::uint8_t> frame) {
  if (frame.size() < 14) throw PacketError{};
  Delivery d;
  std::copy_n(frame.begin(), 6, d.dst_mac.begin());
  std::size_t off = 12;
  std::uint16_t ethertype = load_be16(&frame[off]);
  off += 2;
  while (ethertype == 0x8100 || ethertype == 0x88A8) {
    if (frame.size() < off + 4) throw PacketError{};
    ethertype = load_be16(&frame[off + 2]);
    off += 4;
  }

  std::span<const std::uint8_t> udp;
  if (ethertype == 0x0800) {
    if (frame.size() < off + 20) throw PacketError{};
    const auto* ip = &frame[off];
    if ((ip[0] >> 4) != 4) throw PacketError{};
    const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
    const std::size_t total = load_be16(ip + 2);
    if (ihl < 20 || total < ihl || frame.size() < off + total) throw PacketError{};
    if (ip[9] != 17) return std::nullopt;
    const std::uint16_t frag = load_be16(ip + 6);
    if ((frag & 0x1FFF) != 0 || (frag & 0x2000) != 0) return std::nullopt;
    d.dst_ip.assign(ip + 16, ip + 20);
    udp = frame.subspan(off + ihl, total - ihl);
  } else if (ethertype == 0x86DD) {
    if (frame.size() < off + 40) throw PacketError{};
    const auto* ip = &frame[off];
    if ((ip[0] >> 4) != 6) throw PacketError{};
    const std::size_t payload_len = load_be16(ip + 4);
    if (frame.size() < off + 40 + payload_len) throw PacketError{};
    if (ip[6] != 17) return std::nullopt;
    d.dst_ip.assign(ip + 24, ip + 40);
    udp = frame.subspan(off + 40, payload_len);
  } else {
    return std::nullopt;
  }

  if (udp.size() < 8) throw PacketError{};
  const std::uint16_t src_port = load_be16(&udp[0]);
  const std::size_t udp_len = load_be16(&udp[4]);
  if (udp_len < 8 || udp_len > udp.size()) throw PacketError{};
  if (src_port != 53) return std::nullopt;
  d.payload = udp.subspan(8, udp_len - 8);
  return d;
}

std::optional<MacAddress> parse_mac(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  MacAddress mac{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (i > 0 && text[i * 3 - 1] != ':' && text[i * 3 - 1] != '-') return std::nullopt;
    unsigned value = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      char c = text[i * 3 + j];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<unsigned>(c - 'A' + 10);
      else return std::nullopt;
    }
    mac[i] = static_cast<std::uint8_t>(value);
  }
  return mac;
}

std::optional<Bytes> parse_ip(std::string_view text) {
  std::string s(text);
  std::uint8_t buf[16];
  if (::inet_pton(AF_INET, s.c_str(), buf) == 1) return Bytes(buf, buf + 4);
  if (::inet_pton(AF_INET6, s.c_str(), buf) == 1) return Bytes(buf, buf + 16);
  return std::nullopt;
}

}  // namespace

Capture parse_capture(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 24) throw FormatError("pcap file shorter than its 24-byte header");
  Capture cap;
  const std::uint32_t magic = load_le32(bytes.data());
  if (magic == kMagicMicros || magic == kMagicNanos) {
    cap.header.swapped = false;
  } else if (bswap32(magic) == kMagicMicros || bswap32(magic) == kMagicNanos) {
    cap.header.swapped = true;
  } else {
    throw FormatError("not a classic pcap file (bad magic)");
  }
  const bool sw = cap.header.swapped;
  auto r32 = [&](std::size_t off) {
    auto v = load_le32(bytes.data() + off);
    return sw ? bswap32(v) : v;
  };
  auto r16 = [&](std::size_t off) {
    auto v = load_le16(bytes.data() + off);
    return sw ? bswap16(v) : v;
  };
  cap.header.nanosecond = r32(0) == kMagicNanos;
  cap.header.version_major = r16(4);
  cap.header.version_minor = r16(6);
  cap.header.thiszone = static_cast<std::int32_t>(r32(8));
  cap.header.sigfigs = r32(12);
  cap.header.snaplen = r32(16);
  cap.header.linktype = r32(20);
  if (cap.header.linktype != kLinkTypeEthernet) {
    throw FormatError("unsupported link type " + std::to_string(cap.header.linktype) + " (Ethernet only)");
  }

  std::size_t off = 24;
  while (off < bytes.size()) {
    if (bytes.size() - off < 16) {
      cap.truncated = true;
      break;
    }
    Packet p;
    p.ts_sec = r32(off);
    p.ts_frac = r32(off + 4);
    const std::uint32_t incl = r32(off + 8);
    p.original_length = r32(off + 12);
    off += 16;
    if (bytes.size() - off < incl) {
      cap.truncated = true;
      break;
    }
    p.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                  bytes.begin() + static_cast<std::ptrdiff_t>(off + incl));
    off += incl;
    cap.packets.push_back(std::move(p));
  }
  return cap;
}

Capture read_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read capture '" + path.string() + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_capture(bytes);
}

Bytes serialize_capture(const Capture& capture) {
  const auto& h = capture.header;
  Bytes out;
  auto w32 = [&](std::uint32_t v) { store_le32(out, h.swapped ? bswap32(v) : v); };
  auto w16 = [&](std::uint16_t v) { store_le16(out, h.swapped ? bswap16(v) : v); };
  w32(h.nanosecond ? kMagicNanos : kMagicMicros);
  w16(h.version_major);
  w16(h.version_minor);
  w32(static_cast<std::uint32_t>(h.thiszone));
  w32(h.sigfigs);
  w32(h.snaplen);
  w32(h.linktype);
  for (const auto& p : capture.packets) {
    w32(p.ts_sec);
    w32(p.ts_frac);
    w32(static_cast<std::uint32_t>(p.data.size()));
    w32(p.original_length);
    out.insert(out.end(), p.data.begin(), p.data.end());
  }
  return out;
}

void DeviceMap::add(std::string_view address, NameClass device_class) {
  if (auto mac = parse_mac(address)) {
    by_mac_[*mac] = device_class;
  } else if (auto ip = parse_ip(address)) {
    by_ip_[*ip] = device_class;
  } else {
    throw InputError("device address '" + std::string(address) + "' is neither a MAC nor an IP literal");
  }
}

std::optional<NameClass> DeviceMap::lookup(const MacAddress& mac, std::span<const std::uint8_t> ip) const {
  if (auto it = by_mac_.find(mac); it != by_mac_.end()) return it->second;
  if (auto it = by_ip_.find(Bytes(ip.begin(), ip.end())); it != by_ip_.end()) return it->second;
  return std::nullopt;
}

DeviceMap DeviceMap::parse(std::string_view csv_text) {
  DeviceMap map;
  std::size_t line_no = 0;
  while (!csv_text.empty()) {
    auto nl = csv_text.find('\n');
    std::string_view line = csv_text.substr(0, nl);
    csv_text.remove_prefix(nl == std::string_view::npos ? csv_text.size() : nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = csv::split_record(line);
    if (fields.size() != 2) throw InputError("device map line " + std::to_string(line_no) + ": expected address,class");
    if (line_no == 1 && fields[0] == "address") continue;
    auto cls = parse_name_class(fields[1]);
    if (!cls) throw InputError("device map line " + std::to_string(line_no) + ": unknown class '" + fields[1] + "'");
    map.add(fields[0], *cls);
  }
  return map;
}

DeviceMap DeviceMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read device map '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

ExtractionResult extract_qnames(const Capture& capture, const DeviceMap& devices, std::string_view provenance) {
  ExtractionResult result;
  std::map<NameClass, std::set<std::string>> found{{NameClass::IotM2M, {}}, {NameClass::Other, {}}};

  for (const auto& packet : capture.packets) {
    ++result.packets;
    try {
      auto delivery = dissect(packet.data);
      if (!delivery) {
        ++result.skipped;
        continue;
      }
      auto message = dns::decode(delivery->payload);
      if (!message.header.qr || message.questions.empty()) {
        ++result.skipped;
        continue;
      }
      ++result.dns_responses;
      auto cls = devices.lookup(delivery->dst_mac, delivery->dst_ip);
      if (!cls) {
        ++result.unmapped;
        continue;
      }
      auto name = split_labels(normalize(message.questions.front().qname.text()).text);
      found[*cls].insert(name.text());
    } catch (const PacketError&) {
      ++result.parse_failures;
    } catch (const InputError&) {
      ++result.parse_failures;
    }
  }

  for (auto& [cls, names] : found) {
    NameList list(std::string(to_string(cls)), cls, std::string(provenance));
    for (const auto& text : names) list.add(split_labels(text));
    result.lists.emplace(cls, std::move(list));
  }
  return result;
}

}  // namespace iotnames::pcap
